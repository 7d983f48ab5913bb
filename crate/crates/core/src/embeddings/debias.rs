use std::collections::HashSet;

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};

use super::vocab::normalize;
use super::{EmbeddingMatrix, PAD_INDEX, UNK_INDEX};
use crate::error::{Error, Result};

/// Unit vector spanning the estimated gender subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct GenderDirection {
    pub vector: Vec<f64>,
    /// True when the principal component was negated so that the reference
    /// male word projects non-negatively.
    pub flipped: bool,
}

impl GenderDirection {
    pub fn project(&self, w: &[f64]) -> f64 {
        dot(&self.vector, w)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Top principal component of the pair-centered definitional vectors.
///
/// Every pair `(female, male)` contributes `a - μ` and `b - μ` with
/// `μ = (a + b) / 2`. Pairs with a word outside the vocabulary are skipped;
/// if none remain the error lists every missing word.
pub fn gender_direction(
    matrix: &EmbeddingMatrix,
    definitional_pairs: &[(String, String)],
) -> Result<GenderDirection> {
    let dim = matrix.dim();
    let vocab = matrix.vocab();
    let mut missing = Vec::new();
    let mut used = Vec::new();
    for (a, b) in definitional_pairs {
        let (na, nb) = (normalize(a), normalize(b));
        match (vocab.get(&na), vocab.get(&nb)) {
            (Some(ia), Some(ib)) => used.push((ia, ib)),
            (ia, ib) => {
                if ia.is_none() {
                    missing.push(na);
                }
                if ib.is_none() {
                    missing.push(nb);
                }
            }
        }
    }
    if used.is_empty() {
        return Err(Error::data(format!(
            "no definitional pair is fully in the vocabulary; missing: {}",
            missing.join(", ")
        )));
    }

    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    for &(ia, ib) in &used {
        let (a, b) = (matrix.row(ia), matrix.row(ib));
        let mu: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect();
        for w in [a, b] {
            let c: Vec<f64> = w.iter().zip(&mu).map(|(x, m)| x - m).collect();
            for i in 0..dim {
                for j in 0..dim {
                    cov[(i, j)] += c[i] * c[j];
                }
            }
        }
    }
    cov /= (2 * used.len()) as f64;

    let eig = SymmetricEigen::new(cov);
    let top = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap();
    let mut vector: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    let n = norm(&vector);
    vector.iter_mut().for_each(|x| *x /= n);

    let reference = vocab
        .get("he")
        .or_else(|| used.first().map(|&(_, ib)| ib))
        .unwrap();
    let flipped = dot(&vector, matrix.row(reference)) < 0.0;
    if flipped {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(GenderDirection { vector, flipped })
}

/// Hard debiasing: neutralize then equalize.
///
/// Every word outside `gendered_words`, the equalize pairs and the special
/// tokens loses its component along `g` and is renormalized to unit length.
/// Each equalize pair is then moved to be symmetric around the
/// gender-neutral midpoint, keeping unit norm and the sign of each word's
/// original projection.
pub fn hard_debias(
    matrix: &EmbeddingMatrix,
    direction: &GenderDirection,
    gendered_words: &[String],
    equalize_pairs: &[(String, String)],
) -> Result<EmbeddingMatrix> {
    let g = &direction.vector;
    if g.len() != matrix.dim() {
        return Err(Error::config(format!(
            "gender direction has dimension {}, embeddings have {}",
            g.len(),
            matrix.dim()
        )));
    }
    if (norm(g) - 1.0).abs() > 1e-9 {
        return Err(Error::config("gender direction must have unit norm"));
    }
    let vocab = matrix.vocab();
    let mut exempt: HashSet<usize> = [UNK_INDEX, PAD_INDEX].into_iter().collect();
    exempt.extend(gendered_words.iter().filter_map(|w| vocab.get(&normalize(w))));
    let pairs: Vec<(usize, usize)> = equalize_pairs
        .iter()
        .filter_map(|(a, b)| {
            let pair = (vocab.get(&normalize(a))?, vocab.get(&normalize(b))?);
            Some(pair)
        })
        .collect();
    if pairs.len() < equalize_pairs.len() {
        warn!(
            "{} equalize pair(s) skipped: word not in vocabulary",
            equalize_pairs.len() - pairs.len()
        );
    }
    exempt.extend(pairs.iter().flat_map(|&(a, b)| [a, b]));

    let mut out = matrix.clone();
    for i in 0..out.rows() {
        if exempt.contains(&i) {
            continue;
        }
        let row = out.row_mut(i);
        let p = dot(row, g);
        row.iter_mut().zip(g).for_each(|(x, gi)| *x -= p * gi);
        let n = norm(row);
        if n <= f64::EPSILON * norm(matrix.row(i)) {
            return Err(Error::data(format!(
                "word `{}` lies entirely along the gender direction and cannot be normalized",
                vocab.word(i)
            )));
        }
        row.iter_mut().for_each(|x| *x /= n);
    }

    for &(ia, ib) in &pairs {
        let unit = |i: usize| -> Result<Vec<f64>> {
            let w = matrix.row(i);
            let n = norm(w);
            if n == 0.0 {
                return Err(Error::data(format!(
                    "equalize word `{}` has a zero vector",
                    vocab.word(i)
                )));
            }
            Ok(w.iter().map(|x| x / n).collect())
        };
        let (a, b) = (unit(ia)?, unit(ib)?);
        let mu: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2.0).collect();
        let mp = dot(&mu, g);
        let nu: Vec<f64> = mu.iter().zip(g).map(|(m, gi)| m - mp * gi).collect();
        let mut z = (1.0 - dot(&nu, &nu)).max(0.0).sqrt();
        if dot(&a, g) < dot(&b, g) {
            z = -z;
        }
        for (k, v) in out.row_mut(ia).iter_mut().enumerate() {
            *v = nu[k] + z * g[k];
        }
        for (k, v) in out.row_mut(ib).iter_mut().enumerate() {
            *v = nu[k] - z * g[k];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::Vocabulary;

    fn matrix(words: &[(&str, &[f64])]) -> EmbeddingMatrix {
        let dim = words[0].1.len();
        let vocab =
            Vocabulary::from_words(words.iter().map(|(w, _)| (w.to_string(), 1)).collect()).unwrap();
        let mut data = vec![0.1; 2 * dim];
        for (_, v) in words {
            data.extend_from_slice(v);
        }
        EmbeddingMatrix::new(vocab, dim, data).unwrap()
    }

    fn pairs(p: &[(&str, &str)]) -> Vec<(String, String)> {
        p.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn symmetric_toy_direction() {
        let m = matrix(&[("she", &[-1.0, 0.0]), ("he", &[1.0, 0.0])]);
        let g = gender_direction(&m, &pairs(&[("she", "he")])).unwrap();
        assert!((g.vector[0] - 1.0).abs() < 1e-12 && g.vector[1].abs() < 1e-12);
    }

    #[test]
    fn single_pair_is_normalized_difference() {
        let m = matrix(&[("queen", &[0.3, 0.9, -0.2]), ("king", &[0.8, 0.1, 0.4])]);
        let g = gender_direction(&m, &pairs(&[("queen", "king")])).unwrap();
        let diff = [0.5, -0.8, 0.6];
        let n = norm(&diff);
        let cos = dot(&g.vector, &diff) / n;
        assert!((cos.abs() - 1.0).abs() < 1e-9);
        // "he" is absent, so the first male word fixes the orientation.
        assert!(g.project(m.vector("king").unwrap()) >= 0.0);
    }

    #[test]
    fn no_pair_in_vocabulary_lists_missing_words() {
        let m = matrix(&[("he", &[1.0, 0.0])]);
        let err = gender_direction(&m, &pairs(&[("she", "he"), ("woman", "man")])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("she") && msg.contains("woman") && msg.contains("man"));
    }

    #[test]
    fn orthogonal_unit_vector_is_a_fixed_point() {
        let m = matrix(&[("desk", &[0.0, 1.0])]);
        let g = GenderDirection { vector: vec![1.0, 0.0], flipped: false };
        let d = hard_debias(&m, &g, &[], &[]).unwrap();
        let v = d.vector("desk").unwrap();
        assert!(v[0].abs() < 1e-9 && (v[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn neutralize_hand_computed() {
        let m = matrix(&[("nurse", &[0.6, 0.8])]);
        let g = GenderDirection { vector: vec![1.0, 0.0], flipped: false };
        let d = hard_debias(&m, &g, &[], &[]).unwrap();
        let v = d.vector("nurse").unwrap();
        assert!(v[0].abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equalize_hand_computed() {
        let m = matrix(&[("he", &[1.0, 0.5]), ("she", &[-1.0, 0.5])]);
        let g = GenderDirection { vector: vec![1.0, 0.0], flipped: false };
        let d = hard_debias(&m, &g, &[], &pairs(&[("he", "she")])).unwrap();
        let (a, b) = (d.vector("he").unwrap(), d.vector("she").unwrap());
        // Unit-normalized inputs are (±2, 1)/√5; the midpoint is (0, 1/√5).
        let s5 = 5f64.sqrt();
        assert!((a[0] - 2.0 / s5).abs() < 1e-12 && (a[1] - 1.0 / s5).abs() < 1e-12);
        assert!((b[0] + 2.0 / s5).abs() < 1e-12 && (b[1] - 1.0 / s5).abs() < 1e-12);
    }

    #[test]
    fn vector_along_direction_cannot_be_neutralized() {
        let m = matrix(&[("guy", &[0.6, 0.0])]);
        let g = GenderDirection { vector: vec![1.0, 0.0], flipped: false };
        let err = hard_debias(&m, &g, &[], &[]).unwrap_err();
        assert!(err.to_string().contains("guy"));
        // Exempting the word avoids the error.
        assert!(hard_debias(&m, &g, &["guy".to_string()], &[]).is_ok());
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let m = matrix(&[("desk", &[0.0, 1.0])]);
        let g = GenderDirection { vector: vec![2.0, 0.0], flipped: false };
        assert!(hard_debias(&m, &g, &[], &[]).is_err());
    }
}
