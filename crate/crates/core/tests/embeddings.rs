mod common;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relbias::embeddings::{
    default_definitional_pairs, default_gendered_words, gender_direction, hard_debias, train_sgns,
    EmbeddingMatrix, SgnsConfig, Vocabulary, PAD, UNK,
};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt())
}

fn sentences_of(corpus: &[Vec<String>]) -> impl Iterator<Item = &[String]> {
    corpus.iter().map(Vec::as_slice)
}

#[test]
fn sgns_separates_two_topic_clusters() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cluster = |c: char| (0..10).map(move |i| format!("{c}{i}")).collect::<Vec<_>>();
    let (a, b) = (cluster('a'), cluster('b'));
    let corpus: Vec<Vec<String>> = (0..2000)
        .map(|k| {
            let words = if k % 2 == 0 { &a } else { &b };
            (0..8).map(|_| words[rng.gen_range(0..10)].clone()).collect()
        })
        .collect();
    let vocab = Vocabulary::build(sentences_of(&corpus), 1).unwrap();
    let config = SgnsConfig { dim: 20, window: 3, epochs: 3, subsample_t: 0.0, ..Default::default() };
    let m = train_sgns(sentences_of(&corpus), &vocab, &config).unwrap();
    let mean = |xs: &[String], ys: &[String], same: bool| {
        let mut total = 0.0;
        let mut n = 0.0;
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                if same && i >= j {
                    continue;
                }
                total += cosine(m.vector(x).unwrap(), m.vector(y).unwrap());
                n += 1.0;
            }
        }
        total / n
    };
    let intra = (mean(&a, &a, true) + mean(&b, &b, true)) / 2.0;
    let inter = mean(&a, &b, false);
    assert!(intra > inter + 0.1, "intra {intra} inter {inter}");
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix; returns the
/// eigenvector of the largest eigenvalue.
fn jacobi_top_eigenvector(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let top = (0..n).max_by(|&i, &j| a[i][i].total_cmp(&a[j][j])).unwrap();
    v.iter().map(|row| row[top]).collect()
}

fn toy_matrix(words: &[(&str, [f64; 3])]) -> EmbeddingMatrix {
    let vocab = Vocabulary::from_words(words.iter().map(|(w, _)| (w.to_string(), 1)).collect()).unwrap();
    let mut data = vec![0.0; vocab.len() * 3];
    for (w, v) in words {
        let i = vocab.get(w).unwrap();
        data[i * 3..i * 3 + 3].copy_from_slice(v);
    }
    EmbeddingMatrix::new(vocab, 3, data).unwrap()
}

fn pairs(p: &[(&str, &str)]) -> Vec<(String, String)> {
    p.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn direction_matches_independent_eigensolver() {
    let words = [
        ("she", [-1.0, 0.2, 0.1]),
        ("he", [0.9, 0.25, 0.05]),
        ("woman", [-0.8, -0.3, 0.4]),
        ("man", [1.1, -0.2, 0.35]),
        ("girl", [-0.7, 0.5, -0.2]),
        ("boy", [0.6, 0.45, -0.1]),
    ];
    let m = toy_matrix(&words);
    let p = pairs(&[("she", "he"), ("woman", "man"), ("girl", "boy")]);
    let g = gender_direction(&m, &p).unwrap();

    let mut cov = vec![vec![0.0; 3]; 3];
    for (a, b) in &p {
        let (va, vb) = (m.vector(a).unwrap(), m.vector(b).unwrap());
        for v in [va, vb] {
            let d: Vec<f64> = (0..3).map(|k| v[k] - (va[k] + vb[k]) / 2.0).collect();
            for i in 0..3 {
                for j in 0..3 {
                    cov[i][j] += d[i] * d[j];
                }
            }
        }
    }
    let mut expected = jacobi_top_eigenvector(cov);
    let norm = dot(&expected, &expected).sqrt();
    expected.iter_mut().for_each(|x| *x /= norm);
    if dot(&expected, m.vector("he").unwrap()) < 0.0 {
        expected.iter_mut().for_each(|x| *x = -*x);
    }
    for k in 0..3 {
        assert!((g.vector[k] - expected[k]).abs() < 1e-9, "{:?} vs {expected:?}", g.vector);
    }
    assert!((dot(&g.vector, &g.vector) - 1.0).abs() < 1e-9);
    assert!(g.project(m.vector("he").unwrap()) >= 0.0);
}

#[test]
fn direction_ignores_order_within_pairs() {
    let corpus = common::gendered_corpus(800, 2);
    let vocab = Vocabulary::build(sentences_of(&corpus), 1).unwrap();
    let config = SgnsConfig { dim: 16, epochs: 2, subsample_t: 0.0, ..Default::default() };
    let m = train_sgns(sentences_of(&corpus), &vocab, &config).unwrap();
    let forward = default_definitional_pairs();
    let reversed: Vec<(String, String)> = forward.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
    let g1 = gender_direction(&m, &forward).unwrap();
    let g2 = gender_direction(&m, &reversed).unwrap();
    for (x, y) in g1.vector.iter().zip(&g2.vector) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn hard_debias_invariants_on_trained_vectors() {
    let corpus = common::gendered_corpus(2000, 8);
    let vocab = Vocabulary::build(sentences_of(&corpus), 1).unwrap();
    let config = SgnsConfig { dim: 24, epochs: 2, ..Default::default() };
    let m = train_sgns(sentences_of(&corpus), &vocab, &config).unwrap();
    let pairs = default_definitional_pairs();
    let gendered = default_gendered_words();
    let g = gender_direction(&m, &pairs).unwrap();
    let out = hard_debias(&m, &g, &gendered, &pairs).unwrap();

    let mut exempt: HashSet<String> = gendered.iter().map(|w| w.to_lowercase()).collect();
    exempt.extend(pairs.iter().flat_map(|(a, b)| [a.to_lowercase(), b.to_lowercase()]));
    exempt.extend([UNK.to_string(), PAD.to_string()]);
    let mut checked = 0;
    for (i, w) in out.vocab().words().iter().enumerate() {
        if exempt.contains(w) {
            continue;
        }
        let v = out.row(i);
        assert!(dot(v, &g.vector).abs() <= 1e-6, "{w}");
        assert!((dot(v, v).sqrt() - 1.0).abs() <= 1e-6, "{w}");
        checked += 1;
    }
    assert!(checked >= 20);
    for (a, b) in &pairs {
        let (va, vb) = (out.vector(a).unwrap(), out.vector(b).unwrap());
        let (pa, pb) = (dot(va, &g.vector), dot(vb, &g.vector));
        assert!((pa + pb).abs() <= 1e-9, "{a}/{b}: {pa} {pb}");
        for k in 0..va.len() {
            let oa = va[k] - pa * g.vector[k];
            let ob = vb[k] - pb * g.vector[k];
            assert!((oa - ob).abs() <= 1e-9);
        }
        assert!((dot(va, va) - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn embeddings_round_trip_through_text() {
    let corpus = common::gendered_corpus(100, 1);
    let vocab = Vocabulary::build(sentences_of(&corpus), 1).unwrap();
    let config = SgnsConfig { dim: 8, epochs: 1, ..Default::default() };
    let m = train_sgns(sentences_of(&corpus), &vocab, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vectors.txt");
    m.write(&path).unwrap();
    // The text format stores words and vectors, not corpus counts.
    let back = EmbeddingMatrix::read(&path).unwrap();
    assert_eq!(back.vocab().words(), m.vocab().words());
    assert!(back.data() == m.data());
}
