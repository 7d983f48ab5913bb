use crate::error::{Error, Result};

/// Fleiss' kappa over an `items × categories` table of rating counts.
///
/// Every item must carry the same number of ratings `n ≥ 2`. Kappa is
/// undefined when the expected agreement is 1, i.e. every rating falls in a
/// single category.
pub fn fleiss_kappa(table: &[Vec<usize>]) -> Result<f64> {
    if table.len() < 2 {
        return Err(Error::data("Fleiss' kappa needs at least two items"));
    }
    let categories = table[0].len();
    let n: usize = table[0].iter().sum();
    if n < 2 {
        return Err(Error::data("Fleiss' kappa needs at least two ratings per item"));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != categories || row.iter().sum::<usize>() != n {
            return Err(Error::data(format!(
                "item {i} has a different number of ratings or categories than item 0"
            )));
        }
    }
    let items = table.len() as f64;
    let nf = n as f64;
    let p_bar = table
        .iter()
        .map(|row| {
            let sq: usize = row.iter().map(|c| c * c).sum();
            (sq - n) as f64 / (nf * (nf - 1.0))
        })
        .sum::<f64>()
        / items;
    let p_e: f64 = (0..categories)
        .map(|j| {
            let pj = table.iter().map(|row| row[j]).sum::<usize>() as f64 / (items * nf);
            pj * pj
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::data(
            "Fleiss' kappa is undefined: every rating falls in one category",
        ));
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_agreement_is_one() {
        let k = fleiss_kappa(&[vec![3, 0], vec![0, 3], vec![3, 0]]).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn chance_agreement_is_zero() {
        let k = fleiss_kappa(&[vec![1, 1], vec![2, 0], vec![0, 2], vec![1, 1]]).unwrap();
        assert!(k.abs() < 1e-15);
    }

    #[test]
    fn hand_computed_four_by_three() {
        // P_i = 1, 1/3, 1/3, 1 so P̄ = 2/3; p = (1/2, 1/2) so P̄e = 1/2.
        let k = fleiss_kappa(&[vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]).unwrap();
        assert!((k - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_tables_error() {
        assert!(fleiss_kappa(&[vec![3, 0], vec![3, 0]]).is_err());
        assert!(fleiss_kappa(&[vec![3, 0]]).is_err());
        assert!(fleiss_kappa(&[vec![3, 0], vec![1, 1]]).is_err());
        assert!(fleiss_kappa(&[vec![1, 0], vec![0, 1]]).is_err());
    }
}
