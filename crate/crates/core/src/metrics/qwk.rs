use crate::error::{Error, Result};

/// Paired ratings from two raters on a 1..=k ordinal scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingMatrix {
    categories: u32,
    pairs: Vec<(u32, u32)>,
}

impl RatingMatrix {
    pub fn new(categories: u32, pairs: Vec<(u32, u32)>) -> Result<Self> {
        if categories < 2 {
            return Err(Error::Input(format!("need at least 2 categories, got {categories}")));
        }
        if let Some((i, p)) = pairs
            .iter()
            .enumerate()
            .find(|(_, (a, b))| !(1..=categories).contains(a) || !(1..=categories).contains(b))
        {
            return Err(Error::Input(format!(
                "pair {i} ({}, {}) outside 1..={categories}",
                p.0, p.1
            )));
        }
        Ok(RatingMatrix { categories, pairs })
    }

    pub fn categories(&self) -> u32 {
        self.categories
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }
}

/// Quadratically weighted kappa.
///
/// Computed from integer counts: with `c_ij` the joint counts, `a_i`, `b_j`
/// the marginals and `n` the number of pairs,
/// `kappa = 1 - n * sum((i-j)^2 c_ij) / sum((i-j)^2 a_i b_j)`. The weight
/// normalization `(k-1)^2` and the proportions cancel.
pub fn qwk(m: &RatingMatrix) -> Result<f64> {
    if m.pairs.len() < 2 {
        return Err(Error::UndefinedKappa(format!("need at least 2 pairs, got {}", m.pairs.len())));
    }
    let k = m.categories as usize;
    let mut joint = vec![0u64; k * k];
    let mut rows = vec![0u64; k];
    let mut cols = vec![0u64; k];
    for &(a, b) in &m.pairs {
        let (i, j) = (a as usize - 1, b as usize - 1);
        joint[i * k + j] += 1;
        rows[i] += 1;
        cols[j] += 1;
    }
    let n = m.pairs.len() as u128;
    let mut observed: u128 = 0;
    let mut expected: u128 = 0;
    for i in 0..k {
        for j in 0..k {
            let w = (i.abs_diff(j) as u128).pow(2);
            observed += w * u128::from(joint[i * k + j]);
            expected += w * u128::from(rows[i]) * u128::from(cols[j]);
        }
    }
    if expected == 0 {
        return Err(Error::UndefinedKappa(
            "expected weighted disagreement is zero (degenerate marginals)".into(),
        ));
    }
    Ok(1.0 - (n * observed) as f64 / expected as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Textbook form over proportion matrices with explicit weights.
    fn oracle(k: usize, pairs: &[(u32, u32)]) -> f64 {
        let n = pairs.len() as f64;
        let mut o = vec![vec![0.0; k]; k];
        for &(a, b) in pairs {
            o[a as usize - 1][b as usize - 1] += 1.0 / n;
        }
        let ra: Vec<f64> = (0..k).map(|i| o[i].iter().sum()).collect();
        let rb: Vec<f64> = (0..k).map(|j| (0..k).map(|i| o[i][j]).sum()).collect();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                let w = ((i as f64 - j as f64) / (k as f64 - 1.0)).powi(2);
                num += w * o[i][j];
                den += w * ra[i] * rb[j];
            }
        }
        1.0 - num / den
    }

    #[test]
    fn identical_raters() {
        let m = RatingMatrix::new(4, vec![(1, 1), (2, 2), (4, 4), (3, 3)]).unwrap();
        assert_eq!(qwk(&m).unwrap(), 1.0);
    }

    #[test]
    fn antisymmetric_pair() {
        let m = RatingMatrix::new(2, vec![(1, 2), (2, 1)]).unwrap();
        assert_eq!(qwk(&m).unwrap(), -1.0);
    }

    #[test]
    fn degenerate_is_error() {
        let m = RatingMatrix::new(4, vec![(3, 3), (3, 3), (3, 3)]).unwrap();
        assert!(matches!(qwk(&m), Err(Error::UndefinedKappa(_))));
        let one = RatingMatrix::new(4, vec![(1, 2)]).unwrap();
        assert!(qwk(&one).is_err());
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(RatingMatrix::new(4, vec![(0, 1)]).is_err());
        assert!(RatingMatrix::new(4, vec![(5, 1)]).is_err());
        assert!(RatingMatrix::new(1, vec![]).is_err());
    }

    fn pairs(k: u32) -> impl Strategy<Value = Vec<(u32, u32)>> {
        prop::collection::vec((1..=k, 1..=k), 2..40)
    }

    proptest! {
        #[test]
        fn matches_oracle(p in pairs(4)) {
            let m = RatingMatrix::new(4, p.clone()).unwrap();
            if let Ok(v) = qwk(&m) {
                prop_assert!((v - oracle(4, &p)).abs() < 1e-12);
                prop_assert!(v <= 1.0);
            }
        }

        #[test]
        fn invariant_under_swap_and_order_preserving_relabel(p in pairs(3)) {
            let base = qwk(&RatingMatrix::new(3, p.clone()).unwrap());
            let swapped: Vec<_> = p.iter().map(|&(a, b)| (b, a)).collect();
            let shifted: Vec<_> = p.iter().map(|&(a, b)| (a + 2, b + 2)).collect();
            let reversed: Vec<_> = p.iter().map(|&(a, b)| (4 - a, 4 - b)).collect();
            match base {
                Ok(v) => {
                    prop_assert_eq!(qwk(&RatingMatrix::new(3, swapped).unwrap()).unwrap(), v);
                    prop_assert_eq!(qwk(&RatingMatrix::new(5, shifted).unwrap()).unwrap(), v);
                    prop_assert_eq!(qwk(&RatingMatrix::new(3, reversed).unwrap()).unwrap(), v);
                }
                Err(_) => prop_assert!(qwk(&RatingMatrix::new(3, swapped).unwrap()).is_err()),
            }
        }
    }
}
