use serde::{Deserialize, Serialize};

use super::StatError;
use crate::scalar::Real;

/// Metric scores `x` and human scores `y` for the same items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries<T> {
    pub ids: Vec<String>,
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> PairedSeries<T> {
    pub fn new(ids: Vec<String>, x: Vec<T>, y: Vec<T>) -> Result<Self, StatError> {
        if x.len() != y.len() {
            return Err(StatError::LengthMismatch(x.len(), y.len()));
        }
        if ids.len() != x.len() {
            return Err(StatError::LengthMismatch(ids.len(), x.len()));
        }
        Ok(Self { ids, x, y })
    }

    pub fn pearson(&self) -> Result<T, StatError> {
        pearson(&self.x, &self.y)
    }

    pub fn spearman(&self) -> Result<T, StatError> {
        spearman(&self.x, &self.y)
    }
}

fn check(x: &[impl Real], y: &[impl Real]) -> Result<(), StatError> {
    if x.len() != y.len() {
        return Err(StatError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatError::TooFewPoints { need: 3, got: x.len() });
    }
    if let Some(i) = x.iter().zip(y).position(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(StatError::NonFinite(i));
    }
    Ok(())
}

/// Sample Pearson correlation coefficient, clamped to [-1, 1].
pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<T, StatError> {
    check(x, y)?;
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return Err(StatError::Degenerate);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one()))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn ranks<T: Real>(values: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut out = vec![T::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1
        let avg = T::from_count(i + j + 2) / T::lit(2.0);
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Pearson correlation of average ranks.
pub fn spearman<T: Real>(x: &[T], y: &[T]) -> Result<T, StatError> {
    check(x, y)?;
    pearson(&ranks(x), &ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0));
        assert!(close(pearson(&[1.0, 2.0, 3.0], &[-1.0, -2.0, -3.0]).unwrap(), -1.0));
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5f64).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5f64).abs() < 1e-12);
        assert!(close(spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 8.0, 27.0, 64.0]).unwrap(), 1.0));
        assert!(close(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0));
    }

    #[test]
    fn f32_works() {
        let r: f32 = pearson(&[1.0f32, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert!((r - 0.5).abs() < 1e-6);
    }

    #[test]
    fn average_ranks() {
        assert_eq!(ranks(&[10.0, 20.0, 20.0, 5.0]), [2.0, 3.5, 3.5, 1.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatError::Degenerate)));
        assert!(matches!(spearman(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), Err(StatError::Degenerate)));
        assert!(matches!(pearson(&[1.0, 2.0], &[1.0, 2.0]), Err(StatError::TooFewPoints { .. })));
        assert!(matches!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]), Err(StatError::LengthMismatch(3, 2))));
        assert!(matches!(pearson(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]), Err(StatError::NonFinite(1))));
    }

    fn series() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..20).prop_flat_map(|n| {
            (
                proptest::collection::vec(-100.0f64..100.0, n),
                proptest::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn affine_invariance((x, y) in series(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
            let Ok(r) = pearson(&x, &y) else { return Ok(()) };
            let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((pearson(&xt, &y).unwrap() - r).abs() < 1e-12);
            let s = spearman(&x, &y).unwrap();
            prop_assert!((spearman(&xt, &y).unwrap() - s).abs() < 1e-12);
        }

        #[test]
        fn spearman_is_pearson_of_ranks((x, y) in series()) {
            let Ok(s) = spearman(&x, &y) else { return Ok(()) };
            prop_assert_eq!(s, pearson(&ranks(&x), &ranks(&y)).unwrap());
        }
    }
}
