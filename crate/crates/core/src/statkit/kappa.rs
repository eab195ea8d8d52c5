use std::collections::HashMap;
use std::hash::Hash;

use super::StatError;
use crate::scalar::Real;

/// Cohen's kappa `(p_o - p_e) / (1 - p_e)` for two annotators.
pub fn cohens_kappa<T: Real, L: Eq + Hash>(a: &[L], b: &[L]) -> Result<T, StatError> {
    if a.len() != b.len() {
        return Err(StatError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(StatError::Empty);
    }
    let n = T::from_count(a.len());
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count();
    let p_o = T::from_count(agree) / n;

    let mut ma: HashMap<&L, usize> = HashMap::new();
    let mut mb: HashMap<&L, usize> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *ma.entry(x).or_default() += 1;
        *mb.entry(y).or_default() += 1;
    }
    let p_e = ma
        .iter()
        .map(|(label, &ca)| {
            let cb = mb.get(label).copied().unwrap_or(0);
            T::from_count(ca) / n * (T::from_count(cb) / n)
        })
        .sum::<T>();
    if p_e >= T::one() {
        return Err(StatError::DegenerateAgreement);
    }
    Ok((p_o - p_e) / (T::one() - p_e))
}

/// Maps scores in [0, 1] to `bins` equal-width categories (0-based; 1.0
/// falls in the last bin). Values are clamped into the range first.
pub fn uniform_bins<T: Real>(values: &[T], bins: usize) -> Result<Vec<usize>, StatError> {
    if bins == 0 {
        return Err(StatError::BadBins);
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if !v.is_finite() {
                return Err(StatError::NonFinite(i));
            }
            let v = v.max(T::zero()).min(T::one());
            let k = (v * T::from_count(bins)).floor().to_usize().unwrap_or(0);
            Ok(k.min(bins - 1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let k: f64 = cohens_kappa(&[1, 2, 3, 1], &[1, 2, 3, 1]).unwrap();
        assert_eq!(k, 1.0);
        let k: f64 = cohens_kappa(&[1, 1, 0, 0], &[1, 0, 0, 1]).unwrap();
        assert!(k.abs() < 1e-12);
    }

    #[test]
    fn negative_when_agreement_below_chance() {
        // p_o = 0, p_e = 0.5
        let k: f64 = cohens_kappa(&["y", "n", "y", "n"], &["n", "y", "n", "y"]).unwrap();
        assert!((k + 1.0).abs() < 1e-12);
        let k: f64 = cohens_kappa(&[1, 1, 2, 2, 1], &[2, 1, 1, 1, 2]).unwrap();
        assert!(k < 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(cohens_kappa::<f64, _>(&[1, 2], &[1]), Err(StatError::LengthMismatch(2, 1))));
        assert!(matches!(cohens_kappa::<f64, i32>(&[], &[]), Err(StatError::Empty)));
        assert!(matches!(cohens_kappa::<f64, _>(&[1, 1], &[1, 1]), Err(StatError::DegenerateAgreement)));
    }

    #[test]
    fn deciles() {
        assert_eq!(uniform_bins(&[0.0, 0.05, 0.1, 0.55, 0.99, 1.0, 1.2], 10).unwrap(), [0, 0, 1, 5, 9, 9, 9]);
    }
}
