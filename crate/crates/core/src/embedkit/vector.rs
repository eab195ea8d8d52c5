use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::scalar::Real;

/// An embedding tagged with the provider that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    pub provider_id: String,
    pub values: Vec<f64>,
}

impl Vector {
    pub fn new(provider_id: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            provider_id: provider_id.into(),
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `dot(a, b) / (|a|·|b|)` clamped to [-1, 1]; `None` if either norm is zero
/// or the lengths differ.
pub fn cosine_slices<T: Real>(a: &[T], b: &[T]) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let (mut dot, mut na, mut nb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        dot = dot + x * y;
        na = na + x * x;
        nb = nb + y * y;
    }
    if na <= T::zero() || nb <= T::zero() {
        return None;
    }
    let c = dot / (na.sqrt() * nb.sqrt());
    Some(c.max(-T::one()).min(T::one()))
}

/// Cosine similarity of two vectors from the same provider.
pub fn cosine(a: &Vector, b: &Vector) -> Result<f64, EmbedError> {
    if a.provider_id != b.provider_id {
        return Err(EmbedError::ProviderMismatch(a.provider_id.clone(), b.provider_id.clone()));
    }
    if a.dim() != b.dim() {
        return Err(EmbedError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    cosine_slices(&a.values, &b.values).ok_or(EmbedError::DegenerateVector)
}
