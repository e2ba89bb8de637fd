use crate::geometry::Position3;
use crate::scalar::Real;

/// Default localization tolerance, meters.
pub const DEFAULT_TOLERANCE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationMetrics<T> {
    /// Distance from each true source to its nearest estimate; `+∞` when
    /// there are no estimates.
    pub per_source: Vec<T>,
    /// `None` when undefined (no estimates).
    pub rmse: Option<T>,
    pub n_within: usize,
}

pub fn localization_metrics<T: Real>(
    estimates: &[Position3<T>],
    truth: &[Position3<T>],
    tolerance: T,
) -> LocalizationMetrics<T> {
    let per_source: Vec<T> = truth
        .iter()
        .map(|src| estimates.iter().map(|e| e.distance(*src)).fold(T::infinity(), T::min))
        .collect();
    let rmse = if estimates.is_empty() || truth.is_empty() {
        None
    } else {
        let mse = per_source.iter().map(|e| *e * *e).sum::<T>() / T::lit(per_source.len() as f64);
        Some(mse.sqrt())
    };
    let n_within = per_source.iter().filter(|e| **e < tolerance).count();
    LocalizationMetrics { per_source, rmse, n_within }
}
