//! List-mode maximum-likelihood expectation maximization.
//!
//! One iteration:
//!
//! ```text
//! λ_j ← λ_j / s_j · Σ_i t_ij / Σ_k t_ik λ_k
//! ```
//!
//! where the inner sum runs over map cells. It is evaluated as
//! `Σ_i (t_ij λ_j) / (Σ_k t_ik λ_k) / s_j`, so each row hands out
//! responsibilities that sum to one; for a single cell they are exactly one. Cells with `s_j = 0` were never
//! observable; they are frozen at zero and drop out of every denominator.

use crate::error::{Error, Result};
use crate::recon::SystemRow;
use crate::scalar::Real;

/// Per-cell intensity estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaField<T> {
    pub values: Vec<T>,
    /// Number of MLEM iterations applied since initialization.
    pub iteration: usize,
}

impl<T: Real> LambdaField<T> {
    /// `λ_j = 1` where `s_j > 0`, zero elsewhere.
    pub fn uniform(sensitivity: &[T]) -> Self {
        let values = sensitivity.iter().map(|&s| if s > T::zero() { T::one() } else { T::zero() }).collect();
        Self { values, iteration: 0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MlemDiagnostics {
    /// Rows skipped because their forward projection was zero, per iteration.
    pub skipped_rows: Vec<usize>,
}

/// Applies one iteration in place; returns the number of skipped rows.
pub fn mlem_step<T: Real>(lambda: &mut LambdaField<T>, rows: &[SystemRow<T>], sensitivity: &[T]) -> usize {
    let mut back = vec![T::zero(); lambda.values.len()];
    let mut skipped = 0;
    for row in rows {
        let denom = row.forward(&lambda.values);
        if !(denom > T::zero()) {
            skipped += 1;
            continue;
        }
        for (j, t) in row.cells.iter().zip(&row.weights) {
            let j = *j as usize;
            back[j] += *t * lambda.values[j] / denom;
        }
    }
    for ((l, b), s) in lambda.values.iter_mut().zip(back).zip(sensitivity) {
        *l = if *s > T::zero() { b / *s } else { T::zero() };
    }
    lambda.iteration += 1;
    skipped
}

/// Runs `n_iter` iterations starting from `init`.
pub fn mlem<T: Real>(
    init: &LambdaField<T>,
    rows: &[SystemRow<T>],
    sensitivity: &[T],
    n_iter: usize,
) -> Result<(LambdaField<T>, MlemDiagnostics)> {
    if n_iter == 0 {
        return Err(Error::Invalid("MLEM needs at least one iteration".into()));
    }
    if rows.is_empty() {
        return Err(Error::Invalid("MLEM needs at least one measurement".into()));
    }
    if init.values.len() != sensitivity.len() {
        return Err(Error::Invalid("λ and sensitivity sizes differ".into()));
    }
    if init.values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Err(Error::Invalid("λ must be finite and non-negative".into()));
    }
    let n = init.values.len();
    if let Some(j) = rows.iter().flat_map(|r| r.cells.iter()).find(|&&j| j as usize >= n) {
        return Err(Error::Index { index: *j as usize, len: n });
    }
    let mut lambda = init.clone();
    for (l, s) in lambda.values.iter_mut().zip(sensitivity) {
        if !(*s > T::zero()) {
            *l = T::zero();
        }
    }
    let mut diag = MlemDiagnostics::default();
    for _ in 0..n_iter {
        diag.skipped_rows.push(mlem_step(&mut lambda, rows, sensitivity));
    }
    Ok((lambda, diag))
}

/// List-mode Poisson log-likelihood `Σ_i log(Σ_k t_ik λ_k) − Σ_j s_j λ_j`.
pub fn log_likelihood<T: Real>(lambda: &[T], rows: &[SystemRow<T>], sensitivity: &[T]) -> T {
    let data: T = rows.iter().map(|r| r.forward(lambda).ln()).sum();
    let expected: T = lambda.iter().zip(sensitivity).map(|(l, s)| *l * *s).sum();
    data - expected
}
