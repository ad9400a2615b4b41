//! Observed convergence orders from refinement studies.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_order<S: Scalar>(h: &[S], err: &[S]) -> Result<S> {
    if h.len() != err.len() || h.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two (h, error) pairs of equal length".into(),
        ));
    }
    if h.iter()
        .chain(err)
        .any(|v| !(*v > S::zero()) || !v.is_finite())
    {
        return Err(Error::InvalidArgument(
            "spacings and errors must be positive and finite".into(),
        ));
    }
    let n = S::from_usize_lossy(h.len());
    let x: Vec<S> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<S> = err.iter().map(|v| v.ln()).collect();
    let mx = x.iter().copied().sum::<S>() / n;
    let my = y.iter().copied().sum::<S>() / n;
    let mut sxy = S::zero();
    let mut sxx = S::zero();
    for (xi, yi) in x.iter().zip(&y) {
        sxy += (*xi - mx) * (*yi - my);
        sxx += (*xi - mx) * (*xi - mx);
    }
    if sxx == S::zero() {
        return Err(Error::InvalidArgument("all spacings are equal".into()));
    }
    Ok(sxy / sxx)
}
