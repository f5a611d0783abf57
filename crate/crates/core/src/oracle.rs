//! Brute-force grid suprema over unit spheres in dimensions 2 and 3.
//!
//! Used only for cross-validation of the singular-value path: grid values
//! never exceed the true supremum (the grid is a subset of the sphere) and
//! converge as the resolution doubles. Restricted to low dimension; this
//! exists to catch normalization and wiring errors, not to scale.

use crate::frame::FrameFamily;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy)]
pub struct GridSphere {
    pub dim: usize,
    /// Points per angular axis.
    pub resolution: usize,
}

impl GridSphere {
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidSpec("grid sphere supports dim 2 or 3".into()));
        }
        if resolution < 4 {
            return Err(Error::InvalidSpec("resolution too small".into()));
        }
        Ok(GridSphere { dim, resolution })
    }

    pub fn with_default_resolution(dim: usize) -> Result<Self> {
        Self::new(dim, if dim == 2 { 2000 } else { 400 })
    }

    /// Deterministic enumeration of unit Euclidean vectors.
    pub fn points<T: Scalar>(&self) -> Vec<Vec<T>> {
        let res = self.resolution;
        let tau = 2.0 * std::f64::consts::PI;
        match self.dim {
            2 => (0..res)
                .map(|k| {
                    let t = tau * k as f64 / res as f64;
                    vec![
                        T::from_f64(t.cos()).unwrap(),
                        T::from_f64(t.sin()).unwrap(),
                    ]
                })
                .collect(),
            3 => {
                let mut pts = Vec::with_capacity(res * res);
                for a in 0..res {
                    let theta = std::f64::consts::PI * a as f64 / (res - 1) as f64;
                    for b in 0..res {
                        let phi = tau * b as f64 / res as f64;
                        pts.push(vec![
                            T::from_f64(theta.sin() * phi.cos()).unwrap(),
                            T::from_f64(theta.sin() * phi.sin()).unwrap(),
                            T::from_f64(theta.cos()).unwrap(),
                        ]);
                    }
                }
                pts
            }
            _ => unreachable!(),
        }
    }
}

/// max over grid points of numerator/denominator; a lower estimate of the
/// true supremum.
pub fn grid_sup_ratio<T: Scalar>(
    numerator: &dyn Fn(&[T]) -> T,
    denominator: &dyn Fn(&[T]) -> T,
    sphere: &GridSphere,
) -> Result<T> {
    let mut best = T::neg_infinity();
    for p in sphere.points::<T>() {
        let den = denominator(&p);
        if !(den > T::zero()) {
            return Err(Error::ZeroDenominator);
        }
        best = best.max(numerator(&p) / den);
    }
    Ok(best)
}

/// Grid estimate of the grade-s frame bounds: min and max over the sphere of
/// ||G f||_{Theta,s} / ||f||_{X,s}. A_s <= A_est and B_est <= B_s up to the
/// grid resolution gap.
pub fn grid_frame_bounds<T: Scalar>(
    frame: &FrameFamily<T>,
    s: usize,
    sphere: &GridSphere,
) -> Result<(T, T)> {
    if frame.dim() != sphere.dim {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            got: sphere.dim,
        });
    }
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for p in sphere.points::<T>() {
        let den = frame.signal_space().norm(&p, s)?;
        if !(den > T::zero()) {
            return Err(Error::ZeroDenominator);
        }
        let num = frame.coeff_space().norm(&frame.analyze(&p)?, s)?;
        let r = num / den;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Doubles the resolution until the value drifts by less than `drift_tol`,
/// then returns the final estimate.
pub fn refine_until<T: Scalar>(
    mut eval: impl FnMut(usize) -> Result<T>,
    start_resolution: usize,
    drift_tol: T,
    max_doublings: usize,
) -> Result<T> {
    let mut res = start_resolution;
    let mut prev = eval(res)?;
    for _ in 0..max_doublings {
        res *= 2;
        let next = eval(res)?;
        let drift = (next - prev).abs();
        prev = next;
        if drift < drift_tol {
            break;
        }
    }
    Ok(prev)
}
