//! Graded spaces: one finite-dimensional space with a monotone ladder of
//! diagonal-weighted Euclidean norms indexed by grade s.
//!
//! The grade-s norm is ||f||_s = sqrt(sum_i (w_s(i) f_i)^2) and its dual is
//! ||g||_s* = sqrt(sum_i (g_i / w_s(i))^2). Weights never fall below
//! `WEIGHT_FLOOR`, which guards the divisions in dual norms and normalized
//! matrices.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Error, Result, Scalar};

pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedSpace<T> {
    dim: usize,
    /// weights[s][i] > 0; outer index is the grade.
    weights: Vec<Vec<T>>,
}

impl<T: Scalar> GradedSpace<T> {
    pub fn new(weights: Vec<Vec<T>>) -> Result<Self> {
        if weights.is_empty() || weights[0].is_empty() {
            return Err(Error::InvalidSpec("weight ladder must be nonempty".into()));
        }
        let dim = weights[0].len();
        let floor = T::from_f64(WEIGHT_FLOOR).unwrap();
        for (s, ws) in weights.iter().enumerate() {
            if ws.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: ws.len(),
                });
            }
            for (i, &w) in ws.iter().enumerate() {
                if !(w >= floor) {
                    return Err(Error::NonPositiveWeight { grade: s, index: i });
                }
            }
        }
        Ok(GradedSpace { dim, weights })
    }

    /// Unit weights at every grade.
    pub fn unit(dim: usize, s_max: usize) -> Self {
        GradedSpace {
            dim,
            weights: vec![vec![T::one(); dim]; s_max + 1],
        }
    }

    /// Polynomial ladder w_s(i) = i^(s*step) with 1-based i; grading holds by
    /// construction since the base is >= 1.
    pub fn polynomial(dim: usize, s_max: usize, step: u32) -> Self {
        let weights = (0..=s_max)
            .map(|s| {
                (1..=dim)
                    .map(|i| {
                        T::from_f64((i as f64).powi((s as u32 * step) as i32))
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        GradedSpace { dim, weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn grades(&self) -> impl Iterator<Item = usize> {
        0..self.weights.len()
    }

    pub fn weights_at(&self, s: usize) -> Result<&[T]> {
        self.weights
            .get(s)
            .map(Vec::as_slice)
            .ok_or(Error::InvalidGrade {
                grade: s,
                max: self.s_max(),
            })
    }

    /// Diagonal that turns the grade-s (primal or dual) norm into the
    /// Euclidean norm.
    pub fn diag(&self, s: usize, dual: bool) -> Result<Vec<T>> {
        let w = self.weights_at(s)?;
        Ok(if dual {
            w.iter().map(|&x| T::one() / x).collect()
        } else {
            w.to_vec()
        })
    }

    pub fn norm(&self, f: &[T], s: usize) -> Result<T> {
        let w = self.weights_at(s)?;
        if f.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: f.len(),
            });
        }
        Ok(w.iter()
            .zip(f)
            .map(|(&w, &x)| (w * x) * (w * x))
            .sum::<T>()
            .sqrt())
    }

    pub fn dual_norm(&self, g: &[T], s: usize) -> Result<T> {
        let w = self.weights_at(s)?;
        if g.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.len(),
            });
        }
        Ok(w.iter()
            .zip(g)
            .map(|(&w, &x)| (x / w) * (x / w))
            .sum::<T>()
            .sqrt())
    }

    /// Entrywise monotonicity of the ladder; reports the first violation.
    pub fn validate_grading(&self) -> Result<()> {
        for s in 1..self.weights.len() {
            for i in 0..self.dim {
                if self.weights[s][i] < self.weights[s - 1][i] {
                    return Err(Error::GradingViolation { grade: s, index: i });
                }
            }
        }
        Ok(())
    }

    pub fn ladder(&self) -> &[Vec<T>] {
        &self.weights
    }
}

/// Per-grade operator norms K_s of a fixed matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedOperatorNorms<T> {
    pub values: Vec<T>,
}

/// `M` conjugated into Euclidean coordinates: D_to * M * D_from^{-1}, where
/// each D is the weight diagonal (inverse weight when the dual flag is set)
/// at the given grade. Its singular values are the extremal norm ratios.
pub fn normalized_matrix<T: Scalar>(
    m: &Matrix<T>,
    from: &GradedSpace<T>,
    s_from: usize,
    dual_from: bool,
    to: &GradedSpace<T>,
    s_to: usize,
    dual_to: bool,
) -> Result<Matrix<T>> {
    if m.cols() != from.dim() {
        return Err(Error::DimensionMismatch {
            expected: from.dim(),
            got: m.cols(),
        });
    }
    if m.rows() != to.dim() {
        return Err(Error::DimensionMismatch {
            expected: to.dim(),
            got: m.rows(),
        });
    }
    let d_to = to.diag(s_to, dual_to)?;
    let d_from = from.diag(s_from, dual_from)?;
    let d_from_inv: Vec<T> = d_from.iter().map(|&x| T::one() / x).collect();
    m.scale_rows(&d_to)?.scale_cols(&d_from_inv)
}

/// sup over f != 0 of ||M f||_{to, s_to} / ||f||_{from, s_from}, primal or
/// dual norms selected per side.
pub fn op_norm<T: Scalar>(
    m: &Matrix<T>,
    from: &GradedSpace<T>,
    s_from: usize,
    dual_from: bool,
    to: &GradedSpace<T>,
    s_to: usize,
    dual_to: bool,
) -> Result<T> {
    Ok(normalized_matrix(m, from, s_from, dual_from, to, s_to, dual_to)?.op_norm_euclid())
}

/// Operator norms of `M` between primal grade-s norms, for every grade.
pub fn graded_op_norms<T: Scalar>(
    m: &Matrix<T>,
    from: &GradedSpace<T>,
    to: &GradedSpace<T>,
) -> Result<GradedOperatorNorms<T>> {
    if from.s_max() != to.s_max() {
        return Err(Error::DimensionMismatch {
            expected: from.s_max(),
            got: to.s_max(),
        });
    }
    let values = from
        .grades()
        .map(|s| op_norm(m, from, s, false, to, s, false))
        .collect::<Result<_>>()?;
    Ok(GradedOperatorNorms { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = GradedSpace<f64>;
    type M = Matrix<f64>;

    #[test]
    fn euclidean_norm_with_unit_weights() {
        let sp = S::unit(2, 0);
        assert_eq!(sp.norm(&[3.0, 4.0], 0).unwrap(), 5.0);
        assert_eq!(sp.norm(&[0.0, 0.0], 0).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norm() {
        let sp = S::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let got = sp.norm(&[1.0, 1.0], 1).unwrap();
        assert!((got - 5.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dual_norm_values() {
        let sp = S::unit(2, 0);
        assert_eq!(sp.dual_norm(&[3.0, 4.0], 0).unwrap(), 5.0);
        let sp = S::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((sp.dual_norm(&[0.0, 2.0], 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(sp.dual_norm(&[0.0, 0.0], 1).unwrap(), 0.0);
    }

    #[test]
    fn invalid_grade_and_dim() {
        let sp = S::unit(2, 1);
        assert!(matches!(
            sp.norm(&[1.0, 1.0], 5),
            Err(Error::InvalidGrade { grade: 5, .. })
        ));
        assert!(matches!(
            sp.norm(&[1.0], 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn grading_validation() {
        let ok = S::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        ok.validate_grading().unwrap();

        let bad = S::new(vec![vec![1.0, 3.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            bad.validate_grading(),
            Err(Error::GradingViolation { grade: 1, index: 1 })
        ));

        let single = S::unit(3, 0);
        single.validate_grading().unwrap();
    }

    #[test]
    fn weight_floor_enforced() {
        assert!(matches!(
            S::new(vec![vec![1.0, 0.0]]),
            Err(Error::NonPositiveWeight { grade: 0, index: 1 })
        ));
        assert!(S::new(vec![vec![1.0, -2.0]]).is_err());
    }

    #[test]
    fn op_norm_identity_and_diagonal() {
        let sp = S::unit(2, 0);
        let id = M::identity(2);
        assert!((op_norm(&id, &sp, 0, false, &sp, 0, false).unwrap() - 1.0).abs() < 1e-14);

        let d = M::diag(&[1.0, 2.0]);
        assert!((op_norm(&d, &sp, 0, false, &sp, 0, false).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_weight_normalization() {
        // diag(1,2) from weights (1,2) to unit weights normalizes to identity.
        let from = S::new(vec![vec![1.0, 2.0]]).unwrap();
        let to = S::unit(2, 0);
        let d = M::diag(&[1.0, 2.0]);
        assert!((op_norm(&d, &from, 0, false, &to, 0, false).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_ladder_grading() {
        let sp = S::polynomial(4, 3, 1);
        sp.validate_grading().unwrap();
        assert_eq!(sp.weights_at(0).unwrap(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(sp.weights_at(2).unwrap(), &[1.0, 4.0, 9.0, 16.0]);
    }

    #[test]
    fn duality_pairing_bound() {
        let sp = S::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let g = [1.0, -0.5];
        for s in 0..=1 {
            // maximizer f_i ~ g_i / w_i^2 attains |g.f| = ||g||* ||f||
            let w = sp.weights_at(s).unwrap();
            let f: Vec<f64> = g.iter().zip(w).map(|(&gi, &wi)| gi / (wi * wi)).collect();
            let pairing: f64 = g.iter().zip(&f).map(|(&a, &b)| a * b).sum();
            let bound = sp.dual_norm(&g, s).unwrap() * sp.norm(&f, s).unwrap();
            assert!((pairing.abs() - bound).abs() < 1e-12 * bound);
        }
    }
}
