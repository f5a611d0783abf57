//! Frame families over graded spaces: analysis, optimal per-grade bounds,
//! canonical reconstruction, dual families, the coefficient-space projection,
//! synthesis-norm duality and the norming-functional construction.

use serde::{Deserialize, Serialize};

use crate::graded::{graded_op_norms, normalized_matrix, op_norm, GradedOperatorNorms, GradedSpace};
use crate::linalg::Matrix;
use crate::{Error, Result, Scalar};

/// Relative rank threshold sigma_min > RANK_RTOL * sigma_max.
pub const RANK_RTOL: f64 = 1e-12;
/// Frobenius tolerance for left-inverse / expansion / idempotence residuals.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Analysis matrix G (row i is the functional g_i) together with its graded
/// signal space X (dimension n) and coefficient space Theta (dimension m).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameFamily<T> {
    #[serde(rename = "G")]
    g: Matrix<T>,
    #[serde(rename = "X")]
    x: GradedSpace<T>,
    #[serde(rename = "Theta")]
    theta: GradedSpace<T>,
}

/// Optimal per-grade constants in the linear convention
/// A_s ||f||_s <= ||G f||_s <= B_s ||f||_s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Scalar> FrameBounds<T> {
    pub fn min_lower(&self) -> T {
        self.a.iter().copied().fold(T::infinity(), T::min)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreFrameVerdict<T> {
    pub is_pre_frame: bool,
    /// Grades where |A_s - B_s| <= tol * B_s.
    pub tight: Vec<bool>,
    pub bounds: FrameBounds<T>,
}

/// Left inverse of the analysis matrix, with per-grade norms Theta_s -> X_s.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionOp<T> {
    #[serde(rename = "S")]
    pub s: Matrix<T>,
    pub norms: GradedOperatorNorms<T>,
}

/// Columns are the expansion vectors f_i with sum_i g_i(f) f_i = f.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualFamily<T> {
    #[serde(rename = "F")]
    pub f: Matrix<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientProjection<T> {
    #[serde(rename = "U")]
    pub u: Matrix<T>,
    pub norms: GradedOperatorNorms<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisReport<T> {
    pub upper_bound: Vec<T>,
    pub synthesis_norm: Vec<T>,
    pub max_rel_err: T,
}

impl<T: Scalar> FrameFamily<T> {
    pub fn new(g: Matrix<T>, x: GradedSpace<T>, theta: GradedSpace<T>) -> Result<Self> {
        if g.cols() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: g.cols(),
            });
        }
        if g.rows() != theta.dim() {
            return Err(Error::DimensionMismatch {
                expected: theta.dim(),
                got: g.rows(),
            });
        }
        if x.s_max() != theta.s_max() {
            return Err(Error::DimensionMismatch {
                expected: x.s_max(),
                got: theta.s_max(),
            });
        }
        Ok(FrameFamily { g, x, theta })
    }

    pub fn analysis(&self) -> &Matrix<T> {
        &self.g
    }

    pub fn signal_space(&self) -> &GradedSpace<T> {
        &self.x
    }

    pub fn coeff_space(&self) -> &GradedSpace<T> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn num_functionals(&self) -> usize {
        self.theta.dim()
    }

    pub fn s_max(&self) -> usize {
        self.x.s_max()
    }

    /// Coefficients G f.
    pub fn analyze(&self, f: &[T]) -> Result<Vec<T>> {
        self.g.mul_vec(f)
    }

    /// Grade-normalized analysis matrix Dv_s * G * Dw_s^{-1}.
    pub fn normalized(&self, s: usize) -> Result<Matrix<T>> {
        normalized_matrix(&self.g, &self.x, s, false, &self.theta, s, false)
    }

    /// Optimal per-grade bounds: extreme singular values of the normalized
    /// analysis matrix. A_s = 0 signals failure of the lower inequality.
    pub fn frame_bounds(&self) -> Result<FrameBounds<T>> {
        let n = self.dim();
        let m = self.num_functionals();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for s in self.x.grades() {
            let sv = self.normalized(s)?.singular_values();
            b.push(sv.first().copied().unwrap_or_else(T::zero));
            a.push(if m < n {
                T::zero()
            } else {
                sv.last().copied().unwrap_or_else(T::zero)
            });
        }
        Ok(FrameBounds { a, b })
    }

    pub fn is_pre_f_frame(&self, tol: T) -> Result<PreFrameVerdict<T>> {
        let bounds = self.frame_bounds()?;
        let is_pre_frame = bounds.a.iter().all(|&a| a > tol);
        let tight = bounds
            .a
            .iter()
            .zip(&bounds.b)
            .map(|(&a, &b)| (a - b).abs() <= tol * b)
            .collect();
        Ok(PreFrameVerdict {
            is_pre_frame,
            tight,
            bounds,
        })
    }

    /// Moore–Penrose left inverse S = (G^T G)^{-1} G^T with per-grade norms
    /// Theta_s -> X_s. Requires full column rank at grade-0 normalization.
    pub fn canonical_reconstruction(&self) -> Result<ReconstructionOp<T>> {
        let rtol = T::from_f64(RANK_RTOL).unwrap();
        let sv = self.normalized(0)?.singular_values();
        let smax = sv.first().copied().unwrap_or_else(T::zero);
        let smin = if self.num_functionals() < self.dim() {
            T::zero()
        } else {
            sv.last().copied().unwrap_or_else(T::zero)
        };
        if smax == T::zero() || smin <= rtol * smax {
            return Err(Error::FrameDeficient {
                ratio: (smin / smax.max(T::min_positive_value()))
                    .to_f64()
                    .unwrap_or(0.0),
            });
        }
        let s = self.g.pinv(rtol);
        let residual = s
            .matmul(&self.g)?
            .sub(&Matrix::identity(self.dim()))?
            .frobenius_norm();
        if residual > T::from_f64(RESIDUAL_TOL).unwrap() {
            return Err(Error::NotLeftInverse {
                residual: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        let norms = graded_op_norms(&s, &self.theta, &self.x)?;
        Ok(ReconstructionOp { s, norms })
    }

    /// Expansion vectors f_i = S(e_i), i.e. the columns of the left inverse.
    /// Verifies both expansions: F G = I on signals and G F acting as the
    /// identity on range(G).
    pub fn dual_family(&self, recon: &ReconstructionOp<T>) -> Result<DualFamily<T>> {
        let tol = T::from_f64(RESIDUAL_TOL).unwrap();
        let f = recon.s.clone();
        let signal_res = f
            .matmul(&self.g)?
            .sub(&Matrix::identity(self.dim()))?
            .frobenius_norm();
        // functional side on range(G^T): (G F) G = G
        let functional_res = self
            .g
            .matmul(&f)?
            .matmul(&self.g)?
            .sub(&self.g)?
            .frobenius_norm();
        let residual = signal_res.max(functional_res);
        if residual > tol {
            return Err(Error::ExpansionFailure {
                residual: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(DualFamily { f })
    }

    /// U = G S, the continuous projection of coefficient space onto
    /// range(G), with per-grade norms as the continuity certificate.
    pub fn coefficient_projection(
        &self,
        recon: &ReconstructionOp<T>,
    ) -> Result<CoefficientProjection<T>> {
        let tol = T::from_f64(RESIDUAL_TOL).unwrap();
        let u = self.g.matmul(&recon.s)?;
        let idem = u.matmul(&u)?.sub(&u)?.frobenius_norm();
        let range = u.matmul(&self.g)?.sub(&self.g)?.frobenius_norm();
        if idem.max(range) > tol {
            return Err(Error::ExpansionFailure {
                residual: idem.max(range).to_f64().unwrap_or(f64::NAN),
            });
        }
        let norms = graded_op_norms(&u, &self.theta, &self.theta)?;
        Ok(CoefficientProjection { u, norms })
    }

    /// Synthesis operator G^T: Theta_s* -> X_s*; its norm equals B_s grade
    /// by grade (transposition preserves singular values).
    pub fn synthesis_norm_check(&self) -> Result<SynthesisReport<T>> {
        let bounds = self.frame_bounds()?;
        let gt = self.g.transpose();
        let mut synthesis_norm = Vec::new();
        let mut max_rel = T::zero();
        for s in self.x.grades() {
            let t = op_norm(&gt, &self.theta, s, true, &self.x, s, true)?;
            let b = bounds.b[s];
            let scale = b.max(T::min_positive_value());
            max_rel = max_rel.max((t - b).abs() / scale);
            synthesis_norm.push(t);
        }
        Ok(SynthesisReport {
            upper_bound: bounds.b,
            synthesis_norm,
            max_rel_err: max_rel,
        })
    }

    /// Per-grade operator norms of `m`: X_s -> Theta_s (F-boundedness report;
    /// in the finite model every operator is F-bounded, the constants are
    /// the content).
    pub fn f_bounded_check(
        m: &Matrix<T>,
        from: &GradedSpace<T>,
        to: &GradedSpace<T>,
    ) -> Result<GradedOperatorNorms<T>> {
        graded_op_norms(m, from, to)
    }
}

/// Grade-s norming functionals of a sample set: g_j = Dw_s^2 x_j / ||x_j||_s,
/// so that g_j(x_j) = ||x_j||_s and ||g_j||_s* = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormingConstruction<T> {
    pub frame: FrameFamily<T>,
    pub grade: usize,
    /// sup_j |g_j(x_k)| / ||x_k||_s for each sample; 1 by construction.
    pub sample_ratios: Vec<T>,
}

impl<T: Scalar> NormingConstruction<T> {
    /// Coverage ratio sup_j |g_j(f)| / ||f||_s; always in (0, 1] for f not
    /// orthogonal to every sample.
    pub fn coverage(&self, f: &[T]) -> Result<T> {
        let space = self.frame.signal_space();
        let nf = space.norm(f, self.grade)?;
        if nf == T::zero() {
            return Err(Error::ZeroSample(0));
        }
        let coeffs = self.frame.analyze(f)?;
        let sup = coeffs
            .iter()
            .map(|c| c.abs())
            .fold(T::zero(), T::max);
        Ok(sup / nf)
    }
}

pub fn norming_frame<T: Scalar>(
    space: &GradedSpace<T>,
    samples: &[Vec<T>],
    s: usize,
) -> Result<NormingConstruction<T>> {
    let w = space.weights_at(s)?.to_vec();
    let mut rows = Vec::with_capacity(samples.len());
    for (j, x) in samples.iter().enumerate() {
        let nx = space.norm(x, s)?;
        if nx == T::zero() {
            return Err(Error::ZeroSample(j));
        }
        let g: Vec<T> = w.iter().zip(x).map(|(&wi, &xi)| wi * wi * xi / nx).collect();
        debug_assert!(
            (space.dual_norm(&g, s).unwrap() - T::one()).abs() < T::from_f64(1e-9).unwrap()
        );
        rows.push(g);
    }
    let g = Matrix::from_rows(&rows)?;
    let theta = GradedSpace::unit(samples.len(), space.s_max());
    let frame = FrameFamily::new(g, space.clone(), theta)?;
    let sample_ratios = samples
        .iter()
        .map(|x| {
            let nx = space.norm(x, s)?;
            let sup = frame
                .analyze(x)?
                .iter()
                .map(|c| c.abs())
                .fold(T::zero(), T::max);
            Ok(sup / nx)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(NormingConstruction {
        frame,
        grade: s,
        sample_ratios,
    })
}
