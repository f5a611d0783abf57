//! Perturbation certificates.
//!
//! One certifier per perturbation theorem. Each takes the original frame
//! data and a perturbed candidate, computes or accepts the hypothesis
//! constants, checks the hypothesis inequality, emits the predicted bound
//! interval and compares it against independently measured bounds.
//!
//! Constants strategy: when exactly one constant is free (the others fixed
//! to zero) it is an extremal singular value and the certificate is exact.
//! When several constants are fixed nonzero, the remaining one is estimated
//! by residual ascent over the unit sphere; such estimates are lower bounds
//! of the true supremum and the certificate is labeled `estimated`.

mod certify;

pub use certify::*;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graded::GradedSpace;
use crate::rng::Xoshiro256;
use crate::{Error, Result, Scalar};

/// Relative tolerance for boundary soundness comparisons; several canonical
/// fixtures sit exactly on the predicted boundary.
pub const SOUND_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Cc,
    Kato,
    Bessel,
    MinCondition,
    Weighted,
    Reconstruction,
    Functional,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Cc,
        TheoremId::Kato,
        TheoremId::Bessel,
        TheoremId::MinCondition,
        TheoremId::Weighted,
        TheoremId::Reconstruction,
        TheoremId::Functional,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::Cc => "cc",
            TheoremId::Kato => "kato",
            TheoremId::Bessel => "bessel",
            TheoremId::MinCondition => "min_condition",
            TheoremId::Weighted => "weighted",
            TheoremId::Reconstruction => "reconstruction",
            TheoremId::Functional => "functional",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        TheoremId::ALL.iter().copied().find(|t| t.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsMode {
    Exact,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredBounds<T> {
    pub a: T,
    pub b: T,
}

/// One theorem's hypothesis constants, verdicts and bound intervals,
/// per grade (index 0..=S_max).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate<T> {
    pub theorem: TheoremId,
    pub constants: Vec<BTreeMap<String, T>>,
    pub constants_mode: ConstantsMode,
    pub hypothesis_ok: Vec<bool>,
    pub predicted: Vec<Interval<T>>,
    pub measured: Vec<MeasuredBounds<T>>,
    pub sound: Vec<Option<bool>>,
}

impl<T: Scalar> Certificate<T> {
    pub(crate) fn new(theorem: TheoremId, grades: usize, mode: ConstantsMode) -> Self {
        Certificate {
            theorem,
            constants: vec![BTreeMap::new(); grades],
            constants_mode: mode,
            hypothesis_ok: vec![false; grades],
            predicted: vec![
                Interval {
                    lower: T::zero(),
                    upper: T::zero()
                };
                grades
            ],
            measured: vec![MeasuredBounds { a: T::zero(), b: T::zero() }; grades],
            sound: vec![None; grades],
        }
    }

    pub fn grades(&self) -> usize {
        self.hypothesis_ok.len()
    }

    /// sound(s) is defined only where the hypothesis holds: the measured
    /// bounds must lie inside the predicted interval within 1e-9 relative.
    pub(crate) fn finalize_soundness(&mut self) {
        for s in 0..self.grades() {
            self.sound[s] = if self.hypothesis_ok[s] {
                Some(interval_contains(&self.predicted[s], &self.measured[s]))
            } else {
                None
            };
        }
    }

    pub fn all_hypotheses_hold(&self) -> bool {
        self.hypothesis_ok.iter().all(|&h| h)
    }

    /// True when some grade has a definite negative verdict.
    pub fn has_violation(&self) -> bool {
        self.sound.iter().any(|s| *s == Some(false))
    }

    pub fn is_sound_where_defined(&self) -> bool {
        !self.has_violation()
    }
}

pub(crate) fn rel_tol<T: Scalar>(a: T, b: T) -> T {
    T::from_f64(SOUND_REL_TOL).unwrap() * a.abs().max(b.abs())
}

pub(crate) fn interval_contains<T: Scalar>(pred: &Interval<T>, meas: &MeasuredBounds<T>) -> bool {
    pred.lower <= meas.a + rel_tol(pred.lower, meas.a)
        && meas.b <= pred.upper + rel_tol(pred.upper, meas.b)
}

/// Sequences of positive row weights with finite positive envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightEnvelope<T> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub inf_alpha: T,
    pub sup_alpha: T,
    pub inf_beta: T,
    pub sup_beta: T,
}

impl<T: Scalar> WeightEnvelope<T> {
    pub fn new(alpha: Vec<T>, beta: Vec<T>) -> Result<Self> {
        let envelope = |v: &[T]| -> Result<(T, T)> {
            let inf = v.iter().copied().fold(T::infinity(), T::min);
            let sup = v.iter().copied().fold(T::zero(), T::max);
            if v.is_empty() || !(inf > T::zero()) || !sup.is_finite() {
                return Err(Error::InvalidEnvelope);
            }
            Ok((inf, sup))
        };
        let (inf_alpha, sup_alpha) = envelope(&alpha)?;
        let (inf_beta, sup_beta) = envelope(&beta)?;
        Ok(WeightEnvelope {
            alpha,
            beta,
            inf_alpha,
            sup_alpha,
            inf_beta,
            sup_beta,
        })
    }

    pub fn unit(m: usize) -> Self {
        WeightEnvelope::new(vec![T::one(); m], vec![T::one(); m]).unwrap()
    }
}

/// Random point on the grade-s unit sphere of `space`.
pub fn random_unit<T: Scalar>(rng: &mut Xoshiro256, space: &GradedSpace<T>, s: usize) -> Vec<T> {
    loop {
        let x: Vec<T> = (0..space.dim())
            .map(|_| T::from_f64(rng.next_normal()).unwrap())
            .collect();
        let n = space.norm(&x, s).expect("valid grade");
        if n > T::from_f64(1e-12).unwrap() {
            return x.iter().map(|&xi| xi / n).collect();
        }
    }
}

/// Seeded multi-start finite-difference ascent of a black-box objective over
/// the grade-s unit sphere. Deterministic given the seed; the returned value
/// is attained at a feasible point, hence never exceeds the true supremum.
pub fn residual_ascent<T: Scalar>(
    space: &GradedSpace<T>,
    s: usize,
    objective: &dyn Fn(&[T]) -> T,
    restarts: usize,
    seed: u64,
) -> Result<(T, Vec<T>)> {
    space.weights_at(s)?;
    let restarts = restarts.max(1);
    let dim = space.dim();
    let h = T::from_f64(1e-6).unwrap();
    let stop_rel = T::from_f64(1e-10).unwrap();
    let min_step = T::from_f64(1e-14).unwrap();

    let project = |x: &[T]| -> Option<Vec<T>> {
        let n = space.norm(x, s).ok()?;
        if n <= T::from_f64(1e-300).unwrap() {
            return None;
        }
        Some(x.iter().map(|&xi| xi / n).collect())
    };

    let mut best_val = T::neg_infinity();
    let mut best_x = vec![T::zero(); dim];

    for r in 0..restarts {
        let mut rng = Xoshiro256::new(Xoshiro256::substream_seed(seed, r as u64));
        let mut x = random_unit(&mut rng, space, s);
        let mut val = objective(&x);
        let mut step = T::from_f64(0.1).unwrap();

        for _ in 0..500 {
            // finite-difference gradient in ambient coordinates, re-projected
            let mut grad = vec![T::zero(); dim];
            let mut gnorm2 = T::zero();
            for i in 0..dim {
                let mut plus = x.clone();
                plus[i] = plus[i] + h;
                let mut minus = x.clone();
                minus[i] = minus[i] - h;
                let (fp, fm) = match (project(&plus), project(&minus)) {
                    (Some(p), Some(m)) => (objective(&p), objective(&m)),
                    _ => (val, val),
                };
                grad[i] = (fp - fm) / (h + h);
                gnorm2 = gnorm2 + grad[i] * grad[i];
            }
            let gnorm = gnorm2.sqrt();
            if gnorm == T::zero() {
                break;
            }
            let cand: Vec<T> = x
                .iter()
                .zip(&grad)
                .map(|(&xi, &gi)| xi + step * gi / gnorm)
                .collect();
            let cand = match project(&cand) {
                Some(c) => c,
                None => break,
            };
            let cand_val = objective(&cand);
            if cand_val > val {
                let improvement = (cand_val - val) / val.abs().max(T::one());
                x = cand;
                val = cand_val;
                step = step * T::from_f64(1.5).unwrap();
                if improvement < stop_rel {
                    break;
                }
            } else {
                step = step * T::from_f64(0.5).unwrap();
                if step < min_step {
                    break;
                }
            }
        }

        if val > best_val {
            best_val = val;
            best_x = x;
        }
    }

    Ok((best_val, best_x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    type S = GradedSpace<f64>;

    #[test]
    fn ascent_finds_operator_norm() {
        let sp = S::unit(2, 0);
        let m = Matrix::diag(&[1.0, 2.0]);
        let obj = move |f: &[f64]| {
            let y = m.mul_vec(f).unwrap();
            (y[0] * y[0] + y[1] * y[1]).sqrt()
        };
        let (val, _) = residual_ascent(&sp, 0, &obj, 16, 1234).unwrap();
        assert!((val - 2.0).abs() < 1e-6, "{val}");
        assert!(val <= 2.0 + 1e-12);
    }

    #[test]
    fn ascent_constant_objective() {
        let sp = S::unit(3, 0);
        let (val, _) = residual_ascent(&sp, 0, &|_: &[f64]| 7.5, 2, 9).unwrap();
        assert_eq!(val, 7.5);
    }

    #[test]
    fn ascent_min_condition_ratio() {
        // G = I, H = diag(1, 0.8): sup ||(G-H)f|| / min(||Gf||, ||Hf||) = 0.25 at e2
        let sp = S::unit(2, 0);
        let obj = |f: &[f64]| {
            let num = 0.2 * f[1].abs();
            let gn = (f[0] * f[0] + f[1] * f[1]).sqrt();
            let hn = (f[0] * f[0] + 0.64 * f[1] * f[1]).sqrt();
            let den = gn.min(hn);
            if den > 1e-12 {
                num / den
            } else {
                -1.0
            }
        };
        let (val, x) = residual_ascent(&sp, 0, &obj, 16, 77).unwrap();
        assert!((val - 0.25).abs() < 1e-6, "{val}");
        assert!(x[1].abs() > 0.99);
    }

    #[test]
    fn ascent_is_deterministic() {
        let sp = S::unit(3, 0);
        let obj = |f: &[f64]| f[0] + 0.5 * f[1] * f[1];
        let a = residual_ascent(&sp, 0, &obj, 8, 5).unwrap();
        let b = residual_ascent(&sp, 0, &obj, 8, 5).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn envelope_validation() {
        assert!(WeightEnvelope::<f64>::new(vec![1.0, 2.0], vec![0.5]).is_ok());
        assert!(matches!(
            WeightEnvelope::<f64>::new(vec![1.0, 0.0], vec![1.0]),
            Err(Error::InvalidEnvelope)
        ));
        assert!(WeightEnvelope::<f64>::new(vec![], vec![1.0]).is_err());
    }
}
