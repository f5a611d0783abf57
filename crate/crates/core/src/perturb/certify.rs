//! The seven certifiers.

use super::*;
use crate::frame::{FrameBounds, FrameFamily, ReconstructionOp, RANK_RTOL, RESIDUAL_TOL};
use crate::graded::{normalized_matrix, op_norm, GradedSpace};
use crate::linalg::Matrix;

fn f<T: Scalar>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

/// Bounds of a candidate analysis matrix over the frame's own spaces.
fn measured_bounds<T: Scalar>(
    frame: &FrameFamily<T>,
    h: &Matrix<T>,
) -> Result<FrameBounds<T>> {
    FrameFamily::new(
        h.clone(),
        frame.signal_space().clone(),
        frame.coeff_space().clone(),
    )?
    .frame_bounds()
}

fn check_left_inverse<T: Scalar>(s: &Matrix<T>, g: &Matrix<T>) -> Result<()> {
    let res = s
        .matmul(g)?
        .sub(&Matrix::identity(g.cols()))?
        .frobenius_norm();
    if res > f(RESIDUAL_TOL) {
        return Err(Error::NotLeftInverse {
            residual: res.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Closeness perturbation in the pure Hilbert setting (one grade,
/// unit weights, squared bound convention). Columns of the synthesis
/// matrices are the frame vectors.
pub fn cc_perturb_certify<T: Scalar>(
    f_synth: &Matrix<T>,
    g_synth: &Matrix<T>,
    lambda1: T,
    lambda2: T,
    seed: u64,
) -> Result<Certificate<T>> {
    if f_synth.rows() != g_synth.rows() || f_synth.cols() != g_synth.cols() {
        return Err(Error::DimensionMismatch {
            expected: f_synth.cols(),
            got: g_synth.cols(),
        });
    }
    if lambda1 < T::zero() || lambda2 < T::zero() || lambda2 >= T::one() {
        return Err(Error::InvalidSpec(
            "cc requires lambda1 >= 0, 0 <= lambda2 < 1".into(),
        ));
    }
    let n = f_synth.rows();
    let m = f_synth.cols();
    let sv = f_synth.singular_values();
    let smax = sv.first().copied().unwrap_or_else(T::zero);
    let smin = if m < n {
        T::zero()
    } else {
        sv.last().copied().unwrap_or_else(T::zero)
    };
    if smax == T::zero() || smin <= f::<T>(RANK_RTOL) * smax {
        return Err(Error::RankDeficient);
    }
    let a_hilb = smin * smin;
    let b_hilb = smax * smax;

    let diff = f_synth.sub(g_synth)?;
    let exact = lambda1 == T::zero() && lambda2 == T::zero();
    let mu = if exact {
        diff.op_norm_euclid()
    } else {
        let coeff_space = GradedSpace::unit(m, 0);
        let euclid = |v: &[T]| v.iter().map(|&x| x * x).sum::<T>().sqrt();
        let obj = |c: &[T]| {
            euclid(&diff.mul_vec(c).unwrap())
                - lambda1 * euclid(&f_synth.mul_vec(c).unwrap())
                - lambda2 * euclid(&g_synth.mul_vec(c).unwrap())
        };
        residual_ascent(&coeff_space, 0, &obj, 16, seed)?.0.max(T::zero())
    };

    let mut cert = Certificate::new(
        TheoremId::Cc,
        1,
        if exact {
            ConstantsMode::Exact
        } else {
            ConstantsMode::Estimated
        },
    );
    let sqrt_a = a_hilb.sqrt();
    let sqrt_b = b_hilb.sqrt();
    cert.hypothesis_ok[0] = lambda1 + mu / sqrt_a < T::one();

    let lo_factor = T::one() - (lambda1 + lambda2 + mu / sqrt_a) / (T::one() + lambda2);
    let hi_factor = T::one() + (lambda1 + lambda2 + mu / sqrt_b) / (T::one() - lambda2);
    cert.predicted[0] = Interval {
        lower: a_hilb * lo_factor * lo_factor,
        upper: b_hilb * hi_factor * hi_factor,
    };

    let gv = g_synth.singular_values();
    let g_max = gv.first().copied().unwrap_or_else(T::zero);
    let g_min = if m < n {
        T::zero()
    } else {
        gv.last().copied().unwrap_or_else(T::zero)
    };
    cert.measured[0] = MeasuredBounds {
        a: g_min * g_min,
        b: g_max * g_max,
    };

    let c = &mut cert.constants[0];
    c.insert("lambda1".into(), lambda1);
    c.insert("lambda2".into(), lambda2);
    c.insert("mu".into(), mu);
    c.insert("A_hilbert".into(), a_hilb);
    c.insert("B_hilbert".into(), b_hilb);
    c.insert("measured_A_linear".into(), g_min);
    c.insert("measured_B_linear".into(), g_max);
    cert.finalize_soundness();
    Ok(cert)
}

/// Extra data from the invertibility-sandwich certificate.
#[derive(Debug, Clone)]
pub struct KatoDetail<T> {
    /// Per grade: extremal ratios of U^{-1} (None when U is singular or the
    /// hypothesis failed).
    pub inverse_bounds: Vec<Option<MeasuredBounds<T>>>,
    /// Probes on which every applicable sandwich inequality held.
    pub probes_ok: Vec<bool>,
}

pub fn kato_certify<T: Scalar>(
    u: &Matrix<T>,
    space: &GradedSpace<T>,
    probes: usize,
    seed: u64,
) -> Result<(Certificate<T>, KatoDetail<T>)> {
    if u.rows() != u.cols() || u.rows() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: u.rows(),
        });
    }
    let grades = space.s_max() + 1;
    let mut cert = Certificate::new(TheoremId::Kato, grades, ConstantsMode::Exact);
    let mut detail = KatoDetail {
        inverse_bounds: vec![None; grades],
        probes_ok: vec![true; grades],
    };
    let eye = Matrix::identity(u.rows());
    let residual = eye.sub(u)?;
    let u_inv = u.inverse(f(RANK_RTOL)).ok();

    for s in 0..grades {
        let lambda1 = op_norm(&residual, space, s, false, space, s, false)?;
        cert.constants[s].insert("lambda1".into(), lambda1);
        cert.constants[s].insert("lambda2".into(), T::zero());
        cert.hypothesis_ok[s] = lambda1 < T::one();
        cert.predicted[s] = Interval {
            lower: T::one() - lambda1,
            upper: T::one() + lambda1,
        };
        let sv = normalized_matrix(u, space, s, false, space, s, false)?.singular_values();
        cert.measured[s] = MeasuredBounds {
            a: sv.last().copied().unwrap_or_else(T::zero),
            b: sv.first().copied().unwrap_or_else(T::zero),
        };
        if !cert.hypothesis_ok[s] {
            continue;
        }
        // reciprocal sandwich on U^{-1}
        let inv_ok = match &u_inv {
            Some(ui) => {
                let isv =
                    normalized_matrix(ui, space, s, false, space, s, false)?.singular_values();
                let ib = MeasuredBounds {
                    a: isv.last().copied().unwrap_or_else(T::zero),
                    b: isv.first().copied().unwrap_or_else(T::zero),
                };
                detail.inverse_bounds[s] = Some(ib);
                let lo = T::one() / (T::one() + lambda1);
                let hi = T::one() / (T::one() - lambda1);
                lo <= ib.a + rel_tol(lo, ib.a) && ib.b <= hi + rel_tol(hi, ib.b)
            }
            // a satisfied hypothesis guarantees invertibility
            None => false,
        };
        let mut rng = Xoshiro256::new(Xoshiro256::substream_seed(seed, s as u64));
        let tol = rel_tol(T::one(), T::one() + lambda1);
        for _ in 0..probes {
            let x = random_unit(&mut rng, space, s);
            let ux = space.norm(&u.mul_vec(&x)?, s)?;
            if ux < (T::one() - lambda1) - tol || ux > (T::one() + lambda1) + tol {
                detail.probes_ok[s] = false;
            }
            if let Some(ui) = &u_inv {
                let uix = space.norm(&ui.mul_vec(&x)?, s)?;
                let lo = T::one() / (T::one() + lambda1);
                let hi = T::one() / (T::one() - lambda1);
                if uix < lo - tol || uix > hi + tol {
                    detail.probes_ok[s] = false;
                }
            }
        }
        if let Some(ib) = detail.inverse_bounds[s] {
            cert.constants[s].insert("inv_A".into(), ib.a);
            cert.constants[s].insert("inv_B".into(), ib.b);
        }
        cert.sound[s] = Some(
            interval_contains(&cert.predicted[s], &cert.measured[s])
                && inv_ok
                && detail.probes_ok[s],
        );
    }
    Ok((cert, detail))
}

/// Bessel perturbation: exact mu_tilde = ||G - H||_s gives upper bound
/// B_s + mu_tilde for H; the converse direction re-certifies G from H.
pub fn bessel_perturb_certify<T: Scalar>(
    frame: &FrameFamily<T>,
    h: &Matrix<T>,
) -> Result<Certificate<T>> {
    let bounds_g = frame.frame_bounds()?;
    let bounds_h = measured_bounds(frame, h)?;
    let diff = frame.analysis().sub(h)?;
    let grades = frame.s_max() + 1;
    let mut cert = Certificate::new(TheoremId::Bessel, grades, ConstantsMode::Exact);
    for s in 0..grades {
        let mu = op_norm(&diff, frame.signal_space(), s, false, frame.coeff_space(), s, false)?;
        cert.constants[s].insert("mu_tilde".into(), mu);
        cert.hypothesis_ok[s] = true;
        cert.predicted[s] = Interval {
            lower: T::zero(),
            upper: bounds_g.b[s] + mu,
        };
        cert.measured[s] = MeasuredBounds {
            a: bounds_h.a[s],
            b: bounds_h.b[s],
        };
        // converse: G seen as a perturbation of H with the same mu_tilde
        let converse_upper = bounds_h.b[s] + mu;
        cert.constants[s].insert("converse_upper".into(), converse_upper);
        let forward = interval_contains(&cert.predicted[s], &cert.measured[s]);
        let converse =
            bounds_g.b[s] <= converse_upper + rel_tol(bounds_g.b[s], converse_upper);
        cert.sound[s] = Some(forward && converse);
    }
    Ok(cert)
}

/// Min-condition perturbation. Route (a): rigorous lambda_s from operator
/// norms when both lower bounds are positive. Route (b): residual-ascent
/// lower estimate of the true supremum, always reported.
pub fn min_condition_certify<T: Scalar>(
    frame: &FrameFamily<T>,
    recon: &ReconstructionOp<T>,
    h: &Matrix<T>,
    seed: u64,
) -> Result<Certificate<T>> {
    check_left_inverse(&recon.s, frame.analysis())?;
    let bounds_g = frame.frame_bounds()?;
    let bounds_h = measured_bounds(frame, h)?;
    let g = frame.analysis();
    let diff = g.sub(h)?;
    let x = frame.signal_space();
    let theta = frame.coeff_space();
    let grades = frame.s_max() + 1;
    let mut cert = Certificate::new(TheoremId::MinCondition, grades, ConstantsMode::Exact);

    // reconstruction for H via D = G pinv(H): V = S D, V H = I when H has rank n
    let h_pinv = h.pinv(f(RANK_RTOL));
    let d = g.matmul(&h_pinv)?;
    let v = recon.s.matmul(&d)?;
    let v_residual = v
        .matmul(h)?
        .sub(&Matrix::identity(frame.dim()))?
        .frobenius_norm();

    for s in 0..grades {
        let diff_norm = op_norm(&diff, x, s, false, theta, s, false)?;
        let (a_g, a_h) = (bounds_g.a[s], bounds_h.a[s]);
        let route_a = a_g > T::zero() && a_h > T::zero();
        cert.hypothesis_ok[s] = route_a;

        // route (b): sampled lower estimate of the true supremum
        let obj = |fv: &[T]| {
            let num = theta.norm(&diff.mul_vec(fv).unwrap(), s).unwrap();
            let gn = theta.norm(&g.mul_vec(fv).unwrap(), s).unwrap();
            let hn = theta.norm(&h.mul_vec(fv).unwrap(), s).unwrap();
            let den = gn.min(hn);
            if den > f(1e-12) {
                num / den
            } else {
                -T::one()
            }
        };
        let (lambda_est, _) =
            residual_ascent(x, s, &obj, 8, Xoshiro256::substream_seed(seed, s as u64))?;
        cert.constants[s].insert("lambda_est".into(), lambda_est.max(T::zero()));
        cert.constants[s].insert("v_residual".into(), v_residual);

        if route_a {
            let lambda = if diff_norm == T::zero() {
                T::zero()
            } else {
                diff_norm / a_g.min(a_h)
            };
            cert.constants[s].insert("lambda".into(), lambda);
            cert.predicted[s] = Interval {
                lower: a_g / (T::one() + lambda),
                upper: (T::one() + lambda) * bounds_g.b[s],
            };
            // converse constant from two independently certified frames
            let lambda_conv = (T::one() + bounds_h.b[s] / a_g)
                .max(T::one() + bounds_g.b[s] / a_h);
            cert.constants[s].insert("lambda_converse".into(), lambda_conv);
            let mut rng = Xoshiro256::new(Xoshiro256::substream_seed(seed, 1000 + s as u64));
            let converse_ok = (0..200).all(|_| {
                let fv = random_unit(&mut rng, x, s);
                let num = theta.norm(&diff.mul_vec(&fv).unwrap(), s).unwrap();
                let gn = theta.norm(&g.mul_vec(&fv).unwrap(), s).unwrap();
                let hn = theta.norm(&h.mul_vec(&fv).unwrap(), s).unwrap();
                let bound = lambda_conv * gn.min(hn);
                num <= bound + rel_tol(num, bound)
            });
            cert.constants[s].insert(
                "converse_ok".into(),
                if converse_ok { T::one() } else { T::zero() },
            );
        }
        cert.measured[s] = MeasuredBounds {
            a: bounds_h.a[s],
            b: bounds_h.b[s],
        };
    }
    cert.finalize_soundness();
    Ok(cert)
}

/// Weighted perturbation with row-weight sequences alpha, beta.
pub fn weighted_perturb_certify<T: Scalar>(
    frame: &FrameFamily<T>,
    recon: &ReconstructionOp<T>,
    h: &Matrix<T>,
    env: &WeightEnvelope<T>,
    lambda: &[T],
    mu: &[T],
    seed: u64,
) -> Result<Certificate<T>> {
    check_left_inverse(&recon.s, frame.analysis())?;
    let grades = frame.s_max() + 1;
    if lambda.len() != grades || mu.len() != grades {
        return Err(Error::DimensionMismatch {
            expected: grades,
            got: lambda.len().min(mu.len()),
        });
    }
    if env.alpha.len() != frame.num_functionals() || env.beta.len() != frame.num_functionals() {
        return Err(Error::InvalidEnvelope);
    }
    for s in 0..grades {
        if lambda[s] < T::zero() || lambda[s] >= T::one() || mu[s] < T::zero() || mu[s] >= T::one()
        {
            return Err(Error::InvalidSpec(
                "weighted requires lambda_s, mu_s in [0, 1)".into(),
            ));
        }
    }
    let x = frame.signal_space();
    let theta = frame.coeff_space();
    let bounds_g = frame.frame_bounds()?;
    let bounds_h = measured_bounds(frame, h)?;
    let ga = frame.analysis().scale_rows(&env.alpha)?;
    let hb = h.scale_rows(&env.beta)?;
    let diff = ga.sub(&hb)?;

    let exact = lambda.iter().chain(mu).all(|&v| v == T::zero());
    let mut cert = Certificate::new(
        TheoremId::Weighted,
        grades,
        if exact {
            ConstantsMode::Exact
        } else {
            ConstantsMode::Estimated
        },
    );

    for s in 0..grades {
        let gamma = if exact {
            op_norm(&diff, x, s, false, theta, s, false)?
        } else {
            let obj = |fv: &[T]| {
                theta.norm(&diff.mul_vec(fv).unwrap(), s).unwrap()
                    - lambda[s] * theta.norm(&ga.mul_vec(fv).unwrap(), s).unwrap()
                    - mu[s] * theta.norm(&hb.mul_vec(fv).unwrap(), s).unwrap()
            };
            residual_ascent(x, s, &obj, 8, Xoshiro256::substream_seed(seed, s as u64))?
                .0
                .max(T::zero())
        };
        let s_norm = recon.norms.values[s];
        cert.hypothesis_ok[s] = s_norm * gamma < (T::one() - lambda[s]) * env.inf_alpha;
        cert.predicted[s] = Interval {
            lower: ((T::one() - lambda[s]) * env.inf_alpha / s_norm - gamma)
                / ((T::one() + mu[s]) * env.sup_beta),
            upper: ((T::one() + lambda[s]) * bounds_g.b[s] * env.sup_alpha + gamma)
                / ((T::one() - mu[s]) * env.inf_beta),
        };
        cert.measured[s] = MeasuredBounds {
            a: bounds_h.a[s],
            b: bounds_h.b[s],
        };
        let c = &mut cert.constants[s];
        c.insert("gamma".into(), gamma);
        c.insert("lambda".into(), lambda[s]);
        c.insert("mu".into(), mu[s]);
        c.insert("recon_norm".into(), s_norm);
    }
    cert.finalize_soundness();
    Ok(cert)
}

/// Perturbation of the reconstruction operator: S_new close to V in the
/// sense of Eq-style mixed bounds produces a frame {h_i = g_i o L^{-1}}
/// with L = S_new G.
pub fn reconstruction_perturb_certify<T: Scalar>(
    frame: &FrameFamily<T>,
    recon: &ReconstructionOp<T>,
    s_new: &Matrix<T>,
    lambda1: &[T],
    lambda2: &[T],
    seed: u64,
) -> Result<Certificate<T>> {
    check_left_inverse(&recon.s, frame.analysis())?;
    let grades = frame.s_max() + 1;
    if lambda1.len() != grades || lambda2.len() != grades {
        return Err(Error::DimensionMismatch {
            expected: grades,
            got: lambda1.len().min(lambda2.len()),
        });
    }
    let x = frame.signal_space();
    let theta = frame.coeff_space();
    let bounds_g = frame.frame_bounds()?;
    let diff = s_new.sub(&recon.s)?;
    let exact = lambda1.iter().chain(lambda2).all(|&v| v == T::zero());
    let mut cert = Certificate::new(
        TheoremId::Reconstruction,
        grades,
        if exact {
            ConstantsMode::Exact
        } else {
            ConstantsMode::Estimated
        },
    );

    let mut mus = Vec::with_capacity(grades);
    for s in 0..grades {
        let mu = if exact {
            op_norm(&diff, theta, s, false, x, s, false)?
        } else {
            let obj = |c: &[T]| {
                x.norm(&diff.mul_vec(c).unwrap(), s).unwrap()
                    - lambda1[s] * x.norm(&recon.s.mul_vec(c).unwrap(), s).unwrap()
                    - lambda2[s] * x.norm(&s_new.mul_vec(c).unwrap(), s).unwrap()
            };
            residual_ascent(theta, s, &obj, 8, Xoshiro256::substream_seed(seed, s as u64))?
                .0
                .max(T::zero())
        };
        cert.hypothesis_ok[s] =
            lambda2[s].max(lambda1[s] + mu * bounds_g.b[s]) < T::one();
        mus.push(mu);
    }

    let l = s_new.matmul(frame.analysis())?;
    let l_inv = l.inverse(f(RANK_RTOL));
    let any_hyp = cert.hypothesis_ok.iter().any(|&h| h);
    let h_new = match l_inv {
        Ok(ref li) => Some(frame.analysis().matmul(li)?),
        Err(_) if any_hyp => return Err(Error::SingularL),
        Err(_) => None,
    };
    let bounds_h = match &h_new {
        Some(hm) => {
            let res = s_new
                .matmul(hm)?
                .sub(&Matrix::identity(frame.dim()))?
                .frobenius_norm();
            if res > f(RESIDUAL_TOL) {
                return Err(Error::NotLeftInverse {
                    residual: res.to_f64().unwrap_or(f64::NAN),
                });
            }
            Some(measured_bounds(frame, hm)?)
        }
        None => None,
    };

    for s in 0..grades {
        let mu = mus[s];
        let denom_hi = T::one() - (lambda1[s] + mu * bounds_g.b[s]);
        cert.predicted[s] = Interval {
            lower: bounds_g.a[s] * (T::one() - lambda2[s])
                / (T::one() + lambda1[s] + mu * bounds_g.b[s]),
            upper: if denom_hi > T::zero() {
                bounds_g.b[s] * (T::one() + lambda2[s]) / denom_hi
            } else {
                T::infinity()
            },
        };
        if let Some(bh) = &bounds_h {
            cert.measured[s] = MeasuredBounds {
                a: bh.a[s],
                b: bh.b[s],
            };
        }
        let c = &mut cert.constants[s];
        c.insert("mu".into(), mu);
        c.insert("lambda1".into(), lambda1[s]);
        c.insert("lambda2".into(), lambda2[s]);
    }
    if bounds_h.is_some() {
        cert.finalize_soundness();
    }
    Ok(cert)
}

/// Margin by which the functional-perturbation hypothesis is enforced
/// strictly: equality would only give ||I - SV|| <= 1, which does not
/// guarantee invertibility.
pub const FUNCTIONAL_STRICT_MARGIN: f64 = 1e-12;

/// Perturbation of the functionals with a reconstruction built through
/// T = (S V)^{-1} S, where V is analysis by H.
pub fn functional_perturb_certify<T: Scalar>(
    frame: &FrameFamily<T>,
    recon: &ReconstructionOp<T>,
    h: &Matrix<T>,
    lambda: &[T],
    seed: u64,
) -> Result<Certificate<T>> {
    check_left_inverse(&recon.s, frame.analysis())?;
    let grades = frame.s_max() + 1;
    if lambda.len() != grades {
        return Err(Error::DimensionMismatch {
            expected: grades,
            got: lambda.len(),
        });
    }
    if lambda.iter().any(|&l| l < T::zero()) {
        return Err(Error::InvalidSpec("functional requires lambda_s >= 0".into()));
    }
    let x = frame.signal_space();
    let theta = frame.coeff_space();
    let bounds_g = frame.frame_bounds()?;
    let bounds_h = measured_bounds(frame, h)?;
    let diff = frame.analysis().sub(h)?;
    let exact = lambda.iter().all(|&l| l == T::zero());
    let mut cert = Certificate::new(
        TheoremId::Functional,
        grades,
        if exact {
            ConstantsMode::Exact
        } else {
            ConstantsMode::Estimated
        },
    );

    for s in 0..grades {
        let mu = if exact {
            op_norm(&diff, x, s, false, theta, s, false)?
        } else {
            let obj = |fv: &[T]| {
                theta.norm(&diff.mul_vec(fv).unwrap(), s).unwrap()
                    - lambda[s] * theta.norm(&frame.analysis().mul_vec(fv).unwrap(), s).unwrap()
            };
            residual_ascent(x, s, &obj, 8, Xoshiro256::substream_seed(seed, s as u64))?
                .0
                .max(T::zero())
        };
        let s_norm = recon.norms.values[s];
        let u_norm = bounds_g.b[s];
        cert.hypothesis_ok[s] = (lambda[s] * u_norm + mu) * s_norm
            < T::one() - f::<T>(FUNCTIONAL_STRICT_MARGIN);
        cert.predicted[s] = Interval {
            lower: (T::one() - (lambda[s] * u_norm + mu) * s_norm) / s_norm,
            upper: u_norm * (T::one() + lambda[s]) + mu,
        };
        cert.measured[s] = MeasuredBounds {
            a: bounds_h.a[s],
            b: bounds_h.b[s],
        };
        let c = &mut cert.constants[s];
        c.insert("mu".into(), mu);
        c.insert("lambda".into(), lambda[s]);
        c.insert("recon_norm".into(), s_norm);
    }

    // T = (S V)^{-1} S must exist and left-invert the analysis by H
    let sv = recon.s.matmul(h)?;
    match sv.inverse(f(RANK_RTOL)) {
        Ok(svi) => {
            let t = svi.matmul(&recon.s)?;
            let res = t
                .matmul(h)?
                .sub(&Matrix::identity(frame.dim()))?
                .frobenius_norm();
            if res > f(RESIDUAL_TOL) {
                return Err(Error::NotLeftInverse {
                    residual: res.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Err(_) => {
            if cert.hypothesis_ok.iter().any(|&ok| ok) {
                return Err(Error::SingularSV);
            }
        }
    }
    cert.finalize_soundness();
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = GradedSpace<f64>;
    type M = Matrix<f64>;

    fn unit_frame(g: M) -> FrameFamily<f64> {
        let n = g.cols();
        let m = g.rows();
        FrameFamily::new(g, S::unit(n, 0), S::unit(m, 0)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cc_zero_perturbation_collapses() {
        let id = M::identity(2);
        let cert = cc_perturb_certify(&id, &id, 0.0, 0.0, 1).unwrap();
        assert!(cert.hypothesis_ok[0]);
        assert_eq!(cert.constants[0]["mu"], 0.0);
        assert!(close(cert.predicted[0].lower, 1.0, 1e-14));
        assert!(close(cert.predicted[0].upper, 1.0, 1e-14));
        assert_eq!(cert.sound[0], Some(true));
    }

    #[test]
    fn cc_diagonal_example() {
        let fm = M::identity(2);
        let gm = M::diag(&[1.1, 1.0]);
        let cert = cc_perturb_certify(&fm, &gm, 0.0, 0.0, 1).unwrap();
        assert!(close(cert.constants[0]["mu"], 0.1, 1e-14));
        assert!(close(cert.predicted[0].lower, 0.81, 1e-12));
        assert!(close(cert.predicted[0].upper, 1.21, 1e-12));
        assert!(close(cert.measured[0].a, 1.0, 1e-13));
        assert!(close(cert.measured[0].b, 1.21, 1e-13));
        assert_eq!(cert.sound[0], Some(true));
    }

    #[test]
    fn cc_hypothesis_failure() {
        let fm = M::identity(2);
        let gm = M::identity(2).scale(3.0);
        let cert = cc_perturb_certify(&fm, &gm, 0.0, 0.0, 1).unwrap();
        assert!(close(cert.constants[0]["mu"], 2.0, 1e-13));
        assert!(!cert.hypothesis_ok[0]);
        assert_eq!(cert.sound[0], None);
    }

    #[test]
    fn cc_rejects_rank_deficiency() {
        let fm = M::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            cc_perturb_certify(&fm, &fm, 0.0, 0.0, 1),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn kato_identity_and_scalars() {
        let sp = S::unit(2, 0);
        let (cert, _) = kato_certify(&M::identity(2), &sp, 100, 3).unwrap();
        assert_eq!(cert.constants[0]["lambda1"], 0.0);
        assert_eq!(cert.sound[0], Some(true));

        let (cert, detail) = kato_certify(&M::identity(2).scale(0.5), &sp, 200, 3).unwrap();
        assert!(close(cert.constants[0]["lambda1"], 0.5, 1e-14));
        assert!(close(cert.measured[0].a, 0.5, 1e-14));
        let ib = detail.inverse_bounds[0].unwrap();
        assert!(close(ib.b, 2.0, 1e-13));
        assert_eq!(cert.sound[0], Some(true));

        let (cert, _) = kato_certify(&M::identity(2).scale(2.5), &sp, 10, 3).unwrap();
        assert!(close(cert.constants[0]["lambda1"], 1.5, 1e-13));
        assert!(!cert.hypothesis_ok[0]);
        assert_eq!(cert.sound[0], None);
    }

    #[test]
    fn bessel_examples() {
        let g = M::identity(2);
        let fr = unit_frame(g.clone());
        let cert = bessel_perturb_certify(&fr, &g).unwrap();
        assert_eq!(cert.constants[0]["mu_tilde"], 0.0);
        assert_eq!(cert.sound[0], Some(true));

        let h = M::diag(&[1.3, 1.0]);
        let cert = bessel_perturb_certify(&fr, &h).unwrap();
        assert!(close(cert.constants[0]["mu_tilde"], 0.3, 1e-14));
        assert!(close(cert.predicted[0].upper, 1.3, 1e-14));
        assert!(close(cert.measured[0].b, 1.3, 1e-14));
        assert_eq!(cert.sound[0], Some(true));

        let h = M::identity(2).scale(-1.0);
        let cert = bessel_perturb_certify(&fr, &h).unwrap();
        assert!(close(cert.constants[0]["mu_tilde"], 2.0, 1e-13));
        assert!(close(cert.predicted[0].upper, 3.0, 1e-13));
        assert!(close(cert.measured[0].b, 1.0, 1e-14));
        assert_eq!(cert.sound[0], Some(true));
    }

    #[test]
    fn min_condition_examples() {
        let fr = unit_frame(M::identity(2));
        let recon = fr.canonical_reconstruction().unwrap();
        let cert = min_condition_certify(&fr, &recon, &M::identity(2), 5).unwrap();
        assert_eq!(cert.constants[0]["lambda"], 0.0);
        assert_eq!(cert.sound[0], Some(true));

        let h = M::diag(&[1.0, 0.8]);
        let cert = min_condition_certify(&fr, &recon, &h, 5).unwrap();
        assert!(close(cert.constants[0]["lambda"], 0.25, 1e-13));
        assert!(close(cert.predicted[0].lower, 0.8, 1e-13));
        assert!(close(cert.predicted[0].upper, 1.25, 1e-13));
        assert!(close(cert.measured[0].a, 0.8, 1e-14));
        assert_eq!(cert.sound[0], Some(true));
        assert!(close(cert.constants[0]["lambda_est"], 0.25, 1e-5));
        assert!(cert.constants[0]["v_residual"] < 1e-10);
        assert_eq!(cert.constants[0]["converse_ok"], 1.0);

        let h = M::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let cert = min_condition_certify(&fr, &recon, &h, 5).unwrap();
        assert!(!cert.hypothesis_ok[0]);
        assert_eq!(cert.sound[0], None);
        assert!(cert.constants[0].contains_key("lambda_est"));
    }

    #[test]
    fn weighted_examples() {
        let fr = unit_frame(M::identity(2));
        let recon = fr.canonical_reconstruction().unwrap();
        let env = WeightEnvelope::unit(2);
        let cert = weighted_perturb_certify(
            &fr,
            &recon,
            &M::identity(2),
            &env,
            &[0.0],
            &[0.0],
            5,
        )
        .unwrap();
        assert_eq!(cert.constants[0]["gamma"], 0.0);
        assert_eq!(cert.sound[0], Some(true));

        let h = M::diag(&[1.0, 0.9]);
        let cert =
            weighted_perturb_certify(&fr, &recon, &h, &env, &[0.0], &[0.0], 5).unwrap();
        assert!(close(cert.constants[0]["gamma"], 0.1, 1e-14));
        assert!(cert.hypothesis_ok[0]);
        assert!(close(cert.predicted[0].lower, 0.9, 1e-13));
        assert!(close(cert.predicted[0].upper, 1.1, 1e-13));
        assert!(close(cert.measured[0].a, 0.9, 1e-14));
        assert_eq!(cert.sound[0], Some(true));

        let h = M::identity(2).scale(-1.0);
        let cert =
            weighted_perturb_certify(&fr, &recon, &h, &env, &[0.0], &[0.0], 5).unwrap();
        assert!(close(cert.constants[0]["gamma"], 2.0, 1e-13));
        assert!(!cert.hypothesis_ok[0]);
    }

    #[test]
    fn reconstruction_examples() {
        let fr = unit_frame(M::identity(2));
        let recon = fr.canonical_reconstruction().unwrap();
        let cert = reconstruction_perturb_certify(
            &fr,
            &recon,
            &recon.s.clone(),
            &[0.0],
            &[0.0],
            5,
        )
        .unwrap();
        assert_eq!(cert.constants[0]["mu"], 0.0);
        assert_eq!(cert.sound[0], Some(true));

        let s_new = M::diag(&[1.0 / 1.1, 1.0]);
        let cert =
            reconstruction_perturb_certify(&fr, &recon, &s_new, &[0.0], &[0.0], 5).unwrap();
        let mu = 1.0 - 1.0 / 1.1;
        assert!(close(cert.constants[0]["mu"], mu, 1e-14));
        assert!(cert.hypothesis_ok[0]);
        assert!(close(cert.predicted[0].lower, 1.0 / (1.0 + mu), 1e-13));
        assert!(close(cert.predicted[0].upper, 1.1, 1e-12));
        assert!(close(cert.measured[0].a, 1.0, 1e-13));
        assert!(close(cert.measured[0].b, 1.1, 1e-13));
        assert_eq!(cert.sound[0], Some(true));

        let s_new = recon.s.scale(3.0);
        let cert =
            reconstruction_perturb_certify(&fr, &recon, &s_new, &[0.0], &[0.0], 5).unwrap();
        assert!(close(cert.constants[0]["mu"], 2.0, 1e-13));
        assert!(!cert.hypothesis_ok[0]);
    }

    #[test]
    fn functional_examples() {
        let fr = unit_frame(M::identity(2));
        let recon = fr.canonical_reconstruction().unwrap();
        let g = M::identity(2);
        let cert = functional_perturb_certify(&fr, &recon, &g, &[0.0], 5).unwrap();
        assert_eq!(cert.constants[0]["mu"], 0.0);
        assert!(close(cert.predicted[0].lower, 1.0, 1e-13));
        assert!(close(cert.predicted[0].upper, 1.0, 1e-13));
        assert_eq!(cert.sound[0], Some(true));

        let h = M::diag(&[1.0, 0.9]);
        let cert = functional_perturb_certify(&fr, &recon, &h, &[0.0], 5).unwrap();
        assert!(close(cert.constants[0]["mu"], 0.1, 1e-14));
        assert!(cert.hypothesis_ok[0]);
        assert!(close(cert.predicted[0].lower, 0.9, 1e-13));
        assert!(close(cert.predicted[0].upper, 1.1, 1e-13));
        assert!(close(cert.measured[0].a, 0.9, 1e-14));
        assert_eq!(cert.sound[0], Some(true));

        // op-norm-1.5 bump exceeds 1/||S|| = 1
        let mut e = M::zeros(2, 2);
        e[(0, 0)] = 1.5;
        let h = g.add(&e).unwrap();
        let cert = functional_perturb_certify(&fr, &recon, &h, &[0.0], 5).unwrap();
        assert!(!cert.hypothesis_ok[0]);
    }

    #[test]
    fn predicted_intervals_widen_with_mu() {
        let fr = unit_frame(M::identity(2));
        let recon = fr.canonical_reconstruction().unwrap();
        let mut prev_lo = f64::INFINITY;
        let mut prev_hi = 0.0;
        for k in 1..=5 {
            let eps = 0.05 * k as f64;
            let h = M::diag(&[1.0, 1.0 - eps]);
            let cert = functional_perturb_certify(&fr, &recon, &h, &[0.0], 5).unwrap();
            assert!(cert.predicted[0].lower <= prev_lo);
            assert!(cert.predicted[0].upper >= prev_hi);
            prev_lo = cert.predicted[0].lower;
            prev_hi = cert.predicted[0].upper;
        }
    }
}
