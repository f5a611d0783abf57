//! Property-based invariants of the graded-norm machinery: norm nesting,
//! norm/dual-norm duality, operator-norm symmetry under transposition,
//! frame-bound sandwiches, reconstruction identities and the one-sidedness
//! of residual-ascent estimates.

use frameguard::frame::FrameFamily;
use frameguard::graded::{op_norm, GradedSpace};
use frameguard::linalg::Matrix;
use frameguard::perturb::residual_ascent;
use proptest::prelude::*;

type M = Matrix<f64>;
type S = GradedSpace<f64>;

const REL: f64 = 1e-9;

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Monotone weight ladder: base row in [0.1, 2], each grade adds a
/// nonnegative increment per coordinate.
fn ladder(dim: usize, grades: usize) -> impl Strategy<Value = S> {
    (
        prop::collection::vec(0.1f64..2.0, dim),
        prop::collection::vec(prop::collection::vec(0.0f64..1.5, dim), grades),
    )
        .prop_map(|(base, incs)| {
            let mut rows = vec![base];
            for inc in incs {
                let prev = rows.last().unwrap().clone();
                rows.push(prev.iter().zip(&inc).map(|(a, b)| a + b).collect());
            }
            S::new(rows).unwrap()
        })
}

fn space_and_vec() -> impl Strategy<Value = (S, Vec<f64>)> {
    (1usize..6, 0usize..4).prop_flat_map(|(dim, grades)| {
        (ladder(dim, grades), prop::collection::vec(-3.0f64..3.0, dim))
    })
}

/// (signal space, coefficient space, m x n matrix) with matching grade count.
fn spaces_and_matrix() -> impl Strategy<Value = (S, S, M)> {
    (1usize..5, 1usize..7, 0usize..3).prop_flat_map(|(n, m, grades)| {
        (
            ladder(n, grades),
            ladder(m, grades),
            prop::collection::vec(-3.0f64..3.0, m * n),
        )
            .prop_map(move |(x, theta, entries)| {
                let g = M::from_fn(m, n, |i, j| entries[i * n + j]);
                (x, theta, g)
            })
    })
}

proptest! {
    #[test]
    fn norm_nesting_and_dual_reversal((space, f) in space_and_vec()) {
        for s in 0..space.s_max() {
            let lo = space.norm(&f, s).unwrap();
            let hi = space.norm(&f, s + 1).unwrap();
            prop_assert!(lo <= hi * (1.0 + 1e-12));
            let dlo = space.dual_norm(&f, s + 1).unwrap();
            let dhi = space.dual_norm(&f, s).unwrap();
            prop_assert!(dlo <= dhi * (1.0 + 1e-12));
        }
    }

    /// The dual norm is sharp: the closed-form maximizer
    /// g_i = w_s(i)^2 f_i / ||f||_s has dual norm 1 and pairs to ||f||_s.
    #[test]
    fn duality_is_sharp((space, f) in space_and_vec()) {
        for s in 0..=space.s_max() {
            let nf = space.norm(&f, s).unwrap();
            if nf < 1e-6 {
                continue;
            }
            let w = space.weights_at(s).unwrap();
            let g: Vec<f64> = f
                .iter()
                .zip(w)
                .map(|(fi, wi)| wi * wi * fi / nf)
                .collect();
            let dual = space.dual_norm(&g, s).unwrap();
            let pairing: f64 = g.iter().zip(&f).map(|(a, b)| a * b).sum();
            prop_assert!(rel_close(dual, 1.0, REL));
            prop_assert!(rel_close(pairing, nf, REL));
        }
    }

    /// ||M||_{X_s -> Theta_s} equals ||M^T||_{Theta_s^* -> X_s^*}.
    #[test]
    fn op_norm_transpose_symmetry((x, theta, g) in spaces_and_matrix()) {
        let gt = g.transpose();
        for s in 0..=x.s_max() {
            let primal = op_norm(&g, &x, s, false, &theta, s, false).unwrap();
            let dual = op_norm(&gt, &theta, s, true, &x, s, true).unwrap();
            prop_assert!(rel_close(primal, dual, 1e-12));
        }
    }

    /// The operator norm dominates every sampled ratio.
    #[test]
    fn op_norm_dominates_samples(
        (x, theta, g) in spaces_and_matrix(),
        seed in 0u64..1u64 << 40,
    ) {
        let mut rng = frameguard::rng::Xoshiro256::new(seed);
        for s in 0..=x.s_max() {
            let bound = op_norm(&g, &x, s, false, &theta, s, false).unwrap();
            for _ in 0..20 {
                let f = rng.normal_vec(x.dim());
                let den = x.norm(&f, s).unwrap();
                if den < 1e-9 {
                    continue;
                }
                let num = theta.norm(&g.mul_vec(&f).unwrap(), s).unwrap();
                prop_assert!(num <= bound * den * (1.0 + 1e-10));
            }
        }
    }

    /// A_s ||f||_s <= ||G f||_s <= B_s ||f||_s for every probe.
    #[test]
    fn frame_bounds_sandwich((x, theta, g) in spaces_and_matrix(), seed in 0u64..1u64 << 40) {
        let frame = FrameFamily::new(g.clone(), x.clone(), theta.clone()).unwrap();
        let bounds = frame.frame_bounds().unwrap();
        let mut rng = frameguard::rng::Xoshiro256::new(seed);
        for s in 0..=x.s_max() {
            for _ in 0..20 {
                let f = rng.normal_vec(x.dim());
                let den = x.norm(&f, s).unwrap();
                if den < 1e-9 {
                    continue;
                }
                let num = theta.norm(&frame.analyze(&f).unwrap(), s).unwrap();
                let tol = 1e-10 * (1.0 + num / den);
                prop_assert!(bounds.a[s] * den <= num + tol * den);
                prop_assert!(num <= bounds.b[s] * den + tol * den);
            }
        }
    }

    /// Scaled rotations are tight frames at every grade under unit weights.
    #[test]
    fn tight_frames_are_detected(
        n in 2usize..6,
        angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 1..6),
        c in 0.5f64..3.0,
    ) {
        let mut q = M::identity(n);
        for (k, &a) in angles.iter().enumerate() {
            let (i, j) = (k % n, (k + 1) % n);
            if i == j {
                continue;
            }
            let mut r = M::identity(n);
            r[(i, i)] = a.cos();
            r[(j, j)] = a.cos();
            r[(i, j)] = -a.sin();
            r[(j, i)] = a.sin();
            q = q.matmul(&r).unwrap();
        }
        let g = q.scale(c);
        let frame = FrameFamily::new(g, S::unit(n, 1), S::unit(n, 1)).unwrap();
        let verdict = frame.is_pre_f_frame(1e-9).unwrap();
        prop_assert!(verdict.is_pre_frame);
        for s in 0..=1 {
            prop_assert!(verdict.tight[s]);
            prop_assert!(rel_close(verdict.bounds.a[s], c, REL));
            prop_assert!(rel_close(verdict.bounds.b[s], c, REL));
        }
    }

    /// S (G f) = f and the coefficient projection is idempotent whenever the
    /// generated frame is numerically well conditioned.
    #[test]
    fn reconstruction_left_inverts((x, theta, g) in spaces_and_matrix(), seed in 0u64..1u64 << 40) {
        prop_assume!(g.rows() >= g.cols());
        let frame = FrameFamily::new(g.clone(), x.clone(), theta.clone()).unwrap();
        let bounds = frame.frame_bounds().unwrap();
        prop_assume!(bounds.a[0] > 1e-3 * bounds.b[0] && bounds.b[0] > 1e-3);
        let recon = frame.canonical_reconstruction().unwrap();

        let mut rng = frameguard::rng::Xoshiro256::new(seed);
        let f = rng.normal_vec(x.dim());
        let back = recon.s.mul_vec(&frame.analyze(&f).unwrap()).unwrap();
        let err: f64 = back
            .iter()
            .zip(&f)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-8 * (1.0 + scale));

        let proj = frame.coefficient_projection(&recon).unwrap();
        let resid = proj.u.matmul(&proj.u).unwrap().sub(&proj.u).unwrap().frobenius_norm();
        prop_assert!(resid <= 1e-9);
    }

    /// Residual-ascent estimates never exceed the exact operator norm, and
    /// they find a decent fraction of it.
    #[test]
    fn ascent_estimate_is_one_sided((x, theta, g) in spaces_and_matrix(), seed in 0u64..1u64 << 40) {
        for s in 0..=x.s_max() {
            let exact = op_norm(&g, &x, s, false, &theta, s, false).unwrap();
            let obj = |f: &[f64]| theta.norm(&g.mul_vec(f).unwrap(), s).unwrap();
            let (est, _) = residual_ascent(&x, s, &obj, 4, seed).unwrap();
            prop_assert!(est <= exact * (1.0 + 1e-9) + 1e-12);
            prop_assert!(est >= 0.5 * exact - 1e-9);
        }
    }
}
