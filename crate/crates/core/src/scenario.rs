//! Scenario configs, seeded generation, batch execution and the selftest
//! suite. All randomness flows through the pinned PRNG in [`crate::rng`];
//! per-scenario substreams keep reports identical regardless of worker count.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::frame::{norming_frame, FrameFamily, RANK_RTOL};
use crate::graded::GradedSpace;
use crate::linalg::Matrix;
use crate::oracle::{grid_frame_bounds, grid_sup_ratio, refine_until, GridSphere};
use crate::perturb::{
    bessel_perturb_certify, cc_perturb_certify, functional_perturb_certify, kato_certify,
    min_condition_certify, reconstruction_perturb_certify, weighted_perturb_certify, Certificate,
    TheoremId, WeightEnvelope,
};
use crate::report::{Report, ScenarioOutcome};
use crate::rng::Xoshiro256;
use crate::{Error, Result};

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    #[default]
    Unit,
    Polynomial {
        #[serde(default = "one")]
        exponent_step: u32,
    },
    Explicit {
        weights: Vec<Vec<f64>>,
    },
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrameSpec {
    #[default]
    Identity,
    RandomGaussian,
    #[serde(rename = "example_2_6")]
    Example26,
    Explicit {
        matrix: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    #[default]
    None,
    AdditiveGaussian {
        scale: f64,
    },
    Diagonal {
        entries: Vec<f64>,
    },
    Explicit {
        matrix: Vec<Vec<f64>>,
    },
}

/// Fixed hypothesis constants for one theorem; absent fields default to 0
/// (which keeps the certifier in exact mode).
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default)]
    pub lambda1: f64,
    #[serde(default)]
    pub lambda2: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub mu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub dim: usize,
    pub num_functionals: usize,
    #[serde(default)]
    pub grades: usize,
    #[serde(default)]
    pub x_weights: WeightSpec,
    #[serde(default)]
    pub theta_weights: WeightSpec,
    #[serde(default)]
    pub frame: FrameSpec,
    #[serde(default)]
    pub perturbation: PerturbationSpec,
    #[serde(default)]
    pub theorems: Vec<String>,
    #[serde(default)]
    pub constants: BTreeMap<String, ConstantsSpec>,
    #[serde(default)]
    pub envelope: Option<EnvelopeSpec>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.num_functionals == 0 {
            return Err(Error::ValidationError(
                "dim and num_functionals must be >= 1".into(),
            ));
        }
        if let FrameSpec::Example26 = self.frame {
            if self.num_functionals != self.dim + 1 {
                return Err(Error::ValidationError(
                    "example_2_6 requires num_functionals = dim + 1".into(),
                ));
            }
        }
        for name in &self.theorems {
            if TheoremId::parse(name).is_none() {
                return Err(Error::ValidationError(format!("unknown theorem: {name}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::ValidationError("tolerance must be > 0".into()));
        }
        // weight ladders must construct and satisfy the grading invariant
        self.build_spaces()?;
        Ok(())
    }

    pub fn build_spaces(&self) -> Result<(GradedSpace<f64>, GradedSpace<f64>)> {
        let x = build_space(&self.x_weights, self.dim, self.grades)?;
        let theta = build_space(&self.theta_weights, self.num_functionals, self.grades)?;
        Ok((x, theta))
    }
}

fn build_space(spec: &WeightSpec, dim: usize, grades: usize) -> Result<GradedSpace<f64>> {
    let space = match spec {
        WeightSpec::Unit => GradedSpace::unit(dim, grades),
        WeightSpec::Polynomial { exponent_step } => {
            GradedSpace::polynomial(dim, grades, *exponent_step)
        }
        WeightSpec::Explicit { weights } => {
            let sp = GradedSpace::new(weights.clone())
                .map_err(|e| Error::ValidationError(e.to_string()))?;
            if sp.dim() != dim || sp.s_max() != grades {
                return Err(Error::ValidationError(format!(
                    "explicit ladder is {}x{}, config wants dim {dim} with {grades} grades",
                    sp.s_max() + 1,
                    sp.dim()
                )));
            }
            sp
        }
    };
    space
        .validate_grading()
        .map_err(|e| Error::ValidationError(e.to_string()))?;
    Ok(space)
}

/// Rows e1, e1, 2 e2, 3 e3, ..., n e_n (m = n + 1).
pub fn example_2_6_matrix(n: usize) -> Matrix<f64> {
    let mut rows = vec![vec![0.0; n]; n + 1];
    rows[0][0] = 1.0;
    rows[1][0] = 1.0;
    for i in 2..=n {
        rows[i][i - 1] = i as f64;
    }
    Matrix::from_rows(&rows).expect("nonempty")
}

pub fn generate_frame(
    spec: &FrameSpec,
    n: usize,
    m: usize,
    rng: &mut Xoshiro256,
) -> Result<Matrix<f64>> {
    match spec {
        FrameSpec::Identity => {
            if m != n {
                return Err(Error::InvalidSpec(
                    "identity frame requires num_functionals = dim".into(),
                ));
            }
            Ok(Matrix::identity(n))
        }
        FrameSpec::RandomGaussian => Ok(Matrix::from_fn(m, n, |_, _| rng.next_normal())),
        FrameSpec::Example26 => {
            if m != n + 1 {
                return Err(Error::InvalidSpec(
                    "example_2_6 requires num_functionals = dim + 1".into(),
                ));
            }
            Ok(example_2_6_matrix(n))
        }
        FrameSpec::Explicit { matrix } => {
            let g = Matrix::from_rows(matrix).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            if g.rows() != m || g.cols() != n {
                return Err(Error::InvalidSpec(format!(
                    "explicit frame is {}x{}, config wants {m}x{n}",
                    g.rows(),
                    g.cols()
                )));
            }
            Ok(g)
        }
    }
}

/// Perturbed analysis matrix H. Gaussian perturbations are normalized so
/// that `scale` is exactly the Euclidean operator norm of the perturbation.
pub fn generate_perturbation(
    spec: &PerturbationSpec,
    g: &Matrix<f64>,
    rng: &mut Xoshiro256,
) -> Result<Matrix<f64>> {
    match spec {
        PerturbationSpec::None => Ok(g.clone()),
        PerturbationSpec::AdditiveGaussian { scale } => {
            let noise = Matrix::from_fn(g.rows(), g.cols(), |_, _| rng.next_normal());
            let nn = noise.op_norm_euclid();
            if nn == 0.0 {
                return Ok(g.clone());
            }
            g.add(&noise.scale(scale / nn))
        }
        PerturbationSpec::Diagonal { entries } => {
            if entries.len() != g.cols().min(g.rows()) {
                return Err(Error::InvalidSpec(format!(
                    "diagonal perturbation wants {} entries",
                    g.cols().min(g.rows())
                )));
            }
            let mut h = g.clone();
            for (i, &e) in entries.iter().enumerate() {
                h[(i, i)] += e;
            }
            Ok(h)
        }
        PerturbationSpec::Explicit { matrix } => {
            let e = Matrix::from_rows(matrix).map_err(|x| Error::InvalidSpec(x.to_string()))?;
            if e.rows() != g.rows() || e.cols() != g.cols() {
                return Err(Error::InvalidSpec("perturbation shape mismatch".into()));
            }
            g.add(&e)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    BoundsOnly,
    Certify,
}

pub fn run_scenario(
    index: usize,
    cfg: &ScenarioConfig,
    mode: RunMode,
) -> Result<ScenarioOutcome> {
    let start = Instant::now();
    let (x, theta) = cfg.build_spaces()?;
    let mut rng = Xoshiro256::new(cfg.seed);
    let g = generate_frame(&cfg.frame, cfg.dim, cfg.num_functionals, &mut rng)
        .map_err(|e| Error::ValidationError(e.to_string()))?;
    let h = generate_perturbation(&cfg.perturbation, &g, &mut rng)
        .map_err(|e| Error::ValidationError(e.to_string()))?;
    let frame = FrameFamily::new(g.clone(), x.clone(), theta.clone())?;
    let perturbed = FrameFamily::new(h.clone(), x.clone(), theta.clone())?;
    let bounds_original = frame.frame_bounds()?;
    let bounds_perturbed = perturbed.frame_bounds()?;

    let mut certificates: Vec<Certificate<f64>> = Vec::new();
    let mut failures = Vec::new();

    if mode == RunMode::Certify {
        let recon = if cfg
            .theorems
            .iter()
            .any(|t| t != "cc" && t != "bessel")
        {
            Some(frame.canonical_reconstruction().map_err(|e| {
                Error::ValidationError(format!(
                    "requested certifier needs a reconstruction operator: {e}"
                ))
            })?)
        } else {
            None
        };
        for (ti, name) in cfg.theorems.iter().enumerate() {
            let theorem = TheoremId::parse(name)
                .ok_or_else(|| Error::ValidationError(format!("unknown theorem: {name}")))?;
            let consts = cfg.constants.get(name).cloned().unwrap_or_default();
            let seed = Xoshiro256::substream_seed(cfg.seed, 0x1000 + ti as u64);
            let grades = cfg.grades + 1;
            let result = match theorem {
                TheoremId::Cc => cc_perturb_certify(
                    &g.transpose(),
                    &h.transpose(),
                    consts.lambda1,
                    consts.lambda2,
                    seed,
                ),
                TheoremId::Kato => {
                    let recon = recon.as_ref().expect("recon built");
                    let u = recon.s.matmul(&h)?;
                    kato_certify(&u, &x, 1000, seed).map(|(c, _)| c)
                }
                TheoremId::Bessel => bessel_perturb_certify(&frame, &h),
                TheoremId::MinCondition => {
                    min_condition_certify(&frame, recon.as_ref().expect("recon"), &h, seed)
                }
                TheoremId::Weighted => {
                    let env = match &cfg.envelope {
                        Some(e) => WeightEnvelope::new(e.alpha.clone(), e.beta.clone())?,
                        None => WeightEnvelope::unit(cfg.num_functionals),
                    };
                    weighted_perturb_certify(
                        &frame,
                        recon.as_ref().expect("recon"),
                        &h,
                        &env,
                        &vec![consts.lambda; grades],
                        &vec![consts.mu; grades],
                        seed,
                    )
                }
                TheoremId::Reconstruction => {
                    let s_new = h.pinv(RANK_RTOL);
                    reconstruction_perturb_certify(
                        &frame,
                        recon.as_ref().expect("recon"),
                        &s_new,
                        &vec![consts.lambda1; grades],
                        &vec![consts.lambda2; grades],
                        seed,
                    )
                }
                TheoremId::Functional => functional_perturb_certify(
                    &frame,
                    recon.as_ref().expect("recon"),
                    &h,
                    &vec![consts.lambda; grades],
                    seed,
                ),
            };
            match result {
                Ok(cert) => certificates.push(cert),
                Err(
                    e @ (Error::SingularL | Error::SingularSV | Error::NotLeftInverse { .. }),
                ) => failures.push(format!("{name}: {e}")),
                Err(e) => return Err(e),
            }
        }
    }

    Ok(ScenarioOutcome {
        index,
        config_echo: serde_json::to_value(cfg).expect("config serializes"),
        bounds_original,
        bounds_perturbed: Some(bounds_perturbed),
        certificates,
        failures,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Parse a config file holding either one scenario object or an array.
pub fn parse_config(text: &str) -> Result<Vec<ScenarioConfig>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let configs: Vec<ScenarioConfig> = if value.is_array() {
        serde_json::from_value(value).map_err(|e| Error::ParseError(e.to_string()))?
    } else {
        vec![serde_json::from_value(value).map_err(|e| Error::ParseError(e.to_string()))?]
    };
    for cfg in &configs {
        cfg.validate()?;
    }
    Ok(configs)
}

pub fn load_config(path: &Path) -> Result<Vec<ScenarioConfig>> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Run all scenarios, fanning out across `jobs` workers. Results are ordered
/// by scenario index before emission, so the report does not depend on the
/// worker count.
pub fn run_all(
    configs: &[ScenarioConfig],
    mode: RunMode,
    jobs: usize,
    seed_override: Option<u64>,
) -> Result<Report> {
    let configs: Vec<ScenarioConfig> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut c = c.clone();
            if let Some(base) = seed_override {
                c.seed = Xoshiro256::substream_seed(base, i as u64);
            }
            c
        })
        .collect();
    let jobs = jobs.max(1);
    let mut outcomes: Vec<ScenarioOutcome> = if jobs == 1 || configs.len() <= 1 {
        configs
            .iter()
            .enumerate()
            .map(|(i, c)| run_scenario(i, c, mode))
            .collect::<Result<_>>()?
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..jobs {
                let configs = &configs;
                handles.push(scope.spawn(move || {
                    let mut out = Vec::new();
                    for (i, c) in configs.iter().enumerate().skip(w).step_by(jobs) {
                        out.push(run_scenario(i, c, mode).map(|o| (i, o)));
                    }
                    out
                }));
            }
            let mut collected = Vec::new();
            for h in handles {
                for item in h.join().expect("worker panicked") {
                    collected.push(item?);
                }
            }
            collected.sort_by_key(|(i, _)| *i);
            Ok::<_, Error>(collected.into_iter().map(|(_, o)| o).collect())
        })?
    };
    outcomes.sort_by_key(|o| o.index);
    Ok(Report::new(outcomes))
}

/// Norming-functional construction driven by a scenario config: samples are
/// `num_functionals` seeded Gaussian vectors, probed with 100 more.
pub fn run_norming(cfg: &ScenarioConfig) -> Result<String> {
    let (x, _) = cfg.build_spaces()?;
    let mut rng = Xoshiro256::new(cfg.seed);
    let samples: Vec<Vec<f64>> = (0..cfg.num_functionals)
        .map(|_| rng.normal_vec(cfg.dim))
        .collect();
    let mut out = String::new();
    for s in 0..=x.s_max() {
        let nc = norming_frame(&x, &samples, s)?;
        let worst_sample = nc
            .sample_ratios
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let mut min_cov = f64::INFINITY;
        let mut max_cov = 0.0f64;
        for _ in 0..100 {
            let p = rng.normal_vec(cfg.dim);
            let c = nc.coverage(&p)?;
            min_cov = min_cov.min(c);
            max_cov = max_cov.max(c);
        }
        out.push_str(&format!(
            "grade {s}: samples={} worst_sample_ratio={:.12} probe_coverage=[{:.12}, {:.12}]\n",
            samples.len(),
            worst_sample,
            min_cov,
            max_cov
        ));
    }
    Ok(out)
}

/// Oracle agreement suite: primary-path frame bounds and exact-mode
/// constants against grid suprema in dims 2 and 3.
pub fn selftest() -> Result<(String, bool)> {
    let mut out = String::new();
    let mut all_ok = true;
    // dir = +1: oracle is a sup estimate (never above primary);
    // dir = -1: oracle is an inf estimate (never below primary).
    let mut check = |name: &str, primary: f64, oracle: f64, tol: f64, dir: f64| {
        let one_sided = dir * (primary - oracle) >= -1e-9;
        let ok = (primary - oracle).abs() <= tol && one_sided;
        if !ok {
            all_ok = false;
        }
        format!(
            "{}: {name}: primary={primary:.9} oracle={oracle:.9} |diff|={:.2e}\n",
            if ok { "PASS" } else { "FAIL" },
            (primary - oracle).abs()
        )
    };

    for dim in [2usize, 3] {
        let grades = 1usize;
        let x = GradedSpace::polynomial(dim, grades, 1);
        let theta_unit = GradedSpace::<f64>::unit(dim + 1, grades);
        let mut rng = Xoshiro256::new(0xF00D + dim as u64);
        let g = Matrix::from_fn(dim + 1, dim, |_, _| rng.next_normal());
        let frame = FrameFamily::new(g.clone(), x.clone(), theta_unit.clone())?;
        let bounds = frame.frame_bounds()?;
        for s in 0..=grades {
            let (a_grid, b_grid) = refine_until(
                |res| grid_frame_bounds(&frame, s, &GridSphere::new(dim, res)?).map(|p| p.0),
                if dim == 2 { 500 } else { 100 },
                1e-4,
                4,
            )
            .and_then(|a| {
                refine_until(
                    |res| {
                        grid_frame_bounds(&frame, s, &GridSphere::new(dim, res)?).map(|p| p.1)
                    },
                    if dim == 2 { 500 } else { 100 },
                    1e-4,
                    4,
                )
                .map(|b| (a, b))
            })?;
            out.push_str(&check(
                &format!("dim {dim} grade {s} lower frame bound"),
                bounds.a[s],
                a_grid,
                1e-3,
                -1.0,
            ));
            out.push_str(&check(
                &format!("dim {dim} grade {s} upper frame bound"),
                bounds.b[s],
                b_grid,
                1e-3,
                1.0,
            ));
        }

        // exact-mode constant: operator norm of a perturbation difference
        let noise = Matrix::from_fn(dim + 1, dim, |_, _| rng.next_normal());
        let diff = noise.scale(0.1 / noise.op_norm_euclid());
        for s in 0..=grades {
            let primary =
                crate::graded::op_norm(&diff, &x, s, false, &theta_unit, s, false)?;
            let x2 = x.clone();
            let theta2 = theta_unit.clone();
            let diff2 = diff.clone();
            let oracle = refine_until(
                |res| {
                    let sphere = GridSphere::new(dim, res)?;
                    grid_sup_ratio(
                        &|p: &[f64]| theta2.norm(&diff2.mul_vec(p).unwrap(), s).unwrap(),
                        &|p: &[f64]| x2.norm(p, s).unwrap(),
                        &sphere,
                    )
                },
                if dim == 2 { 500 } else { 100 },
                1e-4,
                4,
            )?;
            out.push_str(&check(
                &format!("dim {dim} grade {s} exact perturbation constant"),
                primary,
                oracle,
                1e-3,
                1.0,
            ));
        }
    }
    Ok((out, all_ok))
}
