//! Report assembly and emission (aligned text and CSV).

use serde::Serialize;

use crate::frame::FrameBounds;
use crate::perturb::{Certificate, ConstantsMode};

/// One scenario's results. `wall_time_ms` is kept for the JSON-side record
/// but never emitted into text/CSV, which must be deterministic.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub index: usize,
    pub config_echo: serde_json::Value,
    pub bounds_original: FrameBounds<f64>,
    pub bounds_perturbed: Option<FrameBounds<f64>>,
    pub certificates: Vec<Certificate<f64>>,
    /// Certifier-level failures that indicate a broken guarantee
    /// (SingularL / SingularSV / NotLeftInverse under a satisfied hypothesis).
    pub failures: Vec<String>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub scenarios: usize,
    pub certificates: usize,
    pub grades_checked: usize,
    pub hypothesis_ok: usize,
    pub hypothesis_failed: usize,
    pub sound: usize,
    pub exact_violations: usize,
    pub estimated_violations: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenarios: Vec<ScenarioOutcome>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scenarios: Vec<ScenarioOutcome>) -> Self {
        let mut summary = Summary {
            scenarios: scenarios.len(),
            ..Summary::default()
        };
        for sc in &scenarios {
            summary.failures += sc.failures.len();
            for cert in &sc.certificates {
                summary.certificates += 1;
                for s in 0..cert.grades() {
                    summary.grades_checked += 1;
                    if cert.hypothesis_ok[s] {
                        summary.hypothesis_ok += 1;
                    } else {
                        summary.hypothesis_failed += 1;
                    }
                    match cert.sound[s] {
                        Some(true) => summary.sound += 1,
                        Some(false) => match cert.constants_mode {
                            ConstantsMode::Exact => summary.exact_violations += 1,
                            ConstantsMode::Estimated => summary.estimated_violations += 1,
                        },
                        None => {}
                    }
                }
            }
        }
        Report { scenarios, summary }
    }

    /// Exit-code contract: 0 clean, 2 on any exact-mode soundness violation
    /// or broken reconstruction guarantee.
    pub fn exit_code(&self) -> i32 {
        if self.summary.exact_violations > 0 || self.summary.failures > 0 {
            2
        } else {
            0
        }
    }
}

/// >= 17 significant digits, locale-independent.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.17e}")
}

pub const CSV_HEADER: &str = "scenario_id,theorem,grade,hypothesis_ok,mode,constant_names,constant_values,predicted_lower,predicted_upper,measured_A,measured_B,sound";

pub fn emit_csv(report: &Report) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for sc in &report.scenarios {
        for cert in &sc.certificates {
            for s in 0..cert.grades() {
                let names: Vec<&str> =
                    cert.constants[s].keys().map(String::as_str).collect();
                let values: Vec<String> =
                    cert.constants[s].values().map(|&v| fmt_real(v)).collect();
                let mode = match cert.constants_mode {
                    ConstantsMode::Exact => "exact",
                    ConstantsMode::Estimated => "estimated",
                };
                let sound = match cert.sound[s] {
                    Some(true) => "true",
                    Some(false) => "false",
                    None => "undefined",
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    sc.index,
                    cert.theorem.name(),
                    s,
                    cert.hypothesis_ok[s],
                    mode,
                    names.join(";"),
                    values.join(";"),
                    fmt_real(cert.predicted[s].lower),
                    fmt_real(cert.predicted[s].upper),
                    fmt_real(cert.measured[s].a),
                    fmt_real(cert.measured[s].b),
                    sound,
                ));
            }
        }
    }
    out
}

fn bounds_lines(label: &str, b: &FrameBounds<f64>, out: &mut String) {
    out.push_str(&format!("  {label} bounds:\n"));
    for s in 0..b.a.len() {
        out.push_str(&format!(
            "    grade {s}: A = {:<24} B = {}\n",
            fmt_real(b.a[s]),
            fmt_real(b.b[s])
        ));
    }
}

pub fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    for sc in &report.scenarios {
        out.push_str(&format!("scenario {}\n", sc.index));
        bounds_lines("original", &sc.bounds_original, &mut out);
        if let Some(b) = &sc.bounds_perturbed {
            bounds_lines("perturbed", &b.clone(), &mut out);
        }
        for cert in &sc.certificates {
            let mode = match cert.constants_mode {
                ConstantsMode::Exact => "exact",
                ConstantsMode::Estimated => "estimated",
            };
            out.push_str(&format!("  theorem {} [{mode}]\n", cert.theorem.name()));
            out.push_str(
                "    grade  hyp    sound      predicted_lower           predicted_upper           measured_A                measured_B\n",
            );
            for s in 0..cert.grades() {
                let sound = match cert.sound[s] {
                    Some(true) => "true",
                    Some(false) => "FALSE",
                    None => "-",
                };
                out.push_str(&format!(
                    "    {:<6} {:<6} {:<10} {:<25} {:<25} {:<25} {}\n",
                    s,
                    cert.hypothesis_ok[s],
                    sound,
                    fmt_real(cert.predicted[s].lower),
                    fmt_real(cert.predicted[s].upper),
                    fmt_real(cert.measured[s].a),
                    fmt_real(cert.measured[s].b),
                ));
                let consts: Vec<String> = cert.constants[s]
                    .iter()
                    .map(|(k, v)| format!("{k}={}", fmt_real(*v)))
                    .collect();
                if !consts.is_empty() {
                    out.push_str(&format!("           constants: {}\n", consts.join(" ")));
                }
            }
        }
        for fail in &sc.failures {
            out.push_str(&format!("  FAILURE: {fail}\n"));
        }
    }
    let s = &report.summary;
    out.push_str(&format!(
        "summary: scenarios={} certificates={} grades={} hypothesis_ok={} hypothesis_failed={} sound={} exact_violations={} estimated_violations={} failures={}\n",
        s.scenarios,
        s.certificates,
        s.grades_checked,
        s.hypothesis_ok,
        s.hypothesis_failed,
        s.sound,
        s.exact_violations,
        s.estimated_violations,
        s.failures,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new(vec![]);
        assert_eq!(emit_csv(&r), format!("{CSV_HEADER}\n"));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn real_formatting_round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 1e-300, -4.0, 0.0] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
