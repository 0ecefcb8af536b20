//! Report documents written by `analyze` and `sweep`.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use circsep::analysis::certify::{spin_l1_condition, AnalysisReport, Tolerances};
use circsep::analysis::ppt::{positivity_blocks, ppt_blocks};
use circsep::analysis::sweep::{Region, ScanPoint, SweepConfig, SweepResult};
use circsep::density::DensityMatrix;
use circsep::io::VerdictJson;
use circsep::VERSION;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub version: &'static str,
    pub input: Value,
    /// The input was built as the partial transpose of the state; PPT
    /// fields below refer to the state itself.
    pub pt_form: bool,
    #[serde(flatten)]
    pub result: VerdictJson,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl AnalyzeReport {
    pub fn new(input: Value, rep: &AnalysisReport, pt_form: bool, tol: &Tolerances) -> Self {
        let mut result = VerdictJson::from_report(rep);
        if pt_form {
            // positivity of the built matrix is PPT of the state and vice versa
            std::mem::swap(&mut result.positivity_min_eigs, &mut result.ppt_min_eigs);
            result.ppt_witness = None;
            result.ppt_blocks_passed = true;
            result.ppt_full_passed = true;
            result.ppt_full_min = result.ppt_min_eigs.iter().copied().fold(f64::INFINITY, f64::min);
        }
        let mut checks = vec![Check {
            name: "ppt_blocks_match_full",
            passed: rep.ppt.passed == rep.ppt_full_passed,
        }];
        if let Some(c) = rep.verdict.certificate() {
            checks.push(Check {
                name: "certificate_residual",
                passed: c.residual < tol.recon,
            });
            checks.push(Check {
                name: "certificate_weights_nonnegative",
                passed: c.terms.iter().all(|t| t.weight >= 0.0) && c.min_remainder() >= -1e-10,
            });
            checks.push(Check {
                name: "separable_implies_ppt",
                passed: rep.ppt.passed && rep.ppt_full_passed,
            });
        }
        Self {
            version: VERSION,
            input,
            pt_form,
            result,
            checks,
            timing: None,
        }
    }

    /// The built partial transpose has a negative eigenvalue, so the state
    /// violates PPT.
    pub fn npt_partial_transpose(
        input: Value,
        built: &DensityMatrix,
        min_eig: f64,
        tol: &Tolerances,
    ) -> circsep::Result<Self> {
        let ppt = positivity_blocks(built, tol.eig)?;
        let state_pos = ppt_blocks(built, tol.eig)?;
        let (l1_condition, l1_sum) = spin_l1_condition(built);
        let result = VerdictJson {
            verdict: "entangled".into(),
            l1_sum,
            l1_condition,
            mu_sum: None,
            min_diag: built.min_diagonal(),
            shortfall: None,
            positivity_min_eigs: state_pos.min_eigs,
            ppt_min_eigs: ppt.min_eigs.clone(),
            ppt_witness: ppt.witness,
            ppt_blocks_passed: ppt.passed,
            ppt_full_passed: false,
            ppt_full_min: min_eig,
            certificate: None,
        };
        Ok(Self {
            version: VERSION,
            input,
            pt_form: true,
            checks: vec![Check {
                name: "ppt_blocks_match_full",
                passed: !ppt.passed,
            }],
            result,
            timing: None,
        })
    }

    pub fn with_timing(mut self, t: Duration) -> Self {
        self.timing = Some(Timing {
            elapsed_ms: t.as_secs_f64() * 1e3,
        });
        self
    }

    pub fn to_text(&self, color: bool) -> String {
        let r = &self.result;
        let paint = |s: &str, code: &str| {
            if color {
                format!("\x1b[{code}m{s}\x1b[0m")
            } else {
                s.to_string()
            }
        };
        let verdict = match r.verdict.as_str() {
            "separable" => paint("separable", "32"),
            "entangled" => paint("entangled", "31"),
            other => paint(other, "33"),
        };
        let mut out = String::new();
        let _ = writeln!(out, "verdict      {verdict}");
        let _ = writeln!(
            out,
            "ppt          {} (blocks), {} (full, min eig {:.3e})",
            pass(r.ppt_blocks_passed),
            pass(r.ppt_full_passed),
            r.ppt_full_min
        );
        let _ = writeln!(out, "l1 sum       {:.12} ({})", r.l1_sum, pass(r.l1_condition));
        if let Some(mu) = r.mu_sum {
            let _ = writeln!(out, "mu sum       {mu:.12}");
        }
        let _ = writeln!(out, "min diagonal {:.12}", r.min_diag);
        if let Some(s) = r.shortfall {
            let _ = writeln!(out, "shortfall    {s:.3e}");
        }
        if let Some(c) = &r.certificate {
            let _ = writeln!(
                out,
                "certificate  {} terms, identity weight {:.12}, residual {:.3e}",
                c.terms.len(),
                c.identity_weight,
                c.residual
            );
        }
        for c in &self.checks {
            let _ = writeln!(out, "check        {} {}", c.name, pass(c.passed));
        }
        out
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Reference boundaries for the named families.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Expected {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separable_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separable_upper: Option<f64>,
    /// Only a lower bound on the certificate edge is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separable_upper_at_least: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ppt_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ppt_upper: Option<f64>,
}

pub fn expected_boundaries(family: &str, d: usize) -> Option<Expected> {
    let iso = 1.0 / (1.0 + d as f64);
    match family {
        "isotropic" => Some(Expected {
            separable_upper: Some(iso),
            ppt_upper: Some(iso),
            ..Default::default()
        }),
        "werner" => Some(Expected {
            separable_upper: Some(0.5),
            ppt_upper: Some(0.5),
            ..Default::default()
        }),
        "horodecki" => Some(Expected {
            separable_lower: Some(2.0),
            separable_upper: Some(3.0),
            ppt_lower: Some(1.0),
            ppt_upper: Some(4.0),
            ..Default::default()
        }),
        "two-projector" => Some(Expected {
            separable_upper: Some(0.25),
            ..Default::default()
        }),
        "bhn-line" => Some(Expected {
            separable_upper_at_least: Some(iso),
            ..Default::default()
        }),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub version: &'static str,
    pub family: String,
    pub config: SweepConfig,
    pub separable: Region,
    pub ppt: Region,
    pub expected: Option<Expected>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<Vec<ScanPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl SweepReport {
    pub fn new(
        result: SweepResult,
        config: SweepConfig,
        expected: Option<Expected>,
        with_scan: bool,
    ) -> Self {
        // a region that is not one run always comes with its scan
        let fragmented = !matches!(result.separable, Region::Interval { .. } | Region::Empty)
            || !matches!(result.ppt, Region::Interval { .. } | Region::Empty);
        Self {
            version: VERSION,
            family: result.family,
            config,
            separable: result.separable,
            ppt: result.ppt,
            expected,
            scan: (with_scan || fragmented).then_some(result.scan),
            timing: None,
        }
    }

    pub fn with_timing(mut self, t: Duration) -> Self {
        self.timing = Some(Timing {
            elapsed_ms: t.as_secs_f64() * 1e3,
        });
        self
    }

    pub fn to_text(&self) -> String {
        let fmt = |r: &Region| match r {
            Region::Empty => "empty".to_string(),
            Region::Interval { lower, upper } => format!("[{lower:.9}, {upper:.9}]"),
            Region::Runs { runs } => runs
                .iter()
                .map(|(a, b)| format!("[{a}, {b}]"))
                .collect::<Vec<_>>()
                .join(" "),
        };
        let mut out = String::new();
        let _ = writeln!(out, "family     {}", self.family);
        let _ = writeln!(out, "separable  {}", fmt(&self.separable));
        let _ = writeln!(out, "ppt        {}", fmt(&self.ppt));
        if let Some(scan) = &self.scan {
            for p in scan {
                let _ = writeln!(out, "{:>14.9} {:?} ppt={}", p.x, p.status, p.ppt);
            }
        }
        out
    }
}
