//! One-parameter families, grid scans and edge bisection for the
//! certificate and PPT regions.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::certify::{certify_with, Tolerances, Verdict};
use crate::analysis::eigen::is_psd;
use crate::analysis::ppt::ppt_blocks;
use crate::density::{
    bhn_density, bhn_line_state, bhn_two_projector, divincenzo, horodecki_alpha, isotropic,
    mix_with_identity, werner, DensityMatrix, LineSpec,
};
use crate::{Error, Result};

type Builder = dyn Fn(f64) -> Result<DensityMatrix> + Send + Sync;

/// A density-valued function of one real parameter.
#[derive(Clone)]
pub struct Family {
    pub name: String,
    /// The builder returns the partial transpose of the physical state, so
    /// PPT of the state is positivity of the built matrix.
    pub pt_form: bool,
    /// Default scan range.
    pub range: (f64, f64),
    build: Arc<Builder>,
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Family")
            .field("name", &self.name)
            .field("pt_form", &self.pt_form)
            .field("range", &self.range)
            .finish()
    }
}

impl Family {
    pub fn new(
        name: impl Into<String>,
        pt_form: bool,
        range: (f64, f64),
        build: impl Fn(f64) -> Result<DensityMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            pt_form,
            range,
            build: Arc::new(build),
        }
    }

    pub fn build(&self, x: f64) -> Result<DensityMatrix> {
        (self.build)(x)
    }

    /// Isotropic state over `λ`.
    pub fn isotropic(d: usize) -> Self {
        Self::new(format!("isotropic(d={d})"), false, (0.0, 1.0), move |x| isotropic(d, x))
    }

    /// Werner state over `p`, built in partial-transpose form.
    pub fn werner(d: usize) -> Self {
        Self::new(format!("werner(d={d})"), true, (0.0, 1.0), move |x| werner(d, x))
    }

    /// Horodecki 3⊗3 state over `α`.
    pub fn horodecki() -> Self {
        Self::new("horodecki", false, (0.0, 5.0), horodecki_alpha)
    }

    /// DiVincenzo family over `b` at fixed `c`, partial-transpose form.
    pub fn divincenzo_b(d: usize, c: f64) -> Self {
        Self::new(format!("divincenzo(d={d},c={c})"), true, (0.0, 1.0), move |b| {
            divincenzo(d, b, c)
        })
    }

    /// `(1-t) I/d² + t ρ_line` over `t`.
    pub fn bhn_line_mixture(d: usize, line: LineSpec) -> Self {
        Self::new(format!("bhn-line(d={d},{line:?})"), false, (0.0, 1.0), move |t| {
            mix_with_identity(&bhn_line_state(d, line)?, t)
        })
    }

    /// `(1-t) I/d² + t Σ c_{j,r} P̃_{j,r}` over `t`.
    pub fn bhn_mixture(d: usize, c: Vec<f64>) -> Self {
        Self::new(format!("bhn-mixture(d={d})"), false, (0.0, 1.0), move |t| {
            mix_with_identity(&bhn_density(d, &c)?, t)
        })
    }

    /// Two-projector state along `β = κ α`, parameterised by `t = α + β`.
    pub fn two_projector_ray(kappa: f64) -> Self {
        Self::new(format!("two-projector(kappa={kappa})"), false, (0.0, 1.0), move |t| {
            let alpha = t / (1.0 + kappa);
            bhn_two_projector(alpha, t - alpha)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Separable,
    Inconclusive,
    Entangled,
    /// Outside the family's domain or not a density.
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub status: PointStatus,
    pub ppt: bool,
}

/// Verdict and PPT of the physical state at one parameter value.
pub fn evaluate(family: &Family, x: f64, tol: &Tolerances) -> Result<ScanPoint> {
    let rho = match family.build(x) {
        Ok(r) => r,
        Err(Error::InvalidArgument(_)) | Err(Error::NotPositive { .. }) => {
            return Ok(ScanPoint {
                x,
                status: PointStatus::Invalid,
                ppt: false,
            })
        }
        Err(e) => return Err(e),
    };
    let ppt = if family.pt_form {
        is_psd(rho.matrix(), tol.eig)?.0
    } else {
        ppt_blocks(&rho, tol.eig)?.passed
    };
    let status = match certify_with(&rho, tol) {
        Ok(Verdict::Separable(_)) => PointStatus::Separable,
        Ok(Verdict::Inconclusive { .. }) => PointStatus::Inconclusive,
        Ok(Verdict::Entangled(_)) => PointStatus::Entangled,
        Err(Error::NotPositive { .. }) if family.pt_form => PointStatus::Entangled,
        Err(Error::NotPositive { .. }) => PointStatus::Invalid,
        Err(e) => return Err(e),
    };
    Ok(ScanPoint { x, status, ppt })
}

/// Shape of a success set along the scanned range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Empty,
    /// One contiguous run; interior edges bisected.
    Interval { lower: f64, upper: f64 },
    /// Several runs, reported from the scan only.
    Runs { runs: Vec<(f64, f64)> },
}

impl Region {
    pub fn upper(&self) -> Option<f64> {
        match self {
            Region::Interval { upper, .. } => Some(*upper),
            _ => None,
        }
    }

    pub fn lower(&self) -> Option<f64> {
        match self {
            Region::Interval { lower, .. } => Some(*lower),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub precision: f64,
}

impl SweepConfig {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            steps: 100,
            precision: 1e-9,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || self.steps < 1 {
            return Err(Error::InvalidArgument(format!(
                "bad sweep range [{}, {}] with {} steps",
                self.lo, self.hi, self.steps
            )));
        }
        if !(self.precision >= 1e-10) {
            return Err(Error::InvalidArgument(format!(
                "precision {} below 1e-10",
                self.precision
            )));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / self.steps as f64;
        (0..=self.steps)
            .map(|i| if i == self.steps { self.hi } else { self.lo + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: String,
    pub scan: Vec<ScanPoint>,
    pub separable: Region,
    pub ppt: Region,
}

/// Evaluates every grid point (in parallel, results in grid order).
pub fn scan(family: &Family, xs: &[f64], tol: &Tolerances) -> Result<Vec<ScanPoint>> {
    xs.par_iter().map(|&x| evaluate(family, x, tol)).collect()
}

fn bisect(
    mut inside: f64,
    mut outside: f64,
    precision: f64,
    pred: &dyn Fn(f64) -> Result<bool>,
) -> Result<f64> {
    while (outside - inside).abs() > precision {
        let mid = 0.5 * (inside + outside);
        if pred(mid)? {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}

fn region(
    pts: &[ScanPoint],
    hit: impl Fn(&ScanPoint) -> bool,
    precision: f64,
    pred: &dyn Fn(f64) -> Result<bool>,
) -> Result<Region> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        if hit(p) {
            match runs.last_mut() {
                Some((_, end)) if *end + 1 == i => *end = i,
                _ => runs.push((i, i)),
            }
        }
    }
    match runs.as_slice() {
        [] => Ok(Region::Empty),
        [(s, e)] => {
            let lower = if *s == 0 {
                pts[0].x
            } else {
                bisect(pts[*s].x, pts[s - 1].x, precision, pred)?
            };
            let upper = if *e + 1 == pts.len() {
                pts[*e].x
            } else {
                bisect(pts[*e].x, pts[e + 1].x, precision, pred)?
            };
            Ok(Region::Interval { lower, upper })
        }
        many => Ok(Region::Runs {
            runs: many.iter().map(|&(s, e)| (pts[s].x, pts[e].x)).collect(),
        }),
    }
}

/// Scans the family and bisects the edges of the certificate and PPT
/// regions when each is a single run.
pub fn sweep_threshold(family: &Family, cfg: &SweepConfig, tol: &Tolerances) -> Result<SweepResult> {
    cfg.validate()?;
    let pts = scan(family, &cfg.grid(), tol)?;
    let sep_pred = |x: f64| Ok(evaluate(family, x, tol)?.status == PointStatus::Separable);
    let ppt_pred = |x: f64| Ok(evaluate(family, x, tol)?.ppt);
    let separable = region(
        &pts,
        |p| p.status == PointStatus::Separable,
        cfg.precision,
        &sep_pred,
    )?;
    let ppt = region(&pts, |p| p.ppt, cfg.precision, &ppt_pred)?;
    Ok(SweepResult {
        family: family.name.clone(),
        scan: pts,
        separable,
        ppt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: &Family) -> SweepResult {
        let cfg = SweepConfig::new(f.range.0, f.range.1);
        sweep_threshold(f, &cfg, &Tolerances::default()).unwrap()
    }

    #[test]
    fn isotropic_boundaries() {
        let r = run(&Family::isotropic(3));
        assert!((r.separable.upper().unwrap() - 0.25).abs() < 1e-8);
        assert!((r.ppt.upper().unwrap() - 0.25).abs() < 1e-8);
        assert_eq!(r.separable.lower(), Some(0.0));
    }

    #[test]
    fn werner_boundary() {
        let r = run(&Family::werner(3));
        assert!((r.separable.upper().unwrap() - 0.5).abs() < 1e-8);
        assert!((r.ppt.upper().unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn horodecki_regions() {
        let r = run(&Family::horodecki());
        assert!((r.separable.lower().unwrap() - 2.0).abs() < 1e-8);
        assert!((r.separable.upper().unwrap() - 3.0).abs() < 1e-8);
        // the eigenvalue tolerance shifts PPT edges by a few 1e-8
        assert!((r.ppt.lower().unwrap() - 1.0).abs() < 1e-6);
        assert!((r.ppt.upper().unwrap() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn disjoint_runs_are_not_bisected() {
        let f = Family::new("two-runs", false, (0.0, 1.0), |x| {
            let lam = if (0.3..0.6).contains(&x) { 0.9 } else { 0.1 };
            isotropic(3, lam)
        });
        let r = run(&f);
        match r.separable {
            Region::Runs { runs } => assert_eq!(runs.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_config_rejected() {
        let f = Family::isotropic(3);
        let mut cfg = SweepConfig::new(1.0, 0.0);
        assert!(sweep_threshold(&f, &cfg, &Tolerances::default()).is_err());
        cfg = SweepConfig::new(0.0, 1.0);
        cfg.precision = 1e-12;
        assert!(sweep_threshold(&f, &cfg, &Tolerances::default()).is_err());
    }
}
