//! Separability certificates built from non-negative product-projector
//! weights plus a non-negative diagonal remainder.

use serde::{Deserialize, Serialize};

use crate::algebra::{binom2, PermutationZd, RootsOfUnity};
use crate::analysis::ppt::{positivity_blocks, ppt_blocks, ppt_full, PptReport, EIG_TOL};
use crate::analysis::structural::{
    assemble, from_identity_frame, identity_frame, require_prime, structural_coefficients,
};
use crate::density::{product_entry_density, DensityMatrix, ProductEntrySpec};
use crate::matrix::{self, CMatrix};
use crate::weyl::spin_coefficients;
use crate::{Error, Result};

/// Tolerance for comparing the diagonal against the identity mass.
pub const DIAG_TOL: f64 = 1e-12;
/// Weights in `[-WEIGHT_CLAMP, 0]` are clamped to zero.
pub const WEIGHT_CLAMP: f64 = 1e-12;
pub const RECON_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eig: f64,
    pub recon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig: EIG_TOL,
            recon: RECON_TOL,
        }
    }
}

/// `weight · P_{a1,1}(m1) ⊗ P_{a2,1}(m2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub weight: f64,
    pub a1: usize,
    pub m1: usize,
    pub a2: usize,
    pub m2: usize,
}

/// `ρ = Σ terms + diag(remainder)` with every weight and remainder entry
/// non-negative. When `left_relabel = Some(σ)` the left projector of each
/// term is relabeled, `P(σ)_{σ(u),σ(v)} = P_{u,v}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub d: usize,
    pub terms: Vec<CertificateTerm>,
    /// Identity mass absorbed into the terms.
    pub identity_weight: f64,
    /// `ρ_D - identity_weight`, flat order of the input.
    pub remainder: Vec<f64>,
    /// `max |reassembled - ρ|`.
    pub residual: f64,
    pub left_relabel: Option<PermutationZd>,
}

impl SeparabilityCertificate {
    pub fn reassemble(&self) -> CMatrix {
        let d = self.d;
        let mut w = vec![0.0; d * d * d * d];
        for t in &self.terms {
            w[((t.a1 * d + t.a2) * d + t.m1) * d + t.m2] += t.weight;
        }
        let frame = assemble(d, |a1, a2, m1, m2| w[((a1 * d + a2) * d + m1) * d + m2]);
        let mut out = match &self.left_relabel {
            Some(sigma) => from_identity_frame(&frame, &sigma.invert()),
            None => frame,
        };
        for (i, v) in self.remainder.iter().enumerate() {
            out[(i, i)] += matrix::real(*v);
        }
        out
    }

    pub fn min_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).fold(f64::INFINITY, f64::min)
    }

    pub fn min_remainder(&self) -> f64 {
        self.remainder.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Separable(Box<SeparabilityCertificate>),
    /// PPT fails on the reported classes.
    Entangled(PptReport),
    /// PPT holds but the identity mass exceeds the smallest diagonal entry
    /// by `shortfall`. `None` fields mean no certificate was attempted.
    Inconclusive {
        shortfall: Option<f64>,
        mu_sum: Option<f64>,
        min_diag: f64,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Separable(_) => "separable",
            Verdict::Entangled(_) => "entangled",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, Verdict::Separable(_))
    }

    pub fn certificate(&self) -> Option<&SeparabilityCertificate> {
        match self {
            Verdict::Separable(c) => Some(c),
            _ => None,
        }
    }
}

/// Positivity then PPT, shared by every certificate route. `Ok(Some(_))`
/// is an early Entangled verdict.
fn screen(rho: &DensityMatrix, tol: &Tolerances) -> Result<Option<Verdict>> {
    let pos = positivity_blocks(rho, tol.eig)?;
    if let Some(class) = pos.witness {
        return Err(Error::NotPositive {
            class,
            min_eig: pos.min_eigs[class],
        });
    }
    let ppt = ppt_blocks(rho, tol.eig)?;
    if !ppt.passed {
        return Ok(Some(Verdict::Entangled(ppt)));
    }
    Ok(None)
}

/// Turns dense frame weights (`(a1,a2,m1,m2)` row-major) into a checked
/// certificate for `rho`.
fn finish(
    rho: &DensityMatrix,
    weights: &[f64],
    identity_weight: f64,
    left_relabel: Option<PermutationZd>,
    tol: &Tolerances,
) -> Result<SeparabilityCertificate> {
    let d = rho.dim();
    let mut terms = Vec::new();
    for a1 in 0..d {
        for a2 in 0..d {
            for m1 in 0..d {
                for m2 in 0..d {
                    let mut w = weights[((a1 * d + a2) * d + m1) * d + m2];
                    if w < -WEIGHT_CLAMP {
                        return Err(Error::Numerical(format!(
                            "negative weight {w} at ({a1},{m1}),({a2},{m2})"
                        )));
                    }
                    if w <= 0.0 {
                        w = 0.0;
                    }
                    if w > 0.0 {
                        terms.push(CertificateTerm {
                            weight: w,
                            a1,
                            m1,
                            a2,
                            m2,
                        });
                    }
                }
            }
        }
    }
    let remainder = rho
        .diagonal()
        .iter()
        .map(|v| {
            let r = v - identity_weight;
            if (-DIAG_TOL..0.0).contains(&r) {
                0.0
            } else {
                r
            }
        })
        .collect();
    let mut cert = SeparabilityCertificate {
        d,
        terms,
        identity_weight,
        remainder,
        residual: 0.0,
        left_relabel,
    };
    cert.residual = matrix::max_abs_diff(&cert.reassemble(), rho.matrix());
    if !(cert.residual < tol.recon) {
        return Err(Error::Numerical(format!(
            "certificate reconstruction residual {} exceeds {}",
            cert.residual, tol.recon
        )));
    }
    Ok(cert)
}

pub fn certify(rho: &DensityMatrix) -> Result<Verdict> {
    certify_with(rho, &Tolerances::default())
}

/// Generic certificate: shift each slope pair by `μ_a`, absorb `Σ μ_a` into
/// the identity and keep the rest of `ρ_D` as a diagonal remainder.
pub fn certify_with(rho: &DensityMatrix, tol: &Tolerances) -> Result<Verdict> {
    require_prime(rho.dim())?;
    if let Some(v) = screen(rho, tol)? {
        return Ok(v);
    }
    let sc = structural_coefficients(rho)?;
    let mu_sum = sc.mu_sum();
    let min_diag = rho.min_diagonal();
    if min_diag < mu_sum - DIAG_TOL {
        return Ok(Verdict::Inconclusive {
            shortfall: Some(mu_sum - min_diag),
            mu_sum: Some(mu_sum),
            min_diag,
        });
    }
    let d = rho.dim();
    let mut weights = vec![0.0; d * d * d * d];
    for a1 in 0..d {
        for a2 in 0..d {
            let mu = sc.mu(a1, a2);
            for m1 in 0..d {
                for m2 in 0..d {
                    weights[((a1 * d + a2) * d + m1) * d + m2] = sc.get(a1, a2, m1, m2) + mu;
                }
            }
        }
    }
    let cert = finish(rho, &weights, mu_sum, sc.relabel.clone(), tol)?;
    Ok(Verdict::Separable(Box::new(cert)))
}

/// `(1-t) I/d² + t ρ`, then [`certify`].
pub fn certify_mixture(rho: &DensityMatrix, t: f64) -> Result<Verdict> {
    certify(&crate::density::mix_with_identity(rho, t)?)
}

/// `Σ |s_{u,v}| ≤ 2` on the spin coefficients; returns the verdict and the sum.
pub fn spin_l1_condition(rho: &DensityMatrix) -> (bool, f64) {
    let l1 = spin_coefficients(rho).l1_norm();
    (l1 <= 2.0 + 1e-12, l1)
}

fn require_odd_prime(d: usize) -> Result<()> {
    require_prime(d)?;
    if d == 2 {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "needs an odd prime",
        });
    }
    Ok(())
}

/// Identity mass of the class-constant certificate:
/// `Σ_{c_r ≥ 0} c_r + (d-1) Σ_{c_r < 0} |c_r|`.
pub fn general_cr_mass(c: &[f64]) -> f64 {
    let d = c.len() as f64;
    c.iter()
        .map(|&v| if v >= 0.0 { v } else { -v * (d - 1.0) })
        .sum()
}

/// Certificate for densities whose off-diagonal entries depend only on
/// the class: `ρ_{n(n+r),(n+k)(n+r+k)} = c_r` for `k ≠ 0`. Weights sit on
/// slope pairs `(a, -a)`: `c_r` where `m1 + m2 = r·a` for `c_r ≥ 0`, and
/// `|c_r|` where `m1 + m2 ≠ r·a` for `c_r < 0`.
pub fn certify_general_cr(rho: &DensityMatrix, c: &[f64]) -> Result<Verdict> {
    let d = rho.dim();
    require_odd_prime(d)?;
    if c.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: c.len(),
        });
    }
    let (m, relabel) = identity_frame(rho)?;
    if relabel.is_some() {
        return Err(Error::InvalidArgument(
            "class-constant entries need the identity pattern".into(),
        ));
    }
    for (r, &cr) in c.iter().enumerate() {
        for n in 0..d {
            for k in 1..d {
                let v = m[(n * d + (n + r) % d, ((n + k) % d) * d + (n + r + k) % d)];
                if (v - matrix::real(cr)).norm() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "entry for n = {n}, r = {r}, k = {k} is {v}, expected c_r = {cr}"
                    )));
                }
            }
        }
    }
    let tol = Tolerances::default();
    if let Some(v) = screen(rho, &tol)? {
        return Ok(v);
    }
    let mass = general_cr_mass(c);
    let min_diag = rho.min_diagonal();
    if min_diag < mass - DIAG_TOL {
        return Ok(Verdict::Inconclusive {
            shortfall: Some(mass - min_diag),
            mu_sum: Some(mass),
            min_diag,
        });
    }
    let mut weights = vec![0.0; d * d * d * d];
    for a1 in 0..d {
        let a2 = (d - a1) % d;
        for (r, &cr) in c.iter().enumerate() {
            if cr == 0.0 {
                continue;
            }
            let target = (r * a1) % d;
            for m1 in 0..d {
                for m2 in 0..d {
                    let on = (m1 + m2) % d == target;
                    let w = if cr > 0.0 && on {
                        cr
                    } else if cr < 0.0 && !on {
                        -cr
                    } else {
                        continue;
                    };
                    weights[((a1 * d + a2) * d + m1) * d + m2] += w;
                }
            }
        }
    }
    let cert = finish(rho, &weights, mass, None, &tol)?;
    Ok(Verdict::Separable(Box::new(cert)))
}

/// `Ã(r, b, t) = |(1/d) Σ_n x(n,r) η^{C(n,2) b + n t}|²`.
pub fn product_entry_weight(spec: &ProductEntrySpec, r: usize, b: usize, t: usize) -> f64 {
    let d = spec.d;
    let eta = RootsOfUnity::new(d).expect("validated dimension");
    let sum: crate::Complex64 = (0..d)
        .map(|n| spec.x(n, r) * eta.pow(binom2(n as i64) * b as i64 + (n * t) as i64))
        .sum();
    (sum / d as f64).norm_sqr()
}

/// Largest `t` with `(1-t) I/d² + t ρ` certified by the product-entry
/// route: `1 / (1 + d² (Σ|x|² - min ρ_D))`, capped at one.
pub fn product_entry_mixing_bound(spec: &ProductEntrySpec) -> f64 {
    let excess = spec.x_mass() - spec.min_diagonal();
    if excess <= 0.0 {
        1.0
    } else {
        1.0 / (1.0 + (spec.d * spec.d) as f64 * excess)
    }
}

/// Certificate for product off-diagonals `x(n,r)·conj(x(n+k,r))`: label
/// `(a1,m1),(a2,m2)` carries `Σ_r Ã(r, a1+a2, m1+m2+r·a2)`, the identity
/// mass is `Σ|x|²`.
pub fn certify_product_entry(spec: &ProductEntrySpec) -> Result<Verdict> {
    require_odd_prime(spec.d)?;
    let rho = product_entry_density(spec)?;
    let tol = Tolerances::default();
    if let Some(v) = screen(&rho, &tol)? {
        return Ok(v);
    }
    let d = spec.d;
    let mass = spec.x_mass();
    let min_diag = rho.min_diagonal();
    if min_diag < mass - DIAG_TOL {
        return Ok(Verdict::Inconclusive {
            shortfall: Some(mass - min_diag),
            mu_sum: Some(mass),
            min_diag,
        });
    }
    // Ã(r, b, t) for all r, b, t
    let mut a_tilde = vec![0.0; d * d * d];
    for r in 0..d {
        for b in 0..d {
            for t in 0..d {
                a_tilde[(r * d + b) * d + t] = product_entry_weight(spec, r, b, t);
            }
        }
    }
    let mut weights = vec![0.0; d * d * d * d];
    for a1 in 0..d {
        for a2 in 0..d {
            let b = (a1 + a2) % d;
            for m1 in 0..d {
                for m2 in 0..d {
                    weights[((a1 * d + a2) * d + m1) * d + m2] = (0..d)
                        .map(|r| a_tilde[(r * d + b) * d + (m1 + m2 + r * a2) % d])
                        .sum();
                }
            }
        }
    }
    let cert = finish(&rho, &weights, mass, None, &tol)?;
    Ok(Verdict::Separable(Box::new(cert)))
}

/// Everything the analysis pipeline reports about one density.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub d: usize,
    pub verdict: Verdict,
    pub l1_sum: f64,
    pub l1_condition: bool,
    pub mu_sum: Option<f64>,
    pub min_diag: f64,
    pub positivity_min_eigs: Vec<f64>,
    pub ppt: PptReport,
    /// Minimum eigenvalue of the full partial transpose.
    pub ppt_full_min: f64,
    pub ppt_full_passed: bool,
}

/// PPT (blocks and full oracle), spin ℓ1 sum and, for prime `d`, the
/// generic certificate.
pub fn analyze(rho: &DensityMatrix, tol: &Tolerances) -> Result<AnalysisReport> {
    let d = rho.dim();
    let pos = positivity_blocks(rho, tol.eig)?;
    if let Some(class) = pos.witness {
        return Err(Error::NotPositive {
            class,
            min_eig: pos.min_eigs[class],
        });
    }
    let ppt = ppt_blocks(rho, tol.eig)?;
    let (ppt_full_passed, ppt_full_min) = ppt_full(rho.matrix(), d, tol.eig)?;
    let (l1_condition, l1_sum) = spin_l1_condition(rho);
    let min_diag = rho.min_diagonal();
    let verdict = if crate::algebra::is_prime(d) {
        certify_with(rho, tol)?
    } else if ppt.passed {
        Verdict::Inconclusive {
            shortfall: None,
            mu_sum: None,
            min_diag,
        }
    } else {
        Verdict::Entangled(ppt.clone())
    };
    let mu_sum = match &verdict {
        Verdict::Separable(c) => Some(c.identity_weight),
        Verdict::Inconclusive { mu_sum, .. } => *mu_sum,
        Verdict::Entangled(_) => None,
    };
    Ok(AnalysisReport {
        d,
        verdict,
        l1_sum,
        l1_condition,
        mu_sum,
        min_diag,
        positivity_min_eigs: pos.min_eigs,
        ppt,
        ppt_full_min,
        ppt_full_passed,
    })
}
