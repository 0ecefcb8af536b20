//! Positivity and PPT on index-class blocks, with the full-matrix oracle.

use serde::{Deserialize, Serialize};

use crate::algebra::PermutationZd;
use crate::analysis::eigen::{eigenvalues, is_psd};
use crate::density::{check_support, to_class_blocks, DensityMatrix};
use crate::matrix::CMatrix;
use crate::{Error, Result};

/// Default eigenvalue tolerance for PSD verdicts.
pub const EIG_TOL: f64 = 1e-9;

/// Partial transpose on the second factor:
/// `((j1,j2),(k1,k2)) ↦ ((j1,k2),(k1,j2))`.
pub fn partial_transpose(rho: &CMatrix, d: usize) -> Result<CMatrix> {
    let n = d * d;
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rho.nrows(),
        });
    }
    Ok(CMatrix::from_fn(n, n, |r, s| {
        let (j1, j2) = (r / d, r % d);
        let (k1, k2) = (s / d, s % d);
        rho[(j1 * d + k2, k1 * d + j2)]
    }))
}

/// Per-class minimum eigenvalues and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub min_eigs: Vec<f64>,
    pub passed: bool,
    /// First class whose block is not PSD.
    pub witness: Option<usize>,
}

impl BlockReport {
    fn from_minima(min_eigs: Vec<f64>, tol: f64) -> Self {
        let witness = min_eigs.iter().position(|&m| m < -tol);
        Self {
            passed: witness.is_none(),
            witness,
            min_eigs,
        }
    }

    pub fn min(&self) -> f64 {
        self.min_eigs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub type PptReport = BlockReport;

fn pattern_of(rho: &DensityMatrix) -> Result<PermutationZd> {
    match rho.permutation() {
        Some(p) => Ok(p.clone()),
        None => {
            let p = PermutationZd::identity(rho.dim())?;
            check_support(rho.matrix(), &p)?;
            Ok(p)
        }
    }
}

/// The `d × d` restriction of `ρ^Γ` to the class `y`: entry `(j,k)` is
/// `ρ_{j (y-p(k)), k (y-p(j))}`.
pub fn ppt_block(rho: &CMatrix, p: &PermutationZd, y: usize) -> CMatrix {
    let d = p.dim();
    let sub = |a: usize, b: usize| (a + d - b % d) % d;
    CMatrix::from_fn(d, d, |j, k| {
        rho[(d * j + sub(y, p.apply(k)), d * k + sub(y, p.apply(j)))]
    })
}

/// PPT through the `d` blocks of the partial transpose. A density without
/// a recorded pattern is checked against the identity pattern.
pub fn ppt_blocks(rho: &DensityMatrix, tol: f64) -> Result<PptReport> {
    let p = pattern_of(rho)?;
    ppt_blocks_for(rho.matrix(), &p, tol)
}

pub fn ppt_blocks_for(m: &CMatrix, p: &PermutationZd, tol: f64) -> Result<PptReport> {
    check_support(m, p)?;
    let mins = (0..p.dim())
        .map(|y| is_psd(&ppt_block(m, p, y), tol).map(|(_, min)| min))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockReport::from_minima(mins, tol))
}

/// Positivity through the `d` class blocks `A_x`.
pub fn positivity_blocks(rho: &DensityMatrix, tol: f64) -> Result<BlockReport> {
    let p = pattern_of(rho)?;
    positivity_blocks_for(rho.matrix(), &p, tol)
}

pub fn positivity_blocks_for(m: &CMatrix, p: &PermutationZd, tol: f64) -> Result<BlockReport> {
    check_support(m, p)?;
    let mins = to_class_blocks(m, p)
        .blocks
        .iter()
        .map(|a| is_psd(a, tol).map(|(_, min)| min))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockReport::from_minima(mins, tol))
}

/// Full-matrix oracle: `(PSD of ρ^Γ, min eigenvalue of ρ^Γ)`.
pub fn ppt_full(rho: &CMatrix, d: usize, tol: f64) -> Result<(bool, f64)> {
    is_psd(&partial_transpose(rho, d)?, tol)
}

/// Full spectrum of `ρ^Γ`, ascending.
pub fn partial_transpose_spectrum(rho: &CMatrix, d: usize) -> Result<Vec<f64>> {
    eigenvalues(&partial_transpose(rho, d)?)
}
