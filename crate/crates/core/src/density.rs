//! Circulant densities: the generic class-block builder, the named
//! example families, and the segment towards the maximally mixed state.
//!
//! Entries are addressed in tensor notation `ρ_{n1 n2, k1 k2}`, i.e. flat
//! position `(d·n1 + n2, d·k1 + k2)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{PermutationZd, RootsOfUnity};
use crate::analysis::eigen::is_psd;
use crate::geometry::support_pattern;
use crate::matrix::{self, CMatrix, ZERO};
use crate::weyl::spin_matrix;
use crate::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Entries at or below this modulus count as zero for pattern membership.
pub const SUPPORT_TOL: f64 = 1e-14;
pub const PSD_TOL: f64 = 1e-9;

/// A Hermitian, trace-one `d² × d²` matrix, optionally tied to the
/// circulant pattern `M_p` of a permutation.
///
/// Positive semidefiniteness is not an invariant: the Werner and
/// DiVincenzo constructors return partial-transpose forms that are only
/// positive inside their parameter regions.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    d: usize,
    matrix: CMatrix,
    permutation: Option<PermutationZd>,
}

impl DensityMatrix {
    pub fn new(d: usize, matrix: CMatrix, permutation: Option<PermutationZd>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let n = d * d;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let dev = matrix::hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix::trace(&matrix);
        if (tr - matrix::real(1.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        if let Some(p) = &permutation {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.dim(),
                });
            }
            check_support(&matrix, p)?;
        }
        Ok(Self {
            d,
            matrix,
            permutation,
        })
    }

    pub(crate) fn circulant(d: usize, matrix: CMatrix) -> Result<Self> {
        Self::new(d, matrix, Some(PermutationZd::identity(d)?))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn permutation(&self) -> Option<&PermutationZd> {
        self.permutation.as_ref()
    }

    /// Tensor-indexed entry `ρ_{n1 n2, k1 k2}` with indices taken mod `d`.
    pub fn entry(&self, n1: usize, n2: usize, k1: usize, k2: usize) -> Complex64 {
        let d = self.d;
        self.matrix[((n1 % d) * d + n2 % d, (k1 % d) * d + k2 % d)]
    }

    /// `ρ_D` as a vector of reals in flat order.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|v| v.re).collect()
    }

    pub fn min_diagonal(&self) -> f64 {
        self.diagonal().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// All entries above [`SUPPORT_TOL`] outside `M_p`.
pub fn support_violations(m: &CMatrix, p: &PermutationZd) -> Vec<(usize, usize)> {
    let pattern = support_pattern(p);
    let n = m.nrows();
    let mut bad = Vec::new();
    for r in 0..n {
        for s in 0..n {
            if m[(r, s)].norm() > SUPPORT_TOL && !pattern.contains(r, s) {
                bad.push((r, s));
            }
        }
    }
    bad
}

pub(crate) fn check_support(m: &CMatrix, p: &PermutationZd) -> Result<()> {
    let bad = support_violations(m, p);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::SupportViolation {
            count: bad.len(),
            positions: bad.into_iter().take(8).collect(),
        })
    }
}

/// The `d` restrictions `A_x` of a circulant matrix to its index classes:
/// `A_x[j][k]` is the entry at the class-`x` position of block `(j, k)`,
/// i.e. `ρ_{j (p(j)+x), k (p(k)+x)}`.
#[derive(Debug, Clone)]
pub struct ClassBlocks {
    pub d: usize,
    pub permutation: PermutationZd,
    pub blocks: Vec<CMatrix>,
}

pub fn to_class_blocks(m: &CMatrix, p: &PermutationZd) -> ClassBlocks {
    let d = p.dim();
    let blocks = (0..d)
        .map(|x| {
            CMatrix::from_fn(d, d, |j, k| {
                m[(d * j + (p.apply(j) + x) % d, d * k + (p.apply(k) + x) % d)]
            })
        })
        .collect();
    ClassBlocks {
        d,
        permutation: p.clone(),
        blocks,
    }
}

/// Assembles a circulant density from its class blocks. Every block must be
/// Hermitian and PSD, with total trace one.
pub fn from_class_blocks(blocks: &ClassBlocks) -> Result<DensityMatrix> {
    let d = blocks.d;
    let p = &blocks.permutation;
    if p.dim() != d || blocks.blocks.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: blocks.blocks.len(),
        });
    }
    let n = d * d;
    let mut m = matrix::zeros(n);
    for (x, a) in blocks.blocks.iter().enumerate() {
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.nrows(),
            });
        }
        let (ok, min_eig) = is_psd(a, PSD_TOL)?;
        if !ok {
            return Err(Error::NotPositive { class: x, min_eig });
        }
        for j in 0..d {
            for k in 0..d {
                m[(d * j + (p.apply(j) + x) % d, d * k + (p.apply(k) + x) % d)] = a[(j, k)];
            }
        }
    }
    DensityMatrix::new(d, m, Some(p.clone()))
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// `λ |Φ+⟩⟨Φ+| + (1-λ) I/d²`: off-diagonal `λ/d` on class 0.
pub fn isotropic(d: usize, lambda: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    unit_interval("lambda", lambda)?;
    let n = d * d;
    let mixed = (1.0 - lambda) / n as f64;
    let mut m = CMatrix::from_diagonal_element(n, n, matrix::real(mixed));
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] += matrix::real(lambda / d as f64);
        }
    }
    DensityMatrix::circulant(d, m)
}

/// `x_± = (1/d)[(1-p)/(d+1) ± p/(d-1)]`.
pub fn werner_weights(d: usize, p: f64) -> (f64, f64) {
    let d = d as f64;
    let a = (1.0 - p) / (d + 1.0);
    let b = p / (d - 1.0);
    ((a + b) / d, (a - b) / d)
}

/// Partial transpose of the Werner state: `|jj⟩⟨kk| = x_-` for `j ≠ k`,
/// `|jj⟩⟨jj| = x_- + x_+`, `|jk⟩⟨jk| = x_+` for `j ≠ k`. Positive
/// exactly for `p ≤ 1/2`.
pub fn werner(d: usize, p: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    unit_interval("p", p)?;
    let (x_plus, x_minus) = werner_weights(d, p);
    let n = d * d;
    let mut m = CMatrix::from_diagonal_element(n, n, matrix::real(x_plus));
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] += matrix::real(x_minus);
        }
    }
    DensityMatrix::circulant(d, m)
}

/// Partial transpose of the DiVincenzo et al. family: `|jj⟩⟨kk| = (c-b)/2`
/// for `j ≠ k`, `|jk⟩⟨jk| = (b+c)/2` for `j ≠ k` and
/// `|jj⟩⟨jj| = 1/d - (b+c)(d-1)/2`.
pub fn divincenzo(d: usize, b: f64, c: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let off = (b + c) / 2.0;
    let a = 1.0 / d as f64 - (b + c) * (d as f64 - 1.0) / 2.0;
    if off < 0.0 || a < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "negative diagonal: (b+c)/2 = {off}, a = {a}"
        )));
    }
    let n = d * d;
    let mut m = CMatrix::from_diagonal_element(n, n, matrix::real(off));
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] = matrix::real(if j == k { a } else { (c - b) / 2.0 });
        }
    }
    DensityMatrix::circulant(d, m)
}

/// The 3⊗3 Horodecki state `(2/7)|Φ+⟩⟨Φ+| + (α/7)σ_+ + ((5-α)/7)σ_-`:
/// class 0 carries `2/21` everywhere, the `|n, n+1⟩` diagonal `α/21` and
/// the `|n, n+2⟩` diagonal `(5-α)/21`.
pub fn horodecki_alpha(alpha: f64) -> Result<DensityMatrix> {
    if !(0.0..=5.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [0, 5]")));
    }
    let d = 3;
    let mut m = matrix::zeros(9);
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] = matrix::real(2.0 / 21.0);
        }
        m[(j * d + (j + 1) % d, j * d + (j + 1) % d)] = matrix::real(alpha / 21.0);
        m[(j * d + (j + 2) % d, j * d + (j + 2) % d)] = matrix::real((5.0 - alpha) / 21.0);
    }
    DensityMatrix::circulant(d, m)
}

/// Weights `c_{j,r}` of a BHN mixture, row-major in `(j, r)`.
fn check_weights(d: usize, c: &[f64]) -> Result<()> {
    if c.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: c.len(),
        });
    }
    if let Some(w) = c.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidArgument(format!("negative weight {w}")));
    }
    let total: f64 = c.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// `Σ c_{j,r} P̃_{j,r}` through the entry formula
/// `ρ_{n(n+r),(n+k)(n+r+k)} = (1/d) Σ_j c_{j,r} η^{-jk}`.
/// `c` is row-major in `(j, r)`.
pub fn bhn_density(d: usize, c: &[f64]) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    check_weights(d, c)?;
    let eta = RootsOfUnity::new(d)?;
    let mut m = matrix::zeros(d * d);
    for r in 0..d {
        for k in 0..d {
            let v: Complex64 = (0..d)
                .map(|j| eta.pow(-((j * k) as i64)) * c[j * d + r])
                .sum::<Complex64>()
                / d as f64;
            for n in 0..d {
                m[(n * d + (n + r) % d, ((n + k) % d) * d + (n + r + k) % d)] = v;
            }
        }
    }
    DensityMatrix::circulant(d, m)
}

/// `|Ω_{j,k}⟩ = (S_{j,k} ⊗ I) Σ_u |u⟩|u⟩`.
pub fn omega_vector(d: usize, j: usize, k: usize) -> Result<Vec<Complex64>> {
    let s = spin_matrix(d, j, k)?.matrix;
    let mut v = vec![ZERO; d * d];
    for a in 0..d {
        for u in 0..d {
            v[a * d + u] += s[(a, u)];
        }
    }
    Ok(v)
}

/// Trace-one `P̃_{j,k} = |Ω_{j,k}⟩⟨Ω_{j,k}| / d`.
pub fn bhn_projector(d: usize, j: usize, k: usize) -> Result<CMatrix> {
    let v = omega_vector(d, j, k)?;
    let n = d * d;
    Ok(CMatrix::from_fn(n, n, |r, s| v[r] * v[s].conj() / d as f64))
}

/// Same mixture as [`bhn_density`], summed from the projectors directly.
pub fn bhn_density_from_projectors(d: usize, c: &[f64]) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    check_weights(d, c)?;
    let mut m = matrix::zeros(d * d);
    for j in 0..d {
        for r in 0..d {
            let w = c[j * d + r];
            if w != 0.0 {
                m += bhn_projector(d, j, r)? * matrix::real(w);
            }
        }
    }
    DensityMatrix::circulant(d, m)
}

/// A line in the `(j, r)` index set of BHN weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineSpec {
    /// `r = s·j + t`
    Sloped { s: usize, t: usize },
    /// `j = j0`, every `r`
    Vertical { j: usize },
}

pub fn line_weights(d: usize, line: LineSpec) -> Result<Vec<f64>> {
    let mut c = vec![0.0; d * d];
    let w = 1.0 / d as f64;
    match line {
        LineSpec::Sloped { s, t } => {
            if s >= d || t >= d {
                return Err(Error::IndexOutOfRange {
                    what: "line parameter",
                    value: s.max(t) as i64,
                    bound: d,
                });
            }
            for j in 0..d {
                c[j * d + (s * j + t) % d] = w;
            }
        }
        LineSpec::Vertical { j } => {
            if j >= d {
                return Err(Error::IndexOutOfRange {
                    what: "vertical line",
                    value: j as i64,
                    bound: d,
                });
            }
            for r in 0..d {
                c[j * d + r] = w;
            }
        }
    }
    Ok(c)
}

/// BHN mixture with weight `1/d` on each point of a line.
pub fn bhn_line_state(d: usize, line: LineSpec) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    bhn_density(d, &line_weights(d, line)?)
}

/// `(1-t)/d² · I + t ρ`.
pub fn mix_with_identity(rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    unit_interval("t", t)?;
    let d = rho.dim();
    let n = d * d;
    let m = CMatrix::from_diagonal_element(n, n, matrix::real((1.0 - t) / n as f64))
        + rho.matrix() * matrix::real(t);
    DensityMatrix::new(d, m, rho.permutation().cloned())
}

/// `((1-α-β)/9) I + α P̃_{1,0} + β P̃_{2,0}` for `d = 3`.
pub fn bhn_two_projector(alpha: f64, beta: f64) -> Result<DensityMatrix> {
    if alpha < 0.0 || beta < 0.0 || alpha + beta > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "need alpha, beta >= 0 and alpha + beta <= 1, got ({alpha}, {beta})"
        )));
    }
    let t = alpha + beta;
    if t == 0.0 {
        return DensityMatrix::circulant(3, CMatrix::identity(9, 9) / matrix::real(9.0));
    }
    let mut c = vec![0.0; 9];
    c[3] = alpha / t; // (j, r) = (1, 0)
    c[6] = beta / t; // (2, 0)
    let c_sum: f64 = c.iter().sum();
    c[3] /= c_sum;
    c[6] /= c_sum;
    mix_with_identity(&bhn_density(3, &c)?, t)
}

/// Circulant matrix whose class-`r` off-diagonal entries are all `c_r`:
/// `ρ_{n(n+r),(n+k)(n+r+k)} = c_r` for `k ≠ 0`. `diagonal` is in flat
/// order.
pub fn constant_classes(d: usize, c: &[f64], diagonal: &[f64]) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if c.len() != d || diagonal.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: c.len(),
        });
    }
    let mut m = matrix::zeros(d * d);
    for (i, &v) in diagonal.iter().enumerate() {
        m[(i, i)] = matrix::real(v);
    }
    for (r, &cr) in c.iter().enumerate() {
        for n in 0..d {
            for k in 1..d {
                m[(n * d + (n + r) % d, ((n + k) % d) * d + (n + r + k) % d)] = matrix::real(cr);
            }
        }
    }
    DensityMatrix::circulant(d, m)
}

/// Circulant density with product off-diagonals
/// `ρ_{n(n+r),(n+k)(n+r+k)} = x(n,r)·conj(x(n+k,r))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEntrySpec {
    pub d: usize,
    /// `x(n, r)`, row-major in `(n, r)`.
    pub x: Vec<Complex64>,
    /// `ρ_D` in flat order.
    pub diagonal: Vec<f64>,
}

impl ProductEntrySpec {
    #[inline]
    pub fn x(&self, n: usize, r: usize) -> Complex64 {
        self.x[(n % self.d) * self.d + r % self.d]
    }

    /// `Σ_{n,r} |x(n,r)|²`.
    pub fn x_mass(&self) -> f64 {
        self.x.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn min_diagonal(&self) -> f64 {
        self.diagonal.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn validate_shape(&self) -> Result<()> {
        let d = self.d;
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if self.x.len() != d * d || self.diagonal.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: self.x.len().min(self.diagonal.len()),
            });
        }
        if let Some(v) = self.diagonal.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidArgument(format!("negative diagonal entry {v}")));
        }
        Ok(())
    }
}

pub fn product_entry_density(spec: &ProductEntrySpec) -> Result<DensityMatrix> {
    spec.validate_shape()?;
    let d = spec.d;
    let mut m = matrix::zeros(d * d);
    for (i, &v) in spec.diagonal.iter().enumerate() {
        m[(i, i)] = matrix::real(v);
    }
    for n in 0..d {
        for r in 0..d {
            for k in 1..d {
                m[(n * d + (n + r) % d, ((n + k) % d) * d + (n + r + k) % d)] =
                    spec.x(n, r) * spec.x(n + k, r).conj();
            }
        }
    }
    let rho = DensityMatrix::circulant(d, m)?;
    let blocks = to_class_blocks(rho.matrix(), rho.permutation().expect("circulant"));
    for (x, a) in blocks.blocks.iter().enumerate() {
        let (ok, min_eig) = is_psd(a, PSD_TOL)?;
        if !ok {
            return Err(Error::NotPositive { class: x, min_eig });
        }
    }
    Ok(rho)
}

/// Random circulant density for pattern `M_p`: each class block is
/// `G G† + κ·D` with Gaussian-like `G`, a random non-negative diagonal `D`
/// and a random loading `κ`, then everything is scaled to trace one.
/// The loading spreads samples across both sides of the PPT boundary.
pub fn random_circulant<R: Rng + ?Sized>(p: &PermutationZd, rng: &mut R) -> DensityMatrix {
    let d = p.dim();
    let kappa = 10f64.powf(rng.random_range(-1.5..1.5));
    let mut blocks: Vec<CMatrix> = (0..d)
        .map(|_| {
            let g = CMatrix::from_fn(d, d, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let mut a = &g * g.adjoint();
            for i in 0..d {
                a[(i, i)] += matrix::real(kappa * d as f64 * rng.random_range(0.0..1.0));
            }
            a
        })
        .collect();
    let total: f64 = blocks.iter().map(|a| matrix::trace(a).re).sum();
    for a in &mut blocks {
        *a /= matrix::real(total);
        // exact Hermitian symmetry after the arithmetic
        *a = (&*a + a.adjoint()) * matrix::real(0.5);
    }
    let cb = ClassBlocks {
        d,
        permutation: p.clone(),
        blocks,
    };
    from_class_blocks(&cb).expect("random blocks are PSD with unit trace")
}

/// Random permutation of `Z_d` fixing 0.
pub fn random_permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PermutationZd {
    let mut rest: Vec<usize> = (1..d).collect();
    for i in (1..rest.len()).rev() {
        let j = rng.random_range(0..=i);
        rest.swap(i, j);
    }
    let mut v = vec![0];
    v.extend(rest);
    PermutationZd::new(v).expect("fixed zero, shuffled rest")
}

/// Random product-entry spec with `Σ|x|² = mass` and a diagonal that keeps
/// every class block PSD (`ρ_{n(n+r),n(n+r)} ≥ |x(n,r)|²`).
pub fn random_product_entry_spec<R: Rng + ?Sized>(
    d: usize,
    mass: f64,
    rng: &mut R,
) -> ProductEntrySpec {
    let n = d * d;
    let raw: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = raw.iter().map(|v| v.norm_sqr()).sum();
    let scale = (mass / norm).sqrt();
    let x: Vec<Complex64> = raw.iter().map(|v| v * scale).collect();
    let spare = 1.0 - mass;
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    let w_sum: f64 = w.iter().sum();
    // flat position of (n, n+r) carries |x(n,r)|² plus a share of the rest
    let mut diagonal = vec![0.0; n];
    for a in 0..d {
        for r in 0..d {
            diagonal[a * d + (a + r) % d] = x[a * d + r].norm_sqr() + spare * w[a * d + r] / w_sum;
        }
    }
    let tr: f64 = diagonal.iter().sum();
    for v in &mut diagonal {
        *v /= tr;
    }
    ProductEntrySpec { d, x, diagonal }
}
