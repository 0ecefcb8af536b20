//! Discrete Weyl matrices `S_{j,k} = Σ_m η^{jm} |m⟩⟨m+k|`, their rank-one
//! eigenprojector families, and tensor spin coefficients.
//!
//! For prime `d` the `d` families `P_{a,1}(m)`, `a ∈ Z_d`, are the
//! eigenbases of `ω_a S_{a,1}` and every `S_{j,k}` with `k ≠ 0` is diagonal
//! in one of them. The phase `ω_a` is 1 for odd `d`. For `d = 2`,
//! `S_{1,1} = iσ_y` squares to `-I`, so `ω_1 = -i` turns it into `σ_y`,
//! whose eigenvalues are the square roots of unity again.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::algebra::{binom2, is_prime, ModRing, PermutationZd, RootsOfUnity};
use crate::density::DensityMatrix;
use crate::matrix::{self, CMatrix, ZERO};
use crate::{Error, Result};

/// One Weyl matrix, optionally relabeled by a basis permutation `σ`.
#[derive(Debug, Clone)]
pub struct SpinMatrix {
    pub d: usize,
    pub j: usize,
    pub k: usize,
    pub sigma: Option<PermutationZd>,
    pub matrix: CMatrix,
}

fn check_label(d: usize, j: usize, k: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    for v in [j, k] {
        if v >= d {
            return Err(Error::IndexOutOfRange {
                what: "spin label",
                value: v as i64,
                bound: d,
            });
        }
    }
    Ok(())
}

/// `S_{j,k}`: entry `(m, m+k)` is `η^{jm}`.
pub fn spin_matrix(d: usize, j: usize, k: usize) -> Result<SpinMatrix> {
    check_label(d, j, k)?;
    Ok(SpinMatrix {
        d,
        j,
        k,
        sigma: None,
        matrix: raw_spin(d, j, k, None),
    })
}

/// `S_{j,k}(σ) = Σ_m η^{jm} |σ(m)⟩⟨σ(m+k)|`.
pub fn relabeled_spin_matrix(
    d: usize,
    j: usize,
    k: usize,
    sigma: &PermutationZd,
) -> Result<SpinMatrix> {
    check_label(d, j, k)?;
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: sigma.dim(),
        });
    }
    Ok(SpinMatrix {
        d,
        j,
        k,
        sigma: Some(sigma.clone()),
        matrix: raw_spin(d, j, k, Some(sigma)),
    })
}

fn raw_spin(d: usize, j: usize, k: usize, sigma: Option<&PermutationZd>) -> CMatrix {
    let eta = RootsOfUnity::new(d).expect("d >= 2 checked by caller");
    let relabel = |m: usize| sigma.map_or(m, |s| s.apply(m));
    let mut s = matrix::zeros(d);
    for m in 0..d {
        s[(relabel(m), relabel((m + k) % d))] = eta.pow((j * m) as i64);
    }
    s
}

/// Phase `ω_a` with `(ω_a S_{a,1})^d = I`.
pub fn slope_phase(d: usize, a: usize) -> Complex64 {
    if d == 2 && a % 2 == 1 {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

fn matrix_power(base: &CMatrix, exp: usize) -> CMatrix {
    let mut acc = matrix::identity(base.nrows());
    for _ in 0..exp {
        acc = &acc * base;
    }
    acc
}

/// Worst deviations found by [`spin_product_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraReport {
    pub product: f64,
    pub adjoint: f64,
    pub inverse: f64,
    pub orthogonality: f64,
    pub unitarity: f64,
}

impl AlgebraReport {
    pub fn worst(&self) -> f64 {
        [
            self.product,
            self.adjoint,
            self.inverse,
            self.orthogonality,
            self.unitarity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.worst() < tol
    }
}

/// Exhaustive check of `S_{j,k} S_{u,v} = η^{ku} S_{j+u,k+v}`,
/// `S_{j,k}† = η^{jk} S_{-j,-k} = S_{j,k}⁻¹`, unitarity and
/// `Tr(S_{j,k}† S_{u,v}) = d·δ`.
pub fn spin_product_check(d: usize) -> Result<AlgebraReport> {
    let z = ModRing::new(d)?;
    let eta = RootsOfUnity::new(d)?;
    let all: Vec<CMatrix> = (0..d * d)
        .map(|jk| raw_spin(d, jk / d, jk % d, None))
        .collect();
    let at = |j: usize, k: usize| &all[j * d + k];
    let id = matrix::identity(d);
    let mut rep = AlgebraReport {
        product: 0.0,
        adjoint: 0.0,
        inverse: 0.0,
        orthogonality: 0.0,
        unitarity: 0.0,
    };
    for j in 0..d {
        for k in 0..d {
            let s = at(j, k);
            let adj = s.adjoint();
            let rhs = at(z.neg(j), z.neg(k)) * eta.pow((j * k) as i64);
            rep.adjoint = rep.adjoint.max(matrix::max_abs_diff(&adj, &rhs));
            rep.inverse = rep.inverse.max(matrix::max_abs_diff(&(s * &rhs), &id));
            rep.unitarity = rep.unitarity.max(matrix::max_abs_diff(&(&adj * s), &id));
            for u in 0..d {
                for v in 0..d {
                    let t = at(u, v);
                    let lhs = s * t;
                    let rhs = at(z.add(j, u), z.add(k, v)) * eta.pow((k * u) as i64);
                    rep.product = rep.product.max(matrix::max_abs_diff(&lhs, &rhs));
                    let want = if (j, k) == (u, v) { d as f64 } else { 0.0 };
                    let ip = matrix::inner(s, t);
                    rep.orthogonality = rep
                        .orthogonality
                        .max((ip - Complex64::new(want, 0.0)).norm());
                }
            }
        }
    }
    Ok(rep)
}

/// General `P_{j,k}(r) = (1/d) Σ_m η^{mr} (S_{j,k})^m`, without the slope
/// phase. Only a projector family when `(S_{j,k})^d = I`.
#[cfg(test)]
pub(crate) fn raw_projector(d: usize, j: usize, k: usize, r: usize) -> CMatrix {
    let eta = RootsOfUnity::new(d).expect("d >= 2");
    let s = raw_spin(d, j, k, None);
    let mut acc = matrix::zeros(d);
    let mut power = matrix::identity(d);
    for m in 0..d {
        acc += &power * eta.pow((m * r) as i64);
        power = &power * &s;
    }
    acc / Complex64::new(d as f64, 0.0)
}

/// The `d` rank-one eigenprojectors `P_{a,1}(m)` of `ω_a S_{a,1}`.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    pub d: usize,
    pub a: usize,
    pub projectors: Vec<CMatrix>,
}

fn require_prime(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "projector families need prime d",
        });
    }
    Ok(())
}

fn build_family(d: usize, a: usize) -> ProjectorFamily {
    let eta = RootsOfUnity::new(d).expect("d >= 2");
    let s = raw_spin(d, a, 1, None) * slope_phase(d, a);
    let mut powers = Vec::with_capacity(d);
    let mut power = matrix::identity(d);
    for _ in 0..d {
        powers.push(power.clone());
        power = &power * &s;
    }
    let projectors = (0..d)
        .map(|r| {
            let mut acc = matrix::zeros(d);
            for (m, pw) in powers.iter().enumerate() {
                acc += pw * eta.pow((m * r) as i64);
            }
            acc / Complex64::new(d as f64, 0.0)
        })
        .collect();
    ProjectorFamily { d, a, projectors }
}

pub fn projector_family(d: usize, a: usize) -> Result<ProjectorFamily> {
    require_prime(d)?;
    if a >= d {
        return Err(Error::IndexOutOfRange {
            what: "slope",
            value: a as i64,
            bound: d,
        });
    }
    Ok(projector_table(d)?.families[a].clone())
}

/// All `d` slope families for one prime `d`.
#[derive(Debug)]
pub struct ProjectorTable {
    pub d: usize,
    pub families: Vec<ProjectorFamily>,
}

impl ProjectorTable {
    #[inline]
    pub fn projector(&self, a: usize, m: usize) -> &CMatrix {
        &self.families[a].projectors[m]
    }
}

const CACHED_DIMS: usize = 64;

static TABLES: [OnceLock<Arc<ProjectorTable>>; CACHED_DIMS] = [const { OnceLock::new() }; CACHED_DIMS];

/// Projector families for prime `d`, built once per process for `d < 64`.
pub fn projector_table(d: usize) -> Result<Arc<ProjectorTable>> {
    require_prime(d)?;
    let build = || {
        Arc::new(ProjectorTable {
            d,
            families: (0..d).map(|a| build_family(d, a)).collect(),
        })
    };
    Ok(match TABLES.get(d) {
        Some(cell) => cell.get_or_init(build).clone(),
        None => build(),
    })
}

/// `S_{j,k}` rebuilt from the slope family `a = j·k⁻¹`:
/// `η^{-a·C(k,2)} ω_a^{-k} Σ_m η^{-mk} P_{a,1}(m)`.
pub fn spin_from_projectors(d: usize, j: usize, k: usize) -> Result<SpinMatrix> {
    require_prime(d)?;
    check_label(d, j, k)?;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "k = 0 has no projector expansion".into(),
        ));
    }
    let z = ModRing::new(d)?;
    let eta = RootsOfUnity::new(d)?;
    let a = z.mul(j, z.inv(k)?);
    let table = projector_table(d)?;
    let phase =
        eta.pow(-(a as i64) * binom2(k as i64)) * slope_phase(d, a).powi(-(k as i32));
    let mut acc = matrix::zeros(d);
    for m in 0..d {
        acc += table.projector(a, m) * eta.pow(-((m * k) as i64));
    }
    Ok(SpinMatrix {
        d,
        j,
        k,
        sigma: None,
        matrix: acc * phase,
    })
}

/// Worst deviations of the projector-family identities for prime `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorReport {
    /// `P(r) P(s) = δ(r,s) P(r)`
    pub orthogonality: f64,
    /// `Σ_m P(m) = I`
    pub resolution: f64,
    /// `P = P†`, `Tr P = 1`, `Tr P² = 1`
    pub rank_one: f64,
    /// every diagonal entry equals `1/d`
    pub flat_diagonal: f64,
    /// `(η^r ω_a S_{a,1})^t = Σ_m η^{-mt} P(m+r)`
    pub spectral: f64,
    /// `(S_{a,1})^k = η^{a·C(k,2)} S_{ak,k}`
    pub power_law: f64,
    /// `spin_from_projectors` against `spin_matrix`
    pub expansion: f64,
}

impl ProjectorReport {
    pub fn worst(&self) -> f64 {
        [
            self.orthogonality,
            self.resolution,
            self.rank_one,
            self.flat_diagonal,
            self.spectral,
            self.power_law,
            self.expansion,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn projector_check(d: usize) -> Result<ProjectorReport> {
    let table = projector_table(d)?;
    let z = ModRing::new(d)?;
    let eta = RootsOfUnity::new(d)?;
    let id = matrix::identity(d);
    let inv_d = 1.0 / d as f64;
    let mut rep = ProjectorReport {
        orthogonality: 0.0,
        resolution: 0.0,
        rank_one: 0.0,
        flat_diagonal: 0.0,
        spectral: 0.0,
        power_law: 0.0,
        expansion: 0.0,
    };
    for a in 0..d {
        let fam = &table.families[a];
        let mut sum = matrix::zeros(d);
        for (r, p) in fam.projectors.iter().enumerate() {
            sum += p;
            rep.rank_one = rep
                .rank_one
                .max(matrix::hermitian_deviation(p))
                .max((matrix::trace(p) - matrix::real(1.0)).norm())
                .max((matrix::trace(&(p * p)) - matrix::real(1.0)).norm());
            for i in 0..d {
                rep.flat_diagonal = rep.flat_diagonal.max((p[(i, i)] - matrix::real(inv_d)).norm());
            }
            for (s, q) in fam.projectors.iter().enumerate() {
                let want = if r == s { p.clone() } else { matrix::zeros(d) };
                rep.orthogonality = rep.orthogonality.max(matrix::max_abs_diff(&(p * q), &want));
            }
        }
        rep.resolution = rep.resolution.max(matrix::max_abs_diff(&sum, &id));

        let s_a1 = raw_spin(d, a, 1, None);
        let phased = &s_a1 * slope_phase(d, a);
        for r in 0..d {
            let base = &phased * eta.pow(r as i64);
            for t in 0..d {
                let lhs = matrix_power(&base, t);
                let mut rhs = matrix::zeros(d);
                for m in 0..d {
                    rhs += &fam.projectors[(m + r) % d] * eta.pow(-((m * t) as i64));
                }
                rep.spectral = rep.spectral.max(matrix::max_abs_diff(&lhs, &rhs));
            }
        }
        for k in 0..d {
            let lhs = matrix_power(&s_a1, k);
            let rhs = raw_spin(d, z.mul(a, k), k, None)
                * eta.pow(a as i64 * binom2(k as i64));
            rep.power_law = rep.power_law.max(matrix::max_abs_diff(&lhs, &rhs));
        }
    }
    for j in 0..d {
        for k in 1..d {
            let built = spin_from_projectors(d, j, k)?.matrix;
            rep.expansion = rep
                .expansion
                .max(matrix::max_abs_diff(&built, &raw_spin(d, j, k, None)));
        }
    }
    Ok(rep)
}

/// Result of [`mub_overlap_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MubReport {
    /// `max |Tr(P_{a,1}(m) P_{b,1}(m')) - 1/d|` over `a ≠ b`
    pub worst_deviation: f64,
    pub pairs_checked: usize,
}

/// Cross-slope overlaps of the projector families; all should be `1/d`.
pub fn mub_overlap_check(d: usize) -> Result<MubReport> {
    let table = projector_table(d)?;
    let inv_d = 1.0 / d as f64;
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            for p in &table.families[a].projectors {
                for q in &table.families[b].projectors {
                    let ov = matrix::trace(&(p * q));
                    worst = worst.max((ov - matrix::real(inv_d)).norm());
                    pairs += 1;
                }
            }
        }
    }
    Ok(MubReport {
        worst_deviation: worst,
        pairs_checked: pairs,
    })
}

/// Coefficients `s_{u,v} = Tr[(S_{u1,v1} ⊗ S_{u2,v2})† ρ]` of a `d² × d²`
/// matrix, so that `ρ = (1/d²) Σ s_{u,v} S_{u1,v1} ⊗ S_{u2,v2}`.
#[derive(Debug, Clone)]
pub struct SpinCoefficients {
    pub d: usize,
    values: Vec<Complex64>,
}

impl SpinCoefficients {
    fn index(&self, j1: usize, k1: usize, j2: usize, k2: usize) -> usize {
        let d = self.d;
        ((j1 * d + k1) * d + j2) * d + k2
    }

    /// Coefficient of `S_{j1,k1} ⊗ S_{j2,k2}`.
    pub fn get(&self, j1: usize, k1: usize, j2: usize, k2: usize) -> Complex64 {
        self.values[self.index(j1, k1, j2, k2)]
    }

    /// Labels `((j1,k1),(j2,k2))` with their coefficients.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), Complex64)> + '_ {
        let d = self.d;
        self.values.iter().enumerate().map(move |(i, &v)| {
            let k2 = i % d;
            let j2 = (i / d) % d;
            let k1 = (i / (d * d)) % d;
            let j1 = i / (d * d * d);
            ((j1, k1, j2, k2), v)
        })
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = self.d;
        let n = d * d;
        let eta = RootsOfUnity::new(d).expect("d >= 2");
        let mut out = matrix::zeros(n);
        for ((j1, k1, j2, k2), s) in self.iter() {
            if s == ZERO {
                continue;
            }
            for m1 in 0..d {
                for m2 in 0..d {
                    let r = m1 * d + m2;
                    let c = ((m1 + k1) % d) * d + (m2 + k2) % d;
                    out[(r, c)] += s * eta.pow((j1 * m1 + j2 * m2) as i64);
                }
            }
        }
        out / Complex64::new(n as f64, 0.0)
    }
}

pub fn spin_coefficients(rho: &DensityMatrix) -> SpinCoefficients {
    spin_coefficients_of(rho.dim(), rho.matrix()).expect("density dimension is d²")
}

/// Spin coefficients of an arbitrary `d² × d²` matrix.
pub fn spin_coefficients_of(d: usize, rho: &CMatrix) -> Result<SpinCoefficients> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let n = d * d;
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rho.nrows(),
        });
    }
    let eta = RootsOfUnity::new(d)?;
    let mut values = vec![ZERO; n * n];
    for k1 in 0..d {
        for k2 in 0..d {
            // entries ρ_{(m1,m2),(m1+k1,m2+k2)} feed every (j1,j2)
            let mut shifted = vec![ZERO; n];
            for m1 in 0..d {
                for m2 in 0..d {
                    let c = ((m1 + k1) % d) * d + (m2 + k2) % d;
                    shifted[m1 * d + m2] = rho[(m1 * d + m2, c)];
                }
            }
            if shifted.iter().all(|v| *v == ZERO) {
                continue;
            }
            for j1 in 0..d {
                for j2 in 0..d {
                    let mut acc = ZERO;
                    for m1 in 0..d {
                        for m2 in 0..d {
                            acc += eta.pow(-((j1 * m1 + j2 * m2) as i64)) * shifted[m1 * d + m2];
                        }
                    }
                    values[((j1 * d + k1) * d + j2) * d + k2] = acc;
                }
            }
        }
    }
    Ok(SpinCoefficients { d, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::support_pattern;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat2(a: [Complex64; 4]) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &a)
    }

    #[test]
    fn pauli_identification() {
        let z = mat2([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        let x = mat2([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let iy = mat2([c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.)]);
        assert!(matrix::max_abs_diff(&spin_matrix(2, 1, 0).unwrap().matrix, &z) < 1e-15);
        assert!(matrix::max_abs_diff(&spin_matrix(2, 0, 1).unwrap().matrix, &x) < 1e-15);
        assert!(matrix::max_abs_diff(&spin_matrix(2, 1, 1).unwrap().matrix, &iy) < 1e-15);
        assert_eq!(spin_matrix(3, 0, 0).unwrap().matrix, matrix::identity(3));
        assert!(spin_matrix(3, 3, 0).is_err());
    }

    #[test]
    fn algebra_holds_small_d() {
        for d in [2, 3, 4, 5] {
            let rep = spin_product_check(d).unwrap();
            assert!(rep.passed(1e-12), "d={d}: {rep:?}");
        }
    }

    #[test]
    fn projector_examples() {
        let fam = projector_family(2, 0).unwrap();
        let x = spin_matrix(2, 0, 1).unwrap().matrix;
        let plus = (matrix::identity(2) + &x) * c(0.5, 0.);
        let minus = (matrix::identity(2) - &x) * c(0.5, 0.);
        assert!(matrix::max_abs_diff(&fam.projectors[0], &plus) < 1e-15);
        assert!(matrix::max_abs_diff(&fam.projectors[1], &minus) < 1e-15);

        let f3 = projector_family(3, 0).unwrap();
        for (r, p) in f3.projectors.iter().enumerate() {
            for (s, q) in f3.projectors.iter().enumerate() {
                if r != s {
                    assert!((p * q).iter().all(|v| v.norm() < 1e-12));
                }
            }
        }
        let f5 = projector_family(5, 2).unwrap();
        let sum = f5.projectors.iter().fold(matrix::zeros(5), |acc, p| acc + p);
        assert!(matrix::max_abs_diff(&sum, &matrix::identity(5)) < 1e-12);

        assert!(matches!(
            projector_family(4, 1),
            Err(Error::UnsupportedDimension { d: 4, .. })
        ));
    }

    #[test]
    fn raw_formula_fails_for_d2_odd_slope() {
        // without the phase, (S_{1,1})² = -I and the formula is not a projector
        let p = raw_projector(2, 1, 1, 0);
        assert!(matrix::max_abs_diff(&(&p * &p), &p) > 0.1);
        // odd d needs no phase
        let p3 = raw_projector(3, 2, 1, 1);
        assert!(matrix::max_abs_diff(&(&p3 * &p3), &p3) < 1e-12);
        let t = projector_table(3).unwrap();
        assert!(matrix::max_abs_diff(&p3, t.projector(2, 1)) < 1e-14);
    }

    #[test]
    fn projector_identities() {
        for d in [2, 3, 5, 7] {
            let rep = projector_check(d).unwrap();
            assert!(rep.worst() < 1e-12, "d={d}: {rep:?}");
        }
    }

    #[test]
    fn spin_from_projector_examples() {
        let s01 = spin_from_projectors(3, 0, 1).unwrap().matrix;
        assert!(matrix::max_abs_diff(&s01, &spin_matrix(3, 0, 1).unwrap().matrix) < 1e-12);
        let s22 = spin_from_projectors(3, 2, 2).unwrap().matrix;
        assert!(matrix::max_abs_diff(&s22, &spin_matrix(3, 2, 2).unwrap().matrix) < 1e-12);
        let iy = spin_from_projectors(2, 1, 1).unwrap().matrix;
        assert!(matrix::max_abs_diff(&iy, &spin_matrix(2, 1, 1).unwrap().matrix) < 1e-12);
        assert!(spin_from_projectors(3, 1, 0).is_err());
    }

    #[test]
    fn mub_overlaps() {
        for d in [2, 3, 5] {
            let rep = mub_overlap_check(d).unwrap();
            assert!(rep.worst_deviation < 1e-10, "d={d}");
            assert_eq!(rep.pairs_checked, d * (d - 1) * d * d);
        }
    }

    #[test]
    fn relabeled_matrices() {
        let id = PermutationZd::identity(3).unwrap();
        let a = relabeled_spin_matrix(3, 1, 2, &id).unwrap().matrix;
        assert_eq!(a, spin_matrix(3, 1, 2).unwrap().matrix);

        let sigma = PermutationZd::new(vec![0, 2, 1]).unwrap();
        let s = relabeled_spin_matrix(3, 0, 1, &sigma).unwrap().matrix;
        assert!(matrix::max_abs_diff(&(s.adjoint() * &s), &matrix::identity(3)) < 1e-12);

        // the relabeled family stays trace-orthogonal
        for d in [3, 4, 5] {
            let v: Vec<usize> = std::iter::once(0).chain((1..d).rev()).collect();
            let sigma = PermutationZd::new(v).unwrap();
            for jk in 0..d * d {
                let a = relabeled_spin_matrix(d, jk / d, jk % d, &sigma).unwrap().matrix;
                for uv in 0..d * d {
                    let b = relabeled_spin_matrix(d, uv / d, uv % d, &sigma).unwrap().matrix;
                    let want = if jk == uv { d as f64 } else { 0.0 };
                    assert!((matrix::inner(&a, &b) - c(want, 0.)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn identity_pattern_is_sum_of_shift_products() {
        for d in [2, 3, 5] {
            let mut m = matrix::zeros(d * d);
            for k in 0..d {
                let s = spin_matrix(d, 0, k).unwrap().matrix;
                m += matrix::kron(&s, &s);
            }
            let pat = support_pattern(&PermutationZd::identity(d).unwrap());
            for r in 0..d * d {
                for s in 0..d * d {
                    assert_eq!(m[(r, s)].norm() > 0.5, pat.contains(r, s));
                }
            }
        }
    }

    #[test]
    fn permuted_pattern_is_sum_of_relabeled_products() {
        let p = PermutationZd::new(vec![0, 2, 3, 1]).unwrap();
        let d = 4;
        let sigma = p.invert();
        let mut m = matrix::zeros(d * d);
        for k in 0..d {
            let left = relabeled_spin_matrix(d, 0, k, &sigma).unwrap().matrix;
            let right = spin_matrix(d, 0, k).unwrap().matrix;
            m += matrix::kron(&left, &right);
        }
        let pat = support_pattern(&p);
        for r in 0..d * d {
            for s in 0..d * d {
                assert_eq!(m[(r, s)].norm() > 0.5, pat.contains(r, s), "({r},{s})");
            }
        }
    }

    #[test]
    fn coefficients_round_trip() {
        let d = 3;
        let n = d * d;
        let mut rho = matrix::zeros(n);
        for r in 0..n {
            for s in 0..n {
                rho[(r, s)] = c(((r * 7 + s * 3) % 5) as f64, ((r + 2 * s) % 3) as f64 - 1.0);
            }
        }
        let sc = spin_coefficients_of(d, &rho).unwrap();
        assert!(matrix::max_abs_diff(&sc.reconstruct(), &rho) < 1e-12);
        assert!(spin_coefficients_of(3, &matrix::zeros(8)).is_err());
    }
}
