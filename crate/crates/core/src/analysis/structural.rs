//! Structural coefficients `C(a,m)` of the off-diagonal part of a circulant
//! density over products of slope projectors:
//! `ρ - ρ_D = Σ C(a,m) P_{a1,1}(m1) ⊗ P_{a2,1}(m2)`.

use num_complex::Complex64;

use crate::algebra::{binom2, is_prime, PermutationZd, RootsOfUnity};
use crate::density::{check_support, DensityMatrix};
use crate::matrix::{self, CMatrix, ZERO};
use crate::weyl::{projector_table, slope_phase};
use crate::{Error, Result};

/// Real coefficients over `(a1, a2, m1, m2) ∈ Z_d⁴` together with the
/// per-slope shifts `μ_a = max(0, -min_m C(a,m))`.
#[derive(Debug, Clone)]
pub struct StructuralCoefficients {
    pub d: usize,
    values: Vec<f64>,
    mu: Vec<f64>,
    /// Largest `|Im C|` discarded when taking real parts.
    pub max_imag: f64,
    /// `σ = p⁻¹` when the input pattern was not the identity; the
    /// coefficients then describe `(Π⊗I) ρ (Π⊗I)†` with `Π|j⟩ = |p(j)⟩`.
    pub relabel: Option<PermutationZd>,
}

impl StructuralCoefficients {
    #[inline]
    fn index(&self, a1: usize, a2: usize, m1: usize, m2: usize) -> usize {
        let d = self.d;
        ((a1 * d + a2) * d + m1) * d + m2
    }

    pub fn get(&self, a1: usize, a2: usize, m1: usize, m2: usize) -> f64 {
        self.values[self.index(a1, a2, m1, m2)]
    }

    pub fn mu(&self, a1: usize, a2: usize) -> f64 {
        self.mu[a1 * self.d + a2]
    }

    pub fn mu_sum(&self) -> f64 {
        self.mu.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Σ C(a,m) P_{a1,1}(m1) ⊗ P_{a2,1}(m2)` in the identity-pattern frame.
    pub fn reconstruct(&self) -> CMatrix {
        assemble(self.d, |a1, a2, m1, m2| self.get(a1, a2, m1, m2))
    }
}

/// `Σ w(a1,a2,m1,m2) P_{a1,1}(m1) ⊗ P_{a2,1}(m2)` over all labels.
pub fn assemble(d: usize, w: impl Fn(usize, usize, usize, usize) -> f64) -> CMatrix {
    let table = projector_table(d).expect("prime d checked by caller");
    let n = d * d;
    let mut out = matrix::zeros(n);
    for a1 in 0..d {
        for a2 in 0..d {
            for m1 in 0..d {
                let mut right = matrix::zeros(d);
                let mut any = false;
                for m2 in 0..d {
                    let c = w(a1, a2, m1, m2);
                    if c != 0.0 {
                        right += table.projector(a2, m2) * matrix::real(c);
                        any = true;
                    }
                }
                if !any {
                    continue;
                }
                let left = table.projector(a1, m1);
                for r1 in 0..d {
                    for s1 in 0..d {
                        let l = left[(r1, s1)];
                        if l == ZERO {
                            continue;
                        }
                        for r2 in 0..d {
                            for s2 in 0..d {
                                out[(r1 * d + r2, s1 * d + s2)] += l * right[(r2, s2)];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `ρ' = (Π⊗I) ρ (Π⊗I)†` with `Π|j⟩ = |p(j)⟩`, which moves `M_p` onto the
/// identity pattern.
pub fn to_identity_frame(m: &CMatrix, p: &PermutationZd) -> CMatrix {
    let d = p.dim();
    let sigma = p.invert();
    CMatrix::from_fn(d * d, d * d, |r, s| {
        m[(sigma.apply(r / d) * d + r % d, sigma.apply(s / d) * d + s % d)]
    })
}

/// Inverse of [`to_identity_frame`].
pub fn from_identity_frame(m: &CMatrix, p: &PermutationZd) -> CMatrix {
    let d = p.dim();
    CMatrix::from_fn(d * d, d * d, |r, s| {
        m[(p.apply(r / d) * d + r % d, p.apply(s / d) * d + s % d)]
    })
}

pub(crate) fn require_prime(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "structural coefficients need prime d",
        });
    }
    Ok(())
}

/// The density in the identity-pattern frame, with `σ = p⁻¹` when a
/// relabeling was needed.
pub fn identity_frame(rho: &DensityMatrix) -> Result<(CMatrix, Option<PermutationZd>)> {
    let d = rho.dim();
    match rho.permutation() {
        Some(p) if !p.is_identity() => Ok((to_identity_frame(rho.matrix(), p), Some(p.invert()))),
        _ => {
            check_support(rho.matrix(), &PermutationZd::identity(d)?)?;
            Ok((rho.matrix().clone(), None))
        }
    }
}

pub fn structural_coefficients(rho: &DensityMatrix) -> Result<StructuralCoefficients> {
    require_prime(rho.dim())?;
    let (m, relabel) = identity_frame(rho)?;
    let mut sc = structural_coefficients_of(rho.dim(), &m)?;
    sc.relabel = relabel;
    Ok(sc)
}

/// Coefficients of a `d² × d²` matrix supported on the identity pattern:
/// `d² C(a,m) = Σ_{k≠0} η^{-C(k,2)(a1+a2) - k(m1+m2)} (ω_{a1} ω_{a2})^{-k} T(a,k)`
/// with `T(a,k) = Σ_{n1,n2} η^{-k(a1 n1 + a2 n2)} ρ_{n1 n2,(n1+k)(n2+k)}`.
pub fn structural_coefficients_of(d: usize, m: &CMatrix) -> Result<StructuralCoefficients> {
    require_prime(d)?;
    let n = d * d;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.nrows(),
        });
    }
    check_support(m, &PermutationZd::identity(d)?)?;
    let eta = RootsOfUnity::new(d)?;
    let di = d as i64;

    // t[(a1*d + a2)*d + k]
    let mut t = vec![ZERO; d * d * d];
    for k in 1..d {
        let shifted: Vec<Complex64> = (0..n)
            .map(|r| {
                let (n1, n2) = (r / d, r % d);
                m[(r, ((n1 + k) % d) * d + (n2 + k) % d)]
            })
            .collect();
        for a1 in 0..d {
            for a2 in 0..d {
                let mut acc = ZERO;
                for (r, v) in shifted.iter().enumerate() {
                    if *v != ZERO {
                        let e = (k * (a1 * (r / d) + a2 * (r % d))) as i64;
                        acc += eta.pow(-e) * v;
                    }
                }
                t[(a1 * d + a2) * d + k] = acc;
            }
        }
    }

    let mut values = vec![0.0; n * n];
    let mut mu = vec![0.0; n];
    let mut max_imag: f64 = 0.0;
    for a1 in 0..d {
        for a2 in 0..d {
            let omega = slope_phase(d, a1) * slope_phase(d, a2);
            // C depends on m only through s = m1 + m2
            let by_sum: Vec<Complex64> = (0..d)
                .map(|s| {
                    let mut acc = ZERO;
                    for k in 1..d {
                        let tv = t[(a1 * d + a2) * d + k];
                        if tv == ZERO {
                            continue;
                        }
                        let ki = k as i64;
                        let e = -binom2(ki) * (a1 + a2) as i64 - ki * s as i64;
                        acc += eta.pow(e.rem_euclid(di)) * omega.powi(-(k as i32)) * tv;
                    }
                    acc / (n as f64)
                })
                .collect();
            let mut min = f64::INFINITY;
            for (s, c) in by_sum.iter().enumerate() {
                max_imag = max_imag.max(c.im.abs());
                min = min.min(c.re);
                for m1 in 0..d {
                    let m2 = (s + d - m1) % d;
                    values[((a1 * d + a2) * d + m1) * d + m2] = c.re;
                }
            }
            mu[a1 * d + a2] = (-min).max(0.0);
        }
    }
    Ok(StructuralCoefficients {
        d,
        values,
        mu,
        max_imag,
        relabel: None,
    })
}

/// `max |ρ' - ρ'_D - Σ C P⊗P|` in the identity-pattern frame.
pub fn reconstruction_residual(rho: &DensityMatrix, sc: &StructuralCoefficients) -> Result<f64> {
    let (m, _) = identity_frame(rho)?;
    let mut off = m.clone();
    for i in 0..off.nrows() {
        off[(i, i)] = ZERO;
    }
    Ok(matrix::max_abs_diff(&off, &sc.reconstruct()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{
        bhn_density, constant_classes, isotropic, random_circulant, random_permutation,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isotropic_closed_form() {
        // C(a,m) = (c/d) δ(a1+a2, 0) [d δ(m1+m2, 0) - 1], c = λ/d
        for (d, lambda) in [(3, 0.75), (5, 0.4), (3, 0.2)] {
            let rho = isotropic(d, lambda).unwrap();
            let sc = structural_coefficients(&rho).unwrap();
            let c = lambda / d as f64;
            for a1 in 0..d {
                for a2 in 0..d {
                    for m1 in 0..d {
                        for m2 in 0..d {
                            let want = if (a1 + a2) % d == 0 {
                                let hit = if (m1 + m2) % d == 0 { d as f64 } else { 0.0 };
                                c / d as f64 * (hit - 1.0)
                            } else {
                                0.0
                            };
                            assert!((sc.get(a1, a2, m1, m2) - want).abs() < 1e-12);
                        }
                    }
                }
            }
            assert!((sc.mu_sum() - c).abs() < 1e-12);
        }
        let sc = structural_coefficients(&isotropic(3, 0.75).unwrap()).unwrap();
        assert!((sc.get(1, 2, 0, 0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((sc.get(1, 2, 0, 1) + 1.0 / 12.0).abs() < 1e-14);
        assert!(sc.get(1, 1, 0, 0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_density_has_no_coefficients() {
        let diag: Vec<f64> = (1..=9).map(|v| v as f64 / 45.0).collect();
        let rho = constant_classes(3, &[0.0; 3], &diag).unwrap();
        let sc = structural_coefficients(&rho).unwrap();
        assert_eq!(sc.max_abs(), 0.0);
        assert_eq!(sc.mu_sum(), 0.0);
    }

    #[test]
    fn negative_constant_class() {
        // class-0 entries c < 0 need μ-sum |c|(d-1)
        for d in [3, 5] {
            let c = -0.01;
            let mut cr = vec![0.0; d];
            cr[0] = c;
            let rho = constant_classes(d, &cr, &vec![1.0 / (d * d) as f64; d * d]).unwrap();
            let sc = structural_coefficients(&rho).unwrap();
            assert!((sc.mu_sum() - c.abs() * (d - 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn bhn_closed_form() {
        // C(a,m) = (1/d²) δ(a1,-a2) Σ_{j,r} c_{j,r} [d δ(a1 r - j, m1 + m2) - 1]
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [3, 5] {
            let mut c: Vec<f64> = (0..d * d).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = c.iter().sum();
            c.iter_mut().for_each(|v| *v /= s);
            let s: f64 = c.iter().sum();
            c.iter_mut().for_each(|v| *v /= s);
            let sc = structural_coefficients(&bhn_density(d, &c).unwrap()).unwrap();
            for a1 in 0..d {
                for a2 in 0..d {
                    for m1 in 0..d {
                        for m2 in 0..d {
                            let mut want = 0.0;
                            if (a1 + a2) % d == 0 {
                                for j in 0..d {
                                    for r in 0..d {
                                        let hit = (a1 * r + d - j) % d == (m1 + m2) % d;
                                        want += c[j * d + r] * (if hit { d as f64 } else { 0.0 } - 1.0);
                                    }
                                }
                                want /= (d * d) as f64;
                            }
                            assert!((sc.get(a1, a2, m1, m2) - want).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn random_reconstruction_and_reality() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2, 3, 5, 7] {
            for _ in 0..5 {
                let p = random_permutation(d, &mut rng);
                let rho = random_circulant(&p, &mut rng);
                let sc = structural_coefficients(&rho).unwrap();
                assert!(sc.max_imag < 1e-12, "d = {d}: {}", sc.max_imag);
                let res = reconstruction_residual(&rho, &sc).unwrap();
                assert!(res < 1e-12, "d = {d}: {res}");
                assert_eq!(sc.relabel.is_some(), !p.is_identity());
            }
        }
    }

    #[test]
    fn frames_are_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = PermutationZd::new(vec![0, 3, 1, 4, 2]).unwrap();
        let rho = random_circulant(&p, &mut rng);
        let there = to_identity_frame(rho.matrix(), &p);
        check_support(&there, &PermutationZd::identity(5).unwrap()).unwrap();
        assert_eq!(from_identity_frame(&there, &p), *rho.matrix());
    }

    #[test]
    fn composite_dimension_rejected() {
        let rho = isotropic(4, 0.1).unwrap();
        assert!(matches!(
            structural_coefficients(&rho),
            Err(Error::UnsupportedDimension { d: 4, .. })
        ));
    }
}
