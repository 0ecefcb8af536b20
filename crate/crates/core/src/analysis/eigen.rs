//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.

use num_complex::Complex64;

use crate::matrix::{self, CMatrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order, with eigenvectors as columns in the same
/// order when requested.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Option<CMatrix>,
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: h.ncols(),
        });
    }
    let scale = h.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let dev = matrix::hermitian_deviation(h);
    if dev > 1e-10 * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

pub fn jacobi_eigen(h: &CMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let n = h.nrows();
    // row-major working copy, symmetrised
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = if i == j {
                Complex64::new(h[(i, i)].re, 0.0)
            } else {
                (h[(i, j)] + h[(j, i)].conj()) * 0.5
            };
        }
    }
    let mut v = want_vectors.then(|| matrix::identity(n));

    let frob: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * frob || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let e = apq / g;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let se = e * s;
                let ce = e * c;
                // A ← A J with J_pp = c, J_pq = s, J_qp = -s ē, J_qq = c ē
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * se.conj();
                    a[k * n + q] = akp * s + akq * ce.conj();
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * se;
                    a[q * n + k] = apk * s + aqk * ce;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * se.conj();
                        v[(k, q)] = vkp * s + vkq * ce.conj();
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi did not converge in {MAX_SWEEPS} sweeps (n = {n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = v.map(|v| CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok(HermitianEigen { values, vectors })
}

pub fn eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    Ok(jacobi_eigen(h, false)?.values)
}

/// `(min eigenvalue ≥ -tol, min eigenvalue)`.
pub fn is_psd(h: &CMatrix, tol: f64) -> Result<(bool, f64)> {
    let min = eigenvalues(h)?.first().copied().unwrap_or(0.0);
    Ok((min >= -tol, min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Roots of the characteristic polynomial of a Hermitian matrix of size
    /// ≤ 3, by the closed-form quadratic / trigonometric cubic.
    fn char_poly_roots(h: &CMatrix) -> Vec<f64> {
        let n = h.nrows();
        let mut roots = match n {
            1 => vec![h[(0, 0)].re],
            2 => {
                let (a, d) = (h[(0, 0)].re, h[(1, 1)].re);
                let b2 = h[(0, 1)].norm_sqr();
                let mid = 0.5 * (a + d);
                let rad = (0.25 * (a - d) * (a - d) + b2).sqrt();
                vec![mid - rad, mid + rad]
            }
            3 => {
                let tr = matrix::trace(h).re;
                let q = tr / 3.0;
                let shifted = h - CMatrix::identity(3, 3) * c(q, 0.0);
                let p2: f64 = shifted.iter().map(|v| v.norm_sqr()).sum::<f64>() / 6.0;
                let p = p2.sqrt();
                if p < 1e-300 {
                    vec![q; 3]
                } else {
                    let b = shifted / c(p, 0.0);
                    let det = b.determinant().re;
                    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
                    let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
                    vec![
                        q + 2.0 * p * phi.cos(),
                        q + 2.0 * p * (phi + two_pi_3).cos(),
                        q + 2.0 * p * (phi + 2.0 * two_pi_3).cos(),
                    ]
                }
            }
            _ => unreachable!(),
        };
        roots.sort_by(f64::total_cmp);
        roots
    }

    #[test]
    fn examples() {
        let h = CMatrix::identity(3, 3) / c(3.0, 0.0);
        let (ok, min) = is_psd(&h, 1e-9).unwrap();
        assert!(ok);
        assert!((min - 1.0 / 3.0).abs() < 1e-15);

        let mut h = crate::matrix::zeros(2);
        h[(0, 0)] = c(1.0, 0.0);
        h[(1, 1)] = c(-1e-6, 0.0);
        let (ok, min) = is_psd(&h, 1e-9).unwrap();
        assert!(!ok);
        assert!((min + 1e-6).abs() < 1e-18);

        let mut bad = crate::matrix::zeros(2);
        bad[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(is_psd(&bad, 1e-9), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn isotropic_class_block_d3() {
        // λ = 1/4: diagonal λ/3 + (1-λ)/9 = 1/6, off-diagonal λ/3 = 1/12.
        // Eigenvalues: 1/6 + 2/12 = 1/3 once, 1/6 - 1/12 = 1/12 twice.
        let h = CMatrix::from_fn(3, 3, |i, j| c(if i == j { 1.0 / 6.0 } else { 1.0 / 12.0 }, 0.0));
        let ev = eigenvalues(&h).unwrap();
        let want = [1.0 / 12.0, 1.0 / 12.0, 1.0 / 3.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn eigenvectors_diagonalise() {
        let h = CMatrix::from_fn(4, 4, |i, j| {
            let re = ((i + 2 * j) % 5) as f64 + ((j + 2 * i) % 5) as f64;
            let im = if i == j { 0.0 } else { (i as f64 - j as f64) * 0.3 };
            c(re, im)
        });
        let eig = jacobi_eigen(&h, true).unwrap();
        let v = eig.vectors.unwrap();
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            eig.values.iter().map(|&x| c(x, 0.0)),
        ));
        let back = &v * d * v.adjoint();
        assert!(matrix::max_abs_diff(&back, &h) < 1e-12);
    }

    fn hermitian_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |xs| {
            let g = CMatrix::from_fn(n, n, |i, j| c(xs[2 * (i * n + j)], xs[2 * (i * n + j) + 1]));
            (&g + g.adjoint()) * c(0.5, 0.0)
        })
    }

    proptest! {
        #[test]
        fn matches_characteristic_polynomial(h in (1usize..=3).prop_flat_map(hermitian_strategy)) {
            let got = eigenvalues(&h).unwrap();
            let want = char_poly_roots(&h);
            for (a, b) in got.iter().zip(&want) {
                prop_assert!((a - b).abs() < 1e-11, "{got:?} vs {want:?}");
            }
        }

        #[test]
        fn matches_nalgebra(h in (4usize..=12).prop_flat_map(hermitian_strategy)) {
            let got = eigenvalues(&h).unwrap();
            let mut want: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
            want.sort_by(f64::total_cmp);
            for (a, b) in got.iter().zip(&want) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
