//! Modular arithmetic over `Z_d`, GF(q) addition tables, permutations of
//! `Z_d` fixing zero, and powers of `η = e^{2πi/d}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Trial-division primality test.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// `k(k-1)/2`; zero for `k ∈ {0, 1}`.
pub fn binom2(k: i64) -> i64 {
    k * (k - 1) / 2
}

/// The ring `Z_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModRing {
    d: usize,
    prime: bool,
}

impl ModRing {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self {
            d,
            prime: is_prime(d),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_prime(&self) -> bool {
        self.prime
    }

    /// Canonical representative in `0..d` of any integer.
    pub fn reduce(&self, x: i64) -> usize {
        x.rem_euclid(self.d as i64) as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        (a + b) % self.d
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        (a + self.d - b % self.d) % self.d
    }

    pub fn neg(&self, a: usize) -> usize {
        (self.d - a % self.d) % self.d
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        (a * b) % self.d
    }

    pub fn pow(&self, mut base: usize, mut exp: usize) -> usize {
        let mut acc = 1 % self.d;
        base %= self.d;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem. Only defined for
    /// prime `d` and non-zero `a`.
    pub fn inv(&self, a: usize) -> Result<usize> {
        if !self.prime {
            return Err(Error::UnsupportedDimension {
                d: self.d,
                reason: "multiplicative inverses need prime d",
            });
        }
        if a.is_multiple_of(self.d) {
            return Err(Error::InvalidArgument("zero has no inverse".into()));
        }
        Ok(self.pow(a, self.d - 2))
    }
}

/// `η^e` for `η = e^{2πi/d}`. The exponent is reduced mod `d` first;
/// multiples of a quarter turn come back exact.
pub fn eta_pow(d: usize, e: i64) -> Result<Complex64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(eta_reduced(d, e.rem_euclid(d as i64) as usize))
}

fn eta_reduced(d: usize, e: usize) -> Complex64 {
    if (4 * e).is_multiple_of(d) {
        return match (4 * e) / d {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * e as f64 / d as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Table of `η^0, …, η^{d-1}`, indexed by reduced exponent.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    d: usize,
    powers: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self {
            d,
            powers: (0..d).map(|e| eta_reduced(d, e)).collect(),
        })
    }

    #[inline]
    pub fn pow(&self, e: i64) -> Complex64 {
        self.powers[e.rem_euclid(self.d as i64) as usize]
    }
}

/// A permutation of `Z_d` with `p(0) = 0`. Validity is checked once at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PermutationZd {
    values: Vec<usize>,
}

impl PermutationZd {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let d = values.len();
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if values[0] != 0 {
            return Err(Error::InvalidPermutation(format!(
                "p(0) must be 0, got {}",
                values[0]
            )));
        }
        let mut seen = vec![false; d];
        for &v in &values {
            if v >= d || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{values:?} is not a bijection on Z_{d}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { values })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new((0..d).collect())
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `σ = p⁻¹`, so `σ(p(x)) = x`.
    pub fn invert(&self) -> Self {
        let mut inv = vec![0; self.dim()];
        for (x, &px) in self.values.iter().enumerate() {
            inv[px] = x;
        }
        Self { values: inv }
    }

    /// `x ↦ -p(x) mod d`.
    pub fn negate(&self) -> Self {
        let d = self.dim();
        Self {
            values: self.values.iter().map(|&v| (d - v) % d).collect(),
        }
    }
}

impl TryFrom<Vec<usize>> for PermutationZd {
    type Error = Error;

    fn try_from(values: Vec<usize>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<PermutationZd> for Vec<usize> {
    fn from(p: PermutationZd) -> Self {
        p.values
    }
}

/// Addition table of GF(q) for q ∈ {4, 8, 9}, in the polynomial basis.
///
/// Element `i` encodes the coefficient vector of `i` in base `char`:
/// for GF(4) the order is `0, 1, λ, λ+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfAddTable {
    q: usize,
    table: Vec<Vec<usize>>,
}

#[rustfmt::skip]
const GF4_ADD: [[usize; 4]; 4] = [
    [0, 1, 2, 3],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [3, 2, 1, 0],
];

#[rustfmt::skip]
const GF8_ADD: [[usize; 8]; 8] = [
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 0, 3, 2, 5, 4, 7, 6],
    [2, 3, 0, 1, 6, 7, 4, 5],
    [3, 2, 1, 0, 7, 6, 5, 4],
    [4, 5, 6, 7, 0, 1, 2, 3],
    [5, 4, 7, 6, 1, 0, 3, 2],
    [6, 7, 4, 5, 2, 3, 0, 1],
    [7, 6, 5, 4, 3, 2, 1, 0],
];

// a + bλ stored as a + 3b; addition is digitwise mod 3.
#[rustfmt::skip]
const GF9_ADD: [[usize; 9]; 9] = [
    [0, 1, 2, 3, 4, 5, 6, 7, 8],
    [1, 2, 0, 4, 5, 3, 7, 8, 6],
    [2, 0, 1, 5, 3, 4, 8, 6, 7],
    [3, 4, 5, 6, 7, 8, 0, 1, 2],
    [4, 5, 3, 7, 8, 6, 1, 2, 0],
    [5, 3, 4, 8, 6, 7, 2, 0, 1],
    [6, 7, 8, 0, 1, 2, 3, 4, 5],
    [7, 8, 6, 1, 2, 0, 4, 5, 3],
    [8, 6, 7, 2, 0, 1, 5, 3, 4],
];

impl GfAddTable {
    pub fn for_order(q: usize) -> Result<Self> {
        let table: Vec<Vec<usize>> = match q {
            4 => GF4_ADD.iter().map(|r| r.to_vec()).collect(),
            8 => GF8_ADD.iter().map(|r| r.to_vec()).collect(),
            9 => GF9_ADD.iter().map(|r| r.to_vec()).collect(),
            _ => return Err(Error::UnsupportedField(q)),
        };
        Ok(Self { q, table })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }
}
