//! JSON formats for densities, class blocks, patterns and analysis reports.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major arrays of
//! rows.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::PermutationZd;
use crate::analysis::certify::{AnalysisReport, CertificateTerm, Verdict};
use crate::density::{self, ClassBlocks, DensityMatrix, LineSpec, ProductEntrySpec};
use crate::geometry::SupportPattern;
use crate::matrix::CMatrix;
use crate::{Complex64, Error, Result};

fn rows_of(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn matrix_of(rows: &[Vec<Complex64>], n: usize) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rows.len(),
        });
    }
    Ok(CMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

/// Explicit density: `{d, permutation?, entries}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityJson {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<PermutationZd>,
    pub entries: Vec<Vec<Complex64>>,
}

impl DensityJson {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            d: rho.dim(),
            permutation: rho.permutation().cloned(),
            entries: rows_of(rho.matrix()),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let m = matrix_of(&self.entries, self.d * self.d)?;
        DensityMatrix::new(self.d, m, self.permutation.clone())
    }
}

/// Class blocks: `{d, permutation, blocks}` with `d` blocks of `d × d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlocksJson {
    pub d: usize,
    pub permutation: PermutationZd,
    pub blocks: Vec<Vec<Vec<Complex64>>>,
}

impl BlocksJson {
    pub fn from_blocks(b: &ClassBlocks) -> Self {
        Self {
            d: b.d,
            permutation: b.permutation.clone(),
            blocks: b.blocks.iter().map(rows_of).collect(),
        }
    }

    pub fn to_blocks(&self) -> Result<ClassBlocks> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| matrix_of(b, self.d))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassBlocks {
            d: self.d,
            permutation: self.permutation.clone(),
            blocks,
        })
    }
}

/// Pattern: `{d, permutation, classes}`, each class a list of `[row, col]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternJson {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<PermutationZd>,
    pub classes: Vec<Vec<(usize, usize)>>,
}

impl PatternJson {
    pub fn from_pattern(p: &SupportPattern) -> Self {
        Self {
            d: p.dim(),
            permutation: p.permutation().cloned(),
            classes: p.classes().iter().map(|c| c.positions.clone()).collect(),
        }
    }
}

/// Named family shorthand, tagged by `"family"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Isotropic { d: usize, lambda: f64 },
    Werner { d: usize, p: f64 },
    Divincenzo { d: usize, b: f64, c: f64 },
    Horodecki { alpha: f64 },
    /// Weights `c_{j,r}`, row-major in `(j, r)`.
    Bhn { d: usize, weights: Vec<f64> },
    BhnLine { d: usize, line: LineSpec },
    TwoProjector { alpha: f64, beta: f64 },
    ConstantClasses { d: usize, c: Vec<f64>, diagonal: Vec<f64> },
    ProductEntry(ProductEntrySpec),
}

impl FamilySpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            FamilySpec::Isotropic { d, lambda } => density::isotropic(*d, *lambda),
            FamilySpec::Werner { d, p } => density::werner(*d, *p),
            FamilySpec::Divincenzo { d, b, c } => density::divincenzo(*d, *b, *c),
            FamilySpec::Horodecki { alpha } => density::horodecki_alpha(*alpha),
            FamilySpec::Bhn { d, weights } => density::bhn_density(*d, weights),
            FamilySpec::BhnLine { d, line } => density::bhn_line_state(*d, *line),
            FamilySpec::TwoProjector { alpha, beta } => density::bhn_two_projector(*alpha, *beta),
            FamilySpec::ConstantClasses { d, c, diagonal } => {
                density::constant_classes(*d, c, diagonal)
            }
            FamilySpec::ProductEntry(spec) => density::product_entry_density(spec),
        }
    }

    /// Families whose built matrix is the partial transpose of the state.
    pub fn is_pt_form(&self) -> bool {
        matches!(self, FamilySpec::Werner { .. } | FamilySpec::Divincenzo { .. })
    }
}

/// Any accepted input document.
#[derive(Debug, Clone)]
pub enum Input {
    Family(FamilySpec),
    Blocks(BlocksJson),
    Density(DensityJson),
}

impl Input {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self> {
        if v.get("family").is_some() {
            Ok(Input::Family(serde_json::from_value(v)?))
        } else if v.get("blocks").is_some() {
            Ok(Input::Blocks(serde_json::from_value(v)?))
        } else if v.get("entries").is_some() {
            Ok(Input::Density(serde_json::from_value(v)?))
        } else {
            Err(Error::InvalidArgument(
                "input needs one of `family`, `blocks` or `entries`".into(),
            ))
        }
    }

    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            Input::Family(f) => f.build(),
            Input::Blocks(b) => density::from_class_blocks(&b.to_blocks()?),
            Input::Density(d) => d.to_density(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub terms: Vec<CertificateTerm>,
    pub identity_weight: f64,
    pub remainder: Vec<f64>,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_relabel: Option<PermutationZd>,
}

/// Verdict payload:
/// `{verdict, l1_sum, mu_sum, min_diag, ppt_min_eigs, certificate, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub verdict: String,
    pub l1_sum: f64,
    pub l1_condition: bool,
    pub mu_sum: Option<f64>,
    pub min_diag: f64,
    pub shortfall: Option<f64>,
    pub positivity_min_eigs: Vec<f64>,
    pub ppt_min_eigs: Vec<f64>,
    pub ppt_witness: Option<usize>,
    pub ppt_blocks_passed: bool,
    pub ppt_full_passed: bool,
    pub ppt_full_min: f64,
    pub certificate: Option<CertificateJson>,
}

impl VerdictJson {
    pub fn from_report(rep: &AnalysisReport) -> Self {
        let shortfall = match &rep.verdict {
            Verdict::Inconclusive { shortfall, .. } => *shortfall,
            _ => None,
        };
        let certificate = rep.verdict.certificate().map(|c| CertificateJson {
            terms: c.terms.clone(),
            identity_weight: c.identity_weight,
            remainder: c.remainder.clone(),
            residual: c.residual,
            left_relabel: c.left_relabel.clone(),
        });
        Self {
            verdict: rep.verdict.name().to_string(),
            l1_sum: rep.l1_sum,
            l1_condition: rep.l1_condition,
            mu_sum: rep.mu_sum,
            min_diag: rep.min_diag,
            shortfall,
            positivity_min_eigs: rep.positivity_min_eigs.clone(),
            ppt_min_eigs: rep.ppt.min_eigs.clone(),
            ppt_witness: rep.ppt.witness,
            ppt_blocks_passed: rep.ppt.passed,
            ppt_full_passed: rep.ppt_full_passed,
            ppt_full_min: rep.ppt_full_min,
            certificate,
        }
    }
}

pub fn to_json_pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::certify::{analyze, Tolerances};
    use crate::density::{isotropic, random_circulant, to_class_blocks};
    use crate::geometry::support_pattern;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn density_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = PermutationZd::new(vec![0, 2, 4, 1, 3]).unwrap();
        let rho = random_circulant(&p, &mut rng);
        let text = to_json_pretty(&DensityJson::from_density(&rho)).unwrap();
        let back = Input::parse(&text).unwrap().build().unwrap();
        assert_eq!(back.matrix(), rho.matrix());
        assert_eq!(back.permutation(), Some(&p));
    }

    #[test]
    fn blocks_round_trip() {
        let rho = isotropic(3, 0.2).unwrap();
        let b = to_class_blocks(rho.matrix(), rho.permutation().unwrap());
        let text = serde_json::to_string(&BlocksJson::from_blocks(&b)).unwrap();
        let back = Input::parse(&text).unwrap().build().unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn family_shorthand() {
        let input = Input::parse(r#"{"family": "isotropic", "d": 3, "lambda": 0.25}"#).unwrap();
        assert_eq!(input.build().unwrap().matrix(), isotropic(3, 0.25).unwrap().matrix());
        let line = Input::parse(r#"{"family": "bhn_line", "d": 3, "line": {"sloped": {"s": 1, "t": 2}}}"#)
            .unwrap();
        assert!(line.build().is_ok());
        assert!(Input::parse(r#"{"family": "nope"}"#).is_err());
        assert!(Input::parse(r#"{"d": 3}"#).is_err());
    }

    #[test]
    fn entries_are_re_im_pairs() {
        let rho = isotropic(2, 0.0).unwrap();
        let v: Value = serde_json::to_value(DensityJson::from_density(&rho)).unwrap();
        assert_eq!(v["entries"][0][0], serde_json::json!([0.25, 0.0]));
        assert_eq!(v["permutation"], serde_json::json!([0, 1]));
    }

    #[test]
    fn pattern_json_lists_classes() {
        let pat = support_pattern(&PermutationZd::identity(3).unwrap());
        let v = serde_json::to_value(PatternJson::from_pattern(&pat)).unwrap();
        assert_eq!(v["classes"].as_array().unwrap().len(), 3);
        assert_eq!(v["classes"][0][0], serde_json::json!([0, 0]));
    }

    #[test]
    fn verdict_payload_fields() {
        let rep = analyze(&isotropic(3, 0.2).unwrap(), &Tolerances::default()).unwrap();
        let v = serde_json::to_value(VerdictJson::from_report(&rep)).unwrap();
        for key in ["verdict", "l1_sum", "mu_sum", "min_diag", "ppt_min_eigs", "certificate"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "separable");
        let cert = &v["certificate"];
        for key in ["terms", "identity_weight", "remainder", "residual"] {
            assert!(cert.get(key).is_some(), "{key}");
        }
        for key in ["weight", "a1", "m1", "a2", "m2"] {
            assert!(cert["terms"][0].get(key).is_some());
        }
    }
}
