//! `circsep`: build circulant densities, analyze PPT and separability,
//! sweep parameter families and render support patterns.

mod report;

use std::fs;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use circsep::algebra::{GfAddTable, PermutationZd};
use circsep::analysis::certify::{analyze, Tolerances};
use circsep::analysis::eigen::is_psd;
use circsep::analysis::structural::from_identity_frame;
use circsep::analysis::sweep::{sweep_threshold, Family, SweepConfig};
use circsep::density::{
    mix_with_identity, random_circulant, random_permutation, DensityMatrix, LineSpec,
};
use circsep::geometry::{gf_support_pattern, support_pattern};
use circsep::io::{to_json_pretty, DensityJson, FamilySpec, Input, PatternJson};
use circsep::Error;

use report::{expected_boundaries, AnalyzeReport, Check, SweepReport};

#[derive(Parser, Debug)]
#[command(name = "circsep", version, about = "Circulant density PPT and separability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a density from a named family or class blocks and write it as JSON.
    Build(BuildArgs),
    /// Run the PPT checks, the spin ℓ1 test and the separability certificate.
    Analyze(AnalyzeArgs),
    /// Scan a one-parameter family and bisect the certificate and PPT edges.
    Sweep(SweepArgs),
    /// Draw the support pattern M_p (or its GF(q) analogue).
    Render(RenderArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Isotropic,
    Werner,
    Divincenzo,
    Horodecki,
    BhnLine,
    TwoProjector,
    /// Seeded random circulant density (pattern from `--permutation` or the seed).
    RandomCirculant,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Svg,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    /// Named family.
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    /// Local dimension.
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Slope of a BHN line `r = s·j + t`.
    #[arg(long)]
    s: Option<usize>,
    /// Offset of a BHN line `r = s·j + t`.
    #[arg(long)]
    t: Option<usize>,
    /// Use the vertical BHN line `j = <value>` instead of a sloped one.
    #[arg(long)]
    vertical: Option<usize>,
    /// Seed for random families.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Class-block JSON file instead of a family.
    #[arg(long, conflicts_with = "family")]
    blocks: Option<PathBuf>,
    /// Mix with the maximally mixed state: (1-t) I/d² + t ρ.
    #[arg(long)]
    mix: Option<f64>,
    /// Move the result onto the pattern M_p, e.g. `0,2,1`.
    #[arg(long, value_delimiter = ',')]
    permutation: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Density, blocks or family JSON file.
    input: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    mix: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    permutation: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1e-9)]
    tol_eig: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_recon: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Fixed `c` for the DiVincenzo family (the sweep runs over `b`).
    #[arg(long, default_value_t = 0.1)]
    c: f64,
    /// Ray `β = κ α` for the two-projector family.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    t: usize,
    #[arg(long)]
    vertical: Option<usize>,
    /// Seed for `random-circulant` (swept along the mixing segment).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Bisection precision.
    #[arg(long, default_value_t = 1e-9)]
    precision: f64,
    /// Include the scan table in the report.
    #[arg(long)]
    scan: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol_eig: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_recon: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, value_delimiter = ',')]
    permutation: Option<Vec<usize>>,
    /// Use the GF(q) addition table (q = 4, 8 or 9) instead of Z_d.
    #[arg(long, conflicts_with_all = ["permutation", "d"])]
    gf: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: msg.into(),
    }
}

fn need(v: Option<f64>, flag: &str, family: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| invalid(format!("--{flag} is required for --family {family}")))
}

fn family_spec(a: &FamilyArgs) -> Result<FamilySpec, Failure> {
    let Some(name) = a.family else {
        return Err(invalid("no input: pass a JSON file or --family"));
    };
    Ok(match name {
        FamilyName::Isotropic => FamilySpec::Isotropic {
            d: a.d,
            lambda: need(a.lambda, "lambda", "isotropic")?,
        },
        FamilyName::Werner => FamilySpec::Werner {
            d: a.d,
            p: need(a.p, "p", "werner")?,
        },
        FamilyName::Divincenzo => FamilySpec::Divincenzo {
            d: a.d,
            b: need(a.b, "b", "divincenzo")?,
            c: need(a.c, "c", "divincenzo")?,
        },
        FamilyName::Horodecki => FamilySpec::Horodecki {
            alpha: need(a.alpha, "alpha", "horodecki")?,
        },
        FamilyName::BhnLine => FamilySpec::BhnLine {
            d: a.d,
            line: match a.vertical {
                Some(j) => LineSpec::Vertical { j },
                None => LineSpec::Sloped {
                    s: a.s.unwrap_or(1),
                    t: a.t.unwrap_or(0),
                },
            },
        },
        FamilyName::TwoProjector => FamilySpec::TwoProjector {
            alpha: need(a.alpha, "alpha", "two-projector")?,
            beta: need(a.beta, "beta", "two-projector")?,
        },
        FamilyName::RandomCirculant => unreachable!("handled by family_density"),
    })
}

/// Density, input echo and partial-transpose flag for the family flags.
fn family_density(
    a: &FamilyArgs,
    perm: &Option<PermutationZd>,
) -> Result<(DensityMatrix, serde_json::Value, bool), Failure> {
    if a.family == Some(FamilyName::RandomCirculant) {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let p = match perm {
            Some(p) => p.clone(),
            None => {
                if a.d < 2 {
                    return Err(Error::InvalidDimension(a.d).into());
                }
                random_permutation(a.d, &mut rng)
            }
        };
        let rho = random_circulant(&p, &mut rng);
        let echo = serde_json::json!({
            "family": "random_circulant",
            "d": p.dim(),
            "seed": a.seed,
            "permutation": p,
        });
        return Ok((rho, echo, false));
    }
    let spec = family_spec(a)?;
    let echo = serde_json::to_value(&spec)?;
    let pt_form = spec.is_pt_form();
    Ok((spec.build()?, echo, pt_form))
}

fn permutation(v: &Option<Vec<usize>>) -> Result<Option<PermutationZd>, Failure> {
    v.clone().map(PermutationZd::new).transpose().map_err(Failure::from)
}

/// Optional mixing and relabeling onto `M_p`.
fn post_process(
    rho: DensityMatrix,
    mix: Option<f64>,
    perm: Option<PermutationZd>,
) -> Result<DensityMatrix, Failure> {
    let rho = match mix {
        Some(t) => mix_with_identity(&rho, t)?,
        None => rho,
    };
    Ok(match perm {
        Some(p) if rho.permutation() == Some(&p) => rho,
        Some(p) if !p.is_identity() => {
            if rho.permutation().is_some_and(|q| !q.is_identity()) {
                return Err(invalid("--permutation needs an identity-pattern input"));
            }
            let m = from_identity_frame(rho.matrix(), &p);
            DensityMatrix::new(rho.dim(), m, Some(p))?
        }
        _ => rho,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn color_enabled(out: &Option<PathBuf>) -> bool {
    out.is_none() && std::env::var_os("CIRCSEP_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn cmd_build(a: &BuildArgs) -> Result<(), Failure> {
    let perm = permutation(&a.permutation)?;
    let rho = match &a.blocks {
        Some(path) => Input::parse(&fs::read_to_string(path)?)?.build()?,
        None => family_density(&a.family, &perm)?.0,
    };
    let rho = post_process(rho, a.mix, perm)?;
    emit(&a.out, &(to_json_pretty(&DensityJson::from_density(&rho))? + "\n"))
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let perm = permutation(&a.permutation)?;
    let (rho, echo, pt_form) = match &a.input {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let input = Input::from_value(value.clone())?;
            let pt_form = matches!(&input, Input::Family(f) if f.is_pt_form());
            (input.build()?, value, pt_form)
        }
        None => family_density(&a.family, &perm)?,
    };
    let rho = post_process(rho, a.mix, perm)?;
    let tol = Tolerances {
        eig: a.tol_eig,
        recon: a.tol_recon,
    };
    if !(tol.eig > 0.0 && tol.recon > 0.0) {
        return Err(invalid("tolerances must be positive"));
    }

    let report = if pt_form {
        // the built matrix is ρ^Γ; if it is not positive the state is NPT
        let (psd, min_eig) = is_psd(rho.matrix(), tol.eig)?;
        if psd {
            AnalyzeReport::new(echo, &analyze(&rho, &tol)?, true, &tol)
        } else {
            AnalyzeReport::npt_partial_transpose(echo, &rho, min_eig, &tol)?
        }
    } else {
        AnalyzeReport::new(echo, &analyze(&rho, &tol)?, false, &tol)
    };
    let report = report.with_timing(started.elapsed());
    let text = match a.format {
        Format::Json | Format::Svg => to_json_pretty(&report)? + "\n",
        Format::Text => report.to_text(color_enabled(&a.out)),
    };
    emit(&a.out, &text)?;
    if report.checks.iter().any(|c: &Check| !c.passed) {
        return Err(Failure {
            code: 3,
            message: "internal consistency check failed; see report".into(),
        });
    }
    Ok(())
}

fn sweep_family(a: &SweepArgs) -> Family {
    match a.family {
        FamilyName::Isotropic => Family::isotropic(a.d),
        FamilyName::Werner => Family::werner(a.d),
        FamilyName::Divincenzo => Family::divincenzo_b(a.d, a.c),
        FamilyName::Horodecki => Family::horodecki(),
        FamilyName::BhnLine => Family::bhn_line_mixture(
            a.d,
            match a.vertical {
                Some(j) => LineSpec::Vertical { j },
                None => LineSpec::Sloped { s: a.s, t: a.t },
            },
        ),
        FamilyName::TwoProjector => Family::two_projector_ray(a.kappa),
        FamilyName::RandomCirculant => {
            let d = a.d;
            let seed = a.seed;
            Family::new(format!("random-circulant(d={d},seed={seed})"), false, (0.0, 1.0), move |t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let p = random_permutation(d, &mut rng);
                mix_with_identity(&random_circulant(&p, &mut rng), t)
            })
        }
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let family = sweep_family(a);
    let mut cfg = SweepConfig::new(a.lo.unwrap_or(family.range.0), a.hi.unwrap_or(family.range.1));
    cfg.steps = a.steps;
    cfg.precision = a.precision;
    let tol = Tolerances {
        eig: a.tol_eig,
        recon: a.tol_recon,
    };
    let result = sweep_threshold(&family, &cfg, &tol)?;
    let expected = expected_boundaries(a.family_key(), a.d);
    let report = SweepReport::new(result, cfg, expected, a.scan).with_timing(started.elapsed());
    let text = match a.format {
        Format::Json | Format::Svg => to_json_pretty(&report)? + "\n",
        Format::Text => report.to_text(),
    };
    emit(&a.out, &text)
}

impl SweepArgs {
    fn family_key(&self) -> &'static str {
        match self.family {
            FamilyName::Isotropic => "isotropic",
            FamilyName::Werner => "werner",
            FamilyName::Divincenzo => "divincenzo",
            FamilyName::Horodecki => "horodecki",
            FamilyName::BhnLine => "bhn-line",
            FamilyName::TwoProjector => "two-projector",
            FamilyName::RandomCirculant => "random-circulant",
        }
    }
}

fn cmd_render(a: &RenderArgs) -> Result<(), Failure> {
    let pattern = match a.gf {
        Some(q) => gf_support_pattern(&GfAddTable::for_order(q)?),
        None => {
            let p = match permutation(&a.permutation)? {
                Some(p) => p,
                None => PermutationZd::identity(a.d)?,
            };
            support_pattern(&p)
        }
    };
    let text = match a.format {
        Format::Text => pattern.render_text(),
        Format::Svg => pattern.render_svg(),
        Format::Json => to_json_pretty(&PatternJson::from_pattern(&pattern))? + "\n",
    };
    emit(&a.out, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Render(a) => cmd_render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("circsep: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
