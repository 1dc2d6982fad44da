//! Command-line front end: verification suites, (N,K) catalog operations,
//! and field diagnostics, all emitting machine-readable JSON.
//!
//! Exit codes: 0 success, 1 check or assertion failure, 2 usage or input
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mdirac::commutant::lie_algebra_basis;
use mdirac::dirac::{
    build_plane_wave, current_j, dirac_residual, divergence, kg_residual, on_shell_momentum,
};
use mdirac::field::PointField;
use mdirac::gamma::GammaSet;
use mdirac::gauge::{polar_gauge, GaugeField};
use mdirac::jsonio::{
    CanonicalJson, FourierFieldJson, MatrixJson, NkPairJson, PlaneWaveJson, ValidationJson,
};
use mdirac::linalg::{CMat, Tolerances, C64};
use mdirac::nk::{classify, validate_consistency, validate_two_level, CanonicalPair, NkPair};
use mdirac::report::RunConfig;
use mdirac::rng::Rng;
use mdirac::suites;

#[derive(Parser)]
#[command(
    name = "mdirac",
    version,
    about = "Matrix Dirac equation toolkit: verification suites, (N,K) catalog, and field diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite and emit a JSON report.
    VerifyAll(VerifyArgs),
    /// Construct, validate, and classify (N,K) parameter pairs.
    #[command(subcommand)]
    Nk(NkCmd),
    /// Plane-wave solutions, residuals, currents, and the polar gauge.
    #[command(subcommand)]
    Field(FieldCmd),
}

#[derive(Args)]
struct VerifyArgs {
    /// Default matrix size for size-flexible suites.
    #[arg(long, default_value_t = 4)]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random trials per check.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Relative tolerance for validators and rank decisions.
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
    /// Singular-value cutoff factor for null spaces.
    #[arg(long, default_value_t = 1e-10)]
    rank_cut: f64,
    /// Sample points per field check.
    #[arg(long = "samples", default_value_t = 10)]
    samples: usize,
    /// Write the JSON report here and print a per-check summary instead.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Record per-check wall-clock times (breaks byte determinism).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum NkCmd {
    /// Build a pair and print it as JSON.
    Construct(ConstructArgs),
    /// Print consistency and structure residuals for a pair.
    Validate(ValidateArgs),
    /// Recover the canonical description of a pair.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Diagonalizable family from per-column values z_k, y_k.
    #[arg(long, conflicts_with_all = ["example2", "canonical_angles", "canonical_signs"])]
    example1: bool,
    /// 4×4 Jordan-block family from a single (z, y).
    #[arg(long)]
    example2: bool,
    /// Two-angle canonical form (needs --p, --q, --xi, --eta).
    #[arg(long, conflicts_with = "canonical_signs")]
    canonical_angles: bool,
    /// Common-angle sign form (needs --xi, --signs).
    #[arg(long)]
    canonical_signs: bool,
    /// Complex values "re[,im]"; separate list entries with ';'.
    #[arg(long, value_delimiter = ';')]
    z: Vec<String>,
    #[arg(long, value_delimiter = ';')]
    y: Vec<String>,
    /// Similarity matrix as a matrix-JSON file (defaults to the identity).
    #[arg(long)]
    v: Option<PathBuf>,
    /// Unitary frame as a matrix-JSON file (defaults to the identity).
    #[arg(long)]
    u: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Sign pattern like "+-+" or "1,-1,1".
    #[arg(long)]
    signs: Option<String>,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// NkPair JSON file.
    #[arg(long)]
    file: PathBuf,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
    /// Exit 1 when the consistency condition fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
}

/// Where field commands take their pair from.
#[derive(Args)]
struct PairSource {
    /// NkPair JSON file.
    #[arg(long)]
    nk: Option<PathBuf>,
    /// Standard pair N = 1, K = 0 of size --l.
    #[arg(long)]
    standard: bool,
    /// Jordan-block pair from --z, --y.
    #[arg(long)]
    example2: bool,
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long, default_value_t = 4)]
    l: usize,
}

#[derive(Subcommand)]
enum FieldCmd {
    /// Solve the amplitude equation at a given momentum.
    Planewave(PlanewaveArgs),
    /// Residual sup-norms of a random solution at sample points.
    Residual(ResidualArgs),
    /// Projected current samples for a random solution.
    Current(CurrentArgs),
    /// Divergence of the projected current.
    Divergence(DivergenceArgs),
    /// Polar-gauge samples of a full-rank solution (l = 4, scalar pair).
    Polar(PolarArgs),
}

#[derive(Args)]
struct PlanewaveArgs {
    #[command(flatten)]
    source: PairSource,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Covariant momentum "p0,p1,p2,p3".
    #[arg(long)]
    p: String,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct ResidualArgs {
    #[command(flatten)]
    source: PairSource,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Covariant momentum; an on-shell one is drawn from --seed when omitted.
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "samples", default_value_t = 10)]
    samples: usize,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
    /// Exit 1 unless the Dirac residual is at most 1e-10 relative.
    #[arg(long)]
    assert_zero: bool,
}

#[derive(Args)]
struct CurrentArgs {
    #[command(flatten)]
    source: PairSource,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "samples", default_value_t = 10)]
    samples: usize,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct DivergenceArgs {
    #[command(flatten)]
    source: PairSource,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "samples", default_value_t = 10)]
    samples: usize,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
    /// Exit 1 unless the divergence is at most 1e-9 of the current scale.
    #[arg(long)]
    assert_zero: bool,
}

#[derive(Args)]
struct PolarArgs {
    /// Common angle: N = cos(ξ)·1, K = sin(ξ)·1 at l = 4.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "samples", default_value_t = 10)]
    samples: usize,
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse::<f64>()
            .map(|r| C64::new(r, 0.0))
            .map_err(|e| format!("bad complex value {s:?}: {e}")),
        [re, im] => {
            let r = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
            let i = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
            Ok(C64::new(r, i))
        }
        _ => Err(format!("bad complex value {s:?}; expected re or re,im")),
    }
}

fn parse_complex_list(items: &[String]) -> Result<Vec<C64>, String> {
    let mut out = Vec::new();
    for item in items {
        out.push(parse_complex(item)?);
    }
    Ok(out)
}

fn parse_momentum(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad momentum {s:?}: {e}"))?;
    parts
        .try_into()
        .map_err(|_| format!("momentum needs four components, got {s:?}"))
}

fn parse_signs(s: &str) -> Result<Vec<i8>, String> {
    if s.contains(',') {
        s.split(',')
            .map(|v| match v.trim() {
                "1" | "+1" | "+" => Ok(1),
                "-1" | "-" => Ok(-1),
                other => Err(format!("bad sign {other:?}")),
            })
            .collect()
    } else {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(format!("bad sign {other:?}")),
            })
            .collect()
    }
}

fn load_matrix(path: &Path) -> anyhow::Result<CMat> {
    let text = std::fs::read_to_string(path)?;
    let json: MatrixJson = serde_json::from_str(&text)?;
    Ok(json.to_matrix()?)
}

fn load_pair(path: &Path, tol: &Tolerances) -> anyhow::Result<NkPair> {
    let text = std::fs::read_to_string(path)?;
    let json: NkPairJson = serde_json::from_str(&text)?;
    Ok(json.to_pair(tol)?)
}

fn resolve_pair(source: &PairSource, tol: &Tolerances) -> anyhow::Result<NkPair> {
    if let Some(path) = &source.nk {
        return load_pair(path, tol);
    }
    if source.example2 {
        let z = parse_complex(source.z.as_deref().unwrap_or("0")).map_err(anyhow::Error::msg)?;
        let y = parse_complex(source.y.as_deref().unwrap_or("1")).map_err(anyhow::Error::msg)?;
        return Ok(NkPair::example2(z, y, &CMat::identity(4, 4), tol)?);
    }
    // --standard, also the fallback.
    Ok(NkPair::standard(source.l, tol)?)
}

fn seeded_on_shell(rng: &mut Rng, m: f64) -> [f64; 4] {
    on_shell_momentum(
        m,
        [
            rng.range(-1.0, 1.0),
            rng.range(-1.0, 1.0),
            rng.range(-1.0, 1.0),
        ],
        true,
    )
}

fn sample_points(rng: &mut Rng, n: usize) -> Vec<[f64; 4]> {
    (0..n)
        .map(|_| {
            [
                rng.range(-2.0, 2.0),
                rng.range(-2.0, 2.0),
                rng.range(-2.0, 2.0),
                rng.range(-2.0, 2.0),
            ]
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_verify_all(args: &VerifyArgs) -> anyhow::Result<u8> {
    let cfg = RunConfig {
        l: args.l,
        seed: args.seed,
        trials: args.trials,
        sample_points: args.samples,
        tol: Tolerances::new(args.tol, args.rank_cut)?,
        timings: args.timings,
    };
    let report = suites::verify_all(&cfg)?;
    match &args.json {
        Some(path) => {
            std::fs::write(path, report.to_json())?;
            for line in report.summary_lines() {
                println!("{line}");
            }
            println!(
                "{} passed, {} failed -> {}",
                report.passed,
                report.failed,
                path.display()
            );
        }
        None => println!("{}", report.to_json()),
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn cmd_construct(args: &ConstructArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let pair = if args.example2 {
        let z = parse_complex(args.z.first().map(String::as_str).unwrap_or("0"))
            .map_err(anyhow::Error::msg)?;
        let y = parse_complex(args.y.first().map(String::as_str).unwrap_or("1"))
            .map_err(anyhow::Error::msg)?;
        let v = match &args.v {
            Some(path) => load_matrix(path)?,
            None => CMat::identity(4, 4),
        };
        NkPair::example2(z, y, &v, &tol)?
    } else if args.example1 {
        let z = parse_complex_list(&args.z).map_err(anyhow::Error::msg)?;
        let y = parse_complex_list(&args.y).map_err(anyhow::Error::msg)?;
        let l = z.len();
        let v = match &args.v {
            Some(path) => load_matrix(path)?,
            None => CMat::identity(l, l),
        };
        NkPair::example1(&z, &y, &v, &tol)?
    } else if args.canonical_angles || args.canonical_signs {
        let form = if args.canonical_angles {
            let p = args.p.ok_or_else(|| anyhow::anyhow!("--p required"))?;
            let q = args.q.ok_or_else(|| anyhow::anyhow!("--q required"))?;
            mdirac::nk::CanonicalForm::Angles {
                p,
                q,
                xi: args.xi.ok_or_else(|| anyhow::anyhow!("--xi required"))?,
                eta: args.eta.unwrap_or(0.0),
            }
        } else {
            let signs = parse_signs(
                args.signs
                    .as_deref()
                    .ok_or_else(|| anyhow::anyhow!("--signs required"))?,
            )
            .map_err(anyhow::Error::msg)?;
            mdirac::nk::CanonicalForm::Signs {
                xi: args.xi.ok_or_else(|| anyhow::anyhow!("--xi required"))?,
                signs_n: signs.clone(),
                signs_k: signs,
            }
        };
        let l = match &form {
            mdirac::nk::CanonicalForm::Angles { p, q, .. } => p + q,
            mdirac::nk::CanonicalForm::Signs { signs_n, .. } => signs_n.len(),
        };
        let u = match &args.u {
            Some(path) => load_matrix(path)?,
            None => CMat::identity(l, l),
        };
        NkPair::canonical(&CanonicalPair { form, u }, &tol)?
    } else {
        anyhow::bail!(
            "choose a constructor: --example1, --example2, --canonical-angles, or --canonical-signs"
        );
    };
    let json = serde_json::to_string_pretty(&NkPairJson::from_pair(&pair))?;
    emit(&args.out, &json)?;
    Ok(0)
}

fn cmd_validate(args: &ValidateArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let pair = load_pair(&args.file, &tol)?;
    let report = validate_consistency(&pair.n, &pair.k, &tol)?;
    let two_level = validate_two_level(&pair.n, &pair.k, &tol)?;
    let out = ValidationJson {
        l: pair.l,
        commutator_residual: report.commutator_residual,
        completeness_residual: report.completeness_residual,
        consistent: report.ok,
        two_level,
        hermitian: pair.hermitian,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if args.strict && !report.ok { 1 } else { 0 })
}

fn cmd_classify(args: &ClassifyArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let pair = load_pair(&args.file, &tol)?;
    let canon = classify(&pair.n, &pair.k, &tol)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&CanonicalJson::from_canonical(&canon))?
    );
    Ok(0)
}

fn cmd_planewave(args: &PlanewaveArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let gamma = GammaSet::dirac();
    let pair = resolve_pair(&args.source, &tol)?;
    let p = parse_momentum(&args.p).map_err(anyhow::Error::msg)?;
    let sol = build_plane_wave(p, &pair, args.m, &tol, &gamma);
    println!(
        "{}",
        serde_json::to_string_pretty(&PlaneWaveJson::from_solution(&sol))?
    );
    Ok(0)
}

#[derive(serde::Serialize)]
struct ResidualReport {
    p: [f64; 4],
    m: f64,
    dimension: usize,
    dirac_residual_sup: f64,
    kg_residual_sup: f64,
    field_scale: f64,
}

fn build_solution_field(
    pair: &NkPair,
    m: f64,
    p: Option<[f64; 4]>,
    seed: u64,
    tol: &Tolerances,
    gamma: &GammaSet,
) -> anyhow::Result<(mdirac::field::FourierField, [f64; 4], usize, Rng)> {
    let mut rng = Rng::new(seed);
    let p = p.unwrap_or_else(|| seeded_on_shell(&mut rng, m));
    let sol = build_plane_wave(p, pair, m, tol, gamma);
    if sol.dimension() == 0 {
        anyhow::bail!("empty solution space at momentum {p:?} (off shell?)");
    }
    let psi = sol.random_field(&mut rng)?;
    Ok((psi, p, sol.dimension(), rng))
}

fn cmd_residual(args: &ResidualArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let gamma = GammaSet::dirac();
    let pair = resolve_pair(&args.source, &tol)?;
    let p = match &args.p {
        Some(s) => Some(parse_momentum(s).map_err(anyhow::Error::msg)?),
        None => None,
    };
    let (psi, p, dimension, mut rng) =
        build_solution_field(&pair, args.m, p, args.seed, &tol, &gamma)?;
    let pts = sample_points(&mut rng, args.samples);
    let scale = psi.coeff_norm().max(1.0);
    let dres = dirac_residual(&psi, &pair, args.m, &gamma)?;
    let kres = kg_residual(&psi, args.m);
    let sup = |f: &mdirac::field::FourierField| {
        pts.iter().map(|&x| f.value(x).norm()).fold(0.0, f64::max)
    };
    let report = ResidualReport {
        p,
        m: args.m,
        dimension,
        dirac_residual_sup: sup(&dres) / scale,
        kg_residual_sup: sup(&kres) / scale,
        field_scale: scale,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if args.assert_zero && report.dirac_residual_sup > 1e-10 {
        1
    } else {
        0
    })
}

#[derive(serde::Serialize)]
struct CurrentReport {
    p: [f64; 4],
    m: f64,
    lie_dimension: usize,
    components: Vec<FourierFieldJson>,
    samples: Vec<CurrentSample>,
}

#[derive(serde::Serialize)]
struct CurrentSample {
    x: [f64; 4],
    j: Vec<MatrixJson>,
}

fn cmd_current(args: &CurrentArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let gamma = GammaSet::dirac();
    let pair = resolve_pair(&args.source, &tol)?;
    let p = match &args.p {
        Some(s) => Some(parse_momentum(s).map_err(anyhow::Error::msg)?),
        None => None,
    };
    let (psi, p, _, mut rng) = build_solution_field(&pair, args.m, p, args.seed, &tol, &gamma)?;
    let basis = lie_algebra_basis(&pair.n, &pair.k, &tol)?;
    let j = current_j(&psi, &basis, &gamma)?;
    let pts = sample_points(&mut rng, args.samples);
    let samples = pts
        .iter()
        .map(|&x| CurrentSample {
            x,
            j: (0..4)
                .map(|nu| MatrixJson::from_matrix(&j.comps[nu].value(x)))
                .collect(),
        })
        .collect();
    let report = CurrentReport {
        p,
        m: args.m,
        lie_dimension: basis.dim_r,
        components: j.comps.iter().map(FourierFieldJson::from_field).collect(),
        samples,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

#[derive(serde::Serialize)]
struct DivergenceReport {
    p1: [f64; 4],
    p2: Option<[f64; 4]>,
    m: f64,
    divergence_sup: f64,
    current_scale: f64,
    ratio: f64,
}

fn cmd_divergence(args: &DivergenceArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let gamma = GammaSet::dirac();
    let pair = resolve_pair(&args.source, &tol)?;
    let mut rng = Rng::new(args.seed);
    let (p1, p2) = match &args.p {
        Some(s) => (parse_momentum(s).map_err(anyhow::Error::msg)?, None),
        None => (
            seeded_on_shell(&mut rng, args.m),
            Some(seeded_on_shell(&mut rng, args.m)),
        ),
    };
    let s1 = build_plane_wave(p1, &pair, args.m, &tol, &gamma);
    if s1.dimension() == 0 {
        anyhow::bail!("empty solution space at momentum {p1:?}");
    }
    let mut psi = s1.random_field(&mut rng)?;
    if let Some(p2) = p2 {
        let s2 = build_plane_wave(p2, &pair, args.m, &tol, &gamma);
        if s2.dimension() > 0 {
            psi = psi.add(&s2.random_field(&mut rng)?)?;
        }
    }
    let basis = lie_algebra_basis(&pair.n, &pair.k, &tol)?;
    let j = current_j(&psi, &basis, &gamma)?;
    let div = divergence(&j);
    let pts = sample_points(&mut rng, args.samples);
    let sup = |f: &mdirac::field::FourierField| {
        pts.iter().map(|&x| f.value(x).norm()).fold(0.0, f64::max)
    };
    let current_scale = j.comps.iter().map(&sup).fold(1.0, f64::max);
    let divergence_sup = sup(&div);
    let report = DivergenceReport {
        p1,
        p2,
        m: args.m,
        divergence_sup,
        current_scale,
        ratio: divergence_sup / current_scale,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if args.assert_zero && report.ratio > 1e-9 { 1 } else { 0 })
}

#[derive(serde::Serialize)]
struct PolarReport {
    xi: f64,
    m: f64,
    samples: Vec<PolarSampleJson>,
}

#[derive(serde::Serialize)]
struct PolarSampleJson {
    x: [f64; 4],
    psi_prime: MatrixJson,
    a_prime: Vec<MatrixJson>,
    v: MatrixJson,
    hermitian_deviation: f64,
    min_eigenvalue: f64,
    density_deviation: f64,
}

fn cmd_polar(args: &PolarArgs) -> anyhow::Result<u8> {
    let tol = Tolerances::new(args.tol, 1e-10)?;
    let gamma = GammaSet::dirac();
    let xi = args.xi;
    let pair = NkPair::example1(
        &[C64::new(xi.cos(), 0.0); 4],
        &[C64::new(xi.sin(), 0.0); 4],
        &CMat::identity(4, 4),
        &tol,
    )?;
    let mut rng = Rng::new(args.seed);
    let p1 = seeded_on_shell(&mut rng, args.m);
    let p2 = on_shell_momentum(
        args.m,
        [
            rng.range(-1.0, 1.0),
            rng.range(-1.0, 1.0),
            rng.range(-1.0, 1.0),
        ],
        false,
    );
    let s1 = build_plane_wave(p1, &pair, args.m, &tol, &gamma);
    let s2 = build_plane_wave(p2, &pair, args.m, &tol, &gamma);
    if s1.dimension() == 0 || s2.dimension() == 0 {
        anyhow::bail!("empty solution space for the polar configuration");
    }
    let psi = s1.random_field(&mut rng)?.add(&s2.random_field(&mut rng)?)?;
    let mut samples = Vec::with_capacity(args.samples);
    let mut attempts = 0;
    while samples.len() < args.samples && attempts < 100 * args.samples {
        attempts += 1;
        let x = [
            rng.range(-2.0, 2.0),
            rng.range(-2.0, 2.0),
            rng.range(-2.0, 2.0),
            rng.range(-2.0, 2.0),
        ];
        let svd = psi.value(x).svd(false, false);
        if svd.singular_values.min() > 1e-3 * svd.singular_values.max() {
            samples.push(x);
        }
    }
    let a = GaugeField::zero(4);
    let result = polar_gauge(&psi, &a, &pair, &samples, &tol)?;
    let samples = result
        .iter()
        .map(|s| {
            let before = psi.value(s.x) * psi.value(s.x).adjoint();
            let after = &s.psi_prime * s.psi_prime.adjoint();
            PolarSampleJson {
                x: s.x,
                psi_prime: MatrixJson::from_matrix(&s.psi_prime),
                a_prime: s.a_prime.iter().map(MatrixJson::from_matrix).collect(),
                v: MatrixJson::from_matrix(&s.v),
                hermitian_deviation: mdirac::linalg::hermitian_deviation(&s.psi_prime),
                min_eigenvalue: mdirac::linalg::hermitian_eigenvalues(&s.psi_prime)[0],
                density_deviation: (before - after).norm(),
            }
        })
        .collect();
    let report = PolarReport {
        xi,
        m: args.m,
        samples,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match &cli.command {
        Command::VerifyAll(args) => cmd_verify_all(args),
        Command::Nk(NkCmd::Construct(args)) => cmd_construct(args),
        Command::Nk(NkCmd::Validate(args)) => cmd_validate(args),
        Command::Nk(NkCmd::Classify(args)) => cmd_classify(args),
        Command::Field(FieldCmd::Planewave(args)) => cmd_planewave(args),
        Command::Field(FieldCmd::Residual(args)) => cmd_residual(args),
        Command::Field(FieldCmd::Current(args)) => cmd_current(args),
        Command::Field(FieldCmd::Divergence(args)) => cmd_divergence(args),
        Command::Field(FieldCmd::Polar(args)) => cmd_polar(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
