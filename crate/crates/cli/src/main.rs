//! `kpreserve` command line: k-numerical range profiles, preserver
//! verification and classification, and the reproduction suite.
//!
//! Exit codes: 0 on success, 1 when the run completed but the verdict is a
//! failure, 2 on usage, parse or shape errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kpreserve::classify::{
    classify_preserver, falsify_random, random_unital_trace_preserving, ClassVerdict, FalsifyConfig, TrialBank,
    DEFAULT_SEED, DEFAULT_TRIALS,
};
use kpreserve::io::{self, CanonicalDescriptor};
use kpreserve::krange::{k_numerical_radius, krange_hermitian, krange_profile, DEFAULT_NUM_ANGLES, DEFAULT_TOL};
use kpreserve::maps::{build_canonical, LinearMapMatrix};
use kpreserve::matcore::random::seeded_rng;
use kpreserve::matcore::HERMITIAN_TOL;
use kpreserve::papersuite::{check_example1, example1_matrices, theorem_suite, SuiteConfig};
use kpreserve::{BipartiteShape, Error};

#[derive(Parser)]
#[command(name = "kpreserve", version, about = "k-numerical ranges and their preservers on tensor products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Support profile of W_k(A) for a matrix file.
    Range(RangeArgs),
    /// Verify and classify a map file or canonical descriptor.
    Verify(VerifyArgs),
    /// Run the reproduction suite for one shape and write its artifacts.
    Paper(PaperArgs),
    /// Test random unital trace-preserving maps, which should all fail.
    Falsify(FalsifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Args)]
struct RangeArgs {
    /// Matrix JSON file.
    matrix: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_NUM_ANGLES)]
    angles: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Clone, Copy)]
struct ShapeArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Map JSON file or canonical descriptor JSON file.
    input: PathBuf,
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_NUM_ANGLES)]
    angles: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PaperArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_NUM_ANGLES)]
    angles: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FalsifyArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Number of maps to test.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_NUM_ANGLES)]
    angles: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write one generated map file here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a completed run.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Range(a) => cmd_range(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Paper(a) => cmd_paper(&a),
        Command::Falsify(a) => cmd_falsify(&a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> kpreserve::Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_range(a: &RangeArgs) -> kpreserve::Result<Outcome> {
    let matrix = io::read_matrix(&a.matrix)?;
    let profile = krange_profile(&matrix, a.k, a.angles)?;
    let text = match a.format {
        Format::Csv => io::profile_to_csv(&profile),
        Format::Svg => io::profile_to_svg(&profile),
        Format::Json => serde_json::to_string_pretty(&profile)? + "\n",
    };
    emit(a.out.as_deref(), &text)?;
    let radius = k_numerical_radius(&matrix, a.k, a.angles)?;
    let mut summary = format!("dim {} k {} angles {}\nmax support {:.14}\nk-numerical radius {:.14}", matrix.dim(), a.k, a.angles, profile.max_abs_support(), radius);
    if matrix.is_hermitian(HERMITIAN_TOL) {
        let iv = krange_hermitian(&matrix.hermitian_part(), a.k)?;
        summary += &format!("\nhermitian interval [{:.14}, {:.14}]", iv.lo, iv.hi);
    }
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(Outcome::Pass)
}

fn check_flag(name: &str, flag: Option<usize>, actual: usize) -> kpreserve::Result<()> {
    match flag {
        Some(v) if v != actual => Err(Error::Shape(format!("--{name} {v} disagrees with the map file ({actual})"))),
        _ => Ok(()),
    }
}

fn load_map(path: &Path, shape: ShapeArgs) -> kpreserve::Result<LinearMapMatrix> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("varphi").is_some() {
        let desc: CanonicalDescriptor = io::descriptor_from_json(&text)?;
        let (Some(m), Some(n), Some(k)) = (shape.m, shape.n, shape.k) else {
            return Err(Error::Shape("a canonical descriptor needs --m, --n and --k".into()));
        };
        return build_canonical(&desc.to_spec(BipartiteShape::new(m, n, k)?)?);
    }
    let map = io::map_from_json(&text)?;
    let s = map.shape();
    check_flag("m", shape.m, s.m())?;
    check_flag("n", shape.n, s.n())?;
    check_flag("k", shape.k, s.k())?;
    Ok(map)
}

fn cmd_verify(a: &VerifyArgs) -> kpreserve::Result<Outcome> {
    let map = load_map(&a.input, a.shape)?;
    let shape = *map.shape();
    let verification = TrialBank::new(shape, a.trials, a.angles, a.seed)?.verify(&map, a.tol)?;
    let classification = if verification.passed() { Some(classify_preserver(&map, &shape, a.tol)?) } else { None };
    let pass = classification.as_ref().is_some_and(|c| c.verdict == ClassVerdict::Classified);
    let report = json!({
        "shape": shape,
        "verification": verification,
        "classification": classification,
        "verdict": if pass { "pass" } else { "fail" },
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(p) = &a.out {
        fs::write(p, &text)?;
    }
    print!("{text}");
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_paper(a: &PaperArgs) -> kpreserve::Result<Outcome> {
    let shape = BipartiteShape::new(a.m, a.n, a.k)?;
    let config = SuiteConfig { trials: a.trials, num_angles: a.angles, tol: a.tol, ..Default::default() };
    let items = theorem_suite(&shape, a.seed, &config)?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("summary.json"), serde_json::to_string_pretty(&items)? + "\n")?;
    if a.m >= 3 && a.n >= 3 {
        let (am, bm) = example1_matrices(a.m, a.n)?;
        io::write_matrix(&a.out.join("example1_a.json"), &am)?;
        io::write_matrix(&a.out.join("example1_b.json"), &bm)?;
        io::write_matrix(&a.out.join("example1_ab.json"), &am.kron(&bm))?;
        io::write_matrix(&a.out.join("example1_abt.json"), &am.kron(&bm.transpose()))?;
        let report = check_example1(a.m, a.n, 1e-10)?;
        fs::write(a.out.join("example1_report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    }
    for item in &items {
        println!("{} {}", if item.pass { "PASS" } else { "FAIL" }, item.item);
    }
    Ok(if items.iter().all(|i| i.pass) { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_falsify(a: &FalsifyArgs) -> kpreserve::Result<Outcome> {
    let shape = BipartiteShape::new(a.m, a.n, a.k)?;
    let config = FalsifyConfig { trials: a.trials, num_angles: a.angles, ..Default::default() };
    let summary = falsify_random(&shape, a.count, a.seed, a.tol, &config)?;
    if let Some(p) = &a.out {
        let mut rng = seeded_rng(a.seed);
        let map = loop {
            let candidate = random_unital_trace_preserving(&shape, &mut rng)?;
            if classify_preserver(&candidate, &shape, config.canonical_tol)?.verdict == ClassVerdict::NotAPreserver {
                break candidate;
            }
        };
        io::write_map(p, &map)?;
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if summary.passes == 0 { Outcome::Pass } else { Outcome::Fail })
}
