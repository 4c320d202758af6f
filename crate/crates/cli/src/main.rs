use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use wignerlab::analysis::{
    chsh_detail, lhv_feasibility, logical_contextuality, SignMap, DEFAULT_TOL,
};
use wignerlab::claims::{claims_to_json, sig6, verify_claims, ClaimConfig};
use wignerlab::empirical::{from_json, support, to_json, write_json_value, DEFAULT_EPSILON};
use wignerlab::pbr::gamma_components;
use wignerlab::qsim::RNG_ALGORITHM;
use wignerlab::scenarios::{generate_table, main_scenario, minimal_scenario, tomography};
use wignerlab::{ChoiceAmplitudes, EmpiricalModel, FeasibilityReport, C64, VERSION};

const EXIT_CONFIG: u8 = 2;
const EXIT_WRITE: u8 = 3;
const EXIT_NONCLASSICAL: u8 = 10;
const EXIT_CLAIM_FAILED: u8 = 1;

/// Amplitudes typed on the command line are accepted this far from
/// normalization and then renormalized.
const INPUT_NORM_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "wignerlab",
    version,
    about = "Simulate extended Wigner's-friend protocols and test their tables for a global distribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the exact outcome table of a scenario as JSON.
    Simulate(SimulateArgs),
    /// Analyse a table file.
    Check(CheckArgs),
    /// Recompute every protocol claim and print a checklist.
    VerifyPaper(VerifyArgs),
    /// Estimate choice amplitudes from sampled copies.
    Tomography(TomographyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    Main,
    Minimal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Possibilistic,
    Lhv,
    Chsh,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "main")]
    scenario: ScenarioName,
    /// Amplitude of Alice's choice 0, as `re[,im]`.
    #[arg(long, allow_hyphen_values = true)]
    alpha_a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta_a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta_b: Option<String>,
    /// Recorded in the metadata; the table itself is exact.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; the table goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CheckArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value = "possibilistic")]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Two parties for CHSH, comma separated. Defaults to the first two
    /// parties with two binary settings.
    #[arg(long, value_delimiter = ',')]
    parties: Option<Vec<String>>,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    json: bool,
    /// Samples per basis in the tomography claim; the tolerance is 5/sqrt(n).
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(clap::Args)]
struct TomographyArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Check(a) => check(a),
        Command::VerifyPaper(a) => verify(a),
        Command::Tomography(a) => run_tomography(a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("WIGNERLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::config(format!(
            "WIGNERLAB_THREADS must be a positive integer, got `{value}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(Failure::config)
}

/// Parses `re` or `re,im`.
fn parse_complex(text: &str) -> Result<C64, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Failure::config(format!("invalid amplitude `{text}`, expected re[,im]")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(Failure::config(format!(
            "invalid amplitude `{text}`, expected re[,im]"
        ))),
    }
}

/// Builds choice amplitudes from optional flags. A missing amplitude is
/// taken real and non-negative so the pair is normalized.
fn parse_choice(alpha: Option<&str>, beta: Option<&str>) -> Result<ChoiceAmplitudes, Failure> {
    let complement = |z: C64| -> Result<C64, Failure> {
        let rest = 1.0 - z.norm_sqr();
        if rest < -INPUT_NORM_TOL {
            return Err(Failure::config(format!(
                "amplitude {z} has modulus above 1"
            )));
        }
        Ok(C64::new(rest.max(0.0).sqrt(), 0.0))
    };
    let (a, b) = match (
        alpha.map(parse_complex).transpose()?,
        beta.map(parse_complex).transpose()?,
    ) {
        (None, None) => return Ok(ChoiceAmplitudes::balanced()),
        (Some(a), None) => (a, complement(a)?),
        (None, Some(b)) => (complement(b)?, b),
        (Some(a), Some(b)) => (a, b),
    };
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Failure::config(format!(
            "amplitudes are not normalized: |alpha|^2 + |beta|^2 = {}",
            sig6(norm)
        )));
    }
    let s = norm.sqrt();
    ChoiceAmplitudes::new(a / s, b / s).map_err(Failure::config)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure {
        code: EXIT_WRITE,
        message: format!("cannot write {}: {e}", path.display()),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn simulate(args: SimulateArgs) -> Outcome {
    let scenario = match args.scenario {
        ScenarioName::Main => {
            let a = parse_choice(args.alpha_a.as_deref(), args.beta_a.as_deref())?;
            let b = parse_choice(args.alpha_b.as_deref(), args.beta_b.as_deref())?;
            main_scenario(&a, &b).map_err(Failure::config)?
        }
        ScenarioName::Minimal => {
            if [&args.alpha_a, &args.beta_a, &args.alpha_b, &args.beta_b]
                .iter()
                .any(|a| a.is_some())
            {
                return Err(Failure::config("the minimal scenario takes no amplitudes"));
            }
            minimal_scenario()
        }
    };
    let mut model = generate_table(&scenario)
        .map_err(Failure::config)?
        .with_metadata("tool", "wignerlab")
        .with_metadata("tool_version", VERSION);
    if let Some(seed) = args.seed {
        model = model.with_metadata("seed", seed.to_string());
    }
    let text = to_json(&model);
    match args.out {
        Some(path) => {
            write_atomic(&path, &text)?;
            eprintln!(
                "wrote {} contexts of scenario `{}` to {}",
                model.signature().num_contexts(),
                scenario.name(),
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn load(path: &Path) -> Result<EmpiricalModel, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    from_json(&bytes).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn summarize(report: &FeasibilityReport) {
    println!("verdict: {}", report.verdict);
    let parties: Vec<&str> = report
        .signature
        .parties
        .iter()
        .map(|p| p.name.as_str())
        .collect();
    if let Some(w) = &report.witness {
        let pairs = |values: &[String]| {
            parties
                .iter()
                .zip(values)
                .map(|(p, v)| format!("{p}={v}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        println!("witness context: {}", pairs(&w.context));
        println!("witness outcomes: {}", pairs(&w.tuple));
    }
    if let Some(c) = &report.certificate {
        println!(
            "certificate: {} terms, model value {}, classical bound {}, margin {}",
            c.terms.len(),
            sig6(c.model_value),
            sig6(c.classical_bound),
            sig6(c.margin)
        );
    }
    if let Some(ws) = &report.weights {
        println!(
            "global distribution over {} deterministic assignments",
            ws.len()
        );
    }
}

fn default_chsh_parties(model: &EmpiricalModel) -> Result<(String, String), Failure> {
    let binary: Vec<&str> = model
        .signature()
        .parties
        .iter()
        .filter(|p| p.settings.len() == 2 && p.settings.iter().all(|s| s.outcomes.len() == 2))
        .map(|p| p.name.as_str())
        .collect();
    match binary.as_slice() {
        [a, b, ..] => Ok((a.to_string(), b.to_string())),
        _ => Err(Failure::config(
            "CHSH needs two parties with two binary settings each",
        )),
    }
}

/// First outcome of every setting counts `+1`, the second `-1`.
fn positional_signs(model: &EmpiricalModel, parties: [&str; 2]) -> Result<SignMap, Failure> {
    let mut pairs: Vec<(String, f64)> = Vec::new();
    for name in parties {
        let k = model
            .signature()
            .party_index(name)
            .map_err(Failure::config)?;
        for s in &model.signature().parties[k].settings {
            for (i, o) in s.outcomes.iter().enumerate().take(2) {
                let sign = if i == 0 { 1.0 } else { -1.0 };
                if pairs.iter().any(|(l, v)| l == o && *v != sign) {
                    return Err(Failure::config(format!(
                        "outcome `{o}` is +1 in one setting and -1 in another"
                    )));
                }
                pairs.push((o.clone(), sign));
            }
        }
    }
    Ok(SignMap::new(pairs))
}

fn check(args: CheckArgs) -> Outcome {
    let model = load(&args.path)?;
    match args.mode {
        Mode::Possibilistic => {
            let s = support(&model, args.epsilon).map_err(Failure::config)?;
            let report = logical_contextuality(&s).map_err(Failure::config)?;
            if args.json {
                print!("{}", report.to_json("possibilistic"));
            } else {
                summarize(&report);
            }
            Ok(if report.verdict.is_nonclassical() {
                EXIT_NONCLASSICAL
            } else {
                0
            })
        }
        Mode::Lhv => {
            let report = lhv_feasibility(&model, args.tol).map_err(Failure::config)?;
            if args.json {
                print!("{}", report.to_json("lhv"));
            } else {
                summarize(&report);
            }
            Ok(if report.verdict.is_nonclassical() {
                EXIT_NONCLASSICAL
            } else {
                0
            })
        }
        Mode::Chsh => {
            let (p1, p2) = match args.parties.as_deref() {
                Some([a, b]) => (a.clone(), b.clone()),
                Some(_) => return Err(Failure::config("--parties takes exactly two names")),
                None => default_chsh_parties(&model)?,
            };
            let signs = positional_signs(&model, [&p1, &p2])?;
            let detail = chsh_detail(&model, &p1, &p2, &signs).map_err(Failure::config)?;
            let violated = detail.value > 2.0 + args.tol;
            if args.json {
                print!(
                    "{}",
                    write_json_value(&json!({
                        "version": wignerlab::empirical::JSON_VERSION,
                        "kind": "chsh-report",
                        "parties": [p1, p2],
                        "correlators": detail.correlators,
                        "minus_at": [detail.minus_at.0, detail.minus_at.1],
                        "value": detail.value,
                        "classical_bound": 2.0,
                        "violated": violated,
                    }))
                );
            } else {
                let e = detail.correlators;
                println!(
                    "correlators ({p1}, {p2}): E00 {}, E01 {}, E10 {}, E11 {}",
                    sig6(e[0][0]),
                    sig6(e[0][1]),
                    sig6(e[1][0]),
                    sig6(e[1][1])
                );
                println!(
                    "CHSH: {} (minus sign at {:?}; classical bound 2)",
                    sig6(detail.value),
                    detail.minus_at
                );
            }
            Ok(if violated { EXIT_NONCLASSICAL } else { 0 })
        }
    }
}

fn verify(args: VerifyArgs) -> Outcome {
    if args.samples < 1000 {
        return Err(Failure::config("--samples must be at least 1000"));
    }
    let cfg = ClaimConfig {
        epsilon: args.epsilon,
        tol: args.tol,
        tomography_samples: args.samples,
        tomography_tolerance: 5.0 / (args.samples as f64).sqrt(),
        ..ClaimConfig::default()
    };
    let claims = verify_claims(&cfg);
    if args.json {
        print!("{}", write_json_value(&claims_to_json(&claims)));
    } else {
        for c in &claims {
            println!(
                "{} {:<24} measured {} | expected {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.measured,
                c.expected
            );
        }
    }
    match claims.iter().find(|c| !c.pass) {
        Some(c) => {
            eprintln!("claim `{}` failed: {}", c.id, c.description);
            Ok(EXIT_CLAIM_FAILED)
        }
        None => Ok(0),
    }
}

fn run_tomography(args: TomographyArgs) -> Outcome {
    let choice = parse_choice(args.alpha.as_deref(), args.beta.as_deref())?;
    let est = tomography(&choice, args.samples, args.seed).map_err(Failure::config)?;
    let gamma = est.choice().ok().and_then(|c| gamma_components(&c).ok());
    let complex = |z: C64| json!([z.re, z.im]);
    if args.json {
        print!(
            "{}",
            write_json_value(&json!({
                "version": wignerlab::empirical::JSON_VERSION,
                "kind": "tomography-estimate",
                "alpha_hat": complex(est.alpha_hat),
                "beta_hat": complex(est.beta_hat),
                "p0_hat": est.p0_hat(),
                "stderr": est.stderr,
                "samples": est.n_samples,
                "seed": est.seed,
                "rng": RNG_ALGORITHM,
                "gamma": gamma.map(|(g, d)| json!([complex(g), complex(d)])),
            }))
        );
    } else {
        let show = |z: C64| {
            if z.im == 0.0 {
                sig6(z.re)
            } else {
                let sign = if z.im < 0.0 { '-' } else { '+' };
                format!("{}{sign}{}i", sig6(z.re), sig6(z.im.abs()))
            }
        };
        println!("alpha_hat: {}", show(est.alpha_hat));
        println!("beta_hat: {}", show(est.beta_hat));
        println!("|alpha_hat|^2: {}", sig6(est.p0_hat()));
        println!("stderr: {}", sig6(est.stderr));
        match gamma {
            Some((g, d)) => println!("Gamma basis: ({}, {})", show(g), show(d)),
            None => println!("Gamma basis: none (degenerate estimate)"),
        }
        println!(
            "samples: {} per basis, seed {}, rng {}",
            est.n_samples, est.seed, RNG_ALGORITHM
        );
    }
    Ok(0)
}
