use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use homogeneity::data::{fixtures, json, validate_identities, InfinitesimalData};
use homogeneity::filtration::{build_complex_with, MuSystem, StabilizingPair};
use homogeneity::linalg::parse_rat;
use homogeneity::report::{self, AnalysisReport, Options};
use homogeneity::Error;

const FIXTURES: &[(&str, &str)] = &[
    ("b3", "locally symmetric split-signature metric on R^4"),
    ("constant-curvature", "space form, --sig p,q --c value"),
    (
        "pseudo-kahler",
        "pseudo-Kähler example, --b value --s none|-1|0",
    ),
    ("flat", "flat data, --sig p,q"),
];

#[derive(Parser)]
#[command(
    name = "analyze",
    version,
    about = "Local homogeneity analysis of pointwise curvature data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the algebraic identities of the input tensors.
    Validate {
        #[command(flatten)]
        source: Source,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the full pipeline.
    Run {
        #[command(flatten)]
        source: Source,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Continue even if identity validation fails.
        #[arg(long)]
        force: bool,
        /// Restrict to one pair, e.g. `--pair 1,-1`.
        #[arg(long, allow_hyphen_values = true)]
        pair: Option<String>,
        /// Skip the Killing generator computation.
        #[arg(long)]
        no_killing: bool,
        /// Include torsion, curvature and connection of the coframe in the report.
        #[arg(long)]
        emit_coframe: bool,
        /// Re-verify a previously written JSON report against the input.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Rebuild the data from its infinitesimal model and compare.
    Roundtrip {
        #[command(flatten)]
        source: Source,
        /// JSON file supplying S instead of deriving it.
        #[arg(long)]
        with_s: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// List fixtures, or print one as input JSON.
    Fixtures {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
struct Source {
    /// Built-in data set.
    #[arg(long, conflicts_with = "input")]
    fixture: Option<String>,
    /// Input data file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Signature `p,q` for constant-curvature and flat fixtures.
    #[arg(long, default_value = "1,3")]
    sig: String,
    /// Curvature constant for the constant-curvature fixture.
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    c: String,
    /// Metric parameter for the pseudo-kahler fixture.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    b: String,
    /// Structure tensor order for the pseudo-kahler fixture.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    s: String,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Shape(_) => Failure::Usage(e.to_string()),
            other => Failure::Math(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn parse_pair(text: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("expected two integers `a,b`, got `{text}`"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

impl Source {
    /// The data and the bytes its digest is taken over.
    fn load(&self) -> Result<(InfinitesimalData, Vec<u8>), Failure> {
        match (&self.fixture, &self.input) {
            (Some(name), None) => {
                let d = self.fixture(name)?;
                let bytes = json::to_json(&d).into_bytes();
                Ok((d, bytes))
            }
            (None, Some(path)) => {
                let bytes = fs::read(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                let text = String::from_utf8(bytes.clone())
                    .map_err(|_| Failure::Usage("input is not UTF-8".into()))?;
                Ok((json::from_json(&text)?, bytes))
            }
            _ => Err(Failure::Usage(
                "give exactly one of --fixture or --input".into(),
            )),
        }
    }

    fn fixture(&self, name: &str) -> Result<InfinitesimalData, Failure> {
        let sig = || -> Result<(usize, usize), Failure> {
            let (p, q) = parse_pair(&self.sig)?;
            if p < 0 || q < 0 {
                return Err(Failure::Usage(
                    "signature entries must be nonnegative".into(),
                ));
            }
            Ok((p as usize, q as usize))
        };
        let d = match name {
            "b3" => fixtures::b3(),
            "constant-curvature" => {
                let (p, q) = sig()?;
                fixtures::constant_curvature(p, q, &parse_rat(&self.c)?)?
            }
            "flat" => {
                let (p, q) = sig()?;
                fixtures::flat(p, q)?
            }
            "pseudo-kahler" => {
                let order = match self.s.as_str() {
                    "none" => None,
                    other => Some(
                        other
                            .parse::<i32>()
                            .map_err(|_| Failure::Usage(format!("bad --s value `{other}`")))?,
                    ),
                };
                fixtures::pseudo_kahler(&parse_rat(&self.b)?, order)?
            }
            other => return Err(Failure::Usage(format!("unknown fixture `{other}`"))),
        };
        Ok(d)
    }
}

fn write_json(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        fs::write(p, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn validation_gate(d: &InfinitesimalData, force: bool) -> Outcome {
    let v = validate_identities(d);
    if v.passed() || force {
        return Ok(true);
    }
    for c in v.failures() {
        eprintln!(
            "identity {} fails at {:?}",
            c.name,
            c.witness.as_deref().unwrap_or(&[])
        );
    }
    Ok(false)
}

fn cmd_validate(source: &Source, json_path: &Option<PathBuf>) -> Outcome {
    let (d, _) = source.load()?;
    let v = validate_identities(&d);
    for c in &v.checks {
        let w = c
            .witness
            .as_ref()
            .map(|w| format!(" witness {w:?}"))
            .unwrap_or_default();
        println!(
            "{} {}: {}{w}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.description
        );
    }
    let text = serde_json::to_string_pretty(&report::validation_checks(&d)).expect("serializes");
    write_json(json_path, &(text + "\n"))?;
    Ok(v.passed())
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    source: &Source,
    json_path: &Option<PathBuf>,
    force: bool,
    pair: &Option<String>,
    no_killing: bool,
    emit_coframe: bool,
    check: &Option<PathBuf>,
) -> Outcome {
    let (d, bytes) = source.load()?;
    if let Some(path) = check {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let rep = AnalysisReport::from_json(&text)?;
        let failures = report::check_report(&rep, &d, &bytes)?;
        for f in &failures {
            println!("FAIL {f}");
        }
        if failures.is_empty() {
            println!("report verified");
        }
        return Ok(failures.is_empty());
    }
    if !validation_gate(&d, force)? {
        return Ok(false);
    }
    let pair = match pair {
        None => None,
        Some(p) => {
            let (r, s) = parse_pair(p)?;
            Some(StabilizingPair {
                r: r as i32,
                s: s as i32,
            })
        }
    };
    let opts = Options {
        pair,
        killing: !no_killing,
        coframe: emit_coframe,
    };
    let rep = report::analyze(&d, &bytes, &opts)?;
    print!("{}", rep.to_markdown());
    write_json(json_path, &rep.to_json())?;
    Ok(rep.passed())
}

fn cmd_roundtrip(source: &Source, with_s: &Option<PathBuf>, force: bool) -> Outcome {
    let (d, _) = source.load()?;
    if !validation_gate(&d, force)? {
        return Ok(false);
    }
    let mu = MuSystem::new(&d);
    let (label, s, pair) = match with_s {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            (
                format!("supplied by {}", path.display()),
                json::smap_from_json(&text)?,
                None,
            )
        }
        None => {
            let complex = build_complex_with(&mu)?;
            let mut chosen = None;
            for p in complex.stabilizing_pairs() {
                if let Ok(v) = homogeneity::reductivity::decide_strong_reductivity(&mu, p) {
                    if v.strongly_reductive {
                        chosen = Some((p.r, p.s));
                    }
                }
            }
            let (label, s) = report::roundtrip_s(&d, &mu, chosen)?;
            (label, s, chosen)
        }
    };
    let rt = report::run_roundtrip(&d, label, &s, pair)?;
    println!("S: {}", rt.source);
    match &rt.first_difference {
        None => println!("round trip exact"),
        Some((name, idx)) => println!("round trip differs: {name} at {idx:?}"),
    }
    Ok(rt.equal)
}

fn cmd_fixtures(source: &Source) -> Outcome {
    match &source.fixture {
        None => {
            for (name, about) in FIXTURES {
                println!("{name:<20} {about}");
            }
        }
        Some(name) => print!("{}", json::to_json(&source.fixture(name)?)),
    }
    Ok(true)
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("ANALYZE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Failure::Usage(format!("ANALYZE_THREADS must be a number, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Validate { source, json } => cmd_validate(source, json),
        Command::Run {
            source,
            json,
            force,
            pair,
            no_killing,
            emit_coframe,
            check,
        } => cmd_run(
            source,
            json,
            *force,
            pair,
            *no_killing,
            *emit_coframe,
            check,
        ),
        Command::Roundtrip {
            source,
            with_s,
            force,
        } => cmd_roundtrip(source, with_s, *force),
        Command::Fixtures { source } => cmd_fixtures(source),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
