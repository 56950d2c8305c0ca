//! `phidiag`: command-line front end.
//!
//! Exit codes: 0 diagnosable / success, 1 not diagnosable (or, for `replay`,
//! an observation no constrained run can produce), 2 input error, 3 the
//! brute-force oracle disagrees with the checker.

use std::collections::BTreeSet;
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use phidiag::checker::{analyze, explain, Analysis};
use phidiag::constraint::ConstraintFile;
use phidiag::diagnoser::Diagnoser;
use phidiag::dot::{augmented_dot, constrained_dot, nba_dot, verifier_dot};
use phidiag::ltl::{ltl_to_nba, parse_ltl, parse_ltl_any};
use phidiag::oracle::{brute_check, random_instance_spec, BruteVerdict, DEFAULT_BUDGET};
use phidiag::templates::build;
use phidiag::{ConstraintError, DiagnoserError, LtlError, PlantModel, SensorConstraint};

const EXIT_NOT_DIAGNOSABLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_ORACLE: u8 = 3;

#[derive(Parser)]
#[command(name = "phidiag", version, about = "Diagnosability under LTL-constrained unreliable sensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide diagnosability of a plant under a sensor constraint.
    Check {
        /// Plant JSON file (a glob pattern with --glob).
        plant: String,
        /// Constraint JSON file: a template or {ltl, ap, labeling}.
        constraint: PathBuf,
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
        /// Write augmented.dot, nba.dot, constrained.dot and verifier.dot here.
        #[arg(long, value_name = "DIR")]
        dot_dir: Option<PathBuf>,
        /// Cross-check with the brute-force oracle; exit 3 on disagreement.
        #[arg(long)]
        oracle: bool,
        /// Edge-visit budget for --oracle.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Accept plants with states that have no successor.
        #[arg(long)]
        allow_non_live: bool,
        /// Treat PLANT as a glob pattern and check every match.
        #[arg(long)]
        glob: bool,
    },
    /// Translate an LTL formula to a Büchi automaton (DOT on stdout).
    Translate {
        formula: String,
        /// Declared atoms, comma separated; undeclared atoms are rejected.
        #[arg(long, value_delimiter = ',')]
        ap: Option<Vec<String>>,
    },
    /// Run the online diagnoser over an output stream.
    Replay {
        plant: PathBuf,
        constraint: PathBuf,
        /// Whitespace-separated output symbols; `-` reads stdin.
        stream: PathBuf,
        /// Also print the states in each belief.
        #[arg(long, short)]
        verbose: bool,
        #[arg(long)]
        allow_non_live: bool,
    },
    /// Write intermediate artifacts to stdout or a directory.
    Export {
        plant: PathBuf,
        constraint: PathBuf,
        #[arg(long, value_enum, default_value_t = Artifact::Verifier)]
        what: Artifact,
        /// Write every artifact into DIR instead.
        #[arg(long, value_name = "DIR", conflicts_with = "what")]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        allow_non_live: bool,
    },
    /// Random plants and template constraints, checker against oracle.
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Artifact {
    /// The plant after template rewriting (JSON).
    Plant,
    /// The constraint in raw {ltl, ap, labeling} form (JSON).
    Constraint,
    Nba,
    Augmented,
    Constrained,
    Verifier,
}

const ARTIFACTS: [(Artifact, &str); 6] = [
    (Artifact::Plant, "plant.json"),
    (Artifact::Constraint, "constraint.json"),
    (Artifact::Nba, "nba.dot"),
    (Artifact::Augmented, "augmented.dot"),
    (Artifact::Constrained, "constrained.dot"),
    (Artifact::Verifier, "verifier.dot"),
];

/// An error that ends the command; `code` is the exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn color_enabled() -> bool {
    match std::env::var("PHIDIAG_COLOR").as_deref() {
        Ok("1") => true,
        Ok("0") => false,
        _ => std::io::stdout().is_terminal(),
    }
}

fn paint(text: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

// Formula with a caret under the offending byte.
fn point_at(text: &str, pos: usize) -> String {
    let col = text[..pos.min(text.len())].chars().count();
    format!("  {text}\n  {}^", " ".repeat(col))
}

fn ltl_error(path: &str, text: &str, e: &LtlError) -> Failure {
    let pos = match e {
        LtlError::Syntax { pos, .. } | LtlError::UndeclaredAtom { pos, .. } => *pos,
    };
    Failure::input(format!("{path}: {e}\n{}", point_at(text, pos)))
}

fn load_plant(path: &Path, allow_non_live: bool) -> Result<PlantModel> {
    PlantModel::from_json(&read(path)?, allow_non_live)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_constraint(path: &Path, model: &PlantModel) -> Result<(PlantModel, SensorConstraint)> {
    let text = read(path)?;
    let shown = path.display().to_string();
    let file = ConstraintFile::parse(&text).map_err(|e| Failure::input(format!("{shown}: {e}")))?;
    file.resolve(model).map_err(|e| match (&e, &file) {
        (ConstraintError::Ltl(l), ConstraintFile::Raw(raw)) => ltl_error(&shown, &raw.ltl, l),
        _ => Failure::input(format!("{shown}: {e}")),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn artifact(a: &Analysis, model: &PlantModel, c: &SensorConstraint, what: Artifact) -> String {
    let json = |v: serde_json::Result<String>| v.expect("serializable") + "\n";
    match what {
        Artifact::Plant => json(serde_json::to_string_pretty(&model.to_spec())),
        Artifact::Constraint => json(serde_json::to_string_pretty(&c.to_raw(model))),
        Artifact::Nba => nba_dot(&a.nba),
        Artifact::Augmented => augmented_dot(&a.augmented, model),
        Artifact::Constrained => constrained_dot(&a.constrained, model),
        Artifact::Verifier => verifier_dot(&a.verifier, model),
    }
}

fn oracle_line(a: &Analysis, b: BruteVerdict) -> Result<String> {
    match b.diagnosable() {
        None => Ok("oracle: budget exceeded, no cross-check".into()),
        Some(d) if d == a.verdict.diagnosable => Ok("oracle: agrees".into()),
        Some(d) => Err(Failure {
            code: EXIT_ORACLE,
            message: format!(
                "oracle disagreement: checker says {}, brute force says {}",
                verdict_word(a.verdict.diagnosable),
                verdict_word(d)
            ),
        }),
    }
}

fn verdict_word(d: bool) -> &'static str {
    if d {
        "diagnosable"
    } else {
        "not diagnosable"
    }
}

fn check_one(
    plant: &Path,
    constraint: &Path,
    json: bool,
    dot_dir: Option<&Path>,
    oracle: bool,
    budget: u64,
    allow_non_live: bool,
) -> Result<u8> {
    let base = load_plant(plant, allow_non_live)?;
    let (model, c) = load_constraint(constraint, &base)?;
    let a = analyze(&model, &c);
    if let Some(dir) = dot_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
        for (what, name) in &ARTIFACTS[2..] {
            write_file(&dir.join(name), &artifact(&a, &model, &c, *what))?;
        }
    }
    if json {
        let text = serde_json::to_string_pretty(&a.verdict.to_json(&model)).expect("serializable");
        println!("{text}");
    } else {
        let report = explain(&a.verdict, &model);
        let (first, rest) = report.split_once('\n').unwrap_or((&report, ""));
        let code = if a.verdict.diagnosable { "32" } else { "31" };
        print!("{}\n{rest}", paint(first, code));
    }
    if oracle {
        let line = oracle_line(&a, brute_check(&model, &c, budget))?;
        eprintln!("{line}");
    }
    Ok(if a.verdict.diagnosable { 0 } else { EXIT_NOT_DIAGNOSABLE })
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    plant: &str,
    constraint: &Path,
    json: bool,
    dot_dir: Option<&Path>,
    oracle: bool,
    budget: u64,
    allow_non_live: bool,
    glob: bool,
) -> Result<u8> {
    if !glob {
        return check_one(Path::new(plant), constraint, json, dot_dir, oracle, budget, allow_non_live);
    }
    let paths: Vec<PathBuf> = glob::glob(plant)
        .map_err(|e| Failure::input(format!("bad pattern `{plant}`: {e}")))?
        .filter_map(|p| p.ok())
        .collect();
    if paths.is_empty() {
        return Err(Failure::input(format!("no file matches `{plant}`")));
    }
    // worst status wins: oracle disagreement > input error > not diagnosable
    let mut worst = 0;
    for p in &paths {
        println!("== {} ==", p.display());
        let dir = dot_dir.map(|d| d.join(p.file_stem().unwrap_or_default()));
        let code = match check_one(p, constraint, json, dir.as_deref(), oracle, budget, allow_non_live) {
            Ok(code) => code,
            Err(f) => {
                eprintln!("error: {}", f.message);
                f.code
            }
        };
        worst = worst.max(code);
    }
    Ok(worst)
}

fn cmd_translate(formula: &str, ap: Option<Vec<String>>) -> Result<u8> {
    let parsed = match &ap {
        Some(ap) => {
            let ap: BTreeSet<String> = ap.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            parse_ltl(formula, &ap)
        }
        None => parse_ltl_any(formula),
    };
    let f = parsed.map_err(|e| ltl_error("formula", formula, &e))?;
    print!("{}", nba_dot(&ltl_to_nba(&f)));
    Ok(0)
}

fn cmd_replay(plant: &Path, constraint: &Path, stream: &Path, verbose: bool, allow_non_live: bool) -> Result<u8> {
    let base = load_plant(plant, allow_non_live)?;
    let (model, c) = load_constraint(constraint, &base)?;
    let text = if stream == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::input(format!("stdin: {e}")))?
    } else {
        read(stream)?
    };
    let symbols: Vec<&str> = text.split_whitespace().collect();
    if let Some(bad) = symbols.iter().find(|s| model.output_index(s).is_none()) {
        return Err(Failure::input(format!("{}: {}", stream.display(), DiagnoserError::UnknownSymbol(bad.to_string()))));
    }
    let a = analyze(&model, &c);
    let d = Diagnoser::new(&model, &a.constrained);
    let show = |step: usize, sym: &str, belief: &phidiag::diagnoser::Belief| {
        let alarm = d.is_alarm(belief);
        let flag = if alarm { paint("1", "31") } else { "0".to_string() };
        println!("{step:>5}  {sym:<8}  {:>6}  {flag}", belief.len());
        if verbose {
            println!("       {{{}}}", d.names(belief).join(", "));
        }
    };
    println!("{:>5}  {:<8}  {:>6}  alarm", "step", "symbol", "belief");
    let mut belief = d.init();
    show(0, "-", &belief);
    for (i, s) in symbols.iter().enumerate() {
        match d.step_symbol(&belief, s, i + 1) {
            Ok(b) => belief = b,
            Err(e) => {
                return Err(Failure { code: EXIT_NOT_DIAGNOSABLE, message: format!("{}: {e}", stream.display()) })
            }
        }
        show(i + 1, s, &belief);
    }
    Ok(0)
}

fn cmd_export(
    plant: &Path,
    constraint: &Path,
    what: Artifact,
    out_dir: Option<&Path>,
    allow_non_live: bool,
) -> Result<u8> {
    let base = load_plant(plant, allow_non_live)?;
    let (model, c) = load_constraint(constraint, &base)?;
    let a = analyze(&model, &c);
    match out_dir {
        None => print!("{}", artifact(&a, &model, &c, what)),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
            for (what, name) in ARTIFACTS {
                write_file(&dir.join(name), &artifact(&a, &model, &c, what))?;
            }
        }
    }
    Ok(0)
}

fn cmd_sweep(seed: u64, count: u64, budget: u64) -> Result<u8> {
    let (mut agree, mut skipped, mut diag) = (0, 0, 0);
    for i in 0..count {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
        let (plant, scenario) = random_instance_spec(s);
        let base = PlantModel::from_spec(&plant, false).expect("generated plants are valid");
        let out = build(&base, &scenario).expect("generated scenarios are valid");
        let a = analyze(&out.model, &out.constraint);
        diag += a.verdict.diagnosable as u64;
        match brute_check(&out.model, &out.constraint, budget).diagnosable() {
            None => skipped += 1,
            Some(b) if b == a.verdict.diagnosable => agree += 1,
            Some(b) => {
                return Err(Failure {
                    code: EXIT_ORACLE,
                    message: format!(
                        "instance {i} (seed {s}): checker says {}, brute force says {}",
                        verdict_word(a.verdict.diagnosable),
                        verdict_word(b)
                    ),
                })
            }
        }
    }
    println!("{count} instances: {agree} agree, {skipped} over budget, {diag} diagnosable");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Check { plant, constraint, json, dot_dir, oracle, budget, allow_non_live, glob } => {
            cmd_check(&plant, &constraint, json, dot_dir.as_deref(), oracle, budget, allow_non_live, glob)
        }
        Command::Translate { formula, ap } => cmd_translate(&formula, ap),
        Command::Replay { plant, constraint, stream, verbose, allow_non_live } => {
            cmd_replay(&plant, &constraint, &stream, verbose, allow_non_live)
        }
        Command::Export { plant, constraint, what, out_dir, allow_non_live } => {
            cmd_export(&plant, &constraint, what, out_dir.as_deref(), allow_non_live)
        }
        Command::Sweep { seed, count, budget } => cmd_sweep(seed, count, budget),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{} {}", paint("error:", "31"), f.message);
            ExitCode::from(f.code)
        }
    }
}
