//! The `pm` command line.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict (not a
//! tautology, counterexample, disagreement, invalid proof), 2 usage or
//! input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pm_core::fo::{eval_fo, is_fo_logical_truth, worlds_for, BaseMode, FoBinding, FoVerdict};
use pm_core::oracle::{check_equivalence, FoSweep, PropSweep, SuiteConfig};
use pm_core::proof::{check_proof, ProofScript};
use pm_core::prop::{
    assignment_from_world, classify, enumerate_assignments, eval_prop, AssignmentMode, Verdict,
};
use pm_core::{parse, Error, Formula, Policy, World};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "pm",
    version,
    about = "Complex-based semantics for PM-style formulas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its desugared AST.
    Parse {
        formula: String,
        #[command(flatten)]
        output: Output,
    },
    /// Print the meaning of a propositional formula.
    Eval {
        formula: String,
        #[command(flatten)]
        semantics: SemanticsArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Classify a propositional formula as tautology, contradiction or contingent.
    Taut {
        formula: String,
        #[command(flatten)]
        semantics: SemanticsArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Print the meaning of a monadic first-order formula in a world.
    FoEval {
        formula: String,
        /// World file.
        #[arg(long)]
        world: PathBuf,
        #[arg(long, default_value = "minimal")]
        policy: Policy,
        #[arg(long, default_value = "all")]
        base_mode: BaseMode,
        /// Free-variable bindings, `x=a,y=b`.
        #[arg(long, default_value = "")]
        bind: String,
        #[command(flatten)]
        output: Output,
    },
    /// Check a closed formula in one model or in every world up to a size.
    FoValid {
        formula: String,
        /// Single model to check instead of enumerating worlds.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_individuals: usize,
        #[command(flatten)]
        semantics: SemanticsArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep enumerated formulas against the classical oracles.
    Compare {
        #[arg(long, value_enum, default_value = "prop")]
        sweep: SweepKind,
        /// Propositional degree bound.
        #[arg(long, default_value_t = 5)]
        prop_depth: usize,
        /// Number of propositional variables.
        #[arg(long, default_value_t = 3)]
        vars: usize,
        /// Policies to run, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "minimal,full")]
        policies: Vec<Policy>,
        #[arg(long, default_value_t = 4)]
        fo_depth: usize,
        #[arg(long, default_value_t = 2)]
        fo_quantifiers: usize,
        #[arg(long, default_value_t = 2)]
        fo_predicates: usize,
        #[arg(long, default_value_t = 1)]
        fo_prop_vars: usize,
        #[arg(long, default_value_t = 2)]
        fo_ind_vars: usize,
        #[arg(long, default_value_t = 3)]
        fo_individuals: usize,
        /// Disagreements listed per sweep; counts are always exact.
        #[arg(long, default_value_t = 20)]
        record_limit: usize,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Check a proof script.
    CheckProof {
        script: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Prop,
    Fo,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeKind {
    Canonical,
    Sampled,
}

#[derive(Args, Debug)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "canonical")]
    mode: ModeKind,
    /// Seed for sampled mode (required there).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    size_bound: usize,
}

impl ModeArgs {
    fn resolve(&self) -> Result<AssignmentMode, Failure> {
        match self.mode {
            ModeKind::Canonical => Ok(AssignmentMode::Canonical),
            ModeKind::Sampled => {
                let seed = self.seed.ok_or_else(|| {
                    Failure::Usage("--seed is required with --mode sampled".into())
                })?;
                if self.count == 0 || self.size_bound == 0 {
                    return Err(Failure::Usage(
                        "--count and --size-bound must be positive".into(),
                    ));
                }
                Ok(AssignmentMode::Sampled {
                    seed,
                    count: self.count,
                    size_bound: self.size_bound,
                })
            }
        }
    }
}

#[derive(Args, Debug)]
struct SemanticsArgs {
    /// World file; defaults to one constant per variable, all true.
    #[arg(long)]
    world: Option<PathBuf>,
    #[arg(long, default_value = "minimal")]
    policy: Policy,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Args, Debug)]
struct Output {
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

struct Report {
    text: String,
    json: Value,
    exit: i32,
}

/// Runs `pm` with `args` (including the program name), writing reports to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let output = match &cli.command {
        Command::Parse { output, .. }
        | Command::Eval { output, .. }
        | Command::Taut { output, .. }
        | Command::FoEval { output, .. }
        | Command::FoValid { output, .. }
        | Command::Compare { output, .. }
        | Command::CheckProof { output, .. } => output,
    };
    let report = match execute(&cli.command) {
        Ok(report) => report,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_USAGE;
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let body = if output.json {
        let mut s = serde_json::to_string_pretty(&report.json).expect("reports serialize");
        s.push('\n');
        s
    } else {
        report.text
    };
    match &output.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &body) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = out.write_all(body.as_bytes());
        }
    }
    report.exit
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_world(path: &Path) -> Result<World, Failure> {
    Ok(read(path)?.parse::<World>()?)
}

fn formula(text: &str) -> Result<Formula, Failure> {
    Ok(parse(text).map_err(Error::from)?)
}

fn propositional(text: &str) -> Result<Formula, Failure> {
    let f = formula(text)?;
    if !f.is_propositional() {
        return Err(Error::NotPropositional(f.to_string()).into());
    }
    Ok(f)
}

fn prop_world(f: &Formula, path: Option<&Path>) -> Result<World, Failure> {
    match path {
        Some(path) => load_world(path),
        None => Ok(World::for_prop_vars(
            f.prop_vars().iter().map(String::as_str),
        )),
    }
}

fn header(command: &str, mode: AssignmentMode) -> String {
    format!("# pm {command}\n# mode: {mode}\n")
}

fn execute(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Parse { formula: text, .. } => {
            let f = formula(text)?;
            Ok(Report {
                text: format!("{}\n{}\n", f.ast(), f),
                json: json!({ "ast": f.ast(), "formula": f.to_string(), "tree": f }),
                exit: EXIT_OK,
            })
        }
        Command::Eval {
            formula: text,
            semantics,
            ..
        } => {
            let f = propositional(text)?;
            let mode = semantics.mode.resolve()?;
            let world = prop_world(&f, semantics.world.as_deref())?;
            let vars = f.prop_vars();
            let assignments = match mode {
                AssignmentMode::Canonical => vec![assignment_from_world(
                    vars.iter().map(String::as_str),
                    &world,
                )?],
                sampled => enumerate_assignments(vars.iter().map(String::as_str), &world, sampled)?,
            };
            let mut text = header("eval", mode);
            text.push_str(&format!("formula: {f}\npolicy: {}\n", semantics.policy));
            let mut rows = Vec::new();
            for h in &assignments {
                let m = eval_prop(&f, h, semantics.policy)?;
                text.push_str(&format!("[{h}]\n  meaning: {m}\n  true: {}\n", m.is_true()));
                rows.push(json!({ "assignment": h.to_string(), "meaning": m.to_string(), "true": m.is_true() }));
            }
            Ok(Report {
                text,
                json: json!({
                    "command": "eval",
                    "mode": mode,
                    "formula": f.to_string(),
                    "policy": semantics.policy,
                    "results": rows,
                }),
                exit: EXIT_OK,
            })
        }
        Command::Taut {
            formula: text,
            semantics,
            ..
        } => {
            let f = propositional(text)?;
            let mode = semantics.mode.resolve()?;
            let world = prop_world(&f, semantics.world.as_deref())?;
            let verdict = classify(&f, &world, mode, semantics.policy)?;
            let mut text = header("taut", mode);
            text.push_str(&format!("formula: {f}\n{}\n", verdict.name()));
            let witnesses: Vec<(&str, String)> = match &verdict {
                Verdict::Tautology => Vec::new(),
                Verdict::Contradiction { witness } => vec![("false under", witness.to_string())],
                Verdict::Contingent {
                    true_witness,
                    false_witness,
                } => vec![
                    ("true under", true_witness.to_string()),
                    ("false under", false_witness.to_string()),
                ],
            };
            for (label, w) in &witnesses {
                text.push_str(&format!("{label}: {w}\n"));
            }
            let witness_json: BTreeMap<&str, &String> =
                witnesses.iter().map(|(k, v)| (*k, v)).collect();
            Ok(Report {
                text,
                json: json!({
                    "command": "taut",
                    "mode": mode,
                    "formula": f.to_string(),
                    "policy": semantics.policy,
                    "verdict": verdict.name(),
                    "witnesses": witness_json,
                }),
                exit: if verdict.is_tautology() {
                    EXIT_OK
                } else {
                    EXIT_NEGATIVE
                },
            })
        }
        Command::FoEval {
            formula: text,
            world,
            policy,
            base_mode,
            bind,
            ..
        } => {
            let f = formula(text)?;
            let world = load_world(world)?;
            let mut binding = FoBinding::standard(world.clone())?;
            for entry in bind.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                let (var, ind) = entry
                    .split_once('=')
                    .ok_or_else(|| Failure::Usage(format!("binding {entry:?} lacks `=`")))?;
                binding.bind(var.trim(), ind.trim())?;
            }
            let h = assignment_from_world(f.prop_vars().iter().map(String::as_str), &world)?;
            let m = eval_fo(&f, &binding, &h, *policy, base_mode)?;
            Ok(Report {
                text: format!(
                    "# pm fo-eval\nformula: {f}\nworld: {}\nbase mode: {base_mode}\npolicy: {policy}\nmeaning: {m}\ntrue: {}\n",
                    world.summary(),
                    m.is_true()
                ),
                json: json!({
                    "command": "fo-eval",
                    "formula": f.to_string(),
                    "world": world.summary(),
                    "base_mode": base_mode.to_string(),
                    "policy": policy,
                    "meaning": m.to_string(),
                    "true": m.is_true(),
                }),
                exit: EXIT_OK,
            })
        }
        Command::FoValid {
            formula: text,
            model,
            max_individuals,
            semantics,
            ..
        } => {
            let f = formula(text)?;
            let mode = semantics.mode.resolve()?;
            if semantics.world.is_some() {
                return Err(Failure::Usage("fo-valid takes --model, not --world".into()));
            }
            let worlds = match model {
                Some(path) => vec![load_world(path)?],
                None if *max_individuals == 0 => {
                    return Err(Failure::Usage("--max-individuals must be positive".into()))
                }
                None => worlds_for(&f, *max_individuals)?,
            };
            let verdict = is_fo_logical_truth(&f, &worlds, mode, semantics.policy)?;
            let mut text = header("fo-valid", mode);
            text.push_str(&format!("formula: {f}\nworlds: {}\n", worlds.len()));
            let (name, world, assignment) = match &verdict {
                FoVerdict::LogicalTruth => ("logical truth", None, None),
                FoVerdict::Counterexample { assignment } => {
                    let h = Some(assignment.to_string()).filter(|h| !h.is_empty());
                    ("counterexample", Some(assignment.world().summary()), h)
                }
            };
            text.push_str(&format!("{name}\n"));
            if let Some(w) = &world {
                text.push_str(&format!("world: {w}\n"));
            }
            if let Some(h) = &assignment {
                text.push_str(&format!("assignment: {h}\n"));
            }
            Ok(Report {
                text,
                json: json!({
                    "command": "fo-valid",
                    "mode": mode,
                    "formula": f.to_string(),
                    "worlds": worlds.len(),
                    "verdict": name,
                    "world": world,
                    "assignment": assignment,
                }),
                exit: if matches!(verdict, FoVerdict::LogicalTruth) {
                    EXIT_OK
                } else {
                    EXIT_NEGATIVE
                },
            })
        }
        Command::Compare {
            sweep,
            prop_depth,
            vars,
            policies,
            fo_depth,
            fo_quantifiers,
            fo_predicates,
            fo_prop_vars,
            fo_ind_vars,
            fo_individuals,
            record_limit,
            mode,
            ..
        } => {
            if *vars == 0 || *fo_individuals == 0 || policies.is_empty() {
                return Err(Failure::Usage(
                    "bounds must be positive and at least one policy given".into(),
                ));
            }
            let config = SuiteConfig {
                mode: mode.resolve()?,
                propositional: (*sweep != SweepKind::Fo).then(|| PropSweep {
                    vars: *vars,
                    max_degree: *prop_depth,
                    policies: policies.clone(),
                }),
                first_order: (*sweep != SweepKind::Prop).then(|| FoSweep {
                    max_degree: *fo_depth,
                    max_quantifiers: *fo_quantifiers,
                    predicates: *fo_predicates,
                    prop_vars: *fo_prop_vars,
                    ind_vars: *fo_ind_vars,
                    max_individuals: *fo_individuals,
                    policies: policies.clone(),
                }),
                record_limit: *record_limit,
            };
            let report = check_equivalence(&config)?;
            Ok(Report {
                text: report.to_text(),
                json: serde_json::to_value(&report).expect("reports serialize"),
                exit: if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_NEGATIVE
                },
            })
        }
        Command::CheckProof { script, .. } => {
            let parsed: ProofScript = read(script)?.parse()?;
            let report = check_proof(&parsed);
            let ok = report.is_valid() && report.soundness_alarms().is_empty();
            Ok(Report {
                text: format!(
                    "# pm check-proof {}\n{}",
                    script.display(),
                    report.to_text()
                ),
                json: json!({
                    "command": "check-proof",
                    "valid": report.is_valid(),
                    "soundness_alarms": report.soundness_alarms().len(),
                    "lines": report.lines,
                }),
                exit: if ok { EXIT_OK } else { EXIT_NEGATIVE },
            })
        }
    }
}
