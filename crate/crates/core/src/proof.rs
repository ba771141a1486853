//! Propositional proof scripts: the five primitive schemas, modus ponens
//! and uniform substitution, with every line cross-checked semantically.
//!
//! Script format, one line per step:
//!
//! ```text
//! label formula ; AX <schema> v=f, ...
//! label formula ; MP <major> <minor>
//! label formula ; SUB <label> v=f, ...
//! ```
//!
//! `#` starts a comment; blank lines are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::ontology::World;
use crate::prop::{is_tautology, AssignmentMode};
use crate::syntax::{is_prop_var, parse, substitute_props, Formula};

pub type Substitution = BTreeMap<String, Formula>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Schema {
    /// `p v p .=>. p`
    Taut,
    /// `q .=>. p v q`
    Add,
    /// `p v q .=>. q v p`
    Perm,
    /// `p v (q v r) .=>. q v (p v r)`
    Assoc,
    /// `q => r .=>. p v q => p v r`
    Sum,
}

impl Schema {
    pub const ALL: [Schema; 5] = [
        Schema::Taut,
        Schema::Add,
        Schema::Perm,
        Schema::Assoc,
        Schema::Sum,
    ];

    pub fn vars(self) -> &'static [&'static str] {
        match self {
            Schema::Taut => &["p"],
            Schema::Add | Schema::Perm => &["p", "q"],
            Schema::Assoc | Schema::Sum => &["p", "q", "r"],
        }
    }

    pub fn template(self) -> Formula {
        let (p, q, r) = (Formula::var("p"), Formula::var("q"), Formula::var("r"));
        let or = Formula::or;
        match self {
            Schema::Taut => Formula::implies(or(p.clone(), p.clone()), p),
            Schema::Add => Formula::implies(q.clone(), or(p, q)),
            Schema::Perm => Formula::implies(or(p.clone(), q.clone()), or(q, p)),
            Schema::Assoc => {
                Formula::implies(or(p.clone(), or(q.clone(), r.clone())), or(q, or(p, r)))
            }
            Schema::Sum => Formula::implies(
                Formula::implies(q.clone(), r.clone()),
                Formula::implies(or(p.clone(), q), or(p, r)),
            ),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Schema::ALL
            .into_iter()
            .find(|schema| schema.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownSchema(s.to_string()))
    }
}

/// Instance of the named schema; `subst` must cover every schema variable.
pub fn axiom_instance(name: &str, subst: &Substitution) -> Result<Formula, Error> {
    let schema: Schema = name.parse()?;
    let missing: Vec<&str> = schema
        .vars()
        .iter()
        .copied()
        .filter(|v| !subst.contains_key(*v))
        .collect();
    if !missing.is_empty() {
        return Err(Error::PartialSubstitution {
            schema: schema.to_string(),
            missing: missing.join(", "),
        });
    }
    Ok(substitute_props(&schema.template(), subst))
}

/// From `X => Y` and `X`, infer `Y`.
pub fn apply_mp(major: &Formula, minor: &Formula) -> Result<Formula, Error> {
    let (antecedent, consequent) = major
        .as_conditional()
        .ok_or_else(|| Error::NotConditional(major.to_string()))?;
    if antecedent != minor {
        return Err(Error::AntecedentMismatch {
            expected: antecedent.to_string(),
            got: minor.to_string(),
        });
    }
    Ok(consequent.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Justification {
    Axiom { schema: String, subst: Substitution },
    Mp { major: String, minor: String },
    Subst { source: String, subst: Substitution },
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subst_text = |subst: &Substitution| {
            subst
                .iter()
                .map(|(v, g)| format!("{v}={g}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            Justification::Axiom { schema, subst } => {
                write!(f, "AX {schema} {}", subst_text(subst))
            }
            Justification::Mp { major, minor } => write!(f, "MP {major} {minor}"),
            Justification::Subst { source, subst } => {
                write!(f, "SUB {source} {}", subst_text(subst))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofLine {
    /// 1-based line number in the source text.
    pub source_line: usize,
    pub label: String,
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProofScript {
    pub lines: Vec<ProofLine>,
}

impl FromStr for ProofScript {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let mut lines = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or_default().trim();
            if content.is_empty() {
                continue;
            }
            lines.push(parse_line(line, content)?);
        }
        if lines.is_empty() {
            return Err(Error::ScriptFormat {
                line: 0,
                message: "script has no proof lines".into(),
            });
        }
        Ok(ProofScript { lines })
    }
}

fn parse_line(line: usize, content: &str) -> Result<ProofLine, Error> {
    let bad = |message: String| Error::ScriptFormat { line, message };
    let (label, rest) = content
        .split_once(char::is_whitespace)
        .ok_or_else(|| bad("expected `label formula ; justification`".into()))?;
    let (formula_text, just_text) = rest
        .split_once(';')
        .ok_or_else(|| bad("missing `;` before the justification".into()))?;
    let formula = parse(formula_text.trim()).map_err(|e| bad(e.to_string()))?;
    let just_text = just_text.trim();
    let (rule, args) = just_text
        .split_once(char::is_whitespace)
        .unwrap_or((just_text, ""));
    let args = args.trim();
    let justification = match rule {
        "AX" => {
            let (schema, subst) = args.split_once(char::is_whitespace).unwrap_or((args, ""));
            if schema.is_empty() {
                return Err(bad("AX needs a schema name".into()));
            }
            Justification::Axiom {
                schema: schema.to_string(),
                subst: parse_substitution(subst).map_err(bad)?,
            }
        }
        "MP" => match args.split_whitespace().collect::<Vec<_>>()[..] {
            [major, minor] => Justification::Mp {
                major: major.to_string(),
                minor: minor.to_string(),
            },
            _ => return Err(bad("MP needs two labels".into())),
        },
        "SUB" => {
            let (source, subst) = args.split_once(char::is_whitespace).unwrap_or((args, ""));
            if source.is_empty() {
                return Err(bad("SUB needs a source label".into()));
            }
            Justification::Subst {
                source: source.to_string(),
                subst: parse_substitution(subst).map_err(bad)?,
            }
        }
        other => return Err(bad(format!("unknown rule {other:?}"))),
    };
    Ok(ProofLine {
        source_line: line,
        label: label.to_string(),
        formula,
        justification,
    })
}

fn parse_substitution(text: &str) -> Result<Substitution, String> {
    let mut subst = Substitution::new();
    for entry in text.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (var, value) = entry
            .split_once('=')
            .ok_or_else(|| format!("substitution entry {entry:?} lacks `=`"))?;
        let var = var.trim();
        if !is_prop_var(var) {
            return Err(format!("{var:?} is not a propositional variable"));
        }
        let value = parse(value.trim()).map_err(|e| format!("{var}: {e}"))?;
        if !value.is_propositional() {
            return Err(format!("{var}: {value} is not propositional"));
        }
        if subst.insert(var.to_string(), value).is_some() {
            return Err(format!("{var} substituted twice"));
        }
    }
    Ok(subst)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum LineStatus {
    Valid,
    Invalid(String),
    /// Follows an invalid line.
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineReport {
    pub source_line: usize,
    pub label: String,
    pub formula: String,
    pub status: LineStatus,
    /// Canonical-mode tautology verdict; `None` when it could not be run.
    pub tautology: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofReport {
    pub lines: Vec<LineReport>,
}

impl ProofReport {
    pub fn is_valid(&self) -> bool {
        self.lines.iter().all(|l| l.status == LineStatus::Valid)
    }

    pub fn first_invalid(&self) -> Option<&LineReport> {
        self.lines
            .iter()
            .find(|l| matches!(l.status, LineStatus::Invalid(_)))
    }

    /// Lines whose formula is not a canonical-mode tautology.
    pub fn soundness_alarms(&self) -> Vec<&LineReport> {
        self.lines
            .iter()
            .filter(|l| l.tautology != Some(true))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let status = match &l.status {
                LineStatus::Valid => "valid".to_string(),
                LineStatus::Invalid(reason) => format!("INVALID: {reason}"),
                LineStatus::Unchecked => "unchecked".to_string(),
            };
            let taut = match l.tautology {
                Some(true) => "",
                Some(false) => "  [soundness alarm: not a tautology]",
                None => "  [soundness alarm: tautology check failed]",
            };
            out.push_str(&format!(
                "{:>4} {:<6} {}  {status}{taut}\n",
                l.source_line, l.label, l.formula
            ));
        }
        let verdict = if self.is_valid() { "valid" } else { "invalid" };
        out.push_str(&format!(
            "proof: {verdict}; soundness alarms: {}\n",
            self.soundness_alarms().len()
        ));
        out
    }
}

/// Checks every line against its justification; lines after the first
/// failure are reported unchecked. Each formula is also classified in
/// canonical mode.
pub fn check_proof(s: &ProofScript) -> ProofReport {
    let mut proved: BTreeMap<&str, &Formula> = BTreeMap::new();
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut failed = false;
    let mut lines = Vec::with_capacity(s.lines.len());
    for line in &s.lines {
        let status = if failed {
            LineStatus::Unchecked
        } else {
            match check_line(line, &proved, &seen) {
                Ok(()) => {
                    proved.insert(&line.label, &line.formula);
                    LineStatus::Valid
                }
                Err(reason) => {
                    failed = true;
                    LineStatus::Invalid(reason)
                }
            }
        };
        seen.insert(&line.label);
        lines.push(LineReport {
            source_line: line.source_line,
            label: line.label.clone(),
            formula: line.formula.to_string(),
            status,
            tautology: tautology_verdict(&line.formula),
        });
    }
    ProofReport { lines }
}

fn tautology_verdict(f: &Formula) -> Option<bool> {
    let vars = f.prop_vars();
    let world = World::for_prop_vars(vars.iter().map(String::as_str));
    is_tautology(f, &world, AssignmentMode::Canonical)
        .ok()
        .map(|v| v.is_tautology())
}

fn check_line(
    line: &ProofLine,
    proved: &BTreeMap<&str, &Formula>,
    seen: &BTreeSet<&str>,
) -> Result<(), String> {
    if seen.contains(line.label.as_str()) {
        return Err(format!("duplicate label {}", line.label));
    }
    if !line.formula.is_propositional() {
        return Err(format!("{} is not propositional", line.formula));
    }
    let cite = |label: &str| {
        proved
            .get(label)
            .copied()
            .ok_or_else(|| format!("no earlier line labelled {label}"))
    };
    let derived = match &line.justification {
        Justification::Axiom { schema, subst } => {
            axiom_instance(schema, subst).map_err(|e| e.to_string())?
        }
        Justification::Mp { major, minor } => {
            apply_mp(cite(major)?, cite(minor)?).map_err(|e| e.to_string())?
        }
        Justification::Subst { source, subst } => substitute_props(cite(source)?, subst),
    };
    if derived != line.formula {
        return Err(format!(
            "justification yields {derived}, not {}",
            line.formula
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subst(pairs: &[(&str, &str)]) -> Substitution {
        pairs
            .iter()
            .map(|(v, f)| (v.to_string(), parse(f).unwrap()))
            .collect()
    }

    #[test]
    fn axiom_instances() {
        assert_eq!(
            axiom_instance("Taut", &subst(&[("p", "q")])).unwrap(),
            parse("q v q .=>. q").unwrap()
        );
        assert_eq!(
            axiom_instance("Add", &subst(&[("q", "p"), ("p", "p")])).unwrap(),
            parse("p .=>. p v p").unwrap()
        );
        assert!(matches!(
            axiom_instance("Mix", &Substitution::new()),
            Err(Error::UnknownSchema(_))
        ));
        assert!(matches!(
            axiom_instance("Sum", &subst(&[("p", "p")])),
            Err(Error::PartialSubstitution { missing, .. }) if missing == "q, r"
        ));
    }

    #[test]
    fn schemas_are_tautologies() {
        for schema in Schema::ALL {
            assert_eq!(
                tautology_verdict(&schema.template()),
                Some(true),
                "{schema}"
            );
        }
    }

    #[test]
    fn modus_ponens() {
        let f = |s| parse(s).unwrap();
        assert_eq!(apply_mp(&f("p .=>. q"), &f("p")).unwrap(), f("q"));
        assert!(matches!(
            apply_mp(&f("p v q"), &f("p")),
            Err(Error::NotConditional(_))
        ));
        assert_eq!(apply_mp(&f("(p v p) .=>. p"), &f("p v p")).unwrap(), f("p"));
        assert!(matches!(
            apply_mp(&f("p => q"), &f("q")),
            Err(Error::AntecedentMismatch { .. })
        ));
    }

    #[test]
    fn single_axiom_script_is_valid() {
        let script: ProofScript = "1 p v p .=>. p ; AX Taut p=p".parse().unwrap();
        let report = check_proof(&script);
        assert!(report.is_valid());
        assert!(report.soundness_alarms().is_empty());
    }

    #[test]
    fn failure_marks_later_lines_unchecked() {
        let script: ProofScript = "\
            1 p v p .=>. p ; AX Taut p=p\n\
            2 q .=>. q v q ; AX Add p=q, q=q\n\
            3 p ; MP 1 2\n\
            4 p v p .=>. p ; AX Taut p=p\n"
            .parse()
            .unwrap();
        let report = check_proof(&script);
        assert_eq!(report.lines[0].status, LineStatus::Valid);
        assert_eq!(report.lines[1].status, LineStatus::Valid);
        assert!(matches!(report.lines[2].status, LineStatus::Invalid(_)));
        assert_eq!(report.lines[3].status, LineStatus::Unchecked);
        assert_eq!(report.soundness_alarms().len(), 1);
    }

    #[test]
    fn script_format_errors() {
        for text in [
            "",
            "1 p v p",
            "1 p ; XX",
            "1 p ; MP 1",
            "1 p ; AX Taut x=p",
            "1 p ; SUB 2 p=q,p=r",
        ] {
            assert!(
                matches!(text.parse::<ProofScript>(), Err(Error::ScriptFormat { .. })),
                "{text:?}"
            );
        }
    }
}
