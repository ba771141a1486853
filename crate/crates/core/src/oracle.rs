//! Classical ground truth: truth tables, Tarskian finite models, exhaustive
//! formula enumeration and the sweeps that compare them with the
//! complex-based semantics.
//!
//! The evaluators here only read formulas, valuations and models; none of
//! them touches meanings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fo::{eval_fo, worlds_for, BaseMode, FoBinding};
use crate::meaning::{Meaning, Policy};
use crate::ontology::World;
use crate::prop::{classify, enumerate_assignments, eval_prop, AssignmentMode, PropAssignment};
use crate::syntax::Formula;

pub type Valuation = BTreeMap<String, bool>;

/// Classical truth value of a propositional formula.
pub fn truth_table_eval(f: &Formula, v: &Valuation) -> Result<bool, Error> {
    match f {
        Formula::PropVar(name) => v
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingVariable(name.clone())),
        Formula::Or(lhs, rhs) => Ok(truth_table_eval(lhs, v)? || truth_table_eval(rhs, v)?),
        Formula::Not(inner) => Ok(!truth_table_eval(inner, v)?),
        Formula::Pred(..) | Formula::ForAll(..) | Formula::Exists(..) => {
            Err(Error::NotPropositional(f.to_string()))
        }
    }
}

/// Whether `f` is true under every valuation of its variables.
pub fn truth_table_tautology(f: &Formula) -> Result<bool, Error> {
    let vars: Vec<String> = f.prop_vars().into_iter().collect();
    for row in 0u64..1 << vars.len() {
        let v: Valuation = vars
            .iter()
            .enumerate()
            .map(|(i, var)| (var.clone(), row >> i & 1 == 1))
            .collect();
        if !truth_table_eval(f, &v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite first-order model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TarskiModel {
    pub domain: BTreeSet<String>,
    pub extensions: BTreeMap<String, BTreeSet<Vec<String>>>,
    pub prop_values: Valuation,
}

impl TarskiModel {
    /// Reads the domain and relation extensions off a world; propositional
    /// variables take `prop_values`.
    pub fn from_world(w: &World, prop_values: Valuation) -> Self {
        let domain = w.individuals().map(String::from).collect();
        let extensions = w
            .relations()
            .map(|(name, arity)| {
                let ext = w
                    .tuples(arity)
                    .into_iter()
                    .filter(|args| w.holds(name, args).unwrap_or(false))
                    .map(|args| args.into_iter().map(String::from).collect())
                    .collect();
                (name.to_string(), ext)
            })
            .collect();
        TarskiModel {
            domain,
            extensions,
            prop_values,
        }
    }
}

/// Standard satisfaction over a finite domain.
pub fn tarski_eval(
    f: &Formula,
    m: &TarskiModel,
    env: &BTreeMap<String, String>,
) -> Result<bool, Error> {
    match f {
        Formula::PropVar(name) => m
            .prop_values
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingVariable(name.clone())),
        Formula::Pred(pred, var) => {
            let ind = env
                .get(var)
                .ok_or_else(|| Error::UnboundVariable(var.clone()))?;
            let ext = m
                .extensions
                .get(pred)
                .ok_or_else(|| Error::UnknownRelation(pred.clone()))?;
            Ok(ext.contains(std::slice::from_ref(ind)))
        }
        Formula::Or(lhs, rhs) => Ok(tarski_eval(lhs, m, env)? || tarski_eval(rhs, m, env)?),
        Formula::Not(inner) => Ok(!tarski_eval(inner, m, env)?),
        Formula::ForAll(var, body) | Formula::Exists(var, body) => {
            let universal = matches!(f, Formula::ForAll(..));
            let mut env = env.clone();
            for ind in &m.domain {
                env.insert(var.clone(), ind.clone());
                if tarski_eval(body, m, &env)? != universal {
                    return Ok(!universal);
                }
            }
            Ok(universal)
        }
    }
}

/// Vocabulary and bounds for [`enumerate_formulas`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaSpace {
    pub prop_vars: Vec<String>,
    pub predicates: Vec<String>,
    pub ind_vars: Vec<String>,
    /// Maximum number of connective and quantifier nodes.
    pub max_degree: usize,
    pub max_quantifiers: usize,
}

impl FormulaSpace {
    pub fn propositional(vars: &[&str], max_degree: usize) -> Self {
        FormulaSpace {
            prop_vars: vars.iter().map(|v| v.to_string()).collect(),
            predicates: Vec::new(),
            ind_vars: Vec::new(),
            max_degree,
            max_quantifiers: 0,
        }
    }
}

/// Every formula of the space, each exactly once.
///
/// Order: by degree; within a degree by quantifier count; then negations,
/// universal and existential quantifiers (per variable, in the given
/// order), then disjunctions by left-operand degree. Atoms are the
/// propositional variables followed by each predicate applied to each
/// individual variable.
pub fn enumerate_formulas(space: &FormulaSpace) -> Vec<Formula> {
    let q = space.max_quantifiers;
    // by_shape[d][k]: formulas of degree d with exactly k quantifiers.
    let mut by_shape: Vec<Vec<Vec<Formula>>> = Vec::with_capacity(space.max_degree + 1);
    let mut atoms: Vec<Formula> = space
        .prop_vars
        .iter()
        .map(|v| Formula::var(v.clone()))
        .collect();
    for pred in &space.predicates {
        for var in &space.ind_vars {
            atoms.push(Formula::pred(pred.clone(), var.clone()));
        }
    }
    let mut level0 = vec![Vec::new(); q + 1];
    level0[0] = atoms;
    by_shape.push(level0);

    for d in 1..=space.max_degree {
        let mut level = vec![Vec::new(); q + 1];
        for (k, slot) in level.iter_mut().enumerate() {
            for f in &by_shape[d - 1][k] {
                slot.push(Formula::not(f.clone()));
            }
            if k > 0 {
                for var in &space.ind_vars {
                    for f in &by_shape[d - 1][k - 1] {
                        slot.push(Formula::forall(var.clone(), f.clone()));
                    }
                }
                for var in &space.ind_vars {
                    for f in &by_shape[d - 1][k - 1] {
                        slot.push(Formula::exists(var.clone(), f.clone()));
                    }
                }
            }
            for left in 0..d {
                let right = d - 1 - left;
                for kl in 0..=k {
                    for a in &by_shape[left][kl] {
                        for b in &by_shape[right][k - kl] {
                            slot.push(Formula::or(a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        by_shape.push(level);
    }
    by_shape.into_iter().flatten().flatten().collect()
}

/// Evaluation routes checked against the oracles. [`PmSemantics`] is the
/// real one; tests substitute deliberately broken implementations.
pub trait Semantics: Sync {
    fn eval_prop(&self, f: &Formula, h: &PropAssignment, policy: Policy) -> Result<Meaning, Error>;

    fn eval_fo(
        &self,
        f: &Formula,
        b: &FoBinding,
        h: &PropAssignment,
        policy: Policy,
        base_mode: &BaseMode,
    ) -> Result<Meaning, Error>;
}

pub struct PmSemantics;

impl Semantics for PmSemantics {
    fn eval_prop(&self, f: &Formula, h: &PropAssignment, policy: Policy) -> Result<Meaning, Error> {
        eval_prop(f, h, policy)
    }

    fn eval_fo(
        &self,
        f: &Formula,
        b: &FoBinding,
        h: &PropAssignment,
        policy: Policy,
        base_mode: &BaseMode,
    ) -> Result<Meaning, Error> {
        eval_fo(f, b, h, policy, base_mode)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropSweep {
    pub vars: usize,
    pub max_degree: usize,
    pub policies: Vec<Policy>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoSweep {
    pub max_degree: usize,
    pub max_quantifiers: usize,
    pub predicates: usize,
    pub prop_vars: usize,
    pub ind_vars: usize,
    pub max_individuals: usize,
    pub policies: Vec<Policy>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub mode: AssignmentMode,
    pub propositional: Option<PropSweep>,
    pub first_order: Option<FoSweep>,
    /// How many disagreement records to keep per sweep; counts are exact.
    pub record_limit: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            mode: AssignmentMode::Canonical,
            propositional: Some(PropSweep {
                vars: 3,
                max_degree: 5,
                policies: Policy::ALL.to_vec(),
            }),
            first_order: Some(FoSweep {
                max_degree: 4,
                max_quantifiers: 2,
                predicates: 2,
                prop_vars: 1,
                ind_vars: 2,
                max_individuals: 3,
                policies: vec![Policy::Minimal],
            }),
            record_limit: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Truth of the meaning against the classical oracle.
    Oracle,
    /// Truth under the minimal policy against the full policy.
    Policy,
    /// Meaning invariants: non-empty members, complexes in the world.
    Closure,
    /// Canonical tautology verdict against the truth-table verdict.
    Tautology,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub check: Check,
    pub formula: String,
    pub assignment: String,
    pub policy: Option<Policy>,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub formulas: usize,
    pub evaluations: usize,
    pub counts: BTreeMap<Check, usize>,
    /// First disagreements in enumeration order; the first is the minimal
    /// counterexample.
    pub records: Vec<Disagreement>,
}

impl SweepReport {
    pub fn disagreements(&self) -> usize {
        self.counts.values().sum()
    }

    fn absorb(&mut self, found: Vec<Disagreement>, limit: usize) {
        for d in found {
            *self.counts.entry(d.check).or_default() += 1;
            if self.records.len() < limit {
                self.records.push(d);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub config: SuiteConfig,
    pub propositional: Option<SweepReport>,
    pub first_order: Option<SweepReport>,
}

impl Report {
    pub fn disagreements(&self) -> usize {
        [&self.propositional, &self.first_order]
            .into_iter()
            .flatten()
            .map(SweepReport::disagreements)
            .sum()
    }

    pub fn passed(&self) -> bool {
        self.disagreements() == 0
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# pm compare");
        let _ = writeln!(out, "# mode: {}", self.config.mode);
        if let (Some(cfg), Some(r)) = (&self.config.propositional, &self.propositional) {
            let _ = writeln!(
                out,
                "propositional: vars={} degree<={} policies={} formulas={} evaluations={}",
                cfg.vars,
                cfg.max_degree,
                policy_list(&cfg.policies),
                r.formulas,
                r.evaluations
            );
            write_sweep(&mut out, r);
        }
        if let (Some(cfg), Some(r)) = (&self.config.first_order, &self.first_order) {
            let _ = writeln!(
                out,
                "first-order: degree<={} quantifiers<={} predicates={} prop-vars={} individuals<={} policies={} formulas={} evaluations={}",
                cfg.max_degree,
                cfg.max_quantifiers,
                cfg.predicates,
                cfg.prop_vars,
                cfg.max_individuals,
                policy_list(&cfg.policies),
                r.formulas,
                r.evaluations
            );
            write_sweep(&mut out, r);
        }
        let _ = writeln!(out, "{} disagreements", self.disagreements());
        out
    }
}

fn policy_list(policies: &[Policy]) -> String {
    policies
        .iter()
        .map(Policy::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn write_sweep(out: &mut String, r: &SweepReport) {
    for check in [
        Check::Oracle,
        Check::Policy,
        Check::Closure,
        Check::Tautology,
    ] {
        let _ = writeln!(
            out,
            "  {:?} disagreements: {}",
            check,
            r.counts.get(&check).copied().unwrap_or(0)
        );
    }
    for d in &r.records {
        let policy = d.policy.map(|p| format!(" policy={p}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "  ! {:?}{policy}: {} under [{}]: expected {}, got {}",
            d.check, d.formula, d.assignment, d.expected, d.got
        );
    }
}

/// Variable names `p, q, r, p1, q1, r1, ...`.
pub fn prop_var_name(i: usize) -> String {
    let letter = ["p", "q", "r"][i % 3];
    match i / 3 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

/// Runs the configured sweeps against [`PmSemantics`].
pub fn check_equivalence(config: &SuiteConfig) -> Result<Report, Error> {
    check_equivalence_with(config, &PmSemantics)
}

pub fn check_equivalence_with(
    config: &SuiteConfig,
    semantics: &dyn Semantics,
) -> Result<Report, Error> {
    let propositional = config
        .propositional
        .as_ref()
        .map(|sweep| prop_sweep(sweep, config, semantics))
        .transpose()?;
    let first_order = config
        .first_order
        .as_ref()
        .map(|sweep| fo_sweep(sweep, config, semantics))
        .transpose()?;
    Ok(Report {
        config: config.clone(),
        propositional,
        first_order,
    })
}

fn outcome(result: &Result<Meaning, Error>) -> String {
    match result {
        Ok(m) => m.is_true().to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// Records the oracle and closure checks for one evaluation; returns its
/// truth value when it succeeded.
fn check_meaning(
    found: &mut Vec<Disagreement>,
    formula: &str,
    h: &PropAssignment,
    digest: &dyn Fn() -> String,
    policy: Policy,
    result: Result<Meaning, Error>,
    expected: bool,
) -> Option<bool> {
    let record = |check, expected: String, got: String| Disagreement {
        check,
        formula: formula.to_string(),
        assignment: digest(),
        policy: Some(policy),
        expected,
        got,
    };
    let truth = match &result {
        Ok(m) => {
            if let Err(e) = m.check_grounded(h.world()) {
                found.push(record(
                    Check::Closure,
                    "grounded meaning".into(),
                    e.to_string(),
                ));
            }
            Some(m.is_true())
        }
        Err(_) => None,
    };
    if truth != Some(expected) {
        found.push(record(
            Check::Oracle,
            expected.to_string(),
            outcome(&result),
        ));
    }
    truth
}

fn policy_check(
    found: &mut Vec<Disagreement>,
    formula: &str,
    digest: &dyn Fn() -> String,
    truths: &[(Policy, Option<bool>)],
) {
    if let Some((first_policy, first)) = truths.first() {
        for (policy, truth) in &truths[1..] {
            if let (Some(a), Some(b)) = (first, truth) {
                if a != b {
                    found.push(Disagreement {
                        check: Check::Policy,
                        formula: formula.to_string(),
                        assignment: digest(),
                        policy: Some(*policy),
                        expected: format!("{a} (as under {first_policy})"),
                        got: b.to_string(),
                    });
                }
            }
        }
    }
}

fn prop_sweep(
    sweep: &PropSweep,
    config: &SuiteConfig,
    semantics: &dyn Semantics,
) -> Result<SweepReport, Error> {
    let names: Vec<String> = (0..sweep.vars).map(prop_var_name).collect();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let world = World::for_prop_vars(vars.iter().copied());
    let assignments = enumerate_assignments(vars.iter().copied(), &world, config.mode)?;
    let formulas = enumerate_formulas(&FormulaSpace::propositional(&vars, sweep.max_degree));
    let canonical = config.mode == AssignmentMode::Canonical;

    let per_formula: Vec<Vec<Disagreement>> = formulas
        .par_iter()
        .map(|f| {
            let text = f.to_string();
            let mut found = Vec::new();
            for h in &assignments {
                let valuation = h.valuation();
                let digest = || h.to_string();
                let expected = truth_table_eval(f, &valuation)?;
                let truths: Vec<(Policy, Option<bool>)> = sweep
                    .policies
                    .iter()
                    .map(|&policy| {
                        let result = semantics.eval_prop(f, h, policy);
                        (
                            policy,
                            check_meaning(&mut found, &text, h, &digest, policy, result, expected),
                        )
                    })
                    .collect();
                policy_check(&mut found, &text, &digest, &truths);
            }
            if canonical {
                let expected = truth_table_tautology(f)?;
                let got =
                    classify(f, &world, AssignmentMode::Canonical, Policy::Minimal)?.is_tautology();
                if got != expected {
                    found.push(Disagreement {
                        check: Check::Tautology,
                        formula: text.clone(),
                        assignment: "all canonical assignments".into(),
                        policy: Some(Policy::Minimal),
                        expected: expected.to_string(),
                        got: got.to_string(),
                    });
                }
            }
            Ok(found)
        })
        .collect::<Result<_, Error>>()?;

    let mut report = SweepReport {
        formulas: formulas.len(),
        evaluations: formulas.len() * assignments.len() * sweep.policies.len(),
        ..SweepReport::default()
    };
    for found in per_formula {
        report.absorb(found, config.record_limit);
    }
    Ok(report)
}

fn fo_sweep(
    sweep: &FoSweep,
    config: &SuiteConfig,
    semantics: &dyn Semantics,
) -> Result<SweepReport, Error> {
    const PREDICATES: [&str; 4] = ["S", "T", "U", "V"];
    if sweep.predicates > PREDICATES.len() {
        return Err(Error::InvalidConfig(format!(
            "at most {} predicates",
            PREDICATES.len()
        )));
    }
    let ind_names = ["x", "y", "z"];
    if sweep.ind_vars > ind_names.len() {
        return Err(Error::InvalidConfig(
            "at most 3 individual variables".into(),
        ));
    }
    let space = FormulaSpace {
        prop_vars: (0..sweep.prop_vars).map(prop_var_name).collect(),
        predicates: PREDICATES[..sweep.predicates]
            .iter()
            .map(|p| p.to_string())
            .collect(),
        ind_vars: ind_names[..sweep.ind_vars]
            .iter()
            .map(|v| v.to_string())
            .collect(),
        max_degree: sweep.max_degree,
        max_quantifiers: sweep.max_quantifiers,
    };
    let formulas: Vec<Formula> = enumerate_formulas(&space)
        .into_iter()
        .filter(Formula::is_closed)
        .collect();

    let per_formula: Vec<(usize, Vec<Disagreement>)> = formulas
        .par_iter()
        .map(|f| {
            let text = f.to_string();
            let mut found = Vec::new();
            let mut evaluations = 0;
            let vars = f.prop_vars();
            for world in worlds_for(f, sweep.max_individuals)? {
                for h in
                    enumerate_assignments(vars.iter().map(String::as_str), &world, config.mode)?
                {
                    let binding = FoBinding::standard(h.world().clone())?;
                    let model = TarskiModel::from_world(h.world(), h.valuation());
                    let expected = tarski_eval(f, &model, &BTreeMap::new())?;
                    let digest = || format!("world {}; {}", h.world().summary(), h);
                    let truths: Vec<(Policy, Option<bool>)> = sweep
                        .policies
                        .iter()
                        .map(|&policy| {
                            evaluations += 1;
                            let result = semantics.eval_fo(f, &binding, &h, policy, &BaseMode::All);
                            (
                                policy,
                                check_meaning(
                                    &mut found, &text, &h, &digest, policy, result, expected,
                                ),
                            )
                        })
                        .collect();
                    policy_check(&mut found, &text, &digest, &truths);
                }
            }
            Ok((evaluations, found))
        })
        .collect::<Result<_, Error>>()?;

    let mut report = SweepReport {
        formulas: formulas.len(),
        ..SweepReport::default()
    };
    for (evaluations, found) in per_formula {
        report.evaluations += evaluations;
        report.absorb(found, config.record_limit);
    }
    Ok(report)
}
