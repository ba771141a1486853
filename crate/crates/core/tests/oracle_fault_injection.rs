use pm_core::fo::{BaseMode, FoBinding};
use pm_core::oracle::{
    check_equivalence, check_equivalence_with, Check, FoSweep, PmSemantics, PropSweep, Semantics,
    SuiteConfig,
};
use pm_core::prop::PropAssignment;
use pm_core::{Error, Formula, Meaning, Policy};

/// Reads `~(A v B)` as `A v B`.
fn drop_negated_disjunctions(f: &Formula) -> Formula {
    match f {
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Or(..) => drop_negated_disjunctions(inner),
            _ => Formula::not(drop_negated_disjunctions(inner)),
        },
        Formula::Or(a, b) => {
            Formula::or(drop_negated_disjunctions(a), drop_negated_disjunctions(b))
        }
        Formula::ForAll(v, body) => Formula::forall(v.clone(), drop_negated_disjunctions(body)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), drop_negated_disjunctions(body)),
        atom => atom.clone(),
    }
}

/// Reads `(Ex)` as `(x)`.
fn exists_as_forall(f: &Formula) -> Formula {
    match f {
        Formula::Not(inner) => Formula::not(exists_as_forall(inner)),
        Formula::Or(a, b) => Formula::or(exists_as_forall(a), exists_as_forall(b)),
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            Formula::forall(v.clone(), exists_as_forall(body))
        }
        atom => atom.clone(),
    }
}

struct Corrupted(fn(&Formula) -> Formula);

impl Semantics for Corrupted {
    fn eval_prop(&self, f: &Formula, h: &PropAssignment, policy: Policy) -> Result<Meaning, Error> {
        PmSemantics.eval_prop(&(self.0)(f), h, policy)
    }

    fn eval_fo(
        &self,
        f: &Formula,
        b: &FoBinding,
        h: &PropAssignment,
        policy: Policy,
        base_mode: &BaseMode,
    ) -> Result<Meaning, Error> {
        PmSemantics.eval_fo(&(self.0)(f), b, h, policy, base_mode)
    }
}

fn prop_only() -> SuiteConfig {
    SuiteConfig {
        propositional: Some(PropSweep {
            vars: 2,
            max_degree: 3,
            policies: Policy::ALL.to_vec(),
        }),
        first_order: None,
        ..SuiteConfig::default()
    }
}

fn fo_only() -> SuiteConfig {
    SuiteConfig {
        propositional: None,
        first_order: Some(FoSweep {
            max_degree: 2,
            max_quantifiers: 1,
            predicates: 1,
            prop_vars: 1,
            ind_vars: 1,
            max_individuals: 2,
            policies: vec![Policy::Minimal],
        }),
        ..SuiteConfig::default()
    }
}

#[test]
fn corrupted_negation_is_caught_with_minimal_witness() {
    let report =
        check_equivalence_with(&prop_only(), &Corrupted(drop_negated_disjunctions)).unwrap();
    assert!(!report.passed());
    let sweep = report.propositional.as_ref().unwrap();
    assert!(sweep.counts[&Check::Oracle] >= 1);
    let first = &sweep.records[0];
    assert_eq!(first.check, Check::Oracle);
    assert_eq!(first.formula, "~(p v p)");
    assert_eq!(
        (first.expected.as_str(), first.got.as_str()),
        ("false", "true")
    );
    assert!(report.to_text().contains("~(p v p)"));
    assert!(check_equivalence(&prop_only()).unwrap().passed());
}

#[test]
fn corrupted_existential_is_caught_with_minimal_witness() {
    let report = check_equivalence_with(&fo_only(), &Corrupted(exists_as_forall)).unwrap();
    let sweep = report.first_order.as_ref().unwrap();
    assert!(sweep.disagreements() >= 1);
    let first = &sweep.records[0];
    assert_eq!(first.formula, "(Ex).S(x)");
    assert!(
        first.assignment.starts_with("world {a,b}"),
        "{}",
        first.assignment
    );
    assert!(check_equivalence(&fo_only()).unwrap().passed());
}

#[test]
fn record_limit_caps_records_not_counts() {
    let mut config = prop_only();
    config.record_limit = 2;
    let report = check_equivalence_with(&config, &Corrupted(drop_negated_disjunctions)).unwrap();
    let sweep = report.propositional.unwrap();
    assert_eq!(sweep.records.len(), 2);
    assert!(sweep.disagreements() > 2);
}
