//! Meanings of propositional formulas under an assignment, truth and
//! tautology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::meaning::{negate, Meaning, Member, Policy};
use crate::ontology::{b0, canonical_atom_meaning, B1Pair, World};
use crate::syntax::Formula;

/// A total map from propositional variables to meanings, grounded in a
/// world whose complexes every assigned meaning is built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropAssignment {
    world: World,
    values: BTreeMap<String, Meaning>,
}

impl PropAssignment {
    pub fn new(world: World, values: BTreeMap<String, Meaning>) -> Result<Self, Error> {
        for meaning in values.values() {
            meaning.check_grounded(&world)?;
        }
        Ok(PropAssignment { world, values })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn get(&self, var: &str) -> Option<&Meaning> {
        self.values.get(var)
    }

    pub fn values(&self) -> &BTreeMap<String, Meaning> {
        &self.values
    }

    /// The classical valuation induced by truth of the assigned meanings.
    pub fn valuation(&self) -> BTreeMap<String, bool> {
        self.values
            .iter()
            .map(|(var, m)| (var.clone(), m.is_true()))
            .collect()
    }
}

impl fmt::Display for PropAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (var, m)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{var}={m}")?;
        }
        Ok(())
    }
}

/// A formula paired with its meaning under one interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposition {
    pub formula: Formula,
    pub meaning: Meaning,
}

impl Proposition {
    pub fn new(formula: Formula, h: &PropAssignment, policy: Policy) -> Result<Self, Error> {
        let meaning = eval_prop(&formula, h, policy)?;
        Ok(Proposition { formula, meaning })
    }

    pub fn is_true(&self) -> bool {
        self.meaning.is_true()
    }
}

/// Meaning of a propositional formula.
///
/// Variables take their assigned meaning, disjunction unites members and
/// negation goes through [`negate`].
pub fn eval_prop(f: &Formula, h: &PropAssignment, policy: Policy) -> Result<Meaning, Error> {
    match f {
        Formula::PropVar(name) => h
            .get(name)
            .cloned()
            .ok_or_else(|| Error::MissingVariable(name.clone())),
        Formula::Or(lhs, rhs) => Ok(eval_prop(lhs, h, policy)?.union(&eval_prop(rhs, h, policy)?)),
        Formula::Not(inner) => negate(&eval_prop(inner, h, policy)?, policy),
        Formula::Pred(..) | Formula::ForAll(..) | Formula::Exists(..) => {
            Err(Error::NotPropositional(f.to_string()))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum AssignmentMode {
    /// Every variable mapped to the canonical true or false atom meaning.
    #[default]
    Canonical,
    /// Pseudo-random meanings over the world's complexes, reproducible from
    /// the seed. At most `size_bound` members of at most `size_bound` pairs.
    Sampled {
        seed: u64,
        count: usize,
        size_bound: usize,
    },
}

impl fmt::Display for AssignmentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentMode::Canonical => write!(f, "canonical"),
            AssignmentMode::Sampled {
                seed,
                count,
                size_bound,
            } => write!(
                f,
                "sampled seed={seed} count={count} size-bound={size_bound}"
            ),
        }
    }
}

/// Pairs each variable with a propositional constant of `w`: the
/// upper-cased name when the world has it, otherwise the next unused
/// constant in sorted order.
pub fn constants_for<'a>(
    vars: impl IntoIterator<Item = &'a str>,
    w: &World,
) -> Result<BTreeMap<String, String>, Error> {
    let vars: BTreeSet<&str> = vars.into_iter().collect();
    let constants: Vec<&str> = w.prop_constants().map(|(name, _)| name).collect();
    let mut used: BTreeSet<&str> = BTreeSet::new();
    let mut out = BTreeMap::new();
    for var in &vars {
        let upper = var.to_ascii_uppercase();
        if let Some(c) = constants.iter().find(|c| **c == upper) {
            used.insert(c);
            out.insert(var.to_string(), c.to_string());
        }
    }
    let mut spare = constants.iter().filter(|c| !used.contains(**c));
    for var in &vars {
        if out.contains_key(*var) {
            continue;
        }
        match spare.next() {
            Some(c) => {
                out.insert(var.to_string(), c.to_string());
            }
            None => {
                return Err(Error::InsufficientConstants {
                    needed: vars.len(),
                    available: constants.len(),
                })
            }
        }
    }
    Ok(out)
}

/// The canonical assignment that reads each variable's value off its
/// constant in `w`.
pub fn assignment_from_world<'a>(
    vars: impl IntoIterator<Item = &'a str>,
    w: &World,
) -> Result<PropAssignment, Error> {
    let constants = constants_for(vars, w)?;
    let values = constants
        .into_iter()
        .map(|(var, c)| Ok((var, canonical_atom_meaning(w, &c, &[])?)))
        .collect::<Result<_, Error>>()?;
    PropAssignment::new(w.clone(), values)
}

/// Assignments for `vars` over `w`.
///
/// Canonical mode yields the `2^n` assignments in truth-table order (all
/// true first, the last variable alternating fastest); each is grounded in
/// a copy of `w` whose constants carry the assigned truth values.
pub fn enumerate_assignments<'a>(
    vars: impl IntoIterator<Item = &'a str>,
    w: &World,
    mode: AssignmentMode,
) -> Result<Vec<PropAssignment>, Error> {
    let vars: Vec<&str> = vars
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    match mode {
        AssignmentMode::Canonical => {
            let constants = constants_for(vars.iter().copied(), w)?;
            let n = vars.len();
            (0u64..1 << n)
                .map(|row| {
                    let mut world = w.clone();
                    for (k, var) in vars.iter().enumerate() {
                        let value = row >> (n - 1 - k) & 1 == 0;
                        world.set_prop(&constants[*var], value)?;
                    }
                    assignment_from_world(vars.iter().copied(), &world)
                })
                .collect()
        }
        AssignmentMode::Sampled {
            seed,
            count,
            size_bound,
        } => {
            if size_bound == 0 {
                return Err(Error::InvalidConfig("size bound must be positive".into()));
            }
            let pairs: Vec<B1Pair> = b0(w)
                .into_iter()
                .flat_map(|c| [B1Pair::diagonal(c.clone()), B1Pair::flipped(c)])
                .collect();
            if pairs.is_empty() {
                return Err(Error::EmptyWorld);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let values = vars
                        .iter()
                        .map(|var| {
                            (
                                var.to_string(),
                                random_meaning(&mut rng, &pairs, size_bound),
                            )
                        })
                        .collect();
                    PropAssignment::new(w.clone(), values)
                })
                .collect()
        }
    }
}

fn random_meaning(rng: &mut impl Rng, pairs: &[B1Pair], bound: usize) -> Meaning {
    let members = rng.gen_range(1..=bound);
    let widest = bound.min(pairs.len());
    let sets: Vec<Member> = (0..members)
        .map(|_| {
            let size = rng.gen_range(1..=widest);
            sample(rng, pairs.len(), size)
                .into_iter()
                .map(|i| pairs[i].clone())
                .collect()
        })
        .collect();
    Meaning::new(sets).expect("sampled members are non-empty")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Tautology,
    Contradiction {
        witness: PropAssignment,
    },
    Contingent {
        true_witness: PropAssignment,
        false_witness: PropAssignment,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Tautology => "tautology",
            Verdict::Contradiction { .. } => "contradiction",
            Verdict::Contingent { .. } => "contingent",
        }
    }

    pub fn is_tautology(&self) -> bool {
        matches!(self, Verdict::Tautology)
    }
}

/// Tautology check with the default (minimal) transversal policy.
pub fn is_tautology(f: &Formula, w: &World, mode: AssignmentMode) -> Result<Verdict, Error> {
    classify(f, w, mode, Policy::default())
}

/// True under every enumerated assignment: tautology; false under every
/// one: contradiction; otherwise contingent, with the first witness of each
/// kind in enumeration order.
pub fn classify(
    f: &Formula,
    w: &World,
    mode: AssignmentMode,
    policy: Policy,
) -> Result<Verdict, Error> {
    if !f.is_propositional() {
        return Err(Error::NotPropositional(f.to_string()));
    }
    let vars = f.prop_vars();
    let assignments = enumerate_assignments(vars.iter().map(String::as_str), w, mode)?;
    if assignments.is_empty() {
        return Err(Error::InvalidConfig("no assignments to check".into()));
    }
    let mut true_witness = None;
    let mut false_witness = None;
    for h in assignments {
        let slot = if eval_prop(f, &h, policy)?.is_true() {
            &mut true_witness
        } else {
            &mut false_witness
        };
        if slot.is_none() {
            *slot = Some(h);
        }
        if true_witness.is_some() && false_witness.is_some() {
            break;
        }
    }
    Ok(match (true_witness, false_witness) {
        (Some(_), None) => Verdict::Tautology,
        (None, Some(witness)) => Verdict::Contradiction { witness },
        (Some(true_witness), Some(false_witness)) => Verdict::Contingent {
            true_witness,
            false_witness,
        },
        (None, None) => unreachable!("at least one assignment was evaluated"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::ElementaryComplex;
    use crate::syntax::parse;

    fn pos(name: &str) -> ElementaryComplex {
        ElementaryComplex::new(name, &[], true)
    }
    fn neg(name: &str) -> ElementaryComplex {
        ElementaryComplex::new(name, &[], false)
    }

    fn assignment(values: &[(&str, bool)]) -> PropAssignment {
        let mut w = World::new();
        for (var, value) in values {
            w.set_prop(&var.to_ascii_uppercase(), *value).unwrap();
        }
        assignment_from_world(values.iter().map(|(v, _)| *v), &w).unwrap()
    }

    #[test]
    fn base_case_returns_assigned_meaning() {
        let h = assignment(&[("p", true)]);
        assert_eq!(
            eval_prop(&parse("p").unwrap(), &h, Policy::Minimal).unwrap(),
            Meaning::singleton(B1Pair::diagonal(pos("P")))
        );
    }

    #[test]
    fn single_member_negation() {
        let h = assignment(&[("p", true)]);
        let m = eval_prop(&parse("~p").unwrap(), &h, Policy::Minimal).unwrap();
        assert_eq!(m, Meaning::singleton(B1Pair::flipped(pos("P"))));
        assert!(!m.is_true());
    }

    #[test]
    fn negated_disjunction_uses_transversals() {
        let h = assignment(&[("p", true), ("q", false)]);
        let m = eval_prop(&parse("~(p v q)").unwrap(), &h, Policy::Minimal).unwrap();
        let expected = Meaning::new([BTreeSet::from([
            B1Pair::flipped(pos("P")),
            B1Pair::diagonal(neg("Q")),
        ])])
        .unwrap();
        assert_eq!(m, expected);
        assert!(!m.is_true());
    }

    #[test]
    fn eval_errors() {
        let h = assignment(&[("p", true)]);
        assert!(matches!(
            eval_prop(&parse("p v q").unwrap(), &h, Policy::Minimal),
            Err(Error::MissingVariable(v)) if v == "q"
        ));
        assert!(matches!(
            eval_prop(&parse("(x).S(x)").unwrap(), &h, Policy::Minimal),
            Err(Error::NotPropositional(_))
        ));
    }

    #[test]
    fn canonical_enumeration() {
        let w = World::for_prop_vars(["p", "q"]);
        let one = enumerate_assignments(["p"], &w, AssignmentMode::Canonical).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!(
            one[0].get("p").unwrap(),
            &Meaning::singleton(B1Pair::diagonal(pos("P")))
        );
        assert_eq!(
            one[1].get("p").unwrap(),
            &Meaning::singleton(B1Pair::flipped(neg("P")))
        );

        let two = enumerate_assignments(["p", "q"], &w, AssignmentMode::Canonical).unwrap();
        let rows: Vec<Vec<bool>> = two
            .iter()
            .map(|h| h.valuation().into_values().collect())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec![true, true],
                vec![true, false],
                vec![false, true],
                vec![false, false]
            ]
        );
    }

    #[test]
    fn constants_are_matched_by_name_then_order() {
        let mut w = World::new();
        w.set_prop("A", true).unwrap();
        w.set_prop("Q", true).unwrap();
        let map = constants_for(["p", "q"], &w).unwrap();
        assert_eq!(map["q"], "Q");
        assert_eq!(map["p"], "A");
        assert!(matches!(
            enumerate_assignments(["p", "q", "r"], &w, AssignmentMode::Canonical),
            Err(Error::InsufficientConstants {
                needed: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn sampled_enumeration_is_reproducible() {
        let w: World = "individual a\nindividual b\nrelation S/1\nfact S(a)\nprop P true"
            .parse()
            .unwrap();
        let mode = AssignmentMode::Sampled {
            seed: 1,
            count: 10,
            size_bound: 3,
        };
        let first = enumerate_assignments(["p", "q"], &w, mode).unwrap();
        let again = enumerate_assignments(["p", "q"], &w, mode).unwrap();
        assert_eq!(first.len(), 10);
        assert_eq!(first, again);
        for h in &first {
            for m in h.values().values() {
                assert!(m.len() <= 3 && m.members().iter().all(|s| !s.is_empty() && s.len() <= 3));
                m.check_grounded(&w).unwrap();
            }
        }
        let other = enumerate_assignments(
            ["p", "q"],
            &w,
            AssignmentMode::Sampled {
                seed: 2,
                count: 10,
                size_bound: 3,
            },
        )
        .unwrap();
        assert_ne!(first, other);
    }

    #[test]
    fn ungrounded_assignment_is_rejected() {
        let w = World::for_prop_vars(["p"]);
        let values = BTreeMap::from([(
            "p".to_string(),
            Meaning::singleton(B1Pair::flipped(neg("P"))),
        )]);
        assert!(PropAssignment::new(w, values).is_err());
    }

    #[test]
    fn tautology_verdicts() {
        let w = World::for_prop_vars(["p", "q"]);
        let verdict =
            |t: &str| is_tautology(&parse(t).unwrap(), &w, AssignmentMode::Canonical).unwrap();
        assert_eq!(verdict("p v ~p"), Verdict::Tautology);
        assert_eq!(verdict("p . ~p").name(), "contradiction");
        match verdict("p v q") {
            Verdict::Contingent { false_witness, .. } => {
                assert_eq!(
                    false_witness.valuation().into_values().collect::<Vec<_>>(),
                    vec![false, false]
                );
            }
            other => panic!("expected contingent, got {other:?}"),
        }
    }

    #[test]
    fn proposition_pairs_formula_with_meaning() {
        let h = assignment(&[("p", false)]);
        let prop = Proposition::new(parse("~p").unwrap(), &h, Policy::Full).unwrap();
        assert!(prop.is_true());
        assert_eq!(prop.meaning, Meaning::singleton(B1Pair::diagonal(neg("P"))));
    }
}
