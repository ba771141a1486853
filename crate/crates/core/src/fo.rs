//! Meanings of monadic first-order formulas.
//!
//! Individual variables are valued by a [`FoBinding`]: a world, a map `xi`
//! from variables to individuals and a finite pool of variables whose
//! images cover the whole domain. Quantifiers range over the pool, so with
//! one pool variable per individual they range over the domain.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::meaning::{negate, Meaning, Member, Policy};
use crate::ontology::{canonical_atom_meaning, Name, World};
use crate::prop::{enumerate_assignments, AssignmentMode, PropAssignment};
use crate::syntax::{is_ind_var, Formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoBinding {
    world: World,
    xi: BTreeMap<String, String>,
    pool: Vec<String>,
}

impl FoBinding {
    pub fn new(
        world: World,
        xi: BTreeMap<String, String>,
        pool: Vec<String>,
    ) -> Result<Self, Error> {
        if pool.is_empty() {
            return Err(Error::EmptyPool);
        }
        for (var, ind) in &xi {
            if !is_ind_var(var) {
                return Err(Error::InvalidConfig(format!(
                    "{var:?} is not an individual variable"
                )));
            }
            if !world.has_individual(ind) {
                return Err(Error::UnknownIndividual(ind.clone()));
            }
        }
        let mut covered = BTreeSet::new();
        for var in &pool {
            let ind = xi
                .get(var)
                .ok_or_else(|| Error::UnboundVariable(var.clone()))?;
            covered.insert(ind.as_str());
        }
        if world.individuals().any(|ind| !covered.contains(ind)) {
            return Err(Error::PoolNotSurjective);
        }
        Ok(FoBinding { world, xi, pool })
    }

    /// Pool `z1..zn` mapped in order onto the world's (sorted) individuals.
    pub fn standard(world: World) -> Result<Self, Error> {
        let (xi, pool): (BTreeMap<_, _>, Vec<_>) = world
            .individuals()
            .enumerate()
            .map(|(i, ind)| {
                let var = format!("z{}", i + 1);
                ((var.clone(), ind.to_string()), var)
            })
            .unzip();
        FoBinding::new(world, xi, pool)
    }

    /// Sets `xi(var) = individual`.
    pub fn bind(&mut self, var: &str, individual: &str) -> Result<(), Error> {
        if !is_ind_var(var) {
            return Err(Error::InvalidConfig(format!(
                "{var:?} is not an individual variable"
            )));
        }
        if !self.world.has_individual(individual) {
            return Err(Error::UnknownIndividual(individual.to_string()));
        }
        if self.pool.iter().any(|p| p == var) {
            return Err(Error::InvalidConfig(format!(
                "{var} belongs to the variable pool"
            )));
        }
        self.xi.insert(var.to_string(), individual.to_string());
        Ok(())
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn pool(&self) -> &[String] {
        &self.pool
    }

    pub fn individual(&self, var: &str) -> Result<&str, Error> {
        self.xi
            .get(var)
            .map(String::as_str)
            .ok_or_else(|| Error::UnboundVariable(var.to_string()))
    }
}

/// Base meaning of a monadic predicate; its single argument position is the
/// tracked occurrence of the individual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTemplate {
    pub predicate: String,
}

impl ThetaTemplate {
    pub fn new(predicate: impl Into<String>) -> Self {
        ThetaTemplate {
            predicate: predicate.into(),
        }
    }
}

/// The canonical atom meaning of `predicate(xi(v))`.
pub fn theta_base(t: &ThetaTemplate, v: &str, b: &FoBinding) -> Result<Meaning, Error> {
    let ind = b.individual(v)?;
    canonical_atom_meaning(&b.world, &t.predicate, &[ind])
}

/// Member-wise union of meanings with the same structure.
///
/// A member's shape is its set of literals with individuals erased: the
/// relation of each pair, and whether the pair is diagonal exactly when its
/// complex is positive. Members are put in shape order (canonical order
/// within equal shapes) and member `i` of every meaning must have the same
/// shape. Variants of one formula at different individuals always line up,
/// and the result has the shared structure again.
pub fn dotted_union(meanings: &[Meaning]) -> Result<Meaning, Error> {
    let families: Vec<Vec<(Shape, &Member)>> = meanings
        .iter()
        .map(|m| {
            let mut members: Vec<(Shape, &Member)> =
                m.members().iter().map(|x| (shape(x), x)).collect();
            members.sort();
            members
        })
        .collect();
    if let Some(first) = families.first() {
        for family in &families[1..] {
            let same = family.len() == first.len()
                && family.iter().zip(first).all(|((a, _), (b, _))| a == b);
            if !same {
                return Err(Error::StructureMismatch(format!(
                    "{} and {} have different shapes",
                    render(first),
                    render(family)
                )));
            }
        }
    }
    let families: Vec<Vec<&Member>> = families
        .into_iter()
        .map(|f| f.into_iter().map(|(_, m)| m).collect())
        .collect();
    merge_corresponding(&families)
}

type Shape = BTreeSet<(Name, bool)>;

fn shape(member: &Member) -> Shape {
    member
        .iter()
        .map(|pair| {
            (
                pair.base.relation.clone(),
                pair.is_diagonal() == pair.base.positive,
            )
        })
        .collect()
}

fn render(family: &[(Shape, &Member)]) -> String {
    let members: Vec<String> = family
        .iter()
        .map(|(_, m)| {
            let pairs: Vec<String> = m.iter().map(ToString::to_string).collect();
            format!("{{{}}}", pairs.join(", "))
        })
        .collect();
    format!("{{{}}}", members.join(", "))
}

/// Member-wise union under an explicit correspondence: member `i` of the
/// result is the union of member `i` of every family.
pub fn merge_corresponding(families: &[Vec<&Member>]) -> Result<Meaning, Error> {
    let first = families
        .first()
        .ok_or_else(|| Error::StructureMismatch("nothing to merge".into()))?;
    if let Some(bad) = families.iter().find(|f| f.len() != first.len()) {
        return Err(Error::StructureMismatch(format!(
            "{} members against {}",
            bad.len(),
            first.len()
        )));
    }
    let merged = (0..first.len()).map(|i| {
        families
            .iter()
            .flat_map(|family| family[i].iter().cloned())
            .collect::<Member>()
    });
    Meaning::new(merged)
}

/// Merge used by the universal quantifier: the instance meanings are laid
/// out on the product of their member indices, so corresponding members are
/// one choice of member per instance, and then merged member-wise.
/// With single-member instances this is exactly [`dotted_union`].
pub fn merge_instances(meanings: &[Meaning]) -> Result<Meaning, Error> {
    let (first, rest) = meanings
        .split_first()
        .ok_or_else(|| Error::StructureMismatch("nothing to merge".into()))?;
    let mut acc = first.clone();
    for next in rest {
        let left: Vec<&Member> = acc
            .members()
            .iter()
            .flat_map(|a| std::iter::repeat_n(a, next.len()))
            .collect();
        let right: Vec<&Member> = acc
            .members()
            .iter()
            .flat_map(|_| next.members().iter())
            .collect();
        acc = merge_corresponding(&[left, right])?;
    }
    Ok(acc)
}

/// How a predicate applied to a free variable is read.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseMode {
    /// Merge the base meanings of every variant over the pool.
    #[default]
    All,
    /// Use the base meaning at one designated variable.
    Any(String),
}

impl fmt::Display for BaseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseMode::All => write!(f, "all"),
            BaseMode::Any(var) => write!(f, "any:{var}"),
        }
    }
}

impl FromStr for BaseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.split_once(':') {
            None if s == "all" => Ok(BaseMode::All),
            Some(("any", var)) if is_ind_var(var) => Ok(BaseMode::Any(var.to_string())),
            _ => Err(Error::InvalidConfig(format!(
                "base mode must be all or any:<var>, got {s:?}"
            ))),
        }
    }
}

/// Meaning of a monadic first-order formula.
///
/// Propositional variables come from `h`, `v` and `~` behave as in
/// [`crate::prop::eval_prop`]. A quantifier evaluates its body once per
/// pool variable with the bound variable standing for it; `(x)` merges the
/// instances with [`merge_instances`], `(Ex)` collects all their members.
/// A predicate whose variable is bound by an enclosing quantifier takes the
/// base meaning at the instantiated pool variable. The base mode only
/// applies to predicates whose variable is free in `f`.
pub fn eval_fo(
    f: &Formula,
    b: &FoBinding,
    h: &PropAssignment,
    policy: Policy,
    base_mode: &BaseMode,
) -> Result<Meaning, Error> {
    let evaluator = FoEvaluator {
        binding: b,
        h,
        policy,
        base_mode,
    };
    evaluator.eval(f, &mut Vec::new())
}

struct FoEvaluator<'a> {
    binding: &'a FoBinding,
    h: &'a PropAssignment,
    policy: Policy,
    base_mode: &'a BaseMode,
}

impl FoEvaluator<'_> {
    fn eval(&self, f: &Formula, env: &mut Vec<(String, String)>) -> Result<Meaning, Error> {
        match f {
            Formula::PropVar(name) => self
                .h
                .get(name)
                .cloned()
                .ok_or_else(|| Error::MissingVariable(name.clone())),
            Formula::Pred(pred, var) => {
                let template = ThetaTemplate::new(pred.clone());
                if let Some((_, instance)) = env.iter().rev().find(|(bound, _)| bound == var) {
                    return theta_base(&template, instance, self.binding);
                }
                match self.base_mode {
                    BaseMode::All => {
                        let variants = self
                            .binding
                            .pool
                            .iter()
                            .map(|z| theta_base(&template, z, self.binding))
                            .collect::<Result<Vec<_>, _>>()?;
                        dotted_union(&variants)
                    }
                    BaseMode::Any(z) => theta_base(&template, z, self.binding),
                }
            }
            Formula::Or(lhs, rhs) => Ok(self.eval(lhs, env)?.union(&self.eval(rhs, env)?)),
            Formula::Not(inner) => negate(&self.eval(inner, env)?, self.policy),
            Formula::ForAll(var, body) => merge_instances(&self.instances(var, body, env)?),
            Formula::Exists(var, body) => {
                let members = self
                    .instances(var, body, env)?
                    .into_iter()
                    .flat_map(|m| m.members().clone());
                Meaning::new(members)
            }
        }
    }

    fn instances(
        &self,
        var: &str,
        body: &Formula,
        env: &mut Vec<(String, String)>,
    ) -> Result<Vec<Meaning>, Error> {
        self.binding
            .pool
            .iter()
            .map(|z| {
                env.push((var.to_string(), z.clone()));
                let meaning = self.eval(body, env);
                env.pop();
                meaning
            })
            .collect()
    }
}

/// Outcome of a first-order validity sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoVerdict {
    LogicalTruth,
    /// The assignment's world is the counterexample world.
    Counterexample {
        assignment: PropAssignment,
    },
}

/// True in every world of `worlds` under every assignment of `mode`
/// (canonical assignments vary the world's propositional constants).
pub fn is_fo_logical_truth(
    f: &Formula,
    worlds: &[World],
    mode: AssignmentMode,
    policy: Policy,
) -> Result<FoVerdict, Error> {
    if !f.is_closed() {
        return Err(Error::NotClosed(f.to_string()));
    }
    let vars = f.prop_vars();
    for world in worlds {
        for h in enumerate_assignments(vars.iter().map(String::as_str), world, mode)? {
            let binding = FoBinding::standard(h.world().clone())?;
            if !eval_fo(f, &binding, &h, policy, &BaseMode::All)?.is_true() {
                return Ok(FoVerdict::Counterexample { assignment: h });
            }
        }
    }
    Ok(FoVerdict::LogicalTruth)
}

/// Individual names `a, b, ..., z, a1, b1, ...`.
pub fn individual_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

/// Every world with 1 to `max_individuals` individuals and every extension
/// of the given relations. Constants are all set true.
///
/// Order: by domain size, then by the bitmask over the relations' tuples
/// (relations sorted by name, tuples lexicographic, first tuple = bit 0).
pub fn enumerate_worlds(
    max_individuals: usize,
    relations: &[(&str, usize)],
    prop_constants: &[&str],
) -> Result<Vec<World>, Error> {
    let mut worlds = Vec::new();
    for n in 1..=max_individuals {
        let mut base = World::new();
        for i in 0..n {
            base.add_individual(&individual_name(i))?;
        }
        for (name, arity) in relations {
            base.add_relation(name, *arity)?;
        }
        for name in prop_constants {
            base.set_prop(name, true)?;
        }
        let tuples: Vec<(String, Vec<String>)> = base
            .relations()
            .flat_map(|(name, arity)| {
                base.tuples(arity)
                    .into_iter()
                    .map(|t| (name.to_string(), t.into_iter().map(String::from).collect()))
                    .collect::<Vec<_>>()
            })
            .collect();
        if tuples.len() >= 24 {
            return Err(Error::InvalidConfig(format!(
                "{} relation tuples is too many to enumerate",
                tuples.len()
            )));
        }
        for mask in 0u32..1 << tuples.len() {
            let mut world = base.clone();
            for (i, (name, args)) in tuples.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let args: Vec<&str> = args.iter().map(String::as_str).collect();
                    world.add_fact(name, &args)?;
                }
            }
            worlds.push(world);
        }
    }
    Ok(worlds)
}

/// Worlds for a formula: its predicates as unary relations and one
/// constant per propositional variable.
pub fn worlds_for(f: &Formula, max_individuals: usize) -> Result<Vec<World>, Error> {
    let preds = f.predicates();
    let relations: Vec<(&str, usize)> = preds.iter().map(|p| (p.as_str(), 1)).collect();
    let constants: Vec<String> = f
        .prop_vars()
        .iter()
        .map(|v| v.to_ascii_uppercase())
        .collect();
    let constants: Vec<&str> = constants.iter().map(String::as_str).collect();
    enumerate_worlds(max_individuals, &relations, &constants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{B1Pair, ElementaryComplex};
    use crate::syntax::parse;

    fn s(ind: &str, positive: bool) -> ElementaryComplex {
        ElementaryComplex::new("S", &[ind], positive)
    }

    fn world(facts: &[&str]) -> World {
        let mut w = World::new();
        w.add_individual("a").unwrap();
        w.add_individual("b").unwrap();
        w.add_relation("S", 1).unwrap();
        for ind in facts {
            w.add_fact("S", &[ind]).unwrap();
        }
        w
    }

    fn empty_h(w: &World) -> PropAssignment {
        PropAssignment::new(w.clone(), BTreeMap::new()).unwrap()
    }

    fn eval(text: &str, w: &World) -> Meaning {
        let b = FoBinding::standard(w.clone()).unwrap();
        eval_fo(
            &parse(text).unwrap(),
            &b,
            &empty_h(w),
            Policy::Minimal,
            &BaseMode::All,
        )
        .unwrap()
    }

    #[test]
    fn theta_base_examples() {
        let w = world(&["a"]);
        let mut b = FoBinding::standard(w).unwrap();
        b.bind("x", "a").unwrap();
        b.bind("y", "b").unwrap();
        let t = ThetaTemplate::new("S");
        let at_x = theta_base(&t, "x", &b).unwrap();
        assert_eq!(at_x, Meaning::singleton(B1Pair::diagonal(s("a", true))));
        assert_eq!(
            theta_base(&t, "y", &b).unwrap(),
            Meaning::singleton(B1Pair::flipped(s("b", false)))
        );
        assert!(at_x.constituents().iter().any(|i| i.as_ref() == "a"));
        assert!(matches!(
            theta_base(&t, "w", &b),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn dotted_union_examples() {
        let sa = Meaning::singleton(B1Pair::diagonal(s("a", true)));
        let sb = Meaning::singleton(B1Pair::diagonal(s("b", true)));
        let nb = Meaning::singleton(B1Pair::flipped(s("b", false)));
        assert_eq!(
            dotted_union(&[sa.clone(), sb.clone()]).unwrap(),
            Meaning::new([BTreeSet::from([
                B1Pair::diagonal(s("a", true)),
                B1Pair::diagonal(s("b", true))
            ])])
            .unwrap()
        );
        assert_eq!(
            dotted_union(&[sa.clone(), nb]).unwrap(),
            Meaning::new([BTreeSet::from([
                B1Pair::diagonal(s("a", true)),
                B1Pair::flipped(s("b", false))
            ])])
            .unwrap()
        );
        assert_eq!(dotted_union(std::slice::from_ref(&sa)).unwrap(), sa);
        let two = sa.union(&sb);
        assert!(matches!(
            dotted_union(&[sa.clone(), two]),
            Err(Error::StructureMismatch(_))
        ));
        let flipped_a = Meaning::singleton(B1Pair::flipped(s("a", true)));
        assert!(matches!(
            dotted_union(&[sa, flipped_a]),
            Err(Error::StructureMismatch(_))
        ));
        assert!(dotted_union(&[]).is_err());
    }

    #[test]
    fn universal_examples() {
        let m = eval("(x).S(x)", &world(&["a", "b"]));
        assert_eq!(m.len(), 1);
        assert_eq!(
            m.members().first().unwrap(),
            &BTreeSet::from([
                B1Pair::diagonal(s("a", true)),
                B1Pair::diagonal(s("b", true))
            ])
        );
        assert!(m.is_true());

        let m = eval("(x).S(x)", &world(&["a"]));
        assert!(m
            .members()
            .first()
            .unwrap()
            .contains(&B1Pair::flipped(s("b", false))));
        assert!(!m.is_true());
    }

    #[test]
    fn existential_example() {
        let m = eval("(Ex).S(x)", &world(&["a"]));
        let expected = Meaning::new([
            BTreeSet::from([B1Pair::diagonal(s("a", true))]),
            BTreeSet::from([B1Pair::flipped(s("b", false))]),
        ])
        .unwrap();
        assert_eq!(m, expected);
        assert!(m.is_true());
    }

    #[test]
    fn universal_over_disjunction_uses_product_merge() {
        // S = {a}, T = {b}: every individual is S or T.
        let mut w = world(&["a"]);
        w.add_relation("T", 1).unwrap();
        w.add_fact("T", &["b"]).unwrap();
        assert!(eval("(x). S(x) v T(x)", &w).is_true());
        assert!(!eval("(x).S(x) .v. (x).T(x)", &w).is_true());
    }

    #[test]
    fn free_predicates_follow_base_mode() {
        let w = world(&["a"]);
        let mut b = FoBinding::standard(w.clone()).unwrap();
        b.bind("x", "a").unwrap();
        let h = empty_h(&w);
        let f = parse("S(x)").unwrap();
        let all = eval_fo(&f, &b, &h, Policy::Minimal, &BaseMode::All).unwrap();
        assert_eq!(all, eval("(x).S(x)", &w));
        let any = eval_fo(&f, &b, &h, Policy::Minimal, &"any:x".parse().unwrap()).unwrap();
        assert_eq!(any, Meaning::singleton(B1Pair::diagonal(s("a", true))));
    }

    #[test]
    fn merge_instances_reduces_to_dotted_union_for_singletons() {
        let ms: Vec<Meaning> = ["a", "b"]
            .iter()
            .map(|i| Meaning::singleton(B1Pair::diagonal(s(i, true))))
            .collect();
        assert_eq!(merge_instances(&ms).unwrap(), dotted_union(&ms).unwrap());
    }

    #[test]
    fn binding_validation() {
        let w = world(&[]);
        let xi = BTreeMap::from([("z1".to_string(), "a".to_string())]);
        assert!(matches!(
            FoBinding::new(w.clone(), xi, vec!["z1".into()]),
            Err(Error::PoolNotSurjective)
        ));
        assert!(matches!(
            FoBinding::new(w.clone(), BTreeMap::new(), vec![]),
            Err(Error::EmptyPool)
        ));
        assert!(matches!(
            FoBinding::new(w, BTreeMap::new(), vec!["z1".into()]),
            Err(Error::UnboundVariable(_))
        ));
        assert!(matches!(
            "any".parse::<BaseMode>(),
            Err(Error::InvalidConfig(_))
        ));
        assert_eq!(
            "any:y".parse::<BaseMode>().unwrap(),
            BaseMode::Any("y".into())
        );
    }

    #[test]
    fn logical_truth_examples() {
        let check = |text: &str| {
            let f = parse(text).unwrap();
            let worlds = worlds_for(&f, 3).unwrap();
            is_fo_logical_truth(&f, &worlds, AssignmentMode::Canonical, Policy::Minimal).unwrap()
        };
        assert_eq!(check("(x).S(x) .=>. (Ex).S(x)"), FoVerdict::LogicalTruth);
        assert_eq!(check("(x). S(x) v ~S(x)"), FoVerdict::LogicalTruth);
        match check("(Ex).S(x) .=>. (x).S(x)") {
            FoVerdict::Counterexample { assignment } => {
                assert_eq!(assignment.world(), &self::world(&["a"]))
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
        assert!(matches!(
            is_fo_logical_truth(
                &parse("S(x)").unwrap(),
                &[],
                AssignmentMode::Canonical,
                Policy::Minimal
            ),
            Err(Error::NotClosed(_))
        ));
    }

    #[test]
    fn world_enumeration_order() {
        let worlds = enumerate_worlds(2, &[("S", 1)], &[]).unwrap();
        let summaries: Vec<String> = worlds.iter().map(World::summary).collect();
        assert_eq!(
            summaries,
            [
                "{a} S={}",
                "{a} S={a}",
                "{a,b} S={}",
                "{a,b} S={a}",
                "{a,b} S={b}",
                "{a,b} S={a,b}"
            ]
        );
    }
}
