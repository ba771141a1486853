//! Finite worlds of elementary complexes.
//!
//! A [`World`] fixes which individuals exist and which relations hold among
//! them. Every (relation, arguments) tuple yields exactly one existing
//! elementary complex: the positive one if the fact is listed, the negative
//! one otherwise. Propositional constants are 0-ary relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::meaning::Meaning;

pub type Name = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementaryComplex {
    pub relation: Name,
    pub args: Arc<[Name]>,
    pub positive: bool,
}

impl ElementaryComplex {
    pub fn new(relation: &str, args: &[&str], positive: bool) -> Self {
        ElementaryComplex {
            relation: relation.into(),
            args: args.iter().map(|a| Name::from(*a)).collect(),
            positive,
        }
    }

    pub fn mentions(&self, individual: &str) -> bool {
        self.args.iter().any(|a| a.as_ref() == individual)
    }
}

impl fmt::Display for ElementaryComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        write!(f, "{}", if self.positive { '+' } else { '-' })
    }
}

/// Polarity flip: `T(a..)` to `~T(a..)` and back.
pub fn nu(c: &ElementaryComplex) -> ElementaryComplex {
    ElementaryComplex {
        positive: !c.positive,
        ..c.clone()
    }
}

/// Second coordinate of a B1 pair: the complex itself (`Diagonal`) or its
/// polarity flip (`Flipped`, written `<x, 0>` since the flip does not exist).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Diagonal,
    Flipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct B1Pair {
    pub base: ElementaryComplex,
    pub tag: Tag,
}

impl B1Pair {
    pub fn diagonal(base: ElementaryComplex) -> Self {
        B1Pair {
            base,
            tag: Tag::Diagonal,
        }
    }

    pub fn flipped(base: ElementaryComplex) -> Self {
        B1Pair {
            base,
            tag: Tag::Flipped,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.tag == Tag::Diagonal
    }
}

impl fmt::Display for B1Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.tag {
            Tag::Diagonal => '=',
            Tag::Flipped => '0',
        };
        write!(f, "<{},{}>", self.base, tag)
    }
}

/// Swaps diagonal and flipped; an involution.
pub fn phi(pair: &B1Pair) -> B1Pair {
    let tag = match pair.tag {
        Tag::Diagonal => Tag::Flipped,
        Tag::Flipped => Tag::Diagonal,
    };
    B1Pair {
        base: pair.base.clone(),
        tag,
    }
}

/// A finite world. Individuals, relation names and constant names are kept
/// sorted so every derived enumeration is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct World {
    individuals: BTreeSet<String>,
    relations: BTreeMap<String, usize>,
    facts: BTreeSet<(String, Vec<String>)>,
    prop_constants: BTreeMap<String, bool>,
}

impl World {
    pub fn new() -> Self {
        World::default()
    }

    /// A world with no individuals and one constant per propositional
    /// variable (`p` gets `P`, `q2` gets `Q2`), all true.
    pub fn for_prop_vars<'a>(vars: impl IntoIterator<Item = &'a str>) -> Self {
        let mut world = World::new();
        for var in vars {
            world
                .set_prop(&var.to_ascii_uppercase(), true)
                .expect("upper-cased variable is a valid constant name");
        }
        world
    }

    pub fn add_individual(&mut self, name: &str) -> Result<(), Error> {
        check_identifier(name, |c| c.is_ascii_lowercase())?;
        self.individuals.insert(name.to_string());
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), Error> {
        check_identifier(name, |c| c.is_ascii_uppercase())?;
        if arity == 0 {
            return Err(Error::InvalidConfig(format!(
                "relation {name} must have positive arity; use a propositional constant"
            )));
        }
        if self.prop_constants.contains_key(name) {
            return Err(Error::InvalidConfig(format!(
                "{name} is already a constant"
            )));
        }
        match self.relations.insert(name.to_string(), arity) {
            Some(old) if old != arity => Err(Error::Arity {
                relation: name.to_string(),
                expected: old,
                got: arity,
            }),
            _ => Ok(()),
        }
    }

    pub fn add_fact(&mut self, relation: &str, args: &[&str]) -> Result<(), Error> {
        self.check_tuple(relation, args)?;
        self.facts.insert((
            relation.to_string(),
            args.iter().map(|a| a.to_string()).collect(),
        ));
        Ok(())
    }

    pub fn set_prop(&mut self, name: &str, value: bool) -> Result<(), Error> {
        check_identifier(name, |c| c.is_ascii_uppercase())?;
        if self.relations.contains_key(name) {
            return Err(Error::InvalidConfig(format!(
                "{name} is already a relation"
            )));
        }
        self.prop_constants.insert(name.to_string(), value);
        Ok(())
    }

    pub fn individuals(&self) -> impl Iterator<Item = &str> {
        self.individuals.iter().map(String::as_str)
    }

    pub fn individual_count(&self) -> usize {
        self.individuals.len()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn prop_constants(&self) -> impl Iterator<Item = (&str, bool)> {
        self.prop_constants.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn has_individual(&self, name: &str) -> bool {
        self.individuals.contains(name)
    }

    fn check_tuple(&self, relation: &str, args: &[&str]) -> Result<(), Error> {
        let arity = match self.relations.get(relation) {
            Some(arity) => *arity,
            None if self.prop_constants.contains_key(relation) => 0,
            None => return Err(Error::UnknownRelation(relation.to_string())),
        };
        if arity != args.len() {
            return Err(Error::Arity {
                relation: relation.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        match args.iter().find(|a| !self.individuals.contains(**a)) {
            Some(missing) => Err(Error::UnknownIndividual(missing.to_string())),
            None => Ok(()),
        }
    }

    /// Whether the positive complex of `relation(args)` exists.
    pub fn holds(&self, relation: &str, args: &[&str]) -> Result<bool, Error> {
        self.check_tuple(relation, args)?;
        if args.is_empty() {
            if let Some(value) = self.prop_constants.get(relation) {
                return Ok(*value);
            }
        }
        Ok(self.facts.iter().any(|(r, a)| {
            r == relation && a.len() == args.len() && a.iter().zip(args).all(|(x, y)| x == y)
        }))
    }

    /// The existing complex for `relation(args)`.
    pub fn complex(&self, relation: &str, args: &[&str]) -> Result<ElementaryComplex, Error> {
        let positive = self.holds(relation, args)?;
        Ok(ElementaryComplex::new(relation, args, positive))
    }

    pub fn contains_complex(&self, c: &ElementaryComplex) -> bool {
        let args: Vec<&str> = c.args.iter().map(|a| a.as_ref()).collect();
        self.holds(&c.relation, &args)
            .is_ok_and(|positive| positive == c.positive)
    }

    /// Argument tuples of a relation, in lexicographic order.
    pub fn tuples(&self, arity: usize) -> Vec<Vec<&str>> {
        let mut tuples: Vec<Vec<&str>> = vec![Vec::new()];
        for _ in 0..arity {
            tuples = tuples
                .into_iter()
                .flat_map(|prefix| {
                    self.individuals().map(move |ind| {
                        let mut next = prefix.clone();
                        next.push(ind);
                        next
                    })
                })
                .collect();
        }
        tuples
    }

    /// Renders the world in its file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ind in &self.individuals {
            out.push_str(&format!("individual {ind}\n"));
        }
        for (name, arity) in &self.relations {
            out.push_str(&format!("relation {name}/{arity}\n"));
        }
        for (name, args) in &self.facts {
            out.push_str(&format!("fact {name}({})\n", args.join(",")));
        }
        for (name, value) in &self.prop_constants {
            out.push_str(&format!("prop {name} {value}\n"));
        }
        out
    }

    /// One-line summary, e.g. `{a,b} S={a} P=true`.
    pub fn summary(&self) -> String {
        let mut parts = vec![format!(
            "{{{}}}",
            self.individuals
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(",")
        )];
        for (name, arity) in &self.relations {
            let ext: Vec<String> = self
                .facts
                .iter()
                .filter(|(r, _)| r == name)
                .map(|(_, args)| {
                    if *arity == 1 {
                        args[0].clone()
                    } else {
                        format!("({})", args.join(","))
                    }
                })
                .collect();
            parts.push(format!("{name}={{{}}}", ext.join(",")));
        }
        for (name, value) in &self.prop_constants {
            parts.push(format!("{name}={value}"));
        }
        parts.join(" ")
    }
}

fn check_identifier(name: &str, first: impl Fn(char) -> bool) -> Result<(), Error> {
    let mut chars = name.chars();
    let ok =
        chars.next().is_some_and(first) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("invalid name {name:?}")))
    }
}

impl FromStr for World {
    type Err = Error;

    /// Line-oriented format:
    ///
    /// ```text
    /// individual a
    /// relation R/2
    /// fact R(a,b)
    /// prop P true
    /// ```
    ///
    /// Blank lines and `#` comments are skipped; anything else is an error.
    fn from_str(text: &str) -> Result<Self, Error> {
        let mut world = World::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::WorldFormat {
                line: line_no,
                message,
            };
            let (directive, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let located = |e: Error| match e {
                Error::WorldFormat { .. } => e,
                other => bad(other.to_string()),
            };
            match directive {
                "individual" => world.add_individual(rest).map_err(located)?,
                "relation" => {
                    let (name, arity) = rest
                        .split_once('/')
                        .ok_or_else(|| bad(format!("expected <name>/<arity>, got {rest:?}")))?;
                    let arity = arity
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("bad arity {arity:?}")))?;
                    world.add_relation(name.trim(), arity).map_err(located)?;
                }
                "fact" => {
                    let (name, args) = rest
                        .strip_suffix(')')
                        .and_then(|r| r.split_once('('))
                        .ok_or_else(|| bad(format!("expected <name>(<args>), got {rest:?}")))?;
                    let args: Vec<&str> = args.split(',').map(str::trim).collect();
                    world.add_fact(name.trim(), &args).map_err(located)?;
                }
                "prop" => {
                    let (name, value) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| bad(format!("expected <name> true|false, got {rest:?}")))?;
                    let value = match value.trim() {
                        "true" => true,
                        "false" => false,
                        other => return Err(bad(format!("expected true or false, got {other:?}"))),
                    };
                    world.set_prop(name, value).map_err(located)?;
                }
                other => return Err(bad(format!("unknown directive {other:?}"))),
            }
        }
        Ok(world)
    }
}

/// Every existing elementary complex of the world: per relation and
/// argument tuple the positive or negative complex, plus one complex per
/// propositional constant.
pub fn b0(w: &World) -> BTreeSet<ElementaryComplex> {
    let mut out = BTreeSet::new();
    for (name, arity) in w.relations() {
        for args in w.tuples(arity) {
            out.insert(w.complex(name, &args).expect("tuple drawn from the world"));
        }
    }
    for (name, value) in w.prop_constants() {
        out.insert(ElementaryComplex::new(name, &[], value));
    }
    out
}

/// `{{<c,c>}}` when the fact holds (c positive), otherwise `{{<c',0>}}`
/// with `c'` the existing negative complex.
pub fn canonical_atom_meaning(w: &World, relation: &str, args: &[&str]) -> Result<Meaning, Error> {
    let c = w.complex(relation, args)?;
    let pair = if c.positive {
        B1Pair::diagonal(c)
    } else {
        B1Pair::flipped(c)
    };
    Ok(Meaning::singleton(pair))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world(text: &str) -> World {
        text.parse().unwrap()
    }

    fn c(rel: &str, args: &[&str], positive: bool) -> ElementaryComplex {
        ElementaryComplex::new(rel, args, positive)
    }

    #[test]
    fn b0_examples() {
        let w = world("individual a\nrelation S/1\nfact S(a)");
        assert_eq!(b0(&w), BTreeSet::from([c("S", &["a"], true)]));

        let w = world("individual a\nindividual b\nrelation S/1\nfact S(a)");
        assert_eq!(
            b0(&w),
            BTreeSet::from([c("S", &["a"], true), c("S", &["b"], false)])
        );

        let w = world("individual a\nindividual b\nrelation R/2\nfact R(a,b)");
        assert_eq!(
            b0(&w),
            BTreeSet::from([
                c("R", &["a", "b"], true),
                c("R", &["a", "a"], false),
                c("R", &["b", "a"], false),
                c("R", &["b", "b"], false),
            ])
        );
    }

    #[test]
    fn b0_size_counts_tuples_and_constants() {
        let w = world(
            "individual a\nindividual b\nindividual c\nrelation S/1\nrelation R/2\nprop P true\nprop Q false",
        );
        assert_eq!(b0(&w).len(), 3 + 9 + 2);
    }

    #[test]
    fn exactly_one_polarity_exists() {
        let w = world(
            "individual a\nindividual b\nrelation R/2\nfact R(a,b)\nfact R(b,b)\nprop P false",
        );
        let existing = b0(&w);
        for args in w.tuples(2) {
            let pos = c("R", &args, true);
            assert!(existing.contains(&pos) ^ existing.contains(&nu(&pos)));
        }
        assert!(existing.contains(&c("P", &[], false)));
        assert!(!existing.contains(&c("P", &[], true)));
    }

    #[test]
    fn nu_and_phi_are_involutions() {
        let pos = c("S", &["a"], true);
        assert_eq!(nu(&pos), c("S", &["a"], false));
        assert_eq!(nu(&nu(&pos)), pos);
        assert_eq!(nu(&c("R", &["a", "b"], true)), c("R", &["a", "b"], false));

        let d = B1Pair::diagonal(pos.clone());
        assert_eq!(phi(&d), B1Pair::flipped(pos.clone()));
        assert_eq!(phi(&B1Pair::flipped(pos)), d);
        assert_eq!(phi(&phi(&d)), d);
    }

    #[test]
    fn canonical_atoms() {
        let w = world("individual a\nindividual b\nrelation S/1\nfact S(a)\nprop P false");
        assert_eq!(
            canonical_atom_meaning(&w, "S", &["a"]).unwrap(),
            Meaning::singleton(B1Pair::diagonal(c("S", &["a"], true)))
        );
        assert_eq!(
            canonical_atom_meaning(&w, "S", &["b"]).unwrap(),
            Meaning::singleton(B1Pair::flipped(c("S", &["b"], false)))
        );
        assert_eq!(
            canonical_atom_meaning(&w, "P", &[]).unwrap(),
            Meaning::singleton(B1Pair::flipped(c("P", &[], false)))
        );
        assert!(matches!(
            canonical_atom_meaning(&w, "T", &["a"]),
            Err(Error::UnknownRelation(_))
        ));
        assert!(matches!(
            canonical_atom_meaning(&w, "S", &["c"]),
            Err(Error::UnknownIndividual(_))
        ));
        assert!(matches!(
            canonical_atom_meaning(&w, "S", &[]),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn world_file_round_trip_and_errors() {
        let text = "individual a\nindividual b\nrelation R/2\nfact R(a,b)\nprop P true\n";
        let w = world(text);
        assert_eq!(w.to_text(), text);
        assert_eq!(world(&w.to_text()), w);
        assert_eq!(w.summary(), "{a,b} R={(a,b)} P=true");

        let err = "individual a\nfrobnicate a".parse::<World>().unwrap_err();
        assert!(matches!(err, Error::WorldFormat { line: 2, .. }));
        let err = "individual a\nfact S(a)".parse::<World>().unwrap_err();
        assert!(matches!(err, Error::WorldFormat { line: 2, .. }));
        assert!("prop P maybe".parse::<World>().is_err());
        assert!("relation S/x".parse::<World>().is_err());
        assert!("# only a comment\n\n".parse::<World>().unwrap() == World::new());
    }
}
