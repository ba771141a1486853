//! Meanings: finite sets of non-empty finite sets of B1 pairs.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ontology::{phi, B1Pair, Name, World};

/// One member of a meaning: a non-empty set of B1 pairs.
pub type Member = BTreeSet<B1Pair>;

/// A non-empty set of members. Members and pairs are kept in their
/// canonical (sorted) order, so equality and rendering are deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Meaning {
    members: BTreeSet<Member>,
}

impl Meaning {
    pub fn new(members: impl IntoIterator<Item = Member>) -> Result<Self, Error> {
        let members: BTreeSet<Member> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::InvalidMeaning("no members".into()));
        }
        if members.iter().any(BTreeSet::is_empty) {
            return Err(Error::InvalidMeaning("empty member".into()));
        }
        Ok(Meaning { members })
    }

    pub fn singleton(pair: B1Pair) -> Self {
        Meaning {
            members: BTreeSet::from([BTreeSet::from([pair])]),
        }
    }

    pub fn members(&self) -> &BTreeSet<Member> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True iff some member consists of diagonal pairs only.
    pub fn is_true(&self) -> bool {
        self.members
            .iter()
            .any(|member| member.iter().all(B1Pair::is_diagonal))
    }

    /// Set union of the members of both meanings.
    pub fn union(&self, other: &Meaning) -> Meaning {
        Meaning {
            members: self.members.union(&other.members).cloned().collect(),
        }
    }

    /// Every pair occurring in any member.
    pub fn pairs(&self) -> BTreeSet<&B1Pair> {
        self.members.iter().flatten().collect()
    }

    /// Individuals that are constituents of some complex in the union of
    /// the members.
    pub fn constituents(&self) -> BTreeSet<Name> {
        self.members
            .iter()
            .flatten()
            .flat_map(|pair| pair.base.args.iter().cloned())
            .collect()
    }

    /// Checks that every base complex exists in `w`.
    pub fn check_grounded(&self, w: &World) -> Result<(), Error> {
        match self
            .pairs()
            .into_iter()
            .find(|pair| !w.contains_complex(&pair.base))
        {
            Some(pair) => Err(Error::InvalidMeaning(format!(
                "complex {} does not exist in the world",
                pair.base
            ))),
            None => Ok(()),
        }
    }
}

/// `is_true` as a free function.
pub fn is_true(m: &Meaning) -> bool {
    m.is_true()
}

/// Renders as `{{<S(a)+,=>, <S(b)-,0>}, {<P+,=>}}`: members in canonical
/// order, pairs as `<complex,=>` (diagonal) or `<complex,0>` (flipped).
impl fmt::Display for Meaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, member) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (j, pair) in member.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{pair}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Which transversals of a family to keep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Inclusion-minimal transversals only.
    #[default]
    Minimal,
    /// Every subset of the family's union that meets each member.
    Full,
}

impl Policy {
    pub const ALL: [Policy; 2] = [Policy::Minimal, Policy::Full];
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Minimal => "minimal",
            Policy::Full => "full",
        })
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "minimal" => Ok(Policy::Minimal),
            "full" => Ok(Policy::Full),
            other => Err(Error::InvalidConfig(format!("unknown policy {other:?}"))),
        }
    }
}

const MINIMAL_LIMIT: usize = 128;
const FULL_LIMIT: usize = 24;

/// Hitting sets of `family`, drawn from subsets of its union.
pub fn transversals(family: &BTreeSet<Member>, policy: Policy) -> Result<BTreeSet<Member>, Error> {
    let universe: Vec<&B1Pair> = family
        .iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let limit = match policy {
        Policy::Minimal => MINIMAL_LIMIT,
        Policy::Full => FULL_LIMIT,
    };
    if universe.len() > limit {
        return Err(Error::TransversalOverflow {
            pairs: universe.len(),
            limit,
        });
    }
    let index = |pair: &B1Pair| {
        universe
            .binary_search(&pair)
            .expect("pair drawn from the union")
    };
    let masks: Vec<u128> = family
        .iter()
        .map(|member| member.iter().fold(0u128, |m, pair| m | 1 << index(pair)))
        .collect();

    let minimal = minimal_transversals(&masks);
    let chosen: Vec<u128> = match policy {
        Policy::Minimal => minimal,
        Policy::Full => {
            let all = if universe.len() == 128 {
                u128::MAX
            } else {
                (1u128 << universe.len()) - 1
            };
            let mut out = HashSet::new();
            for t in minimal {
                let free = all & !t;
                let mut sub = free;
                loop {
                    out.insert(t | sub);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
            }
            out.into_iter().collect()
        }
    };
    Ok(chosen
        .into_iter()
        .map(|mask| {
            (0..universe.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| universe[i].clone())
                .collect()
        })
        .collect())
}

/// Berge's incremental algorithm over bitmasks.
fn minimal_transversals(family: &[u128]) -> Vec<u128> {
    let edges = keep_minimal(family.to_vec());
    let mut current = vec![0u128];
    for &edge in &edges {
        let mut next = Vec::with_capacity(current.len());
        for &t in &current {
            if t & edge != 0 {
                next.push(t);
            } else {
                let mut rest = edge;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    next.push(t | bit);
                    rest &= rest - 1;
                }
            }
        }
        current = keep_minimal(next);
    }
    current
}

/// Drops duplicates and every set that strictly contains another.
fn keep_minimal(mut sets: Vec<u128>) -> Vec<u128> {
    sets.sort_unstable_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let mut kept: Vec<u128> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| k & s == *k) {
            kept.push(s);
        }
    }
    kept
}

/// Replaces every pair `u` by `phi(u)` in every set.
pub fn upsilon(sets: &BTreeSet<Member>) -> BTreeSet<Member> {
    sets.iter()
        .map(|member| member.iter().map(phi).collect())
        .collect()
}

/// Meaning of `~q` given the meaning of `q`.
///
/// With two or more members: upsilon of the transversals. With a single
/// member `A`: `{{phi(z)} : z in A}`.
pub fn negate(m: &Meaning, policy: Policy) -> Result<Meaning, Error> {
    if m.len() >= 2 {
        Meaning::new(upsilon(&transversals(m.members(), policy)?))
    } else {
        let only = m.members().first().expect("meanings are non-empty");
        Meaning::new(only.iter().map(|z| BTreeSet::from([phi(z)])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::ElementaryComplex;

    fn d(rel: &str, pos: bool) -> B1Pair {
        B1Pair::diagonal(ElementaryComplex::new(rel, &[], pos))
    }
    fn fl(rel: &str, pos: bool) -> B1Pair {
        B1Pair::flipped(ElementaryComplex::new(rel, &[], pos))
    }
    fn set<const N: usize>(pairs: [B1Pair; N]) -> Member {
        BTreeSet::from(pairs)
    }

    /// Every subset of the union that meets each member, by brute force.
    fn brute_force(family: &BTreeSet<Member>, minimal_only: bool) -> BTreeSet<Member> {
        let universe: Vec<B1Pair> = family
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut hitting: Vec<Member> = Vec::new();
        for mask in 0u32..(1 << universe.len()) {
            let s: Member = (0..universe.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| universe[i].clone())
                .collect();
            if family.iter().all(|a| !a.is_disjoint(&s)) {
                hitting.push(s);
            }
        }
        hitting
            .iter()
            .filter(|s| !minimal_only || !hitting.iter().any(|t| t != *s && t.is_subset(s)))
            .cloned()
            .collect()
    }

    #[test]
    fn transversal_examples() {
        let (a, b) = (d("A", true), fl("B", false));
        let single = BTreeSet::from([set([a.clone()])]);
        for policy in Policy::ALL {
            assert_eq!(transversals(&single, policy).unwrap(), single);
        }

        let two = BTreeSet::from([set([a.clone()]), set([b.clone()])]);
        for policy in Policy::ALL {
            assert_eq!(
                transversals(&two, policy).unwrap(),
                BTreeSet::from([set([a.clone(), b.clone()])])
            );
        }

        let wide = BTreeSet::from([set([a.clone(), b.clone()])]);
        assert_eq!(
            transversals(&wide, Policy::Minimal).unwrap(),
            BTreeSet::from([set([a.clone()]), set([b.clone()])])
        );
        assert_eq!(
            transversals(&wide, Policy::Full).unwrap(),
            BTreeSet::from([set([a.clone()]), set([b.clone()]), set([a, b])])
        );
    }

    #[test]
    fn transversals_match_brute_force() {
        let pool: Vec<B1Pair> = ["A", "B", "C"]
            .iter()
            .flat_map(|r| [d(r, true), fl(r, true)])
            .collect();
        // All families of up to three members drawn from a few shapes.
        let shapes: Vec<Member> = (1u32..64)
            .filter(|m| m.count_ones() <= 3)
            .map(|m| {
                (0..6)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| pool[i].clone())
                    .collect()
            })
            .collect();
        for (i, x) in shapes.iter().enumerate().step_by(3) {
            for y in shapes.iter().skip(i).step_by(5) {
                for z in shapes.iter().step_by(11) {
                    let family = BTreeSet::from([x.clone(), y.clone(), z.clone()]);
                    assert_eq!(
                        transversals(&family, Policy::Minimal).unwrap(),
                        brute_force(&family, true)
                    );
                    assert_eq!(
                        transversals(&family, Policy::Full).unwrap(),
                        brute_force(&family, false)
                    );
                }
            }
        }
    }

    #[test]
    fn upsilon_is_pointwise_phi() {
        let (c, e) = (d("C", true), fl("D", false));
        assert_eq!(
            upsilon(&BTreeSet::from([set([c.clone()])])),
            BTreeSet::from([set([fl("C", true)])])
        );
        let x = BTreeSet::from([set([c.clone(), e.clone()])]);
        assert_eq!(
            upsilon(&x),
            BTreeSet::from([set([fl("C", true), d("D", false)])])
        );
        assert_eq!(upsilon(&upsilon(&x)), x);
    }

    #[test]
    fn truth_examples() {
        assert!(Meaning::singleton(d("P", true)).is_true());
        assert!(!Meaning::singleton(fl("P", true)).is_true());
        let m = Meaning::new([set([fl("P", true), d("Q", false)]), set([d("Q", false)])]).unwrap();
        assert!(m.is_true());
    }

    #[test]
    fn meanings_reject_empty_parts() {
        assert!(Meaning::new([]).is_err());
        assert!(Meaning::new([BTreeSet::new()]).is_err());
    }

    #[test]
    fn rendering_is_stable() {
        let m = Meaning::new([set([fl("Q", false), d("P", true)]), set([d("P", true)])]).unwrap();
        assert_eq!(m.to_string(), "{{<P+,=>}, {<P+,=>, <Q-,0>}}");
    }

    #[test]
    fn full_policy_overflow_is_reported() {
        let wide: Member = (0..30).map(|i| d(&format!("R{i}"), true)).collect();
        let family = BTreeSet::from([wide]);
        assert!(matches!(
            transversals(&family, Policy::Full),
            Err(Error::TransversalOverflow { pairs: 30, .. })
        ));
        assert_eq!(transversals(&family, Policy::Minimal).unwrap().len(), 30);
    }
}
