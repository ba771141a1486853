//! Formulas of the propositional and monadic first-order fragment, in
//! ASCII surface syntax with dots for grouping.
//!
//! Derived connectives are desugared when formulas are built, so a
//! [`Formula`] only ever contains variables, monadic predicate
//! applications, disjunction, negation and the two quantifiers:
//!
//! * `p => q`  is `~p v q`
//! * `p . q`   is `~(~p v ~q)`
//! * `p <=> q` is `(p => q) . (q => p)`

mod lexer;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError};

pub use parser::parse;

/// A desugared formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    /// Variable for an elementary proposition (`p`, `q1`, ...).
    PropVar(String),
    /// Monadic predicate applied to an individual variable (`S(x)`).
    Pred(String, String),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::PropVar(name.into())
    }

    pub fn pred(name: impl Into<String>, arg: impl Into<String>) -> Self {
        Formula::Pred(name.into(), arg.into())
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::ForAll(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// `p => q`, stored as `~p v q`.
    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::or(Formula::not(lhs), rhs)
    }

    /// `p . q`, stored as `~(~p v ~q)`.
    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::not(Formula::or(Formula::not(lhs), Formula::not(rhs)))
    }

    /// `p <=> q`, stored as `(p => q) . (q => p)`.
    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::and(
            Formula::implies(lhs.clone(), rhs.clone()),
            Formula::implies(rhs, lhs),
        )
    }

    /// Splits `~X v Y` into `(X, Y)`.
    pub fn as_conditional(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Or(lhs, rhs) => match lhs.as_ref() {
                Formula::Not(antecedent) => Some((antecedent, rhs)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Number of connective and quantifier nodes.
    pub fn degree(&self) -> usize {
        match self {
            Formula::PropVar(_) | Formula::Pred(..) => 0,
            Formula::Not(inner) | Formula::ForAll(_, inner) | Formula::Exists(_, inner) => {
                1 + inner.degree()
            }
            Formula::Or(lhs, rhs) => 1 + lhs.degree() + rhs.degree(),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::PropVar(_) | Formula::Pred(..) => 0,
            Formula::Not(inner) => inner.quantifier_count(),
            Formula::ForAll(_, inner) | Formula::Exists(_, inner) => 1 + inner.quantifier_count(),
            Formula::Or(lhs, rhs) => lhs.quantifier_count() + rhs.quantifier_count(),
        }
    }

    /// True when the formula has no predicates and no quantifiers.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::PropVar(_) => true,
            Formula::Pred(..) | Formula::ForAll(..) | Formula::Exists(..) => false,
            Formula::Not(inner) => inner.is_propositional(),
            Formula::Or(lhs, rhs) => lhs.is_propositional() && rhs.is_propositional(),
        }
    }

    pub fn is_closed(&self) -> bool {
        free_variables(self).is_empty()
    }

    pub fn prop_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |f| {
            if let Formula::PropVar(name) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |f| {
            if let Formula::Pred(name, _) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    fn visit_atoms(&self, visit: &mut impl FnMut(&Formula)) {
        match self {
            Formula::PropVar(_) | Formula::Pred(..) => visit(self),
            Formula::Not(inner) | Formula::ForAll(_, inner) | Formula::Exists(_, inner) => {
                inner.visit_atoms(visit)
            }
            Formula::Or(lhs, rhs) => {
                lhs.visit_atoms(visit);
                rhs.visit_atoms(visit);
            }
        }
    }

    /// Constructor-style rendering of the tree, e.g. `Or(Not(p), S(x))`.
    pub fn ast(&self) -> String {
        match self {
            Formula::PropVar(name) => name.clone(),
            Formula::Pred(name, var) => format!("{name}({var})"),
            Formula::Or(lhs, rhs) => format!("Or({}, {})", lhs.ast(), rhs.ast()),
            Formula::Not(inner) => format!("Not({})", inner.ast()),
            Formula::ForAll(var, body) => format!("ForAll({var}, {})", body.ast()),
            Formula::Exists(var, body) => format!("Exists({var}, {})", body.ast()),
        }
    }
}

/// Canonical fully-parenthesized rendering; `parse(&print(f)) == f`.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        // A quantifier's dot scope runs to the end of its group, so a
        // quantified operand needs its own parentheses.
        fn operand(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
            match f {
                Formula::ForAll(..) | Formula::Exists(..) => write!(out, "({f})"),
                _ => write!(out, "{f}"),
            }
        }
        match self {
            Formula::PropVar(name) => write!(out, "{name}"),
            Formula::Pred(name, var) => write!(out, "{name}({var})"),
            Formula::Or(lhs, rhs) => {
                write!(out, "(")?;
                operand(lhs, out)?;
                write!(out, " v ")?;
                operand(rhs, out)?;
                write!(out, ")")
            }
            Formula::Not(inner) => {
                write!(out, "~")?;
                operand(inner, out)
            }
            Formula::ForAll(var, body) => write!(out, "({var}).{body}"),
            Formula::Exists(var, body) => write!(out, "(E{var}).{body}"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse(text)
    }
}

/// Free individual variables.
pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            Formula::PropVar(_) => {}
            Formula::Pred(_, var) => {
                if !bound.contains(var) {
                    out.insert(var.clone());
                }
            }
            Formula::Or(lhs, rhs) => {
                walk(lhs, bound, out);
                walk(rhs, bound, out);
            }
            Formula::Not(inner) => walk(inner, bound, out),
            Formula::ForAll(var, body) | Formula::Exists(var, body) => {
                bound.push(var.clone());
                walk(body, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

/// Whether `z` is free for `x` in `f`: no free occurrence of `x` sits
/// inside the scope of a quantifier binding `z`.
pub fn is_free_for(f: &Formula, x: &str, z: &str) -> bool {
    fn walk(f: &Formula, x: &str, z: &str, under_z: bool) -> bool {
        match f {
            Formula::PropVar(_) => true,
            Formula::Pred(_, var) => !(var == x && under_z),
            Formula::Or(lhs, rhs) => walk(lhs, x, z, under_z) && walk(rhs, x, z, under_z),
            Formula::Not(inner) => walk(inner, x, z, under_z),
            Formula::ForAll(var, body) | Formula::Exists(var, body) => {
                if var == x {
                    true
                } else {
                    walk(body, x, z, under_z || var == z)
                }
            }
        }
    }
    x == z || walk(f, x, z, false)
}

/// `f[z|x]`: replaces every free occurrence of `x` by `z`.
pub fn substitute(f: &Formula, x: &str, z: &str) -> Result<Formula, Error> {
    if !is_free_for(f, x, z) {
        return Err(Error::Capture {
            var: z.to_string(),
            replaced: x.to_string(),
            formula: f.to_string(),
        });
    }
    Ok(rename_free(f, x, z))
}

fn rename_free(f: &Formula, x: &str, z: &str) -> Formula {
    match f {
        Formula::PropVar(_) => f.clone(),
        Formula::Pred(name, var) if var == x => Formula::pred(name.clone(), z),
        Formula::Pred(..) => f.clone(),
        Formula::Or(lhs, rhs) => Formula::or(rename_free(lhs, x, z), rename_free(rhs, x, z)),
        Formula::Not(inner) => Formula::not(rename_free(inner, x, z)),
        Formula::ForAll(var, _) | Formula::Exists(var, _) if var == x => f.clone(),
        Formula::ForAll(var, body) => Formula::forall(var.clone(), rename_free(body, x, z)),
        Formula::Exists(var, body) => Formula::exists(var.clone(), rename_free(body, x, z)),
    }
}

/// Simultaneous uniform substitution of formulas for propositional variables.
/// Variables missing from `map` are left alone.
pub fn substitute_props(f: &Formula, map: &BTreeMap<String, Formula>) -> Formula {
    match f {
        Formula::PropVar(name) => map.get(name).cloned().unwrap_or_else(|| f.clone()),
        Formula::Pred(..) => f.clone(),
        Formula::Or(lhs, rhs) => {
            Formula::or(substitute_props(lhs, map), substitute_props(rhs, map))
        }
        Formula::Not(inner) => Formula::not(substitute_props(inner, map)),
        Formula::ForAll(var, body) => Formula::forall(var.clone(), substitute_props(body, map)),
        Formula::Exists(var, body) => Formula::exists(var.clone(), substitute_props(body, map)),
    }
}

/// The variants `f[z|x]` of a formula for a finite pool of variables `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantClass {
    pub base: Formula,
    pub var: String,
    pub members: BTreeMap<String, Formula>,
}

/// Builds `{(z, f[z|x]) : z in pool}`.
pub fn variants<'a>(
    f: &Formula,
    x: &str,
    pool: impl IntoIterator<Item = &'a str>,
) -> Result<VariantClass, Error> {
    if !free_variables(f).contains(x) {
        return Err(Error::NotFree {
            var: x.to_string(),
            formula: f.to_string(),
        });
    }
    let mut members = BTreeMap::new();
    for z in pool {
        members.insert(z.to_string(), substitute(f, x, z)?);
    }
    if members.is_empty() {
        return Err(Error::EmptyPool);
    }
    Ok(VariantClass {
        base: f.clone(),
        var: x.to_string(),
        members,
    })
}

pub(crate) fn is_prop_var(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('p'..='r')) && chars.all(|c| c.is_ascii_digit())
}

pub(crate) fn is_ind_var(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('x'..='z')) && chars.all(|c| c.is_ascii_digit())
}
