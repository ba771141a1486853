//! Dot-aware precedence parser.
//!
//! Every binary operator gets a scope weight; a larger weight means a wider
//! scope (looser binding):
//!
//! | form                                   | weight     | assoc |
//! |----------------------------------------|------------|-------|
//! | `v` without dots                       | 1          | left  |
//! | `=>` without dots                      | 2          | right |
//! | `<=>` without dots                     | 3          | left  |
//! | `n` dots standing alone (conjunction)  | 8n - 4     | left  |
//! | connective with `n` dots on each side  | 8n         | as above |
//!
//! A connective's dots must appear on both sides in equal number. A dot
//! group directly after a quantifier or `~` gives that prefix the scope
//! `8n - 4`: its operand runs right over every operator whose weight does
//! not exceed that. Without dots, prefixes apply to the next unary operand.

use super::lexer::{tokenize, Spanned, Token};
use super::Formula;
use crate::error::{ParseError, ParseErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Or,
    Implies,
    Iff,
    And,
}

impl BinOp {
    fn right_assoc(self) -> bool {
        self == BinOp::Implies
    }

    fn undotted_weight(self) -> u32 {
        match self {
            BinOp::Or => 1,
            BinOp::Implies => 2,
            BinOp::Iff => 3,
            BinOp::And => unreachable!("conjunction is always written with dots"),
        }
    }

    fn build(self, lhs: Formula, rhs: Formula) -> Formula {
        match self {
            BinOp::Or => Formula::or(lhs, rhs),
            BinOp::Implies => Formula::implies(lhs, rhs),
            BinOp::Iff => Formula::iff(lhs, rhs),
            BinOp::And => Formula::and(lhs, rhs),
        }
    }
}

fn conjunction_weight(dots: usize) -> u32 {
    8 * dots as u32 - 4
}

fn connective_weight(dots: usize) -> u32 {
    8 * dots as u32
}

#[derive(Clone, Debug)]
enum Item {
    Atom(Formula),
    Not(Option<u32>),
    ForAll(String, Option<u32>),
    Exists(String, Option<u32>),
    LParen,
    RParen,
    Bin(BinOp, u32),
}

#[derive(Clone, Debug)]
struct Annotated {
    item: Item,
    column: usize,
}

/// Parses ASCII PM notation into a desugared [`Formula`].
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let items = annotate(&tokens)?;
    let end_column = text.chars().count() + 1;
    let mut parser = Parser {
        items: &items,
        pos: 0,
        end_column,
    };
    let formula = parser.expression(u32::MAX)?;
    match parser.items.get(parser.pos) {
        None => Ok(formula),
        Some(extra) => Err(ParseError::new(
            extra.column,
            ParseErrorKind::Unexpected(describe(&extra.item)),
        )),
    }
}

fn describe(item: &Item) -> String {
    match item {
        Item::Atom(f) => f.to_string(),
        Item::Not(_) => "'~'".into(),
        Item::ForAll(var, _) => format!("quantifier ({var})"),
        Item::Exists(var, _) => format!("quantifier (E{var})"),
        Item::LParen => "'('".into(),
        Item::RParen => "')'".into(),
        Item::Bin(op, _) => format!("{op:?}"),
    }
}

fn binary(token: &Token) -> Option<BinOp> {
    match token {
        Token::Or => Some(BinOp::Or),
        Token::Implies => Some(BinOp::Implies),
        Token::Iff => Some(BinOp::Iff),
        _ => None,
    }
}

fn ends_operand(token: &Token) -> bool {
    matches!(token, Token::Prop(_) | Token::Pred(..) | Token::RParen)
}

fn starts_operand(token: &Token) -> bool {
    matches!(
        token,
        Token::Prop(_)
            | Token::Pred(..)
            | Token::LParen
            | Token::Not
            | Token::ForAll(_)
            | Token::Exists(_)
    )
}

/// Resolves each dot group into a connective weight, a prefix scope or a
/// conjunction.
fn annotate(tokens: &[Spanned]) -> Result<Vec<Annotated>, ParseError> {
    let dots_at = |i: Option<usize>| match i.and_then(|i| tokens.get(i)) {
        Some(Spanned {
            token: Token::Dots(n),
            ..
        }) => Some(*n),
        _ => None,
    };
    let unbalanced = |column| ParseError::new(column, ParseErrorKind::UnbalancedDots);

    let mut out: Vec<Annotated> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let Spanned { token, column } = &tokens[i];
        let column = *column;
        let item = match token {
            Token::Dots(n) => {
                let next = tokens.get(i + 1).map(|s| &s.token);
                if next.is_some_and(|t| binary(t).is_some()) {
                    // Left-hand dots; the connective picks them up.
                    i += 1;
                    continue;
                }
                match out.last_mut() {
                    Some(Annotated {
                        item: Item::Not(scope) | Item::ForAll(_, scope) | Item::Exists(_, scope),
                        ..
                    }) if scope.is_none() => {
                        *scope = Some(conjunction_weight(*n));
                        i += 1;
                        continue;
                    }
                    _ => {}
                }
                let prev = i.checked_sub(1).map(|j| &tokens[j].token);
                if prev.is_some_and(ends_operand) && next.is_some_and(starts_operand) {
                    Item::Bin(BinOp::And, conjunction_weight(*n))
                } else {
                    return Err(unbalanced(column));
                }
            }
            Token::Or | Token::Implies | Token::Iff => {
                let op = binary(token).expect("binary token");
                let left = dots_at(i.checked_sub(1));
                let right = dots_at(Some(i + 1));
                match (left, right) {
                    (None, None) => Item::Bin(op, op.undotted_weight()),
                    (Some(l), Some(r)) if l == r => {
                        i += 1;
                        Item::Bin(op, connective_weight(l))
                    }
                    _ => return Err(unbalanced(column)),
                }
            }
            Token::Prop(name) => Item::Atom(Formula::var(name.clone())),
            Token::Pred(name, var) => Item::Atom(Formula::pred(name.clone(), var.clone())),
            Token::Not => Item::Not(None),
            Token::ForAll(var) => Item::ForAll(var.clone(), None),
            Token::Exists(var) => Item::Exists(var.clone(), None),
            Token::LParen => Item::LParen,
            Token::RParen => Item::RParen,
        };
        out.push(Annotated { item, column });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    items: &'a [Annotated],
    pos: usize,
    end_column: usize,
}

impl Parser<'_> {
    /// Parses an expression whose top-level operators all have weight <= `limit`.
    fn expression(&mut self, limit: u32) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Annotated {
            item: Item::Bin(op, weight),
            ..
        }) = self.items.get(self.pos)
        {
            let (op, weight) = (*op, *weight);
            if weight > limit {
                break;
            }
            self.pos += 1;
            let rhs = if op.right_assoc() {
                self.expression(weight)?
            } else {
                self.expression(weight - 1)?
            };
            lhs = op.build(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(Annotated { item, column }) = self.items.get(self.pos) else {
            return Err(ParseError::new(
                self.end_column,
                ParseErrorKind::UnexpectedEnd,
            ));
        };
        self.pos += 1;
        match item {
            Item::Atom(f) => Ok(f.clone()),
            Item::Not(scope) => Ok(Formula::not(self.scoped(*scope)?)),
            Item::ForAll(var, scope) => Ok(Formula::forall(var.clone(), self.scoped(*scope)?)),
            Item::Exists(var, scope) => Ok(Formula::exists(var.clone(), self.scoped(*scope)?)),
            Item::LParen => {
                let inner = self.expression(u32::MAX)?;
                match self.items.get(self.pos) {
                    Some(Annotated {
                        item: Item::RParen, ..
                    }) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(other) => Err(ParseError::new(
                        other.column,
                        ParseErrorKind::Unexpected(describe(&other.item)),
                    )),
                    None => Err(ParseError::new(
                        self.end_column,
                        ParseErrorKind::UnclosedParen,
                    )),
                }
            }
            Item::RParen | Item::Bin(..) => Err(ParseError::new(
                *column,
                ParseErrorKind::Unexpected(describe(item)),
            )),
        }
    }

    fn scoped(&mut self, scope: Option<u32>) -> Result<Formula, ParseError> {
        match scope {
            Some(limit) => self.expression(limit),
            None => self.unary(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::var("p")
    }
    fn q() -> Formula {
        Formula::var("q")
    }
    fn r() -> Formula {
        Formula::var("r")
    }
    fn s(v: &str) -> Formula {
        Formula::pred("S", v)
    }

    #[test]
    fn plain_disjunction() {
        assert_eq!(parse("p v q").unwrap(), Formula::or(p(), q()));
    }

    #[test]
    fn dotted_conditional() {
        // p v q .=>. q v p  ==  ~(p v q) v (q v p)
        let expected = Formula::or(Formula::not(Formula::or(p(), q())), Formula::or(q(), p()));
        assert_eq!(parse("p v q .=>. q v p").unwrap(), expected);
    }

    #[test]
    fn quantifier_dot_scope() {
        assert_eq!(
            parse("(x). S(x) v p").unwrap(),
            Formula::forall("x", Formula::or(s("x"), p()))
        );
        // Stronger connective dots end the quantifier's scope.
        assert_eq!(
            parse("(x).S(x) .=>. (Ex).S(x)").unwrap(),
            Formula::implies(Formula::forall("x", s("x")), Formula::exists("x", s("x")))
        );
        // Undotted quantifiers apply to the next operand only.
        assert_eq!(
            parse("(x)S(x) v p").unwrap(),
            Formula::or(Formula::forall("x", s("x")), p())
        );
        // A same-strength conjunction stays inside the scope.
        assert_eq!(
            parse("(x).S(x).T(x)").unwrap(),
            Formula::forall("x", Formula::and(s("x"), Formula::pred("T", "x")))
        );
    }

    #[test]
    fn standalone_dot_is_conjunction() {
        assert_eq!(
            parse("p . ~p").unwrap(),
            Formula::and(p(), Formula::not(p()))
        );
        assert_eq!(
            parse("p v q . r").unwrap(),
            Formula::and(Formula::or(p(), q()), r())
        );
        // A conjunction dot is weaker than a same-count connective dot.
        assert_eq!(
            parse("p . q .=>. r").unwrap(),
            Formula::implies(Formula::and(p(), q()), r())
        );
        assert_eq!(
            parse("p .=>. q . r").unwrap(),
            Formula::implies(p(), Formula::and(q(), r()))
        );
    }

    #[test]
    fn more_dots_wider_scope() {
        // p .=>. q :=>: r  with two-dot groups written as ".."
        assert_eq!(
            parse("p .=>. q ..=>.. r").unwrap(),
            Formula::implies(Formula::implies(p(), q()), r())
        );
        assert_eq!(
            parse("p ..v.. q .v. r").unwrap(),
            Formula::or(p(), Formula::or(q(), r()))
        );
    }

    #[test]
    fn undotted_precedence_and_associativity() {
        assert_eq!(
            parse("p => q v r").unwrap(),
            Formula::implies(p(), Formula::or(q(), r()))
        );
        assert_eq!(
            parse("p => q => r").unwrap(),
            Formula::implies(p(), Formula::implies(q(), r()))
        );
        assert_eq!(
            parse("p v q v r").unwrap(),
            Formula::or(Formula::or(p(), q()), r())
        );
        assert_eq!(parse("p <=> q").unwrap(), Formula::iff(p(), q()));
        assert_eq!(
            parse("~p v q").unwrap(),
            Formula::or(Formula::not(p()), q())
        );
        assert_eq!(
            parse("~.p v q").unwrap(),
            Formula::not(Formula::or(p(), q()))
        );
    }

    #[test]
    fn parentheses_always_accepted() {
        assert_eq!(parse("((p v q))").unwrap(), Formula::or(p(), q()));
        assert_eq!(
            parse("(((x).S(x)) v p)").unwrap(),
            Formula::or(Formula::forall("x", s("x")), p())
        );
    }

    #[test]
    fn dot_errors() {
        let kind = |t: &str| parse(t).unwrap_err().kind;
        assert_eq!(kind("p .=> q"), ParseErrorKind::UnbalancedDots);
        assert_eq!(kind("p .=>.. q"), ParseErrorKind::UnbalancedDots);
        assert_eq!(kind(". p"), ParseErrorKind::UnbalancedDots);
        assert_eq!(kind("p ."), ParseErrorKind::UnbalancedDots);
        assert_eq!(kind("(. p)"), ParseErrorKind::UnbalancedDots);
        assert_eq!(parse("p .=> q").unwrap_err().column, 4);
    }

    #[test]
    fn structural_errors() {
        let kind = |t: &str| parse(t).unwrap_err().kind;
        assert_eq!(kind("p v"), ParseErrorKind::UnexpectedEnd);
        assert_eq!(kind("(p v q"), ParseErrorKind::UnclosedParen);
        assert!(matches!(kind("p v q)"), ParseErrorKind::Unexpected(_)));
        assert!(matches!(kind("p q"), ParseErrorKind::Unexpected(_)));
        assert_eq!(kind("R(x, y)"), ParseErrorKind::NonMonadic("R".into()));
        assert_eq!(kind("p # q"), ParseErrorKind::UnknownSymbol('#'));
    }
}
