use crate::error::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Token {
    Prop(String),
    Pred(String, String),
    Not,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    ForAll(String),
    Exists(String),
    Dots(usize),
}

/// A token with its 1-based column.
#[derive(Clone, Debug)]
pub(super) struct Spanned {
    pub token: Token,
    pub column: usize,
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let push = |tokens: &mut Vec<Spanned>, token| tokens.push(Spanned { token, column });
        match c {
            c if c.is_whitespace() => i += 1,
            '.' => {
                let start = i;
                while i < chars.len() && chars[i] == '.' {
                    i += 1;
                }
                push(&mut tokens, Token::Dots(i - start));
            }
            '~' => {
                push(&mut tokens, Token::Not);
                i += 1;
            }
            'v' => {
                push(&mut tokens, Token::Or);
                i += 1;
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                push(&mut tokens, Token::Implies);
                i += 2;
            }
            '<' if chars.get(i + 1) == Some(&'=') && chars.get(i + 2) == Some(&'>') => {
                push(&mut tokens, Token::Iff);
                i += 3;
            }
            '(' => {
                if let Some((var, end)) = quantifier_var(&chars, i + 1) {
                    push(&mut tokens, Token::ForAll(var));
                    i = end;
                } else if chars.get(i + 1) == Some(&'E') {
                    if let Some((var, end)) = quantifier_var(&chars, i + 2) {
                        push(&mut tokens, Token::Exists(var));
                        i = end;
                    } else {
                        push(&mut tokens, Token::LParen);
                        i += 1;
                    }
                } else {
                    push(&mut tokens, Token::LParen);
                    i += 1;
                }
            }
            ')' => {
                push(&mut tokens, Token::RParen);
                i += 1;
            }
            'p'..='r' => {
                let (name, end) = word(&chars, i, |c| c.is_ascii_digit());
                push(&mut tokens, Token::Prop(name));
                i = end;
            }
            'x'..='z' => {
                let (name, _) = word(&chars, i, |c| c.is_ascii_digit());
                return Err(ParseError::new(
                    column,
                    ParseErrorKind::StrayIndividual(name),
                ));
            }
            'A'..='Z' => {
                let (name, end) = word(&chars, i, |c| c.is_ascii_alphanumeric());
                let (var, end) = predicate_argument(&chars, &name, column, end)?;
                push(&mut tokens, Token::Pred(name, var));
                i = end;
            }
            other => {
                return Err(ParseError::new(
                    column,
                    ParseErrorKind::UnknownSymbol(other),
                ));
            }
        }
    }
    Ok(tokens)
}

fn word(chars: &[char], start: usize, rest: impl Fn(char) -> bool) -> (String, usize) {
    let mut end = start + 1;
    while end < chars.len() && rest(chars[end]) {
        end += 1;
    }
    (chars[start..end].iter().collect(), end)
}

/// Matches `indvar ")"` starting at `start`.
fn quantifier_var(chars: &[char], start: usize) -> Option<(String, usize)> {
    if !matches!(chars.get(start), Some('x'..='z')) {
        return None;
    }
    let (var, end) = word(chars, start, |c| c.is_ascii_digit());
    (chars.get(end) == Some(&')')).then_some((var, end + 1))
}

/// Matches `"(" indvar ")"` after a predicate name.
fn predicate_argument(
    chars: &[char],
    name: &str,
    column: usize,
    start: usize,
) -> Result<(String, usize), ParseError> {
    let malformed =
        || ParseError::new(column, ParseErrorKind::MalformedPredicate(name.to_string()));
    if chars.get(start) != Some(&'(') {
        return Err(malformed());
    }
    let mut i = start + 1;
    while chars.get(i).is_some_and(|c| c.is_whitespace()) {
        i += 1;
    }
    if !matches!(chars.get(i), Some('x'..='z')) {
        return Err(malformed());
    }
    let (var, mut i) = word(chars, i, |c| c.is_ascii_digit());
    while chars.get(i).is_some_and(|c| c.is_whitespace()) {
        i += 1;
    }
    match chars.get(i) {
        Some(')') => Ok((var, i + 1)),
        Some(',') => Err(ParseError::new(
            column,
            ParseErrorKind::NonMonadic(name.to_string()),
        )),
        _ => Err(malformed()),
    }
}
