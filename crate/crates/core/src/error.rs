use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(char),
    #[error("unbalanced dots")]
    UnbalancedDots,
    #[error(
        "predicate {0} applied to more than one argument; only monadic predicates are allowed"
    )]
    NonMonadic(String),
    #[error("malformed predicate application {0}")]
    MalformedPredicate(String),
    #[error("individual variable {0} outside a predicate or quantifier")]
    StrayIndividual(String),
    #[error("unexpected {0}")]
    Unexpected(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("missing ')'")]
    UnclosedParen,
}

/// Syntax error with the 1-based character column where it was detected.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: {kind}")]
pub struct ParseError {
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(column: usize, kind: ParseErrorKind) -> Self {
        ParseError { column, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{var} is not free for {replaced} in {formula}")]
    Capture {
        var: String,
        replaced: String,
        formula: String,
    },
    #[error("{var} does not occur free in {formula}")]
    NotFree { var: String, formula: String },
    #[error("variable pool is empty")]
    EmptyPool,

    #[error("world line {line}: {message}")]
    WorldFormat { line: usize, message: String },
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("unknown individual {0}")]
    UnknownIndividual(String),
    #[error("relation {relation} has arity {expected}, got {got} arguments")]
    Arity {
        relation: String,
        expected: usize,
        got: usize,
    },
    #[error("the world has no elementary complexes")]
    EmptyWorld,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("formula has free individual variables: {0}")]
    NotClosed(String),
    #[error("invalid meaning: {0}")]
    InvalidMeaning(String),
    #[error("formula is not propositional: {0}")]
    NotPropositional(String),
    #[error("no meaning assigned to propositional variable {0}")]
    MissingVariable(String),
    #[error("canonical mode needs {needed} propositional constants, world has {available}")]
    InsufficientConstants { needed: usize, available: usize },
    #[error("transversal enumeration over {pairs} pairs exceeds the limit of {limit}")]
    TransversalOverflow { pairs: usize, limit: usize },

    #[error("individual variable {0} is not bound by the valuation")]
    UnboundVariable(String),
    #[error("variable pool does not cover every individual of the world")]
    PoolNotSurjective,
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("unknown axiom schema {0}")]
    UnknownSchema(String),
    #[error("substitution for {schema} leaves {missing} unassigned")]
    PartialSubstitution { schema: String, missing: String },
    #[error("not a conditional: {0}")]
    NotConditional(String),
    #[error("antecedent {expected} does not match minor premiss {got}")]
    AntecedentMismatch { expected: String, got: String },
    #[error("proof script line {line}: {message}")]
    ScriptFormat { line: usize, message: String },
}
