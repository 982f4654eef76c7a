use std::fmt;

/// Stable identifiers for every kind of input problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    LexInvalidChar,
    LexUnterminatedString,
    LexInvalidNumber,
    SyntaxUnexpectedToken,
    UnknownSection,
    UnknownKey,
    UnknownElement,
    UnknownValue,
    DuplicateSection,
    DuplicateKey,
    MissingSection,
    MissingKey,
    TypeMismatch,
    ArityMismatch,
    MixedUnits,
    EmptyPath,
    ConstraintNegativeLength,
    ConstraintNegativeGamma,
    ConstraintNonPositive,
    ConstraintNonFinite,
    ConstraintInvalidSweep,
    ConstraintInvalidSplitter,
    ConstraintInvalidPotential,
    ConstraintInvalidOracle,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        use DiagnosticCode::*;
        match self {
            LexInvalidChar => "LEX_INVALID_CHAR",
            LexUnterminatedString => "LEX_UNTERMINATED_STRING",
            LexInvalidNumber => "LEX_INVALID_NUMBER",
            SyntaxUnexpectedToken => "SYNTAX_UNEXPECTED_TOKEN",
            UnknownSection => "UNKNOWN_SECTION",
            UnknownKey => "UNKNOWN_KEY",
            UnknownElement => "UNKNOWN_ELEMENT",
            UnknownValue => "UNKNOWN_VALUE",
            DuplicateSection => "DUPLICATE_SECTION",
            DuplicateKey => "DUPLICATE_KEY",
            MissingSection => "MISSING_SECTION",
            MissingKey => "MISSING_KEY",
            TypeMismatch => "TYPE_MISMATCH",
            ArityMismatch => "ARITY_MISMATCH",
            MixedUnits => "MIXED_UNITS",
            EmptyPath => "EMPTY_PATH",
            ConstraintNegativeLength => "CONSTRAINT_NEGATIVE_LENGTH",
            ConstraintNegativeGamma => "CONSTRAINT_NEGATIVE_GAMMA",
            ConstraintNonPositive => "CONSTRAINT_NON_POSITIVE",
            ConstraintNonFinite => "CONSTRAINT_NON_FINITE",
            ConstraintInvalidSweep => "CONSTRAINT_INVALID_SWEEP",
            ConstraintInvalidSplitter => "CONSTRAINT_INVALID_SPLITTER",
            ConstraintInvalidPotential => "CONSTRAINT_INVALID_POTENTIAL",
            ConstraintInvalidOracle => "CONSTRAINT_INVALID_ORACLE",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    pub const ALL: [Self; 24] = {
        use DiagnosticCode::*;
        [
            LexInvalidChar,
            LexUnterminatedString,
            LexInvalidNumber,
            SyntaxUnexpectedToken,
            UnknownSection,
            UnknownKey,
            UnknownElement,
            UnknownValue,
            DuplicateSection,
            DuplicateKey,
            MissingSection,
            MissingKey,
            TypeMismatch,
            ArityMismatch,
            MixedUnits,
            EmptyPath,
            ConstraintNegativeLength,
            ConstraintNegativeGamma,
            ConstraintNonPositive,
            ConstraintNonFinite,
            ConstraintInvalidSweep,
            ConstraintInvalidSplitter,
            ConstraintInvalidPotential,
            ConstraintInvalidOracle,
        ]
    };
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Byte offset plus 1-based line and column (columns count characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    /// The offending source text, possibly empty at end of input.
    pub token: String,
    pub message: String,
    pub hint: String,
}

impl Diagnostic {
    pub(crate) fn at(
        code: DiagnosticCode,
        span: Span,
        source: &str,
        message: impl Into<String>,
        hint: impl Into<String>,
    ) -> Self {
        let end = (span.offset + span.len).min(source.len());
        Self {
            code,
            offset: span.offset,
            line: span.line,
            column: span.column,
            token: source.get(span.offset..end).unwrap_or("").to_string(),
            message: message.into(),
            hint: hint.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.code, self.message)?;
        if !self.token.is_empty() {
            write!(f, " (at `{}`)", self.token)?;
        }
        write!(f, "\n  hint: {}", self.hint)
    }
}
