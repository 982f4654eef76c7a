//! Recursive-descent parser for `.ifl` documents.
//!
//! Parsing runs in two passes. The first builds a loose tree of sections,
//! assignments and element calls, recovering at `;` and `}`; the second
//! checks names, types and constraints and assembles the document. Every
//! problem found along the way is reported, not just the first.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::diagnostic::{Diagnostic, DiagnosticCode as Code, Span};
use super::document::{LayoutDocument, OracleSettings, ParticleInput};
use super::lexer::{tokenize, Token, TokenKind};
use crate::layout::{PathSegment, PotentialProfile, SplitterConvention};
use crate::sweep::{SweepParameter, SweepScale, SweepSpec};

#[derive(Debug, Clone)]
enum Value {
    Number(f64),
    Ident(String),
    Str(String),
    List(Vec<(f64, Span)>),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Number(_) => "a number",
            Value::Ident(_) => "a name",
            Value::Str(_) => "a string",
            Value::List(_) => "a list",
        }
    }
}

#[derive(Debug, Clone)]
struct Item {
    key: String,
    key_span: Span,
    value: Value,
    value_span: Span,
}

#[derive(Debug)]
struct Call {
    name: String,
    span: Span,
    args: Vec<Item>,
}

#[derive(Debug)]
enum Entry {
    Assign(Item),
    Call(Call),
}

#[derive(Debug)]
struct Section {
    name: String,
    span: Span,
    qualifier: Option<(String, Span)>,
    entries: Vec<Entry>,
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

/// Span of the character at `offset`, pulled back inside the text so every
/// diagnostic points at something.
fn locate(src: &str, offset: usize) -> Span {
    if src.is_empty() {
        return Span {
            offset: 0,
            len: 0,
            line: 1,
            column: 1,
        };
    }
    let mut offset = offset.min(src.len() - 1);
    while !src.is_char_boundary(offset) {
        offset -= 1;
    }
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    let len = src[offset..].chars().next().map_or(0, char::len_utf8);
    Span {
        offset,
        len,
        line,
        column,
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, code: Code, span: Span, message: impl Into<String>, hint: impl Into<String>) {
        let span = if span.offset >= self.src.len() {
            locate(self.src, span.offset)
        } else {
            span
        };
        self.diags
            .push(Diagnostic::at(code, span, self.src, message, hint));
    }

    fn unexpected(&mut self, expected: &str) {
        let t = self.peek().clone();
        self.error(
            Code::SyntaxUnexpectedToken,
            t.span,
            format!("expected {expected}, found {}", t.kind.describe()),
            format!("insert {expected} here"),
        );
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Option<Token> {
        if self.peek().kind == kind {
            Some(self.bump())
        } else {
            self.unexpected(what);
            None
        }
    }

    /// Skips to just past the next `;`, or up to (not past) the next `}`.
    fn recover(&mut self) {
        loop {
            match self.peek().kind {
                TokenKind::Semicolon => {
                    self.bump();
                    return;
                }
                TokenKind::RBrace | TokenKind::Eof => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn document(&mut self) -> Vec<Section> {
        let mut sections = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.kind {
                TokenKind::Eof => break,
                TokenKind::Ident(name) => {
                    self.bump();
                    let qualifier = match &self.peek().kind {
                        TokenKind::Ident(q) => {
                            let q = q.clone();
                            Some((q, self.bump().span))
                        }
                        _ => None,
                    };
                    if self.expect(TokenKind::LBrace, "`{`").is_none() {
                        // Resynchronise on the next section header.
                        while !matches!(self.peek().kind, TokenKind::Eof | TokenKind::RBrace) {
                            self.bump();
                        }
                        self.bump();
                        continue;
                    }
                    let entries = self.block();
                    sections.push(Section {
                        name: name.clone(),
                        span: t.span,
                        qualifier,
                        entries,
                    });
                }
                _ => {
                    self.unexpected("a section name");
                    self.bump();
                }
            }
        }
        sections
    }

    fn block(&mut self) -> Vec<Entry> {
        let mut entries = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.kind {
                TokenKind::RBrace => {
                    self.bump();
                    return entries;
                }
                TokenKind::Eof => {
                    self.unexpected("`}`");
                    return entries;
                }
                TokenKind::Semicolon => {
                    self.bump();
                }
                TokenKind::Ident(name) => {
                    self.bump();
                    match self.peek().kind {
                        TokenKind::Equals => {
                            self.bump();
                            match self.value() {
                                Some((value, value_span)) => {
                                    if self.expect(TokenKind::Semicolon, "`;`").is_none() {
                                        self.recover();
                                    }
                                    entries.push(Entry::Assign(Item {
                                        key: name.clone(),
                                        key_span: t.span,
                                        value,
                                        value_span,
                                    }));
                                }
                                None => self.recover(),
                            }
                        }
                        TokenKind::LParen => {
                            self.bump();
                            match self.call_args() {
                                Some(args) => {
                                    if self.peek().kind == TokenKind::Semicolon {
                                        self.bump();
                                    }
                                    entries.push(Entry::Call(Call {
                                        name: name.clone(),
                                        span: t.span,
                                        args,
                                    }));
                                }
                                None => self.recover(),
                            }
                        }
                        _ => {
                            self.unexpected("`=` or `(`");
                            self.recover();
                        }
                    }
                }
                _ => {
                    self.unexpected("a key or element");
                    self.recover();
                }
            }
        }
    }

    fn call_args(&mut self) -> Option<Vec<Item>> {
        let mut args = Vec::new();
        if self.peek().kind == TokenKind::RParen {
            self.bump();
            return Some(args);
        }
        loop {
            let t = self.peek().clone();
            let named = matches!(t.kind, TokenKind::Ident(_))
                && self.tokens.get(self.pos + 1).map(|n| &n.kind) == Some(&TokenKind::Equals);
            if named {
                let TokenKind::Ident(key) = self.bump().kind else {
                    unreachable!()
                };
                self.bump();
                let (value, value_span) = self.value()?;
                args.push(Item {
                    key,
                    key_span: t.span,
                    value,
                    value_span,
                });
            } else {
                let (_, span) = self.value()?;
                self.error(
                    Code::ArityMismatch,
                    span,
                    "element arguments must be named",
                    "write `name=value`, e.g. `length=1.0`",
                );
            }
            match self.peek().kind {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::RParen => {
                    self.bump();
                    return Some(args);
                }
                _ => {
                    self.unexpected("`,` or `)`");
                    return None;
                }
            }
        }
    }

    fn value(&mut self) -> Option<(Value, Span)> {
        let t = self.peek().clone();
        let v = match &t.kind {
            TokenKind::Number(x) => Value::Number(*x),
            TokenKind::Ident(s) => Value::Ident(s.clone()),
            TokenKind::Str(s) => Value::Str(s.clone()),
            TokenKind::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if self.peek().kind != TokenKind::RBracket {
                    loop {
                        let n = self.peek().clone();
                        match n.kind {
                            TokenKind::Number(x) => items.push((x, n.span)),
                            _ => {
                                self.unexpected("a number");
                                return None;
                            }
                        }
                        self.bump();
                        match self.peek().kind {
                            TokenKind::Comma => {
                                self.bump();
                            }
                            TokenKind::RBracket => break,
                            _ => {
                                self.unexpected("`,` or `]`");
                                return None;
                            }
                        }
                    }
                }
                let close = self.bump().span;
                let span = Span {
                    len: close.offset + close.len - t.span.offset,
                    ..t.span
                };
                return Some((Value::List(items), span));
            }
            _ => {
                self.unexpected("a value");
                return None;
            }
        };
        self.bump();
        Some((v, t.span))
    }
}

/// Key/value lookups over one section or element, reporting as it goes.
struct Fields {
    items: BTreeMap<String, Item>,
}

struct Checker<'a> {
    src: &'a str,
    diags: Vec<Diagnostic>,
    eof: Span,
}

impl<'a> Checker<'a> {
    fn error(&mut self, code: Code, span: Span, message: impl Into<String>, hint: impl Into<String>) {
        let span = if span.offset >= self.src.len() {
            locate(self.src, span.offset)
        } else {
            span
        };
        self.diags
            .push(Diagnostic::at(code, span, self.src, message, hint));
    }

    /// Collects items, rejecting duplicates and keys not in `allowed`.
    fn fields(&mut self, items: Vec<Item>, allowed: &[&str], context: &str) -> Fields {
        let mut map = BTreeMap::new();
        for item in items {
            if !allowed.contains(&item.key.as_str()) {
                self.error(
                    Code::UnknownKey,
                    item.key_span,
                    format!("unknown key `{}` in {context}", item.key),
                    format!("allowed keys: {}", allowed.join(", ")),
                );
                continue;
            }
            if map.contains_key(&item.key) {
                self.error(
                    Code::DuplicateKey,
                    item.key_span,
                    format!("`{}` is set twice in {context}", item.key),
                    "remove one of the assignments",
                );
                continue;
            }
            map.insert(item.key.clone(), item);
        }
        Fields { items: map }
    }

    fn missing(&mut self, key: &str, span: Span, context: &str) {
        self.error(
            Code::MissingKey,
            span,
            format!("{context} needs `{key}`"),
            format!("add `{key} = ...`"),
        );
    }

    fn number(&mut self, f: &Fields, key: &str) -> Option<(f64, Span)> {
        let item = f.items.get(key)?;
        match &item.value {
            Value::Number(x) => {
                if x.is_finite() {
                    Some((*x, item.value_span))
                } else {
                    self.error(
                        Code::ConstraintNonFinite,
                        item.value_span,
                        format!("`{key}` is out of floating-point range"),
                        "use a finite value",
                    );
                    None
                }
            }
            other => {
                self.error(
                    Code::TypeMismatch,
                    item.value_span,
                    format!("`{key}` must be a number, found {}", other.describe()),
                    format!("write e.g. `{key} = 1.0`"),
                );
                None
            }
        }
    }

    fn positive(&mut self, f: &Fields, key: &str) -> Option<f64> {
        let (x, span) = self.number(f, key)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.error(
                Code::ConstraintNonPositive,
                span,
                format!("`{key}` must be > 0, got {x}"),
                "use a positive value",
            );
            None
        }
    }

    fn integer(&mut self, f: &Fields, key: &str) -> Option<(usize, Span)> {
        let (x, span) = self.number(f, key)?;
        if x.fract() == 0.0 && x >= 0.0 && x <= u32::MAX as f64 {
            Some((x as usize, span))
        } else {
            self.error(
                Code::TypeMismatch,
                span,
                format!("`{key}` must be a whole number, got {x}"),
                format!("write e.g. `{key} = 3`"),
            );
            None
        }
    }

    fn ident<'f>(&mut self, f: &'f Fields, key: &str) -> Option<(&'f str, Span)> {
        let item = f.items.get(key)?;
        match &item.value {
            Value::Ident(s) => Some((s.as_str(), item.value_span)),
            other => {
                self.error(
                    Code::TypeMismatch,
                    item.value_span,
                    format!("`{key}` must be a name, found {}", other.describe()),
                    "write a bare word without quotes",
                );
                None
            }
        }
    }

    fn list(&mut self, f: &Fields, key: &str) -> Option<(Vec<f64>, Span)> {
        let item = f.items.get(key)?;
        match &item.value {
            Value::List(xs) => {
                let mut ok = true;
                for &(x, span) in xs {
                    if !x.is_finite() {
                        self.error(
                            Code::ConstraintNonFinite,
                            span,
                            format!("list entry in `{key}` is out of floating-point range"),
                            "use finite values",
                        );
                        ok = false;
                    }
                }
                ok.then(|| (xs.iter().map(|p| p.0).collect(), item.value_span))
            }
            other => {
                self.error(
                    Code::TypeMismatch,
                    item.value_span,
                    format!("`{key}` must be a list, found {}", other.describe()),
                    format!("write e.g. `{key} = [0.0, 1.0]`"),
                );
                None
            }
        }
    }

    fn unknown_value(&mut self, span: Span, key: &str, got: &str, allowed: &[&str]) {
        self.error(
            Code::UnknownValue,
            span,
            format!("`{got}` is not a valid {key}"),
            format!("use one of: {}", allowed.join(", ")),
        );
    }

    fn assignments(&mut self, section: Section, allowed: &[&str]) -> (Fields, Span) {
        let mut items = Vec::new();
        let context = format!("section `{}`", section.name);
        for entry in section.entries {
            match entry {
                Entry::Assign(item) => items.push(item),
                Entry::Call(call) => self.error(
                    Code::SyntaxUnexpectedToken,
                    call.span,
                    format!("element `{}` is only allowed in path sections", call.name),
                    "write `key = value;` here",
                ),
            }
        }
        if let Some((q, span)) = section.qualifier {
            self.error(
                Code::SyntaxUnexpectedToken,
                span,
                format!("section `{}` takes no name, found `{q}`", section.name),
                format!("write `{} {{ ... }}`", section.name),
            );
        }
        (self.fields(items, allowed, &context), section.span)
    }

    fn particle(&mut self, section: Section) -> Option<(ParticleInput, Option<String>)> {
        const NATURAL: [&str; 2] = ["k", "ell"];
        const SI: [&str; 3] = ["momentum_si", "mass_si", "gamma_si"];
        let (f, span) = self.assignments(
            section,
            &["ell", "gamma_si", "k", "label", "mass_si", "momentum_si"],
        );
        let label = match f.items.get("label") {
            Some(Item {
                value: Value::Str(s),
                ..
            }) => Some(s.clone()),
            Some(item) => {
                self.error(
                    Code::TypeMismatch,
                    item.value_span,
                    format!("`label` must be a string, found {}", item.value.describe()),
                    "write e.g. `label = \"muon\"`",
                );
                None
            }
            None => None,
        };
        let natural = NATURAL.iter().find(|k| f.items.contains_key(**k));
        let si = SI.iter().find(|k| f.items.contains_key(**k));
        if let (Some(_), Some(s)) = (natural, si) {
            let at = f.items[*s].key_span;
            self.error(
                Code::MixedUnits,
                at,
                "particle mixes dimensionless `k`/`ell` with SI keys",
                "use either `k` and `ell`, or `momentum_si`, `mass_si` and `gamma_si`",
            );
            return None;
        }
        if si.is_some() {
            let mut ok = true;
            for key in SI {
                if !f.items.contains_key(key) {
                    self.missing(key, span, "an SI particle");
                    ok = false;
                }
            }
            let momentum = self.positive(&f, "momentum_si");
            let mass = self.positive(&f, "mass_si");
            let gamma = match self.number(&f, "gamma_si") {
                Some((g, _)) if g >= 0.0 => Some(g),
                Some((g, at)) => {
                    self.error(
                        Code::ConstraintNegativeGamma,
                        at,
                        format!("`gamma_si` must be >= 0, got {g}"),
                        "use 0 for a stable particle",
                    );
                    None
                }
                None => None,
            };
            let (Some(momentum), Some(mass), Some(gamma), true) = (momentum, mass, gamma, ok) else {
                return None;
            };
            let input = ParticleInput::Si {
                momentum,
                mass,
                gamma,
            };
            let (k, ell) = input.natural();
            if !(k.is_finite() && k > 0.0 && ell > 0.0) {
                self.error(
                    Code::ConstraintNonFinite,
                    f.items["momentum_si"].value_span,
                    format!("SI values give k = {k:e}, ell = {ell:e}"),
                    "check the magnitudes of momentum, mass and rate",
                );
                return None;
            }
            return Some((input, label));
        }
        if !f.items.contains_key("k") {
            self.missing("k", span, "the particle");
        }
        if !f.items.contains_key("ell") {
            self.missing("ell", span, "the particle");
        }
        let k = self.positive(&f, "k");
        let ell = match f.items.get("ell").map(|i| (&i.value, i.value_span)) {
            Some((Value::Ident(s), _)) if s == "stable" => Some(None),
            Some((Value::Ident(s), at)) => {
                let s = s.clone();
                self.unknown_value(at, "ell", &s, &["a positive number", "stable"]);
                None
            }
            Some(_) => self.positive(&f, "ell").map(Some),
            None => None,
        };
        Some((ParticleInput::Natural { k: k?, ell: ell? }, label))
    }

    fn splitter(&mut self, section: Section) -> Option<SplitterConvention> {
        let (f, span) = self.assignments(section, &["convention", "matrix", "mirror"]);
        let convention = match self.ident(&f, "convention") {
            Some((c, at)) => (c.to_string(), at),
            None => {
                if !f.items.contains_key("convention") {
                    self.missing("convention", span, "the splitter");
                }
                return None;
            }
        };
        let custom = convention.0 == "custom";
        if !custom {
            for key in ["matrix", "mirror"] {
                if let Some(item) = f.items.get(key) {
                    self.error(
                        Code::ConstraintInvalidSplitter,
                        item.key_span,
                        format!("`{key}` only applies to `convention = custom`"),
                        format!("remove `{key}` or switch to the custom convention"),
                    );
                }
            }
        }
        match convention.0.as_str() {
            "paper" => Some(SplitterConvention::Paper),
            "hadamard" => Some(SplitterConvention::Hadamard),
            "custom" => {
                let sized = |checker: &mut Self, key: &str, n: usize| {
                    if !f.items.contains_key(key) {
                        checker.missing(key, span, "a custom splitter");
                        return None;
                    }
                    let (xs, at) = checker.list(&f, key)?;
                    if xs.len() != n {
                        checker.error(
                            Code::ArityMismatch,
                            at,
                            format!("`{key}` needs {n} numbers (re, im pairs), got {}", xs.len()),
                            format!("list {n} values"),
                        );
                        return None;
                    }
                    Some((xs, at))
                };
                let matrix = sized(self, "matrix", 8);
                let mirror = sized(self, "mirror", 2);
                let ((m, at), (r, _)) = (matrix?, mirror?);
                let z = |i: usize| Complex64::new(m[2 * i], m[2 * i + 1]);
                let conv = SplitterConvention::Custom {
                    matrix: [[z(0), z(1)], [z(2), z(3)]],
                    mirror: Complex64::new(r[0], r[1]),
                };
                if let Err(e) = conv.validate() {
                    self.error(
                        Code::ConstraintInvalidSplitter,
                        at,
                        e.to_string(),
                        "use a balanced unitary matrix and a unit-modulus mirror",
                    );
                    return None;
                }
                Some(conv)
            }
            other => {
                let other = other.to_string();
                self.unknown_value(convention.1, "convention", &other, &["paper", "hadamard", "custom"]);
                None
            }
        }
    }

    fn path(&mut self, section: Section) -> Option<Vec<PathSegment>> {
        let name = section
            .qualifier
            .as_ref()
            .map_or("path".to_string(), |q| format!("path `{}`", q.0));
        let mut segments = Vec::new();
        let mut ok = true;
        for entry in section.entries {
            let call = match entry {
                Entry::Call(call) => call,
                Entry::Assign(item) => {
                    self.error(
                        Code::SyntaxUnexpectedToken,
                        item.key_span,
                        format!("{name} holds elements, not `{} = ...`", item.key),
                        "write an element such as `segment(length=1.0);`",
                    );
                    ok = false;
                    continue;
                }
            };
            match self.element(call) {
                Some(seg) => segments.push(seg),
                None => ok = false,
            }
        }
        if segments.is_empty() && ok {
            self.error(
                Code::EmptyPath,
                section.span,
                format!("{name} has no elements"),
                "add at least one `segment(length=...)`",
            );
            return None;
        }
        ok.then_some(segments)
    }

    fn element(&mut self, call: Call) -> Option<PathSegment> {
        let context = format!("element `{}`", call.name);
        match call.name.as_str() {
            "phase" => {
                let f = self.fields(call.args, &["phi"], &context);
                let phi = if f.items.contains_key("phi") {
                    self.number(&f, "phi")?.0
                } else {
                    0.0
                };
                Some(PathSegment::phase_shifter(phi))
            }
            "segment" | "cavity" => {
                let f = self.fields(call.args, &["gamma_ratio", "length", "potential"], &context);
                if !f.items.contains_key("length") {
                    self.missing("length", call.span, &context);
                    return None;
                }
                let (length, at) = self.number(&f, "length")?;
                if length < 0.0 {
                    self.error(
                        Code::ConstraintNegativeLength,
                        at,
                        format!("length must be >= 0, got {length}"),
                        "lengths are distances; drop the minus sign",
                    );
                    return None;
                }
                let gamma_ratio = if f.items.contains_key("gamma_ratio") {
                    let (g, at) = self.number(&f, "gamma_ratio")?;
                    if g < 0.0 {
                        self.error(
                            Code::ConstraintNegativeGamma,
                            at,
                            format!("gamma_ratio must be >= 0, got {g}"),
                            "0 switches decay off; 1 is the free-space rate",
                        );
                        return None;
                    }
                    g
                } else {
                    1.0
                };
                let mut seg = if call.name == "cavity" {
                    PathSegment::cavity(length, gamma_ratio)
                } else {
                    PathSegment::free(length).with_gamma_ratio(gamma_ratio)
                };
                if f.items.contains_key("potential") {
                    let (samples, at) = self.list(&f, "potential")?;
                    match PotentialProfile::new(samples) {
                        Ok(p) => seg = seg.with_potential(p),
                        Err(e) => {
                            self.error(
                                Code::ConstraintInvalidPotential,
                                at,
                                e.to_string(),
                                "give at least two samples, from segment start to end",
                            );
                            return None;
                        }
                    }
                }
                Some(seg)
            }
            other => {
                self.error(
                    Code::UnknownElement,
                    call.span,
                    format!("unknown element `{other}`"),
                    "use segment(...), cavity(...) or phase(...)",
                );
                None
            }
        }
    }

    fn sweep(&mut self, section: Section) -> Option<SweepSpec> {
        let (f, span) =
            self.assignments(section, &["end", "parameter", "scale", "start", "steps"]);
        for key in ["parameter", "start", "end", "steps"] {
            if !f.items.contains_key(key) {
                self.missing(key, span, "the sweep");
            }
        }
        let names: Vec<&str> = SweepParameter::ALL.iter().map(|p| p.name()).collect();
        let parameter = match self.ident(&f, "parameter") {
            Some((p, at)) => match SweepParameter::from_name(p) {
                Some(p) => Some(p),
                None => {
                    let p = p.to_string();
                    self.unknown_value(at, "sweep parameter", &p, &names);
                    None
                }
            },
            None => None,
        };
        let scale = match self.ident(&f, "scale") {
            Some((s, at)) => match SweepScale::from_name(s) {
                Some(s) => Some(s),
                None => {
                    let s = s.to_string();
                    self.unknown_value(at, "scale", &s, &["linear", "log"]);
                    None
                }
            },
            None if f.items.contains_key("scale") => None,
            None => Some(SweepScale::Linear),
        };
        let start = self.number(&f, "start");
        let end = self.number(&f, "end");
        let steps = self.integer(&f, "steps");
        let spec = SweepSpec {
            parameter: parameter?,
            start: start?.0,
            end: end?.0,
            steps: steps?.0,
            scale: scale?,
        };
        if let Err(e) = spec.validate() {
            self.error(
                Code::ConstraintInvalidSweep,
                span,
                e.to_string(),
                "steps >= 2, start != end, and positive endpoints for log scale",
            );
            return None;
        }
        Some(spec)
    }

    fn oracle(&mut self, section: Section) -> Option<OracleSettings> {
        let (f, span) = self.assignments(
            section,
            &[
                "ladder",
                "points_per_wavelength",
                "step_fraction",
                "tolerance",
                "width_times_k",
            ],
        );
        let mut settings = OracleSettings::default();
        let mut ok = true;
        let r = &mut settings.resolution;
        for (key, slot) in [
            ("points_per_wavelength", &mut r.points_per_wavelength),
            ("step_fraction", &mut r.step_fraction),
            ("width_times_k", &mut r.width_times_k),
            ("tolerance", &mut settings.tolerance),
        ] {
            if f.items.contains_key(key) {
                match self.number(&f, key) {
                    Some((x, _)) => *slot = x,
                    None => ok = false,
                }
            }
        }
        if f.items.contains_key("ladder") {
            match self.integer(&f, "ladder") {
                Some((n, _)) => settings.resolution.ladder = n,
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        let check = settings.resolution.validate().err().map(|e| e.to_string()).or_else(|| {
            (settings.tolerance <= 0.0).then(|| "oracle tolerance must be > 0".to_string())
        });
        if let Some(message) = check {
            self.error(
                Code::ConstraintInvalidOracle,
                span,
                message,
                "see the oracle section defaults in the README",
            );
            return None;
        }
        Some(settings)
    }
}

/// Parses a document. On failure every diagnostic found is returned, in
/// source order.
pub fn parse(src: &str) -> Result<LayoutDocument, Vec<Diagnostic>> {
    let (tokens, lex_diags) = tokenize(src);
    let eof = tokens.last().map(|t| t.span).unwrap_or_default();
    let mut parser = Parser {
        src,
        tokens,
        pos: 0,
        diags: lex_diags,
    };
    let sections = parser.document();
    let mut checker = Checker {
        src,
        diags: parser.diags,
        eof,
    };

    let mut particle = None;
    let mut splitter = None;
    let mut upper = None;
    let mut lower = None;
    let mut sweep = None;
    let mut oracle = None;
    let mut failed = false;
    let mut seen: BTreeMap<String, Span> = BTreeMap::new();

    for section in sections {
        let key = match &section.qualifier {
            Some((q, _)) if section.name == "path" => format!("path {q}"),
            _ => section.name.clone(),
        };
        let known = matches!(
            key.as_str(),
            "particle" | "splitter" | "path upper" | "path lower" | "sweep" | "oracle"
        );
        if !known {
            let (span, message, hint) = match (&section.name[..], &section.qualifier) {
                ("path", Some((q, at))) => (
                    *at,
                    format!("unknown path `{q}`"),
                    "paths are named `upper` or `lower`".to_string(),
                ),
                ("path", None) => (
                    section.span,
                    "path section needs a name".to_string(),
                    "write `path upper { ... }` or `path lower { ... }`".to_string(),
                ),
                (name, _) => (
                    section.span,
                    format!("unknown section `{name}`"),
                    "sections are particle, splitter, path, sweep, oracle".to_string(),
                ),
            };
            checker.error(Code::UnknownSection, span, message, hint);
            failed = true;
            continue;
        }
        if seen.contains_key(&key) {
            checker.error(
                Code::DuplicateSection,
                section.span,
                format!("section `{key}` appears more than once"),
                "merge the two sections",
            );
            failed = true;
            continue;
        }
        seen.insert(key.clone(), section.span);
        let ok = match key.as_str() {
            "particle" => checker.particle(section).map(|p| particle = Some(p)),
            "splitter" => checker.splitter(section).map(|s| splitter = Some(s)),
            "path upper" => checker.path(section).map(|p| upper = Some(p)),
            "path lower" => checker.path(section).map(|p| lower = Some(p)),
            "sweep" => checker.sweep(section).map(|s| sweep = Some(s)),
            _ => checker.oracle(section).map(|o| oracle = Some(o)),
        };
        failed |= ok.is_none();
    }

    for required in ["particle", "path upper", "path lower"] {
        if !seen.contains_key(required) {
            let eof = checker.eof;
            checker.error(
                Code::MissingSection,
                eof,
                format!("missing `{required}` section"),
                format!("add `{required} {{ ... }}`"),
            );
        }
    }

    let mut diags = checker.diags;
    if !diags.is_empty() || failed {
        diags.sort_by_key(|d| d.offset);
        return Err(diags);
    }
    let (particle_input, label) = particle.expect("checked above");
    Ok(LayoutDocument {
        particle_input,
        label,
        splitter: splitter.unwrap_or_default(),
        upper: upper.expect("checked above"),
        lower: lower.expect("checked above"),
        sweep,
        oracle,
    })
}
