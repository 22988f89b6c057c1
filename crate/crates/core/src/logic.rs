//! Descriptor formulas over a decision system and their graded semantics
//! on granules.
//!
//! Grammar (`->` is right associative, `|` and `&` left associative):
//!
//! ```text
//! formula := imp
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := not ("&" not)*
//! not     := "!" not | "(" formula ")" | atom
//! atom    := ident "=" value
//! ```
//!
//! Degrees are exact rationals: every `ν_L` degree is a count over a count.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dataset::InformationSystem;
use crate::objset::ObjectSet;

pub type ExactDegree = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("value `{value}` never occurs in feature `{feature}`")]
    UnseenValue { feature: String, value: String },
}

pub type Result<T, E = FormulaError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { feature: String, value: String },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(feature: impl Into<String>, value: impl Into<String>) -> Self {
        Formula::Atom {
            feature: feature.into(),
            value: value.into(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    /// Connective nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            Formula::Atom { .. } => 5,
        }
    }

    /// Checks atoms against a system. Unseen values are an error unless
    /// `allow_unseen`.
    pub fn validate(&self, system: &InformationSystem, allow_unseen: bool) -> Result<()> {
        match self {
            Formula::Atom { feature, value } => {
                let f = system
                    .feature_index(feature)
                    .ok_or_else(|| FormulaError::UnknownFeature(feature.clone()))?;
                if !allow_unseen && system.lookup(f, value).is_none() {
                    return Err(FormulaError::UnseenValue {
                        feature: feature.clone(),
                        value: value.clone(),
                    });
                }
                Ok(())
            }
            Formula::Not(a) => a.validate(system, allow_unseen),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.validate(system, allow_unseen)?;
                b.validate(system, allow_unseen)
            }
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Canonical text with the fewest parentheses that parse back to the
/// same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Formula::Atom { feature, value } => write!(f, "{feature}={value}"),
            Formula::Not(a) => {
                f.write_str("!")?;
                write_child(f, a, a.precedence() < p)
            }
            Formula::Implies(a, b) => {
                write_child(f, a, a.precedence() <= p)?;
                f.write_str(" -> ")?;
                write_child(f, b, b.precedence() < p)
            }
            Formula::Or(a, b) | Formula::And(a, b) => {
                let op = if matches!(self, Formula::Or(..)) { " | " } else { " & " };
                write_child(f, a, a.precedence() < p)?;
                f.write_str(op)?;
                write_child(f, b, b.precedence() <= p)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, at: usize, message: impl Into<String>) -> Result<T> {
        Err(FormulaError::Syntax {
            column: at + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.imp()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.not()?;
        while self.eat("&") {
            lhs = lhs.and(self.not()?);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(self.not()?.not())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.imp()?;
                if !self.eat(")") {
                    return self.error(self.pos, "expected `)`");
                }
                Ok(inner)
            }
            _ => self.atom(),
        }
    }

    fn take_while(&mut self, ok: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && ok(self.src[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice")
    }

    fn atom(&mut self) -> Result<Formula> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            Some(_) => return self.error(start, "expected feature name, `!` or `(`"),
            None => return self.error(start, "unexpected end of formula"),
        }
        let feature = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_');
        if !self.eat("=") {
            return self.error(self.pos, "expected `=`");
        }
        self.skip_ws();
        let vstart = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let body = self.take_while(is_value_byte);
        if body.is_empty() {
            return self.error(vstart, "expected value");
        }
        let value = std::str::from_utf8(&self.src[vstart..self.pos]).expect("ascii slice");
        Ok(Formula::atom(feature, value))
    }
}

fn is_value_byte(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'.'
}

/// True for tokens usable as atom values without quoting.
pub fn is_valid_value(v: &str) -> bool {
    let body = v.strip_prefix('-').unwrap_or(v);
    !body.is_empty() && body.bytes().all(is_value_byte)
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    if !text.is_ascii() {
        let col = text.char_indices().find(|(_, c)| !c.is_ascii()).map_or(0, |(i, _)| i);
        return Err(FormulaError::Syntax {
            column: col + 1,
            message: "non-ASCII character".into(),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.imp()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.error(p.pos, "unexpected trailing input");
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NuMode {
    /// Three-valued: 1 inside, 0 disjoint, 1/2 otherwise.
    Nu3,
    /// Łukasiewicz: `|X ∩ Y| / |X|`.
    NuL,
}

/// Maximal degree of `ν(X, Y, ·)`. `ν_L(∅, Y) = 1`.
pub fn nu(mode: NuMode, x: &ObjectSet, y: &ObjectSet) -> ExactDegree {
    let inside = x.intersection_len(y);
    match mode {
        NuMode::Nu3 => {
            if inside == x.len() {
                ExactDegree::one()
            } else if inside == 0 {
                ExactDegree::zero()
            } else {
                ExactDegree::new(1, 2)
            }
        }
        NuMode::NuL => {
            if x.is_empty() {
                ExactDegree::one()
            } else {
                ExactDegree::new(inside as i64, x.len() as i64)
            }
        }
    }
}

/// Łukasiewicz residuum on exact degrees.
pub fn residuum(a: ExactDegree, b: ExactDegree) -> ExactDegree {
    (ExactDegree::one() - a + b).min(ExactDegree::one())
}

/// Nonempty granules over one universe.
#[derive(Debug, Clone, PartialEq)]
pub struct GranuleSet(Vec<ObjectSet>);

impl GranuleSet {
    /// Empty granules are dropped.
    pub fn new(granules: impl IntoIterator<Item = ObjectSet>) -> Self {
        GranuleSet(granules.into_iter().filter(|g| !g.is_empty()).collect())
    }

    pub fn granules(&self) -> &[ObjectSet] {
        &self.0
    }
}

/// Audit of a decision rule `α ⊃ β` at one granule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleAudit {
    pub true_at_g: bool,
    #[serde(serialize_with = "serialize_degree")]
    pub extension_of_rule: ExactDegree,
    #[serde(serialize_with = "serialize_degree")]
    pub collapse_antecedent: ExactDegree,
    #[serde(serialize_with = "serialize_degree")]
    pub collapse_consequent: ExactDegree,
    #[serde(serialize_with = "serialize_degree")]
    pub collapse_rule: ExactDegree,
}

/// Exact degrees serialize as `"n/d"` (or `"n"` for integers).
pub fn serialize_degree<S: serde::Serializer>(d: &ExactDegree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(d)
}

/// Formula semantics over one information system.
#[derive(Debug, Clone, Copy)]
pub struct Semantics<'a> {
    system: &'a InformationSystem,
}

impl<'a> Semantics<'a> {
    pub fn new(system: &'a InformationSystem) -> Self {
        Semantics { system }
    }

    pub fn system(&self) -> &'a InformationSystem {
        self.system
    }

    pub fn universe(&self) -> ObjectSet {
        ObjectSet::full(self.system.n_objects())
    }

    /// `[φ]`, the set of objects satisfying `φ`.
    pub fn meaning(&self, phi: &Formula) -> Result<ObjectSet> {
        let n = self.system.n_objects();
        Ok(match phi {
            Formula::Atom { feature, value } => {
                let f = self
                    .system
                    .feature_index(feature)
                    .ok_or_else(|| FormulaError::UnknownFeature(feature.clone()))?;
                match self.system.lookup(f, value) {
                    Some(code) => ObjectSet::from_indices(n, (0..n).filter(|&o| self.system.code(o, f) == code)),
                    None => ObjectSet::empty(n),
                }
            }
            Formula::Not(a) => self.meaning(a)?.complement(),
            Formula::And(a, b) => self.meaning(a)?.intersection(&self.meaning(b)?),
            Formula::Or(a, b) => self.meaning(a)?.union(&self.meaning(b)?),
            Formula::Implies(a, b) => self.meaning(a)?.complement().union(&self.meaning(b)?),
        })
    }

    /// `Im∨(g, [φ])`.
    pub fn extension(&self, g: &ObjectSet, phi: &Formula, mode: NuMode) -> Result<ExactDegree> {
        Ok(nu(mode, g, &self.meaning(phi)?))
    }

    /// `g ⊆ [φ]`.
    pub fn is_true_at(&self, g: &ObjectSet, phi: &Formula) -> Result<bool> {
        Ok(g.is_subset(&self.meaning(phi)?))
    }

    /// `φ` has extension 0 at `g`.
    pub fn is_false_at(&self, g: &ObjectSet, phi: &Formula, mode: NuMode) -> Result<bool> {
        Ok(self.extension(g, phi, mode)?.is_zero())
    }

    /// `Cls(G) ⊆ [φ]`.
    pub fn is_valid(&self, granules: &GranuleSet, phi: &Formula) -> Result<bool> {
        let m = self.meaning(phi)?;
        Ok(granules.granules().iter().all(|g| g.is_subset(&m)))
    }

    /// Extension at least `r`.
    pub fn graded_truth(&self, g: &ObjectSet, phi: &Formula, mode: NuMode, r: ExactDegree) -> Result<bool> {
        Ok(self.extension(g, phi, mode)? >= r)
    }

    /// Many-valued value of `φ`'s propositional skeleton at `g`: atoms take
    /// their `ν_L` extension, `¬v = 1 − v`, `v ⊃ w = min(1, 1 − v + w)`,
    /// `∧ = min`, `∨ = max`.
    pub fn collapse_value(&self, g: &ObjectSet, phi: &Formula) -> Result<ExactDegree> {
        Ok(match phi {
            Formula::Atom { .. } => self.extension(g, phi, NuMode::NuL)?,
            Formula::Not(a) => ExactDegree::one() - self.collapse_value(g, a)?,
            Formula::And(a, b) => self.collapse_value(g, a)?.min(self.collapse_value(g, b)?),
            Formula::Or(a, b) => self.collapse_value(g, a)?.max(self.collapse_value(g, b)?),
            Formula::Implies(a, b) => residuum(self.collapse_value(g, a)?, self.collapse_value(g, b)?),
        })
    }

    /// Rule `α ⊃ β` at `g`. The collapse treats `α` and `β` as the two
    /// propositional variables of the rule, each valued by its `ν_L`
    /// extension at `g`; for descriptor atoms this coincides with
    /// [`Semantics::collapse_value`].
    pub fn rule_audit(&self, g: &ObjectSet, alpha: &Formula, beta: &Formula, mode: NuMode) -> Result<RuleAudit> {
        let rule = alpha.clone().implies(beta.clone());
        let a = self.extension(g, alpha, NuMode::NuL)?;
        let b = self.extension(g, beta, NuMode::NuL)?;
        Ok(RuleAudit {
            true_at_g: self.is_true_at(g, &rule)?,
            extension_of_rule: self.extension(g, &rule, mode)?,
            collapse_antecedent: a,
            collapse_consequent: b,
            collapse_rule: residuum(a, b),
        })
    }
}
