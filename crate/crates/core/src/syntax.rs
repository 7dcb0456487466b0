//! Atoms, rules, programs, interpretations and alphabets, together with the
//! text format used everywhere in the crate.
//!
//! The program format is one rule per `.` terminator:
//!
//! ```text
//! % comment until end of line
//! a :- b, c.
//! d.
//! ```
//!
//! Interpretations are written `{a, b}` or as a bare comma separated list.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

// ------------------------------------------------------------------------------------------------
// Atom
// ------------------------------------------------------------------------------------------------

/// An interned propositional symbol. Atoms order lexicographically by name.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom(&'static str);

fn interner() -> &'static Mutex<HashSet<&'static str>> {
    static INTERNER: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

pub(crate) fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Atom {
    pub fn new(name: &str) -> Result<Self> {
        if !is_atom_name(name) {
            return Err(Error::InvalidAtom(name.to_string()));
        }
        let mut table = interner().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(&interned) = table.get(name) {
            return Ok(Atom(interned));
        }
        let leaked: &'static str = Box::leak(name.to_string().into_boxed_str());
        table.insert(leaked);
        Ok(Atom(leaked))
    }

    pub fn name(&self) -> &'static str {
        self.0
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(other.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Atom::new(s.trim())
    }
}

// ------------------------------------------------------------------------------------------------
// Rule
// ------------------------------------------------------------------------------------------------

/// `head ← body`. The body is a set; a rule with an empty body is a fact.
///
/// Rules order by head first and then by body, which is the canonical order
/// used when printing programs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    head: Atom,
    body: BTreeSet<Atom>,
}

impl Rule {
    pub fn new(head: Atom, body: impl IntoIterator<Item = Atom>) -> Self {
        Rule {
            head,
            body: body.into_iter().collect(),
        }
    }

    pub fn fact(head: Atom) -> Self {
        Rule {
            head,
            body: BTreeSet::new(),
        }
    }

    pub fn head(&self) -> Atom {
        self.head
    }

    pub fn body(&self) -> &BTreeSet<Atom> {
        &self.body
    }

    /// Number of body atoms.
    pub fn size(&self) -> usize {
        self.body.len()
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        !self.body.is_empty()
    }

    /// At most one body atom.
    pub fn is_krom(&self) -> bool {
        self.body.len() <= 1
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        std::iter::once(self.head).chain(self.body.iter().copied())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        let mut body = self.body.iter();
        if let Some(first) = body.next() {
            write!(f, " :- {first}")?;
            for atom in body {
                write!(f, ", {atom}")?;
            }
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ------------------------------------------------------------------------------------------------
// Program
// ------------------------------------------------------------------------------------------------

/// A finite, duplicate-free set of rules.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Program {
    rules: BTreeSet<Rule>,
}

impl Program {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.iter()
    }

    pub fn rules(&self) -> &BTreeSet<Rule> {
        &self.rules
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules.contains(rule)
    }

    pub fn is_subset(&self, other: &Program) -> bool {
        self.rules.is_subset(&other.rules)
    }

    pub fn union(&self, other: &Program) -> Program {
        self.rules.union(&other.rules).cloned().collect()
    }

    pub fn difference(&self, other: &Program) -> Program {
        self.rules.difference(&other.rules).cloned().collect()
    }

    pub fn with_rule(&self, rule: Rule) -> Program {
        let mut rules = self.rules.clone();
        rules.insert(rule);
        Program { rules }
    }

    /// `f(P)`.
    pub fn facts(&self) -> Program {
        self.rules.iter().filter(|r| r.is_fact()).cloned().collect()
    }

    /// `p(P)`.
    pub fn proper(&self) -> Program {
        self.rules.iter().filter(|r| r.is_proper()).cloned().collect()
    }

    pub fn heads(&self) -> Interpretation {
        self.rules.iter().map(Rule::head).collect()
    }

    pub fn bodies(&self) -> Interpretation {
        self.rules
            .iter()
            .flat_map(|r| r.body.iter().copied())
            .collect()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.rules.iter().flat_map(Rule::atoms).collect()
    }

    pub fn is_krom(&self) -> bool {
        self.rules.iter().all(Rule::is_krom)
    }

    /// True when every rule is a fact.
    pub fn is_interpretation(&self) -> bool {
        self.rules.iter().all(Rule::is_fact)
    }

    /// The heads of a program made only of facts.
    pub fn to_interpretation(&self) -> Option<Interpretation> {
        self.is_interpretation().then(|| self.heads())
    }

    /// Canonical text, one rule per line, no trailing newline.
    pub fn render(&self) -> String {
        self.join_rules("\n")
    }

    /// Canonical text on a single line.
    pub fn render_inline(&self) -> String {
        self.join_rules(" ")
    }

    fn join_rules(&self, separator: &str) -> String {
        self.rules
            .iter()
            .map(Rule::to_string)
            .collect::<Vec<_>>()
            .join(separator)
    }
}

impl FromIterator<Rule> for Program {
    fn from_iter<T: IntoIterator<Item = Rule>>(iter: T) -> Self {
        Program {
            rules: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for Program {
    type Item = Rule;
    type IntoIter = std::collections::btree_set::IntoIter<Rule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.into_iter()
    }
}

impl<'a> IntoIterator for &'a Program {
    type Item = &'a Rule;
    type IntoIter = std::collections::btree_set::Iter<'a, Rule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.render_inline())
    }
}

impl FromStr for Program {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_program(s)
    }
}

// ------------------------------------------------------------------------------------------------
// Interpretation and Alphabet
// ------------------------------------------------------------------------------------------------

/// A finite set of atoms. Doubles as the program consisting of those facts.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation {
    atoms: BTreeSet<Atom>,
}

impl Interpretation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.atoms.iter().copied()
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.atoms.contains(&atom)
    }

    pub fn contains_all<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
        atoms.into_iter().all(|a| self.atoms.contains(a))
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.atoms.is_subset(&other.atoms)
    }

    pub fn union(&self, other: &Interpretation) -> Interpretation {
        self.atoms.union(&other.atoms).copied().collect()
    }

    pub fn intersection(&self, other: &Interpretation) -> Interpretation {
        self.atoms.intersection(&other.atoms).copied().collect()
    }

    pub fn difference(&self, other: &Interpretation) -> Interpretation {
        self.atoms.difference(&other.atoms).copied().collect()
    }

    /// The program `{a. | a ∈ I}`.
    pub fn to_program(&self) -> Program {
        self.atoms.iter().map(|&a| Rule::fact(a)).collect()
    }
}

impl FromIterator<Atom> for Interpretation {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        Interpretation {
            atoms: iter.into_iter().collect(),
        }
    }
}

impl From<&Interpretation> for Program {
    fn from(i: &Interpretation) -> Self {
        i.to_program()
    }
}

fn write_atom_set<'a>(
    f: &mut fmt::Formatter<'_>,
    atoms: impl Iterator<Item = &'a Atom>,
) -> fmt::Result {
    let names: Vec<&str> = atoms.map(Atom::name).collect();
    write!(f, "{{{}}}", names.join(", "))
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom_set(f, self.atoms.iter())
    }
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Interpretation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_atom_set(s).map(|atoms| atoms.into_iter().collect())
    }
}

/// The finite alphabet an operation is evaluated over.
///
/// Complements, the unit program and `I^⊕` all depend on it, so it is passed
/// explicitly rather than recovered from operands.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    atoms: BTreeSet<Atom>,
}

impl Alphabet {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Alphabet {
            atoms: atoms.into_iter().collect(),
        }
    }

    /// Every atom occurring in a head or body of any of the programs.
    pub fn infer<'a>(programs: impl IntoIterator<Item = &'a Program>) -> Self {
        Alphabet {
            atoms: programs.into_iter().flat_map(Program::atoms).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.atoms.iter().copied()
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.atoms.contains(&atom)
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet {
            atoms: self.atoms.union(&other.atoms).copied().collect(),
        }
    }

    /// The whole alphabet as an interpretation, `A` read as a set of facts.
    pub fn to_interpretation(&self) -> Interpretation {
        self.atoms.iter().copied().collect()
    }

    pub fn check_atoms(&self, atoms: impl IntoIterator<Item = Atom>) -> Result<()> {
        let missing: BTreeSet<Atom> = atoms
            .into_iter()
            .filter(|a| !self.atoms.contains(a))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::AlphabetCoverage {
                missing: missing.iter().map(|a| a.name().to_string()).collect(),
            })
        }
    }

    pub fn check_program(&self, program: &Program) -> Result<()> {
        self.check_atoms(program.atoms())
    }

    pub fn check_interpretation(&self, interpretation: &Interpretation) -> Result<()> {
        self.check_atoms(interpretation.iter())
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom_set(f, self.atoms.iter())
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_atom_set(s).map(Alphabet::new)
    }
}

// ------------------------------------------------------------------------------------------------
// Parsing and rendering
// ------------------------------------------------------------------------------------------------

pub fn parse_program(text: &str) -> Result<Program> {
    let mut lexer = Lexer::new(text);
    let mut rules = BTreeSet::new();
    loop {
        match lexer.next_token()? {
            None => break,
            Some((Token::Ident(name), pos)) => {
                let head = lexer.atom(&name, pos)?;
                let mut body = BTreeSet::new();
                match lexer.expect_token("`.` or `:-`")? {
                    (Token::Dot, _) => {}
                    (Token::Neck, _) => loop {
                        let (name, pos) = lexer.expect_ident()?;
                        body.insert(lexer.atom(&name, pos)?);
                        match lexer.expect_token("`,` or `.`")? {
                            (Token::Comma, _) => continue,
                            (Token::Dot, _) => break,
                            (other, pos) => return Err(pos.error(format!(
                                "expected `,` or `.`, found {other}"
                            ))),
                        }
                    },
                    (other, pos) => {
                        return Err(pos.error(format!("expected `.` or `:-`, found {other}")))
                    }
                }
                rules.insert(Rule { head, body });
            }
            Some((other, pos)) => {
                return Err(pos.error(format!("expected a rule head, found {other}")));
            }
        }
    }
    Ok(Program { rules })
}

pub fn render_program(program: &Program) -> String {
    program.render()
}

/// Union of every atom occurring in the given programs.
pub fn infer_alphabet(programs: &[Program]) -> Alphabet {
    Alphabet::infer(programs)
}

fn parse_atom_set(text: &str) -> Result<BTreeSet<Atom>> {
    let mut lexer = Lexer::new(text);
    let mut atoms = BTreeSet::new();
    let mut braced = false;
    let mut token = lexer.next_token()?;
    if let Some((Token::LBrace, _)) = token {
        braced = true;
        token = lexer.next_token()?;
    }
    let mut expect_atom = false;
    loop {
        match token {
            None if braced => return Err(lexer.here().error("unclosed `{`".to_string())),
            None if expect_atom => return Err(lexer.here().error("expected an atom".to_string())),
            None => break,
            Some((Token::RBrace, _)) if braced && !expect_atom => {
                if let Some((other, pos)) = lexer.next_token()? {
                    return Err(pos.error(format!("unexpected {other} after `}}`")));
                }
                break;
            }
            Some((Token::Ident(name), pos)) => {
                atoms.insert(lexer.atom(&name, pos)?);
                match lexer.next_token()? {
                    Some((Token::Comma, _)) => {
                        expect_atom = true;
                        token = lexer.next_token()?;
                    }
                    next => {
                        expect_atom = false;
                        token = next;
                        if let Some((Token::Ident(_), pos)) = &token {
                            return Err(pos.error("expected `,` between atoms".to_string()));
                        }
                    }
                }
            }
            Some((other, pos)) => {
                return Err(pos.error(format!("expected an atom, found {other}")));
            }
        }
    }
    Ok(atoms)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Neck,
    Comma,
    Dot,
    LBrace,
    RBrace,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(name) => write!(f, "`{name}`"),
            Token::Neck => f.write_str("`:-`"),
            Token::Comma => f.write_str("`,`"),
            Token::Dot => f.write_str("`.`"),
            Token::LBrace => f.write_str("`{`"),
            Token::RBrace => f.write_str("`}`"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Position {
    line: usize,
    column: usize,
}

impl Position {
    fn error(self, message: String) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message,
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn here(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn atom(&self, name: &str, pos: Position) -> Result<Atom> {
        Atom::new(name).map_err(|_| {
            pos.error(format!(
                "`{name}` is not an atom; atoms match [a-z][A-Za-z0-9_]*"
            ))
        })
    }

    fn expect_token(&mut self, what: &str) -> Result<(Token, Position)> {
        let here = self.here();
        self.next_token()?
            .ok_or_else(|| here.error(format!("expected {what}, found end of input")))
    }

    fn expect_ident(&mut self) -> Result<(String, Position)> {
        match self.expect_token("an atom")? {
            (Token::Ident(name), pos) => Ok((name, pos)),
            (other, pos) => Err(pos.error(format!("expected an atom, found {other}"))),
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, Position)>> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let pos = self.here();
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        let token = match c {
            ',' => Token::Comma,
            '.' => Token::Dot,
            '{' => Token::LBrace,
            '}' => Token::RBrace,
            ':' => match self.bump() {
                Some('-') => Token::Neck,
                _ => return Err(pos.error("expected `:-`".to_string())),
            },
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut name = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Token::Ident(name)
            }
            other => return Err(pos.error(format!("unexpected character `{other}`"))),
        };
        Ok(Some((token, pos)))
    }
}
