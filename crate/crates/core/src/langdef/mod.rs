//! Language definitions as plain data, and their composition.
//!
//! A [`LanguageDef`] is a lexicon plus named groups of productions. A
//! [`LanguageFragment`] is a list of modifications (`add`, `extends`,
//! `overrides`) against one or more base definitions; [`compose_language`]
//! applies a fragment to its bases and returns a new definition, leaving the
//! bases untouched.
//!
//! Productions carry an action key instead of code. The frontend resolves
//! action keys through a handler registry when it builds the AST.

mod builtin;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use regex::Regex;
use thiserror::Error;

use crate::frontend::{Frontend, FrontendError, Lexer, ProgramAst};

pub use builtin::{easy_time_base, easy_time_plus_plus_fragment};

/// One lexical rule: a named regular expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexRule {
    pub name: String,
    pub pattern: String,
    /// Lower wins among equal-length matches.
    pub priority: u32,
    /// Matched text is emitted as a token but ignored by the parser
    /// (whitespace, comments).
    pub skip: bool,
}

impl LexRule {
    pub fn new(name: &str, pattern: &str, priority: u32) -> Self {
        LexRule {
            name: name.to_string(),
            pattern: pattern.to_string(),
            priority,
            skip: false,
        }
    }

    pub fn skipped(name: &str, pattern: &str, priority: u32) -> Self {
        LexRule {
            skip: true,
            ..LexRule::new(name, pattern, priority)
        }
    }
}

/// A right-hand-side grammar symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// Another production's left-hand side.
    NonTerminal(String),
    /// Any token produced by the named lexical rule (`#Int`).
    Token(String),
    /// A token with exactly this text, classified by the lexicon like any
    /// other lexeme (`var`, `;`).
    Literal(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::NonTerminal(n) => write!(f, "{n}"),
            Symbol::Token(t) => write!(f, "#{t}"),
            Symbol::Literal(l) => write!(f, "'{l}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
    pub action_key: String,
}

impl Production {
    pub fn new(lhs: &str, rhs: Vec<Symbol>, action_key: &str) -> Self {
        Production {
            lhs: lhs.to_string(),
            rhs,
            action_key: action_key.to_string(),
        }
    }

    /// Builds a production from a whitespace-separated right-hand side:
    /// `#Name` is a token reference, an all-uppercase word is a
    /// nonterminal, anything else is a literal.
    pub fn from_words(lhs: &str, rhs: &str, action_key: &str) -> Self {
        let rhs = rhs
            .split_whitespace()
            .map(|w| {
                if let Some(tok) = w.strip_prefix('#') {
                    Symbol::Token(tok.to_string())
                } else if w.chars().all(|c| c.is_ascii_uppercase() || c == '_') {
                    Symbol::NonTerminal(w.to_string())
                } else {
                    Symbol::Literal(w.to_string())
                }
            })
            .collect();
        Production::new(lhs, rhs, action_key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleGroup {
    pub name: String,
    pub productions: Vec<Production>,
}

impl RuleGroup {
    pub fn new(name: &str, productions: Vec<Production>) -> Self {
        RuleGroup {
            name: name.to_string(),
            productions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModifierKind {
    Add,
    Extends,
    Overrides,
}

impl fmt::Display for ModifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModifierKind::Add => "add",
            ModifierKind::Extends => "extends",
            ModifierKind::Overrides => "overrides",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modifier {
    pub kind: ModifierKind,
    pub target_name: String,
}

impl Modifier {
    pub fn new(kind: ModifierKind, target_name: &str) -> Self {
        Modifier {
            kind,
            target_name: target_name.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageDef {
    pub name: String,
    pub lexicon: Vec<LexRule>,
    pub rule_groups: BTreeMap<String, RuleGroup>,
    pub start_symbol: String,
}

impl LanguageDef {
    pub fn lex_rule(&self, name: &str) -> Option<&LexRule> {
        self.lexicon.iter().find(|r| r.name == name)
    }

    /// All productions, grouped in group-name order.
    pub fn productions(&self) -> impl Iterator<Item = &Production> {
        self.rule_groups.values().flat_map(|g| g.productions.iter())
    }

    /// Renders the definition in the line-oriented documentation format:
    /// `lexicon <name> ::= /<regex>/` and
    /// `rule <group> : <lhs> ::= <symbols> => <actionKey>`.
    pub fn to_definition_text(&self) -> String {
        let mut out = String::new();
        for rule in &self.lexicon {
            out.push_str(&format!(
                "lexicon {} ::= /{}/\n",
                rule.name,
                rule.pattern.replace('/', "\\/")
            ));
        }
        for group in self.rule_groups.values() {
            for p in &group.productions {
                let symbols: Vec<String> = p.rhs.iter().map(Symbol::to_string).collect();
                out.push_str(&format!(
                    "rule {} : {} ::= {} => {}\n",
                    group.name,
                    p.lhs,
                    symbols.join(" "),
                    p.action_key
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexMod {
    pub modifier: Modifier,
    pub rule: LexRule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMod {
    pub modifier: Modifier,
    pub group: RuleGroup,
}

/// A set of modifications against base definitions. Usually not a complete
/// language on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageFragment {
    pub name: String,
    pub lexicon_mods: Vec<LexMod>,
    pub rule_mods: Vec<RuleMod>,
}

impl LanguageFragment {
    pub fn empty(name: &str) -> Self {
        LanguageFragment {
            name: name.to_string(),
            lexicon_mods: Vec::new(),
            rule_mods: Vec::new(),
        }
    }

    pub fn lex(mut self, kind: ModifierKind, rule: LexRule) -> Self {
        self.lexicon_mods.push(LexMod {
            modifier: Modifier::new(kind, &rule.name),
            rule,
        });
        self
    }

    pub fn rules(mut self, kind: ModifierKind, group: RuleGroup) -> Self {
        self.rule_mods.push(RuleMod {
            modifier: Modifier::new(kind, &group.name),
            group,
        });
        self
    }

    /// Interprets the fragment as if it were a whole language, taking the
    /// first production's lhs as start symbol.
    pub fn as_standalone(&self) -> LanguageDef {
        let rule_groups = self
            .rule_mods
            .iter()
            .map(|m| (m.group.name.clone(), m.group.clone()))
            .collect::<BTreeMap<_, _>>();
        let start_symbol = self
            .rule_mods
            .iter()
            .flat_map(|m| m.group.productions.first())
            .map(|p| p.lhs.clone())
            .next()
            .unwrap_or_default();
        LanguageDef {
            name: self.name.clone(),
            lexicon: self.lexicon_mods.iter().map(|m| m.rule.clone()).collect(),
            rule_groups,
            start_symbol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("no base language given")]
    NoBases,
    #[error("{kind} target `{target}` does not exist in any base")]
    UnknownTarget { kind: ModifierKind, target: String },
    #[error("add target `{target}` already exists")]
    DuplicateTarget { target: String },
    #[error("`{name}` is defined by both `{first}` and `{second}` and the fragment does not override it")]
    ConflictingBases {
        name: String,
        first: String,
        second: String,
    },
}

/// Applies `fragment` to `bases` and returns the composed language.
///
/// `extends` on a lexical rule adds the fragment pattern as a new
/// alternation branch; on a rule group it appends productions. `overrides`
/// replaces the target wholesale; `add` inserts a new rule or group.
pub fn compose_language(
    bases: &[LanguageDef],
    fragment: &LanguageFragment,
) -> Result<LanguageDef, ComposeError> {
    let last = bases.last().ok_or(ComposeError::NoBases)?;

    let overridden_lex: HashSet<&str> = fragment
        .lexicon_mods
        .iter()
        .filter(|m| m.modifier.kind == ModifierKind::Overrides)
        .map(|m| m.modifier.target_name.as_str())
        .collect();
    let overridden_groups: HashSet<&str> = fragment
        .rule_mods
        .iter()
        .filter(|m| m.modifier.kind == ModifierKind::Overrides)
        .map(|m| m.modifier.target_name.as_str())
        .collect();

    // Union of the bases. A name owned by two bases is a conflict unless the
    // fragment overrides it, in which case the later base's copy is kept
    // (and then replaced anyway).
    let mut lexicon: Vec<LexRule> = Vec::new();
    let mut lex_owner: HashMap<String, &str> = HashMap::new();
    let mut rule_groups: BTreeMap<String, RuleGroup> = BTreeMap::new();
    let mut group_owner: HashMap<String, &str> = HashMap::new();

    for base in bases {
        for rule in &base.lexicon {
            match lex_owner.get(&rule.name) {
                Some(first) if !overridden_lex.contains(rule.name.as_str()) => {
                    return Err(ComposeError::ConflictingBases {
                        name: rule.name.clone(),
                        first: first.to_string(),
                        second: base.name.clone(),
                    });
                }
                Some(_) => {
                    let slot = lexicon.iter_mut().find(|r| r.name == rule.name);
                    *slot.expect("owner recorded") = rule.clone();
                }
                None => lexicon.push(rule.clone()),
            }
            lex_owner.insert(rule.name.clone(), &base.name);
        }
        for (name, group) in &base.rule_groups {
            if let Some(first) = group_owner.get(name) {
                if !overridden_groups.contains(name.as_str()) {
                    return Err(ComposeError::ConflictingBases {
                        name: name.clone(),
                        first: first.to_string(),
                        second: base.name.clone(),
                    });
                }
            }
            rule_groups.insert(name.clone(), group.clone());
            group_owner.insert(name.clone(), &base.name);
        }
    }

    for m in &fragment.lexicon_mods {
        let target = &m.modifier.target_name;
        let existing = lexicon.iter_mut().find(|r| &r.name == target);
        match (m.modifier.kind, existing) {
            (ModifierKind::Add, Some(_)) => {
                return Err(ComposeError::DuplicateTarget {
                    target: target.clone(),
                })
            }
            (ModifierKind::Add, None) => lexicon.push(m.rule.clone()),
            (ModifierKind::Extends, Some(rule)) => {
                rule.pattern = format!("(?:{})|(?:{})", rule.pattern, m.rule.pattern);
            }
            (ModifierKind::Overrides, Some(rule)) => {
                *rule = LexRule {
                    name: target.clone(),
                    ..m.rule.clone()
                };
            }
            (kind, None) => {
                return Err(ComposeError::UnknownTarget {
                    kind,
                    target: target.clone(),
                })
            }
        }
    }

    for m in &fragment.rule_mods {
        let target = &m.modifier.target_name;
        match (m.modifier.kind, rule_groups.get_mut(target)) {
            (ModifierKind::Add, Some(_)) => {
                return Err(ComposeError::DuplicateTarget {
                    target: target.clone(),
                })
            }
            (ModifierKind::Add, None) => {
                rule_groups.insert(target.clone(), m.group.clone());
            }
            (ModifierKind::Extends, Some(group)) => {
                group
                    .productions
                    .extend(m.group.productions.iter().cloned());
            }
            (ModifierKind::Overrides, Some(group)) => {
                group.productions = m.group.productions.clone();
            }
            (kind, None) => {
                return Err(ComposeError::UnknownTarget {
                    kind,
                    target: target.clone(),
                })
            }
        }
    }

    Ok(LanguageDef {
        name: fragment.name.clone(),
        lexicon,
        rule_groups,
        start_symbol: last.start_symbol.clone(),
    })
}

/// A well-formedness problem in a [`LanguageDef`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LangDiagnostic {
    UndefinedSymbol {
        group: String,
        lhs: String,
        symbol: String,
    },
    /// A literal terminal that the lexicon does not turn into exactly one
    /// token.
    UnlexableLiteral {
        group: String,
        lhs: String,
        literal: String,
    },
    MissingStart {
        symbol: String,
    },
    BadPattern {
        rule: String,
        error: String,
    },
    DuplicateLexRule {
        rule: String,
    },
    DuplicateActionKey {
        key: String,
        groups: Vec<String>,
    },
}

impl LangDiagnostic {
    pub fn code(&self) -> &'static str {
        match self {
            LangDiagnostic::UndefinedSymbol { .. } => "UndefinedSymbol",
            LangDiagnostic::UnlexableLiteral { .. } => "UnlexableLiteral",
            LangDiagnostic::MissingStart { .. } => "MissingStart",
            LangDiagnostic::BadPattern { .. } => "BadPattern",
            LangDiagnostic::DuplicateLexRule { .. } => "DuplicateLexRule",
            LangDiagnostic::DuplicateActionKey { .. } => "DuplicateActionKey",
        }
    }
}

impl fmt::Display for LangDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LangDiagnostic::UndefinedSymbol { group, lhs, symbol } => write!(
                f,
                "rule {group}: production for {lhs} references undefined symbol {symbol}"
            ),
            LangDiagnostic::UnlexableLiteral {
                group,
                lhs,
                literal,
            } => write!(
                f,
                "rule {group}: literal '{literal}' in production for {lhs} is not a single token"
            ),
            LangDiagnostic::MissingStart { symbol } => {
                write!(f, "start symbol `{symbol}` has no production")
            }
            LangDiagnostic::BadPattern { rule, error } => {
                write!(f, "lexicon {rule}: invalid pattern: {error}")
            }
            LangDiagnostic::DuplicateLexRule { rule } => {
                write!(f, "lexicon {rule} is defined more than once")
            }
            LangDiagnostic::DuplicateActionKey { key, groups } => {
                write!(
                    f,
                    "action key `{key}` used more than once (groups {})",
                    groups.join(", ")
                )
            }
        }
    }
}

/// Checks that `def` is a complete, usable language. Returns one diagnostic
/// per violation; an empty list means well-formed.
pub fn validate_language(def: &LanguageDef) -> Vec<LangDiagnostic> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    let mut patterns_ok = true;
    for rule in &def.lexicon {
        if !seen.insert(rule.name.as_str()) {
            out.push(LangDiagnostic::DuplicateLexRule {
                rule: rule.name.clone(),
            });
        }
        if let Err(e) = Regex::new(&rule.pattern) {
            patterns_ok = false;
            out.push(LangDiagnostic::BadPattern {
                rule: rule.name.clone(),
                error: e.to_string(),
            });
        }
    }
    let lexer = if patterns_ok {
        Lexer::new(&def.lexicon).ok()
    } else {
        None
    };

    let defined: HashSet<&str> = def.productions().map(|p| p.lhs.as_str()).collect();
    if !defined.contains(def.start_symbol.as_str()) {
        out.push(LangDiagnostic::MissingStart {
            symbol: def.start_symbol.clone(),
        });
    }

    let mut literal_ok: HashMap<&str, bool> = HashMap::new();
    for group in def.rule_groups.values() {
        for p in &group.productions {
            for sym in &p.rhs {
                match sym {
                    Symbol::NonTerminal(n) if !defined.contains(n.as_str()) => {
                        out.push(LangDiagnostic::UndefinedSymbol {
                            group: group.name.clone(),
                            lhs: p.lhs.clone(),
                            symbol: n.clone(),
                        })
                    }
                    Symbol::Token(t) if !seen.contains(t.as_str()) => {
                        out.push(LangDiagnostic::UndefinedSymbol {
                            group: group.name.clone(),
                            lhs: p.lhs.clone(),
                            symbol: format!("#{t}"),
                        })
                    }
                    Symbol::Literal(l) => {
                        let Some(lexer) = &lexer else { continue };
                        let ok = *literal_ok
                            .entry(l.as_str())
                            .or_insert_with(|| lexer.classify(l).is_some());
                        if !ok {
                            out.push(LangDiagnostic::UnlexableLiteral {
                                group: group.name.clone(),
                                lhs: p.lhs.clone(),
                                literal: l.clone(),
                            });
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    let mut keys: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for group in def.rule_groups.values() {
        for p in &group.productions {
            keys.entry(p.action_key.as_str())
                .or_default()
                .push(group.name.clone());
        }
    }
    for (key, groups) in keys {
        if groups.len() > 1 {
            out.push(LangDiagnostic::DuplicateActionKey {
                key: key.to_string(),
                groups,
            });
        }
    }

    out
}

/// The two shipped languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Dialect {
    EasyTime,
    #[default]
    EasyTimePlusPlus,
}

impl Dialect {
    pub fn language(self) -> LanguageDef {
        match self {
            Dialect::EasyTime => easy_time_base(),
            Dialect::EasyTimePlusPlus => {
                compose_language(&[easy_time_base()], &easy_time_plus_plus_fragment())
                    .expect("built-in fragment composes with the built-in base")
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dialect::EasyTime => "easytime",
            Dialect::EasyTimePlusPlus => "easytime++",
        }
    }

    /// Tokenizes and parses `source` in this dialect.
    pub fn parse(self, source: &str) -> Result<ProgramAst, FrontendError> {
        let lang = self.language();
        Frontend::new(&lang)?.parse_source(source)
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "easytime" => Ok(Dialect::EasyTime),
            "easytime++" | "easytimepp" => Ok(Dialect::EasyTimePlusPlus),
            other => Err(format!(
                "unknown dialect `{other}` (expected easytime or easytime++)"
            )),
        }
    }
}
