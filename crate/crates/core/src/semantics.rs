//! Meaning of declarations, and whole-program static checks.
//!
//! The static state maps every declared variable to a category-indexed
//! initial value plus a flag telling whether the variable is dynamic
//! (written only at run time).

use std::collections::{BTreeMap, HashMap, HashSet};

use indexmap::IndexMap;
use thiserror::Error;

use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::frontend::{Category, Pos, Predicate, ProgramAst, VarDecl, VarKind};

/// Initial value of a variable as a function of the competitor category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoryMap {
    /// Same value for every category.
    Constant(i64),
    /// Explicit per-category values; unmapped categories are undefined.
    Arms(BTreeMap<Category, i64>),
    /// Undefined for every category.
    Undefined,
}

impl CategoryMap {
    pub fn get(&self, category: Category) -> Option<i64> {
        match self {
            CategoryMap::Constant(v) => Some(*v),
            CategoryMap::Arms(arms) => arms.get(&category).copied(),
            CategoryMap::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMeta {
    pub name: String,
    pub values: CategoryMap,
    pub is_dynamic: bool,
}

/// Variable environment in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StaticState {
    pub env: IndexMap<String, VarMeta>,
}

impl StaticState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&VarMeta> {
        self.env.get(name)
    }

    pub fn len(&self) -> usize {
        self.env.len()
    }

    pub fn is_empty(&self) -> bool {
        self.env.is_empty()
    }

    /// Variable names in declaration order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.env.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclError {
    #[error("{pos}: variable `{name}` is already declared")]
    DuplicateDeclaration { name: String, pos: Pos },
}

/// Binds one declaration.
///
/// `var x := a` binds a constant map, `var x := {...}` the listed arms, and
/// `dynamicvar x` the undefined map with the dynamic flag set.
pub fn decl_meaning(decl: &VarDecl, mut state: StaticState) -> Result<StaticState, DeclError> {
    if state.env.contains_key(&decl.name) {
        return Err(DeclError::DuplicateDeclaration {
            name: decl.name.clone(),
            pos: decl.pos,
        });
    }
    let (values, is_dynamic) = match &decl.kind {
        VarKind::Plain(a) => (CategoryMap::Constant(*a), false),
        VarKind::Categorized(arms) => (
            CategoryMap::Arms(arms.iter().map(|a| (a.category, a.value)).collect()),
            false,
        ),
        VarKind::Dynamic => (CategoryMap::Undefined, true),
    };
    state.env.insert(
        decl.name.clone(),
        VarMeta {
            name: decl.name.clone(),
            values,
            is_dynamic,
        },
    );
    Ok(state)
}

/// Binds declarations left to right.
pub fn decl_sequence(decls: &[VarDecl], state: StaticState) -> Result<StaticState, DeclError> {
    decls.iter().try_fold(state, |s, d| decl_meaning(d, s))
}

/// Whole-program analysis without knowledge of the roster.
pub fn analyze(ast: &ProgramAst) -> (StaticState, Vec<Diagnostic>) {
    analyze_with_categories(ast, &[])
}

/// Whole-program analysis. `categories` are the categories present in the
/// roster, when known; they enable the unmapped-category warning.
pub fn analyze_with_categories(
    ast: &ProgramAst,
    categories: &[Category],
) -> (StaticState, Vec<Diagnostic>) {
    let mut diags = Vec::new();

    let mut state = StaticState::new();
    for decl in &ast.decls {
        state = match decl_meaning(decl, state.clone()) {
            Ok(next) => next,
            Err(DeclError::DuplicateDeclaration { .. }) => {
                diags.push(Diagnostic::error(
                    "DuplicateDeclaration",
                    decl.pos,
                    format!("variable `{}` is already declared", decl.name),
                ));
                state
            }
        };
    }

    let mut agents = HashSet::new();
    for agent in &ast.agents {
        if !agents.insert(agent.id) {
            diags.push(Diagnostic::error(
                "DuplicateAgent",
                agent.pos,
                format!("agent {} is declared more than once", agent.id),
            ));
        }
    }

    let mut places = HashSet::new();
    let mut used: HashSet<&str> = HashSet::new();
    let mut targeted: HashMap<&str, Pos> = HashMap::new();
    for place in &ast.places {
        if !places.insert(place.mp_id) {
            diags.push(Diagnostic::error(
                "DuplicateMeasuringPlace",
                place.pos,
                format!("measuring place {} is defined more than once", place.mp_id),
            ));
        }
        if !agents.contains(&place.agent_id) {
            diags.push(Diagnostic::error(
                "UnknownAgent",
                place.pos,
                format!(
                    "measuring place {} refers to undeclared agent {}",
                    place.mp_id, place.agent_id
                ),
            ));
        }
        for stmt in &place.stmts {
            if let Predicate::Equals { var, .. } = &stmt.pred {
                used.insert(var);
                if state.get(var).is_none() {
                    diags.push(Diagnostic::error(
                        "UndeclaredVariable",
                        stmt.pos,
                        format!("predicate tests undeclared variable `{var}`"),
                    ));
                }
            }
            used.insert(&stmt.target);
            if state.get(&stmt.target).is_none() {
                diags.push(Diagnostic::error(
                    "UndeclaredVariable",
                    stmt.pos,
                    format!(
                        "`{}` targets undeclared variable `{}`",
                        stmt.instr, stmt.target
                    ),
                ));
            } else {
                targeted.entry(&stmt.target).or_insert(stmt.pos);
            }
        }
    }

    for decl in &ast.decls {
        if !used.contains(decl.name.as_str()) {
            diags.push(Diagnostic::warning(
                "UnusedVariable",
                decl.pos,
                format!("variable `{}` is never used", decl.name),
            ));
        }
        if let (VarKind::Categorized(arms), Some(pos)) =
            (&decl.kind, targeted.get(decl.name.as_str()))
        {
            let mut missing: Vec<Category> = categories
                .iter()
                .filter(|c| !arms.iter().any(|a| a.category == **c))
                .copied()
                .collect();
            missing.sort();
            missing.dedup();
            if !missing.is_empty() {
                let list: Vec<String> = missing.iter().map(Category::to_string).collect();
                diags.push(Diagnostic::warning(
                    "UnmappedCategory",
                    *pos,
                    format!(
                        "`{}` has no value for categories {}; those runners start undefined",
                        decl.name,
                        list.join(", ")
                    ),
                ));
            }
        }
    }

    sort_diagnostics(&mut diags);
    (state, diags)
}
