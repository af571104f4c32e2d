//! Action-key handlers that turn a parse tree into a [`ProgramAst`].
//!
//! Evaluation is bottom-up: every child node is evaluated first and the
//! handler for the parent's action key receives the child values and tokens
//! positionally, in right-hand-side order.

use std::collections::HashMap;
use std::net::Ipv4Addr;

use thiserror::Error;

use super::ast::*;
use super::lexer::Token;
use super::parser::{ParseChild, ParseNode};

/// Synthesized value of one parse node.
#[derive(Debug, Clone, PartialEq)]
pub enum SemValue {
    Program(ProgramAst),
    Agents(Vec<AgentDecl>),
    Agent(AgentDecl),
    Decls(Vec<VarDecl>),
    Decl(VarDecl),
    Arms(Vec<CategoryArm>),
    Places(Vec<MeasuringPlace>),
    Place(MeasuringPlace),
    Stmts(Vec<Statement>),
    Stmt(Statement),
    Instr(Instr),
    Pred(Predicate),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ActionError {
    pub line: u32,
    pub column: u32,
    pub action_key: String,
    pub message: String,
}

enum Slot<'t> {
    Token(&'t Token),
    Value(Option<SemValue>),
}

/// Positional access to a production's evaluated children.
pub struct ActionArgs<'t> {
    pos: Pos,
    slots: Vec<Slot<'t>>,
}

impl<'t> ActionArgs<'t> {
    pub fn pos(&self) -> Pos {
        self.pos
    }

    pub fn token(&self, i: usize) -> Result<&'t Token, String> {
        match self.slots.get(i) {
            Some(Slot::Token(t)) => Ok(t),
            _ => Err(format!("child {i} is not a token")),
        }
    }

    pub fn text(&self, i: usize) -> Result<String, String> {
        self.token(i).map(|t| t.text.clone())
    }

    pub fn int(&self, i: usize) -> Result<i64, String> {
        let tok = self.token(i)?;
        tok.text
            .parse()
            .map_err(|_| format!("integer literal {} is out of range", tok.text))
    }

    /// An identifier-like integer: an agent, place or category id.
    pub fn id(&self, i: usize) -> Result<u32, String> {
        let tok = self.token(i)?;
        tok.text
            .parse()
            .map_err(|_| format!("id {} is out of range", tok.text))
    }

    pub fn take(&mut self, i: usize) -> Result<SemValue, String> {
        match self.slots.get_mut(i) {
            Some(Slot::Value(v)) => v.take().ok_or_else(|| format!("child {i} already taken")),
            _ => Err(format!("child {i} is not a nonterminal")),
        }
    }
}

macro_rules! take_as {
    ($args:expr, $i:expr, $variant:ident) => {
        match $args.take($i)? {
            SemValue::$variant(v) => v,
            other => {
                return Err(format!(
                    "child {} should be {}, got {:?}",
                    $i,
                    stringify!($variant),
                    other
                ))
            }
        }
    };
}

pub type Action = fn(&mut ActionArgs<'_>) -> Result<SemValue, String>;

/// Maps action keys to handlers.
#[derive(Clone, Default)]
pub struct ActionRegistry {
    handlers: HashMap<String, Action>,
}

impl ActionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, key: &str, action: Action) -> &mut Self {
        self.handlers.insert(key.to_string(), action);
        self
    }

    pub fn contains(&self, key: &str) -> bool {
        self.handlers.contains_key(key)
    }

    /// Handlers for every action key used by the base language and the
    /// EasyTime++ extension.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register("start", |a| {
            Ok(SemValue::Program(ProgramAst {
                agents: take_as!(a, 0, Agents),
                decls: take_as!(a, 1, Decls),
                places: take_as!(a, 2, Places),
            }))
        })
        .register("agents.cons", |a| {
            let head = take_as!(a, 0, Agent);
            let mut tail = take_as!(a, 1, Agents);
            tail.insert(0, head);
            Ok(SemValue::Agents(tail))
        })
        .register("agents.nil", |_| Ok(SemValue::Agents(Vec::new())))
        .register("agent.manual", |a| {
            let quoted = a.text(2)?;
            let file = quoted.trim_matches('"').to_string();
            Ok(SemValue::Agent(AgentDecl {
                id: positive_id(a, 0, "agent")?,
                kind: AgentKind::Manual { file },
                pos: a.pos(),
            }))
        })
        .register("agent.auto", |a| {
            let text = a.text(2)?;
            let address: Ipv4Addr = text
                .parse()
                .map_err(|_| format!("{text} is not a valid IPv4 address"))?;
            Ok(SemValue::Agent(AgentDecl {
                id: positive_id(a, 0, "agent")?,
                kind: AgentKind::Auto { address },
                pos: a.pos(),
            }))
        })
        .register("decs.cons", |a| {
            let head = take_as!(a, 0, Decl);
            let mut tail = take_as!(a, 1, Decls);
            tail.insert(0, head);
            Ok(SemValue::Decls(tail))
        })
        .register("decs.nil", |_| Ok(SemValue::Decls(Vec::new())))
        .register("dec.var", plain_decl)
        .register("dec.plain", plain_decl)
        .register("dec.dynamic", |a| {
            Ok(SemValue::Decl(VarDecl {
                name: a.text(1)?,
                kind: VarKind::Dynamic,
                pos: a.pos(),
            }))
        })
        .register("dec.categorized", |a| {
            Ok(SemValue::Decl(VarDecl {
                name: a.text(1)?,
                kind: VarKind::Categorized(take_as!(a, 4, Arms)),
                pos: a.pos(),
            }))
        })
        .register("ctgrs.cons", |a| {
            let head = category_arm(a)?;
            let mut tail = take_as!(a, 8, Arms);
            if tail.iter().any(|arm| arm.category == head.category) {
                return Err(format!(
                    "category {} is mapped more than once",
                    head.category
                ));
            }
            tail.insert(0, head);
            Ok(SemValue::Arms(tail))
        })
        .register("ctgrs.single", |a| {
            Ok(SemValue::Arms(vec![category_arm(a)?]))
        })
        .register("mps.cons", |a| {
            let head = take_as!(a, 0, Place);
            let mut tail = take_as!(a, 1, Places);
            tail.insert(0, head);
            Ok(SemValue::Places(tail))
        })
        .register("mps.nil", |_| Ok(SemValue::Places(Vec::new())))
        .register("mp", |a| {
            Ok(SemValue::Place(MeasuringPlace {
                mp_id: positive_id(a, 2, "measuring place")?,
                agent_id: positive_id(a, 7, "agent")?,
                stmts: take_as!(a, 10, Stmts),
                pos: a.pos(),
            }))
        })
        .register("stmts.cons", |a| {
            let head = take_as!(a, 0, Stmt);
            let mut tail = take_as!(a, 1, Stmts);
            tail.insert(0, head);
            Ok(SemValue::Stmts(tail))
        })
        .register("stmts.single", |a| {
            Ok(SemValue::Stmts(vec![take_as!(a, 0, Stmt)]))
        })
        .register("stmt", |a| {
            Ok(SemValue::Stmt(Statement {
                pred: take_as!(a, 1, Pred),
                instr: take_as!(a, 4, Instr),
                target: a.text(5)?,
                pos: a.pos(),
            }))
        })
        .register("instr.upd", |_| Ok(SemValue::Instr(Instr::Upd)))
        .register("instr.dec", |_| Ok(SemValue::Instr(Instr::Dec)))
        .register("pred.true", |_| Ok(SemValue::Pred(Predicate::AlwaysTrue)))
        .register("pred.equals", |a| {
            Ok(SemValue::Pred(Predicate::Equals {
                var: a.text(0)?,
                value: a.int(2)?,
            }))
        });
        r
    }

    /// Evaluates `node` bottom-up.
    pub fn evaluate(&self, node: &ParseNode) -> Result<SemValue, ActionError> {
        let fail = |message: String| ActionError {
            line: node.line,
            column: node.column,
            action_key: node.action_key.clone(),
            message,
        };
        let handler = self
            .handlers
            .get(&node.action_key)
            .ok_or_else(|| fail(format!("no handler bound to action `{}`", node.action_key)))?;
        let mut slots = Vec::with_capacity(node.children.len());
        for child in &node.children {
            slots.push(match child {
                ParseChild::Token(t) => Slot::Token(t),
                ParseChild::Node(n) => Slot::Value(Some(self.evaluate(n)?)),
            });
        }
        let mut args = ActionArgs {
            pos: Pos::new(node.line, node.column),
            slots,
        };
        handler(&mut args).map_err(fail)
    }

    /// Evaluates a whole-program parse tree.
    pub fn build_program(&self, root: &ParseNode) -> Result<ProgramAst, ActionError> {
        match self.evaluate(root)? {
            SemValue::Program(p) => Ok(p),
            other => Err(ActionError {
                line: root.line,
                column: root.column,
                action_key: root.action_key.clone(),
                message: format!("start symbol produced {other:?}, not a program"),
            }),
        }
    }
}

fn plain_decl(a: &mut ActionArgs<'_>) -> Result<SemValue, String> {
    Ok(SemValue::Decl(VarDecl {
        name: a.text(1)?,
        kind: VarKind::Plain(a.int(3)?),
        pos: a.pos(),
    }))
}

// ( category == #Int ) -> #Int
fn category_arm(a: &ActionArgs<'_>) -> Result<CategoryArm, String> {
    Ok(CategoryArm {
        category: Category(a.id(3)?),
        value: a.int(6)?,
    })
}

fn positive_id(a: &ActionArgs<'_>, i: usize, what: &str) -> Result<u32, String> {
    match a.id(i)? {
        0 => Err(format!("{what} id must be at least 1")),
        id => Ok(id),
    }
}
