use std::fmt;
use std::net::Ipv4Addr;

/// Source position of a node. Zero means "no position" (synthesized nodes).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl Pos {
    pub fn new(line: u32, column: u32) -> Self {
        Pos { line, column }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A competitor category. Categories start at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Category(pub u32);

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProgramAst {
    pub agents: Vec<AgentDecl>,
    pub decls: Vec<VarDecl>,
    pub places: Vec<MeasuringPlace>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentKind {
    /// Operator-entered times read from a file.
    Manual { file: String },
    /// A networked RFID device.
    Auto { address: Ipv4Addr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentDecl {
    pub id: u32,
    pub kind: AgentKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CategoryArm {
    pub category: Category,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    Plain(i64),
    Categorized(Vec<CategoryArm>),
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasuringPlace {
    pub mp_id: u32,
    pub agent_id: u32,
    pub stmts: Vec<Statement>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    Upd,
    Dec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    AlwaysTrue,
    Equals { var: String, value: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub pred: Predicate,
    pub instr: Instr,
    pub target: String,
    pub pos: Pos,
}

impl ProgramAst {
    pub fn place(&self, mp_id: u32) -> Option<&MeasuringPlace> {
        self.places.iter().find(|p| p.mp_id == mp_id)
    }

    /// A copy with every position cleared, for structural comparison.
    pub fn erase_positions(&self) -> ProgramAst {
        let mut ast = self.clone();
        for a in &mut ast.agents {
            a.pos = Pos::default();
        }
        for d in &mut ast.decls {
            d.pos = Pos::default();
        }
        for p in &mut ast.places {
            p.pos = Pos::default();
            for s in &mut p.stmts {
                s.pos = Pos::default();
            }
        }
        ast
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Instr::Upd => "upd",
            Instr::Dec => "dec",
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::AlwaysTrue => f.write_str("true"),
            Predicate::Equals { var, value } => write!(f, "{var} == {value}"),
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) -> {} {};", self.pred, self.instr, self.target)
    }
}

impl fmt::Display for AgentDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AgentKind::Manual { file } => write!(f, "{} manual \"{}\";", self.id, file),
            AgentKind::Auto { address } => write!(f, "{} auto {};", self.id, address),
        }
    }
}

impl fmt::Display for VarDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            VarKind::Plain(v) => write!(f, "var {} := {};", self.name, v),
            VarKind::Dynamic => write!(f, "dynamicvar {};", self.name),
            VarKind::Categorized(arms) => {
                let arms: Vec<String> = arms
                    .iter()
                    .map(|a| format!("(category == {}) -> {}", a.category, a.value))
                    .collect();
                write!(f, "var {} := {{ {} }};", self.name, arms.join(", "))
            }
        }
    }
}

impl fmt::Display for MeasuringPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mp[{}] -> agnt[{}] {{", self.mp_id, self.agent_id)?;
        for s in &self.stmts {
            writeln!(f, "  {s}")?;
        }
        f.write_str("}")
    }
}

/// Canonical source text; reparsing it yields the same AST (modulo
/// positions).
impl fmt::Display for ProgramAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.agents {
            writeln!(f, "{a}")?;
        }
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        for p in &self.places {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}
