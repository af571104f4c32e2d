//! The abstract machine.
//!
//! Every runner gets a copy of the program's variables, initialized from
//! the static state at the runner's category. A crossing event runs the
//! statements of its measuring place, in source order, against the crossing
//! runner's variables.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use thiserror::Error;

use crate::frontend::{Category, Instr, Predicate, ProgramAst};
use crate::semantics::StaticState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "female" => Ok(Gender::Female),
            "male" => Ok(Gender::Male),
            other => Err(format!("gender must be female or male, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Runner {
    pub id: u32,
    pub rfid: String,
    pub last_name: String,
    pub first_name: String,
    pub gender: Gender,
    pub category: Category,
}

/// One runner's variables; `None` is undefined.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunnerVars {
    pub vars: IndexMap<String, Option<i64>>,
}

impl RunnerVars {
    pub fn get(&self, name: &str) -> Option<i64> {
        self.vars.get(name).copied().flatten()
    }
}

/// A tag read at a measuring place.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub mp_id: u32,
    pub rfid: String,
    /// Milliseconds since race-clock zero.
    pub timestamp_ms: u64,
    /// Value supplied by counting devices (missed shots, ...).
    pub payload: Option<u64>,
}

impl Event {
    pub fn new(mp_id: u32, rfid: &str, timestamp_ms: u64) -> Self {
        Event {
            mp_id,
            rfid: rfid.to_string(),
            timestamp_ms,
            payload: None,
        }
    }

    pub fn with_payload(mut self, payload: u64) -> Self {
        self.payload = Some(payload);
        self
    }
}

/// Stable sort by timestamp: simultaneous events keep their input order.
pub fn sort_events(events: &mut [Event]) {
    events.sort_by_key(|e| e.timestamp_ms);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventOutcome {
    /// Indices (within the measuring place) of the statements whose
    /// predicate held.
    Applied { fired: Vec<usize> },
    /// No runner carries this tag.
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub event: Event,
    pub outcome: EventOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuntimeWarning {
    /// A categorized variable has no value for the runner's category.
    UnmappedCategory {
        runner_id: u32,
        category: Category,
        variable: String,
    },
    /// `dec` on an undefined variable did nothing.
    DecOnUndefined {
        event_index: usize,
        rfid: String,
        variable: String,
    },
}

impl fmt::Display for RuntimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuntimeWarning::UnmappedCategory {
                runner_id,
                category,
                variable,
            } => write!(
                f,
                "runner {runner_id}: `{variable}` has no value for category {category}; left undefined"
            ),
            RuntimeWarning::DecOnUndefined {
                event_index,
                rfid,
                variable,
            } => write!(
                f,
                "event {event_index} ({rfid}): dec on undefined `{variable}` ignored"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("rfid `{0}` is assigned to more than one runner")]
    DuplicateRfid(String),
    #[error("runner id {0} is used more than once")]
    DuplicateRunnerId(u32),
    #[error("event {event_index}: measuring place {mp_id} is not defined by the program")]
    UnknownMeasuringPlace { mp_id: u32, event_index: usize },
    #[error("`{0}` is not a program variable")]
    UnknownVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaceState {
    pub roster: Vec<Runner>,
    /// Program variables in declaration order.
    pub variables: Vec<String>,
    pub per_runner: BTreeMap<String, RunnerVars>,
    pub log: Vec<LogEntry>,
    pub warnings: Vec<RuntimeWarning>,
}

/// Instantiates the program's variables for every runner.
///
/// Dynamic variables start undefined. Others take their category map's
/// value at the runner's category; an unmapped category leaves the variable
/// undefined and records a warning.
pub fn init_race(state: &StaticState, roster: &[Runner]) -> Result<RaceState, RuntimeError> {
    let mut ids = HashSet::new();
    let mut per_runner = BTreeMap::new();
    let mut warnings = Vec::new();
    for runner in roster {
        if !ids.insert(runner.id) {
            return Err(RuntimeError::DuplicateRunnerId(runner.id));
        }
        let mut vars = IndexMap::with_capacity(state.len());
        for (name, meta) in &state.env {
            let value = if meta.is_dynamic {
                None
            } else {
                let v = meta.values.get(runner.category);
                if v.is_none() {
                    warnings.push(RuntimeWarning::UnmappedCategory {
                        runner_id: runner.id,
                        category: runner.category,
                        variable: name.clone(),
                    });
                }
                v
            };
            vars.insert(name.clone(), value);
        }
        if per_runner
            .insert(runner.rfid.clone(), RunnerVars { vars })
            .is_some()
        {
            return Err(RuntimeError::DuplicateRfid(runner.rfid.clone()));
        }
    }
    Ok(RaceState {
        roster: roster.to_vec(),
        variables: state.names().map(str::to_string).collect(),
        per_runner,
        log: Vec::new(),
        warnings,
    })
}

/// `true` holds always; `x == n` holds iff `x` is defined and equal to `n`.
pub fn eval_predicate(pred: &Predicate, vars: &RunnerVars) -> bool {
    match pred {
        Predicate::AlwaysTrue => true,
        Predicate::Equals { var, value } => vars.get(var) == Some(*value),
    }
}

fn to_value(v: u64) -> i64 {
    i64::try_from(v).unwrap_or(i64::MAX)
}

impl RaceState {
    pub fn runner(&self, rfid: &str) -> Option<&Runner> {
        self.roster.iter().find(|r| r.rfid == rfid)
    }

    pub fn vars(&self, rfid: &str) -> Option<&RunnerVars> {
        self.per_runner.get(rfid)
    }

    /// Current value of `var` for the runner carrying `rfid`.
    pub fn value(&self, rfid: &str, var: &str) -> Option<i64> {
        self.vars(rfid).and_then(|v| v.get(var))
    }

    /// Applies one event in place. On error the state is unchanged.
    pub fn apply(&mut self, ast: &ProgramAst, ev: &Event) -> Result<(), RuntimeError> {
        let event_index = self.log.len();
        let place = ast
            .place(ev.mp_id)
            .ok_or(RuntimeError::UnknownMeasuringPlace {
                mp_id: ev.mp_id,
                event_index,
            })?;
        let Some(vars) = self.per_runner.get_mut(&ev.rfid) else {
            self.log.push(LogEntry {
                event: ev.clone(),
                outcome: EventOutcome::Unmatched,
            });
            return Ok(());
        };
        if let Some(stmt) = place
            .stmts
            .iter()
            .find(|s| !vars.vars.contains_key(&s.target))
        {
            return Err(RuntimeError::UnknownVariable(stmt.target.clone()));
        }
        let mut fired = Vec::new();
        for (i, stmt) in place.stmts.iter().enumerate() {
            // Guards see writes made by earlier statements of this event.
            if !eval_predicate(&stmt.pred, vars) {
                continue;
            }
            fired.push(i);
            let slot = vars.vars.get_mut(&stmt.target).expect("checked above");
            match stmt.instr {
                Instr::Upd => *slot = Some(to_value(ev.payload.unwrap_or(ev.timestamp_ms))),
                Instr::Dec => match slot {
                    Some(v) => *v -= 1,
                    None => self.warnings.push(RuntimeWarning::DecOnUndefined {
                        event_index,
                        rfid: ev.rfid.clone(),
                        variable: stmt.target.clone(),
                    }),
                },
            }
        }
        self.log.push(LogEntry {
            event: ev.clone(),
            outcome: EventOutcome::Applied { fired },
        });
        Ok(())
    }
}

/// Applies one event, returning the new state.
pub fn apply_event(
    mut race: RaceState,
    ast: &ProgramAst,
    ev: &Event,
) -> Result<RaceState, RuntimeError> {
    race.apply(ast, ev)?;
    Ok(race)
}

/// Applies `events` in order. Callers sort by timestamp first
/// ([`sort_events`]).
pub fn replay(
    race: RaceState,
    ast: &ProgramAst,
    events: &[Event],
) -> Result<RaceState, RuntimeError> {
    events
        .iter()
        .try_fold(race, |race, ev| apply_event(race, ast, ev))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupBy {
    Category,
    Gender,
    CategoryGender,
}

impl FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "category" => Ok(GroupBy::Category),
            "gender" => Ok(GroupBy::Gender),
            "category-gender" | "category_gender" | "categoryxgender" | "category×gender" => {
                Ok(GroupBy::CategoryGender)
            }
            other => Err(format!(
                "unknown grouping `{other}` (expected category, gender or category-gender)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKey {
    Category(Category),
    Gender(Gender),
    CategoryGender(Category, Gender),
}

impl GroupKey {
    fn of(runner: &Runner, by: GroupBy) -> GroupKey {
        match by {
            GroupBy::Category => GroupKey::Category(runner.category),
            GroupBy::Gender => GroupKey::Gender(runner.gender),
            GroupBy::CategoryGender => GroupKey::CategoryGender(runner.category, runner.gender),
        }
    }

    /// File-name-safe label: `cat2`, `female`, `cat2_female`.
    pub fn label(&self) -> String {
        match self {
            GroupKey::Category(c) => format!("cat{c}"),
            GroupKey::Gender(g) => g.to_string(),
            GroupKey::CategoryGender(c, g) => format!("cat{c}_{g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRow {
    /// Position by the ranking variable; `None` when not ranked or when the
    /// runner's value is undefined. Ties share a rank.
    pub rank: Option<u32>,
    pub runner: Runner,
    /// One value per column.
    pub values: Vec<Option<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub group: Option<GroupKey>,
    /// Program variables in declaration order.
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
}

/// Builds result tables: one per group present in the roster (or a single
/// table), rows ascending by `rank_var` with undefined values last and
/// ties broken by runner id.
pub fn results(
    race: &RaceState,
    rank_var: Option<&str>,
    group_by: Option<GroupBy>,
) -> Result<Vec<ResultTable>, RuntimeError> {
    let rank_col = match rank_var {
        Some(v) => Some(
            race.variables
                .iter()
                .position(|c| c == v)
                .ok_or_else(|| RuntimeError::UnknownVariable(v.to_string()))?,
        ),
        None => None,
    };

    let mut groups: BTreeMap<Option<GroupKey>, Vec<ResultRow>> = BTreeMap::new();
    for runner in &race.roster {
        let vars = &race.per_runner[&runner.rfid];
        let values = race.variables.iter().map(|v| vars.get(v)).collect();
        groups
            .entry(group_by.map(|by| GroupKey::of(runner, by)))
            .or_default()
            .push(ResultRow {
                rank: None,
                runner: runner.clone(),
                values,
            });
    }
    if groups.is_empty() && group_by.is_none() {
        groups.insert(None, Vec::new());
    }

    Ok(groups
        .into_iter()
        .map(|(group, mut rows)| {
            match rank_col {
                Some(col) => {
                    rows.sort_by_key(|r| (r.values[col].is_none(), r.values[col], r.runner.id));
                    let mut prev: Option<(i64, u32)> = None;
                    for (i, row) in rows.iter_mut().enumerate() {
                        let Some(v) = row.values[col] else { break };
                        let rank = match prev {
                            Some((pv, pr)) if pv == v => pr,
                            _ => i as u32 + 1,
                        };
                        row.rank = Some(rank);
                        prev = Some((v, rank));
                    }
                }
                None => rows.sort_by_key(|r| r.runner.id),
            }
            ResultTable {
                group,
                columns: race.variables.clone(),
                rows,
            }
        })
        .collect())
}
