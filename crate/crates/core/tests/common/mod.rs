//! Shared generators and helpers for the integration and acceptance tests.
#![allow(dead_code)]

use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Barrier, Mutex};
use std::thread;

use easytime::agents_io::{
    format_event_line, listen_auto, load_runners, read_event_log, write_table,
};
use easytime::frontend::{
    AgentDecl, AgentKind, Category, CategoryArm, Instr, MeasuringPlace, Pos, Predicate, ProgramAst,
    Statement, VarDecl, VarKind,
};
use easytime::runtime::{
    init_race, replay, results, sort_events, Event, GroupBy, RaceState, Runner,
};
use easytime::semantics::StaticState;
use easytime::{compile, Dialect};
use proptest::collection::{btree_map, vec};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub const EXAMPLE_PROGRAMS: [&str; 4] = [
    "ironman.ez",
    "declarations.ez",
    "cyclocross.ez",
    "biathlon.ez",
];

// Identifiers start upper-case so they never collide with keywords.
fn ident() -> impl Strategy<Value = String> {
    "[A-Z][A-Za-z0-9]{0,7}"
}

fn value() -> impl Strategy<Value = i64> {
    prop_oneof![0i64..100, 0i64..=i64::MAX]
}

fn var_kind() -> impl Strategy<Value = VarKind> {
    prop_oneof![
        value().prop_map(VarKind::Plain),
        Just(VarKind::Dynamic),
        btree_map(0u32..20, value(), 1..5).prop_map(|arms| {
            VarKind::Categorized(
                arms.into_iter()
                    .map(|(c, value)| CategoryArm {
                        category: Category(c),
                        value,
                    })
                    .collect(),
            )
        }),
    ]
}

fn var_decl_named(name: String) -> impl Strategy<Value = VarDecl> {
    var_kind().prop_map(move |kind| VarDecl {
        name: name.clone(),
        kind,
        pos: Pos::default(),
    })
}

/// Declarations with pairwise distinct names.
pub fn decl_list(max: usize) -> impl Strategy<Value = Vec<VarDecl>> {
    proptest::collection::btree_set(ident(), 0..=max)
        .prop_flat_map(|names| names.into_iter().map(var_decl_named).collect::<Vec<_>>())
}

/// Three declaration lists sharing no name: an initial list and the two
/// halves of a sequence.
pub fn disjoint_decl_lists() -> impl Strategy<Value = (Vec<VarDecl>, Vec<VarDecl>, Vec<VarDecl>)> {
    (decl_list(18), 0usize..=18, 0usize..=18).prop_map(|(all, a, b)| {
        let a = a.min(all.len());
        let b = b.min(all.len() - a);
        let (init, rest) = all.split_at(a);
        let (d1, d2) = rest.split_at(b);
        (init.to_vec(), d1.to_vec(), d2.to_vec())
    })
}

fn agent() -> impl Strategy<Value = AgentDecl> {
    let kind = prop_oneof![
        "[a-z0-9._ -]{0,12}".prop_map(|file| AgentKind::Manual { file }),
        any::<[u8; 4]>().prop_map(|o| AgentKind::Auto { address: o.into() }),
    ];
    (1u32..1000, kind).prop_map(|(id, kind)| AgentDecl {
        id,
        kind,
        pos: Pos::default(),
    })
}

fn statement() -> impl Strategy<Value = Statement> {
    let pred = prop_oneof![
        Just(Predicate::AlwaysTrue),
        (ident(), value()).prop_map(|(var, value)| Predicate::Equals { var, value }),
    ];
    let instr = prop_oneof![Just(Instr::Upd), Just(Instr::Dec)];
    (pred, instr, ident()).prop_map(|(pred, instr, target)| Statement {
        pred,
        instr,
        target,
        pos: Pos::default(),
    })
}

fn place() -> impl Strategy<Value = MeasuringPlace> {
    (1u32..100, 1u32..100, vec(statement(), 1..6)).prop_map(|(mp_id, agent_id, stmts)| {
        MeasuringPlace {
            mp_id,
            agent_id,
            stmts,
            pos: Pos::default(),
        }
    })
}

/// Syntactically valid EasyTime++ programs. They need not be semantically
/// sound (undeclared variables and the like are fine for the parser).
pub fn program() -> impl Strategy<Value = ProgramAst> {
    (vec(agent(), 0..4), decl_list(8), vec(place(), 0..5)).prop_map(|(agents, decls, places)| {
        ProgramAst {
            agents,
            decls,
            places,
        }
    })
}

/// Order-sensitive structural equality of environments.
pub fn env_entries(state: &StaticState) -> Vec<(String, easytime::semantics::VarMeta)> {
    state
        .env
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

pub struct Scenario {
    pub ast: ProgramAst,
    pub initial: RaceState,
}

impl Scenario {
    pub fn load(program: &str, runners: &str) -> Scenario {
        let compiled = compile(&fixture_text(program), Dialect::EasyTimePlusPlus).unwrap();
        let roster = load_runners(fixture(runners)).unwrap();
        Scenario::new(compiled.ast, &compiled.state, &roster)
    }

    pub fn new(ast: ProgramAst, state: &StaticState, roster: &[Runner]) -> Scenario {
        let initial = init_race(state, roster).unwrap();
        Scenario { ast, initial }
    }

    pub fn replay(&self, events: &[Event]) -> RaceState {
        let mut events = events.to_vec();
        sort_events(&mut events);
        replay(self.initial.clone(), &self.ast, &events).unwrap()
    }
}

pub fn events(name: &str) -> Vec<Event> {
    read_event_log(fixture(name)).unwrap()
}

/// Result CSVs as bytes, in table order.
pub fn result_csvs(race: &RaceState, rank: Option<&str>, group: Option<GroupBy>) -> Vec<Vec<u8>> {
    results(race, rank, group)
        .unwrap()
        .iter()
        .map(|t| {
            let mut buf = Vec::new();
            write_table(t, &mut buf).unwrap();
            buf
        })
        .collect()
}

/// Sends `events` to a fresh listener over `connections` concurrent
/// clients (client i gets every event whose index is i modulo the count)
/// and returns what the listener delivered, in arrival order.
pub fn stream_events(events: &[Event], connections: usize) -> Vec<Event> {
    let seen = Arc::new(Mutex::new(Vec::new()));
    let sink_seen = Arc::clone(&seen);
    let listener =
        listen_auto("127.0.0.1:0", move |ev| sink_seen.lock().unwrap().push(ev)).unwrap();
    let addr = listener.local_addr();

    let start = Arc::new(Barrier::new(connections));
    let clients: Vec<_> = (0..connections)
        .map(|i| {
            let lines: Vec<String> = events
                .iter()
                .skip(i)
                .step_by(connections)
                .map(format_event_line)
                .collect();
            let start = Arc::clone(&start);
            thread::spawn(move || send_lines(addr, &lines, &start))
        })
        .collect();
    for c in clients {
        c.join().unwrap();
    }
    listener.shutdown();
    Arc::try_unwrap(seen).unwrap().into_inner().unwrap()
}

fn send_lines(addr: SocketAddr, lines: &[String], start: &Barrier) {
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.set_nodelay(true).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    start.wait();
    let mut reply = String::new();
    for line in lines {
        writeln!(stream, "{line}").unwrap();
        reply.clear();
        reader.read_line(&mut reply).unwrap();
        assert_eq!(reply.trim_end(), "OK", "listener refused `{line}`");
    }
}

/// Synthetic cyclo-cross race: `runners` riders in categories 1..=3, nine
/// crossings each, split across both mats, unique timestamps.
pub fn synthetic_cyclocross(runners: u32) -> (Vec<Runner>, Vec<Event>) {
    let roster: Vec<Runner> = (1..=runners)
        .map(|id| Runner {
            id,
            rfid: format!("R{id:03}"),
            last_name: format!("Last{id}"),
            first_name: format!("First{id}"),
            gender: if id % 2 == 0 {
                easytime::runtime::Gender::Male
            } else {
                easytime::runtime::Gender::Female
            },
            category: Category((id - 1) % 3 + 1),
        })
        .collect();
    let mut events = Vec::new();
    for lap in 1..=9u64 {
        for r in &roster {
            let mp = if (lap * 7 + u64::from(r.id)) % 3 == 0 {
                1
            } else {
                2
            };
            events.push(Event::new(mp, &r.rfid, lap * 100_000 + u64::from(r.id)));
        }
    }
    (roster, events)
}

pub fn multiset(events: &[Event]) -> Vec<String> {
    let mut v: Vec<String> = events.iter().map(format_event_line).collect();
    v.sort();
    v
}

/// Programs inside the base language: every declaration is plain.
pub fn base_program() -> impl Strategy<Value = ProgramAst> {
    program().prop_map(|mut ast| {
        for d in &mut ast.decls {
            if !matches!(d.kind, VarKind::Plain(_)) {
                d.kind = VarKind::Plain(0);
            }
        }
        ast
    })
}
