use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use easytime::agents_io::{
    listen_auto, load_runners, read_event_log, read_event_logs, write_event_log, write_results,
    AgentsIoError, EventJournal,
};
use easytime::diagnostic::sort_diagnostics;
use easytime::frontend::Category;
use easytime::runtime::{init_race, replay, results, Event, RaceState, Runner};
use easytime::{compile_for_categories, CompiledProgram, Diagnostic, Dialect};

use crate::RaceArgs;

pub const JOURNAL_FILE: &str = "journal.log";
pub const EVENT_LOG_FILE: &str = "event_log.csv";

/// Why a command failed. Input problems exit 1, environment problems 2.
pub enum Failure {
    /// Already reported (e.g. diagnostics printed).
    Reported,
    Input(String),
    Env(String),
}

impl Failure {
    pub fn message(&self) -> Option<&str> {
        match self {
            Failure::Reported => None,
            Failure::Input(m) | Failure::Env(m) => Some(m),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Reported | Failure::Input(_) => 1,
            Failure::Env(_) => 2,
        }
    }
}

impl From<AgentsIoError> for Failure {
    fn from(e: AgentsIoError) -> Self {
        if e.is_io() {
            Failure::Env(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn print_diagnostics(file: &Path, diags: &mut [Diagnostic]) {
    sort_diagnostics(diags);
    let name = file.display().to_string();
    for d in diags.iter() {
        println!("{}", d.render(&name));
    }
}

fn categories(roster: &[Runner]) -> Vec<Category> {
    roster
        .iter()
        .map(|r| r.category)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn compile_file(
    path: &Path,
    dialect: Dialect,
    roster: &[Runner],
) -> Result<CompiledProgram, Failure> {
    let source =
        fs::read_to_string(path).map_err(|e| Failure::Env(format!("{}: {e}", path.display())))?;
    match compile_for_categories(&source, dialect, &categories(roster)) {
        Ok(mut program) => {
            print_diagnostics(path, &mut program.warnings);
            Ok(program)
        }
        Err(mut err) => {
            print_diagnostics(path, &mut err.diagnostics);
            Err(Failure::Reported)
        }
    }
}

pub fn check(program: &Path, dialect: Dialect, runners: Option<&Path>) -> Result<(), Failure> {
    let roster = match runners {
        Some(path) => load_runners(path)?,
        None => Vec::new(),
    };
    compile_file(program, dialect, &roster).map(|_| ())
}

struct Race {
    program: CompiledProgram,
    initial: RaceState,
}

fn prepare(args: &RaceArgs) -> Result<Race, Failure> {
    let roster = load_runners(&args.runners)?;
    let program = compile_file(&args.program, args.dialect, &roster)?;
    if let Some(var) = &args.rank_var {
        if program.state.get(var).is_none() {
            return Err(Failure::Input(format!(
                "--rank: `{var}` is not a program variable"
            )));
        }
    }
    let initial = init_race(&program.state, &roster).map_err(|e| Failure::Input(e.to_string()))?;
    for w in &initial.warnings {
        eprintln!("warning: {w}");
    }
    Ok(Race { program, initial })
}

fn write_outputs(args: &RaceArgs, race: &RaceState) -> Result<Vec<PathBuf>, Failure> {
    let tables = results(race, args.rank_var.as_deref(), args.group_by)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let mut written = write_results(&tables, &args.out_dir)?;
    let log_path = args.out_dir.join(EVENT_LOG_FILE);
    write_event_log(&race.log, &log_path)?;
    written.push(log_path);
    Ok(written)
}

fn replay_all(race: &Race, events: &[Event]) -> Result<RaceState, Failure> {
    let done = replay(race.initial.clone(), &race.program.ast, events)
        .map_err(|e| Failure::Input(e.to_string()))?;
    for w in &done.warnings[race.initial.warnings.len()..] {
        eprintln!("warning: {w}");
    }
    Ok(done)
}

pub fn run(args: &RaceArgs, event_files: &[PathBuf]) -> Result<(), Failure> {
    let race = prepare(args)?;
    let events = read_event_logs(event_files)?;
    let done = replay_all(&race, &events)?;
    for path in write_outputs(args, &done)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

enum Msg {
    Event(Event),
    Stop,
}

pub fn serve(
    args: &RaceArgs,
    bind: &str,
    port: u16,
    snapshot_every: Option<usize>,
) -> Result<(), Failure> {
    let race = prepare(args)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::Env(format!("{}: {e}", args.out_dir.display())))?;
    let mut journal = EventJournal::create(args.out_dir.join(JOURNAL_FILE))?;

    let (tx, rx) = mpsc::channel();
    let stop_tx = tx.clone();
    ctrlc::set_handler(move || {
        let _ = stop_tx.send(Msg::Stop);
    })
    .map_err(|e| Failure::Env(format!("cannot install signal handler: {e}")))?;

    let listener = listen_auto((bind, port), move |ev| {
        let _ = tx.send(Msg::Event(ev));
    })?;
    // Tests and scripts read this line to learn the bound port.
    println!("listening on {}", listener.local_addr());

    let mut live = race.initial.clone();
    let mut applied = 0usize;
    let mut accept = |ev: Event, live: &mut RaceState| -> Result<(), Failure> {
        let index = live.log.len();
        match live.apply(&race.program.ast, &ev) {
            Ok(()) => {
                journal.append(&ev)?;
                applied += 1;
                if snapshot_every.is_some_and(|n| n > 0 && applied.is_multiple_of(n)) {
                    write_outputs(args, live)?;
                }
            }
            // The event is refused and kept out of the journal so the
            // journal always replays cleanly.
            Err(e) => eprintln!("error: rejected event #{index} ({ev:?}): {e}"),
        }
        Ok(())
    };

    for msg in rx.iter() {
        match msg {
            Msg::Event(ev) => accept(ev, &mut live)?,
            Msg::Stop => break,
        }
    }
    // Shutting the listener down flushes every accepted line into the
    // channel; apply those too.
    listener.shutdown();
    while let Ok(msg) = rx.try_recv() {
        if let Msg::Event(ev) = msg {
            accept(ev, &mut live)?;
        }
    }

    // Final results come from the sorted journal, exactly as `results`
    // would recompute them.
    let events = read_event_log(journal.path())?;
    let done = replay_all(&race, &events)?;
    for path in write_outputs(args, &done)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
