//! Event sources and persistence: roster CSV, event logs, the line-protocol
//! listener for automatic agents, and result files.

mod events;
mod listener;
mod results_csv;
mod roster;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use events::{
    format_event_line, parse_event_line, parse_event_log, read_event_log, read_event_logs,
    write_event_log, EventJournal,
};
pub use listener::{listen_auto, ListenerHandle};
pub use results_csv::{result_file_name, write_results, write_table};
pub use roster::{load_runners, parse_runners, ROSTER_HEADER};

#[derive(Debug, Error)]
pub enum AgentsIoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: cannot bind listener: {source}", addr)]
    Bind {
        addr: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: rfid `{rfid}` is already assigned")]
    DuplicateRfid { line: u64, rfid: String },
    #[error("line {line}: runner id {id} is already used")]
    DuplicateRunnerId { line: u64, id: u32 },
    #[error("line {line}: {reason}")]
    MalformedEvent { line: u64, reason: String },
}

impl AgentsIoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AgentsIoError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the file system or network rather than of the
    /// data.
    pub fn is_io(&self) -> bool {
        matches!(self, AgentsIoError::Io { .. } | AgentsIoError::Bind { .. })
    }
}
