//! The shared event line format, `mp,rfid,timestamp_ms[,payload]`, used by
//! manual agent files, replay logs, journals and the network listener.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::AgentsIoError;
use crate::runtime::{sort_events, Event, EventOutcome, LogEntry};

/// Parses one event line. The error is a short human-readable reason.
pub fn parse_event_line(line: &str) -> Result<Event, String> {
    let line = line.trim_end_matches(['\r', '\n']);
    if !line.is_ascii() {
        return Err("line is not ASCII".to_string());
    }
    if line.trim().is_empty() {
        return Err("empty line".to_string());
    }
    let mut fields = line.split(',').map(str::trim);

    let mp = fields.next().unwrap_or_default();
    let mp_id: u32 = mp
        .parse()
        .map_err(|_| format!("invalid measuring place `{mp}`"))?;
    let rfid = match fields.next() {
        None => return Err("missing rfid".to_string()),
        Some("") => return Err("empty rfid".to_string()),
        Some(r) => r.to_string(),
    };
    let timestamp_ms = match fields.next() {
        None => return Err("missing timestamp".to_string()),
        Some(t) => parse_count(t).ok_or_else(|| format!("invalid timestamp `{t}`"))?,
    };
    let payload = match fields.next() {
        None => None,
        Some(p) => Some(parse_count(p).ok_or_else(|| format!("invalid payload `{p}`"))?),
    };
    if fields.next().is_some() {
        return Err("too many fields".to_string());
    }
    Ok(Event {
        mp_id,
        rfid,
        timestamp_ms,
        payload,
    })
}

// Non-negative and representable as a variable value.
fn parse_count(s: &str) -> Option<u64> {
    s.parse::<u64>().ok().filter(|v| i64::try_from(*v).is_ok())
}

pub fn format_event_line(ev: &Event) -> String {
    match ev.payload {
        Some(p) => format!("{},{},{},{}", ev.mp_id, ev.rfid, ev.timestamp_ms, p),
        None => format!("{},{},{}", ev.mp_id, ev.rfid, ev.timestamp_ms),
    }
}

/// Parses an event log, skipping blank and `#` lines, and returns the
/// events sorted by timestamp (simultaneous events keep file order).
pub fn parse_event_log(input: impl Read) -> Result<Vec<Event>, AgentsIoError> {
    let mut events = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| AgentsIoError::MalformedEvent {
            line: line_no,
            reason: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        events.push(
            parse_event_line(trimmed).map_err(|reason| AgentsIoError::MalformedEvent {
                line: line_no,
                reason,
            })?,
        );
    }
    sort_events(&mut events);
    Ok(events)
}

pub fn read_event_log(path: impl AsRef<Path>) -> Result<Vec<Event>, AgentsIoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AgentsIoError::io(path, e))?;
    parse_event_log(file)
}

/// Reads several logs and merges them into one timestamp-ordered list. Ties
/// keep the order of `paths`, then file order.
pub fn read_event_logs<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<Event>, AgentsIoError> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_event_log(p)?);
    }
    sort_events(&mut all);
    Ok(all)
}

/// Writes the applied-event log as CSV:
/// `index,mp,rfid,timestamp_ms,payload,status,fired`.
pub fn write_event_log(log: &[LogEntry], path: impl AsRef<Path>) -> Result<(), AgentsIoError> {
    let path = path.as_ref();
    let io_err = |e: io::Error| AgentsIoError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    writeln!(w, "index,mp,rfid,timestamp_ms,payload,status,fired").map_err(io_err)?;
    for (i, entry) in log.iter().enumerate() {
        let ev = &entry.event;
        let payload = ev.payload.map(|p| p.to_string()).unwrap_or_default();
        let (status, fired) = match &entry.outcome {
            EventOutcome::Applied { fired } => (
                "applied",
                fired
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            EventOutcome::Unmatched => ("unmatched", String::new()),
        };
        writeln!(
            w,
            "{i},{},{},{},{payload},{status},{fired}",
            ev.mp_id, ev.rfid, ev.timestamp_ms
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Append-only event journal in the event line format; every append is
/// flushed so the journal survives a crash.
pub struct EventJournal {
    path: PathBuf,
    file: File,
}

impl EventJournal {
    /// Creates (truncating) the journal at `path`.
    pub fn create(path: impl AsRef<Path>) -> Result<Self, AgentsIoError> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(true)
            .open(&path)
            .map_err(|e| AgentsIoError::io(&path, e))?;
        Ok(EventJournal { path, file })
    }

    pub fn append(&mut self, ev: &Event) -> Result<(), AgentsIoError> {
        writeln!(self.file, "{}", format_event_line(ev))
            .and_then(|_| self.file.flush())
            .map_err(|e| AgentsIoError::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_line() {
        assert_eq!(
            parse_event_line("1,TAG007,5000").unwrap(),
            Event::new(1, "TAG007", 5000)
        );
    }

    #[test]
    fn payload_line() {
        assert_eq!(
            parse_event_line("1,TAG007,5000,2").unwrap(),
            Event::new(1, "TAG007", 5000).with_payload(2)
        );
    }

    #[test]
    fn error_reasons() {
        assert_eq!(
            parse_event_line("3,TAG007").unwrap_err(),
            "missing timestamp"
        );
        assert_eq!(parse_event_line("3").unwrap_err(), "missing rfid");
        assert_eq!(parse_event_line("").unwrap_err(), "empty line");
        assert_eq!(
            parse_event_line("1,T,5,6,7").unwrap_err(),
            "too many fields"
        );
        assert!(parse_event_line("x,T,5")
            .unwrap_err()
            .contains("measuring place"));
        assert!(parse_event_line("1,T,-5")
            .unwrap_err()
            .contains("timestamp"));
        assert!(parse_event_line("1,T,5,-1")
            .unwrap_err()
            .contains("payload"));
    }

    #[test]
    fn log_is_sorted_and_skips_comments() {
        let src = "# comment\n1,A,5000\n\n2,B,3000\n3,C,3000\n";
        let events = parse_event_log(src.as_bytes()).unwrap();
        let order: Vec<(u64, &str)> = events
            .iter()
            .map(|e| (e.timestamp_ms, e.rfid.as_str()))
            .collect();
        assert_eq!(order, [(3000, "B"), (3000, "C"), (5000, "A")]);
    }

    #[test]
    fn malformed_log_line_reports_number() {
        let err = parse_event_log("1,A,5\n# x\n1,B\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AgentsIoError::MalformedEvent { line: 3, .. }));
    }

    #[test]
    fn journal_appends_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.log");
        let mut j = EventJournal::create(&path).unwrap();
        j.append(&Event::new(1, "A", 10)).unwrap();
        j.append(&Event::new(2, "B", 5).with_payload(3)).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "1,A,10\n2,B,5,3\n");
        assert_eq!(read_event_log(&path).unwrap()[0].rfid, "B");
    }

    fn event() -> impl Strategy<Value = Event> {
        (
            any::<u32>(),
            "[A-Za-z0-9_-]{1,12}",
            0..=i64::MAX as u64,
            proptest::option::of(0..=i64::MAX as u64),
        )
            .prop_map(|(mp_id, rfid, timestamp_ms, payload)| Event {
                mp_id,
                rfid,
                timestamp_ms,
                payload,
            })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(ev in event()) {
            prop_assert_eq!(parse_event_line(&format_event_line(&ev)).unwrap(), ev);
        }
    }
}
