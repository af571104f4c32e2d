use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::AgentsIoError;
use crate::frontend::Category;
use crate::runtime::Runner;

pub const ROSTER_HEADER: [&str; 6] = [
    "id",
    "rfid",
    "last_name",
    "first_name",
    "gender",
    "category",
];

/// Loads and validates a roster CSV.
pub fn load_runners(path: impl AsRef<Path>) -> Result<Vec<Runner>, AgentsIoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AgentsIoError::io(path, e))?;
    parse_runners(file)
}

pub fn parse_runners(input: impl Read) -> Result<Vec<Runner>, AgentsIoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| malformed(1, e.to_string()))?,
        None => return Err(malformed(1, "missing header row".to_string())),
    };
    if header.iter().ne(ROSTER_HEADER) {
        return Err(malformed(
            1,
            format!("header must be `{}`", ROSTER_HEADER.join(",")),
        ));
    }

    let mut runners = Vec::new();
    let mut ids = HashSet::new();
    let mut rfids = HashSet::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != ROSTER_HEADER.len() {
            return Err(malformed(
                line,
                format!(
                    "expected {} fields, found {}",
                    ROSTER_HEADER.len(),
                    rec.len()
                ),
            ));
        }
        let id: u32 = rec[0]
            .parse()
            .map_err(|_| malformed(line, format!("invalid id `{}`", &rec[0])))?;
        let rfid = rec[1].to_string();
        if rfid.is_empty() {
            return Err(malformed(line, "empty rfid".to_string()));
        }
        let gender = rec[4].parse().map_err(|reason| malformed(line, reason))?;
        let category: u32 = rec[5]
            .parse()
            .map_err(|_| malformed(line, format!("invalid category `{}`", &rec[5])))?;
        if !ids.insert(id) {
            return Err(AgentsIoError::DuplicateRunnerId { line, id });
        }
        if !rfids.insert(rfid.clone()) {
            return Err(AgentsIoError::DuplicateRfid { line, rfid });
        }
        runners.push(Runner {
            id,
            rfid,
            last_name: rec[2].to_string(),
            first_name: rec[3].to_string(),
            gender,
            category: Category(category),
        });
    }
    Ok(runners)
}

fn malformed(line: u64, reason: String) -> AgentsIoError {
    AgentsIoError::MalformedRow { line, reason }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::Gender;

    const HEADER: &str = "id,rfid,last_name,first_name,gender,category\n";

    #[test]
    fn maps_fields() {
        let runners =
            parse_runners(format!("{HEADER}7,TAG007,Novak,Ana,female,2\n").as_bytes()).unwrap();
        assert_eq!(
            runners,
            [Runner {
                id: 7,
                rfid: "TAG007".into(),
                last_name: "Novak".into(),
                first_name: "Ana".into(),
                gender: Gender::Female,
                category: Category(2),
            }]
        );
    }

    #[test]
    fn bad_gender_names_line() {
        let err =
            parse_runners(format!("{HEADER}1,A,X,Y,male,1\n7,TAG007,Novak,Ana,x,2\n").as_bytes())
                .unwrap_err();
        match err {
            AgentsIoError::MalformedRow { line, reason } => {
                assert_eq!(line, 3);
                assert!(reason.contains("gender"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_rfid() {
        let err = parse_runners(
            format!("{HEADER}7,TAG007,Novak,Ana,female,2\n8,TAG007,Kos,Bor,male,1\n").as_bytes(),
        )
        .unwrap_err();
        assert!(
            matches!(err, AgentsIoError::DuplicateRfid { line: 3, ref rfid } if rfid == "TAG007")
        );
    }

    #[test]
    fn duplicate_id() {
        let err = parse_runners(
            format!("{HEADER}7,T1,Novak,Ana,female,2\n7,T2,Kos,Bor,male,1\n").as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            AgentsIoError::DuplicateRunnerId { line: 3, id: 7 }
        ));
    }

    #[test]
    fn header_is_mandatory() {
        let err = parse_runners("7,TAG007,Novak,Ana,female,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AgentsIoError::MalformedRow { line: 1, .. }));
        let err = parse_runners("".as_bytes()).unwrap_err();
        assert!(matches!(err, AgentsIoError::MalformedRow { line: 1, .. }));
    }

    #[test]
    fn negative_category_rejected() {
        let err = parse_runners(format!("{HEADER}7,T,N,A,male,-1\n").as_bytes()).unwrap_err();
        assert!(matches!(err, AgentsIoError::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn wrong_arity_rejected() {
        let err = parse_runners(format!("{HEADER}7,T,N,A,male\n").as_bytes()).unwrap_err();
        assert!(matches!(err, AgentsIoError::MalformedRow { line: 2, .. }));
    }
}
