use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::AgentsIoError;
use crate::runtime::ResultTable;

/// `results.csv`, or `results_<group>.csv` for a grouped table.
pub fn result_file_name(table: &ResultTable) -> String {
    match &table.group {
        Some(g) => format!("results_{}.csv", g.label()),
        None => "results.csv".to_string(),
    }
}

/// Serializes one table. Undefined values are empty cells.
pub fn write_table(table: &ResultTable, out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "rank",
        "id",
        "last_name",
        "first_name",
        "gender",
        "category",
    ];
    header.extend(table.columns.iter().map(String::as_str));
    w.write_record(&header)?;
    for row in &table.rows {
        let r = &row.runner;
        let mut rec = vec![
            row.rank.map(|x| x.to_string()).unwrap_or_default(),
            r.id.to_string(),
            r.last_name.clone(),
            r.first_name.clone(),
            r.gender.to_string(),
            r.category.to_string(),
        ];
        rec.extend(
            row.values
                .iter()
                .map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
        );
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one CSV per table into `dir` (created if missing) and returns the
/// paths written.
pub fn write_results(
    tables: &[ResultTable],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, AgentsIoError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| AgentsIoError::io(dir, e))?;
    let mut written = Vec::with_capacity(tables.len());
    for table in tables {
        let path = dir.join(result_file_name(table));
        let mut buf = Vec::new();
        write_table(table, &mut buf).map_err(|e| AgentsIoError::io(&path, e.into()))?;
        fs::write(&path, buf).map_err(|e| AgentsIoError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
