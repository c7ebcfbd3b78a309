//! CSV dataset ingestion: a header row of atom names followed by 0/1 rows.

use std::path::Path;

use reasonet_core::hln::Dataset;

use crate::error::CliError;

/// Loads a boolean dataset from a CSV file. Columns bind by header name, so
/// column order is irrelevant downstream.
pub fn load_dataset_csv(path: impl AsRef<Path>) -> Result<Dataset, CliError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    let atoms: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for (j, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        let mut row = Vec::with_capacity(atoms.len());
        for (k, cell) in record.iter().enumerate() {
            match cell.trim() {
                "0" => row.push(false),
                "1" => row.push(true),
                other => {
                    return Err(CliError::parse(format!(
                        "{}: row {}, column '{}': expected 0 or 1, got '{other}'",
                        path.display(),
                        j + 1,
                        atoms.get(k).map(String::as_str).unwrap_or("?")
                    )))
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::parse(format!("{}: dataset has no rows", path.display())));
    }
    Dataset::new(atoms, rows).map_err(CliError::from)
}
