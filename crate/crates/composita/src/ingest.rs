//! External field-table ingestion and exact cross-validation against our
//! own enumeration. Input is a CSV with columns label, degree, disc
//! (signed decimal), galois_label; degree-3 rows are validated
//! per-discriminant over the overlapping range, all others are counted and
//! skipped.

use crate::cubic::{enumerate_cubic_fields, GaloisType, ENUM_LIMIT};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Read;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestRow {
    pub label: String,
    pub degree: u32,
    pub disc: i64,
    pub galois_label: String,
}

/// Parse the lmfdb-like CSV schema. Unknown extra columns are ignored;
/// missing required columns are an error.
pub fn parse_csv(reader: impl Read) -> Result<Vec<IngestRow>> {
    let mut rd = csv::Reader::from_reader(reader);
    let headers = rd.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::IngestMismatch(format!("missing column {name}")))
    };
    let (li, di, ci, gi) = (col("label")?, col("degree")?, col("disc")?, col("galois_label")?);
    let mut rows = Vec::new();
    for (n, record) in rd.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let degree: u32 = field(di)
            .parse()
            .map_err(|_| Error::IngestMismatch(format!("row {}: bad degree", n + 2)))?;
        let disc: i64 = field(ci)
            .parse()
            .map_err(|_| Error::IngestMismatch(format!("row {}: bad disc", n + 2)))?;
        rows.push(IngestRow { label: field(li), degree, disc, galois_label: field(gi) });
    }
    Ok(rows)
}

/// Accepts both transitive-group labels and plain group names for cubics.
fn cubic_galois(label: &str) -> Option<GaloisType> {
    match label {
        "3T2" | "S3" | "S_3" => Some(GaloisType::S3),
        "3T1" | "C3" | "C_3" | "Z/3" => Some(GaloisType::C3),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    /// Discriminant magnitude bound of the validated overlap.
    pub bound: u64,
    pub rows_total: usize,
    pub rows_checked: usize,
    pub rows_skipped: usize,
    /// One line per disagreement; empty means exact agreement.
    pub diffs: Vec<String>,
}

impl IngestReport {
    pub fn ok(&self) -> bool {
        self.diffs.is_empty()
    }
}

/// Cross-validate the ingested cubic rows against our enumeration, exactly,
/// per signed discriminant and Galois type, over |disc| <= bound. The
/// external table is taken to be complete up to the largest |disc| it
/// contains, so both missing and extra fields are diffs.
pub fn validate(rows: &[IngestRow], bound: Option<u64>) -> Result<IngestReport> {
    let cubic_rows: Vec<&IngestRow> = rows.iter().filter(|r| r.degree == 3).collect();
    let table_max = cubic_rows.iter().map(|r| r.disc.unsigned_abs()).max().unwrap_or(0);
    let bound = bound.unwrap_or(table_max).min(table_max).min(ENUM_LIMIT);
    let mut diffs = Vec::new();
    let mut rows_checked = 0usize;

    // (signed disc, galois) -> multiplicity
    let mut theirs: BTreeMap<(i64, GaloisType), u64> = BTreeMap::new();
    for row in &cubic_rows {
        if row.disc.unsigned_abs() > bound {
            continue;
        }
        rows_checked += 1;
        match cubic_galois(&row.galois_label) {
            Some(g) => *theirs.entry((row.disc, g)).or_insert(0) += 1,
            None => diffs.push(format!(
                "{}: unrecognized cubic galois_label {:?}",
                row.label, row.galois_label
            )),
        }
    }
    let mut ours: BTreeMap<(i64, GaloisType), u64> = BTreeMap::new();
    for rec in enumerate_cubic_fields(bound)? {
        let disc = rec
            .signed_disc_i64()
            .expect("cubic discriminants below the enumeration limit fit i64");
        *ours.entry((disc, rec.galois)).or_insert(0) += 1;
    }
    let keys: std::collections::BTreeSet<_> = ours.keys().chain(theirs.keys()).collect();
    for &key in &keys {
        let a = ours.get(key).copied().unwrap_or(0);
        let b = theirs.get(key).copied().unwrap_or(0);
        if a != b {
            let (disc, g) = key;
            diffs.push(format!(
                "disc {disc} ({g:?}): enumeration has {a} field(s), ingested table has {b}"
            ));
        }
    }
    Ok(IngestReport {
        bound,
        rows_total: rows.len(),
        rows_checked,
        rows_skipped: rows.len() - rows_checked,
        diffs,
    })
}
