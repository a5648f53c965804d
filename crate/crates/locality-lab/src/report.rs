//! Report envelopes shared by the experiment runner: a JSON document that
//! embeds the hash of the config that produced it and the run's seed-bit
//! accounting, plus a flat CSV mirror for the tabular part. Writing the same
//! report twice produces identical bytes.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::models::{Label, ProbeTranscript};
use crate::seeding::sha256_hex;

/// Seed consumption of one run, in bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedAccounting {
    pub family_seed_bits: usize,
    pub algorithm_seed_bits: usize,
    pub total_seed_bits: usize,
    /// Declared budget, when the command enforces one.
    pub seed_bit_budget: Option<usize>,
}

/// The envelope every command emits: what ran, under which config (by
/// hash), with which master seed, and the command-specific payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub command: String,
    pub config_hash: String,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_accounting: Option<SeedAccounting>,
    pub payload: T,
}

/// Hash of the canonical JSON encoding of a config. Struct fields serialize
/// in declaration order, so equal configs hash equally.
pub fn config_hash<C: Serialize>(config: &C) -> Result<String, serde_json::Error> {
    Ok(sha256_hex(&serde_json::to_vec(config)?))
}

/// Hash of a transcript's canonical byte encoding, used to reference
/// witnesses from flat CSV rows.
pub fn witness_hash(transcript: &ProbeTranscript) -> String {
    sha256_hex(&transcript.canonical_bytes())
}

/// Writes pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, report: &Report<T>) -> io::Result<()> {
    let mut body = serde_json::to_string_pretty(report)?;
    body.push('\n');
    fs::write(path, body)
}

/// One per-vertex row of a model run, shared by the run and localize
/// commands' CSV mirrors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub vertex: u64,
    pub answer: Label,
    pub probes: usize,
}

/// A flat table destined for a CSV mirror.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(row.len(), self.header.len(), "ragged CSV row");
        self.rows.push(row);
    }
}

/// Writes a table as RFC-4180-style CSV: fields containing commas, quotes,
/// or newlines are quoted, with embedded quotes doubled.
pub fn write_csv(path: &Path, table: &CsvTable) -> io::Result<()> {
    let mut out = Vec::new();
    for line in std::iter::once(&table.header).chain(&table.rows) {
        let encoded: Vec<String> = line.iter().map(|f| csv_field(f)).collect();
        writeln!(out, "{}", encoded.join(","))?;
    }
    fs::write(path, out)
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
