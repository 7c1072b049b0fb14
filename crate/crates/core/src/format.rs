//! File formats.
//!
//! # Substitution files
//!
//! A substitution is stored as a small TOML document:
//!
//! ```toml
//! alphabet = "ABCD"
//!
//! [rules]
//! A = "ABDB"
//! B = "ABAC"
//! C = "DCDB"
//! D = "DCAC"
//! ```
//!
//! `alphabet` lists the letters in order (single characters, distinct, at
//! least two). `rules` maps every letter to its image; all images must have
//! the same length. Keys are written in alphabet order and quoted when they
//! are not bare TOML keys. Parsing then writing is lossless.
//!
//! # CSV
//!
//! Numeric tables are comma separated with a header row and LF line endings.
//! Floats are written with 17 significant digits (`{:.16e}`), enough to
//! round-trip an `f64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::subst::{Alphabet, SubstitutionRule};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    alphabet: String,
    rules: BTreeMap<String, String>,
}

/// Parses a substitution file.
pub fn parse_rule(text: &str) -> Result<SubstitutionRule> {
    let doc: RuleDoc = toml::from_str(text).map_err(|e| Error::RuleFile(e.to_string()))?;
    let alphabet = Alphabet::new(doc.alphabet.chars())?;
    let mut rules = BTreeMap::new();
    for (key, image) in doc.rules {
        let mut chars = key.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(Error::RuleFile(format!(
                "rule key {key:?} is not a single letter"
            )));
        };
        rules.insert(c, image);
    }
    SubstitutionRule::from_map(alphabet, &rules)
}

fn toml_key(c: char) -> String {
    if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
        c.to_string()
    } else {
        toml_string(&c.to_string())
    }
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Writes a substitution file.
pub fn write_rule(rule: &SubstitutionRule) -> String {
    let alphabet = rule.alphabet();
    let mut out = String::new();
    let _ = writeln!(out, "alphabet = {}", toml_string(&alphabet.to_string()));
    out.push_str("\n[rules]\n");
    for (i, &c) in alphabet.letters().iter().enumerate() {
        let _ = writeln!(
            out,
            "{} = {}",
            toml_key(c),
            toml_string(&rule.image_str(i as u8))
        );
    }
    out
}

/// Float with 17 significant digits.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Two-column CSV with a header; the key column is written as given.
pub fn csv_two_columns<K: std::fmt::Display>(
    header: (&str, &str),
    rows: impl IntoIterator<Item = (K, f64)>,
) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{}", float17(v));
    }
    out
}

/// `theta,magnitude` rows for a sup scan over `scan.len()` grid points.
pub fn sup_scan_csv(scan: &[f64]) -> String {
    let g = scan.len() as f64;
    csv_two_columns(
        ("theta", "magnitude"),
        scan.iter()
            .enumerate()
            .map(|(j, &m)| (float17(j as f64 / g), m)),
    )
}

/// `freq_index,intensity` rows for a periodogram.
pub fn periodogram_csv(intensity: &[f64]) -> String {
    csv_two_columns(
        ("freq_index", "intensity"),
        intensity.iter().copied().enumerate(),
    )
}
