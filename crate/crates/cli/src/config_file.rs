//! Flat key-value config files and suite files.
//!
//! Format: one `key = value` pair per line, `#` comments, blank lines
//! ignored. Keys are the CLI flag names without the leading dashes. Suite
//! files additionally contain one `[dataset]` section per dataset:
//!
//! ```text
//! selector = enora
//! folds = 10
//! seed = 7
//!
//! [dataset]
//! name = breast-cancer
//! data = data/uci/breast-cancer.arff
//! ```

use std::collections::HashMap;

use anyhow::{bail, Context, Result};

pub type KvMap = HashMap<String, String>;

/// Keys accepted in flat config files and the shared part of suite files.
pub const SHARED_KEYS: &[&str] = &[
    "data",
    "class-column",
    "missing-token",
    "bins",
    "algo",
    "selector",
    "pop-size",
    "generations",
    "slots",
    "inner-folds",
    "subsample-cap",
    "m-threshold",
    "folds",
    "seed",
    "out",
];

/// Keys accepted inside a `[dataset]` section.
pub const DATASET_KEYS: &[&str] = &["name", "data", "class-column", "missing-token"];

pub struct SuiteFile {
    pub shared: KvMap,
    pub datasets: Vec<KvMap>,
}

/// Parses a flat key-value file; rejects `[dataset]` sections and unknown keys.
pub fn parse_kv(text: &str) -> Result<KvMap> {
    let suite = parse_sections(text)?;
    if !suite.datasets.is_empty() {
        bail!("[dataset] sections belong in suite files, not flat config files");
    }
    check_keys(&suite.shared, SHARED_KEYS)?;
    Ok(suite.shared)
}

/// Parses a suite file: shared keys followed by `[dataset]` sections.
pub fn parse_suite(text: &str) -> Result<SuiteFile> {
    let suite = parse_sections(text)?;
    check_keys(&suite.shared, SHARED_KEYS)?;
    for (i, ds) in suite.datasets.iter().enumerate() {
        check_keys(ds, DATASET_KEYS)
            .with_context(|| format!("in [dataset] section {}", i + 1))?;
        if !ds.contains_key("data") {
            bail!("[dataset] section {} is missing the data key", i + 1);
        }
    }
    Ok(suite)
}

fn parse_sections(text: &str) -> Result<SuiteFile> {
    let mut shared = KvMap::new();
    let mut datasets: Vec<KvMap> = Vec::new();
    let mut current: Option<KvMap> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "[dataset]" {
            if let Some(done) = current.take() {
                datasets.push(done);
            }
            current = Some(KvMap::new());
            continue;
        }
        if line.starts_with('[') {
            bail!("line {}: unknown section {line:?}", i + 1);
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key = value, got {line:?}", i + 1);
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if value.is_empty() {
            bail!("line {}: key {key:?} has an empty value", i + 1);
        }
        let target = current.as_mut().unwrap_or(&mut shared);
        if target.insert(key.clone(), value).is_some() {
            bail!("line {}: duplicate key {key:?}", i + 1);
        }
    }
    if let Some(done) = current.take() {
        datasets.push(done);
    }
    Ok(SuiteFile { shared, datasets })
}

fn check_keys(map: &KvMap, allowed: &[&str]) -> Result<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            bail!("unknown config key {key:?} (allowed: {})", allowed.join(", "));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_file_round_trip() {
        let kv = parse_kv("# hello\nselector = enora\nfolds= 10\nseed =7\n").unwrap();
        assert_eq!(kv.get("selector").unwrap(), "enora");
        assert_eq!(kv.get("folds").unwrap(), "10");
        assert_eq!(kv.get("seed").unwrap(), "7");
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(parse_kv("selectro = enora\n").is_err());
    }

    #[test]
    fn duplicate_key_rejected() {
        assert!(parse_kv("seed = 1\nseed = 2\n").is_err());
    }

    #[test]
    fn suite_sections_collect_datasets() {
        let text = "selector = nsga2\nfolds = 5\n\n[dataset]\nname = a\ndata = a.csv\n\n[dataset]\nname = b\ndata = b.arff\nclass-column = Class\n";
        let suite = parse_suite(text).unwrap();
        assert_eq!(suite.shared.get("selector").unwrap(), "nsga2");
        assert_eq!(suite.datasets.len(), 2);
        assert_eq!(suite.datasets[1].get("class-column").unwrap(), "Class");
    }

    #[test]
    fn dataset_requires_data_key() {
        assert!(parse_suite("[dataset]\nname = x\n").is_err());
    }
}
