//! Corpus discovery: one bundle directory per session, found by manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::session_store::{ingest_bundle, validate_session, Session, ValidationReport, MANIFEST_FILE};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub session_id: String,
    /// Bundle directory relative to the corpus root.
    pub path: String,
    pub usable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusIndex {
    pub root: String,
    pub config: AnalysisConfig,
    pub sessions: Vec<IndexEntry>,
}

/// A loaded corpus: the index plus every session that could be read, keyed
/// like the index entries.
pub struct Corpus {
    pub index: CorpusIndex,
    pub sessions: BTreeMap<String, Session>,
    pub reports: BTreeMap<String, ValidationReport>,
}

impl Corpus {
    /// Usable sessions in session-id order.
    pub fn usable(&self) -> impl Iterator<Item = &Session> {
        self.index
            .sessions
            .iter()
            .filter(|e| e.usable)
            .filter_map(|e| self.sessions.get(&e.session_id))
    }

    pub fn excluded(&self) -> Vec<(String, String)> {
        self.index
            .sessions
            .iter()
            .filter(|e| !e.usable)
            .map(|e| (e.session_id.clone(), e.reasons.join("; ")))
            .collect()
    }
}

/// Bundle directories under `root`, sorted. A directory holding a manifest is
/// a bundle and is not searched further.
pub fn discover(root: &Path) -> Result<Vec<PathBuf>, CliError> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
        if dir.join(MANIFEST_FILE).is_file() {
            out.push(dir.to_path_buf());
            return Ok(());
        }
        let mut children: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| CliError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        children.sort();
        for c in children {
            walk(&c, out)?;
        }
        Ok(())
    }
    if !root.is_dir() {
        return Err(CliError::Io(format!("{}: not a directory", root.display())));
    }
    let mut out = Vec::new();
    walk(root, &mut out)?;
    Ok(out)
}

fn relative(root: &Path, p: &Path) -> String {
    p.strip_prefix(root).unwrap_or(p).display().to_string()
}

/// Ingests and validates every bundle. Bundles that fail to parse are kept
/// as unusable entries named after their directory; duplicate session ids
/// are fatal.
pub fn load_corpus(root: &Path, config: &AnalysisConfig) -> Result<Corpus, CliError> {
    let dirs = discover(root)?;
    let loaded: Vec<_> = dirs
        .par_iter()
        .map(|d| match ingest_bundle(d) {
            Ok(s) => {
                let report = validate_session(&s);
                (d, Ok((s, report)))
            }
            Err(e) => (d, Err(e.to_string())),
        })
        .collect();

    let mut entries = Vec::new();
    let mut sessions = BTreeMap::new();
    let mut reports = BTreeMap::new();
    for (dir, result) in loaded {
        let path = relative(root, dir);
        match result {
            Ok((s, report)) => {
                let id = s.session_id.clone();
                if sessions.contains_key(&id) {
                    return Err(CliError::Validation(format!("duplicate session_id `{id}` in {path}")));
                }
                entries.push(IndexEntry {
                    session_id: id.clone(),
                    path,
                    usable: report.usable,
                    reasons: report
                        .issues
                        .iter()
                        .filter(|i| i.severity == crate::session_store::Severity::Fatal)
                        .map(|i| i.message.clone())
                        .collect(),
                });
                sessions.insert(id.clone(), s);
                reports.insert(id, report);
            }
            Err(message) => entries.push(IndexEntry {
                session_id: path.clone(),
                path,
                usable: false,
                reasons: vec![message],
            }),
        }
    }
    entries.sort_by(|a, b| a.session_id.cmp(&b.session_id));
    Ok(Corpus {
        index: CorpusIndex {
            root: root.display().to_string(),
            config: config.clone(),
            sessions: entries,
        },
        sessions,
        reports,
    })
}
