//! Minimal catalog harvester: fetch remote records (plain JSON array or a
//! paginated `{items, next}` envelope), validate each against a compiled
//! profile, and persist reports plus one merged N-Triples graph of the
//! conformant records.

use crate::instance::InstanceDocument;
use crate::ir::{ProfileLoadError, SchemaIR};
use crate::rdf::{to_triples, write_ntriples, Term, Triple, TripleSet};
use crate::report::{rules, Finding, ValidationReport};
use crate::validate::ValidateError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Duration;
use thiserror::Error;

fn default_page_cap() -> usize {
    100
}

fn default_timeout_secs() -> u64 {
    30
}

fn default_retry_attempts() -> u32 {
    3
}

fn default_retry_base_ms() -> u64 {
    250
}

#[derive(Debug, Clone, Deserialize)]
pub struct HarvestSource {
    pub name: String,
    pub url: String,
    /// Path to a compiled `.profile.json`.
    pub profile: PathBuf,
    pub root_class: String,
    #[serde(default = "default_page_cap")]
    pub page_cap: usize,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_retry_attempts")]
    pub retry_attempts: u32,
    #[serde(default = "default_retry_base_ms")]
    pub retry_base_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordSummary {
    pub id: String,
    pub conformant: bool,
    pub report: ValidationReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarvestRun {
    pub source: String,
    pub started: String,
    pub finished: String,
    pub fetched: usize,
    pub conformant: usize,
    pub records: Vec<RecordSummary>,
    pub graph_path: String,
}

#[derive(Debug, Error)]
pub enum HarvestError {
    #[error("cannot read source config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed source config: {0}")]
    Config(#[from] serde_yaml::Error),
    #[error("cannot load profile: {0}")]
    Profile(#[from] ProfileLoadError),
    #[error("network failure fetching {url} after {attempts} attempt(s): {message}")]
    Network {
        url: String,
        attempts: u32,
        message: String,
    },
    #[error("page {url} is neither a JSON array nor an items/next envelope")]
    MalformedPage { url: String },
    #[error("source root class is unknown in the profile: {0}")]
    RootClass(#[from] ValidateError),
}

pub fn load_source(path: &Path) -> Result<HarvestSource, HarvestError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_yaml::from_str(&text)?)
}

/// One fetched page: records plus the URL of the next page, if any.
struct Page {
    items: Vec<serde_json::Value>,
    next: Option<String>,
}

pub fn harvest(source: &HarvestSource, out_dir: &Path) -> Result<HarvestRun, HarvestError> {
    let started = chrono::Utc::now().to_rfc3339();
    let profile_bytes = std::fs::read(&source.profile)?;
    let profile = SchemaIR::from_json(&profile_bytes)?;

    let records_dir = out_dir.join("records");
    let reports_dir = out_dir.join("reports");
    std::fs::create_dir_all(&records_dir)?;
    std::fs::create_dir_all(&reports_dir)?;

    let agent = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(source.timeout_secs))
        .build();

    // Fetch all pages, following `next` until absent or the cap is reached.
    let mut raw_records: Vec<serde_json::Value> = Vec::new();
    let mut next_url = Some(source.url.clone());
    let mut pages = 0usize;
    while let Some(url) = next_url.take() {
        if pages >= source.page_cap {
            break;
        }
        pages += 1;
        let page = fetch_page(&agent, &url, source)?;
        raw_records.extend(page.items);
        next_url = page.next;
    }

    let mut summaries: Vec<RecordSummary> = Vec::new();
    let mut graph = TripleSet::new();
    let mut conformant_count = 0usize;

    for (index, raw) in raw_records.iter().enumerate() {
        let stem = format!("{index:04}");
        let record_id = raw
            .get("@id")
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .unwrap_or_else(|| stem.clone());

        std::fs::write(
            records_dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(raw).expect("raw record re-renders") + "\n",
        )?;

        let report = match InstanceDocument::from_json_value(raw, &source.root_class, &record_id) {
            Ok(doc) => {
                let report = crate::validate::validate(&doc, &profile)?;
                if report.conformant {
                    conformant_count += 1;
                    let triples =
                        to_triples(&doc, &profile).expect("conformant documents emit triples");
                    merge_with_blank_prefix(&mut graph, &triples, &format!("r{index}_"));
                }
                report
            }
            Err(parse_error) => ValidationReport::from_findings(vec![Finding::error(
                rules::MALFORMED_PAYLOAD,
                "/",
                parse_error.to_string(),
            )]),
        };

        std::fs::write(
            reports_dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&report).expect("report renders") + "\n",
        )?;
        summaries.push(RecordSummary {
            id: record_id,
            conformant: report.conformant,
            report,
        });
    }

    let graph_path = out_dir.join("graph.nt");
    std::fs::write(&graph_path, write_ntriples(&graph))?;

    let run = HarvestRun {
        source: source.name.clone(),
        started,
        finished: chrono::Utc::now().to_rfc3339(),
        fetched: raw_records.len(),
        conformant: conformant_count,
        records: summaries,
        graph_path: graph_path.display().to_string(),
    };
    std::fs::write(
        out_dir.join("run.json"),
        serde_json::to_string_pretty(&run).expect("run renders") + "\n",
    )?;
    Ok(run)
}

/// Copy triples, prefixing blank labels so records cannot collide inside
/// the merged graph.
fn merge_with_blank_prefix(graph: &mut TripleSet, triples: &TripleSet, prefix: &str) {
    let relabel = |term: &Term| -> Term {
        match term {
            Term::Blank(label) => Term::Blank(format!("{prefix}{label}")),
            other => other.clone(),
        }
    };
    for t in triples.iter() {
        graph.insert(Triple::new(
            relabel(&t.subject),
            t.predicate.clone(),
            relabel(&t.object),
        ));
    }
}

fn fetch_page(agent: &ureq::Agent, url: &str, source: &HarvestSource) -> Result<Page, HarvestError> {
    let mut last_error = String::new();
    for attempt in 0..source.retry_attempts {
        if attempt > 0 {
            let delay = source.retry_base_ms * (1 << (attempt - 1));
            std::thread::sleep(Duration::from_millis(delay));
        }
        match agent.get(url).call() {
            Ok(response) => {
                let body: serde_json::Value =
                    response.into_json().map_err(|e| HarvestError::Network {
                        url: url.to_string(),
                        attempts: attempt + 1,
                        message: format!("invalid JSON body: {e}"),
                    })?;
                return parse_page(url, body);
            }
            Err(ureq::Error::Status(code, _)) if code >= 500 => {
                last_error = format!("server returned {code}");
            }
            Err(ureq::Error::Status(code, _)) => {
                return Err(HarvestError::Network {
                    url: url.to_string(),
                    attempts: attempt + 1,
                    message: format!("server returned {code}"),
                });
            }
            Err(transport) => {
                last_error = transport.to_string();
            }
        }
    }
    Err(HarvestError::Network {
        url: url.to_string(),
        attempts: source.retry_attempts,
        message: last_error,
    })
}

fn parse_page(url: &str, body: serde_json::Value) -> Result<Page, HarvestError> {
    match body {
        serde_json::Value::Array(items) => Ok(Page { items, next: None }),
        serde_json::Value::Object(mut obj) => {
            let items = match obj.remove("items") {
                Some(serde_json::Value::Array(items)) => items,
                _ => {
                    return Err(HarvestError::MalformedPage {
                        url: url.to_string(),
                    })
                }
            };
            let next = obj
                .get("next")
                .and_then(|v| v.as_str())
                .map(str::to_string);
            Ok(Page { items, next })
        }
        _ => Err(HarvestError::MalformedPage {
            url: url.to_string(),
        }),
    }
}
