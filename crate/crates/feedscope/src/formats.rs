//! JSON and CSV encodings of runs, link scores, catalogs and reports.
//!
//! Floats are written in their shortest round-trip form.

use serde::{Deserialize, Serialize};

use feedscope_core::analysis::{CompletenessReport, LoopProfile};
use feedscope_core::discovery::{FoundAt, LoopCatalog, Provenance};
use feedscope_core::{LinkScoreSeries, RunResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FoundAtJson {
    Step(usize),
    Label(String),
}

impl From<FoundAt> for FoundAtJson {
    fn from(f: FoundAt) -> Self {
        match f {
            FoundAt::Static => FoundAtJson::Label("static".into()),
            FoundAt::Step(k) => FoundAtJson::Step(k),
        }
    }
}

impl TryFrom<&FoundAtJson> for FoundAt {
    type Error = String;
    fn try_from(f: &FoundAtJson) -> Result<Self, String> {
        match f {
            FoundAtJson::Step(k) => Ok(FoundAt::Step(*k)),
            FoundAtJson::Label(s) if s == "static" => Ok(FoundAt::Static),
            FoundAtJson::Label(s) => Err(format!("found_at must be a step number or \"static\", got \"{s}\"")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopJson {
    pub cycle: Vec<String>,
    pub discovery_score: f64,
    pub found_at: FoundAtJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogJson {
    pub provenance: String,
    pub overflow: bool,
    pub loops: Vec<LoopJson>,
}

impl From<&LoopCatalog> for CatalogJson {
    fn from(c: &LoopCatalog) -> Self {
        CatalogJson {
            provenance: c.provenance.as_str().into(),
            overflow: c.overflow,
            loops: c
                .records()
                .iter()
                .map(|r| LoopJson {
                    cycle: r.cycle.clone(),
                    discovery_score: r.discovery_score,
                    found_at: r.found_at.into(),
                })
                .collect(),
        }
    }
}

impl CatalogJson {
    pub fn to_catalog(&self) -> Result<LoopCatalog, String> {
        let provenance = match self.provenance.as_str() {
            "exhaustive" => Provenance::Exhaustive,
            "strongest-path" => Provenance::StrongestPath,
            other => return Err(format!("unknown provenance \"{other}\"")),
        };
        let mut catalog = LoopCatalog::new(provenance);
        catalog.overflow = self.overflow;
        for (i, l) in self.loops.iter().enumerate() {
            let found_at = FoundAt::try_from(&l.found_at).map_err(|e| format!("loop {i}: {e}"))?;
            catalog
                .insert(&l.cycle, l.discovery_score, found_at)
                .map_err(|e| format!("loop {i}: {e}"))?;
        }
        Ok(catalog)
    }
}

pub fn catalog_json(catalog: &LoopCatalog) -> String {
    to_json(&CatalogJson::from(catalog))
}

pub fn parse_catalog_json(text: &str) -> Result<LoopCatalog, String> {
    let json: CatalogJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
    json.to_catalog()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
}

/// `time,<variable>...`, one row per step.
pub fn run_csv(run: &RunResult) -> String {
    let header = std::iter::once("time".to_string())
        .chain(run.names.iter().cloned())
        .collect();
    let rows = (0..run.times.len()).map(|k| {
        std::iter::once(num(run.times[k]))
            .chain(run.values.iter().map(|v| num(v[k])))
            .collect()
    });
    csv_text(std::iter::once(header).chain(rows))
}

/// `time,src,dst,score`, one row per edge per step.
pub fn link_scores_csv(series: &LinkScoreSeries) -> String {
    let header = ["time", "src", "dst", "score"].map(String::from).to_vec();
    let rows = (0..series.times.len()).flat_map(|k| {
        series.graph.edges.iter().enumerate().map(move |(e, edge)| {
            vec![
                num(series.times[k]),
                series.graph.name(edge.src).to_string(),
                series.graph.name(edge.dst).to_string(),
                num(series.scores[e][k]),
            ]
        })
    });
    csv_text(std::iter::once(header).chain(rows))
}

pub fn loop_id(rank: usize) -> String {
    format!("L{}", rank + 1)
}

/// `time,loop_id,score,relative` for the ranked loops.
pub fn analysis_csv(times: &[f64], ranking: &[LoopProfile]) -> String {
    let header = ["time", "loop_id", "score", "relative"].map(String::from).to_vec();
    let rows = (0..times.len()).flat_map(|k| {
        ranking.iter().enumerate().map(move |(i, p)| {
            vec![
                num(times[k]),
                loop_id(i),
                num(p.score_series[k]),
                num(p.relative_series[k]),
            ]
        })
    });
    csv_text(std::iter::once(header).chain(rows))
}

#[derive(Clone, Debug, Serialize)]
pub struct RankedLoopJson {
    pub id: String,
    pub cycle: Vec<String>,
    pub avg_contribution: f64,
    pub polarity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
    pub discovery_score: f64,
    pub found_at: FoundAtJson,
}

pub fn ranking_json(ranking: &[LoopProfile]) -> Vec<RankedLoopJson> {
    ranking
        .iter()
        .enumerate()
        .map(|(i, p)| RankedLoopJson {
            id: loop_id(i),
            cycle: p.record.cycle.clone(),
            avg_contribution: p.avg_contribution,
            polarity: p.polarity.as_str(),
            note: p.note,
            discovery_score: p.record.discovery_score,
            found_at: p.record.found_at.into(),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TopEntryJson {
    pub rank: usize,
    pub cycle: Vec<String>,
    pub avg_contribution: f64,
    pub present: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NearMissJson {
    pub missing: Vec<String>,
    pub closest: Vec<String>,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportJson {
    pub reference_size: usize,
    pub candidate_size: usize,
    pub intersection: usize,
    pub top: Vec<TopEntryJson>,
    pub near_misses: Vec<NearMissJson>,
}

impl From<&CompletenessReport> for ReportJson {
    fn from(r: &CompletenessReport) -> Self {
        ReportJson {
            reference_size: r.reference_size,
            candidate_size: r.candidate_size,
            intersection: r.intersection,
            top: r
                .top
                .iter()
                .enumerate()
                .map(|(i, t)| TopEntryJson {
                    rank: i + 1,
                    cycle: t.cycle.clone(),
                    avg_contribution: t.avg_contribution,
                    present: t.present,
                })
                .collect(),
            near_misses: r
                .near_misses
                .iter()
                .map(|n| NearMissJson {
                    missing: n.missing.clone(),
                    closest: n.closest.clone(),
                    ratio: n.ratio,
                })
                .collect(),
        }
    }
}
