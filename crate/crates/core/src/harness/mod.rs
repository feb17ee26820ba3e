//! Suite orchestration: a closed registry of verification suites, a
//! deterministic case runner with optional worker threads, and JSON/CSV
//! report emission.
//!
//! A suite is a named family of checks over a parameter grid. Each case
//! ends in exactly one verdict: `verified`, `refuted-with-counterexample`,
//! `skipped-budget` or `no-witness`. Refutations are the only verdict that
//! should fail a run; budget skips are counted but benign. Reports are
//! byte-deterministic for a fixed descriptor and seed as long as timing
//! capture is off.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::homology::{reduced_homology, HomologyMode, HomologyOptions};
use crate::complex::order_complex;
use crate::error::{Error, Result};
use crate::json::{BoundDoc, ComplexDoc, FlipDoc, GeometryDoc, HomologyDoc};

mod suites;

pub use suites::registry;

/// Work ceiling used when the caller does not set one: either the
/// `PHAN_BUDGET` environment variable or a million units (subspaces
/// scanned, chambers visited, faces built — each operation documents its
/// own unit).
pub fn work_budget() -> u64 {
    std::env::var("PHAN_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1_000_000)
}

/// Terminal state of one grid case.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Verified,
    RefutedWithCounterexample,
    SkippedBudget,
    NoWitness,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::RefutedWithCounterexample => "refuted-with-counterexample",
            Verdict::SkippedBudget => "skipped-budget",
            Verdict::NoWitness => "no-witness",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One grid point. Suites read only the fields they need; unset fields
/// fall back to suite defaults. `variant` selects a named sub-scenario
/// where a suite has several (for example a residue scope).
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Default, Debug)]
pub struct CaseParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "type")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// What to run: a registered suite id, its grid, and execution knobs.
#[derive(Clone, Debug)]
pub struct SuiteDescriptor {
    pub suite: String,
    pub grid: Vec<CaseParams>,
    pub budget: u64,
    pub seed: u64,
    /// Worker cap for case-level parallelism; 0 and 1 both mean serial.
    pub jobs: usize,
    /// Capture wall-clock per case. Off by default: timing breaks the
    /// byte-determinism contract, so it is strictly opt-in.
    pub timing: bool,
}

impl SuiteDescriptor {
    /// Descriptor with the suite's default grid, default budget, seed 0.
    pub fn new(suite: &str) -> Result<SuiteDescriptor> {
        let def = find_suite(suite)?;
        Ok(SuiteDescriptor {
            suite: def.id.to_string(),
            grid: (def.default_grid)(),
            budget: work_budget(),
            seed: 0,
            jobs: 1,
            timing: false,
        })
    }
}

/// Everything a suite's case function may consult.
pub struct CaseCtx {
    pub params: CaseParams,
    pub budget: u64,
    /// Resolved per-case seed: the case's own, or descriptor seed + index.
    pub seed: u64,
}

/// What a case function reports back; the runner wraps it into a record.
pub struct CaseOutcome {
    pub verdict: Verdict,
    pub judgement: Option<&'static str>,
    pub detail: Value,
    pub counterexample: Option<Value>,
    pub homology: Option<HomologyDoc>,
    pub bound: Option<BoundDoc>,
}

impl CaseOutcome {
    pub fn verified(detail: Value) -> CaseOutcome {
        CaseOutcome {
            verdict: Verdict::Verified,
            judgement: None,
            detail,
            counterexample: None,
            homology: None,
            bound: None,
        }
    }

    pub fn refuted(detail: Value, counterexample: Value) -> CaseOutcome {
        CaseOutcome {
            verdict: Verdict::RefutedWithCounterexample,
            judgement: None,
            detail,
            counterexample: Some(counterexample),
            homology: None,
            bound: None,
        }
    }
}

/// One emitted case row.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct CaseRecord {
    pub case: usize,
    pub inputs: CaseParams,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judgement: Option<String>,
    pub detail: Value,
    pub counterexample: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<HomologyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

/// Verdict tallies for a whole run.
#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq, Default, Debug)]
pub struct VerdictCounts {
    pub verified: u64,
    pub refuted: u64,
    pub skipped_budget: u64,
    pub no_witness: u64,
}

/// Full run output. `schema_version` guards downstream parsers; the rest
/// is provenance plus the ordered case records.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct RunReport {
    pub schema_version: u32,
    pub suite: String,
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub budget: u64,
    pub summary: VerdictCounts,
    pub cases: Vec<CaseRecord>,
}

impl RunReport {
    pub fn refutations(&self) -> u64 {
        self.summary.refuted
    }

    /// The process exit contract: success exactly when nothing was refuted.
    pub fn exit_ok(&self) -> bool {
        self.summary.refuted == 0
    }
}

/// A registered suite: stable id, a one-line description of what it
/// checks, the default grid, and the per-case body.
pub struct SuiteDef {
    pub id: &'static str,
    pub about: &'static str,
    pub default_grid: fn() -> Vec<CaseParams>,
    pub run: fn(&CaseCtx) -> Result<CaseOutcome>,
}

pub fn find_suite(id: &str) -> Result<&'static SuiteDef> {
    registry()
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::invalid(format!("unknown suite {id:?}")))
}

/// Run every grid case of a descriptor and aggregate the verdicts in grid
/// order. Case bodies run in parallel up to `jobs` workers; aggregation is
/// position-keyed, so the report is independent of scheduling.
pub fn run_suite(desc: &SuiteDescriptor) -> Result<RunReport> {
    let def = find_suite(&desc.suite)?;
    if desc.grid.is_empty() {
        return Err(Error::invalid("suite grid is empty"));
    }

    let slots: Mutex<Vec<Option<Result<CaseRecord>>>> =
        Mutex::new((0..desc.grid.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = desc.jobs.max(1).min(desc.grid.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= desc.grid.len() {
                    break;
                }
                let record = run_case(def, desc, idx);
                slots.lock().unwrap()[idx] = Some(record);
            });
        }
    });

    let mut cases = Vec::with_capacity(desc.grid.len());
    let mut summary = VerdictCounts::default();
    for slot in slots.into_inner().unwrap() {
        let record = slot.expect("every case index was claimed by a worker")?;
        match record.verdict.as_str() {
            "verified" => summary.verified += 1,
            "refuted-with-counterexample" => summary.refuted += 1,
            "skipped-budget" => summary.skipped_budget += 1,
            "no-witness" => summary.no_witness += 1,
            other => unreachable!("runner produced verdict {other}"),
        }
        cases.push(record);
    }

    Ok(RunReport {
        schema_version: 1,
        suite: def.id.to_string(),
        tool: "phan".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: desc.seed,
        budget: desc.budget,
        summary,
        cases,
    })
}

fn run_case(def: &SuiteDef, desc: &SuiteDescriptor, idx: usize) -> Result<CaseRecord> {
    let params = desc.grid[idx].clone();
    let ctx = CaseCtx {
        seed: params.seed.unwrap_or(desc.seed.wrapping_add(idx as u64)),
        params,
        budget: desc.budget,
    };
    let started = Instant::now();
    let outcome = match (def.run)(&ctx) {
        Ok(outcome) => outcome,
        // A blown budget is an honest terminal state, not a run failure.
        Err(Error::Budget {
            what,
            needed,
            budget,
        }) => CaseOutcome {
            verdict: Verdict::SkippedBudget,
            judgement: None,
            detail: serde_json::json!({
                "budget": budget,
                "needed": needed,
                "work": what,
            }),
            counterexample: None,
            homology: None,
            bound: None,
        },
        Err(other) => return Err(other),
    };
    Ok(CaseRecord {
        case: idx,
        inputs: ctx.params,
        verdict: outcome.verdict.to_string(),
        judgement: outcome.judgement.map(str::to_string),
        detail: outcome.detail,
        counterexample: outcome.counterexample,
        homology: outcome.homology,
        bound: outcome.bound,
        millis: desc
            .timing
            .then(|| started.elapsed().as_millis().min(u64::MAX as u128) as u64),
    })
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

/// Pretty JSON with a trailing newline; parse → emit reproduces the bytes.
pub fn emit_json(report: &RunReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("reports always serialize");
    out.push('\n');
    out
}

pub fn parse_report(text: &str) -> Result<RunReport> {
    Ok(serde_json::from_str(text)?)
}

/// Flatten the per-case rows. Nested values (detail, counterexample) are
/// embedded as JSON strings in their cells.
pub fn emit_csv(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(
        "suite,case,type,n,m,field_order,sigma,variant,seed,verdict,judgement,detail,counterexample\n",
    );
    for case in &report.cases {
        let p = &case.inputs;
        let row = [
            report.suite.clone(),
            case.case.to_string(),
            p.kind.clone().unwrap_or_default(),
            p.n.map(|v| v.to_string()).unwrap_or_default(),
            p.m.map(|v| v.to_string()).unwrap_or_default(),
            p.field_order.map(|v| v.to_string()).unwrap_or_default(),
            p.sigma.clone().unwrap_or_default(),
            p.variant.clone().unwrap_or_default(),
            p.seed.map(|v| v.to_string()).unwrap_or_default(),
            case.verdict.clone(),
            case.judgement.clone().unwrap_or_default(),
            case.detail.to_string(),
            case.counterexample
                .as_ref()
                .map(|v| v.to_string())
                .unwrap_or_default(),
        ];
        let escaped: Vec<String> = row.iter().map(|cell| csv_cell(cell)).collect();
        out.push_str(&escaped.join(","));
        out.push('\n');
    }
    out
}

fn csv_cell(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

// ---------------------------------------------------------------------------
// Single-shot pipelines behind the non-suite CLI commands
// ---------------------------------------------------------------------------

/// Enumerate a geometry document into its order complex, run homology, and
/// wrap the result as a one-case report. Sub-bound instances are reported
/// exploratory — computed and emitted, but never judged.
pub fn pipeline_enumerate_homology(
    doc: &GeometryDoc,
    dim_cap: Option<usize>,
    mode: HomologyMode,
    budget: u64,
) -> Result<RunReport> {
    let geometry = doc.decode()?;
    let bound = geometry.field_bound();
    let vertices = geometry.vertices(budget)?;
    let all: Vec<_> = vertices.iter_all().cloned().collect();
    let complex = order_complex(&all)?;
    let report = reduced_homology(
        &complex,
        &HomologyOptions {
            mode,
            dim_cap,
            face_budget: budget,
            ..HomologyOptions::default()
        },
    )?;
    let outcome = CaseOutcome {
        verdict: Verdict::Verified,
        judgement: (!bound.ok).then_some("exploratory"),
        detail: serde_json::json!({
            "vertex_counts": vertices.counts(),
            "faces": complex.face_count(),
        }),
        counterexample: None,
        homology: Some(HomologyDoc::encode(&report)),
        bound: Some(BoundDoc::encode(&bound)),
    };
    Ok(singleton_report("pipeline-homology", outcome))
}

/// Build the complex for a geometry document without computing homology;
/// this is the `enumerate` half of the pipeline.
pub fn enumerate_complex(doc: &GeometryDoc, budget: u64) -> Result<(ComplexDoc, BoundDoc)> {
    let geometry = doc.decode()?;
    let bound = geometry.field_bound();
    let vertices = geometry.vertices(budget)?;
    let all: Vec<_> = vertices.iter_all().cloned().collect();
    let complex = order_complex(&all)?;
    Ok((ComplexDoc::encode(&complex), BoundDoc::encode(&bound)))
}

/// Flip-flop statistics for a flip document, optionally cross-checked
/// against the assembled geometry, as a one-case report.
pub fn pipeline_flipflop(doc: &FlipDoc, compare_gpg: bool, budget: u64) -> Result<RunReport> {
    let (building, flip) = doc.decode(budget)?;
    let whole = building.whole_residue();
    let system = crate::building::flip::flip_flop_system(&building, &flip, &whole)?;
    let fixed = crate::building::flip::count_fixed_chambers(&building, &flip)?;
    let mut detail = serde_json::json!({
        "chambers": building.chamber_count(),
        "flip_flop_chambers": system.chambers.len(),
        "min_codistance": system.min_codistance,
        "max_codistance": system.max_codistance,
        "fixed_chambers": fixed,
    });
    let mut verdict = Verdict::Verified;
    let mut counterexample = None;
    if compare_gpg {
        let report = crate::building::flip::gpg_compare(&building, &flip, &whole, budget)?;
        detail["gpg_chambers"] = report.geometry_size.into();
        detail["gpg_model"] = report.model_kind.to_string().into();
        detail["gpg_steps"] = report.steps.len().into();
        if !report.verified() {
            verdict = Verdict::RefutedWithCounterexample;
            counterexample = Some(serde_json::json!({
                "mismatch": report.counterexample,
            }));
        }
    }
    let outcome = CaseOutcome {
        verdict,
        judgement: None,
        detail,
        counterexample,
        homology: None,
        bound: None,
    };
    Ok(singleton_report("pipeline-flipflop", outcome))
}

fn singleton_report(name: &str, outcome: CaseOutcome) -> RunReport {
    let mut summary = VerdictCounts::default();
    match outcome.verdict {
        Verdict::Verified => summary.verified = 1,
        Verdict::RefutedWithCounterexample => summary.refuted = 1,
        Verdict::SkippedBudget => summary.skipped_budget = 1,
        Verdict::NoWitness => summary.no_witness = 1,
    }
    RunReport {
        schema_version: 1,
        suite: name.to_string(),
        tool: "phan".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: 0,
        budget: work_budget(),
        summary,
        cases: vec![CaseRecord {
            case: 0,
            inputs: CaseParams::default(),
            verdict: outcome.verdict.to_string(),
            judgement: outcome.judgement.map(str::to_string),
            detail: outcome.detail,
            counterexample: outcome.counterexample,
            homology: outcome.homology,
            bound: outcome.bound,
            millis: None,
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_and_empty_grid_are_errors() {
        assert!(find_suite("no-such-suite").is_err());
        let mut desc = SuiteDescriptor::new("weyl-cells").unwrap();
        desc.grid.clear();
        assert!(matches!(run_suite(&desc), Err(Error::Invalid(_))));
    }

    #[test]
    fn registry_is_closed_and_self_describing() {
        let ids: Vec<&str> = registry().iter().map(|s| s.id).collect();
        assert_eq!(
            ids,
            vec![
                "lemma-4.4",
                "lemma-5.4",
                "lemma-5.5",
                "lemma-5.6",
                "lemma-6.5",
                "weyl-cells",
                "prop-6.6",
                "thm-6.8",
                "main-theorem-n2",
                "filtration-links",
                "homology-oracles",
                "cm-links",
            ]
        );
        for def in registry() {
            assert!(!def.about.is_empty());
            assert!(!(def.default_grid)().is_empty(), "{} grid empty", def.id);
        }
    }

    #[test]
    fn reports_are_deterministic_and_round_trip() {
        let mut desc = SuiteDescriptor::new("weyl-cells").unwrap();
        desc.jobs = 4;
        let a = run_suite(&desc).unwrap();
        let b = run_suite(&desc).unwrap();
        let text_a = emit_json(&a);
        assert_eq!(text_a, emit_json(&b));
        let parsed = parse_report(&text_a).unwrap();
        assert_eq!(emit_json(&parsed), text_a);
        assert!(a.exit_ok());
    }

    #[test]
    fn csv_flattens_one_row_per_case() {
        let desc = SuiteDescriptor::new("weyl-cells").unwrap();
        let report = run_suite(&desc).unwrap();
        let csv = emit_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), report.cases.len() + 1);
        assert!(lines[0].starts_with("suite,case,type,"));
        assert!(lines[1].starts_with("weyl-cells,0,"));
        // Embedded JSON cells must be quoted.
        assert!(lines[1].contains("\"{"));
    }

    #[test]
    fn timing_is_off_by_default_and_opt_in() {
        let mut desc = SuiteDescriptor::new("weyl-cells").unwrap();
        let silent = run_suite(&desc).unwrap();
        assert!(silent.cases.iter().all(|c| c.millis.is_none()));
        desc.timing = true;
        let timed = run_suite(&desc).unwrap();
        assert!(timed.cases.iter().all(|c| c.millis.is_some()));
    }

    #[test]
    fn budget_error_becomes_a_skip_verdict() {
        let mut desc = SuiteDescriptor::new("cm-links").unwrap();
        // Keep only the deliberately oversized exploratory case.
        desc.grid.retain(|c| c.n == Some(3));
        assert_eq!(desc.grid.len(), 1);
        let report = run_suite(&desc).unwrap();
        assert_eq!(report.summary.skipped_budget, 1);
        assert_eq!(report.cases[0].verdict, "skipped-budget");
        assert!(report.exit_ok());
    }
}
