//! Engine-versus-oracle checks over fixtures and random models.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::random::{generate_many, RandomConfig, RandomModel};
use super::summary::{graph_shapes, summarize, Doc, Summary, GRAPH1};
use super::{expected_source, fixture_source, Task, TaskId, ENTRY};
use crate::interpreter::{ExecStatus, Interpreter, DEFAULT_ITERATION_CAP};
use crate::model::{canonical_json, import_model};
use crate::oracle::oracle_run;
use crate::pipeline::Transformation;

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub seed: u64,
    pub random_models: usize,
    pub random: RandomConfig,
    pub iteration_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 20_240_601,
            random_models: 200,
            random: RandomConfig::default(),
            iteration_cap: DEFAULT_ITERATION_CAP,
        }
    }
}

impl CheckConfig {
    pub fn models(&self) -> Vec<RandomModel> {
        generate_many(self.seed, self.random_models, &self.random)
    }
}

#[derive(Debug, Clone)]
pub struct TaskReport {
    pub task: TaskId,
    pub fixture_runs: usize,
    pub random_runs: usize,
    pub failures: Vec<String>,
    /// FNV-1a hash over every exported document, in run order.
    pub digest: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

fn fnv1a(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

impl TaskReport {
    fn new(task: TaskId) -> TaskReport {
        TaskReport {
            task,
            fixture_runs: 0,
            random_runs: 0,
            failures: Vec::new(),
            digest: FNV_OFFSET,
        }
    }

    fn record(&mut self, outcome: Option<&CaseOutcome>) {
        let bytes = outcome.map_or(&b"-"[..], |o| o.output.as_bytes());
        self.digest = fnv1a(self.digest, bytes);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Fixture name to oracle summary, as stored under `corpus/expected`.
pub type Expected = BTreeMap<String, Summary>;

pub fn parse_expected(text: &str) -> Result<Expected, String> {
    serde_json::from_str(text).map_err(|e| format!("malformed expected file: {e}"))
}

pub fn render_expected(expected: &Expected) -> String {
    canonical_json(&serde_json::to_value(expected).expect("summaries serialize"))
}

/// Oracle predictions for all fixtures of `task`.
pub fn oracle_expectations(task: TaskId) -> Result<Expected, String> {
    Task::get(task)
        .fixtures
        .iter()
        .map(|f| {
            let doc = fixture_source(f).ok_or_else(|| format!("missing fixture {f}"))?;
            Ok((f.to_string(), oracle_run(task, doc)?))
        })
        .collect()
}

/// Result of running one task on one input document.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub output: String,
    pub engine: Summary,
    pub oracle: Summary,
}

struct Checker {
    task: Task,
    transformation: Transformation,
    target: Arc<crate::metamodel::Metamodel>,
    interpreter: Interpreter,
}

impl Checker {
    fn new(id: TaskId, cfg: &CheckConfig) -> Result<Checker, String> {
        let task = Task::get(id);
        let transformation = task.transformation().map_err(|e| format!("{id}: {e}"))?;
        let target = Arc::new(transformation.target().clone());
        Ok(Checker {
            task,
            transformation,
            target,
            interpreter: Interpreter::new().with_iteration_cap(cfg.iteration_cap),
        })
    }

    fn execute(&self, input: &str) -> Result<String, String> {
        let (status, out) = self
            .transformation
            .apply(&self.interpreter, ENTRY, input, true)
            .map_err(|e| e.to_string())?;
        match status {
            ExecStatus::Completed => Ok(out.expect("completed runs export")),
            ExecStatus::Failed(f) => Err(format!("runtime failure: {f}")),
        }
    }

    /// Runs the engine and the oracle on `input` and collects every
    /// disagreement into `failures`, prefixed with `label`.
    fn case(&self, label: &str, input: &str, failures: &mut Vec<String>) -> Option<CaseOutcome> {
        let id = self.task.id;
        let mut fail = |msg: String| failures.push(format!("{id} on {label}: {msg}"));
        let output = match self.execute(input) {
            Ok(o) => o,
            Err(e) => {
                fail(e);
                return None;
            }
        };
        let engine = match summarize(self.task.summary, &output) {
            Ok(s) => s,
            Err(e) => {
                fail(e);
                return None;
            }
        };
        let oracle = match oracle_run(id, input) {
            Ok(s) => s,
            Err(e) => {
                fail(format!("oracle: {e}"));
                return None;
            }
        };
        if engine != oracle {
            fail(format!("engine {engine} != oracle {oracle}"));
        }
        match import_model(&output, Arc::clone(&self.target)) {
            Ok(m) => {
                for v in m.check_conformance() {
                    fail(format!(
                        "output does not conform to the target metamodel: {}",
                        v.0
                    ));
                }
            }
            Err(e) => fail(format!("output rejected by the target metamodel: {e}")),
        }
        if let Summary::Counts { values } = &engine {
            if matches!(id, TaskId::P2_4 | TaskId::P2_4A) && values.iter().any(|v| v % 3 != 0) {
                fail(format!("circle count {values:?} not divisible by 3"));
            }
        }
        if id == TaskId::P3A {
            match self.execute(&output) {
                Ok(twice) => {
                    let before = Doc::parse(input).map(|d| graph_shapes(&d, &GRAPH1));
                    let after = Doc::parse(&twice).map(|d| graph_shapes(&d, &GRAPH1));
                    if before != after {
                        fail("reversing twice does not restore the graph".to_string());
                    }
                }
                Err(e) => fail(format!("second reversal: {e}")),
            }
        }
        Some(CaseOutcome {
            output,
            engine,
            oracle,
        })
    }
}

/// Runs one task on its fixtures and, for graph tasks, on `models`.
/// `expected` holds the checked-in oracle predictions for the fixtures.
pub fn check_task(
    id: TaskId,
    cfg: &CheckConfig,
    models: &[RandomModel],
    expected: Option<&Expected>,
) -> TaskReport {
    let mut report = TaskReport::new(id);
    let checker = match Checker::new(id, cfg) {
        Ok(c) => c,
        Err(e) => {
            report.failures.push(e);
            return report;
        }
    };
    for fixture in checker.task.fixtures {
        let input = fixture_source(fixture).expect("bundled fixture");
        report.fixture_runs += 1;
        let outcome = checker.case(fixture, input, &mut report.failures);
        report.record(outcome.as_ref());
        if let (Some(outcome), Some(expected)) = (outcome, expected) {
            match expected.get(*fixture) {
                Some(e) if *e == outcome.oracle => {}
                Some(_) => report.failures.push(format!(
                    "{id} on {fixture}: oracle disagrees with the checked-in expectation"
                )),
                None => report
                    .failures
                    .push(format!("{id} on {fixture}: no checked-in expectation")),
            }
        }
    }
    if id.is_graph_task() {
        for m in models {
            report.random_runs += 1;
            let outcome = checker.case(
                &format!("random model {}", m.seed),
                &m.document,
                &mut report.failures,
            );
            report.record(outcome.as_ref());
        }
    }
    report
}

/// Runs one task on one document and returns the engine summary, the oracle
/// summary and the exported output.
pub fn run_case(id: TaskId, input: &str, cfg: &CheckConfig) -> Result<CaseOutcome, Vec<String>> {
    let checker = Checker::new(id, cfg).map_err(|e| vec![e])?;
    let mut failures = Vec::new();
    match checker.case("input", input, &mut failures) {
        Some(o) if failures.is_empty() => Ok(o),
        _ => Err(failures),
    }
}

/// Checks that the two circle-counting solutions agree on every model.
pub fn circle_solutions_agree(cfg: &CheckConfig, models: &[RandomModel]) -> Vec<String> {
    let (a, b) = match (
        Checker::new(TaskId::P2_4, cfg),
        Checker::new(TaskId::P2_4A, cfg),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return vec![e],
    };
    let mut failures = Vec::new();
    let fixtures = Task::get(TaskId::P2_4)
        .fixtures
        .iter()
        .map(|f| (f.to_string(), fixture_source(f).expect("bundled")));
    let randoms = models
        .iter()
        .map(|m| (format!("random model {}", m.seed), m.document.as_str()));
    for (label, doc) in fixtures.chain(randoms) {
        match (a.execute(doc), b.execute(doc)) {
            (Ok(x), Ok(y)) => {
                let sx = summarize(a.task.summary, &x);
                let sy = summarize(b.task.summary, &y);
                if sx != sy {
                    failures.push(format!(
                        "p2_4 and p2_4_a disagree on {label}: {sx:?} vs {sy:?}"
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("{label}: {e}")),
        }
    }
    failures
}

/// [`check_task`] against the checked-in expectations of `id`.
pub fn check_bundled_task(id: TaskId, cfg: &CheckConfig, models: &[RandomModel]) -> TaskReport {
    match parse_expected(expected_source(id)) {
        Ok(e) => check_task(id, cfg, models, Some(&e)),
        Err(msg) => {
            let mut report = TaskReport::new(id);
            report.failures.push(format!("{id}: {msg}"));
            report
        }
    }
}

/// Everything `corpus-check` runs, sequentially.
pub fn corpus_check(cfg: &CheckConfig) -> (Vec<TaskReport>, Vec<String>) {
    let models = cfg.models();
    let reports = TaskId::ALL
        .into_iter()
        .map(|id| check_bundled_task(id, cfg, &models))
        .collect();
    (reports, circle_solutions_agree(cfg, &models))
}
