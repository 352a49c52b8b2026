//! The bundled task suite: sixteen transformation programs over a result
//! metamodel and three graph encodings, with fixture models.
//!
//! Task ids follow the pattern `pX_Y`, where `_o` marks optional tasks and
//! `_a` alternative solutions. All graph tasks use an outer loop over graphs
//! and call a worker procedure per graph. Every task's semantics is also
//! implemented directly in [`crate::oracle`].

pub mod check;
pub mod patterns;
pub mod random;
pub mod summary;

use std::fmt;
use std::str::FromStr;

use crate::interpreter::{ExecStatus, Interpreter};
use crate::metamodel::Metamodel;
use crate::pipeline::{PipelineError, Transformation};
use summary::{SummaryKind, GRAPH1, GRAPH2, GRAPH3};

/// Every task program starts here.
pub const ENTRY: &str = "main";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskId {
    P1_1,
    P1_2,
    P1_3,
    P2_1,
    P2_2,
    P2_3,
    P2_4,
    P2_4A,
    P2_5O,
    P3A,
    P4_1,
    P4_2O,
    P5_1,
    P5_2O,
    P6O,
    P6OR2,
}

impl TaskId {
    pub const ALL: [TaskId; 16] = [
        TaskId::P1_1,
        TaskId::P1_2,
        TaskId::P1_3,
        TaskId::P2_1,
        TaskId::P2_2,
        TaskId::P2_3,
        TaskId::P2_4,
        TaskId::P2_4A,
        TaskId::P2_5O,
        TaskId::P3A,
        TaskId::P4_1,
        TaskId::P4_2O,
        TaskId::P5_1,
        TaskId::P5_2O,
        TaskId::P6O,
        TaskId::P6OR2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::P1_1 => "p1_1",
            TaskId::P1_2 => "p1_2",
            TaskId::P1_3 => "p1_3",
            TaskId::P2_1 => "p2_1",
            TaskId::P2_2 => "p2_2",
            TaskId::P2_3 => "p2_3",
            TaskId::P2_4 => "p2_4",
            TaskId::P2_4A => "p2_4_a",
            TaskId::P2_5O => "p2_5_o",
            TaskId::P3A => "p3_a",
            TaskId::P4_1 => "p4_1",
            TaskId::P4_2O => "p4_2_o",
            TaskId::P5_1 => "p5_1",
            TaskId::P5_2O => "p5_2_o",
            TaskId::P6O => "p6_o",
            TaskId::P6OR2 => "p6_o_r2",
        }
    }

    /// Tasks whose input is a graph1 model.
    pub fn is_graph_task(self) -> bool {
        !matches!(self, TaskId::P1_1 | TaskId::P1_2 | TaskId::P1_3)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown task `{0}`")]
pub struct UnknownTask(pub String);

impl FromStr for TaskId {
    type Err = UnknownTask;

    fn from_str(s: &str) -> Result<TaskId, UnknownTask> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownTask(s.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct Task {
    pub id: TaskId,
    /// Metamodels merged into the working metamodel.
    pub metamodels: &'static [&'static str],
    pub extensions: &'static [&'static str],
    /// Metamodels the result is exported to.
    pub targets: &'static [&'static str],
    pub fixtures: &'static [&'static str],
    pub summary: SummaryKind,
}

const GRAPH_FIXTURES: &[&str] = &["g_a", "chain", "triangle", "empty_graph", "two_graphs"];

impl Task {
    pub fn get(id: TaskId) -> Task {
        use TaskId::*;
        let (metamodels, extensions, targets, fixtures, summary): (
            &'static [&'static str],
            &'static [&'static str],
            &'static [&'static str],
            &'static [&'static str],
            SummaryKind,
        ) = match id {
            P1_1 | P1_2 => (
                &["result"],
                &[],
                &["result"],
                &["empty_result"],
                SummaryKind::Objects,
            ),
            P1_3 => (
                &["result"],
                &[],
                &["result"],
                &["greeting", "greeting_hi", "empty_result"],
                SummaryKind::Strings,
            ),
            P2_1 | P2_2 | P2_3 | P2_4 | P2_5O => (
                &["graph1", "result"],
                &[],
                &["graph1", "result"],
                GRAPH_FIXTURES,
                SummaryKind::Counts,
            ),
            P2_4A => (
                &["graph1", "result"],
                &["circle"],
                &["graph1", "result"],
                GRAPH_FIXTURES,
                SummaryKind::Counts,
            ),
            P3A | P6O => (
                &["graph1"],
                &[],
                &["graph1"],
                GRAPH_FIXTURES,
                SummaryKind::Graphs(GRAPH1),
            ),
            P6OR2 => (
                &["graph1"],
                &["inserted"],
                &["graph1"],
                GRAPH_FIXTURES,
                SummaryKind::Graphs(GRAPH1),
            ),
            P5_1 | P5_2O => (
                &["graph1"],
                &[],
                &["graph1"],
                GRAPH_FIXTURES,
                SummaryKind::Deletion,
            ),
            P4_1 => (
                &["graph1", "graph2"],
                &["trace2"],
                &["graph2"],
                GRAPH_FIXTURES,
                SummaryKind::Graphs(GRAPH2),
            ),
            P4_2O => (
                &["graph1", "graph3"],
                &["trace3"],
                &["graph3"],
                GRAPH_FIXTURES,
                SummaryKind::Graphs(GRAPH3),
            ),
        };
        Task {
            id,
            metamodels,
            extensions,
            targets,
            fixtures,
            summary,
        }
    }

    pub fn program(&self) -> &'static str {
        program_source(self.id)
    }

    pub fn program_path(&self) -> String {
        format!("corpus/programs/{}.mt", self.id)
    }

    pub fn transformation(&self) -> Result<Transformation, PipelineError> {
        let load = |names: &[&str]| -> Result<Vec<Metamodel>, PipelineError> {
            names
                .iter()
                .map(|n| {
                    Ok(Metamodel::from_json(
                        metamodel_source(n).expect("bundled metamodel"),
                    )?)
                })
                .collect()
        };
        let extensions: Vec<&str> = self
            .extensions
            .iter()
            .map(|e| extension_source(e).expect("bundled extension"))
            .collect();
        Transformation::new(
            &load(self.metamodels)?,
            &extensions,
            &load(self.targets)?,
            self.program(),
        )
    }

    /// Runs the task on `document` and exports the stripped result.
    pub fn run(
        &self,
        interpreter: &Interpreter,
        document: &str,
    ) -> Result<(ExecStatus, Option<String>), PipelineError> {
        self.transformation()?
            .apply(interpreter, ENTRY, document, true)
    }
}

macro_rules! bundled {
    ($dir:literal, $ext:literal, $name:expr, [$($file:literal),* $(,)?]) => {
        match $name {
            $($file => Some(include_str!(concat!("../../../../corpus/", $dir, "/", $file, ".", $ext))),)*
            _ => None,
        }
    };
}

pub fn metamodel_source(name: &str) -> Option<&'static str> {
    bundled!(
        "metamodels",
        "json",
        name,
        ["graph1", "graph2", "graph3", "result"]
    )
}

pub fn extension_source(name: &str) -> Option<&'static str> {
    bundled!(
        "extensions",
        "json",
        name,
        ["trace2", "trace3", "circle", "inserted"]
    )
}

pub fn fixture_source(name: &str) -> Option<&'static str> {
    bundled!(
        "fixtures",
        "json",
        name,
        [
            "g_a",
            "chain",
            "triangle",
            "empty_graph",
            "two_graphs",
            "empty_result",
            "greeting",
            "greeting_hi",
        ]
    )
}

pub fn program_source(id: TaskId) -> &'static str {
    bundled!(
        "programs",
        "mt",
        id.as_str(),
        [
            "p1_1", "p1_2", "p1_3", "p2_1", "p2_2", "p2_3", "p2_4", "p2_4_a", "p2_5_o", "p3_a",
            "p4_1", "p4_2_o", "p5_1", "p5_2_o", "p6_o", "p6_o_r2",
        ]
    )
    .expect("every task has a program")
}

/// The checked-in oracle predictions for a task's fixtures.
pub fn expected_source(id: TaskId) -> &'static str {
    bundled!(
        "expected",
        "json",
        id.as_str(),
        [
            "p1_1", "p1_2", "p1_3", "p2_1", "p2_2", "p2_3", "p2_4", "p2_4_a", "p2_5_o", "p3_a",
            "p4_1", "p4_2_o", "p5_1", "p5_2_o", "p6_o", "p6_o_r2",
        ]
    )
    .expect("every task has expected results")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in TaskId::ALL {
            assert_eq!(id.as_str().parse::<TaskId>().unwrap(), id);
        }
        assert!("p7".parse::<TaskId>().is_err());
    }

    #[test]
    fn every_program_compiles() {
        for id in TaskId::ALL {
            if let Err(e) = Task::get(id).transformation() {
                match e {
                    PipelineError::Program(d) => {
                        panic!("{id}:\n{}", crate::dsl::render_diagnostics(id.as_str(), &d))
                    }
                    other => panic!("{id}: {other}"),
                }
            }
        }
    }

    #[test]
    fn every_fixture_is_bundled() {
        for id in TaskId::ALL {
            for f in Task::get(id).fixtures {
                assert!(fixture_source(f).is_some(), "{f}");
            }
        }
    }
}
