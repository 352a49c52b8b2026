use molars::corpus::check::{check_bundled_task, CheckConfig};
use molars::corpus::summary::{summarize, Summary};
use molars::corpus::{fixture_source, Task, TaskId};
use molars::interpreter::{ExecStatus, Interpreter};
use molars::oracle::oracle_run;

fn run(id: TaskId, fixture: &str) -> Summary {
    let task = Task::get(id);
    let (status, out) = task
        .run(&Interpreter::new(), fixture_source(fixture).unwrap())
        .unwrap();
    assert_eq!(status, ExecStatus::Completed);
    summarize(task.summary, &out.unwrap()).unwrap()
}

#[test]
fn every_task_matches_its_oracle_on_every_fixture() {
    let cfg = CheckConfig::default();
    for id in TaskId::ALL {
        let report = check_bundled_task(id, &cfg, &[]);
        assert!(report.passed(), "{:#?}", report.failures);
        assert_eq!(report.fixture_runs, Task::get(id).fixtures.len());
    }
}

#[test]
fn counting_tasks_on_g_a() {
    for (id, n) in [
        (TaskId::P2_1, 5),
        (TaskId::P2_2, 1),
        (TaskId::P2_3, 1),
        (TaskId::P2_5O, 1),
        (TaskId::P2_4, 6),
        (TaskId::P2_4A, 6),
    ] {
        assert_eq!(run(id, "g_a"), Summary::Counts { values: vec![n] }, "{id}");
    }
}

#[test]
fn counting_tasks_on_two_graphs_report_per_graph() {
    let Summary::Counts { values } = run(TaskId::P2_1, "two_graphs") else {
        panic!()
    };
    assert_eq!(values.len(), 2);
}

#[test]
fn greetings() {
    assert_eq!(
        run(TaskId::P1_3, "greeting"),
        oracle_run(TaskId::P1_3, fixture_source("greeting").unwrap()).unwrap()
    );
    let Summary::Strings { values } = run(TaskId::P1_3, "greeting") else {
        panic!()
    };
    assert_eq!(values.len(), 1);
}

#[test]
fn deletion_keeps_unrelated_edges() {
    let Summary::Deletion {
        remaining_edges, ..
    } = run(TaskId::P5_2O, "g_a")
    else {
        panic!()
    };
    assert_eq!(remaining_edges, ["e2", "e5", "e6"]);
}
