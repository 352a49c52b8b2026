use std::sync::Arc;

use proptest::prelude::*;

use molars::corpus::random::{generate, RandomConfig};
use molars::corpus::summary::{graph_shapes, Doc, GRAPH1};
use molars::corpus::{metamodel_source, Task, TaskId};
use molars::interpreter::Interpreter;
use molars::metamodel::Metamodel;
use molars::model::{export_model, import_model};

fn graph1() -> Metamodel {
    Metamodel::from_json(metamodel_source("graph1").unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn import_then_export_is_the_identity(seed in any::<u64>()) {
        let doc = generate(seed, &RandomConfig::default()).document;
        let mm = graph1();
        let model = import_model(&doc, Arc::new(mm.augment_navigability())).unwrap();
        prop_assert_eq!(export_model(&model, &mm), doc);
    }

    #[test]
    fn random_models_conform(seed in any::<u64>()) {
        let doc = generate(seed, &RandomConfig::default()).document;
        let model = import_model(&doc, Arc::new(graph1())).unwrap();
        prop_assert!(model.check_conformance().is_empty());
    }

    #[test]
    fn reversal_is_an_involution(seed in any::<u64>()) {
        let doc = generate(seed, &RandomConfig::default()).document;
        let task = Task::get(TaskId::P3A);
        let interp = Interpreter::new();
        let once = task.run(&interp, &doc).unwrap().1.unwrap();
        let twice = task.run(&interp, &once).unwrap().1.unwrap();
        let shapes = |d: &str| graph_shapes(&Doc::parse(d).unwrap(), &GRAPH1);
        prop_assert_eq!(shapes(&doc), shapes(&twice));
    }

    #[test]
    fn closure_is_idempotent(seed in any::<u64>()) {
        let doc = generate(seed, &RandomConfig::default()).document;
        let task = Task::get(TaskId::P6O);
        let interp = Interpreter::new();
        let once = task.run(&interp, &doc).unwrap().1.unwrap();
        let twice = task.run(&interp, &once).unwrap().1.unwrap();
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn augmentation_is_idempotent_and_strippable() {
    let mm = graph1();
    let augmented = mm.augment_navigability();
    assert_eq!(augmented.augment_navigability(), augmented);
    assert_eq!(augmented.strip(), mm);
}
