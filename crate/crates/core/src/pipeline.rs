//! End-to-end transformation: prepare the working metamodel, compile the
//! program, import the input model, run the entry procedure, export.
//!
//! The working metamodel is the merge of all input metamodels, extended with
//! the temporary extension documents and then made navigable in both
//! directions. Export writes only what belongs to the original target
//! metamodels.

use std::sync::Arc;

use crate::dsl::{self, Diagnostic};
use crate::interpreter::{ExecStatus, Interpreter, Program};
use crate::metamodel::{Metamodel, MetamodelError};
use crate::model::{export_model, export_unstripped, import_model, Model, ModelError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("metamodel: {0}")]
    Metamodel(#[from] MetamodelError),
    #[error("program has {} error(s)", .0.len())]
    Program(Vec<Diagnostic>),
    #[error("model: {0}")]
    Model(#[from] ModelError),
}

pub fn working_metamodel(
    parts: &[Metamodel],
    extensions: &[&str],
) -> Result<Metamodel, MetamodelError> {
    let mut mm = Metamodel::merge(parts)?;
    for ext in extensions {
        mm = mm.extend(ext)?;
    }
    Ok(mm.augment_navigability())
}

/// A compiled transformation, ready to run on any number of models.
#[derive(Debug, Clone)]
pub struct Transformation {
    working: Arc<Metamodel>,
    target: Metamodel,
    program: Program,
}

impl Transformation {
    pub fn new(
        metamodels: &[Metamodel],
        extensions: &[&str],
        targets: &[Metamodel],
        program_text: &str,
    ) -> Result<Transformation, PipelineError> {
        let working = Arc::new(working_metamodel(metamodels, extensions)?);
        let target = Metamodel::merge(targets)?;
        let program = dsl::compile(program_text, &working).map_err(PipelineError::Program)?;
        Ok(Transformation {
            working,
            target,
            program,
        })
    }

    pub fn working(&self) -> &Arc<Metamodel> {
        &self.working
    }

    pub fn target(&self) -> &Metamodel {
        &self.target
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn import(&self, document: &str) -> Result<Model, ModelError> {
        import_model(document, Arc::clone(&self.working))
    }

    pub fn run(&self, interpreter: &Interpreter, entry: &str, model: &mut Model) -> ExecStatus {
        interpreter.run_entry(&self.program, entry, model)
    }

    /// Canonical JSON of `model`: restricted to the target metamodel, or the
    /// whole working model when `strip` is false.
    pub fn export(&self, model: &Model, strip: bool) -> String {
        if strip {
            export_model(model, &self.target)
        } else {
            export_unstripped(model)
        }
    }

    /// Imports `document`, runs `entry` and exports the result. The exported
    /// document is `None` when the run failed.
    pub fn apply(
        &self,
        interpreter: &Interpreter,
        entry: &str,
        document: &str,
        strip: bool,
    ) -> Result<(ExecStatus, Option<String>), PipelineError> {
        let mut model = self.import(document)?;
        let status = self.run(interpreter, entry, &mut model);
        let out = status.is_completed().then(|| self.export(&model, strip));
        Ok((status, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRAPH: &str = r#"{"name": "g", "classes": [{"name": "Graph"}, {"name": "Node"}],
        "associations": [{"name": "nodes", "src": "Graph", "trg": "Node", "trgEnd": "nodes"}]}"#;
    const MARK: &str = r#"{"name": "mark", "classes": [{"name": "Mark"}],
        "associations": [{"name": "marks", "src": "Mark", "trg": "Node", "trgEnd": "node"}]}"#;
    const INPUT: &str = r#"{"conformsTo": "g", "objects": [
        {"id": "g", "class": "Graph", "attrs": {}}, {"id": "n", "class": "Node", "attrs": {}}],
        "links": [{"assoc": "Graph.nodes", "src": "g", "trg": "n"}]}"#;

    #[test]
    fn temporaries_are_stripped_on_export() {
        let mm = Metamodel::from_json(GRAPH).unwrap();
        let program = r#"
procedure main() {
    rule mark {
        element n : Node;
        element m : Mark create;
        link m -[Mark.node]-> n create;
    }
}"#;
        let t = Transformation::new(
            std::slice::from_ref(&mm),
            &[MARK],
            std::slice::from_ref(&mm),
            program,
        )
        .unwrap();
        let (status, out) = t.apply(&Interpreter::new(), "main", INPUT, true).unwrap();
        assert!(status.is_completed());
        let out = out.unwrap();
        assert!(!out.contains("Mark"), "{out}");
        let unstripped = t
            .apply(&Interpreter::new(), "main", INPUT, false)
            .unwrap()
            .1
            .unwrap();
        assert!(unstripped.contains("Mark.node"), "{unstripped}");
    }

    #[test]
    fn identity_round_trip() {
        let mm = Metamodel::from_json(GRAPH).unwrap();
        let t = Transformation::new(
            std::slice::from_ref(&mm),
            &[],
            std::slice::from_ref(&mm),
            "procedure main() { var x: Integer; }",
        )
        .unwrap();
        let out = t
            .apply(&Interpreter::new(), "main", INPUT, true)
            .unwrap()
            .1
            .unwrap();
        let a: serde_json::Value = serde_json::from_str(&out).unwrap();
        let b: serde_json::Value = serde_json::from_str(INPUT).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn program_errors_are_reported() {
        let mm = Metamodel::from_json(GRAPH).unwrap();
        let err = Transformation::new(
            std::slice::from_ref(&mm),
            &[],
            std::slice::from_ref(&mm),
            "procedure main() { x := 1; }",
        )
        .unwrap_err();
        assert!(matches!(err, PipelineError::Program(d) if d.len() == 1));
    }
}
