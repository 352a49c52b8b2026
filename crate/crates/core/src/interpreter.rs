//! Executes lowered programs against a model.
//!
//! Statements run in order. A rule is matched once; if it has no match its
//! `else` block runs (an empty or missing `else` just continues). A foreach
//! loop takes its candidate set when it starts and re-checks each candidate
//! against the current model before running the body, so instances created
//! or invalidated by earlier iterations are skipped. A `while rule` is applied
//! until it no longer matches, up to an iteration cap.

use std::collections::HashMap;
use std::fmt;

use log::trace;

use crate::expr::{eval, Bindings, Datum, EvalError, Expr};
use crate::metamodel::{ClassId, PrimType};
use crate::model::{Model, Value};
use crate::pattern::{
    apply_actions, enumerate_loop, match_rule, rematch_loop_instance, EngineError, Pattern,
};

pub const DEFAULT_ITERATION_CAP: usize = 1_000_000;
pub const DEFAULT_MAX_CALL_DEPTH: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamType {
    Object(ClassId),
    Prim(PrimType),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Procedure {
    pub name: String,
    pub params: Vec<(String, ParamType)>,
    pub body: Vec<Statement>,
}

/// A statement together with its position in a pre-order numbering of the
/// procedure's statements (starting at 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub index: usize,
    pub kind: StatementKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    Rule {
        name: Option<String>,
        pattern: Pattern,
        else_body: Vec<Statement>,
    },
    Foreach {
        loop_var: String,
        pattern: Pattern,
        body: Vec<Statement>,
    },
    While {
        name: Option<String>,
        pattern: Pattern,
    },
    Assign {
        var: String,
        value: Expr,
    },
    Call {
        procedure: String,
        args: Vec<Expr>,
    },
    Var {
        name: String,
        ty: PrimType,
        init: Option<Expr>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    procedures: Vec<Procedure>,
    index: HashMap<String, usize>,
}

impl Program {
    pub fn new(procedures: Vec<Procedure>) -> Program {
        let index = procedures
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), i))
            .collect();
        Program { procedures, index }
    }

    pub fn procedure(&self, name: &str) -> Option<&Procedure> {
        self.index.get(name).map(|&i| &self.procedures[i])
    }

    pub fn procedures(&self) -> &[Procedure] {
        &self.procedures
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeErrorKind {
    #[error("unknown procedure `{0}`")]
    UnknownProcedure(String),
    #[error("`{procedure}` expects {expected} argument(s), got {found}")]
    Arity {
        procedure: String,
        expected: usize,
        found: usize,
    },
    #[error("argument `{param}` of `{procedure}` has the wrong type")]
    ArgumentType { procedure: String, param: String },
    #[error("while rule still matches after {0} applications")]
    IterationCap(usize),
    #[error("call depth limit of {0} exceeded")]
    CallDepth(usize),
    #[error("variable `{0}` is not declared")]
    UnknownVariable(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A runtime failure, located at the innermost procedure and statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub procedure: String,
    pub statement: usize,
    pub kind: RuntimeErrorKind,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", self.procedure, self.statement, self.kind)
    }
}

impl std::error::Error for Failure {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecStatus {
    Completed,
    Failed(Failure),
}

impl ExecStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, ExecStatus::Completed)
    }
}

#[derive(Debug, Clone)]
pub struct Interpreter {
    pub iteration_cap: usize,
    pub max_call_depth: usize,
}

impl Default for Interpreter {
    fn default() -> Self {
        Interpreter {
            iteration_cap: DEFAULT_ITERATION_CAP,
            max_call_depth: DEFAULT_MAX_CALL_DEPTH,
        }
    }
}

/// Lexically nested scopes of one procedure activation.
struct Frame {
    scopes: Vec<Bindings>,
}

impl Frame {
    fn flatten(&self) -> Bindings {
        let mut out = Bindings::new();
        for scope in &self.scopes {
            for (k, v) in scope.iter() {
                out.set(k, v.clone());
            }
        }
        out
    }

    /// Adds the names of `full` that are not yet visible to the innermost
    /// scope.
    fn absorb(&mut self, visible: &Bindings, full: Bindings) {
        let top = self.scopes.last_mut().expect("frame has a scope");
        for (k, v) in full.iter() {
            if !visible.contains(k) {
                top.set(k, v.clone());
            }
        }
    }

    fn assign(&mut self, name: &str, value: Datum) -> bool {
        for scope in self.scopes.iter_mut().rev() {
            if scope.contains(name) {
                scope.set(name, value);
                return true;
            }
        }
        false
    }
}

type Located<T> = Result<T, Failure>;

impl Interpreter {
    pub fn new() -> Interpreter {
        Interpreter::default()
    }

    pub fn with_iteration_cap(mut self, cap: usize) -> Interpreter {
        self.iteration_cap = cap;
        self
    }

    /// Runs a parameterless entry procedure.
    pub fn run_entry(&self, program: &Program, entry: &str, model: &mut Model) -> ExecStatus {
        self.run_procedure(program, entry, Vec::new(), model)
    }

    pub fn run_procedure(
        &self,
        program: &Program,
        name: &str,
        args: Vec<Datum>,
        model: &mut Model,
    ) -> ExecStatus {
        match self.call(program, name, args, model, 0) {
            Ok(()) => ExecStatus::Completed,
            Err(failure) => ExecStatus::Failed(failure),
        }
    }

    fn call(
        &self,
        program: &Program,
        name: &str,
        args: Vec<Datum>,
        model: &mut Model,
        depth: usize,
    ) -> Located<()> {
        let at_entry = |kind| Failure {
            procedure: name.to_string(),
            statement: 0,
            kind,
        };
        let procedure = program
            .procedure(name)
            .ok_or_else(|| at_entry(RuntimeErrorKind::UnknownProcedure(name.to_string())))?;
        if depth >= self.max_call_depth {
            return Err(at_entry(RuntimeErrorKind::CallDepth(self.max_call_depth)));
        }
        if procedure.params.len() != args.len() {
            return Err(at_entry(RuntimeErrorKind::Arity {
                procedure: name.to_string(),
                expected: procedure.params.len(),
                found: args.len(),
            }));
        }
        let mut scope = Bindings::new();
        for ((param, ty), arg) in procedure.params.iter().zip(args) {
            let ok = match (ty, &arg) {
                (ParamType::Object(class), Datum::Object(id)) => model.is_instance(*id, *class),
                (ParamType::Prim(t), Datum::Value(v)) => v.prim_type() == *t,
                _ => false,
            };
            if !ok {
                return Err(at_entry(RuntimeErrorKind::ArgumentType {
                    procedure: name.to_string(),
                    param: param.clone(),
                }));
            }
            scope.set(param.clone(), arg);
        }
        trace!("enter {name}");
        let mut frame = Frame {
            scopes: vec![scope],
        };
        self.exec_block(
            program,
            procedure,
            &procedure.body,
            &mut frame,
            model,
            depth,
        )?;
        trace!("leave {name}");
        Ok(())
    }

    fn exec_block(
        &self,
        program: &Program,
        procedure: &Procedure,
        block: &[Statement],
        frame: &mut Frame,
        model: &mut Model,
        depth: usize,
    ) -> Located<()> {
        for stmt in block {
            let fail = |kind: RuntimeErrorKind| Failure {
                procedure: procedure.name.clone(),
                statement: stmt.index,
                kind,
            };
            match &stmt.kind {
                StatementKind::Rule {
                    name,
                    pattern,
                    else_body,
                } => {
                    let visible = frame.flatten();
                    match match_rule(pattern, &visible, model).map_err(|e| fail(e.into()))? {
                        Some(found) => {
                            trace!(
                                "{}: rule {} matched",
                                procedure.name,
                                name.as_deref().unwrap_or("_")
                            );
                            let full =
                                apply_actions(pattern, found, model).map_err(|e| fail(e.into()))?;
                            frame.absorb(&visible, full);
                        }
                        None => {
                            trace!(
                                "{}: rule {} failed, else",
                                procedure.name,
                                name.as_deref().unwrap_or("_")
                            );
                            frame.scopes.push(Bindings::new());
                            let r =
                                self.exec_block(program, procedure, else_body, frame, model, depth);
                            frame.scopes.pop();
                            r?;
                        }
                    }
                }
                StatementKind::Foreach {
                    loop_var,
                    pattern,
                    body,
                } => {
                    let visible = frame.flatten();
                    let snapshot = enumerate_loop(pattern, loop_var, &visible, model)
                        .map_err(|e| fail(e.into()))?;
                    trace!(
                        "{}: foreach {loop_var} over {} candidate(s)",
                        procedure.name,
                        snapshot.len()
                    );
                    for candidate in snapshot {
                        let instance = candidate.object(loop_var).expect("loop variable bound");
                        let visible = frame.flatten();
                        let Some(current) =
                            rematch_loop_instance(pattern, loop_var, instance, &visible, model)
                                .map_err(|e| fail(e.into()))?
                        else {
                            continue;
                        };
                        frame.scopes.push(Bindings::new());
                        frame.absorb(&visible, current);
                        let r = self.exec_block(program, procedure, body, frame, model, depth);
                        frame.scopes.pop();
                        r?;
                    }
                }
                StatementKind::While { name, pattern } => {
                    let mut applications = 0usize;
                    loop {
                        let visible = frame.flatten();
                        let Some(found) =
                            match_rule(pattern, &visible, model).map_err(|e| fail(e.into()))?
                        else {
                            break;
                        };
                        if applications == self.iteration_cap {
                            return Err(fail(RuntimeErrorKind::IterationCap(self.iteration_cap)));
                        }
                        apply_actions(pattern, found, model).map_err(|e| fail(e.into()))?;
                        applications += 1;
                    }
                    trace!(
                        "{}: while rule {} applied {applications} time(s)",
                        procedure.name,
                        name.as_deref().unwrap_or("_")
                    );
                }
                StatementKind::Assign { var, value } => {
                    let v = eval(value, &frame.flatten(), model).map_err(|e| fail(e.into()))?;
                    if !frame.assign(var, v) {
                        return Err(fail(RuntimeErrorKind::UnknownVariable(var.clone())));
                    }
                }
                StatementKind::Var { name, ty, init } => {
                    let v = match init {
                        Some(e) => eval(e, &frame.flatten(), model).map_err(|e| fail(e.into()))?,
                        None => Datum::Value(default_value(*ty)),
                    };
                    frame
                        .scopes
                        .last_mut()
                        .expect("frame has a scope")
                        .set(name.clone(), v);
                }
                StatementKind::Call {
                    procedure: callee,
                    args,
                } => {
                    let visible = frame.flatten();
                    let values = args
                        .iter()
                        .map(|a| eval(a, &visible, model))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| fail(e.into()))?;
                    self.call(program, callee, values, model, depth + 1)?;
                }
            }
        }
        Ok(())
    }
}

fn default_value(ty: PrimType) -> Value {
    match ty {
        PrimType::Integer => Value::Integer(0),
        PrimType::String => Value::String(String::new()),
        PrimType::Boolean => Value::Boolean(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinOp;
    use crate::metamodel::Metamodel;
    use crate::pattern::{ClassElement, PatternLink};
    use std::sync::Arc;

    fn stmt(index: usize, kind: StatementKind) -> Statement {
        Statement { index, kind }
    }

    fn mm() -> Arc<Metamodel> {
        Arc::new(
            Metamodel::from_json(
                r#"{"name": "t", "classes": [
                    {"name": "Graph"}, {"name": "Node"},
                    {"name": "IntResult", "attrs": [{"name": "result", "type": "Integer"}]}],
                  "associations": [{"name": "nodes", "src": "Graph", "trg": "Node", "trgEnd": "nodes",
                                    "containment": true}]}"#,
            )
            .unwrap()
            .augment_navigability(),
        )
    }

    /// main loops over graphs and calls count(g), which counts g's nodes.
    fn counting_program(mm: &Metamodel) -> Program {
        let graph = mm.class_id("Graph").unwrap();
        let node = mm.class_id("Node").unwrap();
        let result = mm.class_id("IntResult").unwrap();
        let nodes = mm.resolve_assoc_ref("Graph.nodes").unwrap();
        let main = Procedure {
            name: "main".into(),
            params: vec![],
            body: vec![stmt(
                0,
                StatementKind::Foreach {
                    loop_var: "g".into(),
                    pattern: Pattern {
                        elements: vec![ClassElement::matched("g", graph)],
                        ..Pattern::default()
                    },
                    body: vec![stmt(
                        1,
                        StatementKind::Call {
                            procedure: "count".into(),
                            args: vec![Expr::name("g")],
                        },
                    )],
                },
            )],
        };
        let count = Procedure {
            name: "count".into(),
            params: vec![("g".into(), ParamType::Object(graph))],
            body: vec![
                stmt(
                    0,
                    StatementKind::Var {
                        name: "sk".into(),
                        ty: PrimType::Integer,
                        init: Some(Expr::int(0)),
                    },
                ),
                stmt(
                    1,
                    StatementKind::Foreach {
                        loop_var: "n".into(),
                        pattern: Pattern {
                            elements: vec![
                                ClassElement::reference("g", graph),
                                ClassElement::matched("n", node),
                            ],
                            links: vec![PatternLink::new("g", nodes, "n")],
                            nots: vec![],
                        },
                        body: vec![stmt(
                            2,
                            StatementKind::Assign {
                                var: "sk".into(),
                                value: Expr::binary(BinOp::Add, Expr::name("sk"), Expr::int(1)),
                            },
                        )],
                    },
                ),
                stmt(
                    3,
                    StatementKind::Rule {
                        name: None,
                        pattern: Pattern {
                            elements: vec![ClassElement::created("r", result)
                                .with_assignment("result", Expr::name("sk"))],
                            ..Pattern::default()
                        },
                        else_body: vec![],
                    },
                ),
            ],
        };
        Program::new(vec![main, count])
    }

    #[test]
    fn callee_runs_once_per_graph() {
        let mm = mm();
        let prog = counting_program(&mm);
        let mut m = Model::new(Arc::clone(&mm));
        let graph = mm.class_id("Graph").unwrap();
        let node = mm.class_id("Node").unwrap();
        let nodes = mm.resolve_assoc_ref("Graph.nodes").unwrap();
        for size in [2, 3] {
            let g = m.create_object(graph).unwrap();
            for _ in 0..size {
                let n = m.create_object(node).unwrap();
                m.create_link(nodes, g, n).unwrap();
            }
        }
        assert_eq!(
            Interpreter::new().run_entry(&prog, "main", &mut m),
            ExecStatus::Completed
        );
        let results: Vec<_> = m
            .objects_of_class(mm.class_id("IntResult").unwrap())
            .into_iter()
            .map(|r| m.slot(r, "result").cloned())
            .collect();
        assert_eq!(
            results,
            vec![Some(Value::Integer(2)), Some(Value::Integer(3))]
        );
    }

    #[test]
    fn unknown_entry_and_arity() {
        let mm = mm();
        let prog = counting_program(&mm);
        let mut m = Model::new(mm);
        match Interpreter::new().run_entry(&prog, "nope", &mut m) {
            ExecStatus::Failed(f) => {
                assert!(matches!(f.kind, RuntimeErrorKind::UnknownProcedure(_)))
            }
            other => panic!("{other:?}"),
        }
        match Interpreter::new().run_entry(&prog, "count", &mut m) {
            ExecStatus::Failed(f) => assert!(matches!(
                f.kind,
                RuntimeErrorKind::Arity {
                    expected: 1,
                    found: 0,
                    ..
                }
            )),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn while_rule_hits_cap() {
        let mm = mm();
        let graph = mm.class_id("Graph").unwrap();
        let node = mm.class_id("Node").unwrap();
        let forever = Procedure {
            name: "main".into(),
            params: vec![],
            body: vec![stmt(
                0,
                StatementKind::While {
                    name: None,
                    pattern: Pattern {
                        elements: vec![
                            ClassElement::matched("g", graph),
                            ClassElement::created("n", node),
                        ],
                        ..Pattern::default()
                    },
                },
            )],
        };
        let prog = Program::new(vec![forever]);
        let mut m = Model::new(Arc::clone(&mm));
        m.create_object(graph).unwrap();
        let status = Interpreter::new()
            .with_iteration_cap(50)
            .run_entry(&prog, "main", &mut m);
        match status {
            ExecStatus::Failed(f) => {
                assert_eq!(f.kind, RuntimeErrorKind::IterationCap(50));
                assert_eq!((f.procedure.as_str(), f.statement), ("main", 0));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(m.objects_of_class(node).len(), 50);
    }
}
