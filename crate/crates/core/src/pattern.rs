//! Rule patterns: matching, foreach enumeration, NOT conditions and actions.
//!
//! Matching is a plain backtracking search. Pattern elements are bound in
//! declaration order and each element's candidates are enumerated in object
//! creation order, so the match returned is always the lexicographically first
//! one. Matching is not injective: two elements may bind the same object
//! unless a constraint says otherwise.

use std::collections::HashMap;

use crate::expr::{eval, Bindings, Datum, EvalError, Expr, RebindError};
use crate::metamodel::{AssocId, ClassId};
use crate::model::{Model, ModelError, ObjectId, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Create,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassElement {
    pub name: String,
    pub class: ClassId,
    /// `@name`: bound before the rule runs instead of being matched.
    pub reference: bool,
    pub action: Option<Action>,
    pub constraint: Option<Expr>,
    pub assignments: Vec<(String, Expr)>,
}

impl ClassElement {
    pub fn matched(name: &str, class: ClassId) -> ClassElement {
        ClassElement {
            name: name.to_string(),
            class,
            reference: false,
            action: None,
            constraint: None,
            assignments: Vec::new(),
        }
    }

    pub fn reference(name: &str, class: ClassId) -> ClassElement {
        ClassElement {
            reference: true,
            ..ClassElement::matched(name, class)
        }
    }

    pub fn created(name: &str, class: ClassId) -> ClassElement {
        ClassElement {
            action: Some(Action::Create),
            ..ClassElement::matched(name, class)
        }
    }

    pub fn with_action(mut self, action: Action) -> ClassElement {
        self.action = Some(action);
        self
    }

    pub fn with_constraint(mut self, constraint: Expr) -> ClassElement {
        self.constraint = Some(constraint);
        self
    }

    pub fn with_assignment(mut self, attr: &str, value: Expr) -> ClassElement {
        self.assignments.push((attr.to_string(), value));
        self
    }

    /// Elements bound by the search (as opposed to references and creations).
    pub fn is_searched(&self) -> bool {
        !self.reference && self.action != Some(Action::Create)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternLink {
    pub assoc: AssocId,
    /// Source-end element.
    pub from: String,
    /// Target-end element.
    pub to: String,
    pub action: Option<Action>,
}

impl PatternLink {
    pub fn new(from: &str, assoc: AssocId, to: &str) -> PatternLink {
        PatternLink {
            assoc,
            from: from.to_string(),
            to: to.to_string(),
            action: None,
        }
    }

    pub fn with_action(mut self, action: Action) -> PatternLink {
        self.action = Some(action);
        self
    }

    fn must_exist(&self) -> bool {
        self.action != Some(Action::Create)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pattern {
    pub elements: Vec<ClassElement>,
    pub links: Vec<PatternLink>,
    /// NOT conditions: the match is rejected if any of them can be matched
    /// with the outer bindings fixed.
    pub nots: Vec<Pattern>,
}

impl Pattern {
    pub fn element(&self, name: &str) -> Option<&ClassElement> {
        self.elements.iter().find(|e| e.name == name)
    }

    /// True when applying the pattern changes the model.
    pub fn has_actions(&self) -> bool {
        self.elements
            .iter()
            .any(|e| e.action.is_some() || !e.assignments.is_empty())
            || self.links.iter().any(|l| l.action.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("reference element `@{0}` is not bound")]
    UnresolvedReference(String),
    #[error("reference element `@{0}` points to a deleted object")]
    DeletedReference(String),
    #[error("reference element `@{0}` is bound to an object of the wrong class")]
    ReferenceClass(String),
    #[error("`{0}` is not a matched element of the loophead")]
    NotALoopVariable(String),
    #[error("link endpoint `{0}` is not bound")]
    UnboundEndpoint(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Rebind(#[from] RebindError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Search plan for one pattern: which checks become decidable after each
/// element is bound.
struct Plan<'p> {
    pattern: &'p Pattern,
    /// Indices into `pattern.elements`, in binding order.
    order: Vec<usize>,
    /// Link checks and constraint checks per depth; depth 0 holds checks
    /// whose names are all bound before the search starts.
    links_at: Vec<Vec<&'p PatternLink>>,
    constraints_at: Vec<Vec<&'p Expr>>,
    depth_of: HashMap<&'p str, usize>,
}

impl<'p> Plan<'p> {
    fn new(pattern: &'p Pattern, first: Option<usize>) -> Plan<'p> {
        let mut order: Vec<usize> = Vec::new();
        if let Some(f) = first {
            order.push(f);
        }
        order.extend(
            pattern
                .elements
                .iter()
                .enumerate()
                .filter(|(i, e)| e.is_searched() && Some(*i) != first)
                .map(|(i, _)| i),
        );
        let mut depth_of = HashMap::new();
        for (depth, &idx) in order.iter().enumerate() {
            depth_of.insert(pattern.elements[idx].name.as_str(), depth + 1);
        }
        let depth = |name: &str| depth_of.get(name).copied().unwrap_or(0);
        let mut links_at = vec![Vec::new(); order.len() + 1];
        for link in pattern.links.iter().filter(|l| l.must_exist()) {
            links_at[depth(&link.from).max(depth(&link.to))].push(link);
        }
        let mut constraints_at = vec![Vec::new(); order.len() + 1];
        for element in &pattern.elements {
            if let Some(c) = &element.constraint {
                let ready = c
                    .names()
                    .into_iter()
                    .map(depth)
                    .chain(std::iter::once(depth(&element.name)))
                    .max()
                    .unwrap_or(0);
                constraints_at[ready].push(c);
            }
        }
        Plan {
            pattern,
            order,
            links_at,
            constraints_at,
            depth_of,
        }
    }

    /// Checks the links and constraints that become decidable at `depth`.
    fn checks_pass(&self, depth: usize, b: &Bindings, m: &Model) -> Result<bool, EngineError> {
        for link in &self.links_at[depth] {
            let src = b
                .object(&link.from)
                .ok_or_else(|| EngineError::UnboundEndpoint(link.from.clone()))?;
            let trg = b
                .object(&link.to)
                .ok_or_else(|| EngineError::UnboundEndpoint(link.to.clone()))?;
            if !m.has_link(link.assoc, src, trg) {
                return Ok(false);
            }
        }
        for c in &self.constraints_at[depth] {
            if !truthy(eval(c, b, m)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Candidates for the element bound at `depth` (1-based), in creation
    /// order. Uses an adjacent link to an already bound element when there is
    /// one.
    fn candidates(&self, depth: usize, b: &Bindings, m: &Model) -> Vec<ObjectId> {
        let element = &self.pattern.elements[self.order[depth - 1]];
        let bound_before = |name: &str| self.depth_of.get(name).copied().unwrap_or(0) < depth;
        for link in self.pattern.links.iter().filter(|l| l.must_exist()) {
            if link.to == element.name && link.from != element.name && bound_before(&link.from) {
                if let Some(src) = b.object(&link.from) {
                    return filter_class(m.neighbors(src, link.assoc, true), element.class, m);
                }
            }
            if link.from == element.name && link.to != element.name && bound_before(&link.to) {
                if let Some(trg) = b.object(&link.to) {
                    return filter_class(m.neighbors(trg, link.assoc, false), element.class, m);
                }
            }
        }
        m.objects_of_class(element.class)
    }

    fn solve(&self, depth: usize, b: &mut Bindings, m: &Model) -> Result<bool, EngineError> {
        if depth == self.order.len() {
            for nac in &self.pattern.nots {
                if Plan::new(nac, None).first(b, m)?.is_some() {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let next = depth + 1;
        let name = &self.pattern.elements[self.order[depth]].name;
        for candidate in self.candidates(next, b, m) {
            b.set(name.clone(), Datum::Object(candidate));
            if self.checks_pass(next, b, m)? && self.solve(next, b, m)? {
                return Ok(true);
            }
        }
        b.remove(name);
        Ok(false)
    }

    /// Binds reference elements and runs the depth-0 checks.
    fn prepare(&self, input: &Bindings, m: &Model) -> Result<Bindings, EngineError> {
        let b = input.clone();
        for element in self.pattern.elements.iter().filter(|e| e.reference) {
            let id = match b.get(&element.name) {
                Some(Datum::Object(id)) => *id,
                _ => return Err(EngineError::UnresolvedReference(element.name.clone())),
            };
            if !m.contains(id) {
                return Err(EngineError::DeletedReference(element.name.clone()));
            }
            if !m.is_instance(id, element.class) {
                return Err(EngineError::ReferenceClass(element.name.clone()));
            }
        }
        for &idx in &self.order {
            let name = &self.pattern.elements[idx].name;
            if b.contains(name) {
                return Err(RebindError(name.clone()).into());
            }
        }
        Ok(b)
    }

    fn first(&self, input: &Bindings, m: &Model) -> Result<Option<Bindings>, EngineError> {
        let mut b = self.prepare(input, m)?;
        if !self.checks_pass(0, &b, m)? {
            return Ok(None);
        }
        Ok(if self.solve(0, &mut b, m)? {
            Some(b)
        } else {
            None
        })
    }
}

fn filter_class(ids: Vec<ObjectId>, class: ClassId, m: &Model) -> Vec<ObjectId> {
    ids.into_iter()
        .filter(|&id| m.is_instance(id, class))
        .collect()
}

fn truthy(d: Datum) -> bool {
    matches!(d, Datum::Value(Value::Boolean(true)))
}

/// Finds the first match of `pattern` extending `input`, or `None`.
pub fn match_rule(
    pattern: &Pattern,
    input: &Bindings,
    model: &Model,
) -> Result<Option<Bindings>, EngineError> {
    Plan::new(pattern, None).first(input, model)
}

/// One binding per distinct instance of `loop_var` that admits a match, in
/// creation order of that instance. The candidate set is taken once, before
/// anything is returned, so objects created afterwards are never iterated.
pub fn enumerate_loop(
    pattern: &Pattern,
    loop_var: &str,
    input: &Bindings,
    model: &Model,
) -> Result<Vec<Bindings>, EngineError> {
    let idx = pattern
        .elements
        .iter()
        .position(|e| e.name == loop_var && e.is_searched() && e.action.is_none())
        .ok_or_else(|| EngineError::NotALoopVariable(loop_var.to_string()))?;
    let plan = Plan::new(pattern, Some(idx));
    let mut b = plan.prepare(input, model)?;
    if !plan.checks_pass(0, &b, model)? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for candidate in plan.candidates(1, &b, model) {
        b.set(loop_var, Datum::Object(candidate));
        if plan.checks_pass(1, &b, model)? {
            let mut attempt = b.clone();
            if plan.solve(1, &mut attempt, model)? {
                out.push(attempt);
            }
        }
    }
    Ok(out)
}

/// Re-checks one loop iteration against the current model: the loop variable
/// is fixed to `instance` and the rest of the loophead is matched again.
pub fn rematch_loop_instance(
    pattern: &Pattern,
    loop_var: &str,
    instance: ObjectId,
    input: &Bindings,
    model: &Model,
) -> Result<Option<Bindings>, EngineError> {
    let idx = pattern
        .elements
        .iter()
        .position(|e| e.name == loop_var && e.is_searched())
        .ok_or_else(|| EngineError::NotALoopVariable(loop_var.to_string()))?;
    if !model.contains(instance) || !model.is_instance(instance, pattern.elements[idx].class) {
        return Ok(None);
    }
    let plan = Plan::new(pattern, Some(idx));
    let mut b = plan.prepare(input, model)?;
    if !plan.checks_pass(0, &b, model)? {
        return Ok(None);
    }
    b.set(loop_var, Datum::Object(instance));
    if plan.checks_pass(1, &b, model)? && plan.solve(1, &mut b, model)? {
        Ok(Some(b))
    } else {
        Ok(None)
    }
}

/// Performs the action part of `pattern` on a match `bindings`: creations,
/// created links, assignments (left to right), link deletions, and finally
/// element deletions.
pub fn apply_actions(
    pattern: &Pattern,
    mut bindings: Bindings,
    model: &mut Model,
) -> Result<Bindings, EngineError> {
    for element in &pattern.elements {
        if element.action == Some(Action::Create) && !element.reference {
            let id = model.create_object(element.class)?;
            bindings.bind(element.name.clone(), Datum::Object(id))?;
        }
    }
    let endpoint = |b: &Bindings, name: &str| {
        b.object(name)
            .ok_or_else(|| EngineError::UnboundEndpoint(name.to_string()))
    };
    for link in pattern
        .links
        .iter()
        .filter(|l| l.action == Some(Action::Create))
    {
        let src = endpoint(&bindings, &link.from)?;
        let trg = endpoint(&bindings, &link.to)?;
        model.create_link(link.assoc, src, trg)?;
    }
    for element in &pattern.elements {
        for (attr, expr) in &element.assignments {
            let target = endpoint(&bindings, &element.name)?;
            let value = match eval(expr, &bindings, model)? {
                Datum::Value(v) => v,
                Datum::Object(_) => {
                    return Err(EvalError::Type {
                        op: ":=",
                        operands: format!("object assigned to `{}.{attr}`", element.name),
                    }
                    .into())
                }
            };
            model.set_slot(target, attr, value)?;
        }
    }
    for link in pattern
        .links
        .iter()
        .filter(|l| l.action == Some(Action::Delete))
    {
        let src = endpoint(&bindings, &link.from)?;
        let trg = endpoint(&bindings, &link.to)?;
        model.delete_link(link.assoc, src, trg)?;
    }
    for element in &pattern.elements {
        if element.action == Some(Action::Delete) {
            let id = endpoint(&bindings, &element.name)?;
            // Two delete elements may have matched the same object.
            if model.contains(id) {
                model.delete_object(id)?;
            }
        }
    }
    Ok(bindings)
}
