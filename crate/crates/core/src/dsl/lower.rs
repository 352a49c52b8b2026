//! Name resolution, type checking and translation to the interpreter IR.

use std::collections::{HashMap, HashSet};

use super::ast::{self, *};
use super::Diagnostic;
use crate::expr::{BinOp, Expr as IrExpr};
use crate::interpreter::{ParamType, Procedure, Program as IrProgram, Statement, StatementKind};
use crate::metamodel::{ClassId, Metamodel, PrimType};
use crate::model::Value;
use crate::pattern::{Action, ClassElement, Pattern, PatternLink};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Prim(PrimType),
    Obj(ClassId),
    /// Result of an expression that already produced a diagnostic.
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SymKind {
    Param,
    Var,
    Element,
}

#[derive(Debug, Clone, Copy)]
struct Sym {
    ty: Ty,
    kind: SymKind,
}

/// How an element of the pattern being lowered takes part in matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Matched,
    Reference,
    Created,
    Deleted,
}

#[derive(Debug, Clone, Copy)]
struct PatElem {
    class: Option<ClassId>,
    role: Role,
    /// Bound outside the pattern.
    bound: bool,
}

type Signatures = HashMap<String, Vec<ParamType>>;

pub(super) fn lower(program: &ast::Program, mm: &Metamodel) -> Result<IrProgram, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut sigs: Signatures = HashMap::new();
    let mut param_types = Vec::new();
    for p in &program.procedures {
        let mut types = Vec::new();
        let mut seen = HashSet::new();
        for prm in &p.params {
            if !seen.insert(prm.name.name.as_str()) {
                diags.push(Diagnostic::new(
                    prm.name.span.start,
                    format!("duplicate parameter `{}`", prm.name.name),
                ));
            }
            types.push(resolve_type(mm, &prm.ty, &mut diags));
        }
        if sigs.contains_key(&p.name.name) {
            diags.push(Diagnostic::new(
                p.name.span.start,
                format!("procedure `{}` is defined more than once", p.name.name),
            ));
        } else {
            sigs.insert(
                p.name.name.clone(),
                types
                    .iter()
                    .map(|t| t.unwrap_or(ParamType::Prim(PrimType::Integer)))
                    .collect(),
            );
        }
        param_types.push(types);
    }
    let mut procedures = Vec::new();
    for (p, types) in program.procedures.iter().zip(param_types) {
        let mut lw = Lowerer {
            mm,
            sigs: &sigs,
            diags: &mut diags,
            scopes: vec![HashMap::new()],
            next_index: 0,
        };
        let mut params = Vec::new();
        for (prm, ty) in p.params.iter().zip(types) {
            let sym_ty = match ty {
                Some(ParamType::Object(c)) => Ty::Obj(c),
                Some(ParamType::Prim(t)) => Ty::Prim(t),
                None => Ty::Error,
            };
            lw.scopes[0].insert(
                prm.name.name.clone(),
                Sym {
                    ty: sym_ty,
                    kind: SymKind::Param,
                },
            );
            if let Some(t) = ty {
                params.push((prm.name.name.clone(), t));
            }
        }
        if p.body.stmts.is_empty() {
            lw.error(
                p.name.span,
                format!("procedure `{}` has an empty body", p.name.name),
            );
        }
        let body = lw.stmts(&p.body.stmts);
        procedures.push(Procedure {
            name: p.name.name.clone(),
            params,
            body,
        });
    }
    if diags.is_empty() {
        Ok(IrProgram::new(procedures))
    } else {
        diags.sort();
        Err(diags)
    }
}

fn resolve_type(mm: &Metamodel, ty: &Ident, diags: &mut Vec<Diagnostic>) -> Option<ParamType> {
    if let Some(p) = PrimType::from_name(&ty.name) {
        return Some(ParamType::Prim(p));
    }
    match mm.class_id(&ty.name) {
        Some(c) => Some(ParamType::Object(c)),
        None => {
            diags.push(Diagnostic::new(
                ty.span.start,
                format!("unknown type `{}`", ty.name),
            ));
            None
        }
    }
}

struct Lowerer<'a> {
    mm: &'a Metamodel,
    sigs: &'a Signatures,
    diags: &'a mut Vec<Diagnostic>,
    scopes: Vec<HashMap<String, Sym>>,
    next_index: usize,
}

/// Names visible while checking a pattern: its own elements and, inside a
/// NOT condition, those of the enclosing pattern.
struct PatScope<'p> {
    own: &'p HashMap<String, PatElem>,
    outer: Option<&'p HashMap<String, PatElem>>,
}

impl<'p> PatScope<'p> {
    fn get(&self, name: &str) -> Option<PatElem> {
        self.own
            .get(name)
            .or_else(|| self.outer.and_then(|o| o.get(name)))
            .copied()
    }
}

impl<'a> Lowerer<'a> {
    fn error(&mut self, span: Span, message: impl Into<String>) {
        self.diags.push(Diagnostic::new(span.start, message));
    }

    fn lookup(&self, name: &str) -> Option<Sym> {
        self.scopes.iter().rev().find_map(|s| s.get(name)).copied()
    }

    fn declare(&mut self, name: &Ident, sym: Sym) {
        if self.lookup(&name.name).is_some() {
            self.error(name.span, format!("`{}` is already defined", name.name));
            return;
        }
        self.scopes
            .last_mut()
            .expect("scope")
            .insert(name.name.clone(), sym);
    }

    fn index(&mut self) -> usize {
        let i = self.next_index;
        self.next_index += 1;
        i
    }

    fn scoped_block(&mut self, stmts: &[Stmt], extra: Vec<(String, Sym)>) -> Vec<Statement> {
        let mut scope = HashMap::new();
        scope.extend(extra);
        self.scopes.push(scope);
        let out = self.stmts(stmts);
        self.scopes.pop();
        out
    }

    fn stmts(&mut self, stmts: &[Stmt]) -> Vec<Statement> {
        stmts.iter().map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, s: &Stmt) -> Statement {
        let index = self.index();
        let kind = match s {
            Stmt::Rule {
                name,
                pattern,
                else_block,
                ..
            } => {
                let (ir, elems) = self.pattern(pattern, None);
                let else_body = match else_block {
                    Some(b) => self.scoped_block(&b.stmts, Vec::new()),
                    None => Vec::new(),
                };
                for (n, e) in elems {
                    if !e.bound {
                        let ty = e.class.map(Ty::Obj).unwrap_or(Ty::Error);
                        self.scopes.last_mut().expect("scope").insert(
                            n,
                            Sym {
                                ty,
                                kind: SymKind::Element,
                            },
                        );
                    }
                }
                StatementKind::Rule {
                    name: name.as_ref().map(|n| n.name.clone()),
                    pattern: ir,
                    else_body,
                }
            }
            Stmt::While {
                name,
                pattern,
                span,
            } => {
                let (ir, _) = self.pattern(pattern, None);
                if !ir.has_actions() {
                    self.error(*span, "while rule has no actions");
                }
                StatementKind::While {
                    name: name.as_ref().map(|n| n.name.clone()),
                    pattern: ir,
                }
            }
            Stmt::Foreach {
                var, pattern, body, ..
            } => {
                let (ir, elems) = self.pattern(pattern, None);
                if ir.has_actions() {
                    self.error(pattern.span, "a foreach pattern cannot contain actions");
                }
                match elems.get(&var.name) {
                    Some(e) if e.role == Role::Matched => {}
                    _ => self.error(
                        var.span,
                        format!(
                            "loop variable `{}` must be a matched element of the pattern",
                            var.name
                        ),
                    ),
                }
                let extra = elems
                    .into_iter()
                    .filter(|(_, e)| e.role == Role::Matched)
                    .map(|(n, e)| {
                        (
                            n,
                            Sym {
                                ty: e.class.map(Ty::Obj).unwrap_or(Ty::Error),
                                kind: SymKind::Element,
                            },
                        )
                    })
                    .collect();
                let body = self.scoped_block(&body.stmts, extra);
                StatementKind::Foreach {
                    loop_var: var.name.clone(),
                    pattern: ir,
                    body,
                }
            }
            Stmt::Assign { target, value, .. } => {
                let (ir, ty) = self.expr(value, None);
                match self.lookup(&target.name) {
                    None => self.error(target.span, format!("unknown variable `{}`", target.name)),
                    Some(sym) if sym.kind != SymKind::Var => {
                        self.error(target.span, format!("`{}` is not a variable", target.name))
                    }
                    Some(sym) => self.expect_type(value.span, ty, sym.ty),
                }
                StatementKind::Assign {
                    var: target.name.clone(),
                    value: ir,
                }
            }
            Stmt::Call { callee, args, span } => {
                let lowered: Vec<(IrExpr, Ty, Span)> = args
                    .iter()
                    .map(|a| {
                        let (ir, ty) = self.expr(a, None);
                        (ir, ty, a.span)
                    })
                    .collect();
                match self.sigs.get(&callee.name) {
                    None => self.error(callee.span, format!("unknown procedure `{}`", callee.name)),
                    Some(params) if params.len() != args.len() => self.error(
                        *span,
                        format!(
                            "`{}` expects {} argument(s), got {}",
                            callee.name,
                            params.len(),
                            args.len()
                        ),
                    ),
                    Some(params) => {
                        let expected: Vec<Ty> = params
                            .iter()
                            .map(|p| match p {
                                ParamType::Object(c) => Ty::Obj(*c),
                                ParamType::Prim(t) => Ty::Prim(*t),
                            })
                            .collect();
                        for ((_, ty, sp), want) in lowered.iter().zip(expected) {
                            self.expect_type(*sp, *ty, want);
                        }
                    }
                }
                StatementKind::Call {
                    procedure: callee.name.clone(),
                    args: lowered.into_iter().map(|(ir, _, _)| ir).collect(),
                }
            }
            Stmt::VarDecl { name, ty, init, .. } => {
                let prim = PrimType::from_name(&ty.name);
                if prim.is_none() {
                    self.error(
                        ty.span,
                        format!(
                            "variables must be Integer, String or Boolean, not `{}`",
                            ty.name
                        ),
                    );
                }
                let init_ir = init.as_ref().map(|e| {
                    let (ir, t) = self.expr(e, None);
                    if let Some(p) = prim {
                        self.expect_type(e.span, t, Ty::Prim(p));
                    }
                    ir
                });
                self.declare(
                    name,
                    Sym {
                        ty: prim.map(Ty::Prim).unwrap_or(Ty::Error),
                        kind: SymKind::Var,
                    },
                );
                StatementKind::Var {
                    name: name.name.clone(),
                    ty: prim.unwrap_or(PrimType::Integer),
                    init: init_ir,
                }
            }
        };
        Statement { index, kind }
    }

    fn type_name(&self, ty: Ty) -> String {
        match ty {
            Ty::Prim(p) => p.name().to_string(),
            Ty::Obj(c) => self.mm.class(c).name.clone(),
            Ty::Error => "?".to_string(),
        }
    }

    /// Reports when a value of type `found` cannot be used where `want` is
    /// expected. Objects may be passed where a superclass is expected.
    fn expect_type(&mut self, span: Span, found: Ty, want: Ty) {
        let ok = match (found, want) {
            (Ty::Error, _) | (_, Ty::Error) => true,
            (Ty::Prim(a), Ty::Prim(b)) => a == b,
            (Ty::Obj(a), Ty::Obj(b)) => self.mm.is_subclass(a, b),
            _ => false,
        };
        if !ok {
            let msg = format!(
                "expected {}, found {}",
                self.type_name(want),
                self.type_name(found)
            );
            self.error(span, msg);
        }
    }

    fn class_of(&mut self, class: &Ident) -> Option<ClassId> {
        let id = self.mm.class_id(&class.name);
        if id.is_none() {
            self.error(class.span, format!("unknown class `{}`", class.name));
        }
        id
    }

    /// Lowers a pattern block. `outer` holds the enclosing pattern's elements
    /// when lowering a NOT condition.
    fn pattern(
        &mut self,
        block: &PatBlock,
        outer: Option<&HashMap<String, PatElem>>,
    ) -> (Pattern, HashMap<String, PatElem>) {
        let in_not = outer.is_some();
        let mut elems: HashMap<String, PatElem> = HashMap::new();
        let mut ir = Pattern::default();

        let declare = |lw: &mut Self,
                       elems: &mut HashMap<String, PatElem>,
                       name: &Ident,
                       e: PatElem|
         -> bool {
            let clash = elems.contains_key(&name.name)
                || outer.is_some_and(|o| o.contains_key(&name.name))
                || (!e.bound && lw.lookup(&name.name).is_some());
            if clash {
                lw.error(name.span, format!("`{}` is already defined", name.name));
                return false;
            }
            elems.insert(name.name.clone(), e);
            true
        };

        // Elements first, so links and constraints may refer to any of them.
        for item in &block.items {
            let PatItem::Element(decl) = item else {
                continue;
            };
            let role = match (&decl.head, decl.action) {
                (ElementHead::Reference(_), Some(ActionKw::Create)) => {
                    self.error(decl.span, "a reference element cannot be created");
                    Role::Reference
                }
                (ElementHead::Reference(_), Some(ActionKw::Delete)) => Role::Deleted,
                (ElementHead::Reference(_), None) => Role::Reference,
                (ElementHead::Fresh { .. }, Some(ActionKw::Create)) => Role::Created,
                (ElementHead::Fresh { .. }, Some(ActionKw::Delete)) => Role::Deleted,
                (ElementHead::Fresh { .. }, None) => Role::Matched,
            };
            if in_not && (decl.action.is_some() || !decl.assignments.is_empty()) {
                self.error(decl.span, "elements of a NOT condition cannot have actions");
            }
            let (name, class, reference) = match &decl.head {
                ElementHead::Reference(name) => (name, self.reference_class(name), true),
                ElementHead::Fresh { name, class } => (name, self.class_of(class), false),
            };
            if declare(
                self,
                &mut elems,
                name,
                PatElem {
                    class,
                    role,
                    bound: reference,
                },
            ) {
                let mut ce = ClassElement::matched(&name.name, class.unwrap_or(ClassId(0)));
                ce.reference = reference;
                ce.action = match decl.action {
                    Some(ActionKw::Create) => Some(Action::Create),
                    Some(ActionKw::Delete) => Some(Action::Delete),
                    None => None,
                };
                ir.elements.push(ce);
            }
        }
        // Links may introduce reference elements implicitly through `@x`.
        for item in &block.items {
            let PatItem::Link(link) = item else { continue };
            for end in [&link.from, &link.to] {
                if end.at && !elems.contains_key(&end.name.name) {
                    let scope = PatScope { own: &elems, outer };
                    if scope.get(&end.name.name).is_some() {
                        continue;
                    }
                    let class = self.reference_class(&end.name);
                    elems.insert(
                        end.name.name.clone(),
                        PatElem {
                            class,
                            role: Role::Reference,
                            bound: true,
                        },
                    );
                    if !in_not {
                        ir.elements.push(ClassElement::reference(
                            &end.name.name,
                            class.unwrap_or(ClassId(0)),
                        ));
                    }
                }
            }
        }

        let elems_snapshot = elems.clone();
        let scope = PatScope {
            own: &elems_snapshot,
            outer,
        };
        for item in &block.items {
            match item {
                PatItem::Element(decl) => self.element_exprs(decl, &scope, &mut ir),
                PatItem::Link(link) => {
                    if let Some(l) = self.link(link, &scope, in_not) {
                        ir.links.push(l);
                    }
                }
                PatItem::Not(inner) => {
                    if in_not {
                        self.error(inner.span, "NOT conditions cannot be nested");
                        continue;
                    }
                    let (nac, _) = self.pattern(inner, Some(&elems_snapshot));
                    ir.nots.push(nac);
                }
            }
        }
        (ir, elems)
    }

    fn reference_class(&mut self, name: &Ident) -> Option<ClassId> {
        match self.lookup(&name.name) {
            Some(Sym { ty: Ty::Obj(c), .. }) => Some(c),
            Some(Sym { ty: Ty::Error, .. }) => None,
            Some(_) => {
                self.error(
                    name.span,
                    format!("`@{}` does not refer to an object", name.name),
                );
                None
            }
            None => {
                self.error(
                    name.span,
                    format!("`@{}` does not refer to a bound element", name.name),
                );
                None
            }
        }
    }

    fn element_exprs(&mut self, decl: &ElementDecl, scope: &PatScope<'_>, ir: &mut Pattern) {
        let name = &decl.name().name;
        let Some(me) = scope.own.get(name).copied() else {
            return;
        };
        let pos = ir.elements.iter().position(|e| &e.name == name);
        if let Some(c) = &decl.constraint {
            if me.role == Role::Created {
                self.error(c.span, "a created element cannot have a `where` constraint");
            }
            let (cir, ty) = self.expr(c, Some(scope));
            self.expect_type(c.span, ty, Ty::Prim(PrimType::Boolean));
            for used in c_names(c) {
                if let Some(e) = scope.get(&used.name) {
                    if e.role == Role::Created {
                        self.error(
                            used.span,
                            format!("`{}` is created by this rule and not yet bound", used.name),
                        );
                    }
                }
            }
            if let Some(i) = pos {
                ir.elements[i].constraint = Some(cir);
            }
        }
        if !decl.assignments.is_empty() && me.role == Role::Deleted {
            self.error(decl.span, "a deleted element cannot have assignments");
        }
        for (attr, value) in &decl.assignments {
            let (vir, ty) = self.expr(value, Some(scope));
            if let Some(class) = me.class {
                match self.mm.attribute(class, &attr.name) {
                    Some(a) => {
                        let want = Ty::Prim(a.ty);
                        self.expect_type(value.span, ty, want);
                    }
                    None => self.error(
                        attr.span,
                        format!(
                            "class `{}` has no attribute `{}`",
                            self.mm.class(class).name,
                            attr.name
                        ),
                    ),
                }
            }
            if let Some(i) = pos {
                ir.elements[i].assignments.push((attr.name.clone(), vir));
            }
        }
    }

    fn link(&mut self, link: &LinkDecl, scope: &PatScope<'_>, in_not: bool) -> Option<PatternLink> {
        if in_not && link.action.is_some() {
            self.error(link.span, "links of a NOT condition cannot have actions");
        }
        let endpoint = |lw: &mut Self, r: &RefName| -> Option<PatElem> {
            match scope.get(&r.name.name) {
                Some(e) => Some(e),
                None if r.at => None,
                None => {
                    let hint = if lw.lookup(&r.name.name).is_some() {
                        format!("; write `@{}` to refer to a bound element", r.name.name)
                    } else {
                        String::new()
                    };
                    lw.error(
                        r.name.span,
                        format!("`{}` is not an element of this pattern{hint}", r.name.name),
                    );
                    None
                }
            }
        };
        let from = endpoint(self, &link.from);
        let to = endpoint(self, &link.to);
        let class = self.class_of(&link.class)?;
        let Some(assoc_id) = self.mm.find_association(class, &link.end.name) else {
            self.error(
                link.end.span,
                format!(
                    "class `{}` has no association end `{}`",
                    link.class.name, link.end.name
                ),
            );
            return None;
        };
        let assoc = self.mm.association(assoc_id);
        if !(assoc.navigable_forward && assoc.navigable_backward) {
            self.error(
                link.end.span,
                format!(
                    "association end `{}.{}` is not navigable in both directions",
                    link.class.name, link.end.name
                ),
            );
        }
        let (src_class, trg_class) = (assoc.source, assoc.target);
        for (r, e, want, side) in [
            (&link.from, from, src_class, "source"),
            (&link.to, to, trg_class, "target"),
        ] {
            let Some(PatElem { class: Some(c), .. }) = e else {
                continue;
            };
            if !self.mm.is_subclass(c, want) {
                self.error(
                    r.name.span,
                    format!(
                        "`{}` is a {}, but the {side} of `{}.{}` must be a {}",
                        r.name.name,
                        self.mm.class(c).name,
                        link.class.name,
                        link.end.name,
                        self.mm.class(want).name
                    ),
                );
            }
        }
        let roles = [from.map(|e| e.role), to.map(|e| e.role)];
        match link.action {
            Some(ActionKw::Create) => {
                if roles.contains(&Some(Role::Deleted)) {
                    self.error(
                        link.span,
                        "a created link cannot attach to a deleted element",
                    );
                }
            }
            Some(ActionKw::Delete) | None => {
                if roles.contains(&Some(Role::Created)) {
                    self.error(link.span, "a link to a created element must be created too");
                }
            }
        }
        let mut ir = PatternLink::new(&link.from.name.name, assoc_id, &link.to.name.name);
        ir.action = match link.action {
            Some(ActionKw::Create) => Some(Action::Create),
            Some(ActionKw::Delete) => Some(Action::Delete),
            None => None,
        };
        Some(ir)
    }

    fn name_type(&mut self, name: &Ident, scope: Option<&PatScope<'_>>) -> Ty {
        if let Some(e) = scope.and_then(|s| s.get(&name.name)) {
            return e.class.map(Ty::Obj).unwrap_or(Ty::Error);
        }
        match self.lookup(&name.name) {
            Some(sym) => sym.ty,
            None => {
                self.error(name.span, format!("unknown name `{}`", name.name));
                Ty::Error
            }
        }
    }

    fn expr(&mut self, e: &ast::Expr, scope: Option<&PatScope<'_>>) -> (IrExpr, Ty) {
        use PrimType::{Boolean, Integer, String as Str};
        match &e.kind {
            ExprKind::Int(i) => (IrExpr::Literal(Value::Integer(*i)), Ty::Prim(Integer)),
            ExprKind::Str(s) => (IrExpr::Literal(Value::String(s.clone())), Ty::Prim(Str)),
            ExprKind::Bool(b) => (IrExpr::Literal(Value::Boolean(*b)), Ty::Prim(Boolean)),
            ExprKind::Name(n) => {
                let ty = self.name_type(n, scope);
                (IrExpr::Name(n.name.clone()), ty)
            }
            ExprKind::Attr(o, a) => {
                let ir = IrExpr::attr(&o.name, &a.name);
                let ty = match self.name_type(o, scope) {
                    Ty::Obj(c) => match self.mm.attribute(c, &a.name) {
                        Some(attr) => Ty::Prim(attr.ty),
                        None => {
                            let msg = format!(
                                "class `{}` has no attribute `{}`",
                                self.mm.class(c).name,
                                a.name
                            );
                            self.error(a.span, msg);
                            Ty::Error
                        }
                    },
                    Ty::Prim(p) => {
                        self.error(
                            o.span,
                            format!("`{}` is a {}, not an object", o.name, p.name()),
                        );
                        Ty::Error
                    }
                    Ty::Error => Ty::Error,
                };
                (ir, ty)
            }
            ExprKind::Unary(op, inner) => {
                let (ir, ty) = self.expr(inner, scope);
                match op {
                    UnaryOp::Neg => {
                        self.expect_type(inner.span, ty, Ty::Prim(Integer));
                        (IrExpr::Neg(Box::new(ir)), Ty::Prim(Integer))
                    }
                    UnaryOp::Not => {
                        self.expect_type(inner.span, ty, Ty::Prim(Boolean));
                        (IrExpr::Not(Box::new(ir)), Ty::Prim(Boolean))
                    }
                }
            }
            ExprKind::Binary(op, l, r) => {
                let (lir, lt) = self.expr(l, scope);
                let (rir, rt) = self.expr(r, scope);
                let (ir_op, ty) = self.binary_type(*op, e.span, lt, rt);
                (IrExpr::binary(ir_op, lir, rir), ty)
            }
        }
    }

    fn binary_type(&mut self, op: BinaryOp, span: Span, lt: Ty, rt: Ty) -> (BinOp, Ty) {
        use PrimType::{Boolean, Integer, String as Str};
        let ir_op = match op {
            BinaryOp::Or => BinOp::Or,
            BinaryOp::And => BinOp::And,
            BinaryOp::Eq => BinOp::Eq,
            BinaryOp::Ne => BinOp::Ne,
            BinaryOp::Lt => BinOp::Lt,
            BinaryOp::Le => BinOp::Le,
            BinaryOp::Gt => BinOp::Gt,
            BinaryOp::Ge => BinOp::Ge,
            BinaryOp::Add => BinOp::Add,
            BinaryOp::Sub => BinOp::Sub,
            BinaryOp::Mul => BinOp::Mul,
        };
        if lt == Ty::Error || rt == Ty::Error {
            let ty = match op {
                BinaryOp::Add if lt == Ty::Prim(Str) || rt == Ty::Prim(Str) => {
                    return (BinOp::Concat, Ty::Prim(Str));
                }
                BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul => Ty::Prim(Integer),
                _ => Ty::Prim(Boolean),
            };
            return (ir_op, ty);
        }
        let result = match op {
            BinaryOp::Or | BinaryOp::And => (lt == Ty::Prim(Boolean) && rt == Ty::Prim(Boolean))
                .then_some((ir_op, Ty::Prim(Boolean))),
            BinaryOp::Add => match (lt, rt) {
                (Ty::Prim(Integer), Ty::Prim(Integer)) => Some((BinOp::Add, Ty::Prim(Integer))),
                (Ty::Prim(Str), Ty::Prim(Str)) => Some((BinOp::Concat, Ty::Prim(Str))),
                _ => None,
            },
            BinaryOp::Sub | BinaryOp::Mul => (lt == Ty::Prim(Integer) && rt == Ty::Prim(Integer))
                .then_some((ir_op, Ty::Prim(Integer))),
            BinaryOp::Eq | BinaryOp::Ne => {
                let ok = match (lt, rt) {
                    (Ty::Prim(a), Ty::Prim(b)) => a == b,
                    (Ty::Obj(a), Ty::Obj(b)) => {
                        self.mm.is_subclass(a, b) || self.mm.is_subclass(b, a)
                    }
                    _ => false,
                };
                ok.then_some((ir_op, Ty::Prim(Boolean)))
            }
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                let ok = matches!(
                    (lt, rt),
                    (Ty::Prim(Integer), Ty::Prim(Integer)) | (Ty::Prim(Str), Ty::Prim(Str))
                );
                ok.then_some((ir_op, Ty::Prim(Boolean)))
            }
        };
        match result {
            Some(r) => r,
            None => {
                let msg = format!(
                    "operator `{}` cannot be applied to {} and {}",
                    op.symbol(),
                    self.type_name(lt),
                    self.type_name(rt)
                );
                self.error(span, msg);
                let ty = if op.is_comparison() || matches!(op, BinaryOp::And | BinaryOp::Or) {
                    Ty::Prim(Boolean)
                } else {
                    Ty::Error
                };
                (ir_op, ty)
            }
        }
    }
}

/// Plain and attribute-base names used by an expression.
fn c_names(e: &ast::Expr) -> Vec<&Ident> {
    match &e.kind {
        ExprKind::Name(n) | ExprKind::Attr(n, _) => vec![n],
        ExprKind::Unary(_, inner) => c_names(inner),
        ExprKind::Binary(_, l, r) => {
            let mut v = c_names(l);
            v.extend(c_names(r));
            v
        }
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::compile;
    use super::*;

    fn mm() -> Metamodel {
        Metamodel::from_json(
            r#"{"name": "graph", "classes": [
                {"name": "Graph"},
                {"name": "Node", "attrs": [{"name": "name", "type": "String"}]},
                {"name": "Edge"},
                {"name": "IntResult", "attrs": [{"name": "result", "type": "Integer"}]}],
              "associations": [
                {"name": "nodes", "src": "Graph", "trg": "Node", "trgEnd": "nodes", "containment": true},
                {"name": "edges", "src": "Graph", "trg": "Edge", "trgEnd": "edges", "containment": true},
                {"name": "src", "src": "Edge", "trg": "Node", "trgEnd": "src"},
                {"name": "trg", "src": "Edge", "trg": "Node", "trgEnd": "trg"}]}"#,
        )
        .unwrap()
        .augment_navigability()
    }

    fn errors(text: &str) -> Vec<String> {
        match compile(text, &mm()) {
            Ok(_) => Vec::new(),
            Err(d) => d.into_iter().map(|d| d.to_string()).collect(),
        }
    }

    const COUNT: &str = r#"
procedure main() {
    foreach g { element g : Graph; } do { call count(g); }
}
procedure count(g: Graph) {
    var sk: Integer := 0;
    foreach n { element n : Node; link @g -[Graph.nodes]-> n; } do {
        sk := sk + 1;
    }
    rule { element r : IntResult create set result := sk; }
}
"#;

    #[test]
    fn lowers_counting_program() {
        let prog = compile(COUNT, &mm()).unwrap();
        let count = prog.procedure("count").unwrap();
        let indices: Vec<usize> = count.body.iter().map(|s| s.index).collect();
        assert_eq!(indices, vec![0, 1, 3]);
        let StatementKind::Foreach { pattern, .. } = &count.body[1].kind else {
            panic!()
        };
        assert_eq!(pattern.elements.len(), 2);
        assert!(pattern
            .elements
            .iter()
            .any(|e| e.name == "g" && e.reference));
    }

    #[test]
    fn plain_mm_is_rejected_without_augmentation() {
        let plain = Metamodel::from_json(
            r#"{"name": "g", "classes": [{"name": "Graph"}, {"name": "Node"}],
               "associations": [{"name": "nodes", "src": "Graph", "trg": "Node", "trgEnd": "nodes"}]}"#,
        )
        .unwrap();
        let text =
            "procedure p(g: Graph) { rule { element n : Node; link @g -[Graph.nodes]-> n; } }";
        let err = compile(text, &plain).unwrap_err();
        assert!(err[0].message.contains("navigable"), "{err:?}");
        assert!(compile(text, &plain.augment_navigability()).is_ok());
    }

    #[test]
    fn reports_semantic_errors() {
        let cases = [
            ("procedure p() { rule { element n : Nope; } }", "unknown class `Nope`"),
            ("procedure p() { x := 1; }", "unknown variable `x`"),
            ("procedure p() { var x: Integer := \"a\"; }", "expected Integer, found String"),
            ("procedure p() { call q(); }", "unknown procedure `q`"),
            ("procedure p() { call p(1); }", "expects 0 argument(s)"),
            ("procedure p() { }", "empty body"),
            (
                "procedure p() { rule { element n : Node; } rule { element n : Node; } }",
                "`n` is already defined",
            ),
            (
                "procedure p() { rule { element n : Node where n.name; } }",
                "expected Boolean, found String",
            ),
            (
                "procedure p() { rule { element n : Node where n.size = 1; } }",
                "no attribute `size`",
            ),
            ("procedure p() { rule { element e : Edge; link e -[Edge.src]-> x; } }", "`x` is not an element"),
            (
                "procedure p() { rule { element e : Edge; element g : Graph; link e -[Edge.src]-> g; } }",
                "must be a Node",
            ),
            (
                "procedure p() { foreach n { element n : Node delete; } do { } }",
                "cannot contain actions",
            ),
            (
                "procedure p() { rule { element n : Node; not { not { element m : Node; } } } }",
                "cannot be nested",
            ),
            ("procedure p() { while rule { element n : Node; } }", "no actions"),
            ("procedure p() { rule { element @x; } }", "does not refer to a bound element"),
            (
                "procedure p() { rule { element n : Node delete; element m : Node create; link n -[Node.~nodes]-> m; } }",
                "",
            ),
            ("procedure p() { var b: Boolean := 1 + true; }", "operator `+`"),
            (
                "procedure p() { rule { element r : IntResult create where r.result = 1; } }",
                "cannot have a `where`",
            ),
        ];
        for (text, expected) in cases {
            let errs = errors(text);
            assert!(!errs.is_empty(), "no error for {text}");
            assert!(
                errs.iter().any(|e| e.contains(expected)),
                "{text}: {errs:?}"
            );
        }
    }

    #[test]
    fn string_plus_is_concat_and_nacs_see_outer_elements() {
        let text = r#"
procedure p() {
    rule {
        element a : Node;
        element b : Node where b <> a;
        not { element e : Edge; link e -[Edge.src]-> a; link e -[Edge.trg]-> b; }
        element r : IntResult create;
    }
    var s: String := a.name + "!";
}
"#;
        let prog = compile(text, &mm()).unwrap();
        let body = &prog.procedure("p").unwrap().body;
        let StatementKind::Rule { pattern, .. } = &body[0].kind else {
            panic!()
        };
        assert_eq!(pattern.nots.len(), 1);
        assert_eq!(pattern.nots[0].links.len(), 2);
        let StatementKind::Var {
            init: Some(IrExpr::Binary { op, .. }),
            ..
        } = &body[1].kind
        else {
            panic!()
        };
        assert_eq!(*op, BinOp::Concat);
    }
}
