//! Canonical pretty printer. Parsing the printed text yields an equal tree.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for (i, p) in program.procedures.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let params: Vec<String> = p
            .params
            .iter()
            .map(|prm| format!("{}: {}", prm.name.name, prm.ty.name))
            .collect();
        let _ = write!(out, "procedure {}({}) ", p.name.name, params.join(", "));
        block(&mut out, &p.body, 0);
        out.push('\n');
    }
    out
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn block(out: &mut String, b: &Block, depth: usize) {
    out.push_str("{\n");
    for s in &b.stmts {
        stmt(out, s, depth + 1);
    }
    pad(out, depth);
    out.push('}');
}

fn opt_name(name: &Option<Ident>) -> String {
    name.as_ref()
        .map(|n| format!(" {}", n.name))
        .unwrap_or_default()
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    pad(out, depth);
    match s {
        Stmt::Rule {
            name,
            pattern,
            else_block,
            ..
        } => {
            let _ = write!(out, "rule{} ", opt_name(name));
            pat_block(out, pattern, depth);
            if let Some(e) = else_block {
                out.push_str(" else ");
                block(out, e, depth);
            }
        }
        Stmt::While { name, pattern, .. } => {
            let _ = write!(out, "while rule{} ", opt_name(name));
            pat_block(out, pattern, depth);
        }
        Stmt::Foreach {
            var, pattern, body, ..
        } => {
            let _ = write!(out, "foreach {} ", var.name);
            pat_block(out, pattern, depth);
            out.push_str(" do ");
            block(out, body, depth);
        }
        Stmt::Assign { target, value, .. } => {
            let _ = write!(out, "{} := {};", target.name, expr(value));
        }
        Stmt::Call { callee, args, .. } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            let _ = write!(out, "call {}({});", callee.name, args.join(", "));
        }
        Stmt::VarDecl { name, ty, init, .. } => {
            let _ = write!(out, "var {}: {}", name.name, ty.name);
            if let Some(e) = init {
                let _ = write!(out, " := {}", expr(e));
            }
            out.push(';');
        }
    }
    out.push('\n');
}

fn pat_block(out: &mut String, p: &PatBlock, depth: usize) {
    out.push_str("{\n");
    for item in &p.items {
        pad(out, depth + 1);
        match item {
            PatItem::Element(e) => {
                out.push_str("element ");
                match &e.head {
                    ElementHead::Reference(n) => {
                        let _ = write!(out, "@{}", n.name);
                    }
                    ElementHead::Fresh { name, class } => {
                        let _ = write!(out, "{} : {}", name.name, class.name);
                    }
                }
                action(out, e.action);
                if let Some(c) = &e.constraint {
                    let _ = write!(out, " where {}", expr(c));
                }
                if !e.assignments.is_empty() {
                    let sets: Vec<String> = e
                        .assignments
                        .iter()
                        .map(|(a, v)| format!("{} := {}", a.name, expr(v)))
                        .collect();
                    let _ = write!(out, " set {}", sets.join(", "));
                }
                out.push(';');
            }
            PatItem::Link(l) => {
                let _ = write!(
                    out,
                    "link {} -[{}.{}]-> {}",
                    ref_name(&l.from),
                    l.class.name,
                    l.end.name,
                    ref_name(&l.to)
                );
                action(out, l.action);
                out.push(';');
            }
            PatItem::Not(inner) => {
                out.push_str("not ");
                pat_block(out, inner, depth + 1);
            }
        }
        out.push('\n');
    }
    pad(out, depth);
    out.push('}');
}

fn action(out: &mut String, a: Option<ActionKw>) {
    match a {
        Some(ActionKw::Create) => out.push_str(" create"),
        Some(ActionKw::Delete) => out.push_str(" delete"),
        None => {}
    }
}

fn ref_name(r: &RefName) -> String {
    if r.at {
        format!("@{}", r.name.name)
    } else {
        r.name.name.clone()
    }
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Prints an expression; nested operator expressions are parenthesized.
pub fn expr(e: &Expr) -> String {
    let operand = |e: &Expr| match e.kind {
        ExprKind::Binary(..) | ExprKind::Unary(UnaryOp::Not, _) => format!("({})", expr(e)),
        _ => expr(e),
    };
    match &e.kind {
        ExprKind::Int(i) => i.to_string(),
        ExprKind::Str(s) => quote(s),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Name(n) => n.name.clone(),
        ExprKind::Attr(o, a) => format!("{}.{}", o.name, a.name),
        ExprKind::Unary(UnaryOp::Neg, inner) => format!("-{}", operand(inner)),
        ExprKind::Unary(UnaryOp::Not, inner) => format!("not {}", operand(inner)),
        ExprKind::Binary(op, l, r) => format!("{} {} {}", operand(l), op.symbol(), operand(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::lexer::is_keyword;
    use super::super::parse;
    use super::*;
    use proptest::prelude::*;

    fn ident() -> impl Strategy<Value = Ident> {
        "[a-z][a-zA-Z0-9_]{0,5}"
            .prop_filter("keyword", |s| !is_keyword(s))
            .prop_map(|s| Ident::new(&s))
    }

    fn class() -> impl Strategy<Value = Ident> {
        "[A-Z][a-z0-9]{0,4}".prop_map(|s| Ident::new(&s))
    }

    fn expr_strategy() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0i64..1_000_000).prop_map(|i| Expr::new(ExprKind::Int(i))),
            "[ -~]{0,6}".prop_map(|s| Expr::new(ExprKind::Str(s))),
            any::<bool>().prop_map(|b| Expr::new(ExprKind::Bool(b))),
            ident().prop_map(|i| Expr::new(ExprKind::Name(i))),
            (ident(), ident()).prop_map(|(o, a)| Expr::new(ExprKind::Attr(o, a))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            let op = prop_oneof![
                Just(BinaryOp::Or),
                Just(BinaryOp::And),
                Just(BinaryOp::Eq),
                Just(BinaryOp::Ne),
                Just(BinaryOp::Lt),
                Just(BinaryOp::Le),
                Just(BinaryOp::Gt),
                Just(BinaryOp::Ge),
                Just(BinaryOp::Add),
                Just(BinaryOp::Sub),
                Just(BinaryOp::Mul),
            ];
            let uop = prop_oneof![Just(UnaryOp::Neg), Just(UnaryOp::Not)];
            prop_oneof![
                (op, inner.clone(), inner.clone())
                    .prop_map(|(o, l, r)| Expr::new(ExprKind::Binary(o, Box::new(l), Box::new(r)))),
                (uop, inner).prop_map(|(o, e)| Expr::new(ExprKind::Unary(o, Box::new(e)))),
            ]
        })
    }

    fn action_strategy() -> impl Strategy<Value = Option<ActionKw>> {
        prop_oneof![
            Just(None),
            Just(Some(ActionKw::Create)),
            Just(Some(ActionKw::Delete))
        ]
    }

    fn ref_strategy() -> impl Strategy<Value = RefName> {
        (ident(), any::<bool>()).prop_map(|(name, at)| RefName { name, at })
    }

    fn pat_strategy() -> impl Strategy<Value = PatBlock> {
        let element = (
            prop_oneof![
                ident().prop_map(ElementHead::Reference),
                (ident(), class()).prop_map(|(name, class)| ElementHead::Fresh { name, class }),
            ],
            action_strategy(),
            proptest::option::of(expr_strategy()),
            proptest::collection::vec((ident(), expr_strategy()), 0..2),
        )
            .prop_map(|(head, action, constraint, assignments)| {
                PatItem::Element(ElementDecl {
                    head,
                    action,
                    constraint,
                    assignments,
                    span: Span::default(),
                })
            })
            .boxed();
        let link = (
            ref_strategy(),
            class(),
            ident(),
            ref_strategy(),
            action_strategy(),
        )
            .prop_map(|(from, class, end, to, action)| {
                PatItem::Link(LinkDecl {
                    from,
                    class,
                    end,
                    to,
                    action,
                    span: Span::default(),
                })
            })
            .boxed();
        let flat = proptest::collection::vec(prop_oneof![element.clone(), link.clone()], 0..4);
        let nested = proptest::collection::vec(
            prop_oneof![
                3 => element,
                2 => link,
                1 => flat.prop_map(|items| PatItem::Not(PatBlock { items, span: Span::default() })),
            ],
            0..5,
        );
        nested.prop_map(|items| PatBlock {
            items,
            span: Span::default(),
        })
    }

    fn stmt_strategy() -> impl Strategy<Value = Stmt> {
        let s = Span::default();
        let leaf = prop_oneof![
            (ident(), expr_strategy()).prop_map(move |(target, value)| Stmt::Assign {
                target,
                value,
                span: s
            }),
            (ident(), proptest::collection::vec(expr_strategy(), 0..3)).prop_map(
                move |(callee, args)| Stmt::Call {
                    callee,
                    args,
                    span: s
                }
            ),
            (ident(), class(), proptest::option::of(expr_strategy())).prop_map(
                move |(name, ty, init)| Stmt::VarDecl {
                    name,
                    ty,
                    init,
                    span: s
                }
            ),
            (proptest::option::of(ident()), pat_strategy()).prop_map(move |(name, pattern)| {
                Stmt::While {
                    name,
                    pattern,
                    span: s,
                }
            }),
        ];
        leaf.prop_recursive(3, 16, 3, move |inner| {
            let block = proptest::collection::vec(inner, 0..3).prop_map(|stmts| Block { stmts });
            prop_oneof![
                (
                    proptest::option::of(ident()),
                    pat_strategy(),
                    proptest::option::of(block.clone())
                )
                    .prop_map(move |(name, pattern, else_block)| Stmt::Rule {
                        name,
                        pattern,
                        else_block,
                        span: s
                    }),
                (ident(), pat_strategy(), block).prop_map(move |(var, pattern, body)| {
                    Stmt::Foreach {
                        var,
                        pattern,
                        body,
                        span: s,
                    }
                }),
            ]
        })
    }

    fn program_strategy() -> impl Strategy<Value = Program> {
        let param = (ident(), class()).prop_map(|(name, ty)| Param { name, ty });
        let procedure = (
            ident(),
            proptest::collection::vec(param, 0..3),
            proptest::collection::vec(stmt_strategy(), 0..4),
        )
            .prop_map(|(name, params, stmts)| ProcedureDecl {
                name,
                params,
                body: Block { stmts },
            });
        proptest::collection::vec(procedure, 0..3).prop_map(|procedures| Program { procedures })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn print_then_parse_is_identity(program in program_strategy()) {
            let text = print_program(&program);
            let parsed = parse(&text);
            prop_assert!(parsed.is_ok(), "{:?}\n{}", parsed.diagnostics, text);
            prop_assert_eq!(&parsed.ast, &program, "{}", text);
            prop_assert_eq!(print_program(&parsed.ast), text);
        }
    }

    #[test]
    fn printing_is_stable_on_sample() {
        let text = "procedure main() {\n    foreach g {\n        element g : Graph;\n    } do {\n        call count(g);\n    }\n}\n";
        let parsed = parse(text);
        assert!(parsed.is_ok());
        assert_eq!(print_program(&parsed.ast), text);
    }
}
