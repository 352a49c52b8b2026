//! The textual transformation language.
//!
//! A program is a list of procedures. Each procedure body is a block of
//! statements: `rule`, `while rule`, `foreach ... do`, `var`, `call` and
//! assignment. Rules contain a pattern of `element`, `link` and `not` items.
//!
//! ```text
//! procedure count(g: Graph) {
//!     var sk: Integer := 0;
//!     foreach n { element @g; element n : Node; link @g -[Graph.nodes]-> n; } do {
//!         sk := sk + 1;
//!     }
//!     rule { element r : IntResult create set result := sk; }
//! }
//! ```
//!
//! [`parse`] produces a syntax tree and syntax diagnostics; [`compile`] also
//! resolves names and types against a metamodel and lowers the tree to an
//! executable [`crate::interpreter::Program`].

pub mod ast;
pub mod lexer;
mod lower;
mod parser;
pub mod printer;

use std::fmt;

use crate::interpreter;
use crate::metamodel::Metamodel;
use ast::Position;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub pos: Position,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Position, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

/// Result of parsing one source file.
#[derive(Debug, Clone)]
pub struct SourceProgram {
    pub ast: ast::Program,
    /// Sorted by position. Empty when the text is syntactically valid.
    pub diagnostics: Vec<Diagnostic>,
}

impl SourceProgram {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

pub fn parse(text: &str) -> SourceProgram {
    let mut diagnostics = Vec::new();
    let tokens = lexer::lex(text, &mut diagnostics);
    let ast = parser::Parser::new(&tokens, &mut diagnostics).program();
    diagnostics.sort();
    SourceProgram { ast, diagnostics }
}

/// Checks a syntax tree against `metamodel` and lowers it.
pub fn lower(
    program: &ast::Program,
    metamodel: &Metamodel,
) -> Result<interpreter::Program, Vec<Diagnostic>> {
    lower::lower(program, metamodel)
}

/// Parses, checks and lowers `text`. All syntax diagnostics are reported;
/// semantic checks only run on syntactically valid input.
pub fn compile(text: &str, metamodel: &Metamodel) -> Result<interpreter::Program, Vec<Diagnostic>> {
    let parsed = parse(text);
    if !parsed.is_ok() {
        return Err(parsed.diagnostics);
    }
    lower(&parsed.ast, metamodel)
}

/// Renders diagnostics one per line, prefixed with `file`.
pub fn render_diagnostics(file: &str, diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| format!("{file}:{d}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_class_reported_at_next_token() {
        let text = "procedure p() {\n    rule { element n : }\n}\n";
        let parsed = parse(text);
        assert_eq!(parsed.diagnostics.len(), 1, "{:?}", parsed.diagnostics);
        let d = &parsed.diagnostics[0];
        assert_eq!(d.pos, Position { line: 2, col: 24 });
        assert!(d.message.contains("class name"), "{}", d.message);
    }

    #[test]
    fn recovery_reports_several_errors() {
        let text =
            "procedure p() {\n  x := ;\n  call q(;\n  rule { element n : Node; }\n  y := 1 +;\n}\n";
        let parsed = parse(text);
        let lines: Vec<u32> = parsed.diagnostics.iter().map(|d| d.pos.line).collect();
        assert_eq!(lines, vec![2, 3, 5], "{:?}", parsed.diagnostics);
    }

    #[test]
    fn comparisons_do_not_chain() {
        let parsed = parse("procedure p() { x := 1 < 2 < 3; }");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].message.contains("non-associative"));
        assert!(parse("procedure p() { x := (1 < 2) = true; }").is_ok());
    }

    #[test]
    fn precedence() {
        use ast::{BinaryOp, ExprKind};
        let parsed = parse("procedure p() { x := not a or b and 1 + 2 * 3 = 7; }");
        assert!(parsed.is_ok(), "{:?}", parsed.diagnostics);
        let ast::Stmt::Assign { value, .. } = &parsed.ast.procedures[0].body.stmts[0] else {
            panic!()
        };
        let ExprKind::Binary(BinaryOp::Or, lhs, rhs) = &value.kind else {
            panic!()
        };
        assert!(matches!(lhs.kind, ExprKind::Unary(ast::UnaryOp::Not, _)));
        let ExprKind::Binary(BinaryOp::And, _, cmp) = &rhs.kind else {
            panic!()
        };
        let ExprKind::Binary(BinaryOp::Eq, sum, _) = &cmp.kind else {
            panic!()
        };
        let ExprKind::Binary(BinaryOp::Add, _, prod) = &sum.kind else {
            panic!()
        };
        assert!(matches!(prod.kind, ExprKind::Binary(BinaryOp::Mul, _, _)));
    }

    #[test]
    fn diagnostics_render_with_file_name() {
        let parsed = parse("procedure");
        let out = render_diagnostics("x.mt", &parsed.diagnostics);
        assert!(
            out.starts_with("x.mt:1:10: expected procedure name"),
            "{out}"
        );
    }
}
