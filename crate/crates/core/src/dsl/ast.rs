//! Syntax tree of `.mt` transformation programs.
//!
//! Every node carries a [`Span`] for diagnostics. Spans never take part in
//! equality, so two trees compare equal when they are structurally equal.

use std::fmt;

/// 1-based line and column.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: Position,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: &str) -> Ident {
        Ident {
            name: name.to_string(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub procedures: Vec<ProcedureDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcedureDecl {
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: Ident,
    /// A class name or one of `Integer`, `String`, `Boolean`.
    pub ty: Ident,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Rule {
        name: Option<Ident>,
        pattern: PatBlock,
        else_block: Option<Block>,
        span: Span,
    },
    While {
        name: Option<Ident>,
        pattern: PatBlock,
        span: Span,
    },
    Foreach {
        var: Ident,
        pattern: PatBlock,
        body: Block,
        span: Span,
    },
    Assign {
        target: Ident,
        value: Expr,
        span: Span,
    },
    Call {
        callee: Ident,
        args: Vec<Expr>,
        span: Span,
    },
    VarDecl {
        name: Ident,
        ty: Ident,
        init: Option<Expr>,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Rule { span, .. }
            | Stmt::While { span, .. }
            | Stmt::Foreach { span, .. }
            | Stmt::Assign { span, .. }
            | Stmt::Call { span, .. }
            | Stmt::VarDecl { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatBlock {
    pub items: Vec<PatItem>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatItem {
    Element(ElementDecl),
    Link(LinkDecl),
    Not(PatBlock),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKw {
    Create,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementHead {
    /// `@name`
    Reference(Ident),
    /// `name : Class`
    Fresh { name: Ident, class: Ident },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementDecl {
    pub head: ElementHead,
    pub action: Option<ActionKw>,
    pub constraint: Option<Expr>,
    pub assignments: Vec<(Ident, Expr)>,
    pub span: Span,
}

impl ElementDecl {
    pub fn name(&self) -> &Ident {
        match &self.head {
            ElementHead::Reference(n) => n,
            ElementHead::Fresh { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefName {
    pub name: Ident,
    /// Written with a leading `@`.
    pub at: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDecl {
    pub from: RefName,
    pub class: Ident,
    pub end: Ident,
    pub to: RefName,
    pub action: Option<ActionKw>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "or",
            BinaryOp::And => "and",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Str(String),
    Bool(bool),
    Name(Ident),
    Attr(Ident, Ident),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::default(),
        }
    }
}
