//! Recursive-descent parser with statement-level error recovery.

use super::ast::*;
use super::lexer::{Tok, Token};
use super::Diagnostic;

/// Marker for "a diagnostic has been recorded"; the caller resynchronizes.
pub(super) struct Reported;

pub(super) type PResult<T> = Result<T, Reported>;

pub(super) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    diags: &'a mut Vec<Diagnostic>,
}

const STMT_START: &[Tok] = &[Tok::Rule, Tok::While, Tok::Foreach, Tok::Call, Tok::Var];
const ITEM_START: &[Tok] = &[Tok::Element, Tok::Link, Tok::Not];

impl<'a> Parser<'a> {
    pub(super) fn new(toks: &'a [Token], diags: &'a mut Vec<Diagnostic>) -> Parser<'a> {
        Parser {
            toks,
            pos: 0,
            diags,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> Span {
        Span {
            start: self.toks[self.pos].pos,
        }
    }

    fn advance(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().to_string();
        self.diags.push(Diagnostic::new(
            self.toks[self.pos].pos,
            format!("expected {expected}, found {found}"),
        ));
        Err(Reported)
    }

    fn expect(&mut self, tok: &Tok) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(&tok.to_string())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        if let Tok::Ident(name) = self.peek() {
            let ident = Ident {
                name: name.clone(),
                span: self.here(),
            };
            self.advance();
            Ok(ident)
        } else {
            self.error(what)
        }
    }

    /// Skips to the end of the current statement or item: past a `;`, or up
    /// to a closing `}` or a token in `starts`, honouring nested braces.
    fn synchronize(&mut self, starts: &[Tok]) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.advance();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    if depth == 0 {
                        self.advance();
                        return;
                    }
                }
                t if depth == 0 && starts.contains(t) => return,
                _ => {}
            }
            self.advance();
        }
    }

    pub(super) fn program(&mut self) -> Program {
        let mut procedures = Vec::new();
        while !self.at(&Tok::Eof) {
            if !self.at(&Tok::Procedure) {
                let _ = self.error::<()>("`procedure`");
                // Skip to the next procedure header.
                while !self.at(&Tok::Eof) && !self.at(&Tok::Procedure) {
                    self.advance();
                }
                continue;
            }
            match self.procedure() {
                Ok(p) => procedures.push(p),
                Err(Reported) => {
                    self.advance();
                    while !self.at(&Tok::Eof) && !self.at(&Tok::Procedure) {
                        self.advance();
                    }
                }
            }
        }
        Program { procedures }
    }

    fn procedure(&mut self) -> PResult<ProcedureDecl> {
        self.expect(&Tok::Procedure)?;
        let name = self.ident("procedure name")?;
        self.expect(&Tok::LParen)?;
        let mut params = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                let pname = self.ident("parameter name")?;
                self.expect(&Tok::Colon)?;
                let ty = self.ident("parameter type")?;
                params.push(Param { name: pname, ty });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        let body = self.block()?;
        Ok(ProcedureDecl { name, params, body })
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect(&Tok::LBrace)?;
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.advance();
                    return Ok(Block { stmts });
                }
                Tok::Eof | Tok::Procedure => return self.error("`}`"),
                _ => match self.stmt() {
                    Ok(s) => stmts.push(s),
                    Err(Reported) => self.synchronize(STMT_START),
                },
            }
        }
    }

    fn opt_name(&mut self) -> Option<Ident> {
        if let Tok::Ident(_) = self.peek() {
            self.ident("rule name").ok()
        } else {
            None
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.here();
        match self.peek().clone() {
            Tok::Rule => {
                self.advance();
                let name = self.opt_name();
                let pattern = self.pat_block()?;
                let else_block = if self.eat(&Tok::Else) {
                    Some(self.block()?)
                } else {
                    None
                };
                Ok(Stmt::Rule {
                    name,
                    pattern,
                    else_block,
                    span,
                })
            }
            Tok::While => {
                self.advance();
                self.expect(&Tok::Rule)?;
                let name = self.opt_name();
                let pattern = self.pat_block()?;
                Ok(Stmt::While {
                    name,
                    pattern,
                    span,
                })
            }
            Tok::Foreach => {
                self.advance();
                let var = self.ident("loop variable")?;
                let pattern = self.pat_block()?;
                self.expect(&Tok::Do)?;
                let body = self.block()?;
                Ok(Stmt::Foreach {
                    var,
                    pattern,
                    body,
                    span,
                })
            }
            Tok::Call => {
                self.advance();
                let callee = self.ident("procedure name")?;
                self.expect(&Tok::LParen)?;
                let mut args = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Semi)?;
                Ok(Stmt::Call { callee, args, span })
            }
            Tok::Var => {
                self.advance();
                let name = self.ident("variable name")?;
                self.expect(&Tok::Colon)?;
                let ty = self.ident("variable type")?;
                let init = if self.eat(&Tok::ColonEq) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(&Tok::Semi)?;
                Ok(Stmt::VarDecl {
                    name,
                    ty,
                    init,
                    span,
                })
            }
            Tok::Ident(_) => {
                let target = self.ident("assignment target")?;
                self.expect(&Tok::ColonEq)?;
                let value = self.expr()?;
                self.expect(&Tok::Semi)?;
                Ok(Stmt::Assign {
                    target,
                    value,
                    span,
                })
            }
            _ => self.error("statement"),
        }
    }

    fn pat_block(&mut self) -> PResult<PatBlock> {
        let span = self.here();
        self.expect(&Tok::LBrace)?;
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.advance();
                    return Ok(PatBlock { items, span });
                }
                Tok::Eof | Tok::Procedure => return self.error("`}`"),
                _ => match self.pat_item() {
                    Ok(item) => items.push(item),
                    Err(Reported) => self.synchronize(ITEM_START),
                },
            }
        }
    }

    fn action(&mut self) -> Option<ActionKw> {
        if self.eat(&Tok::Create) {
            Some(ActionKw::Create)
        } else if self.eat(&Tok::Delete) {
            Some(ActionKw::Delete)
        } else {
            None
        }
    }

    fn ref_name(&mut self) -> PResult<RefName> {
        let at = self.eat(&Tok::At);
        let name = self.ident("element name")?;
        Ok(RefName { name, at })
    }

    fn pat_item(&mut self) -> PResult<PatItem> {
        let span = self.here();
        match self.peek() {
            Tok::Element => {
                self.advance();
                let head = if self.eat(&Tok::At) {
                    ElementHead::Reference(self.ident("element name")?)
                } else {
                    let name = self.ident("element name")?;
                    self.expect(&Tok::Colon)?;
                    let class = self.ident("class name")?;
                    ElementHead::Fresh { name, class }
                };
                let action = self.action();
                let constraint = if self.eat(&Tok::Where) {
                    Some(self.expr()?)
                } else {
                    None
                };
                let mut assignments = Vec::new();
                if self.eat(&Tok::Set) {
                    loop {
                        let attr = self.ident("attribute name")?;
                        self.expect(&Tok::ColonEq)?;
                        assignments.push((attr, self.expr()?));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::Semi)?;
                Ok(PatItem::Element(ElementDecl {
                    head,
                    action,
                    constraint,
                    assignments,
                    span,
                }))
            }
            Tok::Link => {
                self.advance();
                let from = self.ref_name()?;
                self.expect(&Tok::LinkOpen)?;
                let class = self.ident("class name")?;
                self.expect(&Tok::Dot)?;
                let end = self.ident("association end")?;
                self.expect(&Tok::LinkClose)?;
                let to = self.ref_name()?;
                let action = self.action();
                self.expect(&Tok::Semi)?;
                Ok(PatItem::Link(LinkDecl {
                    from,
                    class,
                    end,
                    to,
                    action,
                    span,
                }))
            }
            Tok::Not => {
                self.advance();
                Ok(PatItem::Not(self.pat_block()?))
            }
            _ => self.error("`element`, `link` or `not`"),
        }
    }

    // Expressions: or < and < not < comparison (non-associative) < + - < * < unary.

    pub(super) fn expr(&mut self) -> PResult<Expr> {
        self.or_expr()
    }

    fn binary_chain(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        ops: &[(Tok, BinaryOp)],
    ) -> PResult<Expr> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (tok, op) in ops {
                if self.at(tok) {
                    let span = self.here();
                    self.advance();
                    let rhs = next(self)?;
                    lhs = Expr {
                        kind: ExprKind::Binary(*op, Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        self.binary_chain(Self::and_expr, &[(Tok::Or, BinaryOp::Or)])
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        self.binary_chain(Self::not_expr, &[(Tok::And, BinaryOp::And)])
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.at(&Tok::Not) {
            let span = self.here();
            self.advance();
            let inner = self.not_expr()?;
            return Ok(Expr {
                kind: ExprKind::Unary(UnaryOp::Not, Box::new(inner)),
                span,
            });
        }
        self.comparison()
    }

    fn comparison_op(&self) -> Option<BinaryOp> {
        Some(match self.peek() {
            Tok::Eq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let Some(op) = self.comparison_op() else {
            return Ok(lhs);
        };
        let span = self.here();
        self.advance();
        let rhs = self.additive()?;
        if self.comparison_op().is_some() {
            self.diags.push(Diagnostic::new(
                self.toks[self.pos].pos,
                "comparison operators are non-associative; add parentheses",
            ));
            return Err(Reported);
        }
        Ok(Expr {
            kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            span,
        })
    }

    fn additive(&mut self) -> PResult<Expr> {
        self.binary_chain(
            Self::multiplicative,
            &[(Tok::Plus, BinaryOp::Add), (Tok::Minus, BinaryOp::Sub)],
        )
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        self.binary_chain(Self::unary, &[(Tok::Star, BinaryOp::Mul)])
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at(&Tok::Minus) {
            let span = self.here();
            self.advance();
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Unary(UnaryOp::Neg, Box::new(inner)),
                span,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.here();
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                ExprKind::Int(v)
            }
            Tok::Str(s) => {
                self.advance();
                ExprKind::Str(s)
            }
            Tok::True => {
                self.advance();
                ExprKind::Bool(true)
            }
            Tok::False => {
                self.advance();
                ExprKind::Bool(false)
            }
            Tok::Ident(_) => {
                let name = self.ident("name")?;
                if self.at(&Tok::Dot) && matches!(self.peek_at(1), Tok::Ident(_)) {
                    self.advance();
                    let attr = self.ident("attribute name")?;
                    ExprKind::Attr(name, attr)
                } else if self.at(&Tok::Dot) {
                    self.advance();
                    return self.error("attribute name");
                } else {
                    ExprKind::Name(name)
                }
            }
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                return Ok(inner);
            }
            _ => return self.error("expression"),
        };
        Ok(Expr { kind, span })
    }
}
