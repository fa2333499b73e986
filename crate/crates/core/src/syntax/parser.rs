//! Recursive-descent parser for MiniLang.

use std::sync::Arc;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Parses one source file into a renumbered [`Module`].
pub fn parse_module(source: &str, file: &str) -> Result<Module, ParseError> {
    let file: Arc<str> = Arc::from(file);
    let tokens = tokenize(source, &file)?;
    let mut parser = Parser { tokens, at: 0, prev_end: 0 };
    let mut module = parser.module()?;
    module.renumber();
    Ok(module)
}

/// Parses a single statement; used when splicing synthesized code.
pub fn parse_stmt(source: &str) -> Result<Stmt, ParseError> {
    let file: Arc<str> = Arc::from("<snippet>");
    let tokens = tokenize(source, &file)?;
    let mut parser = Parser { tokens, at: 0, prev_end: 0 };
    let stmt = parser.stmt()?;
    parser.expect(Tok::Eof)?;
    Ok(stmt)
}

/// Parses a single expression.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let file: Arc<str> = Arc::from("<snippet>");
    let tokens = tokenize(source, &file)?;
    let mut parser = Parser { tokens, at: 0, prev_end: 0 };
    let expr = parser.expr()?;
    parser.expect(Tok::Eof)?;
    Ok(expr)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    prev_end: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> SourcePos {
        self.tokens[self.at].pos.clone()
    }

    fn advance(&mut self) -> Tok {
        let token = &self.tokens[self.at];
        self.prev_end = token.end;
        let tok = token.tok.clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> ParseError {
        ParseError { pos: self.pos(), message: format!("expected {expected}, found {}", self.peek().describe()) }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error_here(&tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn meta(&self, pos: SourcePos) -> Meta {
        Meta { id: NodeId::default(), pos, end: self.prev_end }
    }

    fn module(&mut self) -> PResult<Module> {
        let mut module = Module::default();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(module),
                Tok::Class => module.classes.push(self.class()?),
                Tok::Fn => {
                    let pos = self.pos();
                    module.functions.push(self.method(pos, false)?);
                }
                _ => return Err(self.error_here("`class` or `fn`")),
            }
        }
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        let pos = self.pos();
        self.expect(Tok::Class)?;
        let name = self.ident("class name")?;
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        let mut ctor = None;
        let mut methods = Vec::new();
        loop {
            let member_pos = self.pos();
            match self.peek() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Var => {
                    self.advance();
                    let name = self.ident("field name")?;
                    self.expect(Tok::Colon)?;
                    let ty = self.ty()?;
                    self.expect(Tok::Semi)?;
                    fields.push(FieldDecl { meta: self.meta(member_pos), name, ty });
                }
                Tok::Init => {
                    if ctor.is_some() {
                        return Err(ParseError { pos: member_pos, message: "duplicate constructor".into() });
                    }
                    self.advance();
                    let params = self.params()?;
                    let body = self.block()?;
                    ctor = Some(MethodDecl {
                        meta: self.meta(member_pos),
                        name: "init".into(),
                        params,
                        return_type: None,
                        body,
                        is_pub: true,
                    });
                }
                Tok::Pub => {
                    self.advance();
                    if *self.peek() != Tok::Fn {
                        return Err(self.error_here("`fn`"));
                    }
                    methods.push(self.method(member_pos, true)?);
                }
                Tok::Fn => methods.push(self.method(member_pos, false)?),
                _ => return Err(self.error_here("`var`, `init`, `fn`, `pub` or `}`")),
            }
        }
        Ok(ClassDecl { meta: self.meta(pos), name, fields, ctor, methods })
    }

    fn method(&mut self, pos: SourcePos, is_pub: bool) -> PResult<MethodDecl> {
        self.expect(Tok::Fn)?;
        let name = self.ident("function name")?;
        let params = self.params()?;
        let return_type = if self.eat(&Tok::Arrow) { Some(self.ty()?) } else { None };
        let body = self.block()?;
        Ok(MethodDecl { meta: self.meta(pos), name, params, return_type, body, is_pub })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let name = self.ident("parameter name")?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                params.push(Param { name, ty });
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(params)
    }

    fn ty(&mut self) -> PResult<Type> {
        let name = self.ident("type")?;
        Ok(match name.as_str() {
            "int" => Type::Int,
            "bool" => Type::Bool,
            "str" => Type::Str,
            "List" => Type::List,
            _ => Type::Class(name),
        })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if *self.peek() == Tok::Eof {
                return Err(self.error_here("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let pos = self.pos();
        let kind = match self.peek() {
            Tok::Let => {
                self.advance();
                let name = self.ident("variable name")?;
                let ty = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
                self.expect(Tok::Assign)?;
                let init = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::VarDecl { name, ty, init }
            }
            Tok::If => return self.if_stmt(),
            Tok::While => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            Tok::Return => {
                self.advance();
                let value = if *self.peek() == Tok::Semi { None } else { Some(self.expr()?) };
                self.expect(Tok::Semi)?;
                StmtKind::Return(value)
            }
            Tok::Throw => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Throw(e)
            }
            Tok::AssertThrows => {
                self.advance();
                self.expect(Tok::LParen)?;
                let message = match self.advance() {
                    Tok::Str(s) => s,
                    _ => {
                        self.at -= 1;
                        return Err(self.error_here("expected-exception message string"));
                    }
                };
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::AssertThrows { message, body }
            }
            _ => {
                let target = self.expr()?;
                let kind = match self.peek() {
                    Tok::Assign | Tok::PlusAssign | Tok::MinusAssign => {
                        let op = self.advance();
                        if !matches!(target.kind, ExprKind::Var(_) | ExprKind::Field { .. }) {
                            return Err(ParseError {
                                pos: target.meta.pos.clone(),
                                message: "invalid assignment target".into(),
                            });
                        }
                        let value = self.expr()?;
                        match op {
                            Tok::Assign => StmtKind::Assign { target, value },
                            Tok::PlusAssign => StmtKind::CompoundAssign { target, op: CompoundOp::Add, value },
                            _ => StmtKind::CompoundAssign { target, op: CompoundOp::Sub, value },
                        }
                    }
                    _ => StmtKind::Expr(target),
                };
                self.expect(Tok::Semi)?;
                kind
            }
        };
        Ok(Stmt { meta: self.meta(pos), kind })
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let pos = self.pos();
        self.expect(Tok::If)?;
        self.expect(Tok::LParen)?;
        let cond = self.expr()?;
        self.expect(Tok::RParen)?;
        let then_block = self.block()?;
        let else_block = if self.eat(&Tok::Else) {
            if *self.peek() == Tok::If {
                Some(vec![self.if_stmt()?])
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(Stmt { meta: self.meta(pos), kind: StmtKind::If { cond, then_block, else_block } })
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek() {
            Tok::OrOr => BinaryOp::Or,
            Tok::AndAnd => BinaryOp::And,
            Tok::EqEq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            Tok::Percent => BinaryOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let pos = self.pos();
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr {
                meta: self.meta(pos.clone()),
                kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) },
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek() {
            Tok::Minus => {
                self.advance();
                if let Tok::Int(magnitude) = *self.peek() {
                    // `-<digits>` is a single negative literal.
                    self.advance();
                    let value = 0i64
                        .checked_sub_unsigned(magnitude)
                        .ok_or_else(|| ParseError { pos: pos.clone(), message: "integer literal too large".into() })?;
                    return self.postfix(Expr { meta: self.meta(pos.clone()), kind: ExprKind::Int(value) }, pos);
                }
                let operand = self.unary()?;
                Ok(Expr { meta: self.meta(pos), kind: ExprKind::Unary { op: UnaryOp::Neg, operand: Box::new(operand) } })
            }
            Tok::Bang => {
                self.advance();
                let operand = self.unary()?;
                Ok(Expr { meta: self.meta(pos), kind: ExprKind::Unary { op: UnaryOp::Not, operand: Box::new(operand) } })
            }
            _ => {
                let primary = self.primary()?;
                self.postfix(primary, pos)
            }
        }
    }

    fn postfix(&mut self, mut expr: Expr, pos: SourcePos) -> PResult<Expr> {
        while self.eat(&Tok::Dot) {
            let name = self.ident("field or method name")?;
            let kind = if *self.peek() == Tok::LParen {
                let args = self.args()?;
                ExprKind::Call { receiver: Some(Box::new(expr)), name, args }
            } else {
                ExprKind::Field { receiver: Box::new(expr), name }
            };
            expr = Expr { meta: self.meta(pos.clone()), kind };
        }
        Ok(expr)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Int(magnitude) => {
                self.advance();
                let value = i64::try_from(magnitude)
                    .map_err(|_| ParseError { pos: pos.clone(), message: "integer literal too large".into() })?;
                ExprKind::Int(value)
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
            Tok::Null => {
                self.advance();
                ExprKind::Null
            }
            Tok::New => {
                self.advance();
                let class = self.ident("class name")?;
                let args = self.args()?;
                ExprKind::New { class, args }
            }
            Tok::Ident(name) => {
                self.advance();
                if *self.peek() == Tok::LParen {
                    let args = self.args()?;
                    ExprKind::Call { receiver: None, name, args }
                } else {
                    ExprKind::Var(name)
                }
            }
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            _ => return Err(self.error_here("expression")),
        };
        Ok(Expr { meta: self.meta(pos), kind })
    }
}
