//! Recursive descent parser. `for` loops are desugared at parse time into an
//! init statement followed by a `while` whose body ends with the update
//! statement, so the init/guard/update triple gets three distinct statement
//! ids and each piece is individually mutable.

use super::ast::*;
use super::lexer::{lex, Pos, Tok, Token};
use crate::lang::LangError;

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

pub fn parse(source: &str) -> Result<Program, LangError> {
    let tokens = lex(source).map_err(|e| LangError::Syntax {
        pos: e.pos,
        message: e.message,
    })?;
    let mut p = Parser { tokens, at: 0 };
    let mut prog = p.program()?;
    prog.renumber();
    Ok(prog)
}

/// Parses a standalone integer expression (used for array-length formulas in
/// suite files).
pub fn parse_expr(source: &str) -> Result<Expr, LangError> {
    let tokens = lex(source).map_err(|e| LangError::Syntax {
        pos: e.pos,
        message: e.message,
    })?;
    let mut p = Parser { tokens, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(&format!("expected end of expression, found {}", p.peek())));
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), LangError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&format!("expected {want}, found {}", self.peek())))
        }
    }

    fn err(&self, message: &str) -> LangError {
        LangError::Syntax {
            pos: self.pos(),
            message: message.to_string(),
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.err(&format!("expected identifier, found {other}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), LangError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(LangError::Syntax {
                pos: self.pos(),
                message: format!("expected `{kw}`, found {other}"),
            }),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn program(&mut self) -> Result<Program, LangError> {
        if *self.peek() == Tok::Eof {
            return Err(self.err("empty program"));
        }
        self.keyword("proc")?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                params.push(self.param()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let mut outputs = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            outputs.push(self.ident()?);
        }
        let body = self.block()?;
        if *self.peek() != Tok::Eof {
            return Err(self.err(&format!("expected end of input, found {}", self.peek())));
        }
        Ok(Program { name, params, outputs, body })
    }

    fn param(&mut self) -> Result<Param, LangError> {
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        self.keyword("int")?;
        if *self.peek() == Tok::LBracket {
            self.bump();
            let len = self.expr()?;
            self.expect(Tok::RBracket)?;
            Ok(Param { name, ty: ParamType::IntArray, len: Some(len) })
        } else {
            Ok(Param { name, ty: ParamType::Int, len: None })
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, LangError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            self.stmt_into(&mut stmts)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(stmts)
    }

    /// Parses one surface statement; `for` pushes two statements (init and
    /// the desugared while).
    fn stmt_into(&mut self, out: &mut Vec<Stmt>) -> Result<(), LangError> {
        let pos = self.pos();
        let mk = |kind| Stmt { id: StmtId(0), kind };
        if self.at_keyword("if") {
            self.bump();
            self.expect(Tok::LParen)?;
            let cond = self.expr()?;
            self.expect(Tok::RParen)?;
            let then_branch = self.block()?;
            let else_branch = if self.at_keyword("else") {
                self.bump();
                self.block()?
            } else {
                Vec::new()
            };
            out.push(mk(StmtKind::If { cond, then_branch, else_branch }));
        } else if self.at_keyword("while") {
            self.bump();
            let label = self.opt_label(pos)?;
            self.expect(Tok::LParen)?;
            let cond = self.expr()?;
            self.expect(Tok::RParen)?;
            let body = self.block()?;
            out.push(mk(StmtKind::While { label, cond, body }));
        } else if self.at_keyword("for") {
            self.bump();
            let label = self.opt_label(pos)?;
            self.expect(Tok::LParen)?;
            let init = self.simple_stmt()?;
            self.expect(Tok::Semi)?;
            let cond = self.expr()?;
            self.expect(Tok::Semi)?;
            let update = self.simple_stmt()?;
            self.expect(Tok::RParen)?;
            let mut body = self.block()?;
            body.push(mk(update));
            out.push(mk(init));
            out.push(mk(StmtKind::While { label, cond, body }));
        } else if self.at_keyword("break") {
            self.bump();
            self.expect(Tok::Semi)?;
            out.push(mk(StmtKind::Break));
        } else if self.at_keyword("skip") {
            self.bump();
            self.expect(Tok::Semi)?;
            out.push(mk(StmtKind::Skip));
        } else {
            let kind = self.simple_stmt()?;
            self.expect(Tok::Semi)?;
            out.push(mk(kind));
        }
        Ok(())
    }

    /// Assignment or input read, without the trailing semicolon.
    fn simple_stmt(&mut self) -> Result<StmtKind, LangError> {
        let name = self.ident()?;
        let target = if *self.peek() == Tok::LBracket {
            self.bump();
            let idx = self.expr()?;
            self.expect(Tok::RBracket)?;
            LValue::Elem(name, idx)
        } else {
            LValue::Var(name)
        };
        self.expect(Tok::Assign)?;
        if self.at_keyword("input") {
            let save = self.at;
            self.bump();
            if *self.peek() == Tok::LParen {
                self.bump();
                self.expect(Tok::RParen)?;
                return Ok(StmtKind::Read { target });
            }
            // `input` used as a plain variable name
            self.at = save;
        }
        let value = self.expr()?;
        Ok(StmtKind::Assign { target, value })
    }

    /// Loop label: optional identifier between the loop keyword and `(`.
    /// Absent labels derive from the keyword's source line.
    fn opt_label(&mut self, kw_pos: Pos) -> Result<Label, LangError> {
        if let Tok::Ident(s) = self.peek() {
            let s = s.clone();
            self.bump();
            Ok(s)
        } else {
            Ok(format!("L{}", kw_pos.line))
        }
    }

    // Expression precedence, loosest first: || < && < comparison < +- < */ < unary.
    fn expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.and_expr()?;
            lhs = Expr::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.cmp_expr()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.cmp_expr()?;
            lhs = Expr::Bin(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> Result<Expr, LangError> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.add_expr()?;
        Ok(Expr::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn add_expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary_expr(&mut self) -> Result<Expr, LangError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary_expr()?)))
            }
            Tok::Bang => {
                self.bump();
                Ok(Expr::Not(Box::new(self.unary_expr()?)))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LBracket {
                    self.bump();
                    let idx = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    Ok(Expr::Index(name, Box::new(idx)))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            other => Err(self.err(&format!("expected expression, found {other}"))),
        }
    }
}
