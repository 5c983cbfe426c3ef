//! Hand-written lexer and recursive-descent parser for `.rsl` sources.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::{ErrorKind, FrontendError};
use crate::bv::{BinOp, Ty, UnOp};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

const PUNCTS: [&str; 31] = [
    ":=", "..", "<<", ">>", "==", "!=", "<=", ">=", "(", ")", "{", "}", "[", "]", ";", ":", ",",
    "?", "+", "-", "*", "/", "%", "&", "|", "^", "<", ">", "!", "~", "=",
];

fn lex(src: &str) -> Result<Vec<Token>, FrontendError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    let bump = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for k in 0..n {
            if bytes[*i + k] == b'\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        }
        *i += n;
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            bump(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                bump(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let span = Span { line, col };
            bump(&mut i, &mut line, &mut col, 2);
            loop {
                if i + 1 >= bytes.len() {
                    return Err(FrontendError::new(
                        ErrorKind::Syntax,
                        span,
                        "unterminated block comment",
                    ));
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    bump(&mut i, &mut line, &mut col, 2);
                    break;
                }
                bump(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let span = Span { line, col };
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                bump(&mut i, &mut line, &mut col, 1);
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let (radix, digits_start) =
                if c == b'0' && matches!(bytes.get(i + 1), Some(b'x') | Some(b'X')) {
                    bump(&mut i, &mut line, &mut col, 2);
                    (16, i)
                } else {
                    (10, i)
                };
            while i < bytes.len() && (bytes[i].is_ascii_hexdigit() || bytes[i] == b'_') {
                if radix == 10 && !bytes[i].is_ascii_digit() && bytes[i] != b'_' {
                    break;
                }
                bump(&mut i, &mut line, &mut col, 1);
            }
            let text: String = src[digits_start..i]
                .chars()
                .filter(|&ch| ch != '_')
                .collect();
            let v = u64::from_str_radix(&text, radix).map_err(|_| {
                FrontendError::new(
                    ErrorKind::Syntax,
                    span,
                    format!("invalid integer literal `{}`", &src[start..i]),
                )
            })?;
            out.push(Token {
                tok: Tok::Int(v),
                span,
            });
            continue;
        }
        let rest = &src[i..];
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                bump(&mut i, &mut line, &mut col, p.len());
                out.push(Token {
                    tok: Tok::Punct(p),
                    span,
                });
            }
            None => {
                let ch = rest.chars().next().unwrap();
                return Err(FrontendError::new(
                    ErrorKind::Syntax,
                    span,
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
    });
    Ok(out)
}

/// Parse a scalar type name (`bool`, `u8`, `i16`, ...).
pub fn parse_scalar_type(name: &str) -> Option<Ty> {
    if name == "bool" {
        return Some(Ty::Bool);
    }
    let (signed, digits) = match name.as_bytes().first()? {
        b'u' => (false, &name[1..]),
        b'i' => (true, &name[1..]),
        _ => return None,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let width: u32 = digits.parse().ok()?;
    if (1..=64).contains(&width) {
        Some(Ty::Bv {
            width: width as u8,
            signed,
        })
    } else {
        None
    }
}

const KEYWORDS: [&str; 15] = [
    "input", "state", "local", "init", "loop", "if", "else", "assert", "assume", "for", "in",
    "nondet", "true", "false", "as",
];

fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name) || parse_scalar_type(name).is_some()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> FrontendError {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        };
        let exp: Vec<String> = expected.iter().map(|e| format!("`{e}`")).collect();
        FrontendError::new(
            ErrorKind::Syntax,
            self.span(),
            format!("expected one of {}, found {}", exp.join(", "), found),
        )
        .with_expected(expected)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), FrontendError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&[p]))
        }
    }

    fn expect_kw(&mut self, kw: &'static str) -> Result<(), FrontendError> {
        if self.is_kw(kw) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[kw]))
        }
    }

    fn ident(&mut self) -> Result<String, FrontendError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn int(&mut self) -> Result<u64, FrontendError> {
        match *self.peek() {
            Tok::Int(v) => {
                self.advance();
                Ok(v)
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn type_expr(&mut self) -> Result<TypeExpr, FrontendError> {
        let scalar = match self.peek().clone() {
            Tok::Ident(s) => match parse_scalar_type(&s) {
                Some(t) => {
                    self.advance();
                    t
                }
                None => return Err(self.error(&["type"])),
            },
            _ => return Err(self.error(&["type"])),
        };
        let array_len = if self.eat_punct("[") {
            let span = self.span();
            let n = self.int()?;
            if n == 0 || n > u32::MAX as u64 {
                return Err(FrontendError::new(
                    ErrorKind::Syntax,
                    span,
                    "array length must be positive",
                ));
            }
            self.expect_punct("]")?;
            Some(n as u32)
        } else {
            None
        };
        Ok(TypeExpr { scalar, array_len })
    }

    fn program(&mut self) -> Result<Program, FrontendError> {
        let mut decls = Vec::new();
        while self.is_kw("input") || self.is_kw("state") {
            decls.push(self.decl()?);
        }
        let mut init = Vec::new();
        if self.is_kw("init") {
            self.advance();
            init = self.block()?;
        }
        let mut loops = Vec::new();
        while self.is_kw("loop") {
            let span = self.span();
            self.advance();
            let name = self.ident()?;
            let body = self.block()?;
            loops.push(LoopDef { name, body, span });
        }
        if loops.is_empty() {
            let mut exp = vec!["loop"];
            if decls.is_empty() || init.is_empty() {
                exp.extend(["input", "state", "init"]);
            }
            return Err(self.error(&exp));
        }
        if !matches!(self.peek(), Tok::Eof) {
            return Err(self.error(&["loop", "end of input"]));
        }
        Ok(Program { decls, init, loops })
    }

    fn decl(&mut self) -> Result<Decl, FrontendError> {
        let span = self.span();
        let kind = if self.is_kw("input") {
            DeclKind::Input
        } else {
            DeclKind::State
        };
        self.advance();
        let ty = self.type_expr()?;
        let name = self.ident()?;
        let init = if self.eat_punct(":=") {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_punct(";")?;
        Ok(Decl {
            kind,
            ty,
            name,
            init,
            span,
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, FrontendError> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.error(&["}"]));
            }
            stmts.push(self.stmt()?);
        }
        self.advance();
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(kw) if kw == "if" => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let then_block = self.block()?;
                let else_block = if self.is_kw("else") {
                    self.advance();
                    if self.is_kw("if") {
                        Some(vec![self.stmt()?])
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_block,
                    else_block,
                }
            }
            Tok::Ident(kw) if kw == "assert" || kw == "assume" => {
                self.advance();
                self.expect_punct("(")?;
                let e = self.expr()?;
                self.expect_punct(")")?;
                self.expect_punct(";")?;
                if kw == "assert" {
                    StmtKind::Assert(e)
                } else {
                    StmtKind::Assume(e)
                }
            }
            Tok::Ident(kw) if kw == "for" => {
                self.advance();
                let var = self.ident()?;
                self.expect_kw("in")?;
                let lo = self.expr_no_range()?;
                self.expect_punct("..")?;
                let hi = self.expr_no_range()?;
                let body = self.block()?;
                StmtKind::For { var, lo, hi, body }
            }
            Tok::Ident(kw) if kw == "local" => {
                self.advance();
                let ty = self.type_expr()?;
                let name = self.ident()?;
                self.expect_punct(":=")?;
                let init = self.expr()?;
                self.expect_punct(";")?;
                StmtKind::Local { ty, name, init }
            }
            Tok::Ident(_) => {
                let target = self.ident()?;
                let index = if self.eat_punct("[") {
                    let e = self.expr()?;
                    self.expect_punct("]")?;
                    Some(e)
                } else {
                    None
                };
                if !self.eat_punct(":=") {
                    return Err(if index.is_none() {
                        self.error(&[":=", "["])
                    } else {
                        self.error(&[":="])
                    });
                }
                let value = self.expr()?;
                self.expect_punct(";")?;
                StmtKind::Assign {
                    target,
                    index,
                    value,
                }
            }
            _ => {
                return Err(self.error(&[
                    "identifier",
                    "if",
                    "assert",
                    "assume",
                    "for",
                    "local",
                    "}",
                ]))
            }
        };
        Ok(Stmt { kind, span })
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        self.ternary()
    }

    fn expr_no_range(&mut self) -> Result<Expr, FrontendError> {
        self.binary(0)
    }

    fn ternary(&mut self) -> Result<Expr, FrontendError> {
        let cond = self.binary(0)?;
        if self.is_punct("?") {
            let span = cond.span;
            self.advance();
            let t = self.ternary()?;
            self.expect_punct(":")?;
            let e = self.ternary()?;
            return Ok(Expr {
                kind: ExprKind::Ternary(Box::new(cond), Box::new(t), Box::new(e)),
                span,
            });
        }
        Ok(cond)
    }

    fn binop_at(&self, level: usize) -> Option<BinOp> {
        let p = match self.peek() {
            Tok::Punct(p) => *p,
            _ => return None,
        };
        let op = match (level, p) {
            (0, "|") => BinOp::Or,
            (1, "^") => BinOp::Xor,
            (2, "&") => BinOp::And,
            (3, "==") => BinOp::Eq,
            (3, "!=") => BinOp::Ne,
            (4, "<") => BinOp::Lt,
            (4, "<=") => BinOp::Le,
            (4, ">") => BinOp::Gt,
            (4, ">=") => BinOp::Ge,
            (5, "<<") => BinOp::Shl,
            (5, ">>") => BinOp::Shr,
            (6, "+") => BinOp::Add,
            (6, "-") => BinOp::Sub,
            (7, "*") => BinOp::Mul,
            (7, "/") => BinOp::Div,
            (7, "%") => BinOp::Rem,
            _ => return None,
        };
        Some(op)
    }

    fn binary(&mut self, level: usize) -> Result<Expr, FrontendError> {
        if level > 7 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop_at(level) {
            self.advance();
            let rhs = self.binary(level + 1)?;
            let span = lhs.span;
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, FrontendError> {
        let span = self.span();
        let op = if self.is_punct("-") {
            Some(UnOp::Neg)
        } else if self.is_punct("!") {
            Some(UnOp::Not)
        } else if self.is_punct("~") {
            Some(UnOp::BitNot)
        } else {
            None
        };
        if let Some(op) = op {
            self.advance();
            let e = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Unary(op, Box::new(e)),
                span,
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, FrontendError> {
        let mut e = self.primary()?;
        while self.is_kw("as") {
            self.advance();
            let span = self.span();
            let ty = self.type_expr()?;
            if ty.array_len.is_some() {
                return Err(FrontendError::new(
                    ErrorKind::Syntax,
                    span,
                    "cannot cast to an array type",
                ));
            }
            let s = e.span;
            e = Expr {
                kind: ExprKind::Cast(Box::new(e), ty.scalar),
                span: s,
            };
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, FrontendError> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                ExprKind::Int(v)
            }
            Tok::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(")")?;
                return Ok(e);
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.advance();
                ExprKind::Bool(s == "true")
            }
            Tok::Ident(s) if s == "nondet" => {
                self.advance();
                self.expect_punct("(")?;
                self.expect_punct(")")?;
                ExprKind::Nondet
            }
            Tok::Ident(s) if !is_reserved(&s) => {
                self.advance();
                if self.is_punct("[") && !matches!(self.peek_at(1), Tok::Punct("]")) {
                    self.advance();
                    let idx = self.expr()?;
                    self.expect_punct("]")?;
                    ExprKind::Index(s, Box::new(idx))
                } else {
                    ExprKind::Ident(s)
                }
            }
            _ => {
                return Err(self.error(&[
                    "integer",
                    "identifier",
                    "true",
                    "false",
                    "nondet",
                    "(",
                    "-",
                    "!",
                    "~",
                ]))
            }
        };
        Ok(Expr { kind, span })
    }
}

pub fn parse(src: &str) -> Result<Program, FrontendError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let p = parse("state u8 c := 0; loop main { c := c + 1; assert(c != 3); }").unwrap();
        assert_eq!(p.decls.len(), 1);
        assert_eq!(p.loops.len(), 1);
        assert_eq!(p.loops[0].body.len(), 2);
    }

    #[test]
    fn empty_loop_body_is_legal() {
        let p = parse("loop main { }").unwrap();
        assert!(p.decls.is_empty());
        assert!(p.loops[0].body.is_empty());
    }

    #[test]
    fn unterminated_loop_reports_eof() {
        let err = parse("loop main {").unwrap_err();
        assert_eq!(err.kind, ErrorKind::Syntax);
        assert!(err.message.contains("end of input"), "{}", err.message);
        assert!(err.expected.iter().any(|e| e == "}"));
    }

    #[test]
    fn precedence_matches_c() {
        let p = parse("state u8 x := 1 + 2 * 3 << 1; loop m { }").unwrap();
        let init = p.decls[0].init.as_ref().unwrap();
        match &init.kind {
            ExprKind::Binary(BinOp::Shl, l, _) => {
                assert!(matches!(l.kind, ExprKind::Binary(BinOp::Add, _, _)))
            }
            k => panic!("unexpected {k:?}"),
        }
    }

    #[test]
    fn reports_position() {
        let err = parse("state u8 x := ;\nloop m { }").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (1, 15));
    }

    #[test]
    fn scalar_types() {
        assert_eq!(parse_scalar_type("u8"), Some(Ty::unsigned(8)));
        assert_eq!(parse_scalar_type("i64"), Some(Ty::signed(64)));
        assert_eq!(parse_scalar_type("u65"), None);
        assert_eq!(parse_scalar_type("u0"), None);
        assert_eq!(parse_scalar_type("index"), None);
    }
}
