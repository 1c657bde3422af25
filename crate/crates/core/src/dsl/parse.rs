use super::{BinOp, Expr, ExprError, ExprErrorKind, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start).map(|n| (Tok::Num(n), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .bytes
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        self.pos += 1;
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::new(
                    ExprErrorKind::SyntaxError,
                    start,
                    format!("unexpected character '{ch}'"),
                ));
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<f64, ExprError> {
        let digits = |l: &mut Self| {
            let s = l.pos;
            while l.bytes.get(l.pos).is_some_and(u8::is_ascii_digit) {
                l.pos += 1;
            }
            l.pos - s
        };
        let mut n = digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ExprError::new(ExprErrorKind::SyntaxError, start, "malformed number"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // Not an exponent; leave `e` for the identifier lexer.
                self.pos = save;
            }
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map_err(|_| ExprError::new(ExprErrorKind::SyntaxError, start, "malformed number"))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    vars: &'a [&'a str],
}

/// Parses `src` over the declared variable names. Variable `vars[i]` becomes
/// `Expr::Var(i)`; the identifier `pi` is the constant π unless declared.
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr, ExprError> {
    let mut lex = Lexer::new(src);
    let (tok, at) = lex.next()?;
    let mut p = Parser { lex, tok, at, vars };
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ExprError> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn error(&self, msg: &str) -> ExprError {
        let what = match &self.tok {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        };
        ExprError::new(ExprErrorKind::SyntaxError, self.at, format!("{msg}, found {what}"))
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            self.bump()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(self.error("expected ')'"));
                }
                self.bump()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i));
                }
                if let Some(f) = Func::from_name(&name) {
                    return self.call(f, at);
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                Err(ExprError::new(
                    ExprErrorKind::UnknownIdentifier,
                    at,
                    format!("unknown identifier '{name}'"),
                ))
            }
            _ => Err(self.error("expected a number, variable, function or '('")),
        }
    }

    fn call(&mut self, f: Func, at: usize) -> Result<Expr, ExprError> {
        if self.tok != Tok::LParen {
            return Err(self.error(&format!("expected '(' after {}", f.name())));
        }
        self.bump()?;
        if self.tok == Tok::RParen {
            return Err(ExprError::new(
                ExprErrorKind::ArityMismatch,
                at,
                format!("{} takes 1 argument, got 0", f.name()),
            ));
        }
        let arg = self.expr()?;
        let mut count = 1;
        while self.tok == Tok::Comma {
            self.bump()?;
            self.expr()?;
            count += 1;
        }
        if count != 1 {
            return Err(ExprError::new(
                ExprErrorKind::ArityMismatch,
                at,
                format!("{} takes 1 argument, got {count}", f.name()),
            ));
        }
        if self.tok != Tok::RParen {
            return Err(self.error("expected ')'"));
        }
        self.bump()?;
        Ok(Expr::call(f, arg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dangling_operator_reports_end_offset() {
        let e = parse("x1 + x2 *", &["x1", "x2"]).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::SyntaxError);
        assert_eq!(e.position, 9);
    }

    #[test]
    fn precedence_and_associativity() {
        let x = || Box::new(Expr::Var(0));
        assert_eq!(
            parse("-x^2", &["x"]).unwrap(),
            Expr::Neg(Box::new(Expr::Bin(BinOp::Pow, x(), Box::new(Expr::Num(2.0)))))
        );
        let p = parse("2^3^2", &[]).unwrap();
        let Expr::Bin(BinOp::Pow, _, rhs) = p else { panic!() };
        assert!(matches!(*rhs, Expr::Bin(BinOp::Pow, _, _)));
        let s = parse("2 - 3 - 4", &[]).unwrap();
        let Expr::Bin(BinOp::Sub, lhs, _) = s else { panic!() };
        assert!(matches!(*lhs, Expr::Bin(BinOp::Sub, _, _)));
    }

    #[test]
    fn identifiers() {
        let e = parse("y + 1", &["x"]).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::UnknownIdentifier);
        assert_eq!(e.position, 0);
        let e = parse("1 + sin(x, x)", &["x"]).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::ArityMismatch);
        assert_eq!(e.position, 4);
        let e = parse("cos()", &[]).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::ArityMismatch);
        assert_eq!(parse("pi", &[]).unwrap(), Expr::Num(std::f64::consts::PI));
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(parse("1.5e-3", &[]).unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse(".5", &[]).unwrap(), Expr::Num(0.5));
        assert!(parse("1.2.3", &[]).is_err());
        assert!(parse("3 $ 4", &[]).is_err());
        assert!(parse("(1 + 2", &[]).is_err());
    }
}
