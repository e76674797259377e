//! Recursive-descent parser for the expression grammar.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := '-' factor | power
//! power   := primary ('^' factor)?
//! primary := integer | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `[a-zA-Z][a-zA-Z0-9_]*`. Reserved: `t`, `x1..x3`, `u`,
//! `v`, `R`, `z`, function names `exp ln sin cos arctan`, opaque names `F1
//! F2 Psi`, and jet suffix forms `u_t`, `v_x1x2`, ... Rational constants are
//! written `p/q` (division of integers). Anything else must be a declared
//! parameter name.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::atom::{Jet, SpatialIdx, MAX_JET_ORDER};
use super::{Expr, ExprError};

/// Default parameter names admitted by [`parse`].
pub const DEFAULT_PARAMS: &[&str] = &[
    "a", "lambda", "mu", "nu", "sigma", "kappa", "beta", "epsilon", "gamma", "omega", "omega0",
    "omegap", "omegam", "alpha", "m", "rho", "delta", "theta", "xi", "c1", "c2",
];

/// Parsing context: admissible parameter names, an optional concrete spatial
/// dimension (resolves `m` and `xsq`), and extra identifier bindings used by
/// the generator grammar.
#[derive(Clone, Default)]
pub struct ParseCtx {
    pub params: Vec<String>,
    pub m: Option<u8>,
    pub extra: BTreeMap<String, Expr>,
}

impl ParseCtx {
    pub fn standard() -> Self {
        ParseCtx {
            params: DEFAULT_PARAMS.iter().map(|s| s.to_string()).collect(),
            m: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_m(mut self, m: u8) -> Self {
        self.m = Some(m);
        self
    }
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    parse_in(text, &ParseCtx::standard())
}

pub fn parse_with_params(text: &str, params: &[&str]) -> Result<Expr, ExprError> {
    let ctx = ParseCtx {
        params: params.iter().map(|s| s.to_string()).collect(),
        m: None,
        extra: BTreeMap::new(),
    };
    parse_in(text, &ctx)
}

pub fn parse_in(text: &str, ctx: &ParseCtx) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ExprError::Syntax {
            pos: p.pos,
            msg: "trailing input".to_string(),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a ParseCtx,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ExprError::Syntax {
                pos: self.pos,
                msg: format!("expected `{}`", c as char),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs).map_err(|_| ExprError::Syntax {
                        pos: at,
                        msg: "division by zero".to_string(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            let at = self.pos;
            self.pos += 1;
            let e = self.factor()?;
            return base.pow_expr(&e).map_err(|err| match err {
                ExprError::DivisionByZero => ExprError::Syntax {
                    pos: at,
                    msg: "negative power of zero".to_string(),
                },
                other => other,
            });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.integer(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(ExprError::Syntax {
                pos: self.pos,
                msg: format!("unexpected `{}`", c as char),
            }),
            None => Err(ExprError::Syntax {
                pos: self.pos,
                msg: "unexpected end of input".to_string(),
            }),
        }
    }

    fn integer(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: BigInt = text.parse().map_err(|_| ExprError::Syntax {
            pos: start,
            msg: "bad integer".to_string(),
        })?;
        Ok(Expr::rational(BigRational::from_integer(n)))
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        self.skip_ws();
        let begin = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[begin..self.pos])
            .unwrap()
            .to_string();
        self.resolve(&name, start)
    }

    fn paren_arg(&mut self, start: usize, who: &str) -> Result<Expr, ExprError> {
        if self.peek() != Some(b'(') {
            return Err(ExprError::Syntax {
                pos: start,
                msg: format!("`{}` requires an argument", who),
            });
        }
        self.pos += 1;
        let e = self.expr()?;
        self.expect(b')')?;
        Ok(e)
    }

    fn resolve(&mut self, name: &str, start: usize) -> Result<Expr, ExprError> {
        // extra bindings (generator basis symbols) take precedence
        if let Some(e) = self.ctx.extra.get(name) {
            return Ok(e.clone());
        }
        match name {
            "t" => return Ok(Expr::t()),
            "x1" => return Ok(Expr::x(0)),
            "x2" => return Ok(Expr::x(1)),
            "x3" => return Ok(Expr::x(2)),
            "u" => return Ok(Expr::u()),
            "v" => return Ok(Expr::v()),
            "R" => return Ok(Expr::big_r()),
            "z" => return Ok(Expr::z()),
            "xsq" => {
                let m = self.ctx.m.ok_or_else(|| ExprError::Syntax {
                    pos: start,
                    msg: "`xsq` needs a concrete spatial dimension".to_string(),
                })?;
                let mut acc = Expr::zero();
                for ax in 0..m {
                    acc = acc + Expr::x(ax) * Expr::x(ax);
                }
                return Ok(acc);
            }
            "exp" | "ln" | "sin" | "cos" | "arctan" => {
                let arg = self.paren_arg(start, name)?;
                return Ok(match name {
                    "exp" => Expr::exp_of(&arg),
                    "ln" => Expr::ln_of(&arg),
                    "sin" => Expr::sin_of(&arg),
                    "cos" => Expr::cos_of(&arg),
                    _ => Expr::atan_of(&arg),
                });
            }
            "m" => {
                if let Some(m) = self.ctx.m {
                    return Ok(Expr::int(m as i64));
                }
                // fall through to the parameter table
            }
            _ => {}
        }
        // jet variables: u_t, v_x1x2, u_tx1, ...
        if let Some(rest) = name
            .strip_prefix("u_")
            .map(|r| (0u8, r))
            .or_else(|| name.strip_prefix("v_").map(|r| (1u8, r)))
        {
            let (comp, suffix) = rest;
            if let Some(jet) = parse_jet_suffix(comp, suffix) {
                return Ok(Expr::jet(jet));
            }
            return Err(ExprError::UnknownSymbol {
                pos: start,
                name: name.to_string(),
            });
        }
        // opaque functions F1, F2 with optional derivative order
        if let Some((fname, order)) = parse_opaque_name(name) {
            let arg = self.paren_arg(start, name)?;
            return Ok(Expr::opaque_d(fname, order, &arg));
        }
        // Psi with optional dimension and derivative suffix
        if let Some((dim, dx)) = parse_psi_name(name) {
            let eigen = self.paren_arg(start, name)?;
            return Ok(Expr::psi(&eigen, dim, dx));
        }
        if self.ctx.params.iter().any(|p| p == name) {
            return Ok(Expr::param(name));
        }
        Err(ExprError::UnknownSymbol {
            pos: start,
            name: name.to_string(),
        })
    }
}

fn parse_jet_suffix(comp: u8, suffix: &str) -> Option<Jet> {
    let mut dt = 0u8;
    let mut dx = SpatialIdx::empty();
    let mut chars = suffix.as_bytes();
    if chars.first() == Some(&b't') {
        dt = 1;
        chars = &chars[1..];
    }
    let mut i = 0;
    let mut order = dt as usize;
    while i < chars.len() {
        if chars[i] != b'x' || i + 1 >= chars.len() {
            return None;
        }
        let d = chars[i + 1];
        if !(b'1'..=b'3').contains(&d) {
            return None;
        }
        order += 1;
        if order > MAX_JET_ORDER {
            return None;
        }
        dx = dx.push(d - b'1')?;
        i += 2;
    }
    if suffix.is_empty() {
        return None;
    }
    Some(Jet { comp, dt, dx })
}

fn parse_opaque_name(name: &str) -> Option<(&str, u8)> {
    for f in ["F1", "F2"] {
        if name == f {
            return Some((f, 0));
        }
        if let Some(rest) = name.strip_prefix(f) {
            if let Some(ord) = rest.strip_prefix("_d") {
                if let Ok(k) = ord.parse::<u8>() {
                    return Some((f, k));
                }
            }
        }
    }
    None
}

fn parse_psi_name(name: &str) -> Option<(u8, SpatialIdx)> {
    let rest = name.strip_prefix("Psi")?;
    let (dim, rest) = match rest.as_bytes().first() {
        Some(d @ b'1'..=b'3') => ((d - b'0'), &rest[1..]),
        _ => (0u8, rest),
    };
    if rest.is_empty() {
        return Some((dim, SpatialIdx::empty()));
    }
    let rest = rest.strip_prefix('_')?;
    let mut dx = SpatialIdx::empty();
    let bytes = rest.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'x' || i + 1 >= bytes.len() {
            return None;
        }
        let d = bytes[i + 1];
        if !(b'1'..=b'3').contains(&d) {
            return None;
        }
        dx = dx.push(d - b'1')?;
        i += 2;
    }
    Some((dim, dx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn roundtrip(s: &str) {
        let e = parse(s).unwrap();
        let rendered = e.to_string();
        let e2 = parse(&rendered).unwrap_or_else(|err| {
            panic!("rendered `{}` failed to parse: {:?}", rendered, err)
        });
        assert_eq!(e, e2, "roundtrip mismatch for `{}` -> `{}`", s, rendered);
    }

    #[test]
    fn grammar_smoke() {
        let e = parse("u^2 + v^2").unwrap();
        assert_eq!(e, Expr::r_squared());
    }

    #[test]
    fn table_template_parses() {
        let e = parse("exp(nu*z)*R^sigma*(lambda*u - mu*v)").unwrap();
        assert!(!e.is_zero_expr());
        // R^sigma with symbolic sigma goes through exp(sigma ln R)
        assert!(e.any_atom(|a| matches!(a, super::super::Atom::Ln(_))));
    }

    #[test]
    fn opaque_with_argument() {
        let e = parse("F1(R*exp(mu*z))").unwrap();
        let arg = Expr::big_r() * Expr::exp_of(&(Expr::param("mu") * Expr::z()));
        assert_eq!(e, Expr::opaque("F1", &arg));
    }

    #[test]
    fn rationals_and_precedence() {
        let e = parse("3/2*u - 1/2").unwrap();
        let expected = Expr::rational(super::super::rat(3, 2)) * Expr::u()
            - Expr::rational(super::super::rat(1, 2));
        assert_eq!(e, expected);
    }

    #[test]
    fn unknown_symbol_reports_position() {
        match parse("u + qq") {
            Err(ExprError::UnknownSymbol { name, .. }) => assert_eq!(name, "qq"),
            other => panic!("expected unknown symbol, got {:?}", other),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        match parse("u + ") {
            Err(ExprError::Syntax { pos, .. }) => assert!(pos >= 3),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn jet_identifiers() {
        let e = parse("u_tx1 + v_x1x2").unwrap();
        let expected = Expr::jet(Jet {
            comp: 0,
            dt: 1,
            dx: SpatialIdx::single(0),
        }) + Expr::jet(Jet::dxx(1, 0, 1));
        assert_eq!(e, expected);
    }

    #[test]
    fn roundtrips() {
        for s in [
            "u^2 + v^2",
            "exp(nu*z)*R^sigma*(lambda*u - mu*v)",
            "F1(R*exp(mu*z))",
            "u*(F1(v/u) + epsilon*ln(u))",
            "kappa*exp(v)",
            "(mu*u - sigma*v)*ln(R) + z*(lambda*u - nu*v)",
            "Psi(kappa)",
            "1/2*u_x1x1 - 3*v_t",
            "arctan(v/u)",
        ] {
            roundtrip(s);
        }
    }

    #[test]
    fn xsq_needs_dimension() {
        assert!(parse("xsq").is_err());
        let ctx = ParseCtx::standard().with_m(2);
        let e = parse_in("xsq", &ctx).unwrap();
        assert_eq!(e, Expr::x(0) * Expr::x(0) + Expr::x(1) * Expr::x(1));
    }
}
