//! Exact symbolic expression engine.
//!
//! An [`Expr`] is a rational function `num/den` over [`Atom`]s with
//! `BigRational` coefficients, kept canonical at construction time:
//!
//! * rational forms are gcd-reduced, the denominator is normalized monic;
//! * `R^2` expands to `u^2 + v^2` (the polar radius appears to power <= 1);
//! * `cos^2` rewrites to `1 - sin^2`;
//! * exponentials merge per monomial (`exp(a)exp(b) -> exp(a+b)`) and
//!   integer multiples of logarithms are pulled out of exponents
//!   (`exp(ln g + s) -> g exp(s)`);
//! * Laplace eigenfunction atoms absorb the constraint `ΔΨ_κ = κΨ_κ` once a
//!   spatial dimension is attached.
//!
//! Equality of canonical forms decides zero for everything rational; the
//! numeric fallback in [`zero`] covers transcendental mixtures.

pub mod atom;
pub mod calculus;
pub mod poly;
pub mod subst;

mod display;
mod eval;
mod parse;
mod zero;

pub use atom::{Atom, Jet, SpatialIdx, Sym, MAX_JET_ORDER};
pub use calculus::TotalDir;
pub use eval::{EvalEnv, FunctionJetEnv, RandomAtomEnv};
pub use parse::{parse, parse_in, parse_with_params, ParseCtx};
pub use poly::{rat, rat_i64, Mono, Poly, Rat};
pub use subst::{Bindings, OpaqueDef};
pub use zero::{is_zero, is_zero_seeded, Verdict, Witness, ZERO_TOL};

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

/// Errors surfaced by the expression engine.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprError {
    /// A total derivative would push a jet variable beyond the supported
    /// order (the public engine is a 2-jet engine).
    JetOrderExceeded,
    DivisionByZero,
    Syntax { pos: usize, msg: String },
    UnknownSymbol { pos: usize, name: String },
    /// Numeric evaluation left the admissible domain (ln of a non-positive
    /// sample, vanishing denominator) and resampling ran out of retries.
    EvalDomain { what: String },
    /// An expression violated a structural precondition (affinity in u, v,
    /// missing dimension on a Psi atom, ...).
    Structure { what: String },
}

impl core::fmt::Display for ExprError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExprError::JetOrderExceeded => write!(f, "jet order exceeded"),
            ExprError::DivisionByZero => write!(f, "division by zero"),
            ExprError::Syntax { pos, msg } => write!(f, "syntax error at {}: {}", pos, msg),
            ExprError::UnknownSymbol { pos, name } => {
                write!(f, "unknown symbol `{}` at {}", name, pos)
            }
            ExprError::EvalDomain { what } => write!(f, "evaluation domain error: {}", what),
            ExprError::Structure { what } => write!(f, "structural error: {}", what),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExprError {}

#[derive(PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub(crate) struct ExprData {
    pub num: Poly,
    pub den: Poly,
}

/// Immutable canonical expression. Cheap to clone (shared body).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<ExprData>);

impl Expr {
    // --- construction --------------------------------------------------

    pub fn zero() -> Expr {
        Expr::raw(Poly::zero(), Poly::one())
    }

    pub fn one() -> Expr {
        Expr::raw(Poly::one(), Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(rat_i64(n))
    }

    pub fn rational(c: Rat) -> Expr {
        Expr::raw(Poly::constant(c), Poly::one())
    }

    pub fn param(name: &str) -> Expr {
        Expr::raw(Poly::atom(Atom::Param(name.into())), Poly::one())
    }

    pub fn t() -> Expr {
        Expr::raw(Poly::atom(Atom::T), Poly::one())
    }

    pub fn x(axis: u8) -> Expr {
        Expr::raw(Poly::atom(Atom::X(axis)), Poly::one())
    }

    pub fn u() -> Expr {
        Expr::jet(Jet::base(0))
    }

    pub fn v() -> Expr {
        Expr::jet(Jet::base(1))
    }

    pub fn jet(j: Jet) -> Expr {
        Expr::raw(Poly::atom(Atom::Jet(j)), Poly::one())
    }

    pub fn big_r() -> Expr {
        Expr::raw(Poly::atom(Atom::R), Poly::one())
    }

    pub fn z() -> Expr {
        Expr::raw(Poly::atom(Atom::Z), Poly::one())
    }

    /// `u^2 + v^2`, the square of the polar radius.
    pub fn r_squared() -> Expr {
        Expr::u() * Expr::u() + Expr::v() * Expr::v()
    }

    pub fn exp_of(arg: &Expr) -> Expr {
        if arg.is_zero_expr() {
            return Expr::one();
        }
        // pull integer multiples of plain logarithms out of the exponent
        if arg.den_is_one() {
            let mut factor: Option<Expr> = None;
            let mut rest = Poly::zero();
            for (m, c) in &arg.0.num.terms {
                let mut handled = false;
                if m.factors.len() == 1 {
                    if let Some((Atom::Ln(g), 1)) = m.factors.iter().next().map(|(a, e)| (a, *e)) {
                        let n = c.trunc();
                        if !n.is_zero() {
                            let ni: i64 = int_to_i64(&n);
                            let f = g.pow_i(ni);
                            factor = Some(match factor {
                                None => f,
                                Some(acc) => acc * f,
                            });
                            let leftover = c.clone() - n;
                            if !leftover.is_zero() {
                                rest.add_term(m.clone(), leftover);
                            }
                            handled = true;
                        }
                    }
                }
                if !handled {
                    rest.add_term(m.clone(), c.clone());
                }
            }
            if let Some(f) = factor {
                let rest_expr = Expr::raw(rest, Poly::one());
                return f * Expr::exp_of(&rest_expr);
            }
        }
        Expr::raw(Poly::atom(Atom::Exp(arg.clone())), Poly::one())
    }

    pub fn ln_of(arg: &Expr) -> Expr {
        if arg.is_one_expr() {
            return Expr::zero();
        }
        // ln(u^2+v^2) = 2 ln R keeps the polar radius canonical
        if *arg == Expr::r_squared() {
            return Expr::int(2) * Expr::raw(Poly::atom(Atom::Ln(Expr::big_r())), Poly::one());
        }
        // split logarithms of positive single-monomial products
        if arg.den_is_one() && arg.0.num.terms.len() == 1 {
            let (m, c) = arg.0.num.terms.iter().next().unwrap();
            if c.is_positive() && m.factors.keys().all(|a| a.certified_positive()) {
                let mut acc = if c.is_one() {
                    Expr::zero()
                } else {
                    Expr::raw(Poly::atom(Atom::Ln(Expr::rational(c.clone()))), Poly::one())
                };
                for (a, k) in &m.factors {
                    let piece = match a {
                        Atom::Exp(g) => g.clone(),
                        other => {
                            Expr::raw(Poly::atom(Atom::Ln(Expr::atom_expr(other))), Poly::one())
                        }
                    };
                    acc = acc + Expr::int(*k as i64) * piece;
                }
                if !(m.factors.is_empty() && c.is_one()) {
                    return acc;
                }
            }
        }
        Expr::raw(Poly::atom(Atom::Ln(arg.clone())), Poly::one())
    }

    pub fn sin_of(arg: &Expr) -> Expr {
        if arg.is_zero_expr() {
            return Expr::zero();
        }
        let (neg, a) = arg.sign_split();
        let atom = Expr::raw(Poly::atom(Atom::Sin(a)), Poly::one());
        if neg {
            -atom
        } else {
            atom
        }
    }

    pub fn cos_of(arg: &Expr) -> Expr {
        if arg.is_zero_expr() {
            return Expr::one();
        }
        let (_, a) = arg.sign_split();
        Expr::raw(Poly::atom(Atom::Cos(a)), Poly::one())
    }

    pub fn atan_of(arg: &Expr) -> Expr {
        if arg.is_zero_expr() {
            return Expr::zero();
        }
        let (neg, a) = arg.sign_split();
        let atom = Expr::raw(Poly::atom(Atom::Atan(a)), Poly::one());
        if neg {
            -atom
        } else {
            atom
        }
    }

    pub fn opaque(name: &str, arg: &Expr) -> Expr {
        Expr::opaque_d(name, 0, arg)
    }

    pub fn opaque_d(name: &str, order: u8, arg: &Expr) -> Expr {
        Expr::raw(
            Poly::atom(Atom::Opaque {
                name: name.into(),
                order,
                arg: arg.clone(),
            }),
            Poly::one(),
        )
    }

    /// Laplace eigenfunction atom; `dim = 0` leaves the dimension unbound so
    /// the constraint rewrite stays dormant until instantiation.
    pub fn psi(eigen: &Expr, dim: u8, dx: SpatialIdx) -> Expr {
        if dim > 0 {
            let top = (dim - 1) as u8;
            if dx.count_axis(top) >= 2 {
                let rest = dx.remove_pair(top);
                let mut acc = eigen.clone() * Expr::psi(eigen, dim, rest);
                for axis in 0..top {
                    let mut bumped = rest;
                    bumped = bumped.push(axis).expect("within order cap");
                    bumped = bumped.push(axis).expect("within order cap");
                    acc = acc - Expr::psi(eigen, dim, bumped);
                }
                return acc;
            }
        }
        Expr::raw(
            Poly::atom(Atom::Psi {
                eigen: eigen.clone(),
                dim,
                dx,
            }),
            Poly::one(),
        )
    }

    fn atom_expr(a: &Atom) -> Expr {
        Expr::raw(Poly::atom(a.clone()), Poly::one())
    }

    // --- canonical assembly --------------------------------------------

    /// Build from raw parts, normalizing. Panics on an identically zero
    /// denominator (callers must check; the parser and `checked_div` do).
    pub(crate) fn raw(num: Poly, den: Poly) -> Expr {
        assert!(!den.is_zero(), "zero denominator in expression assembly");
        if has_rewritable(&num) || has_rewritable(&den) {
            let en = poly_to_expr(&num);
            let ed = poly_to_expr(&den);
            // ed cannot be structurally zero: rewrites preserve value and
            // den was a nonzero polynomial over independent atoms
            return en
                .checked_div(&ed)
                .expect("rewritten denominator stays nonzero");
        }
        Expr::reduce(num, den)
    }

    fn reduce(num: Poly, den: Poly) -> Expr {
        if num.is_zero() {
            return Expr(Arc::new(ExprData {
                num: Poly::zero(),
                den: Poly::one(),
            }));
        }
        let (num, den) = if den.is_one() {
            (num, den)
        } else {
            let g = poly::poly_gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides num"),
                    den.div_exact(&g).expect("gcd divides den"),
                )
            }
        };
        // monic denominator
        let (lc, den) = den.monic();
        let num = num.scale(&(Rat::one() / lc));
        Expr(Arc::new(ExprData { num, den }))
    }

    // --- predicates and accessors --------------------------------------

    pub fn is_zero_expr(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one_expr(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn den_is_one(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if !self.den_is_one() {
            return None;
        }
        self.0.num.as_constant()
    }

    pub(crate) fn num_poly(&self) -> &Poly {
        &self.0.num
    }

    pub(crate) fn den_poly(&self) -> &Poly {
        &self.0.den
    }

    /// Visit every atom, recursing into argument expressions.
    pub fn visit_atoms<F: FnMut(&Atom)>(&self, f: &mut F) {
        for p in [&self.0.num, &self.0.den] {
            for m in p.terms.keys() {
                for a in m.factors.keys() {
                    f(a);
                    for sub in a.args() {
                        sub.visit_atoms(f);
                    }
                }
            }
        }
    }

    pub fn any_atom<F: Fn(&Atom) -> bool + Copy>(&self, pred: F) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| {
            if pred(a) {
                found = true;
            }
        });
        found
    }

    pub fn contains_time(&self) -> bool {
        self.any_atom(|a| matches!(a, Atom::T))
    }

    pub fn contains_space(&self) -> bool {
        self.any_atom(|a| matches!(a, Atom::X(_) | Atom::Psi { .. }))
    }

    pub fn contains_jet(&self) -> bool {
        self.any_atom(|a| matches!(a, Atom::Jet(_) | Atom::R | Atom::Z))
    }

    /// Jets of order >= `k` anywhere?
    pub fn contains_jet_order_ge(&self, k: usize) -> bool {
        self.any_atom(|a| matches!(a, Atom::Jet(j) if j.order() >= k))
    }

    pub fn contains_param(&self, name: &str) -> bool {
        self.any_atom(|a| matches!(a, Atom::Param(s) if s.as_str() == name))
    }

    pub fn max_jet_order(&self) -> usize {
        let mut max = 0;
        self.visit_atoms(&mut |a| {
            if let Atom::Jet(j) = a {
                max = max.max(j.order());
            }
        });
        max
    }

    /// Idempotent re-normalization entry point. Construction keeps values
    /// canonical already, so this is the identity; it exists as the public
    /// name for the canonicalization pass.
    pub fn simplify(&self) -> Expr {
        Expr::raw(self.0.num.clone(), self.0.den.clone())
    }

    // --- arithmetic ------------------------------------------------------

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        if rhs.is_zero_expr() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Expr::raw(
            self.0.num.mul(&rhs.0.den),
            self.0.den.mul(&rhs.0.num),
        ))
    }

    pub fn recip(&self) -> Result<Expr, ExprError> {
        Expr::one().checked_div(self)
    }

    pub fn pow_i(&self, n: i64) -> Expr {
        match n {
            0 => Expr::one(),
            n if n > 0 => Expr::raw(self.0.num.pow(n as u32), self.0.den.pow(n as u32)),
            n => {
                assert!(!self.is_zero_expr(), "negative power of zero");
                Expr::raw(self.0.den.pow((-n) as u32), self.0.num.pow((-n) as u32))
            }
        }
    }

    /// Power with rational exponent: integer exponents stay rational,
    /// fractional ones go through `exp(q ln base)`.
    pub fn pow_rat(&self, q: &Rat) -> Result<Expr, ExprError> {
        if q.is_integer() {
            let n = int_to_i64(&q.trunc());
            if n < 0 && self.is_zero_expr() {
                return Err(ExprError::DivisionByZero);
            }
            return Ok(self.pow_i(n));
        }
        if self.is_zero_expr() {
            return Ok(Expr::zero());
        }
        Ok(Expr::exp_of(
            &(Expr::rational(q.clone()) * Expr::ln_of(self)),
        ))
    }

    /// General power: rational exponents specialize, symbolic exponents go
    /// through the exponential.
    pub fn pow_expr(&self, e: &Expr) -> Result<Expr, ExprError> {
        if let Some(q) = e.as_rational() {
            return self.pow_rat(&q);
        }
        if self.is_zero_expr() {
            return Ok(Expr::zero());
        }
        Ok(Expr::exp_of(&(e.clone() * Expr::ln_of(self))))
    }

    /// Split a sign off so the leading coefficient is positive:
    /// returns (was_negated, normalized).
    fn sign_split(&self) -> (bool, Expr) {
        let lead = self
            .0
            .num
            .leading()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        if lead {
            (true, -self.clone())
        } else {
            (false, self.clone())
        }
    }
}

pub(crate) fn int_to_i64(r: &Rat) -> i64 {
    use num_traits::ToPrimitive;
    r.to_integer().to_i64().expect("exponent fits in i64")
}

// --- rewrite scan and expansion ---------------------------------------------

fn has_rewritable(p: &Poly) -> bool {
    for m in p.terms.keys() {
        let mut exps = 0;
        for (a, k) in &m.factors {
            match a {
                Atom::Exp(_) => {
                    exps += 1;
                    if *k >= 2 || exps >= 2 {
                        return true;
                    }
                }
                Atom::R if *k >= 2 => return true,
                Atom::Cos(_) if *k >= 2 => return true,
                Atom::Psi { dim, dx, .. } if *dim > 0 && dx.count_axis(*dim - 1) >= 2 => {
                    return true
                }
                _ => {}
            }
        }
    }
    false
}

/// Expand one polynomial into a canonical expression, applying the monomial
/// rewrites. Used only on the slow path.
fn poly_to_expr(p: &Poly) -> Expr {
    let mut acc = Expr::zero();
    for (m, c) in &p.terms {
        let mut term = Expr::rational(c.clone());
        let mut exp_arg = Expr::zero();
        for (a, k) in &m.factors {
            let k = *k;
            match a {
                Atom::Exp(g) => {
                    exp_arg = exp_arg + Expr::int(k as i64) * g.clone();
                }
                Atom::R => {
                    let half = k / 2;
                    if half > 0 {
                        term = term * Expr::r_squared().pow_i(half as i64);
                    }
                    if k % 2 == 1 {
                        term = term * Expr::big_r();
                    }
                }
                Atom::Cos(g) if k >= 2 => {
                    let s = Expr::sin_of(g);
                    let c2 = Expr::one() - s.clone() * s;
                    term = term * c2.pow_i((k / 2) as i64);
                    if k % 2 == 1 {
                        term = term * Expr::cos_of(g);
                    }
                }
                Atom::Psi { eigen, dim, dx } => {
                    term = term * Expr::psi(eigen, *dim, *dx).pow_i(k as i64);
                }
                other => {
                    term = term * Expr::atom_expr(other).pow_i(k as i64);
                }
            }
        }
        if !exp_arg.is_zero_expr() {
            term = term * Expr::exp_of(&exp_arg);
        }
        acc = acc + term;
    }
    acc
}

// --- operator impls ----------------------------------------------------------

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        &self + &rhs
    }
}

impl core::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero_expr() {
            return rhs.clone();
        }
        if rhs.is_zero_expr() {
            return self.clone();
        }
        if self.0.den == rhs.0.den {
            return Expr::raw(self.0.num.add(&rhs.0.num), self.0.den.clone());
        }
        let num = self
            .0
            .num
            .mul(&rhs.0.den)
            .add(&rhs.0.num.mul(&self.0.den));
        Expr::raw(num, self.0.den.mul(&rhs.0.den))
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self + &(-rhs)
    }
}

impl core::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs.clone())
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl core::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero_expr() || rhs.is_zero_expr() {
            return Expr::zero();
        }
        Expr::raw(self.0.num.mul(&rhs.0.num), self.0.den.mul(&rhs.0.den))
    }
}

/// Division panics on a zero divisor; use [`Expr::checked_div`] where the
/// divisor is not known to be nonzero.
impl core::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        self.checked_div(&rhs).expect("division by zero expression")
    }
}

impl core::ops::Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

macro_rules! mixed_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl core::ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                core::ops::$trait::$method(&self, rhs)
            }
        }
        impl core::ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                core::ops::$trait::$method(self, &rhs)
            }
        }
    )*};
}
mixed_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::raw(self.0.num.neg(), self.0.den.clone())
    }
}

impl core::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.clone().neg()
    }
}

impl core::fmt::Debug for Expr {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self)
    }
}

/// Affine decomposition in (u, v): `e = c0 + c1 u + c2 v` with coefficients
/// free of u, v, R, z. Errors when e is not of that shape.
pub fn affine_in_uv(e: &Expr) -> Result<(Expr, [Expr; 2]), ExprError> {
    let cu = calculus::partial_jet(e, &Jet::base(0));
    let cv = calculus::partial_jet(e, &Jet::base(1));
    let rest = e - &(&cu * &Expr::u()) - (&cv * &Expr::v());
    for (what, c) in [("du", &cu), ("dv", &cv), ("const", &rest)] {
        if c.contains_jet() {
            return Err(ExprError::Structure {
                what: alloc::format!("coefficient of {} still depends on u, v", what).to_owned(),
            });
        }
    }
    Ok((rest, [cu, cv]))
}

/// Expressions as exact coordinate vectors over (monomial, component) keys:
/// used for rational linear algebra (closure checking). Only valid for
/// polynomial expressions (denominator 1 after clearing).
pub fn poly_coords(e: &Expr) -> Vec<(Mono, Rat)> {
    // clear the denominator: coordinates of num are taken relative to den;
    // callers compare expressions with identical denominators (catalog
    // generators have constant denominators after normalization).
    let den_c = e
        .den_poly()
        .as_constant()
        .expect("poly_coords on non-polynomial expression");
    e.num_poly()
        .terms
        .iter()
        .map(|(m, c)| (m.clone(), c.clone() / den_c.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutativity_cancels() {
        let e = Expr::u() * Expr::v() - Expr::v() * Expr::u();
        assert!(e.is_zero_expr());
    }

    #[test]
    fn binomial_identity_proves_zero() {
        let u = Expr::u();
        let v = Expr::v();
        let e = (&u + &v).pow_i(2)
            - u.clone() * u.clone()
            - Expr::int(2) * u.clone() * v.clone()
            - v.clone() * v.clone();
        assert!(e.is_zero_expr());
    }

    #[test]
    fn r_squared_expands() {
        let e = Expr::big_r() * Expr::big_r() - Expr::r_squared();
        assert!(e.is_zero_expr());
    }

    #[test]
    fn pythagorean_rewrite() {
        let z = Expr::z();
        let s = Expr::sin_of(&z);
        let c = Expr::cos_of(&z);
        let e = &s * &s + &c * &c - Expr::one();
        assert!(e.is_zero_expr());
    }

    #[test]
    fn exponentials_merge() {
        let a = Expr::param("a");
        let b = Expr::param("b");
        let e = Expr::exp_of(&a) * Expr::exp_of(&b) - Expr::exp_of(&(a.clone() + b.clone()));
        assert!(e.is_zero_expr());
        let inv = Expr::exp_of(&a) * Expr::exp_of(&-a.clone()) - Expr::one();
        assert!(inv.is_zero_expr());
    }

    #[test]
    fn ln_exp_collapse() {
        let a = Expr::param("a");
        let e = Expr::ln_of(&Expr::exp_of(&a)) - a.clone();
        assert!(e.is_zero_expr());
    }

    #[test]
    fn symbolic_power_splits_integer_part() {
        // u^(nu+1) == u * u^nu
        let nu = Expr::param("nu");
        let u = Expr::u();
        let lhs = u.pow_expr(&(nu.clone() + Expr::one())).unwrap();
        let rhs = u.clone() * u.pow_expr(&nu).unwrap();
        assert!((lhs - rhs).is_zero_expr());
    }

    #[test]
    fn sqrt_squares_back() {
        let r2 = Expr::r_squared();
        let root = r2.pow_rat(&rat(1, 2)).unwrap();
        assert_eq!(root, Expr::big_r());
        let back = root.clone() * root - r2;
        assert!(back.is_zero_expr());
    }

    #[test]
    fn rational_reduction_cancels_common_factor() {
        let u = Expr::u();
        let v = Expr::v();
        let num = &u * &v;
        let e = num.checked_div(&u).unwrap();
        assert_eq!(e, v);
    }

    #[test]
    fn cross_denominator_zero_test() {
        // exp(a-b) - exp(a)/exp(b) == 0 via cross multiplication
        let a = Expr::param("a");
        let b = Expr::param("b");
        let lhs = Expr::exp_of(&(&a - &b));
        let rhs = Expr::exp_of(&a).checked_div(&Expr::exp_of(&b)).unwrap();
        assert!((lhs - rhs).is_zero_expr());
    }

    #[test]
    fn psi_laplacian_rewrites_once_dim_is_bound() {
        // dim 2: Psi_x2x2 -> eigen*Psi - Psi_x1x1
        let kappa = Expr::param("kappa");
        let dxx2 = SpatialIdx::pair(1, 1);
        let e = Expr::psi(&kappa, 2, dxx2);
        let expected = kappa.clone() * Expr::psi(&kappa, 2, SpatialIdx::empty())
            - Expr::psi(&kappa, 2, SpatialIdx::pair(0, 0));
        assert!((e - expected).is_zero_expr());
        // unbound dimension stays dormant
        let dormant = Expr::psi(&kappa, 0, SpatialIdx::pair(1, 1));
        assert!(!dormant.is_zero_expr());
    }

    #[test]
    fn simplify_is_idempotent() {
        let e = (Expr::u() + Expr::v()).pow_i(3) / (Expr::u() - Expr::v());
        assert_eq!(e.simplify(), e);
        assert_eq!(e.simplify().simplify(), e.simplify());
    }
}
