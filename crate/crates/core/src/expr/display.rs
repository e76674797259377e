//! Rendering to the expression grammar. Canonical forms render to strings
//! that parse back to the same expression.

use alloc::string::String;
use core::fmt::{self, Write};

use num_traits::{One, Signed};

use super::atom::{Atom, Jet, SpatialIdx};
use super::poly::{Mono, Poly, Rat};
use super::Expr;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_is_one() {
            write_poly(f, self.num_poly())
        } else {
            f.write_char('(')?;
            write_poly(f, self.num_poly())?;
            f.write_str(")/(")?;
            write_poly(f, self.den_poly())?;
            f.write_char(')')
        }
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.is_zero() {
        return f.write_char('0');
    }
    for (i, (m, c)) in p.terms.iter().enumerate() {
        if i == 0 {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else if c.is_negative() {
            f.write_str(" - ")?;
        } else {
            f.write_str(" + ")?;
        }
        write_term(f, m, &c.abs())?;
    }
    Ok(())
}

fn write_term(f: &mut fmt::Formatter<'_>, m: &Mono, c: &Rat) -> fmt::Result {
    let mut wrote = false;
    if !c.is_one() || m.is_one() {
        write_rat(f, c)?;
        wrote = true;
    }
    for (a, k) in &m.factors {
        if wrote {
            f.write_char('*')?;
        }
        write_atom(f, a)?;
        if *k > 1 {
            write!(f, "^{}", k)?;
        }
        wrote = true;
    }
    Ok(())
}

fn write_rat(f: &mut fmt::Formatter<'_>, c: &Rat) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn jet_suffix(dt: u8, dx: &SpatialIdx) -> String {
    let mut s = String::new();
    if dt > 0 {
        s.push('t');
    }
    for ax in dx.axes() {
        let _ = write!(s, "x{}", ax + 1);
    }
    s
}

fn write_atom(f: &mut fmt::Formatter<'_>, a: &Atom) -> fmt::Result {
    match a {
        Atom::Param(s) => f.write_str(s.as_str()),
        Atom::T => f.write_char('t'),
        Atom::X(ax) => write!(f, "x{}", ax + 1),
        Atom::Jet(Jet { comp, dt, dx }) => {
            let name = if *comp == 0 { 'u' } else { 'v' };
            f.write_char(name)?;
            if *dt > 0 || dx.order() > 0 {
                write!(f, "_{}", jet_suffix(*dt, dx))?;
            }
            Ok(())
        }
        Atom::R => f.write_char('R'),
        Atom::Z => f.write_char('z'),
        Atom::Exp(g) => write!(f, "exp({})", g),
        Atom::Ln(g) => write!(f, "ln({})", g),
        Atom::Sin(g) => write!(f, "sin({})", g),
        Atom::Cos(g) => write!(f, "cos({})", g),
        Atom::Atan(g) => write!(f, "arctan({})", g),
        Atom::Opaque { name, order, arg } => {
            f.write_str(name.as_str())?;
            if *order > 0 {
                write!(f, "_d{}", order)?;
            }
            write!(f, "({})", arg)
        }
        Atom::Psi { eigen, dim, dx } => {
            f.write_str("Psi")?;
            if *dim > 0 {
                write!(f, "{}", dim)?;
            }
            if dx.order() > 0 {
                write!(f, "_{}", jet_suffix(0, dx))?;
            }
            write!(f, "({})", eigen)
        }
    }
}
