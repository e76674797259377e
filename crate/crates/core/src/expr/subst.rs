//! Simultaneous substitution.

use alloc::collections::BTreeMap;
use alloc::string::ToString;

use super::atom::{Atom, Jet, Sym};
use super::calculus::{partial_param, partial_x};
use super::poly::Poly;
use super::{Expr, ExprError};

/// Concrete instantiation of an opaque function: `body` as an expression in
/// the formal parameter `formal`. All formal-derivative orders instantiate
/// consistently by differentiating `body`.
#[derive(Clone, Debug)]
pub struct OpaqueDef {
    pub formal: Sym,
    pub body: Expr,
}

impl OpaqueDef {
    pub fn new(formal: &str, body: Expr) -> Self {
        OpaqueDef {
            formal: formal.into(),
            body,
        }
    }
}

/// Simultaneous bindings: jet variables (including u, v), parameters, opaque
/// functions, and optionally a concrete Psi instantiation / dimension.
#[derive(Clone, Default)]
pub struct Bindings {
    pub jets: BTreeMap<Jet, Expr>,
    pub params: BTreeMap<Sym, Expr>,
    pub opaques: BTreeMap<Sym, OpaqueDef>,
    /// Attach a concrete spatial dimension to unbound Psi atoms, waking the
    /// Laplacian constraint rewrite.
    pub psi_dim: Option<u8>,
    /// Replace Psi atoms by a concrete function of x (derivatives applied).
    pub psi_body: Option<Expr>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn jet(mut self, j: Jet, e: Expr) -> Self {
        self.jets.insert(j, e);
        self
    }

    pub fn uv(self, u: Expr, v: Expr) -> Self {
        self.jet(Jet::base(0), u).jet(Jet::base(1), v)
    }

    pub fn param(mut self, name: &str, e: Expr) -> Self {
        self.params.insert(name.into(), e);
        self
    }

    pub fn opaque(mut self, name: &str, def: OpaqueDef) -> Self {
        self.opaques.insert(name.into(), def);
        self
    }

    fn binds_base(&self) -> bool {
        self.jets.contains_key(&Jet::base(0)) || self.jets.contains_key(&Jet::base(1))
    }
}

/// Public substitution: 2-jet result cap per the engine contract.
pub fn substitute(e: &Expr, b: &Bindings) -> Result<Expr, ExprError> {
    let out = substitute_capped(e, b)?;
    if out.max_jet_order() > 2 {
        return Err(ExprError::JetOrderExceeded);
    }
    Ok(out)
}

/// Substitution without the order cap (prolongation pipeline internals).
pub fn substitute_capped(e: &Expr, b: &Bindings) -> Result<Expr, ExprError> {
    let num = subst_poly(e.num_poly(), b)?;
    let den = subst_poly(e.den_poly(), b)?;
    num.checked_div(&den)
}

fn subst_poly(p: &Poly, b: &Bindings) -> Result<Expr, ExprError> {
    let mut acc = Expr::zero();
    for (m, c) in &p.terms {
        let mut term = Expr::rational(c.clone());
        for (a, k) in &m.factors {
            let e = subst_atom(a, b)?;
            term = term * e.pow_i(*k as i64);
        }
        acc = acc + term;
    }
    Ok(acc)
}

fn subst_atom(a: &Atom, b: &Bindings) -> Result<Expr, ExprError> {
    Ok(match a {
        Atom::Jet(j) => match b.jets.get(j) {
            Some(e) => e.clone(),
            None => Expr::jet(*j),
        },
        Atom::Param(s) => match b.params.get(s) {
            Some(e) => e.clone(),
            None => Expr::param(s.as_str()),
        },
        Atom::T => Expr::t(),
        Atom::X(ax) => Expr::x(*ax),
        Atom::R => {
            if b.binds_base() {
                let u = subst_atom(&Atom::Jet(Jet::base(0)), b)?;
                let v = subst_atom(&Atom::Jet(Jet::base(1)), b)?;
                (u.clone() * u + v.clone() * v).pow_rat(&super::rat(1, 2))?
            } else {
                Expr::big_r()
            }
        }
        Atom::Z => {
            if b.binds_base() {
                let u = subst_atom(&Atom::Jet(Jet::base(0)), b)?;
                let v = subst_atom(&Atom::Jet(Jet::base(1)), b)?;
                Expr::atan_of(&v.checked_div(&u)?)
            } else {
                Expr::z()
            }
        }
        Atom::Exp(g) => Expr::exp_of(&substitute_capped(g, b)?),
        Atom::Ln(g) => Expr::ln_of(&substitute_capped(g, b)?),
        Atom::Sin(g) => Expr::sin_of(&substitute_capped(g, b)?),
        Atom::Cos(g) => Expr::cos_of(&substitute_capped(g, b)?),
        Atom::Atan(g) => Expr::atan_of(&substitute_capped(g, b)?),
        Atom::Opaque { name, order, arg } => {
            let arg2 = substitute_capped(arg, b)?;
            match b.opaques.get(name) {
                None => Expr::opaque_d(name.as_str(), *order, &arg2),
                Some(def) => {
                    let mut body = def.body.clone();
                    for _ in 0..*order {
                        body = partial_param(&body, def.formal.as_str());
                    }
                    let inner = Bindings::new().param(def.formal.as_str(), arg2);
                    substitute_capped(&body, &inner)?
                }
            }
        }
        Atom::Psi { eigen, dim, dx } => {
            let eigen2 = substitute_capped(eigen, b)?;
            if let Some(body) = &b.psi_body {
                let mut out = body.clone();
                for ax in dx.axes() {
                    out = partial_x(&out, *ax)?;
                }
                out
            } else {
                let dim2 = if *dim == 0 {
                    b.psi_dim.unwrap_or(0)
                } else {
                    *dim
                };
                Expr::psi(&eigen2, dim2, *dx)
            }
        }
    })
}

/// Substitute a rational value for every parameter in the map, leaving other
/// parameters symbolic.
pub fn bind_rationals(e: &Expr, values: &BTreeMap<alloc::string::String, super::Rat>) -> Expr {
    let mut b = Bindings::new();
    for (k, v) in values {
        b = b.param(k, Expr::rational(v.clone()));
    }
    substitute_capped(e, &b).expect("rational parameter binding cannot fail")
}

/// Helper used in jet-order error reporting.
pub fn order_violation(e: &Expr) -> Option<alloc::string::String> {
    if e.max_jet_order() > 2 {
        Some("jet order exceeded".to_string())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn shift_substitution() {
        // u^2 with u -> u + omega t
        let e = parse("u^2").unwrap();
        let shifted = substitute(
            &e,
            &Bindings::new().jet(
                Jet::base(0),
                Expr::u() + Expr::param("omega") * Expr::t(),
            ),
        )
        .unwrap();
        let expected = parse("(u + omega*t)^2").unwrap();
        assert!((shifted - expected).is_zero_expr());
    }

    #[test]
    fn opaque_instantiation_is_consistent() {
        // F1 -> xi^2 must turn F1' into 2 xi everywhere
        let e = parse("F1_d1(u/v)").unwrap();
        let def = OpaqueDef::new("xi", parse("xi^2").unwrap());
        let out = substitute(&e, &Bindings::new().opaque("F1", def)).unwrap();
        let expected = parse("2*u/v").unwrap();
        assert!((out - expected).is_zero_expr());
    }

    #[test]
    fn manifold_rule_substitution() {
        // u_t -> a u_x1x1 - v_x1x1 + u
        let e = parse("u_t").unwrap();
        let rhs = parse("a*u_x1x1 - v_x1x1 + u").unwrap();
        let out = substitute(&e, &Bindings::new().jet(Jet::dt(0), rhs.clone())).unwrap();
        assert_eq!(out, rhs);
    }

    #[test]
    fn simultaneous_not_sequential() {
        // {u -> v, v -> u} swaps rather than chains
        let e = parse("u - v").unwrap();
        let out = substitute(&e, &Bindings::new().uv(Expr::v(), Expr::u())).unwrap();
        assert!((out + e).is_zero_expr());
    }

    #[test]
    fn substitution_distributes() {
        let e1 = parse("u*v + R").unwrap();
        let e2 = parse("z - u").unwrap();
        let b = Bindings::new().jet(Jet::base(0), parse("2*u").unwrap());
        let lhs = substitute(&(e1.clone() + e2.clone()), &b).unwrap();
        let rhs = substitute(&e1, &b).unwrap() + substitute(&e2, &b).unwrap();
        assert!((lhs - rhs).is_zero_expr());
    }

    #[test]
    fn cap_detects_deep_jets() {
        let e = parse("u_x1").unwrap();
        let b = Bindings::new().jet(Jet::dx(0, 0), parse("u_x1x1 + u").unwrap());
        assert!(substitute(&e, &b).is_ok());
        let b2 = Bindings::new().jet(Jet::dx(0, 0), {
            // order-3 atom smuggled through a binding
            Expr::jet(Jet {
                comp: 0,
                dt: 1,
                dx: crate::expr::SpatialIdx::pair(0, 0),
            })
        });
        assert_eq!(substitute(&e, &b2).unwrap_err(), ExprError::JetOrderExceeded);
    }
}
