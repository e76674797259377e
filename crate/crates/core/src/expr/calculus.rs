//! Derivatives: partials with respect to jet coordinates / parameters /
//! explicit (t, x), and total derivatives on jet space.

use alloc::format;
use alloc::vec::Vec;

use super::atom::{Atom, Jet};
use super::poly::Poly;
use super::{Expr, ExprError};

/// Direction of a total derivative.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TotalDir {
    T,
    X(u8),
}

/// Differentiate an expression given a rule for the base atoms. Atoms not
/// claimed by `base` (returning `None`) fall through to the generic chain
/// rule for function kernels and to zero for leaves.
fn derive<F>(e: &Expr, base: &F) -> Result<Expr, ExprError>
where
    F: Fn(&Atom) -> Option<Result<Expr, ExprError>>,
{
    let dn = derive_poly(e.num_poly(), base)?;
    if e.den_is_one() {
        return Ok(dn);
    }
    let dd = derive_poly(e.den_poly(), base)?;
    let den_expr = Expr::raw(e.den_poly().clone(), Poly::one());
    let num_expr = Expr::raw(e.num_poly().clone(), Poly::one());
    // (n/d)' = (n' d - n d') / d^2
    let num = &dn * &den_expr - &num_expr * &dd;
    num.checked_div(&(&den_expr * &den_expr))
}

fn derive_atom<F>(a: &Atom, base: &F) -> Result<Expr, ExprError>
where
    F: Fn(&Atom) -> Option<Result<Expr, ExprError>>,
{
    if let Some(r) = base(a) {
        return r;
    }
    Ok(match a {
        Atom::Exp(g) => {
            let dg = derive(g, base)?;
            if dg.is_zero_expr() {
                Expr::zero()
            } else {
                Expr::exp_of(g) * dg
            }
        }
        Atom::Ln(g) => {
            let dg = derive(g, base)?;
            if dg.is_zero_expr() {
                Expr::zero()
            } else {
                dg.checked_div(g)?
            }
        }
        Atom::Sin(g) => {
            let dg = derive(g, base)?;
            if dg.is_zero_expr() {
                Expr::zero()
            } else {
                Expr::cos_of(g) * dg
            }
        }
        Atom::Cos(g) => {
            let dg = derive(g, base)?;
            if dg.is_zero_expr() {
                Expr::zero()
            } else {
                -(Expr::sin_of(g) * dg)
            }
        }
        Atom::Atan(g) => {
            let dg = derive(g, base)?;
            if dg.is_zero_expr() {
                Expr::zero()
            } else {
                dg.checked_div(&(Expr::one() + g.clone() * g.clone()))?
            }
        }
        Atom::Opaque { name, order, arg } => {
            let dg = derive(arg, base)?;
            if dg.is_zero_expr() {
                Expr::zero()
            } else {
                let next = order.checked_add(1).ok_or_else(|| ExprError::Structure {
                    what: alloc::format!(
                        "formal derivative order overflow on {}",
                        name.as_str()
                    ),
                })?;
                Expr::opaque_d(name.as_str(), next, arg) * dg
            }
        }
        // the eigenvalue slot of a Psi atom is a rigid label, not a function
        // argument; spatial behaviour is handled by the base rules
        _ => Expr::zero(),
    })
}

fn derive_poly<F>(p: &Poly, base: &F) -> Result<Expr, ExprError>
where
    F: Fn(&Atom) -> Option<Result<Expr, ExprError>>,
{
    let mut acc = Expr::zero();
    for (m, c) in &p.terms {
        for (a, k) in &m.factors {
            let da = derive_atom(a, base)?;
            if da.is_zero_expr() {
                continue;
            }
            // c * k * a^(k-1) * da * (other factors)
            let mut term = Expr::rational(c.clone()) * Expr::int(*k as i64) * da;
            for (b, kb) in &m.factors {
                let pow = if b == a { *kb - 1 } else { *kb };
                if pow > 0 {
                    term = term * Expr::raw(Poly::atom(b.clone()), Poly::one()).pow_i(pow as i64);
                }
            }
            acc = acc + term;
        }
    }
    Ok(acc)
}

/// Partial derivative with respect to a jet coordinate. The polar atoms R, z
/// carry their built-in derivatives with respect to the order-0 jets.
pub fn partial_jet(e: &Expr, j0: &Jet) -> Expr {
    derive(e, &|a: &Atom| {
        Some(Ok(match a {
            Atom::Jet(j) => {
                if j == j0 {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Atom::R => {
                if j0.order() == 0 {
                    // dR/du = u R / (u^2+v^2), dR/dv = v R / (u^2+v^2)
                    let uv = if j0.comp == 0 { Expr::u() } else { Expr::v() };
                    (uv * Expr::big_r())
                        .checked_div(&Expr::r_squared())
                        .expect("R^2 > 0")
                } else {
                    Expr::zero()
                }
            }
            Atom::Z => {
                if j0.order() == 0 {
                    // dz/du = -v/(u^2+v^2), dz/dv = u/(u^2+v^2)
                    let num = if j0.comp == 0 { -Expr::v() } else { Expr::u() };
                    num.checked_div(&Expr::r_squared()).expect("R^2 > 0")
                } else {
                    Expr::zero()
                }
            }
            _ => return None,
        }))
    })
    .expect("jet partials are total")
}

/// Partial derivative with respect to a named parameter.
pub fn partial_param(e: &Expr, name: &str) -> Expr {
    derive(e, &|a: &Atom| match a {
        Atom::Param(s) if s.as_str() == name => Some(Ok(Expr::one())),
        Atom::Param(_) | Atom::T | Atom::X(_) | Atom::Jet(_) | Atom::R | Atom::Z => {
            Some(Ok(Expr::zero()))
        }
        _ => None,
    })
    .expect("parameter partials are total")
}

/// Explicit partial with respect to t (jets held fixed).
pub fn partial_t(e: &Expr) -> Expr {
    derive(e, &|a: &Atom| match a {
        Atom::T => Some(Ok(Expr::one())),
        Atom::Param(_) | Atom::X(_) | Atom::Jet(_) | Atom::R | Atom::Z | Atom::Psi { .. } => {
            Some(Ok(Expr::zero()))
        }
        _ => None,
    })
    .expect("explicit t partials are total")
}

/// Explicit partial with respect to x_axis (jets held fixed; Psi atoms
/// respond since they are functions of x).
pub fn partial_x(e: &Expr, axis: u8) -> Result<Expr, ExprError> {
    derive(e, &|a: &Atom| match a {
        Atom::X(ax) => Some(Ok(if *ax == axis {
            Expr::one()
        } else {
            Expr::zero()
        })),
        Atom::Psi { eigen, dim, dx } => Some(match dx.push(axis) {
            Some(bumped) => Ok(Expr::psi(eigen, *dim, bumped)),
            None => Err(ExprError::JetOrderExceeded),
        }),
        Atom::Param(_) | Atom::T | Atom::Jet(_) | Atom::R | Atom::Z => Some(Ok(Expr::zero())),
        _ => None,
    })
}

/// Total derivative treating jet variables as functions of (t, x), with a
/// configurable order cap (2 for the public engine, 4 inside the
/// prolongation pipeline).
pub fn total_derivative_capped(e: &Expr, dir: TotalDir, cap: usize) -> Result<Expr, ExprError> {
    derive(e, &|a: &Atom| datom_total(a, dir, cap))
}

/// Public 2-jet total derivative.
pub fn total_derivative(e: &Expr, dir: TotalDir) -> Result<Expr, ExprError> {
    total_derivative_capped(e, dir, 2)
}

fn bump_jet(j: &Jet, dir: TotalDir, cap: usize) -> Result<Jet, ExprError> {
    if j.order() + 1 > cap {
        return Err(ExprError::JetOrderExceeded);
    }
    match dir {
        TotalDir::T => {
            if j.dt >= 1 {
                return Err(ExprError::JetOrderExceeded);
            }
            Ok(Jet {
                comp: j.comp,
                dt: 1,
                dx: j.dx,
            })
        }
        TotalDir::X(axis) => {
            let dx = j.dx.push(axis).ok_or(ExprError::JetOrderExceeded)?;
            Ok(Jet {
                comp: j.comp,
                dt: j.dt,
                dx,
            })
        }
    }
}

fn datom_total(a: &Atom, dir: TotalDir, cap: usize) -> Option<Result<Expr, ExprError>> {
    let bump = |j: &Jet| bump_jet(j, dir, cap).map(Expr::jet);
    Some(Ok(match a {
        Atom::T => match dir {
            TotalDir::T => Expr::one(),
            _ => Expr::zero(),
        },
        Atom::X(ax) => match dir {
            TotalDir::X(axis) if axis == *ax => Expr::one(),
            _ => Expr::zero(),
        },
        Atom::Param(_) => Expr::zero(),
        Atom::Jet(j) => match bump(j) {
            Ok(e) => e,
            Err(err) => return Some(Err(err)),
        },
        Atom::R => {
            // D R = (u Du + v Dv) R / (u^2 + v^2)
            let (du, dv) = match (bump(&Jet::base(0)), bump(&Jet::base(1))) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Some(Err(e)),
            };
            ((Expr::u() * du + Expr::v() * dv) * Expr::big_r())
                .checked_div(&Expr::r_squared())
                .expect("R^2 > 0")
        }
        Atom::Z => {
            // D z = (u Dv - v Du) / (u^2 + v^2)
            let (du, dv) = match (bump(&Jet::base(0)), bump(&Jet::base(1))) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Some(Err(e)),
            };
            (Expr::u() * dv - Expr::v() * du)
                .checked_div(&Expr::r_squared())
                .expect("R^2 > 0")
        }
        Atom::Psi { eigen, dim, dx } => match dir {
            TotalDir::T => Expr::zero(),
            TotalDir::X(axis) => match dx.push(axis) {
                Some(bumped) => Expr::psi(eigen, *dim, bumped),
                None => return Some(Err(ExprError::JetOrderExceeded)),
            },
        },
        // function kernels: fall through to the generic chain rule
        _ => return None,
    }))
}

/// The total spatial Laplacian over the first `m` axes, with cap.
pub fn laplacian_capped(e: &Expr, m: u8, cap: usize) -> Result<Expr, ExprError> {
    let mut acc = Expr::zero();
    for axis in 0..m {
        let first = total_derivative_capped(e, TotalDir::X(axis), cap)?;
        acc = acc + total_derivative_capped(&first, TotalDir::X(axis), cap)?;
    }
    Ok(acc)
}

/// All jets present (shallow scan of atoms, recursing into arguments).
pub fn jets_of(e: &Expr) -> Vec<Jet> {
    let mut out: Vec<Jet> = Vec::new();
    e.visit_atoms(&mut |a| {
        if let Atom::Jet(j) = a {
            if !out.contains(j) {
                out.push(*j);
            }
        }
    });
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_of_u_is_jet() {
        let e = Expr::u();
        let d = total_derivative(&e, TotalDir::X(0)).unwrap();
        assert_eq!(d, Expr::jet(Jet::dx(0, 0)));
    }

    #[test]
    fn chain_rule_on_square() {
        let e = Expr::u() * Expr::u();
        let d = total_derivative(&e, TotalDir::T).unwrap();
        let expected = Expr::int(2) * Expr::u() * Expr::jet(Jet::dt(0));
        assert!((d - expected).is_zero_expr());
    }

    #[test]
    fn two_jet_cap_is_enforced() {
        let e = Expr::jet(Jet::dxx(0, 0, 0));
        let err = total_derivative(&e, TotalDir::X(0)).unwrap_err();
        assert_eq!(err, ExprError::JetOrderExceeded);
        // the internal pipeline may go further
        assert!(total_derivative_capped(&e, TotalDir::X(0), 4).is_ok());
    }

    #[test]
    fn opaque_chain_rule() {
        // D_x1 F1(u/v) = F1'(u/v) (u_x1 v - u v_x1)/v^2
        let arg = Expr::u() / Expr::v();
        let e = Expr::opaque("F1", &arg);
        let d = total_derivative(&e, TotalDir::X(0)).unwrap();
        let ux = Expr::jet(Jet::dx(0, 0));
        let vx = Expr::jet(Jet::dx(1, 0));
        let expected = Expr::opaque_d("F1", 1, &arg)
            * (ux * Expr::v() - Expr::u() * vx)
            / (Expr::v() * Expr::v());
        assert!((d - expected).is_zero_expr());
    }

    #[test]
    fn polar_derivatives() {
        // D_x1 R = (u u_x1 + v v_x1)/R, checked via R * D R = u u_x1 + v v_x1
        let d = total_derivative(&Expr::big_r(), TotalDir::X(0)).unwrap();
        let ux = Expr::jet(Jet::dx(0, 0));
        let vx = Expr::jet(Jet::dx(1, 0));
        let lhs = Expr::big_r() * d;
        let rhs = Expr::u() * ux + Expr::v() * vx;
        assert!((lhs - rhs).is_zero_expr());
    }

    #[test]
    fn partial_jet_on_polar() {
        // u dR/du + v dR/dv = R (Euler: R homogeneous of degree 1)
        let ru = partial_jet(&Expr::big_r(), &Jet::base(0));
        let rv = partial_jet(&Expr::big_r(), &Jet::base(1));
        let e = Expr::u() * ru + Expr::v() * rv - Expr::big_r();
        assert!(e.is_zero_expr());
        // u dz/du + v dz/dv = 0 (z homogeneous of degree 0)
        let zu = partial_jet(&Expr::z(), &Jet::base(0));
        let zv = partial_jet(&Expr::z(), &Jet::base(1));
        let e2 = Expr::u() * zu + Expr::v() * zv;
        assert!(e2.is_zero_expr());
    }
}
