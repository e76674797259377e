//! The classified PDE systems: rotation-type diffusion matrix, source pair,
//! the residual on jet data and the on-manifold substitution rules.
//!
//! The system reads, componentwise,
//!
//! ```text
//! u_t - Δ(a u - v) = f1(u, v)
//! v_t - Δ(a v + u) = f2(u, v)
//! ```
//!
//! i.e. `U_t - A ΔU = f(U)` with `A = ((a, -1), (1, a))`.

use alloc::format;
use alloc::vec::Vec;

use crate::expr::atom::Jet;
use crate::expr::calculus::{laplacian_capped, total_derivative_capped, TotalDir};
use crate::expr::{Expr, ExprError};

/// Rotation-type (type-I) diffusion matrix `((a, -1), (1, a))`. Invertible
/// for every real a since det = a^2 + 1 > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionMatrix {
    a: Expr,
}

impl DiffusionMatrix {
    pub fn new(a: Expr) -> Self {
        DiffusionMatrix { a }
    }

    pub fn param() -> Self {
        Self::new(Expr::param("a"))
    }

    pub fn a(&self) -> &Expr {
        &self.a
    }

    /// Matrix entries row-major.
    pub fn entries(&self) -> [[Expr; 2]; 2] {
        [
            [self.a.clone(), -Expr::one()],
            [Expr::one(), self.a.clone()],
        ]
    }

    pub fn det(&self) -> Expr {
        &self.a * &self.a + Expr::one()
    }

    /// Inverse matrix entries: (a^2+1)^{-1} ((a, 1), (-1, a)).
    pub fn inverse_entries(&self) -> [[Expr; 2]; 2] {
        let d = self.det();
        [
            [&self.a / &d, Expr::one() / d.clone()],
            [-(Expr::one() / d.clone()), &self.a / &d],
        ]
    }

    /// A w for a 2-vector of expressions.
    pub fn apply(&self, w: &[Expr; 2]) -> [Expr; 2] {
        [
            &self.a * &w[0] - w[1].clone(),
            w[0].clone() + &self.a * &w[1],
        ]
    }

    /// A^{-1} w.
    pub fn apply_inverse(&self, w: &[Expr; 2]) -> [Expr; 2] {
        let d = self.det();
        [
            (&self.a * &w[0] + w[1].clone()) / d.clone(),
            (&self.a * &w[1] - w[0].clone()) / d,
        ]
    }
}

/// A concrete classified system: spatial dimension, diffusion parameter and
/// the autonomous source pair.
#[derive(Clone, Debug)]
pub struct RdSystem {
    pub m: u8,
    pub diffusion: DiffusionMatrix,
    pub f: [Expr; 2],
}

impl RdSystem {
    /// Constructor enforcing the autonomy invariant: sources depend on
    /// (u, v) only.
    pub fn new(m: u8, diffusion: DiffusionMatrix, f: [Expr; 2]) -> Result<Self, ExprError> {
        if !(1..=3).contains(&m) {
            return Err(ExprError::Structure {
                what: format!("spatial dimension {} out of range 1..=3", m),
            });
        }
        for (i, fi) in f.iter().enumerate() {
            if fi.contains_time() || fi.contains_space() {
                return Err(ExprError::Structure {
                    what: format!("f{} depends on t or x (sources must be autonomous)", i + 1),
                });
            }
            if fi.contains_jet_order_ge(1) {
                return Err(ExprError::Structure {
                    what: format!("f{} contains jet variables", i + 1),
                });
            }
        }
        Ok(RdSystem { m, diffusion, f })
    }

    pub fn a(&self) -> &Expr {
        self.diffusion.a()
    }

    /// Right-hand side of the evolution form: `U_t = A ΔU + f`.
    pub fn rhs(&self) -> [Expr; 2] {
        let lap_u = laplacian_capped(&Expr::u(), self.m, 2).expect("2-jet laplacian of u");
        let lap_v = laplacian_capped(&Expr::v(), self.m, 2).expect("2-jet laplacian of v");
        let al = self.diffusion.apply(&[lap_u, lap_v]);
        [&al[0] + &self.f[0], &al[1] + &self.f[1]]
    }

    /// The residual pair `(u_t - (AΔU)_1 - f1, v_t - (AΔU)_2 - f2)` as
    /// expressions in jet variables with Δ expanded for dimension m.
    pub fn residual(&self) -> [Expr; 2] {
        let rhs = self.rhs();
        [
            Expr::jet(Jet::dt(0)) - rhs[0].clone(),
            Expr::jet(Jet::dt(1)) - rhs[1].clone(),
        ]
    }

    /// Jacobian of the source: `df_i/du_j`.
    pub fn f_jacobian(&self) -> [[Expr; 2]; 2] {
        use crate::expr::calculus::partial_jet;
        [
            [
                partial_jet(&self.f[0], &Jet::base(0)),
                partial_jet(&self.f[0], &Jet::base(1)),
            ],
            [
                partial_jet(&self.f[1], &Jet::base(0)),
                partial_jet(&self.f[1], &Jet::base(1)),
            ],
        ]
    }

    /// On-manifold substitution rules: `u_{b,t} -> (AΔU + f)_b` plus every
    /// spatial derivative of those rules up to `depth` (obtained by total
    /// differentiation, so the second prolongation of t-components can be
    /// rewritten). The returned list binds jets with dt = 1.
    pub fn solution_manifold_rules(&self, depth: usize) -> Result<Vec<(Jet, Expr)>, ExprError> {
        let rhs = self.rhs();
        let mut rules: Vec<(Jet, Expr)> = Vec::new();
        for comp in 0..2u8 {
            rules.push((Jet::dt(comp), rhs[comp as usize].clone()));
        }
        // spatial derivatives of the base rule, breadth-first up to depth
        let mut frontier: Vec<(Jet, Expr)> = rules.clone();
        for _ in 0..depth {
            let mut next = Vec::new();
            for (jet, e) in &frontier {
                for axis in 0..self.m {
                    let dx = match jet.dx.push(axis) {
                        Some(dx) => dx,
                        None => continue,
                    };
                    let bumped = Jet {
                        comp: jet.comp,
                        dt: 1,
                        dx,
                    };
                    if rules.iter().any(|(j, _)| *j == bumped) {
                        continue;
                    }
                    let de = total_derivative_capped(e, TotalDir::X(axis), 4)?;
                    rules.push((bumped, de.clone()));
                    next.push((bumped, de));
                }
            }
            frontier = next;
        }
        Ok(rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::atom::Atom;
    use crate::expr::{is_zero, parse, Bindings};

    fn sys(m: u8, f1: &str, f2: &str) -> RdSystem {
        RdSystem::new(
            m,
            DiffusionMatrix::param(),
            [parse(f1).unwrap(), parse(f2).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn inverse_is_exact() {
        let a = DiffusionMatrix::param();
        let e = a.entries();
        let inv = a.inverse_entries();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Expr::zero();
                for k in 0..2 {
                    acc = acc + &e[i][k] * &inv[k][j];
                }
                let expected = if i == j { Expr::one() } else { Expr::zero() };
                assert!((acc - expected).is_zero_expr());
            }
        }
    }

    #[test]
    fn linear_residual_m1() {
        let s = sys(1, "0", "0");
        let r = s.residual();
        let expected0 = parse("u_t - a*u_x1x1 + v_x1x1").unwrap();
        let expected1 = parse("v_t - a*v_x1x1 - u_x1x1").unwrap();
        assert!((r[0].clone() - expected0).is_zero_expr());
        assert!((r[1].clone() - expected1).is_zero_expr());
    }

    #[test]
    fn residual_second_order_coefficients_are_minus_a() {
        // coefficient of u_{b,x_nu x_nu} in residual row i equals -A[i][b]
        let s = sys(2, "u^2", "v^2");
        let r = s.residual();
        let a_entries = s.diffusion.entries();
        for (i, row) in r.iter().enumerate() {
            for b in 0..2u8 {
                for axis in 0..2u8 {
                    let c = crate::expr::calculus::partial_jet(row, &Jet::dxx(b, axis, axis));
                    let expected = -a_entries[i][b as usize].clone();
                    assert!(
                        (c - expected).is_zero_expr(),
                        "row {} comp {} axis {}",
                        i,
                        b,
                        axis
                    );
                }
            }
        }
    }

    #[test]
    fn nls_limit_at_a_zero() {
        // a = 0 gives the Schroedinger coupling: u_t = -Δv + f1
        let s = RdSystem::new(
            1,
            DiffusionMatrix::new(Expr::zero()),
            [Expr::zero(), Expr::zero()],
        )
        .unwrap();
        let r = s.residual();
        let expected0 = parse("u_t + v_x1x1").unwrap();
        assert!((r[0].clone() - expected0).is_zero_expr());
    }

    #[test]
    fn autonomy_invariant_enforced() {
        let bad = RdSystem::new(
            1,
            DiffusionMatrix::param(),
            [parse("t*u").unwrap(), Expr::zero()],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn constant_ode_solution_kills_residual() {
        // f = (v, -u): spatially constant solution U(t) = (sin t, cos t)
        let s = sys(1, "v", "-u");
        let r = s.residual();
        let t = Expr::t();
        let u_sol = Expr::sin_of(&t);
        let v_sol = Expr::cos_of(&t);
        let b = Bindings::new()
            .jet(Jet::base(0), u_sol.clone())
            .jet(Jet::base(1), v_sol.clone())
            .jet(Jet::dt(0), v_sol.clone())
            .jet(Jet::dt(1), -u_sol.clone())
            .jet(Jet::dxx(0, 0, 0), Expr::zero())
            .jet(Jet::dxx(1, 0, 0), Expr::zero());
        for ri in &r {
            let out = crate::expr::subst::substitute(ri, &b).unwrap();
            assert_eq!(is_zero(&out, 5), crate::expr::Verdict::ProvenZero);
        }
    }

    #[test]
    fn manifold_rules_include_derived_rules() {
        let s = sys(1, "u*v", "0");
        let rules = s.solution_manifold_rules(1).unwrap();
        let ut = rules.iter().find(|(j, _)| *j == Jet::dt(0)).unwrap();
        let expected = parse("a*u_x1x1 - v_x1x1 + u*v").unwrap();
        assert!((ut.1.clone() - expected).is_zero_expr());
        // the derived rule D_x1(u_t) must exist and carry third-order atoms
        let utx = rules
            .iter()
            .find(|(j, _)| j.dt == 1 && j.comp == 0 && j.dx.order() == 1)
            .unwrap();
        assert!(utx
            .1
            .any_atom(|a| matches!(a, Atom::Jet(j) if j.order() == 3)));
        // and its source-derivative part: v u_x1 + u v_x1
        let third = |comp: u8| {
            Expr::jet(Jet {
                comp,
                dt: 0,
                dx: crate::expr::SpatialIdx::pair(0, 0).push(0).unwrap(),
            })
        };
        let expected_dx = Expr::param("a") * third(0) - third(1) + parse("v*u_x1 + u*v_x1").unwrap();
        assert!((utx.1.clone() - expected_dx).is_zero_expr());
    }
}
