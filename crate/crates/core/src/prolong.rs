//! Second-order prolongation and the full invariance oracle.
//!
//! The oracle works in evolutionary characteristic form: with
//! `Q^a = phi^a - eta u_{a,t} - xi^nu u_{a,x_nu}` restricted to the solution
//! manifold (every t-derivative replaced through `U_t = A ΔU + f`), the
//! field is a Lie point symmetry iff
//!
//! ```text
//! E^a = D_t Q^a - A^{ab} Δ Q^b - f^a_{u_b} Q^b = 0
//! ```
//!
//! identically in the remaining free jet coordinates. Intermediate spatial
//! jets of order 3 and 4 appear as formal atoms and must cancel; a leftover
//! is reported as an internal consistency error instead of being dropped.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::expr::atom::Jet;
use crate::expr::calculus::{
    laplacian_capped, partial_jet, partial_t, partial_x, total_derivative_capped, TotalDir,
};
use crate::expr::subst::{substitute_capped, Bindings};
use crate::expr::{Expr, ExprError};
use crate::generator::Generator;
use crate::pde::RdSystem;

/// Internal jet-order cap of the prolongation pipeline.
const PIPE_CAP: usize = 4;

/// Prolonged coefficients of a generator: the coefficient of
/// `d_{u_{a,t}}`, `d_{u_{a,x_nu}}` and `d_{u_{a,x_nu x_mu}}` in the second
/// prolongation, in evolutionary form.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub m: u8,
    pub phi_t: [Expr; 2],
    /// `phi_x[a][nu]`
    pub phi_x: [Vec<Expr>; 2],
    /// `phi_xx[a][nu][mu]`, symmetric in (nu, mu)
    pub phi_xx: [Vec<Vec<Expr>>; 2],
}

/// Standard second prolongation `phi^{a,J} = D_J Q^a + eta u_{a,Jt} +
/// xi^nu u_{a,J nu}`, evaluated in closed form (the top-order t-atoms cancel
/// structurally, so no `u_tt` is ever materialized).
pub fn prolong2(gen: &Generator) -> Result<Prolongation, ExprError> {
    let m = gen.m;
    let eta_t = partial_t(&gen.eta);
    let eta_x: Vec<Expr> = (0..m)
        .map(|ax| partial_x(&gen.eta, ax))
        .collect::<Result<_, _>>()?;
    let xi_t: Vec<Expr> = gen.xi.iter().map(partial_t).collect();
    let mut xi_x: Vec<Vec<Expr>> = Vec::new(); // xi_x[nu][mu] = d xi^nu / d x_mu
    for xi in &gen.xi {
        let row: Vec<Expr> = (0..m)
            .map(|ax| partial_x(xi, ax))
            .collect::<Result<_, _>>()?;
        xi_x.push(row);
    }

    let phi_u = |a: usize, b: u8| partial_jet(&gen.phi[a], &Jet::base(b));

    let mut phi_t = [Expr::zero(), Expr::zero()];
    let mut phi_x: [Vec<Expr>; 2] = [Vec::new(), Vec::new()];
    let mut phi_xx: [Vec<Vec<Expr>>; 2] = [Vec::new(), Vec::new()];

    for a in 0..2usize {
        let ut = Expr::jet(Jet::dt(a as u8));
        // phi^{a,t} = d_t phi + phi_{u_b} u_{b,t} - eta_t u_{a,t}
        //             - xi^nu_t u_{a,x_nu}
        let mut pt = partial_t(&gen.phi[a]);
        for b in 0..2u8 {
            pt = pt + phi_u(a, b) * Expr::jet(Jet::dt(b));
        }
        pt = pt - &eta_t * &ut;
        for nu in 0..m {
            pt = pt - &xi_t[nu as usize] * &Expr::jet(Jet::dx(a as u8, nu));
        }
        phi_t[a] = pt;

        // phi^{a,x_mu} = d_mu phi + phi_{u_b} u_{b,mu} - eta_{x_mu} u_{a,t}
        //               - xi^nu_{x_mu} u_{a,x_nu}
        for mu in 0..m {
            let mut px = partial_x(&gen.phi[a], mu)?;
            for b in 0..2u8 {
                px = px + phi_u(a, b) * Expr::jet(Jet::dx(b, mu));
            }
            px = px - &eta_x[mu as usize] * &ut;
            for nu in 0..m {
                px = px - &xi_x[nu as usize][mu as usize] * &Expr::jet(Jet::dx(a as u8, nu));
            }
            phi_x[a].push(px);
        }

        // second order, symmetric in (mu, la)
        for mu in 0..m {
            let mut row = Vec::new();
            for la in 0..m {
                let dmu_phi = partial_x(&gen.phi[a], mu)?;
                let mut pxx = partial_x(&dmu_phi, la)?;
                for b in 0..2u8 {
                    let pu = phi_u(a, b);
                    pxx = pxx
                        + partial_x(&pu, mu)? * Expr::jet(Jet::dx(b, la))
                        + partial_x(&pu, la)? * Expr::jet(Jet::dx(b, mu))
                        + pu * Expr::jet(Jet::dxx(b, mu, la));
                }
                // mixed t-derivatives only survive when eta depends on x
                let mixed = |ax: u8| {
                    Expr::jet(Jet {
                        comp: a as u8,
                        dt: 1,
                        dx: crate::expr::SpatialIdx::single(ax),
                    })
                };
                pxx = pxx - &eta_x[la as usize] * &mixed(mu) - &eta_x[mu as usize] * &mixed(la);
                pxx = pxx - partial_x(&eta_x[mu as usize], la)? * ut.clone();
                for nu in 0..m {
                    let xnm = &xi_x[nu as usize][mu as usize];
                    let xnl = &xi_x[nu as usize][la as usize];
                    pxx = pxx
                        - partial_x(xnm, la)? * Expr::jet(Jet::dx(a as u8, nu))
                        - xnm * &Expr::jet(Jet::dxx(a as u8, nu, la))
                        - xnl * &Expr::jet(Jet::dxx(a as u8, nu, mu));
                }
                row.push(pxx);
            }
            phi_xx[a].push(row);
        }
    }

    Ok(Prolongation {
        m,
        phi_t,
        phi_x,
        phi_xx,
    })
}

/// Substituted characteristic `Q^a = phi^a - eta R^a - xi^nu u_{a,x_nu}`
/// with `R = A ΔU + f` (the manifold form of `u_t`).
pub fn characteristic_on_manifold(sys: &RdSystem, gen: &Generator) -> [Expr; 2] {
    let rhs = sys.rhs();
    let mut q = [Expr::zero(), Expr::zero()];
    for a in 0..2usize {
        let mut acc = gen.phi[a].clone() - &gen.eta * &rhs[a];
        for nu in 0..gen.m {
            acc = acc - &gen.xi[nu as usize] * &Expr::jet(Jet::dx(a as u8, nu));
        }
        q[a] = acc;
    }
    q
}

/// On-manifold total t-derivative: the ordinary total derivative followed by
/// replacement of every first-order-in-t jet through the differentiated
/// manifold rules.
fn dt_on_manifold(sys: &RdSystem, w: &Expr) -> Result<Expr, ExprError> {
    let dt = total_derivative_capped(w, TotalDir::T, PIPE_CAP)?;
    let rules = sys.solution_manifold_rules(2)?;
    let mut b = Bindings::new();
    for (jet, e) in rules {
        b = b.jet(jet, e);
    }
    let out = substitute_capped(&dt, &b)?;
    if out.any_atom(|a| matches!(a, crate::expr::Atom::Jet(j) if j.dt > 0)) {
        return Err(ExprError::Structure {
            what: "manifold substitution left a t-derivative".to_string(),
        });
    }
    Ok(out)
}

/// The invariance residual pair. Zero iff the generator is a Lie point
/// symmetry of the system.
pub fn invariance_residual(sys: &RdSystem, gen: &Generator) -> Result<[Expr; 2], ExprError> {
    if gen.m != sys.m {
        return Err(ExprError::Structure {
            what: format!("generator dimension {} != system dimension {}", gen.m, sys.m),
        });
    }
    let q = characteristic_on_manifold(sys, gen);
    let fj = sys.f_jacobian();
    let lap = [
        laplacian_capped(&q[0], sys.m, PIPE_CAP)?,
        laplacian_capped(&q[1], sys.m, PIPE_CAP)?,
    ];
    let alap = sys.diffusion.apply(&lap);
    let mut out = [Expr::zero(), Expr::zero()];
    for a in 0..2usize {
        let mut e = dt_on_manifold(sys, &q[a])? - alap[a].clone();
        for b in 0..2usize {
            e = e - &fj[a][b] * &q[b];
        }
        if e.contains_jet_order_ge(3) {
            return Err(ExprError::Structure {
                what: format!(
                    "third-order jet atoms did not cancel in component {}: {}",
                    a + 1,
                    e
                ),
            });
        }
        out[a] = e;
    }
    Ok(out)
}

/// Convenience: both residual components pass the zero test.
pub fn is_symmetry(sys: &RdSystem, gen: &Generator, seeds: u32, seed: u64) -> Result<[crate::expr::Verdict; 2], ExprError> {
    let r = invariance_residual(sys, gen)?;
    Ok([
        crate::expr::is_zero_seeded(&r[0], seeds, seed),
        crate::expr::is_zero_seeded(&r[1], seeds, seed.wrapping_add(1)),
    ])
}

/// Direct prolongation route (used to cross-check the characteristic form):
/// apply the prolonged field to the residual and restrict to the manifold.
/// Only valid for generators with eta free of x (the catalog family).
pub fn invariance_residual_direct(
    sys: &RdSystem,
    gen: &Generator,
) -> Result<[Expr; 2], ExprError> {
    let pro = prolong2(gen)?;
    let fj = sys.f_jacobian();
    let a_entries = sys.diffusion.entries();
    let mut out = [Expr::zero(), Expr::zero()];
    let rules = sys.solution_manifold_rules(2)?;
    let mut b = Bindings::new();
    for (jet, e) in rules {
        b = b.jet(jet, e);
    }
    for k in 0..2usize {
        // pr X (Delta_k) = phi^{k,t} - A^{kb} phi^{b,nu nu} - f^k_{u_b} phi^b
        let mut e = pro.phi_t[k].clone();
        for bb in 0..2usize {
            for nu in 0..sys.m as usize {
                e = e - &a_entries[k][bb] * &pro.phi_xx[bb][nu][nu];
            }
            e = e - &fj[k][bb] * &gen.phi[bb];
        }
        let e = substitute_capped(&e, &b)?;
        if e.contains_jet_order_ge(3) {
            return Err(ExprError::Structure {
                what: "third-order jet atoms did not cancel (direct route)".to_string(),
            });
        }
        out[k] = e;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, parse, Verdict};
    use crate::generator::{dilatation, galilei, p0, parse_generator};
    use crate::pde::DiffusionMatrix;

    fn sys(m: u8, a: &str, f1: &str, f2: &str) -> RdSystem {
        RdSystem::new(
            m,
            DiffusionMatrix::new(parse(a).unwrap()),
            [parse(f1).unwrap(), parse(f2).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn translation_prolongs_to_zero() {
        let g = p0(2);
        let p = prolong2(&g).unwrap();
        assert!(p.phi_t.iter().all(|e| e.is_zero_expr()));
        assert!(p.phi_x.iter().flatten().all(|e| e.is_zero_expr()));
        assert!(p
            .phi_xx
            .iter()
            .flat_map(|r| r.iter().flatten())
            .all(|e| e.is_zero_expr()));
    }

    #[test]
    fn dilatation_prolongation_coefficients() {
        // X = D: coefficient of u_{b,x_nu} is -(1/2) u_{b,x_nu}; of
        // u_{b,x_nu x_nu} is -u_{b,x_nu x_nu}; of u_{b,t} is -u_{b,t}
        let g = dilatation(2);
        let p = prolong2(&g).unwrap();
        for a in 0..2usize {
            let expect_t = -Expr::jet(Jet::dt(a as u8));
            assert!((p.phi_t[a].clone() - expect_t).is_zero_expr());
            for nu in 0..2u8 {
                let expect_x = Expr::rational(crate::expr::rat(-1, 2))
                    * Expr::jet(Jet::dx(a as u8, nu));
                assert!((p.phi_x[a][nu as usize].clone() - expect_x).is_zero_expr());
                let expect_xx = -Expr::jet(Jet::dxx(a as u8, nu, nu));
                assert!(
                    (p.phi_xx[a][nu as usize][nu as usize].clone() - expect_xx).is_zero_expr()
                );
            }
        }
    }

    #[test]
    fn galilei_first_prolongation_carries_inverse_matrix() {
        // the x-part of phi^{a,x_1} for G_1 is -(1/2)(A^{-1} U)_a
        let diff = DiffusionMatrix::param();
        let g = galilei(1, 0, &diff);
        let p = prolong2(&g).unwrap();
        let ainv_u = diff.apply_inverse(&[Expr::u(), Expr::v()]);
        for a in 0..2usize {
            // evaluate at x = 0: substitute x1 -> 0 kills the x-dependent part
            let b = crate::expr::Bindings::new();
            let _ = b;
            let at_zero = crate::expr::subst::substitute_capped(
                &p.phi_x[a][0],
                &crate::expr::Bindings::new(),
            )
            .unwrap();
            // extract the jet-free part by zeroing first-order jets
            let mut bb = crate::expr::Bindings::new();
            for comp in 0..2u8 {
                bb = bb.jet(Jet::dx(comp, 0), Expr::zero());
                bb = bb.jet(Jet::dt(comp), Expr::zero());
            }
            let stripped = crate::expr::subst::substitute_capped(&at_zero, &bb).unwrap();
            let expect = Expr::rational(crate::expr::rat(-1, 2)) * ainv_u[a].clone();
            assert!(
                (stripped - expect).is_zero_expr(),
                "component {} mismatch",
                a
            );
        }
    }

    #[test]
    fn p0_is_always_a_symmetry() {
        let s = sys(2, "a", "u*F1(u/v)", "v*F1(u/v)");
        let r = invariance_residual(&s, &p0(2)).unwrap();
        assert!(r[0].is_zero_expr() && r[1].is_zero_expr());
    }

    #[test]
    fn scaling_symmetry_of_power_nonlinearity() {
        // Table-type instance: f = e^{z} R^2 (u - v, v + u) at sigma = 2,
        // nu = 1, lambda = 1, mu = 1; main symmetry sigma D - u du - v dv
        let s = sys(
            2,
            "1",
            "exp(z)*R^2*(u - v)",
            "exp(z)*R^2*(v + u)",
        );
        let g = parse_generator("2*D - u*du - v*dv", 2, &s.diffusion).unwrap();
        let r = invariance_residual(&s, &g).unwrap();
        assert_eq!(is_zero(&r[0], 10), Verdict::ProvenZero);
        assert_eq!(is_zero(&r[1], 10), Verdict::ProvenZero);
        // and the rotation-type companion nu D - u dv + v du
        let g2 = parse_generator("D - u*dv + v*du", 2, &s.diffusion).unwrap();
        let r2 = invariance_residual(&s, &g2).unwrap();
        assert_eq!(is_zero(&r2[0], 10), Verdict::ProvenZero);
        assert_eq!(is_zero(&r2[1], 10), Verdict::ProvenZero);
    }

    #[test]
    fn cgl_is_not_galilei_invariant() {
        // standard CGL f = (u - (u^2+v^2)(u - v), v - (u^2+v^2)(v + u))
        // (alpha = 1, a = 1): the Galilei boost fails
        let s = sys(
            1,
            "1",
            "u - (u^2 + v^2)*(u - v)",
            "v - (u^2 + v^2)*(v + u)",
        );
        let g = galilei(1, 0, &s.diffusion);
        let r = invariance_residual(&s, &g).unwrap();
        let verdicts = [is_zero(&r[0], 10), is_zero(&r[1], 10)];
        assert!(
            verdicts.iter().any(|v| !v.is_zero()),
            "CGL must not be Galilei invariant: {:?}",
            verdicts
        );
    }

    #[test]
    fn galilei_invariant_family_passes() {
        // f_c = F(R e^{a z}) W with F = xi^2: mu = a, kappa = 0 instance,
        // a = 1, m = 1; G must be a symmetry
        let s = sys(
            1,
            "1",
            "u*(R*exp(z))^2",
            "v*(R*exp(z))^2",
        );
        let g = galilei(1, 0, &s.diffusion);
        let r = invariance_residual(&s, &g).unwrap();
        assert_eq!(is_zero(&r[0], 10), Verdict::ProvenZero, "{}", r[0]);
        assert_eq!(is_zero(&r[1], 10), Verdict::ProvenZero, "{}", r[1]);
    }

    #[test]
    fn direct_route_agrees_with_characteristic_route() {
        let s = sys(1, "a", "u^2", "u*v");
        for gtext in ["dt", "D", "t*dx1", "u*dv - v*du"] {
            let g = parse_generator(gtext, 1, &s.diffusion).unwrap();
            let r1 = invariance_residual(&s, &g).unwrap();
            let r2 = invariance_residual_direct(&s, &g).unwrap();
            for a in 0..2 {
                assert!(
                    (r1[a].clone() - r2[a].clone()).is_zero_expr(),
                    "{}: component {} differs",
                    gtext,
                    a
                );
            }
        }
    }
}
