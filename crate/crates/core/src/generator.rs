//! Vector fields on (t, x, u, v)-space.
//!
//! A [`Generator`] is stored as `X = eta d_t + xi^nu d_{x_nu} + phi^a d_{u_a}`
//! with `phi` affine in (u, v). The classification literature writes the tail
//! through `pi = -phi` (`X = ... - pi^b d_{u_b}` with `pi^a = N^{ab} u_b +
//! B^a`); both views are exposed.
//!
//! Named fields: time/space translations, rotations J, dilatation
//! `D = t d_t + x_mu d_{x_mu}/2`, Galilei boosts, exponential Galilei boosts,
//! and the conformal field K. Their u-parts act through the inverse
//! diffusion matrix; the signs below are the ones validated against the full
//! prolongation oracle (printed operator lists often carry them in the
//! opposite `pi` convention).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::expr::atom::Jet;
use crate::expr::calculus::partial_jet;
use crate::expr::{affine_in_uv, parse_in, Expr, ExprError, ParseCtx};
use crate::pde::DiffusionMatrix;

/// A point-symmetry candidate on (t, x1..xm, u, v).
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub m: u8,
    pub eta: Expr,
    pub xi: Vec<Expr>,
    pub phi: [Expr; 2],
}

impl Generator {
    /// Construct and validate the determining-equation shape constraints:
    /// eta and xi are u,v-free, phi is affine in (u, v).
    pub fn new(m: u8, eta: Expr, xi: Vec<Expr>, phi: [Expr; 2]) -> Result<Self, ExprError> {
        if xi.len() != m as usize {
            return Err(ExprError::Structure {
                what: format!("expected {} xi components, got {}", m, xi.len()),
            });
        }
        if eta.contains_jet() {
            return Err(ExprError::Structure {
                what: "eta depends on u, v".to_string(),
            });
        }
        for x in &xi {
            if x.contains_jet() {
                return Err(ExprError::Structure {
                    what: "xi depends on u, v".to_string(),
                });
            }
        }
        for p in &phi {
            affine_in_uv(p)?;
        }
        Ok(Generator { m, eta, xi, phi })
    }

    pub fn zero(m: u8) -> Self {
        Generator {
            m,
            eta: Expr::zero(),
            xi: alloc::vec![Expr::zero(); m as usize],
            phi: [Expr::zero(), Expr::zero()],
        }
    }

    /// pi = -phi (the sign convention of the determining equations).
    pub fn pi(&self) -> [Expr; 2] {
        [-self.phi[0].clone(), -self.phi[1].clone()]
    }

    /// Tail decomposition in the pi convention:
    /// `pi^a = N^{ab} u_b + B^a`, so `N^{ab} = -d phi^a / d u_b` and
    /// `B^a = -phi^a|_{u=v=0}`.
    pub fn tail_nb(&self) -> ([[Expr; 2]; 2], [Expr; 2]) {
        let mut n = [
            [Expr::zero(), Expr::zero()],
            [Expr::zero(), Expr::zero()],
        ];
        let mut b = [Expr::zero(), Expr::zero()];
        for i in 0..2 {
            let (c0, cs) = affine_in_uv(&self.phi[i]).expect("validated affine");
            n[i][0] = -cs[0].clone();
            n[i][1] = -cs[1].clone();
            b[i] = -c0;
        }
        (n, b)
    }

    /// Apply X as a derivation to a function of (t, x, u, v) (no jets of
    /// order >= 1 allowed in `g`).
    pub fn apply_to(&self, g: &Expr) -> Result<Expr, ExprError> {
        if g.contains_jet_order_ge(1) {
            return Err(ExprError::Structure {
                what: "apply_to expects a point function".to_string(),
            });
        }
        let mut acc = &self.eta * &crate::expr::calculus::partial_t(g);
        for (axis, xi) in self.xi.iter().enumerate() {
            acc = acc + xi * &crate::expr::calculus::partial_x(g, axis as u8)?;
        }
        for comp in 0..2u8 {
            acc = acc + &self.phi[comp as usize] * &partial_jet(g, &Jet::base(comp));
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Expr) -> Generator {
        Generator {
            m: self.m,
            eta: c * &self.eta,
            xi: self.xi.iter().map(|x| c * x).collect(),
            phi: [c * &self.phi[0], c * &self.phi[1]],
        }
    }

    pub fn add(&self, other: &Generator) -> Generator {
        assert_eq!(self.m, other.m);
        Generator {
            m: self.m,
            eta: &self.eta + &other.eta,
            xi: self
                .xi
                .iter()
                .zip(&other.xi)
                .map(|(a, b)| a + b)
                .collect(),
            phi: [
                &self.phi[0] + &other.phi[0],
                &self.phi[1] + &other.phi[1],
            ],
        }
    }

    pub fn is_zero_generator(&self) -> bool {
        self.eta.is_zero_expr()
            && self.xi.iter().all(|x| x.is_zero_expr())
            && self.phi.iter().all(|p| p.is_zero_expr())
    }

    /// Human-readable rendering `eta*dt + xi1*dx1 + ... + phi1*du + phi2*dv`.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if !self.eta.is_zero_expr() {
            parts.push(format!("({})*dt", self.eta));
        }
        for (i, x) in self.xi.iter().enumerate() {
            if !x.is_zero_expr() {
                parts.push(format!("({})*dx{}", x, i + 1));
            }
        }
        if !self.phi[0].is_zero_expr() {
            parts.push(format!("({})*du", self.phi[0]));
        }
        if !self.phi[1].is_zero_expr() {
            parts.push(format!("({})*dv", self.phi[1]));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

// --- named fields -------------------------------------------------------------

/// Time translation d_t.
pub fn p0(m: u8) -> Generator {
    Generator {
        eta: Expr::one(),
        ..Generator::zero(m)
    }
}

/// Space translation d_{x_axis}.
pub fn p_space(m: u8, axis: u8) -> Generator {
    let mut g = Generator::zero(m);
    g.xi[axis as usize] = Expr::one();
    g
}

/// Rotation J_{mu nu} = x_mu d_{x_nu} - x_nu d_{x_mu}.
pub fn rotation(m: u8, mu: u8, nu: u8) -> Generator {
    let mut g = Generator::zero(m);
    g.xi[nu as usize] = Expr::x(mu);
    g.xi[mu as usize] = -Expr::x(nu);
    g
}

/// Dilatation D = t d_t + (1/2) x_mu d_{x_mu}.
pub fn dilatation(m: u8) -> Generator {
    let mut g = Generator::zero(m);
    g.eta = Expr::t();
    for axis in 0..m {
        g.xi[axis as usize] = Expr::rational(crate::expr::rat(1, 2)) * Expr::x(axis);
    }
    g
}

/// Galilei boost along `axis`:
/// `G = t d_{x_axis} - (1/2) x_axis (A^{-1} U)_a d_{u_a}`.
pub fn galilei(m: u8, axis: u8, diff: &DiffusionMatrix) -> Generator {
    let mut g = Generator::zero(m);
    g.xi[axis as usize] = Expr::t();
    let ainv_u = diff.apply_inverse(&[Expr::u(), Expr::v()]);
    let half_x = Expr::rational(crate::expr::rat(-1, 2)) * Expr::x(axis);
    g.phi = [&half_x * &ainv_u[0], &half_x * &ainv_u[1]];
    g
}

/// Exponential Galilei boost:
/// `Ghat = e^{gamma t} (d_{x_axis} - (gamma/2) x_axis (A^{-1} U)_a d_{u_a})`.
pub fn exp_galilei(m: u8, axis: u8, gamma: &Expr, diff: &DiffusionMatrix) -> Generator {
    let mut g = Generator::zero(m);
    let egt = Expr::exp_of(&(gamma * &Expr::t()));
    g.xi[axis as usize] = egt.clone();
    let ainv_u = diff.apply_inverse(&[Expr::u(), Expr::v()]);
    let coef = Expr::rational(crate::expr::rat(-1, 2)) * gamma * &egt * Expr::x(axis);
    g.phi = [&coef * &ainv_u[0], &coef * &ainv_u[1]];
    g
}

/// Conformal field:
/// `K = 2t(t d_t + x_mu d_{x_mu}) - ((x^2/2)(A^{-1} U)_a + t m u_a) d_{u_a}`.
pub fn conformal(m: u8, diff: &DiffusionMatrix) -> Generator {
    let mut g = Generator::zero(m);
    let t = Expr::t();
    g.eta = Expr::int(2) * &t * &t;
    let mut x2 = Expr::zero();
    for axis in 0..m {
        g.xi[axis as usize] = Expr::int(2) * &t * Expr::x(axis);
        x2 = x2 + Expr::x(axis) * Expr::x(axis);
    }
    let ainv_u = diff.apply_inverse(&[Expr::u(), Expr::v()]);
    let half_x2 = Expr::rational(crate::expr::rat(-1, 2)) * x2;
    let tm = -(Expr::int(m as i64) * &t);
    g.phi = [
        &half_x2 * &ainv_u[0] + &tm * &Expr::u(),
        &half_x2 * &ainv_u[1] + &tm * &Expr::v(),
    ];
    g
}

/// The basic symmetries admitted by every system of the class: time and
/// space translations plus all rotations.
pub fn basic_symmetries(m: u8) -> Vec<Generator> {
    let mut out = alloc::vec![p0(m)];
    for axis in 0..m {
        out.push(p_space(m, axis));
    }
    for mu in 0..m {
        for nu in (mu + 1)..m {
            out.push(rotation(m, mu, nu));
        }
    }
    out
}

// --- generator grammar ----------------------------------------------------------

/// Parse a generator expression: a linear combination of the basis symbols
/// `dt, dx1..dx3, du, dv, dR, dz, D, K` with expression coefficients, where
/// `dR = (u du + v dv)/R` and `dz = -v du + u dv` are the polar fields
/// (so `R*dR = u du + v dv`). `D` and `K` expand to the dilatation and the
/// conformal field.
pub fn parse_generator(text: &str, m: u8, diff: &DiffusionMatrix) -> Result<Generator, ExprError> {
    // basis symbols are smuggled through reserved parameter atoms
    let mut ctx = ParseCtx::standard().with_m(m);
    let mut names: Vec<(String, Generator)> = alloc::vec![
        ("dt".to_string(), p0(m)),
        ("du".to_string(), {
            let mut g = Generator::zero(m);
            g.phi[0] = Expr::one();
            g
        }),
        ("dv".to_string(), {
            let mut g = Generator::zero(m);
            g.phi[1] = Expr::one();
            g
        }),
        ("D".to_string(), dilatation(m)),
        ("K".to_string(), conformal(m, diff)),
    ];
    for axis in 0..m {
        names.push((format!("dx{}", axis + 1), p_space(m, axis)));
    }
    names.push(("dR".to_string(), {
        let mut g = Generator::zero(m);
        g.phi[0] = Expr::u() / Expr::big_r();
        g.phi[1] = Expr::v() / Expr::big_r();
        g
    }));
    names.push(("dz".to_string(), {
        let mut g = Generator::zero(m);
        g.phi[0] = -Expr::v();
        g.phi[1] = Expr::u();
        g
    }));
    for (name, _) in &names {
        ctx.extra
            .insert(name.clone(), Expr::param(&format!("__gen_{}", name)));
    }
    let parsed = parse_in(text, &ctx)?;
    // linear extraction: coefficient of each marker; the remainder must be 0
    let mut acc = Generator::zero(m);
    let mut remainder = parsed.clone();
    for (name, gen) in &names {
        let pname = format!("__gen_{}", name);
        let coeff = crate::expr::calculus::partial_param(&parsed, &pname);
        let mixed = coeff.contains_param(&pname)
            || names
                .iter()
                .any(|(n, _)| n != name && coeff.contains_param(&format!("__gen_{}", n)));
        if mixed {
            return Err(ExprError::Structure {
                what: format!("generator expression is not linear in `{}`", name),
            });
        }
        if coeff.is_zero_expr() {
            continue;
        }
        acc = acc.add(&gen.scale(&coeff));
        remainder = remainder - &coeff * &Expr::param(&pname);
    }
    if !remainder.is_zero_expr() {
        return Err(ExprError::Structure {
            what: format!(
                "generator expression has a non-field remainder: {}",
                remainder
            ),
        });
    }
    Generator::new(acc.m, acc.eta, acc.xi, acc.phi)
}

/// Structured template of the general symmetry family: conformal, Galilei,
/// exponential-Galilei and dilatation slots, a 2x2 linear tail C(t)
/// commuting with A, a shift pair B(t, x), plus the kernel slots (rotations
/// and translations).
#[derive(Clone, Debug)]
pub struct GeneratorTemplate {
    pub m: u8,
    /// conformal coefficient lambda
    pub conformal: Expr,
    /// Galilei coefficients sigma_mu (length m)
    pub galilei: Vec<Expr>,
    /// exponential Galilei coefficients omega_mu (length m) and gamma
    pub exp_galilei: Vec<Expr>,
    pub gamma: Expr,
    /// dilatation coefficient
    pub dilatation: Expr,
    /// linear tail C(t) in the pi convention: X -= (C u + B)·d_U
    pub linear: [[Expr; 2]; 2],
    /// shift tail B(t, x)
    pub shift: [Expr; 2],
    /// rotation coefficients (mu, nu, coefficient)
    pub rotations: Vec<(u8, u8, Expr)>,
    /// time translation coefficient
    pub time_translation: Expr,
    /// space translation coefficients (length m)
    pub space_translations: Vec<Expr>,
}

impl GeneratorTemplate {
    pub fn empty(m: u8) -> Self {
        GeneratorTemplate {
            m,
            conformal: Expr::zero(),
            galilei: alloc::vec![Expr::zero(); m as usize],
            exp_galilei: alloc::vec![Expr::zero(); m as usize],
            gamma: Expr::zero(),
            dilatation: Expr::zero(),
            linear: [
                [Expr::zero(), Expr::zero()],
                [Expr::zero(), Expr::zero()],
            ],
            shift: [Expr::zero(), Expr::zero()],
            rotations: Vec::new(),
            time_translation: Expr::zero(),
            space_translations: alloc::vec![Expr::zero(); m as usize],
        }
    }

    /// Main-symmetry template `mu D - (C u + B) d_U`.
    pub fn main(m: u8, dilatation: Expr, linear: [[Expr; 2]; 2], shift: [Expr; 2]) -> Self {
        let mut t = Self::empty(m);
        t.dilatation = dilatation;
        t.linear = linear;
        t.shift = shift;
        t
    }

    /// The commutation constraint [C, A] = 0; for the rotation-type matrix
    /// this forces C11 = C22, C12 = -C21.
    pub fn check_linear_commutes(&self, diff: &DiffusionMatrix) -> Result<(), ExprError> {
        let a = diff.entries();
        let c = &self.linear;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Expr::zero();
                for k in 0..2 {
                    acc = acc + &c[i][k] * &a[k][j] - &a[i][k] * &c[k][j];
                }
                if !acc.is_zero_expr() {
                    return Err(ExprError::Structure {
                        what: format!("[C, A] != 0 at entry ({}, {}): {}", i, j, acc),
                    });
                }
            }
        }
        Ok(())
    }

    /// Expand to a concrete generator.
    pub fn expand(&self, diff: &DiffusionMatrix) -> Result<Generator, ExprError> {
        self.check_linear_commutes(diff)?;
        let m = self.m;
        let mut acc = Generator::zero(m);
        if !self.conformal.is_zero_expr() {
            acc = acc.add(&conformal(m, diff).scale(&self.conformal));
        }
        for axis in 0..m {
            let s = &self.galilei[axis as usize];
            if !s.is_zero_expr() {
                acc = acc.add(&galilei(m, axis, diff).scale(s));
            }
            let w = &self.exp_galilei[axis as usize];
            if !w.is_zero_expr() {
                acc = acc.add(&exp_galilei(m, axis, &self.gamma, diff).scale(w));
            }
            let rho = &self.space_translations[axis as usize];
            if !rho.is_zero_expr() {
                acc = acc.add(&p_space(m, axis).scale(rho));
            }
        }
        if !self.dilatation.is_zero_expr() {
            acc = acc.add(&dilatation(m).scale(&self.dilatation));
        }
        if !self.time_translation.is_zero_expr() {
            acc = acc.add(&p0(m).scale(&self.time_translation));
        }
        for (mu, nu, c) in &self.rotations {
            if !c.is_zero_expr() {
                acc = acc.add(&rotation(m, *mu, *nu).scale(c));
            }
        }
        // tail: phi -= C u + B
        let u = Expr::u();
        let v = Expr::v();
        acc.phi[0] = &acc.phi[0]
            - &(&self.linear[0][0] * &u + &self.linear[0][1] * &v + self.shift[0].clone());
        acc.phi[1] = &acc.phi[1]
            - &(&self.linear[1][0] * &u + &self.linear[1][1] * &v + self.shift[1].clone());
        Generator::new(m, acc.eta, acc.xi, acc.phi)
    }
}

/// Tail of a generator as a C-field pair: for type-I compatible tails
/// `C = c1 I + c2 J` (J the symplectic rotation); returns (c1, c2, B) in
/// the pi convention, or an error when the tail does not commute with A.
pub fn tail_cfield(gen: &Generator) -> Result<(Expr, Expr, [Expr; 2]), ExprError> {
    let (n, b) = gen.tail_nb();
    let d11 = &n[0][0] - &n[1][1];
    let d12 = &n[0][1] + &n[1][0];
    if !d11.is_zero_expr() || !d12.is_zero_expr() {
        return Err(ExprError::Structure {
            what: "tail does not commute with the rotation-type matrix".to_string(),
        });
    }
    Ok((n[0][0].clone(), n[1][0].clone(), b))
}

/// Build a parameter-binding map from name/value pairs.
pub fn param_map(entries: &[(&str, Expr)]) -> BTreeMap<String, Expr> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn parse_dilatation_tail() {
        let diff = DiffusionMatrix::param();
        let g = parse_generator("sigma*D - u*du - v*dv", 2, &diff).unwrap();
        assert!((g.eta.clone() - parse("sigma*t").unwrap()).is_zero_expr());
        assert!((g.phi[0].clone() + Expr::u()).is_zero_expr());
        let (n, b) = g.tail_nb();
        assert!((n[0][0].clone() - Expr::one()).is_zero_expr());
        assert!(n[0][1].is_zero_expr());
        assert!(b[0].is_zero_expr());
    }

    #[test]
    fn polar_fields_expand() {
        let diff = DiffusionMatrix::param();
        // R*dR = u du + v dv; dz = -v du + u dv
        let g = parse_generator("R*dR - dz", 1, &diff).unwrap();
        assert!((g.phi[0].clone() - (Expr::u() + Expr::v())).is_zero_expr());
        assert!((g.phi[1].clone() - (Expr::v() - Expr::u())).is_zero_expr());
    }

    #[test]
    fn nonlinear_generator_rejected() {
        let diff = DiffusionMatrix::param();
        assert!(parse_generator("u^2*du", 1, &diff).is_err());
        // bare dR has coefficient u/R which is not affine
        assert!(parse_generator("dR", 1, &diff).is_err());
    }

    #[test]
    fn template_expansion_matches_named_fields() {
        let diff = DiffusionMatrix::param();
        let mut t = GeneratorTemplate::empty(2);
        t.dilatation = Expr::param("sigma");
        t.linear = [
            [Expr::one(), Expr::zero()],
            [Expr::zero(), Expr::one()],
        ];
        let g = t.expand(&diff).unwrap();
        let direct = parse_generator("sigma*D - u*du - v*dv", 2, &diff).unwrap();
        assert_eq!(g, direct);
    }

    #[test]
    fn commutation_constraint_enforced() {
        let diff = DiffusionMatrix::param();
        let mut t = GeneratorTemplate::empty(1);
        t.linear = [
            [Expr::one(), Expr::zero()],
            [Expr::zero(), Expr::zero()],
        ];
        assert!(t.expand(&diff).is_err());
    }

    #[test]
    fn exp_tail_parses() {
        let diff = DiffusionMatrix::param();
        let g = parse_generator("exp(kappa*t)*(mu*R*dR - dz)", 3, &diff).unwrap();
        let ekt = Expr::exp_of(&(Expr::param("kappa") * Expr::t()));
        let expected0 = &ekt * &(Expr::param("mu") * Expr::u() + Expr::v());
        assert!((g.phi[0].clone() - expected0).is_zero_expr());
    }
}
