//! Numeric evaluation.
//!
//! Evaluation is driven by an [`EvalEnv`] that supplies values for the base
//! atoms. Two environments are provided:
//!
//! * [`RandomAtomEnv`] — seeds every atom independently (opaque kernels are
//!   free indeterminates), used by the numeric zero test;
//! * [`FunctionJetEnv`] — instantiates u, v (and opaque functions, Psi) as
//!   concrete smooth functions of (t, x) so that jet atoms are honest
//!   partial derivatives; used by the finite-difference oracle.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::fmath;
use crate::rng::{rng_from, sample_open, DetRng};

use super::atom::{Atom, Jet, SpatialIdx};
use super::poly::Poly;
use super::{Expr, ExprError};

pub trait EvalEnv {
    fn param(&mut self, name: &str) -> Result<f64, ExprError>;
    fn time(&mut self) -> Result<f64, ExprError>;
    fn coord(&mut self, axis: u8) -> Result<f64, ExprError>;
    fn jet(&mut self, jet: &Jet) -> Result<f64, ExprError>;
    fn opaque(&mut self, name: &str, order: u8, arg: &Expr, arg_val: f64)
        -> Result<f64, ExprError>;
    fn psi(&mut self, eigen: f64, dim: u8, dx: &SpatialIdx) -> Result<f64, ExprError>;
}

/// Evaluate, returning `(value, magnitude)` where magnitude accumulates the
/// absolute values of the summed terms. The zero test divides by the
/// magnitude so that cancellation is measured relative to the size of what
/// cancelled.
pub fn eval_with_mag<E: EvalEnv>(e: &Expr, env: &mut E) -> Result<(f64, f64), ExprError> {
    let (nv, nm) = eval_poly(e.num_poly(), env)?;
    if e.den_is_one() {
        return Ok((nv, nm));
    }
    let (dv, dm) = eval_poly(e.den_poly(), env)?;
    if fmath::abs(dv) < 1e-9 * dm.max(1e-30) {
        return Err(ExprError::EvalDomain {
            what: "denominator vanished at sample point".to_string(),
        });
    }
    Ok((nv / dv, nm / fmath::abs(dv)))
}

pub fn eval<E: EvalEnv>(e: &Expr, env: &mut E) -> Result<f64, ExprError> {
    eval_with_mag(e, env).map(|(v, _)| v)
}

fn eval_poly<E: EvalEnv>(p: &Poly, env: &mut E) -> Result<(f64, f64), ExprError> {
    let mut val = 0.0;
    let mut mag = 0.0;
    for (m, c) in &p.terms {
        let mut t = c.to_f64().ok_or_else(|| ExprError::EvalDomain {
            what: "coefficient overflow".to_string(),
        })?;
        for (a, k) in &m.factors {
            let av = eval_atom(a, env)?;
            t *= fmath::powi(av, *k as i32);
        }
        val += t;
        mag += fmath::abs(t);
    }
    Ok((val, mag))
}

fn eval_atom<E: EvalEnv>(a: &Atom, env: &mut E) -> Result<f64, ExprError> {
    Ok(match a {
        Atom::Param(s) => env.param(s.as_str())?,
        Atom::T => env.time()?,
        Atom::X(ax) => env.coord(*ax)?,
        Atom::Jet(j) => env.jet(j)?,
        Atom::R => {
            let u = env.jet(&Jet::base(0))?;
            let v = env.jet(&Jet::base(1))?;
            fmath::sqrt(u * u + v * v)
        }
        Atom::Z => {
            let u = env.jet(&Jet::base(0))?;
            let v = env.jet(&Jet::base(1))?;
            if u <= 0.0 {
                return Err(ExprError::EvalDomain {
                    what: "arctan(v/u) sampled at u <= 0".to_string(),
                });
            }
            fmath::atan(v / u)
        }
        Atom::Exp(g) => {
            let gv = eval(g, env)?;
            if gv > 700.0 {
                return Err(ExprError::EvalDomain {
                    what: "exponential overflow".to_string(),
                });
            }
            fmath::exp(gv)
        }
        Atom::Ln(g) => {
            let gv = eval(g, env)?;
            if gv <= 0.0 {
                return Err(ExprError::EvalDomain {
                    what: "ln of non-positive sample".to_string(),
                });
            }
            fmath::ln(gv)
        }
        Atom::Sin(g) => fmath::sin(eval(g, env)?),
        Atom::Cos(g) => fmath::cos(eval(g, env)?),
        Atom::Atan(g) => fmath::atan(eval(g, env)?),
        Atom::Opaque { name, order, arg } => {
            let av = eval(arg, env)?;
            env.opaque(name.as_str(), *order, arg, av)?
        }
        Atom::Psi { eigen, dim, dx } => {
            let ev = eval(eigen, env)?;
            env.psi(ev, *dim, dx)?
        }
    })
}

// --- random atom environment -------------------------------------------------

/// Independent random values per atom, deterministic in the seed. Matches
/// the sampling domains fixed for the zero test: u, v in (0.1, 2); t in
/// (0.1, 1); x in (-1, 1); other jets in (-2, 2); leftover parameters in
/// [-3, 3] away from zero; opaque kernels in (-2, -0.1) u (0.1, 2).
pub struct RandomAtomEnv {
    rng: DetRng,
    params: BTreeMap<String, f64>,
    jets: BTreeMap<Jet, f64>,
    opaques: BTreeMap<(String, u8, Expr), f64>,
    psi_funcs: BTreeMap<(u64, u8), ([f64; 3], f64, f64)>,
    time: Option<f64>,
    coords: BTreeMap<u8, f64>,
}

impl RandomAtomEnv {
    pub fn new(seed: u64, stream: u64) -> Self {
        RandomAtomEnv {
            rng: rng_from(seed, stream.wrapping_mul(2).wrapping_add(101)),
            params: BTreeMap::new(),
            jets: BTreeMap::new(),
            opaques: BTreeMap::new(),
            psi_funcs: BTreeMap::new(),
            time: None,
            coords: BTreeMap::new(),
        }
    }

    /// Pin a parameter to a concrete value before evaluation.
    pub fn fix_param(&mut self, name: &str, v: f64) {
        self.params.insert(name.to_string(), v);
    }

    /// Snapshot of everything sampled so far (for witnesses).
    pub fn assignments(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = Vec::new();
        if let Some(t) = self.time {
            out.push(("t".to_string(), t));
        }
        for (ax, v) in &self.coords {
            out.push((format!("x{}", ax + 1), *v));
        }
        for (j, v) in &self.jets {
            out.push((format!("{}", Expr::jet(*j)), *v));
        }
        for (p, v) in &self.params {
            out.push((p.clone(), *v));
        }
        for ((name, order, _), v) in &self.opaques {
            out.push((format!("{}^({})", name, order), *v));
        }
        out
    }

    fn nonzero(&mut self, lo: f64, hi: f64) -> f64 {
        loop {
            let v = sample_open(&mut self.rng, lo, hi);
            if fmath::abs(v) >= 0.1 {
                return v;
            }
        }
    }
}

impl EvalEnv for RandomAtomEnv {
    fn param(&mut self, name: &str) -> Result<f64, ExprError> {
        if let Some(v) = self.params.get(name) {
            return Ok(*v);
        }
        let v = self.nonzero(-3.0, 3.0);
        self.params.insert(name.to_string(), v);
        Ok(v)
    }

    fn time(&mut self) -> Result<f64, ExprError> {
        if self.time.is_none() {
            self.time = Some(sample_open(&mut self.rng, 0.1, 1.0));
        }
        Ok(self.time.unwrap())
    }

    fn coord(&mut self, axis: u8) -> Result<f64, ExprError> {
        Ok(*self
            .coords
            .entry(axis)
            .or_insert_with(|| sample_open(&mut self.rng, -1.0, 1.0)))
    }

    fn jet(&mut self, jet: &Jet) -> Result<f64, ExprError> {
        if let Some(v) = self.jets.get(jet) {
            return Ok(*v);
        }
        let v = if jet.order() == 0 {
            sample_open(&mut self.rng, 0.1, 2.0)
        } else {
            sample_open(&mut self.rng, -2.0, 2.0)
        };
        self.jets.insert(*jet, v);
        Ok(v)
    }

    fn opaque(
        &mut self,
        name: &str,
        order: u8,
        arg: &Expr,
        _arg_val: f64,
    ) -> Result<f64, ExprError> {
        let key = (name.to_string(), order, arg.clone());
        if let Some(v) = self.opaques.get(&key) {
            return Ok(*v);
        }
        let v = self.nonzero(-2.0, 2.0);
        self.opaques.insert(key, v);
        Ok(v)
    }

    fn psi(&mut self, eigen: f64, dim: u8, dx: &SpatialIdx) -> Result<f64, ExprError> {
        // Instantiate an honest eigenfunction so derivative atoms stay
        // consistent: A exp(k.x) for eigen >= 0 (|k|^2 = eigen),
        // A cos(k.x + phase) otherwise (|k|^2 = -eigen). One function is
        // sampled per (eigen, dim); derivatives all derive from it.
        let m = if dim == 0 { 3 } else { dim };
        let key = (eigen.to_bits(), dim);
        if !self.psi_funcs.contains_key(&key) {
            let mut k = [0.0f64; 3];
            let spherical: Vec<f64> = (0..m).map(|_| self.nonzero(-1.0, 1.0)).collect();
            let norm = fmath::sqrt(spherical.iter().map(|c| c * c).sum::<f64>());
            let scale = fmath::sqrt(fmath::abs(eigen));
            for (i, c) in spherical.iter().enumerate() {
                k[i] = c / norm * scale;
            }
            let amp = self.nonzero(-2.0, 2.0);
            let phase = sample_open(&mut self.rng, 0.0, 3.0);
            self.psi_funcs.insert(key, (k, amp, phase));
        }
        let (k, amp, phase) = *self.psi_funcs.get(&key).unwrap();
        let mut dot = 0.0;
        for ax in 0..m {
            dot += k[ax as usize] * self.coord(ax)?;
        }
        let mut coef = amp;
        for ax in dx.axes() {
            coef *= k[*ax as usize];
        }
        Ok(if eigen >= 0.0 {
            // Delta exp(k.x) = |k|^2 exp = eigen * psi
            coef * fmath::exp(dot)
        } else {
            // each derivative shifts the cosine phase by pi/2
            coef * fmath::cos(dot + phase + dx.order() as f64 * core::f64::consts::FRAC_PI_2)
        })
    }
}

// --- honest function environment ----------------------------------------------

/// u_b(t, x) = base + amp sin(k.x + w t + phase) with analytic jets; opaque
/// functions are sinusoids of their argument. Supports finite-difference
/// checks of total derivatives.
pub struct FunctionJetEnv {
    pub t: f64,
    pub x: [f64; 3],
    base: [f64; 2],
    amp: [f64; 2],
    k: [[f64; 3]; 2],
    w: [f64; 2],
    phase: [f64; 2],
    params: BTreeMap<String, f64>,
    op_base: BTreeMap<String, (f64, f64, f64)>,
    rng: DetRng,
}

impl FunctionJetEnv {
    pub fn new(seed: u64) -> Self {
        let mut rng = rng_from(seed, 7);
        let mut mk = |lo: f64, hi: f64| sample_open(&mut rng, lo, hi);
        let base = [mk(1.0, 1.5), mk(1.0, 1.5)];
        let amp = [mk(0.1, 0.35), mk(0.1, 0.35)];
        let k = [
            [mk(-1.0, 1.0), mk(-1.0, 1.0), mk(-1.0, 1.0)],
            [mk(-1.0, 1.0), mk(-1.0, 1.0), mk(-1.0, 1.0)],
        ];
        let w = [mk(-1.0, 1.0), mk(-1.0, 1.0)];
        let phase = [mk(0.0, 3.0), mk(0.0, 3.0)];
        FunctionJetEnv {
            t: mk(0.2, 0.8),
            x: [mk(-0.5, 0.5), mk(-0.5, 0.5), mk(-0.5, 0.5)],
            base,
            amp,
            k,
            w,
            phase,
            params: BTreeMap::new(),
            op_base: BTreeMap::new(),
            rng,
        }
    }

    fn field(&self, comp: usize, dt: u8, dx: &SpatialIdx) -> f64 {
        let arg = self.k[comp][0] * self.x[0]
            + self.k[comp][1] * self.x[1]
            + self.k[comp][2] * self.x[2]
            + self.w[comp] * self.t
            + self.phase[comp];
        let order = dt as usize + dx.order();
        let mut coef = self.amp[comp];
        if dt > 0 {
            coef *= self.w[comp];
        }
        for ax in dx.axes() {
            coef *= self.k[comp][*ax as usize];
        }
        let q = fmath::sin(arg + order as f64 * core::f64::consts::FRAC_PI_2);
        if order == 0 {
            self.base[comp] + self.amp[comp] * fmath::sin(arg)
        } else {
            coef * q
        }
    }
}

impl EvalEnv for FunctionJetEnv {
    fn param(&mut self, name: &str) -> Result<f64, ExprError> {
        if let Some(v) = self.params.get(name) {
            return Ok(*v);
        }
        let v = loop {
            let v = sample_open(&mut self.rng, -2.0, 2.0);
            if fmath::abs(v) >= 0.2 {
                break v;
            }
        };
        self.params.insert(name.to_string(), v);
        Ok(v)
    }

    fn time(&mut self) -> Result<f64, ExprError> {
        Ok(self.t)
    }

    fn coord(&mut self, axis: u8) -> Result<f64, ExprError> {
        Ok(self.x[axis as usize])
    }

    fn jet(&mut self, jet: &Jet) -> Result<f64, ExprError> {
        if jet.dt > 1 {
            return Err(ExprError::JetOrderExceeded);
        }
        Ok(self.field(jet.comp as usize, jet.dt, &jet.dx))
    }

    fn opaque(
        &mut self,
        name: &str,
        order: u8,
        _arg: &Expr,
        arg_val: f64,
    ) -> Result<f64, ExprError> {
        // F(s) = c0 + c1 sin(w s): every derivative is analytic
        let (c0, c1, w) = *self.op_base.entry(name.to_string()).or_insert((
            sample_open(&mut self.rng, 0.5, 1.5),
            sample_open(&mut self.rng, 0.3, 1.0),
            sample_open(&mut self.rng, 0.3, 0.9),
        ));
        let shifted = fmath::sin(w * arg_val + order as f64 * core::f64::consts::FRAC_PI_2);
        let v = if order == 0 {
            c0 + c1 * shifted
        } else {
            c1 * fmath::powi(w, order as i32) * shifted
        };
        Ok(v)
    }

    fn psi(&mut self, eigen: f64, _dim: u8, dx: &SpatialIdx) -> Result<f64, ExprError> {
        // reuse the random-env construction with a fixed direction
        let scale = fmath::sqrt(fmath::abs(eigen));
        let k = [0.6 * scale, 0.8 * scale, 0.0];
        let dot = k[0] * self.x[0] + k[1] * self.x[1];
        let mut coef = 1.0;
        for ax in dx.axes() {
            coef *= k[*ax as usize];
        }
        Ok(if eigen >= 0.0 {
            coef * fmath::exp(dot)
        } else {
            coef * fmath::cos(dot + dx.order() as f64 * core::f64::consts::FRAC_PI_2)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn eval_polynomial() {
        let e = parse("u^2 + v^2").unwrap();
        let mut env = RandomAtomEnv::new(1, 0);
        let u = env.jet(&Jet::base(0)).unwrap();
        let v = env.jet(&Jet::base(1)).unwrap();
        let got = eval(&e, &mut env).unwrap();
        assert!((got - (u * u + v * v)).abs() < 1e-12);
    }

    #[test]
    fn r_equals_sqrt() {
        let e = parse("R^2 - u^2 - v^2").unwrap();
        let mut env = RandomAtomEnv::new(3, 0);
        let got = eval(&e, &mut env).unwrap();
        assert!(got.abs() < 1e-12);
    }

    #[test]
    fn psi_env_satisfies_eigenvalue_relation() {
        // Delta psi - eigen psi evaluates to ~0 under the honest env
        let kappa = 0.7;
        for dim in [1u8, 2, 3] {
            let mut env = RandomAtomEnv::new(11, 4);
            let mut lap = 0.0;
            for ax in 0..dim {
                lap += env
                    .psi(kappa, dim, &SpatialIdx::pair(ax, ax))
                    .unwrap();
            }
            let base = env.psi(kappa, dim, &SpatialIdx::empty()).unwrap();
            assert!(
                (lap - kappa * base).abs() < 1e-9,
                "dim {}: {} vs {}",
                dim,
                lap,
                kappa * base
            );
        }
    }
}
