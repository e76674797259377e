//! The zero test: canonical-form equality gives proven zeros; the numeric
//! fallback samples random admissible points.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::fmath;

use super::eval::{eval_with_mag, RandomAtomEnv};
use super::{Expr, ExprError};

/// Numeric zero tolerance (relative to the magnitude of the cancelled
/// terms; identical to the absolute value for O(1) expressions).
pub const ZERO_TOL: f64 = 1e-10;

const RESAMPLE_RETRIES: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    ProvenZero,
    NumericallyZero,
    NonZero(Box<Witness>),
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, Verdict::NonZero(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::ProvenZero => "proven-zero",
            Verdict::NumericallyZero => "numeric-zero",
            Verdict::NonZero(_) => "nonzero",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub value: f64,
    pub seed_index: u32,
    pub assignments: Vec<(String, f64)>,
}

/// Zero test with the default seed stream.
pub fn is_zero(e: &Expr, seeds: u32) -> Verdict {
    is_zero_seeded(e, seeds, 0)
}

/// ProvenZero iff the canonical form is the zero expression; otherwise the
/// expression is evaluated at `seeds` random admissible points. Sample
/// points that leave the domain (logarithms of negative draws, vanishing
/// denominators) are resampled a bounded number of times.
pub fn is_zero_seeded(e: &Expr, seeds: u32, base_seed: u64) -> Verdict {
    if e.is_zero_expr() {
        return Verdict::ProvenZero;
    }
    for s in 0..seeds {
        let mut outcome: Option<(f64, f64, RandomAtomEnv)> = None;
        for retry in 0..RESAMPLE_RETRIES {
            let mut env = RandomAtomEnv::new(
                base_seed ^ 0x9e37_79b9_7f4a_7c15,
                (s as u64) << 8 | retry as u64,
            );
            match eval_with_mag(e, &mut env) {
                Ok((v, m)) => {
                    outcome = Some((v, m, env));
                    break;
                }
                Err(ExprError::EvalDomain { .. }) => continue,
                Err(_) => continue,
            }
        }
        let (v, m, env) = match outcome {
            Some(x) => x,
            // all retries left the domain: treat as inconclusive seed
            None => continue,
        };
        let scaled = v / m.max(1.0);
        if fmath::abs(scaled) >= ZERO_TOL {
            return Verdict::NonZero(Box::new(Witness {
                value: v,
                seed_index: s,
                assignments: env.assignments(),
            }));
        }
    }
    Verdict::NumericallyZero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn structural_zero_is_proven() {
        let e = parse("(u+v)^2 - u^2 - 2*u*v - v^2").unwrap();
        assert_eq!(is_zero(&e, 20), Verdict::ProvenZero);
    }

    #[test]
    fn nonzero_gets_a_witness() {
        let e = parse("u*v - 1").unwrap();
        match is_zero(&e, 20) {
            Verdict::NonZero(w) => {
                assert!(w.value.abs() > 1e-10);
                assert!(!w.assignments.is_empty());
            }
            other => panic!("expected NonZero, got {:?}", other),
        }
    }

    #[test]
    fn pythagorean_zero() {
        let e = parse("sin(z)^2 + cos(z)^2 - 1").unwrap();
        assert_eq!(is_zero(&e, 10), Verdict::ProvenZero);
    }

    #[test]
    fn transcendental_zero_numerically() {
        // arctan has no rewrite towards sin/cos, so this identity is only
        // numerically certifiable: sin(arctan(q))^2 = q^2/(1+q^2)
        let e = parse("sin(arctan(v/u))^2 - (v/u)^2/(1 + (v/u)^2)").unwrap();
        let verdict = is_zero(&e, 20);
        assert!(verdict.is_zero(), "got {:?}", verdict);
    }

    #[test]
    fn laplace_constraint_proves() {
        // Δpsi_kappa - kappa psi_kappa at m = 2
        let e = parse("Psi2_x1x1(kappa) + Psi2_x2x2(kappa) - kappa*Psi2(kappa)").unwrap();
        assert_eq!(is_zero(&e, 10), Verdict::ProvenZero);
    }
}
