//! Sparse multivariate polynomials over the atoms with exact rational
//! coefficients, plus the gcd machinery used to keep rational forms reduced.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::Atom;

pub type Rat = BigRational;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Monomial: product of atoms with positive integer exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono {
    pub factors: BTreeMap<Atom, u32>,
}

impl Mono {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn atom(a: Atom) -> Self {
        let mut m = Self::default();
        m.factors.insert(a, 1);
        m
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = self.clone();
        for (a, e) in &other.factors {
            *out.factors.entry(a.clone()).or_insert(0) += e;
        }
        out
    }

    pub fn pow(&self, k: u32) -> Mono {
        if k == 0 {
            return Mono::one();
        }
        let mut out = self.clone();
        for e in out.factors.values_mut() {
            *e *= k;
        }
        out
    }

    pub fn degree_of(&self, a: &Atom) -> u32 {
        self.factors.get(a).copied().unwrap_or(0)
    }

    pub fn without(&self, a: &Atom) -> Mono {
        let mut out = self.clone();
        out.factors.remove(a);
        out
    }

    /// Try `self / other`; `None` when some exponent would go negative.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = self.clone();
        for (a, e) in &other.factors {
            let slot = out.factors.get_mut(a)?;
            if *slot < *e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                out.factors.remove(a);
            }
        }
        Some(out)
    }

    /// Componentwise minimum (monomial gcd).
    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut out = Mono::one();
        for (a, e) in &self.factors {
            let f = other.degree_of(a);
            let m = (*e).min(f);
            if m > 0 {
                out.factors.insert(a.clone(), m);
            }
        }
        out
    }

    /// Lexicographic monomial order with atoms compared from the largest
    /// down. Multiplicative, so usable for leading-term division.
    pub fn cmp_order(&self, other: &Mono) -> Ordering {
        let mut it_a = self.factors.iter().rev();
        let mut it_b = other.factors.iter().rev();
        loop {
            match (it_a.next(), it_b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((aa, ea)), Some((ab, eb))) => match aa.cmp(ab) {
                    // larger atom present only on one side dominates
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Less => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    },
                },
            }
        }
    }
}

/// Sparse polynomial: monomial -> coefficient, no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::default();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn atom(a: Atom) -> Self {
        let mut p = Self::default();
        p.terms.insert(Mono::atom(a), Rat::one());
        p
    }

    pub fn term(m: Mono, c: Rat) -> Self {
        let mut p = Self::default();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// The constant value when the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Mono::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            out.terms.insert(ma.mul(m), ca.clone());
        }
        out
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut out = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Leading term under the monomial order.
    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().max_by(|a, b| a.0.cmp_order(b.0))
    }

    /// Degree in one atom.
    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_of(a))
            .max()
            .unwrap_or(0)
    }

    /// All atoms appearing (not recursing into atom arguments).
    pub fn atoms(&self) -> Vec<Atom> {
        let mut set: Vec<Atom> = Vec::new();
        for m in self.terms.keys() {
            for a in m.factors.keys() {
                if !set.contains(a) {
                    set.push(a.clone());
                }
            }
        }
        set
    }

    /// Common monomial factor of all terms.
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let mut acc = match it.next() {
            Some(m) => m.clone(),
            None => return Mono::one(),
        };
        for m in it {
            acc = acc.gcd(m);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// Divide out a monomial that divides all terms.
    pub fn div_mono_exact(&self, m: &Mono) -> Poly {
        let mut out = Poly::zero();
        for (ma, c) in &self.terms {
            out.terms
                .insert(ma.div(m).expect("monomial divides"), c.clone());
        }
        out
    }

    /// Exact polynomial division; `None` when not divisible.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&(Rat::one() / c)));
        }
        let (dm, dc) = divisor.leading()?;
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while !rem.is_zero() {
            let (lm, lc) = rem.leading().map(|(m, c)| (m.clone(), c.clone()))?;
            let qm = lm.div(&dm)?;
            let qc = lc / dc.clone();
            let t = Poly::term(qm, qc);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(divisor));
        }
        Some(quot)
    }

    /// Collect as univariate in `main` with polynomial coefficients
    /// (index = degree).
    pub fn as_univariate(&self, main: &Atom) -> Vec<Poly> {
        let d = self.degree_in(main) as usize;
        let mut coeffs = alloc::vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let k = m.degree_of(main) as usize;
            coeffs[k].add_term(m.without(main), c.clone());
        }
        coeffs
    }

    pub fn from_univariate(coeffs: &[Poly], main: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mk = Mono::atom(main.clone()).pow(k as u32);
            out = out.add(&c.mul_mono(&mk));
        }
        out
    }

    /// Normalize so the leading coefficient is one; returns the factor taken
    /// out (`self = factor * monic`).
    pub fn monic(&self) -> (Rat, Poly) {
        match self.leading() {
            None => (Rat::one(), Poly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&(Rat::one() / c)))
            }
        }
    }
}

// --- gcd -------------------------------------------------------------------

/// Size guard: beyond this the gcd falls back to the monomial content, which
/// keeps the representation sound (just less aggressively reduced).
const GCD_TERM_BUDGET: usize = 1200;

/// Multivariate gcd over the rationals: monomial content first, then a
/// primitive subresultant PRS in the largest atom present.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic().1;
    }
    if b.is_zero() {
        return a.monic().1;
    }
    let mca = a.mono_content();
    let mcb = b.mono_content();
    let mc = mca.gcd(&mcb);
    let a1 = a.div_mono_exact(&mca);
    let b1 = b.div_mono_exact(&mcb);
    let core = if a1.terms.len() * b1.terms.len() > GCD_TERM_BUDGET {
        Poly::one()
    } else {
        gcd_inner(&a1, &b1)
    };
    core.mul_mono(&mc).monic().1
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    // choose the largest atom appearing in either
    let main = {
        let mut best: Option<Atom> = None;
        for at in a.atoms().into_iter().chain(b.atoms()) {
            best = Some(match best {
                None => at,
                Some(cur) => {
                    if at > cur {
                        at
                    } else {
                        cur
                    }
                }
            });
        }
        match best {
            Some(m) => m,
            None => return Poly::one(),
        }
    };
    let ua = a.as_univariate(&main);
    let ub = b.as_univariate(&main);
    if ua.len() == 1 || ub.len() == 1 {
        // one of them is free of the main atom: gcd divides its content
        let ca = content(&ua);
        let cb = content(&ub);
        return gcd_inner(&ca, &cb);
    }
    let ca = content(&ua);
    let cb = content(&ub);
    let d = gcd_inner(&ca, &cb);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);
    let prs = primitive_prs(pa, pb);
    let g = Poly::from_univariate(&prs, &main);
    g.mul(&d).monic().1
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        acc = if acc.is_zero() {
            c.monic().1
        } else {
            gcd_with_mono(&acc, c)
        };
        if acc.is_one() {
            break;
        }
    }
    if acc.is_zero() {
        Poly::one()
    } else {
        acc
    }
}

fn gcd_with_mono(a: &Poly, b: &Poly) -> Poly {
    let mca = a.mono_content();
    let mcb = b.mono_content();
    let mc = mca.gcd(&mcb);
    gcd_inner(&a.div_mono_exact(&mca), &b.div_mono_exact(&mcb)).mul_mono(&mc)
}

fn divide_coeffs(coeffs: &[Poly], d: &Poly) -> Vec<Poly> {
    coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                Poly::zero()
            } else {
                c.div_exact(d).expect("content divides")
            }
        })
        .collect()
}

fn deg(u: &[Poly]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

/// Primitive PRS for univariate polynomials with polynomial coefficients.
fn primitive_prs(mut f: Vec<Poly>, mut g: Vec<Poly>) -> Vec<Poly> {
    loop {
        let dg = match deg(&g) {
            None => {
                // gcd is pp(f)
                let c = content(&f);
                return divide_coeffs(&f, &c);
            }
            Some(d) => d,
        };
        let df = match deg(&f) {
            None => {
                let c = content(&g);
                return divide_coeffs(&g, &c);
            }
            Some(d) => d,
        };
        if df < dg {
            core::mem::swap(&mut f, &mut g);
            continue;
        }
        if dg == 0 {
            // nontrivial constant (in main atom) divisor: gcd of contents only
            return alloc::vec![Poly::one()];
        }
        let r = pseudo_rem(&f, &g);
        let c = content(&r);
        f = g;
        g = divide_coeffs(&r, &c);
    }
}

/// Pseudo-remainder of f by g (univariate, polynomial coefficients).
fn pseudo_rem(f: &[Poly], g: &[Poly]) -> Vec<Poly> {
    let df = deg(f).unwrap();
    let dg = deg(g).unwrap();
    debug_assert!(df >= dg && dg >= 1);
    let lg = g[dg].clone();
    let mut r: Vec<Poly> = f.to_vec();
    while let Some(dr) = deg(&r) {
        if dr < dg {
            break;
        }
        let lr = r[dr].clone();
        // r = lg*r - lr * g * x^(dr-dg)
        for c in r.iter_mut() {
            *c = c.mul(&lg);
        }
        for (i, gc) in g.iter().enumerate() {
            if gc.is_zero() {
                continue;
            }
            let idx = i + dr - dg;
            let sub = gc.mul(&lr);
            r[idx] = r[idx].sub(&sub);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pvar(name: &str) -> Poly {
        Poly::atom(Atom::Param(name.into()))
    }

    #[test]
    fn mono_order_is_multiplicative() {
        let x = Mono::atom(Atom::Param("x".into()));
        let y = Mono::atom(Atom::Param("y".into()));
        assert_eq!(x.cmp_order(&y), Ordering::Less);
        // x*x vs x*y must preserve the order
        assert_eq!(x.mul(&x).cmp_order(&x.mul(&y)), Ordering::Less);
    }

    #[test]
    fn gcd_of_common_factor() {
        let x = pvar("x");
        let y = pvar("y");
        // (x+y)^2 * x and (x+y) * y
        let s = x.add(&y);
        let a = s.pow(2).mul(&x);
        let b = s.mul(&y);
        let g = poly_gcd(&a, &b);
        assert_eq!(g, s.monic().1);
    }

    #[test]
    fn div_exact_roundtrip() {
        let x = pvar("x");
        let y = pvar("y");
        let a = x.add(&y).pow(3);
        let b = x.add(&y);
        let q = a.div_exact(&b).unwrap();
        assert_eq!(q.mul(&b), a);
    }

    #[test]
    fn gcd_coprime() {
        let x = pvar("x");
        let y = pvar("y");
        let g = poly_gcd(&x.add(&Poly::one()), &y);
        assert!(g.is_one());
    }
}
