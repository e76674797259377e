//! Atoms: the indeterminates of the polynomial layer.
//!
//! An expression is a rational function over these atoms with exact rational
//! coefficients. Elementary functions and opaque functions are atoms keyed by
//! their (canonical) argument expression, so structural equality of atoms is
//! semantic equality of the kernels.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use super::Expr;

/// Interned-ish symbol name (parameters, opaque function names).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Self {
        Sym(Arc::from(s))
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl From<String> for Sym {
    fn from(s: String) -> Self {
        Sym(Arc::from(s.as_str()))
    }
}

/// Sorted spatial derivative multi-index, at most [`MAX_JET_ORDER`] entries.
/// Axes are 0-based (axis 0 is `x1`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct SpatialIdx {
    len: u8,
    axes: [u8; MAX_JET_ORDER],
}

/// Hard cap on derivative order inside the engine. Public total derivatives
/// cap at 2; the prolongation pipeline internally uses up to 4 and asserts
/// that everything of order > 2 cancels.
pub const MAX_JET_ORDER: usize = 4;

impl SpatialIdx {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(axis: u8) -> Self {
        let mut s = Self::default();
        s.axes[0] = axis;
        s.len = 1;
        s
    }

    pub fn pair(a: u8, b: u8) -> Self {
        let mut s = Self::single(a);
        s = s.push(b).expect("order 2 fits");
        s
    }

    pub fn order(&self) -> usize {
        self.len as usize
    }

    pub fn axes(&self) -> &[u8] {
        &self.axes[..self.len as usize]
    }

    /// Insert one more axis keeping the index sorted; `None` when the order
    /// cap is exceeded.
    pub fn push(mut self, axis: u8) -> Option<Self> {
        if (self.len as usize) >= MAX_JET_ORDER {
            return None;
        }
        let mut i = self.len as usize;
        self.axes[i] = axis;
        // insertion sort step
        while i > 0 && self.axes[i - 1] > self.axes[i] {
            self.axes.swap(i - 1, i);
            i -= 1;
        }
        self.len += 1;
        Some(self)
    }

    pub fn count_axis(&self, axis: u8) -> usize {
        self.axes().iter().filter(|&&a| a == axis).count()
    }

    /// Remove two occurrences of `axis`; caller must have checked the count.
    pub fn remove_pair(mut self, axis: u8) -> Self {
        let mut removed = 0;
        let mut out = [0u8; MAX_JET_ORDER];
        let mut n = 0;
        for &a in self.axes() {
            if a == axis && removed < 2 {
                removed += 1;
            } else {
                out[n] = a;
                n += 1;
            }
        }
        debug_assert_eq!(removed, 2);
        self.axes = out;
        self.len = n as u8;
        self
    }

    pub fn max_axis(&self) -> Option<u8> {
        if self.len == 0 {
            None
        } else {
            Some(self.axes[self.len as usize - 1])
        }
    }
}

/// A jet variable: `comp` selects u (0) or v (1); `dt` is the t-derivative
/// order (0 or 1); `dx` the spatial multi-index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Jet {
    pub comp: u8,
    pub dt: u8,
    pub dx: SpatialIdx,
}

impl Jet {
    pub fn base(comp: u8) -> Self {
        Jet {
            comp,
            dt: 0,
            dx: SpatialIdx::empty(),
        }
    }

    pub fn dt(comp: u8) -> Self {
        Jet {
            comp,
            dt: 1,
            dx: SpatialIdx::empty(),
        }
    }

    pub fn dx(comp: u8, axis: u8) -> Self {
        Jet {
            comp,
            dt: 0,
            dx: SpatialIdx::single(axis),
        }
    }

    pub fn dxx(comp: u8, a: u8, b: u8) -> Self {
        Jet {
            comp,
            dt: 0,
            dx: SpatialIdx::pair(a, b),
        }
    }

    pub fn order(&self) -> usize {
        self.dt as usize + self.dx.order()
    }
}

/// The indeterminates. Variant order fixes the global atom ordering used for
/// canonical forms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    /// Named symbolic parameter (a, lambda, mu, ...).
    Param(Sym),
    /// Time variable t.
    T,
    /// Spatial variable x_{axis+1}.
    X(u8),
    /// Jet variable.
    Jet(Jet),
    /// Polar radius R = (u^2+v^2)^{1/2}; kept to first power, R^2 expands.
    R,
    /// Polar angle z = arctan(v/u).
    Z,
    Exp(Expr),
    Ln(Expr),
    Sin(Expr),
    Cos(Expr),
    Atan(Expr),
    /// Opaque function atom: `order`-th formal derivative of `name` at `arg`.
    Opaque { name: Sym, order: u8, arg: Expr },
    /// Laplace eigenfunction atom: spatial derivative `dx` of a function
    /// Psi(x) with `ΔPsi = eigen * Psi` in dimension `dim` (0 = unbound).
    Psi { eigen: Expr, dim: u8, dx: SpatialIdx },
}

impl Atom {
    /// Argument expressions directly held by this atom.
    pub fn args(&self) -> impl Iterator<Item = &Expr> {
        let (a, b): (Option<&Expr>, Option<&Expr>) = match self {
            Atom::Exp(e) | Atom::Ln(e) | Atom::Sin(e) | Atom::Cos(e) | Atom::Atan(e) => {
                (Some(e), None)
            }
            Atom::Opaque { arg, .. } => (Some(arg), None),
            Atom::Psi { eigen, .. } => (Some(eigen), None),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }

    /// Atoms whose numeric evaluation is guaranteed positive on the sampling
    /// domain (used by the logarithm product-splitting rewrite). Order-0 jets
    /// qualify because u, v are sampled in (0.1, 2) so that ln R and
    /// z = arctan(v/u) stay well-defined.
    pub fn certified_positive(&self) -> bool {
        match self {
            Atom::Exp(_) | Atom::R => true,
            Atom::Jet(j) => j.order() == 0,
            _ => false,
        }
    }
}
