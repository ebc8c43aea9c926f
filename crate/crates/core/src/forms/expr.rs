//! Canonical polynomials over transcendental atoms.
//!
//! A `Poly` is a finite sum of rational multiples of monomials; a monomial
//! is a product of atom powers. Atoms are coordinates, `exp`/`sin`/`cos` of
//! polynomials, smooth bump and step profiles (and their derivatives), and
//! fiber integrals. Differentiation is the unique derivation extending the
//! rules for atoms, so identities such as `d d = 0` hold exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::smooth;
use crate::lattice::{Int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    R,
    Theta,
}

/// A coordinate. The derived order is the canonical order of differentials:
/// all `dx` first, then `dr_i, dθ_i` per torus index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(usize),
    T(usize, Part),
    /// Integration variable of an enclosing fiber integral.
    Bound(usize),
}

impl Var {
    pub fn x(j: usize) -> Var {
        Var::X(j)
    }

    pub fn r(i: usize) -> Var {
        Var::T(i, Part::R)
    }

    pub fn theta(i: usize) -> Var {
        Var::T(i, Part::Theta)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(j) => write!(f, "x{}", j + 1),
            Var::T(i, Part::R) => write!(f, "r{}", i + 1),
            Var::T(i, Part::Theta) => write!(f, "th{}", i + 1),
            Var::Bound(k) => write!(f, "s{}", k + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Profile {
    /// Smooth bump supported on `[a, b]` with integral 1.
    Bump,
    /// Smooth step, 1 below `a` and 0 above `b`.
    Step,
}

/// Domain of a fiber-integration variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    /// Real line coordinate `x`.
    Line,
    /// Radial torus coordinate `r`, over the whole line.
    Radial,
    /// Angular coordinate on `[0, 2π)`.
    Circle,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiberIntegral {
    /// Integrand in the free coordinates and `Bound(k)` for `k < domains.len()`.
    pub integrand: Poly,
    pub domains: Vec<Domain>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Var(Var),
    Exp(Box<Poly>),
    Sin(Box<Poly>),
    Cos(Box<Poly>),
    Smooth { profile: Profile, a: Rat, b: Rat, order: u32, arg: Box<Poly> },
    Fiber(Box<FiberIntegral>),
}

/// Product of atom powers; the empty product is 1.
pub type Monomial = BTreeMap<Atom, u32>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

/// Values of all coordinates at one point.
#[derive(Clone, Debug, Default)]
pub struct Point {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub bound: Vec<f64>,
}

impl Point {
    pub fn zeros(n: usize, m: usize) -> Self {
        Point { x: vec![0.0; n], r: vec![0.0; m], theta: vec![0.0; m], bound: Vec::new() }
    }

    pub fn get(&self, v: Var) -> f64 {
        let slot = match v {
            Var::X(j) => self.x.get(j),
            Var::T(i, Part::R) => self.r.get(i),
            Var::T(i, Part::Theta) => self.theta.get(i),
            Var::Bound(k) => self.bound.get(k),
        };
        slot.copied().unwrap_or(f64::NAN)
    }

    pub fn set(&mut self, v: Var, value: f64) {
        let slot = match v {
            Var::X(j) => &mut self.x[j],
            Var::T(i, Part::R) => &mut self.r[i],
            Var::T(i, Part::Theta) => &mut self.theta[i],
            Var::Bound(k) => &mut self.bound[k],
        };
        *slot = value;
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn integer(n: i64) -> Self {
        Poly::constant(Rat::from_integer(Int::from(n)))
    }

    pub fn atom(a: Atom) -> Self {
        let mut m = Monomial::new();
        m.insert(a, 1);
        let mut p = Poly::zero();
        p.terms.insert(m, Rat::one());
        p
    }

    pub fn var(v: Var) -> Self {
        Poly::atom(Atom::Var(v))
    }

    pub fn exp(arg: Poly) -> Self {
        if arg.is_zero() {
            return Poly::one();
        }
        Poly::atom(Atom::Exp(Box::new(arg)))
    }

    pub fn sin(arg: Poly) -> Self {
        if arg.is_zero() {
            return Poly::zero();
        }
        Poly::atom(Atom::Sin(Box::new(arg)))
    }

    pub fn cos(arg: Poly) -> Self {
        if arg.is_zero() {
            return Poly::one();
        }
        Poly::atom(Atom::Cos(Box::new(arg)))
    }

    pub fn smooth(profile: Profile, a: Rat, b: Rat, order: u32, arg: Poly) -> Self {
        Poly::atom(Atom::Smooth { profile, a, b, order, arg: Box::new(arg) })
    }

    pub fn bump(a: Rat, b: Rat, arg: Poly) -> Self {
        Poly::smooth(Profile::Bump, a, b, 0, arg)
    }

    pub fn step(a: Rat, b: Rat, arg: Poly) -> Self {
        Poly::smooth(Profile::Step, a, b, 0, arg)
    }

    pub fn fiber(integrand: Poly, domains: Vec<Domain>) -> Self {
        if integrand.is_zero() {
            return Poly::zero();
        }
        Poly::atom(Atom::Fiber(Box::new(FiberIntegral { integrand, domains })))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is a rational constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::new()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn from_monomial(m: Monomial, c: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (a, k) in m2 {
                    *m.entry(a.clone()).or_insert(0) += k;
                }
                out.add_term(merge_exponentials(m), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Partial derivative with respect to a free coordinate.
    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (a, &k) in m {
                let da = atom_derivative(a, v);
                if da.is_zero() {
                    continue;
                }
                let mut rest = m.clone();
                if k == 1 {
                    rest.remove(a);
                } else {
                    rest.insert(a.clone(), k - 1);
                }
                let coeff = c * Rat::from_integer(Int::from(k));
                out = out.add(&Poly::from_monomial(rest, coeff).mul(&da));
            }
        }
        out
    }

    /// Replaces free coordinates by polynomials; `None` keeps a coordinate.
    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (a, &k) in m {
                term = term.mul(&substitute_atom(a, f).pow(k));
            }
            out = out.add(&term);
        }
        out
    }

    /// Free coordinates occurring anywhere (bound variables excluded).
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for a in m.keys() {
                out.extend(atom_vars(a));
            }
        }
        out
    }

    /// Bound variables occurring outside fiber integrals.
    pub fn bound_vars(&self) -> BTreeSet<usize> {
        self.all_vars().into_iter().filter_map(|v| if let Var::Bound(k) = v { Some(k) } else { None }).collect()
    }

    fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for a in m.keys() {
                match a {
                    Atom::Var(v) => {
                        out.insert(*v);
                    }
                    Atom::Exp(p) | Atom::Sin(p) | Atom::Cos(p) => out.extend(p.all_vars()),
                    Atom::Smooth { arg, .. } => out.extend(arg.all_vars()),
                    Atom::Fiber(fi) => {
                        out.extend(fi.integrand.all_vars().into_iter().filter(|v| !matches!(v, Var::Bound(_))))
                    }
                }
            }
        }
        out
    }

    pub fn contains_fiber(&self) -> bool {
        self.terms.keys().any(|m| m.keys().any(|a| matches!(a, Atom::Fiber(_))))
    }

    pub fn eval(&self, p: &Point) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let factors = m.iter().map(|(a, &k)| eval_atom(a, p).powi(k as i32));
                c.to_f64().unwrap_or(f64::NAN) * product(factors)
            })
            .sum()
    }
}

impl Atom {
    /// Free coordinates the atom depends on.
    pub fn vars(&self) -> BTreeSet<Var> {
        atom_vars(self)
    }

    pub fn eval(&self, p: &Point) -> f64 {
        eval_atom(self, p)
    }
}

/// Product that is zero as soon as one factor is exactly zero, even if
/// another factor has overflowed.
pub fn product(factors: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = 1.0;
    let mut infinite = false;
    for f in factors {
        if f == 0.0 {
            return 0.0;
        }
        if f.is_infinite() {
            infinite = true;
        }
        acc *= f;
    }
    if infinite && acc.is_nan() {
        f64::NAN
    } else {
        acc
    }
}

fn atom_vars(a: &Atom) -> BTreeSet<Var> {
    match a {
        Atom::Var(v @ (Var::X(_) | Var::T(..))) => [*v].into_iter().collect(),
        Atom::Var(Var::Bound(_)) => BTreeSet::new(),
        Atom::Exp(p) | Atom::Sin(p) | Atom::Cos(p) => p.vars(),
        Atom::Smooth { arg, .. } => arg.vars(),
        Atom::Fiber(fi) => fi.integrand.vars(),
    }
}

/// Rewrites `exp(p)^j exp(q)^k` as `exp(j p + k q)`, so a monomial holds at
/// most one exponential and evaluation never multiplies an overflowing
/// factor by a vanishing one.
fn merge_exponentials(m: Monomial) -> Monomial {
    let exps = m.keys().filter(|a| matches!(a, Atom::Exp(_))).count();
    if exps == 0 || exps == 1 && m.iter().all(|(a, &k)| !matches!(a, Atom::Exp(_)) || k == 1) {
        return m;
    }
    let mut arg = Poly::zero();
    let mut rest = Monomial::new();
    for (a, k) in m {
        match a {
            Atom::Exp(p) => arg = arg.add(&p.scale(&Rat::from_integer(Int::from(k)))),
            other => {
                rest.insert(other, k);
            }
        }
    }
    if !arg.is_zero() {
        rest.insert(Atom::Exp(Box::new(arg)), 1);
    }
    rest
}

fn atom_derivative(a: &Atom, v: Var) -> Poly {
    match a {
        Atom::Var(w) => {
            if *w == v {
                Poly::one()
            } else {
                Poly::zero()
            }
        }
        Atom::Exp(p) => Poly::atom(a.clone()).mul(&p.derivative(v)),
        Atom::Sin(p) => Poly::cos((**p).clone()).mul(&p.derivative(v)),
        Atom::Cos(p) => Poly::sin((**p).clone()).neg().mul(&p.derivative(v)),
        Atom::Smooth { profile, a: lo, b: hi, order, arg } => {
            let inner = arg.derivative(v);
            if inner.is_zero() {
                return Poly::zero();
            }
            Poly::smooth(*profile, lo.clone(), hi.clone(), order + 1, (**arg).clone()).mul(&inner)
        }
        Atom::Fiber(fi) => Poly::fiber(fi.integrand.derivative(v), fi.domains.clone()),
    }
}

fn substitute_atom(a: &Atom, f: &dyn Fn(Var) -> Option<Poly>) -> Poly {
    match a {
        Atom::Var(v @ (Var::X(_) | Var::T(..))) => f(*v).unwrap_or_else(|| Poly::var(*v)),
        Atom::Var(v) => Poly::var(*v),
        Atom::Exp(p) => Poly::exp(p.substitute(f)),
        Atom::Sin(p) => Poly::sin(p.substitute(f)),
        Atom::Cos(p) => Poly::cos(p.substitute(f)),
        Atom::Smooth { profile, a, b, order, arg } => {
            Poly::smooth(*profile, a.clone(), b.clone(), *order, arg.substitute(f))
        }
        Atom::Fiber(fi) => Poly::fiber(fi.integrand.substitute(f), fi.domains.clone()),
    }
}

fn eval_atom(a: &Atom, p: &Point) -> f64 {
    match a {
        Atom::Var(v) => p.get(*v),
        Atom::Exp(q) => q.eval(p).exp(),
        Atom::Sin(q) => q.eval(p).sin(),
        Atom::Cos(q) => q.eval(p).cos(),
        Atom::Smooth { profile, a, b, order, arg } => {
            let (a, b) = (a.to_f64().unwrap_or(f64::NAN), b.to_f64().unwrap_or(f64::NAN));
            let t = arg.eval(p);
            match profile {
                Profile::Bump => smooth::bump_derivative(a, b, *order, t),
                Profile::Step => smooth::step_derivative(a, b, *order, t),
            }
        }
        Atom::Fiber(fi) => super::quad::fiber_value(fi, p),
    }
}

fn fmt_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(v) => write!(f, "{v}"),
            Atom::Exp(p) => write!(f, "exp({p})"),
            Atom::Sin(p) => write!(f, "sin({p})"),
            Atom::Cos(p) => write!(f, "cos({p})"),
            Atom::Smooth { profile, a, b, order, arg } => {
                let name = match profile {
                    Profile::Bump => "bump",
                    Profile::Step => "step",
                };
                let primes = "'".repeat(*order as usize);
                write!(f, "{name}{primes}({}, {}, {arg})", fmt_rat(a), fmt_rat(b))
            }
            Atom::Fiber(fi) => write!(f, "fiber[{:?}]({})", fi.domains, fi.integrand),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = m
                .iter()
                .map(|(a, &k)| if k == 1 { a.to_string() } else { format!("{a}^{k}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", fmt_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "({})*{}", fmt_rat(&mag), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn r() -> Poly {
        Poly::var(Var::r(0))
    }

    fn x() -> Poly {
        Poly::var(Var::x(0))
    }

    #[test]
    fn canonical_arithmetic() {
        let p = r().add(&x()).pow(2);
        let q = r().pow(2).add(&r().mul(&x()).scale(&rat(2))).add(&x().pow(2));
        assert_eq!(p, q);
        assert!(p.sub(&q).is_zero());
    }

    #[test]
    fn mixed_partials_commute() {
        let f = Poly::exp(r().mul(&x())).mul(&Poly::sin(x())).add(&Poly::bump(rat(0), rat(1), r().add(&x())));
        let a = f.derivative(Var::r(0)).derivative(Var::x(0));
        let b = f.derivative(Var::x(0)).derivative(Var::r(0));
        assert_eq!(a, b);
    }

    #[test]
    fn evaluation() {
        let f = Poly::exp(r()).mul(&x());
        let mut p = Point::zeros(1, 1);
        p.x[0] = 2.0;
        p.r[0] = 1.0;
        assert!((f.eval(&p) - 2.0 * 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn substitution_is_a_ring_map() {
        let f = Poly::cos(r().pow(2)).mul(&r());
        let sub = |v: Var| (v == Var::r(0)).then(|| r().scale(&rat(2)).add(&Poly::var(Var::r(1))));
        let lhs = f.mul(&f).substitute(&sub);
        let rhs = f.substitute(&sub).mul(&f.substitute(&sub));
        assert_eq!(lhs, rhs);
    }
}
