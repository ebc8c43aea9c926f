//! Differential forms with symbolic coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::expr::{Part, Poly, Var};
use crate::lattice::{IntegerMatrix, Rat};
use crate::{Error, Result};

/// Strictly increasing list of coordinates: `d v_1 ∧ ... ∧ d v_k`.
pub type Wedge = Vec<Var>;

/// `Σ f_I dI` with canonical polynomial coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormExpr {
    terms: BTreeMap<Wedge, Poly>,
}

/// Sorts `vars`, returning the permutation sign, or `None` on a repeat.
fn sort_sign(vars: &mut [Var]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..vars.len() {
        let mut j = i;
        while j > 0 && vars[j - 1] > vars[j] {
            vars.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && vars[j - 1] == vars[j] {
            return None;
        }
    }
    Some(sign)
}

impl FormExpr {
    pub fn zero() -> Self {
        FormExpr::default()
    }

    /// The 0-form `f`.
    pub fn function(f: Poly) -> Self {
        FormExpr::term(Wedge::new(), f)
    }

    pub fn differential(v: Var) -> Self {
        FormExpr::term(vec![v], Poly::one())
    }

    /// `f dI`, reordering `dI` and dropping it if a differential repeats.
    pub fn term(mut wedge: Wedge, f: Poly) -> Self {
        let mut out = FormExpr::zero();
        if let Some(sign) = sort_sign(&mut wedge) {
            out.add_term(wedge, if sign < 0 { f.neg() } else { f });
        }
        out
    }

    fn add_term(&mut self, w: Wedge, f: Poly) {
        if f.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&w) {
            Some(g) => g.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(w, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Wedge, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &[Var]) -> Poly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Degrees of the nonzero homogeneous parts.
    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(Vec::len).collect()
    }

    /// The degree if the form is homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let d = self.degrees();
        (d.len() == 1).then(|| *d.iter().next().unwrap())
    }

    /// The coefficient if this is a 0-form.
    pub fn as_function(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        (self.degree() == Some(0)).then(|| self.coefficient(&[]))
    }

    pub fn add(&self, other: &FormExpr) -> FormExpr {
        let mut out = self.clone();
        for (w, f) in &other.terms {
            out.add_term(w.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &FormExpr) -> FormExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FormExpr {
        self.map_coefficients(|f| f.neg())
    }

    pub fn scale(&self, k: &Rat) -> FormExpr {
        self.map_coefficients(|f| f.scale(k))
    }

    /// Multiplication by a function.
    pub fn times(&self, g: &Poly) -> FormExpr {
        self.map_coefficients(|f| f.mul(g))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Poly) -> Poly) -> FormExpr {
        let mut out = FormExpr::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    pub fn wedge(&self, other: &FormExpr) -> FormExpr {
        let mut out = FormExpr::zero();
        for (w1, f1) in &self.terms {
            for (w2, f2) in &other.terms {
                let mut w: Wedge = w1.iter().chain(w2).copied().collect();
                if let Some(sign) = sort_sign(&mut w) {
                    let f = f1.mul(f2);
                    out.add_term(w, if sign < 0 { f.neg() } else { f });
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> FormExpr {
        let mut out = FormExpr::zero();
        for (w, f) in &self.terms {
            for v in f.vars() {
                let df = f.derivative(v);
                out = out.add(&FormExpr::differential(v).wedge(&FormExpr::term(w.clone(), df)));
            }
        }
        out
    }

    /// Contraction with the constant vector field `Σ c_v ∂_v`.
    pub fn interior(&self, field: &[(Var, Rat)]) -> FormExpr {
        let mut out = FormExpr::zero();
        for (w, f) in &self.terms {
            for (v, c) in field {
                if c.is_zero() {
                    continue;
                }
                if let Some(pos) = w.iter().position(|u| u == v) {
                    let mut rest = w.clone();
                    rest.remove(pos);
                    let k = if pos % 2 == 0 { c.clone() } else { -c.clone() };
                    out.add_term(rest, f.scale(&k));
                }
            }
        }
        out
    }

    /// Replaces free coordinates by polynomials inside every coefficient.
    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<Poly>) -> FormExpr {
        self.map_coefficients(|c| c.substitute(f))
    }

    /// Every free coordinate occurring in a differential or a coefficient.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for (w, f) in &self.terms {
            out.extend(w.iter().copied());
            out.extend(f.vars());
        }
        out
    }

    /// Pullback along the monomial map `z ↦ z^A` on torus coordinates:
    /// row `i` of `A` gives `r_i ↦ Σ_j A_ij r_j` and likewise for `θ`.
    /// Real coordinates are unchanged.
    pub fn pullback_monomial(&self, a: &IntegerMatrix) -> Result<FormExpr> {
        for v in self.vars() {
            if let Var::T(i, _) = v {
                if i >= a.rows() {
                    return Err(Error::Form(format!("{v} is outside the {} torus coordinates of the map", a.rows())));
                }
            }
        }
        let image = |i: usize, part: Part| -> Vec<(Var, Rat)> {
            (0..a.cols())
                .filter(|&j| !a.get(i, j).is_zero())
                .map(|j| (Var::T(j, part), Rat::from_integer(a.get(i, j).clone())))
                .collect()
        };
        let linear = |terms: Vec<(Var, Rat)>| {
            terms.into_iter().fold(Poly::zero(), |acc, (v, c)| acc.add(&Poly::var(v).scale(&c)))
        };
        let sub = |v: Var| match v {
            Var::T(i, part) => Some(linear(image(i, part))),
            _ => None,
        };
        let mut out = FormExpr::zero();
        for (w, f) in &self.terms {
            let mut acc = FormExpr::function(f.substitute(&sub));
            for &v in w {
                let dv = match v {
                    Var::T(i, part) => image(i, part)
                        .into_iter()
                        .fold(FormExpr::zero(), |s, (u, c)| s.add(&FormExpr::differential(u).scale(&c))),
                    other => FormExpr::differential(other),
                };
                acc = acc.wedge(&dv);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    pub fn contains_fiber(&self) -> bool {
        self.terms.values().any(Poly::contains_fiber)
    }
}

impl fmt::Display for FormExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let coeff = if c.as_constant().is_some_and(|k| k.is_one()) && !w.is_empty() {
                None
            } else {
                Some(format!("({c})"))
            };
            let diffs: Vec<String> = w.iter().map(|v| format!("d{v}")).collect();
            match (coeff, diffs.is_empty()) {
                (Some(c), true) => write!(f, "{c}")?,
                (Some(c), false) => write!(f, "{c}*{}", diffs.join("^"))?,
                (None, _) => write!(f, "{}", diffs.join("^"))?,
            }
        }
        Ok(())
    }
}
