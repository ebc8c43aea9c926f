//! The integration pairing between chart cohomology and its compact dual.

use std::f64::consts::TAU;

use num_traits::One;

use super::expr::{Poly, Var};
use super::form::FormExpr;
use super::integrate::{integrate, QuadratureOptions};
use crate::chart::{chart_cohomology, combinations, require_duality, ChartModel, ChartSignature};
use crate::lattice::{Int, Rat};
use crate::Result;

fn angular(covector: &[Int]) -> FormExpr {
    covector.iter().enumerate().fold(FormExpr::zero(), |acc, (i, c)| {
        acc.add(&FormExpr::differential(Var::theta(i)).scale(&Rat::from_integer(c.clone())))
    })
}

fn wedge_all(forms: impl IntoIterator<Item = FormExpr>) -> FormExpr {
    forms.into_iter().fold(FormExpr::function(Poly::one()), |acc, f| acc.wedge(&f))
}

/// Closed representative `c_{t_1} ∧ ... ∧ c_{t_j}` of the `H^j` class labelled `subset`.
pub fn cohomology_form(model: &ChartModel, subset: &[usize]) -> FormExpr {
    let gens = model.generators();
    wedge_all(subset.iter().map(|&t| angular(&gens[t])))
}

/// Compactly supported representative labelled by `subset` of the surviving
/// generators: a unit-mass bump in every `x` and `r` direction, the angular
/// forms dual to the unbounded span, then the chosen generators. Its torus
/// volume is normalised away, so it integrates against the complementary
/// closed class to `±1`.
pub fn compact_form(model: &ChartModel, subset: &[usize]) -> FormExpr {
    let sig = &model.signature;
    let bump = |v: Var| {
        FormExpr::function(Poly::bump(Rat::from_integer(0.into()), Rat::one(), Poly::var(v))).wedge(&FormExpr::differential(v))
    };
    let radial = wedge_all((0..sig.n).map(|j| bump(Var::x(j))).chain((0..sig.m()).map(|i| bump(Var::r(i)))));
    let gens = model.generators();
    let span = wedge_all(model.span.span_dual_basis().iter().map(|u| angular(u)));
    let beta = wedge_all(subset.iter().map(|&t| angular(&gens[t])));
    radial.wedge(&span).wedge(&beta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairingMatrix {
    pub degree: usize,
    /// Labels of the `H^j` generators (rows).
    pub rows: Vec<Vec<usize>>,
    /// Labels of the compact generators in degree `N - j` (columns).
    pub cols: Vec<Vec<usize>>,
    pub entries: Vec<Vec<f64>>,
}

impl PairingMatrix {
    /// Rank by partial-pivot elimination, treating pivots below `tol` as zero.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.entries.clone();
        let cols = self.cols.len();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else { break };
            if a[p][c].abs() <= tol {
                continue;
            }
            a.swap(rank, p);
            for r in rank + 1..a.len() {
                let f = a[r][c] / a[rank][c];
                for k in c..cols {
                    a[r][k] -= f * a[rank][k];
                }
            }
            rank += 1;
        }
        rank
    }

    /// Every entry lies within `tol` of `-1`, `0` or `1`.
    pub fn is_signed_unit(&self, tol: f64) -> bool {
        self.entries.iter().flatten().all(|e| [-1.0, 0.0, 1.0].iter().any(|t| (e - t).abs() <= tol))
    }

    pub fn is_nondegenerate(&self, tol: f64) -> bool {
        self.rows.len() == self.cols.len() && self.rank(tol) == self.rows.len()
    }
}

/// Numeric matrix of `∫ a ∧ b` for `a` running over the `H^j` generators and
/// `b` over the compactly supported generators of degree `N - j`. Entries are
/// scaled by `(2π)^{-m}` so that the expected values are `±1`.
pub fn pairing_matrix(sig: &ChartSignature, j: usize, opts: &QuadratureOptions) -> Result<PairingMatrix> {
    require_duality(&sig.polytope)?;
    let model = chart_cohomology(sig)?;
    let free = model.h1_dim();
    let rows = combinations(free, j);
    let cols = if j <= free { combinations(free, free - j) } else { Vec::new() };
    let scale = TAU.powi(sig.m() as i32).recip();
    let mut entries = Vec::with_capacity(rows.len());
    for t in &rows {
        let a = cohomology_form(&model, t);
        let mut row = Vec::with_capacity(cols.len());
        for s in &cols {
            let value = integrate(&a.wedge(&compact_form(&model, s)), sig, opts)?.value;
            row.push(value * scale);
        }
        entries.push(row);
    }
    Ok(PairingMatrix { degree: j, rows, cols, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Polytope;

    #[test]
    fn quadrant_pairing_is_a_signed_permutation() {
        let sig = ChartSignature::new(1, Polytope::product_of_intervals(&[(0, Some(1)), (0, None)]));
        for j in 0..=1 {
            let p = pairing_matrix(&sig, j, &QuadratureOptions::default()).unwrap();
            assert_eq!(p.rows.len(), 1);
            assert!(p.is_signed_unit(1e-6), "{p:?}");
            assert!(p.is_nondegenerate(1e-6));
        }
    }

    #[test]
    fn open_faces_have_no_pairing() {
        let p = Polytope::new(1, vec![crate::lattice::Inequality::open(&[1], crate::lattice::rat(0))]);
        assert!(pairing_matrix(&ChartSignature::new(0, p), 0, &QuadratureOptions::default()).is_err());
    }
}
