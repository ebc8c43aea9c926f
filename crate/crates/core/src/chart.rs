//! Cohomology of a single chart `R^n x T^m_P`.
//!
//! `H^*` is the exterior algebra on the angular one-forms that annihilate the
//! unbounded span of `P`; there are `m - k` of them, `k` being the rank of
//! that span. The compactly supported cohomology is its dual, shifted to the
//! top degrees. Generators are fixed through the Smith form of the ray
//! matrix, so two runs always produce the same basis.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{dot_int, Int, IntegerMatrix, Polytope, QMatrix, Rat, Saturation};

#[derive(Clone, PartialEq, Eq)]
pub struct ChartSignature {
    pub n: usize,
    pub polytope: Polytope,
}

impl ChartSignature {
    pub fn new(n: usize, polytope: Polytope) -> Self {
        ChartSignature { n, polytope }
    }

    /// Torus rank `m`.
    pub fn m(&self) -> usize {
        self.polytope.ambient_dim()
    }

    /// Real dimension `n + 2m`.
    pub fn total_dim(&self) -> usize {
        self.n + 2 * self.m()
    }
}

impl fmt::Debug for ChartSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart(n={}, {:?})", self.n, self.polytope)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `q`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < q - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q <= n {
        go(0, n, q, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartModel {
    pub signature: ChartSignature,
    /// Rank of the unbounded span.
    pub k: usize,
    pub span: Saturation,
}

impl ChartModel {
    /// Integer covectors labelling the `dθ` generators of `H^1`.
    pub fn generators(&self) -> Vec<Vec<Int>> {
        self.span.annihilator_basis()
    }

    pub fn h1_dim(&self) -> usize {
        self.signature.m() - self.k
    }

    /// `b_j = C(m - k, j)`.
    pub fn betti(&self, j: usize) -> usize {
        binomial(self.h1_dim(), j)
    }

    /// Betti numbers `b_0 ..= b_{m-k}`.
    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..=self.h1_dim()).map(|j| self.betti(j)).collect()
    }

    /// Betti numbers padded with zeros to `b_0 ..= b_N`.
    pub fn betti_padded(&self) -> Vec<usize> {
        (0..=self.signature.total_dim()).map(|j| self.betti(j)).collect()
    }
}

pub fn chart_cohomology(sig: &ChartSignature) -> Result<ChartModel> {
    let span = sig.polytope.unbounded_span()?;
    Ok(ChartModel { signature: sig.clone(), k: span.rank, span })
}

/// One generator `f*α0 ∧ dθ_1..dθ_k ∧ β` of the compact model; `beta`
/// lists which surviving `H^1` generators enter `β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactGenerator {
    pub degree: usize,
    pub beta: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactModel {
    pub chart: ChartModel,
    /// `c_0 ..= c_N`.
    pub dims: Vec<usize>,
}

impl CompactModel {
    /// Lowest degree with a nonzero class: `n + m + k`.
    pub fn lowest_degree(&self) -> usize {
        let sig = &self.chart.signature;
        sig.n + sig.m() + self.chart.k
    }

    pub fn generators(&self) -> Vec<CompactGenerator> {
        let free = self.chart.h1_dim();
        (0..=free)
            .flat_map(|q| {
                let base = self.lowest_degree();
                combinations(free, q).into_iter().map(move |beta| CompactGenerator { degree: base + q, beta })
            })
            .collect()
    }
}

/// Fails unless the polytope is complete and contains no line.
pub fn require_duality(p: &Polytope) -> Result<()> {
    if !p.is_complete() {
        return Err(Error::DualityUnavailable("polytope has an open face".into()));
    }
    if p.contains_lines() {
        return Err(Error::DualityUnavailable("polytope contains a line".into()));
    }
    Ok(())
}

pub fn chart_compact_cohomology(sig: &ChartSignature) -> Result<CompactModel> {
    require_duality(&sig.polytope)?;
    let chart = chart_cohomology(sig)?;
    let n_top = sig.total_dim();
    let dims = (0..=n_top).map(|j| chart.betti(n_top - j)).collect();
    Ok(CompactModel { chart, dims })
}

/// Map on `H^1` models induced by a monomial gluing, plus its exterior powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionMap {
    pub source: ChartModel,
    pub target: ChartModel,
    /// Row `a` expresses the pullback of source `dθ_a` in target `dθ`s.
    pub exponents: IntegerMatrix,
    /// `h1_dim(target) x h1_dim(source)`, acting on coefficient columns.
    pub h1: QMatrix,
}

impl RestrictionMap {
    /// Induced map on `Λ^q`: the `q`-th compound matrix of `h1`.
    pub fn lambda(&self, q: usize) -> QMatrix {
        compound(&self.h1, q)
    }
}

/// `q`-th compound matrix: minors indexed by lexicographic `q`-subsets.
pub fn compound(m: &QMatrix, q: usize) -> QMatrix {
    let rows = combinations(m.rows(), q);
    let cols = combinations(m.cols(), q);
    let mut out = QMatrix::zeros(rows.len(), cols.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            out.set(i, j, m.select_rows(r).select_cols(c).determinant());
        }
    }
    out
}

pub fn restriction_map(source: &ChartModel, target: &ChartModel, exponents: &IntegerMatrix) -> Result<RestrictionMap> {
    let (ms, mt) = (source.signature.m(), target.signature.m());
    if exponents.shape() != (ms, mt) {
        return Err(Error::ShapeError { expected: (ms, mt), found: exponents.shape() });
    }
    for v in target.span.lattice_basis() {
        let image: Vec<Int> = (0..ms).map(|a| dot_int(exponents.row(a), &v)).collect();
        if !source.span.contains(&image) {
            return Err(Error::GluingError(format!(
                "unbounded direction {:?} of the target maps outside the source's unbounded span",
                v
            )));
        }
    }
    if !target.signature.polytope.image(exponents).is_subset_of(&source.signature.polytope) {
        return Err(Error::GluingError("target polytope does not map into the source polytope".into()));
    }
    let tgt_dim = target.h1_dim();
    let src_gens = source.generators();
    let mut h1 = QMatrix::zeros(tgt_dim, src_gens.len());
    for (i, c) in src_gens.iter().enumerate() {
        let pulled: Vec<Int> = (0..mt).map(|b| (0..ms).fold(Int::zero(), |acc, a| acc + &c[a] * exponents.get(a, b))).collect();
        let coords = target.span.covector_coordinates(&pulled);
        debug_assert!(coords[..target.k].iter().all(Zero::is_zero));
        for j in 0..tgt_dim {
            h1.set(j, i, Rat::from_integer(coords[target.k + j].clone()));
        }
    }
    Ok(RestrictionMap { source: source.clone(), target: target.clone(), exponents: exponents.clone(), h1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{rat, Inequality};

    fn chart(n: usize, bounds: &[(i64, Option<i64>)]) -> ChartSignature {
        ChartSignature::new(n, Polytope::product_of_intervals(bounds))
    }

    fn point(m: usize) -> Polytope {
        let mut ineqs = Vec::new();
        for i in 0..m {
            let mut a = vec![0; m];
            a[i] = 1;
            ineqs.push(Inequality::new(&a, rat(0)));
            a[i] = -1;
            ineqs.push(Inequality::new(&a, rat(0)));
        }
        Polytope::new(m, ineqs)
    }

    #[test]
    fn interval_chart_is_like_c_star() {
        let m = chart_cohomology(&chart(0, &[(0, Some(1))])).unwrap();
        assert_eq!(m.betti_numbers(), vec![1, 1]);
    }

    #[test]
    fn ray_chart_is_contractible() {
        let m = chart_cohomology(&chart(2, &[(0, None)])).unwrap();
        assert_eq!(m.k, 1);
        assert_eq!(m.betti_numbers(), vec![1]);
    }

    #[test]
    fn ray_times_interval() {
        let m = chart_cohomology(&chart(0, &[(0, None), (0, Some(1))])).unwrap();
        assert_eq!(m.k, 1);
        assert_eq!(m.betti_numbers(), vec![1, 1]);
        assert_eq!(m.generators(), vec![vec![Int::from(0), Int::from(1)]]);
    }

    #[test]
    fn compact_models() {
        let c = chart_compact_cohomology(&chart(0, &[(0, None)])).unwrap();
        assert_eq!(c.dims, vec![0, 0, 1]);
        assert_eq!(c.lowest_degree(), 2);
        let c = chart_compact_cohomology(&chart(0, &[(0, Some(1))])).unwrap();
        assert_eq!(c.dims, vec![0, 1, 1]);
        let c = chart_compact_cohomology(&chart(1, &[(0, None)])).unwrap();
        assert_eq!(c.dims, vec![0, 0, 0, 1]);
        assert_eq!(c.generators().len(), 1);
    }

    #[test]
    fn lines_block_duality() {
        let sig = ChartSignature::new(0, Polytope::whole_space(1));
        assert!(matches!(chart_compact_cohomology(&sig), Err(Error::DualityUnavailable(_))));
        let open = ChartSignature::new(0, Polytope::new(1, vec![Inequality::open(&[1], rat(0))]));
        assert!(matches!(chart_compact_cohomology(&open), Err(Error::DualityUnavailable(_))));
    }

    #[test]
    fn identity_restriction() {
        let m = chart_cohomology(&chart(0, &[(0, Some(1)), (0, Some(1))])).unwrap();
        let r = restriction_map(&m, &m, &IntegerMatrix::identity(2)).unwrap();
        for q in 0..=2 {
            assert_eq!(r.lambda(q), QMatrix::identity(binomial(2, q)));
        }
    }

    #[test]
    fn ray_to_point_is_zero_on_h1() {
        let src = chart_cohomology(&chart(0, &[(0, None)])).unwrap();
        let tgt = chart_cohomology(&ChartSignature::new(0, point(1))).unwrap();
        let r = restriction_map(&src, &tgt, &IntegerMatrix::identity(1)).unwrap();
        assert_eq!((r.h1.rows(), r.h1.cols()), (1, 0));
        assert_eq!(r.lambda(0), QMatrix::identity(1));
    }

    #[test]
    fn shear_is_invertible() {
        let src = chart_cohomology(&ChartSignature::new(0, point(2))).unwrap();
        let r = restriction_map(&src, &src, &IntegerMatrix::from_rows(&[[1, 1], [0, 1]])).unwrap();
        assert_eq!(r.h1.determinant(), rat(1));
        assert_eq!(r.lambda(2).determinant(), rat(1));
    }

    #[test]
    fn errors() {
        let src = chart_cohomology(&ChartSignature::new(0, point(1))).unwrap();
        let tgt = chart_cohomology(&chart(0, &[(0, None)])).unwrap();
        assert!(matches!(
            restriction_map(&src, &tgt, &IntegerMatrix::identity(2)),
            Err(Error::ShapeError { .. })
        ));
        // a ray cannot restrict into a chart whose span is trivial
        assert!(matches!(
            restriction_map(&src, &tgt, &IntegerMatrix::identity(1)),
            Err(Error::GluingError(_))
        ));
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(1, 2).is_empty());
    }
}
