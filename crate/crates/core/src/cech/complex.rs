use std::fmt;

use num_traits::{One, Zero};

use super::{validate_manifest, CoverManifest, GluingClass, ValidatedManifest};
use crate::chart::{binomial, chart_compact_cohomology, compound};
use crate::error::{Error, Result};
use crate::lattice::{Int, IntegerMatrix};

/// One summand of a total-complex piece: a nerve simplex and a form degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub simplex: Vec<usize>,
    pub degree: usize,
    pub offset: usize,
    pub dim: usize,
}

/// Cochain complex of finite-dimensional spaces with integer differentials,
/// graded from `low`.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub low: i64,
    pub pieces: Vec<Vec<Block>>,
    /// `differentials[i]` maps degree `low + i` to `low + i + 1`.
    pub differentials: Vec<IntegerMatrix>,
    ranks: Vec<usize>,
}

impl TotalComplex {
    fn new(low: i64, pieces: Vec<Vec<Block>>, differentials: Vec<IntegerMatrix>) -> Self {
        let ranks = differentials.iter().map(IntegerMatrix::rational_rank).collect();
        TotalComplex { low, pieces, differentials, ranks }
    }

    pub fn dim(&self, i: usize) -> usize {
        self.pieces[i].iter().map(|b| b.dim).sum()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks.get(i).copied().unwrap_or(0)
    }

    /// `dim ker D_i - rank D_{i-1}` for each stored degree.
    pub fn cohomology(&self) -> Vec<usize> {
        (0..self.pieces.len())
            .map(|i| {
                let incoming = if i == 0 { 0 } else { self.rank(i - 1) };
                self.dim(i) - self.rank(i) - incoming
            })
            .collect()
    }

    /// Whether every composite `D_{i+1} D_i` is the zero matrix.
    pub fn squares_to_zero(&self) -> bool {
        self.differentials.windows(2).all(|w| (&w[1] * &w[0]).is_zero())
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..self.pieces.len())
            .map(|i| {
                let s = if (self.low + i as i64).rem_euclid(2) == 0 { 1 } else { -1 };
                s * self.dim(i) as i64
            })
            .sum()
    }
}

fn layout(groups: Vec<Vec<(Vec<usize>, usize, usize)>>) -> Vec<Vec<Block>> {
    groups
        .into_iter()
        .map(|g| {
            let mut offset = 0;
            g.into_iter()
                .map(|(simplex, degree, dim)| {
                    let b = Block { simplex, degree, offset, dim };
                    offset += dim;
                    b
                })
                .collect()
        })
        .collect()
}

fn sign(k: usize) -> Int {
    if k % 2 == 0 {
        Int::one()
    } else {
        -Int::one()
    }
}

/// Position of the vertex of `simplex` missing from `face`.
fn omitted(face: &[usize], simplex: &[usize]) -> Option<usize> {
    if face.len() + 1 != simplex.len() {
        return None;
    }
    let a = (0..simplex.len()).find(|&a| a == face.len() || face[a] != simplex[a])?;
    (simplex[..a] == face[..a] && simplex[a + 1..] == face[a..]).then_some(a)
}

fn place(d: &mut IntegerMatrix, row0: usize, col0: usize, block: &IntegerMatrix, s: &Int) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let v = block.get(i, j);
            if !v.is_zero() {
                d.set(row0 + i, col0 + j, s * v);
            }
        }
    }
}

fn lambda_integral(v: &ValidatedManifest, face: &[usize], simplex: &[usize], q: usize) -> IntegerMatrix {
    let r = &v.restrictions[&(face.to_vec(), simplex.to_vec())];
    compound(&r.h1, q).to_integer().expect("restriction maps are integral")
}

/// Čech double complex with constant-form coefficients.
pub fn build_total_complex(v: &ValidatedManifest) -> TotalComplex {
    let h1 = |s: &Vec<usize>| v.models[s].h1_dim();
    let top = v
        .simplices
        .iter()
        .enumerate()
        .flat_map(|(p, ss)| ss.iter().map(move |s| p + h1(s)))
        .max()
        .unwrap_or(0);
    let mut groups = vec![Vec::new(); top + 1];
    for (p, ss) in v.simplices.iter().enumerate() {
        for s in ss {
            for q in 0..=h1(s) {
                groups[p + q].push((s.clone(), q, binomial(h1(s), q)));
            }
        }
    }
    let pieces = layout(groups);
    let mut diffs = Vec::new();
    for r in 0..top {
        let (src, dst) = (&pieces[r], &pieces[r + 1]);
        let mut d = IntegerMatrix::zeros(dst.iter().map(|b| b.dim).sum(), src.iter().map(|b| b.dim).sum());
        for b in src {
            for t in dst.iter().filter(|t| t.degree == b.degree) {
                if let Some(a) = omitted(&b.simplex, &t.simplex) {
                    let block = lambda_integral(v, &b.simplex, &t.simplex, b.degree);
                    place(&mut d, t.offset, b.offset, &block, &(sign(a) * sign(b.degree)));
                }
            }
        }
        diffs.push(d);
    }
    TotalComplex::new(0, pieces, diffs)
}

/// Compactly supported counterpart: pieces `H^j_c(U_I)` in total degree
/// `j - p`, extension maps adjoint to the restrictions in degree `N - j`.
pub fn build_compact_complex(v: &ValidatedManifest) -> Result<TotalComplex> {
    let n = v.dimension;
    let mut compact_dims = std::collections::BTreeMap::new();
    for (s, model) in &v.models {
        compact_dims.insert(s.clone(), chart_compact_cohomology(&model.signature)?.dims);
    }
    let pmax = v.simplices.len().saturating_sub(1);
    let low = -(pmax as i64);
    let mut groups = vec![Vec::new(); n + pmax + 1];
    for (p, ss) in v.simplices.iter().enumerate() {
        for s in ss {
            for (j, &c) in compact_dims[s].iter().enumerate() {
                if c > 0 {
                    groups[j + pmax - p].push((s.clone(), j, c));
                }
            }
        }
    }
    let pieces = layout(groups);
    let mut diffs = Vec::new();
    for r in 0..pieces.len().saturating_sub(1) {
        let (src, dst) = (&pieces[r], &pieces[r + 1]);
        let mut d = IntegerMatrix::zeros(dst.iter().map(|b| b.dim).sum(), src.iter().map(|b| b.dim).sum());
        for b in src {
            for t in dst.iter().filter(|t| t.degree == b.degree) {
                if let Some(a) = omitted(&t.simplex, &b.simplex) {
                    let block = lambda_integral(v, &t.simplex, &b.simplex, n - b.degree).transpose();
                    place(&mut d, t.offset, b.offset, &block, &sign(a));
                }
            }
        }
        diffs.push(d);
    }
    Ok(TotalComplex::new(low, pieces, diffs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub dimension: usize,
    pub betti: Vec<usize>,
    pub compact: Option<Vec<usize>>,
}

impl BettiTable {
    /// `betti <deg> <value>` for nonzero entries, then `compact ...` likewise.
    pub fn machine(&self) -> String {
        let mut out = String::new();
        for (j, b) in self.betti.iter().enumerate().filter(|(_, b)| **b != 0) {
            out.push_str(&format!("betti {j} {b}\n"));
        }
        if let Some(c) = &self.compact {
            for (j, b) in c.iter().enumerate().filter(|(_, b)| **b != 0) {
                out.push_str(&format!("compact {j} {b}\n"));
            }
        }
        out
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.betti.len().max(self.compact.as_ref().map_or(0, Vec::len));
        write!(f, "degree ")?;
        for j in 0..width {
            write!(f, "{j:>4}")?;
        }
        write!(f, "\nbetti  ")?;
        for b in &self.betti {
            write!(f, "{b:>4}")?;
        }
        if let Some(c) = &self.compact {
            write!(f, "\ncompact")?;
            for b in c {
                write!(f, "{b:>4}")?;
            }
        }
        writeln!(f, "\ndimension {}", self.dimension)
    }
}

fn supported(m: &CoverManifest) -> Result<()> {
    if m.gluing_class == GluingClass::General {
        return Err(Error::UnsupportedGluing(
            "only quadrant-class and pure-monomial gluing have a constant-form model".into(),
        ));
    }
    Ok(())
}

/// Pads or trims to degrees `0..=n`; anything beyond `n` must vanish.
fn graded(mut values: Vec<usize>, n: usize) -> Vec<usize> {
    debug_assert!(values.iter().skip(n + 1).all(|&b| b == 0));
    values.resize(n + 1, 0);
    values
}

pub fn total_betti(m: &CoverManifest) -> Result<BettiTable> {
    supported(m)?;
    let v = validate_manifest(m)?;
    let c = build_total_complex(&v);
    debug_assert!(c.squares_to_zero());
    Ok(BettiTable { dimension: v.dimension, betti: graded(c.cohomology(), v.dimension), compact: None })
}

fn compact_row(v: &ValidatedManifest) -> Result<Vec<usize>> {
    let c = build_compact_complex(v)?;
    debug_assert!(c.squares_to_zero());
    let h = c.cohomology();
    let skip = (-c.low) as usize;
    debug_assert!(h[..skip].iter().all(|&x| x == 0));
    Ok(graded(h[skip..].to_vec(), v.dimension))
}

/// Betti table with the compact row filled in; the ordinary row is left empty.
pub fn total_compact_betti(m: &CoverManifest) -> Result<BettiTable> {
    supported(m)?;
    let v = validate_manifest(m)?;
    let compact = compact_row(&v)?;
    Ok(BettiTable { dimension: v.dimension, betti: Vec::new(), compact: Some(compact) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub table: BettiTable,
    /// Degrees `j` with `c_j != b_{N-j}`.
    pub violations: Vec<usize>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares `c_j` with `b_{N-j}`.
///
/// The compact complex is assembled from the adjoints of the same
/// restriction maps, so this is a consistency check between two code paths
/// rather than an independent proof of duality.
pub fn pd_symmetry_check(m: &CoverManifest) -> Result<DualityReport> {
    supported(m)?;
    let v = validate_manifest(m)?;
    let c = build_total_complex(&v);
    let betti = graded(c.cohomology(), v.dimension);
    let compact = compact_row(&v)?;
    let n = v.dimension;
    let violations = (0..=n).filter(|&j| compact[j] != betti[n - j]).collect();
    Ok(DualityReport { table: BettiTable { dimension: n, betti, compact: Some(compact) }, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::ChartSignature;
    use crate::lattice::{rat, Inequality, Polytope};

    fn p1_manifest() -> CoverManifest {
        let mut m = CoverManifest::new(GluingClass::PureMonomial);
        let pos = Polytope::new(1, vec![Inequality::new(&[1], rat(0))]);
        let neg = Polytope::new(1, vec![Inequality::new(&[-1], rat(0))]);
        let origin = pos.intersection(&neg);
        let id = IntegerMatrix::identity(1);
        m.add_chart("pos", ChartSignature::new(0, pos));
        m.add_chart("neg", ChartSignature::new(0, neg));
        m.add_overlap(&["neg", "pos"], ChartSignature::new(0, origin), &[("pos", id.clone()), ("neg", id)]);
        m
    }

    #[test]
    fn single_interval_chart() {
        let mut m = CoverManifest::new(GluingClass::PureMonomial);
        m.add_chart("a", ChartSignature::new(0, Polytope::product_of_intervals(&[(0, Some(1))])));
        assert_eq!(total_betti(&m).unwrap().betti, vec![1, 1, 0]);
        let r = pd_symmetry_check(&m).unwrap();
        assert!(r.passed());
        assert_eq!(r.table.compact, Some(vec![0, 1, 1]));
    }

    #[test]
    fn projective_line_by_hand() {
        let m = p1_manifest();
        let t = total_betti(&m).unwrap();
        assert_eq!(t.betti, vec![1, 0, 1]);
        assert_eq!(t.machine(), "betti 0 1\nbetti 2 1\n");
        assert_eq!(total_compact_betti(&m).unwrap().compact, Some(vec![1, 0, 1]));
        let v = validate_manifest(&m).unwrap();
        let c = build_total_complex(&v);
        assert!(c.squares_to_zero());
        assert_eq!(c.euler_characteristic(), 2);
    }

    #[test]
    fn ray_chart_compact() {
        let mut m = CoverManifest::new(GluingClass::PureMonomial);
        m.add_chart("a", ChartSignature::new(0, Polytope::quadrant(1)));
        assert_eq!(total_compact_betti(&m).unwrap().compact, Some(vec![0, 0, 1]));
        let mut line = CoverManifest::new(GluingClass::PureMonomial);
        line.add_chart("a", ChartSignature::new(0, Polytope::whole_space(1)));
        assert!(matches!(total_compact_betti(&line), Err(Error::DualityUnavailable(_))));
    }

    #[test]
    fn general_gluing_is_refused() {
        let mut m = p1_manifest();
        m.gluing_class = GluingClass::General;
        assert!(matches!(total_betti(&m), Err(Error::UnsupportedGluing(_))));
    }

    #[test]
    fn omitted_vertex_position() {
        assert_eq!(omitted(&[0, 2], &[0, 1, 2]), Some(1));
        assert_eq!(omitted(&[1, 2], &[0, 1, 2]), Some(0));
        assert_eq!(omitted(&[0, 1], &[0, 1, 2]), Some(2));
        assert_eq!(omitted(&[0, 3], &[0, 1, 2]), None);
    }
}
