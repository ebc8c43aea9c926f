use num_traits::Zero;

use super::{CoverManifest, GluingClass};
use crate::chart::{chart_cohomology, ChartSignature};
use crate::error::{Error, Result};
use crate::lattice::{Fan, Inequality, IntegerMatrix, Polytope};

/// Cover of the toric refinement of `T^m` given by a complete fan: one
/// chart per maximal cone, glued by identity exponents.
///
/// Every cone contains the origin, so every subset of charts meets and the
/// nerve is the full simplex on the maximal cones.
pub fn refinement_manifest(fan: &Fan, base_m: usize) -> Result<CoverManifest> {
    if fan.ambient_dim() != base_m {
        return Err(Error::UnsupportedFan(format!(
            "fan lives in dimension {} but the torus has rank {base_m}",
            fan.ambient_dim()
        )));
    }
    if !fan.is_complete() {
        return Err(Error::UnsupportedFan("fan is not complete".into()));
    }
    let cones = fan.maximal_cones();
    let width = cones.len().to_string().len();
    let ids: Vec<String> = (0..cones.len()).map(|i| format!("c{i:0width$}")).collect();
    let mut m = CoverManifest::new(GluingClass::PureMonomial);
    for (id, c) in ids.iter().zip(cones) {
        m.add_chart(id.clone(), ChartSignature::new(0, c.polytope.clone()));
    }
    let id = IntegerMatrix::identity(base_m);
    for mask in 1u64..(1 << cones.len()) {
        if mask.count_ones() < 2 {
            continue;
        }
        let members: Vec<usize> = (0..cones.len()).filter(|i| mask >> i & 1 == 1).collect();
        let meet = members[1..]
            .iter()
            .fold(cones[members[0]].polytope.clone(), |acc, &i| acc.intersection(&cones[i].polytope));
        let names: Vec<String> = members.iter().map(|&i| ids[i].clone()).collect();
        let maps: Vec<(String, IntegerMatrix)> = names.iter().map(|n| (n.clone(), id.clone())).collect();
        m.add_overlap(&names, ChartSignature::new(0, meet), &maps);
    }
    Ok(m)
}

/// Tropical part of a chart family: `y -> A y` from the total polytope onto
/// the base polytope; the real coordinates project by dropping the extra ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyProjection {
    pub exponents: IntegerMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub base: usize,
    pub total: usize,
    pub fiber: usize,
    /// Unbounded span rank of the fiber polytope.
    pub fiber_rank: usize,
    pub fiber_polytope: Polytope,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.total == self.base + self.fiber
    }
}

/// Compares `dim H^1` of the total chart with base plus fiber, the fiber
/// being taken over a relative interior point of the base polytope.
pub fn family_h1_check(base: &ChartSignature, total: &ChartSignature, f: &FamilyProjection) -> Result<FamilyReport> {
    let (m, mm) = (base.m(), total.m());
    if total.n < base.n || mm < m {
        return Err(Error::NotAFamily("total chart is smaller than the base".into()));
    }
    if f.exponents.shape() != (m, mm) {
        return Err(Error::ShapeError { expected: (m, mm), found: f.exponents.shape() });
    }
    if f.exponents.rational_rank() < m {
        return Err(Error::NotAFamily("tropical projection has deficient rank".into()));
    }
    if !total.polytope.image(&f.exponents).same_set(&base.polytope) {
        return Err(Error::NotAFamily("tropical projection is not onto the base polytope".into()));
    }
    let p = base.polytope.relative_interior_point()?;
    let mut ineqs = total.polytope.inequalities().to_vec();
    for (i, pi) in p.iter().enumerate() {
        let row = f.exponents.row(i).to_vec();
        ineqs.push(Inequality { normal: row.clone(), rhs: pi.clone(), open: false });
        ineqs.push(Inequality { normal: row.iter().map(|x| -x).collect(), rhs: -pi.clone(), open: false });
    }
    let fiber_polytope = Polytope::new(mm, ineqs);
    let fiber_rank = fiber_polytope.unbounded_span()?.rank;
    let base_model = chart_cohomology(base)?;
    let total_model = chart_cohomology(total)?;
    debug_assert!(fiber_polytope.rays().iter().all(|r| (0..m)
        .all(|i| crate::lattice::dot_int(f.exponents.row(i), r).is_zero())));
    Ok(FamilyReport {
        base: base_model.h1_dim(),
        total: total_model.h1_dim(),
        fiber: mm - m - fiber_rank,
        fiber_rank,
        fiber_polytope,
    })
}
