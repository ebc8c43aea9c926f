//! Integration along the fibers of coordinate projections.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use super::expr::{Domain, Monomial, Part, Poly, Var};
use super::form::{FormExpr, Wedge};
use super::integrate::{base_corner, check_coordinates, integrate, volume_wedge, Integral, QuadratureOptions};
use crate::chart::ChartSignature;
use crate::lattice::{smith_normal_form, Int, IntegerMatrix, Rat};
use crate::{Error, Result};

/// The projection `R^n x T^m_P -> R^{n'} x T^{m'}_{P'}` keeping the listed
/// real and torus coordinates, in the order given; `P'` is the image of `P`.
#[derive(Clone, Debug)]
pub struct CoordinateProjection {
    pub total: ChartSignature,
    pub base: ChartSignature,
    pub keep_x: Vec<usize>,
    pub keep_torus: Vec<usize>,
}

fn distinct_below(xs: &[usize], bound: usize) -> bool {
    xs.iter().collect::<BTreeSet<_>>().len() == xs.len() && xs.iter().all(|&x| x < bound)
}

impl CoordinateProjection {
    /// Builds the projection and checks that it is surjective on integral
    /// vectors over every stratum.
    pub fn new(total: ChartSignature, keep_x: Vec<usize>, keep_torus: Vec<usize>) -> Result<Self> {
        let m = total.m();
        if !distinct_below(&keep_x, total.n) || !distinct_below(&keep_torus, m) {
            return Err(Error::Form("kept coordinates must be distinct and exist on the chart".into()));
        }
        let select = IntegerMatrix::from_rows_with_cols(
            &keep_torus.iter().map(|&i| (0..m).map(|j| i64::from(i == j)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            m,
        );
        let base = ChartSignature::new(keep_x.len(), total.polytope.image(&select));
        let proj = CoordinateProjection { total, base, keep_x, keep_torus };
        proj.check_integral_surjectivity()?;
        let (a, b) = (base_corner(&proj.total.polytope), base_corner(&proj.base.polytope));
        if a.map(|p| proj.project(&p)) != b {
            return Err(Error::Form("the base corner does not map to the base corner".into()));
        }
        Ok(proj)
    }

    fn project<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.keep_torus.iter().map(|&i| v[i].clone()).collect()
    }

    /// For every face `S` of `P`, the projected lattice of directions along `S`
    /// must be saturated and of full rank in the face of `P'` containing the
    /// image of the relative interior of `S`.
    fn check_integral_surjectivity(&self) -> Result<()> {
        let (p, q) = (&self.total.polytope, &self.base.polytope);
        let lattice = p.face_lattice()?;
        let base_faces = q.face_lattice()?;
        for (idx, face) in lattice.faces.iter().enumerate() {
            let inside = face.relative_interior_point();
            if !p.contains(&inside) {
                continue;
            }
            let image = self.project(&inside);
            let target = base_faces
                .faces
                .iter()
                .filter(|f| f.as_polytope(q).contains(&image))
                .map(|f| f.dim)
                .min()
                .ok_or_else(|| Error::Form("projected point lies outside the base polytope".into()))?;
            let gens: Vec<Vec<Int>> = face.direction_lattice(p.ambient_dim()).lattice_basis().iter().map(|g| self.project(g)).collect();
            let (rank, saturated) = if gens.is_empty() || self.keep_torus.is_empty() {
                (0, true)
            } else {
                let snf = smith_normal_form(&IntegerMatrix::from_big_rows(gens, self.keep_torus.len()));
                let diag = snf.diagonal();
                (snf.rank(), diag.iter().filter(|d| !num_traits::Zero::is_zero(*d)).all(|d| d.abs().is_one()))
            };
            if rank != target {
                return Err(Error::IntegralVectorSurjectivityFailure {
                    face: idx,
                    reason: format!("projected directions have rank {rank}, the image stratum has dimension {target}"),
                });
            }
            if !saturated {
                return Err(Error::IntegralVectorSurjectivityFailure {
                    face: idx,
                    reason: "projected directions span a proper sublattice".into(),
                });
            }
        }
        Ok(())
    }

    /// Total-chart coordinate corresponding to a base coordinate.
    fn lift(&self, v: Var) -> Option<Var> {
        match v {
            Var::X(j) => self.keep_x.get(j).map(|&i| Var::X(i)),
            Var::T(i, part) => self.keep_torus.get(i).map(|&k| Var::T(k, part)),
            Var::Bound(_) => None,
        }
    }

    /// Base coordinate of a kept total-chart coordinate.
    fn descend(&self, v: Var) -> Option<Var> {
        match v {
            Var::X(i) => self.keep_x.iter().position(|&k| k == i).map(Var::X),
            Var::T(i, part) => self.keep_torus.iter().position(|&k| k == i).map(|j| Var::T(j, part)),
            Var::Bound(_) => None,
        }
    }

    /// Dropped coordinates in canonical order; they span the fiber.
    fn fiber_vars(&self) -> Wedge {
        volume_wedge(self.total.n, self.total.m()).into_iter().filter(|v| self.descend(*v).is_none()).collect()
    }

    /// Sign `s` with `vol_base ∧ vol_fiber = s vol_total`.
    fn orientation_sign(&self) -> i32 {
        let lifted: Wedge = volume_wedge(self.base.n, self.base.m()).into_iter().filter_map(|v| self.lift(v)).collect();
        let whole: Wedge = lifted.into_iter().chain(self.fiber_vars()).collect();
        FormExpr::term(whole, Poly::one()).coefficient(&volume_wedge(self.total.n, self.total.m())).as_constant().map_or(0, |c| {
            if c.is_positive() {
                1
            } else {
                -1
            }
        })
    }

    /// Pullback of a base form.
    pub fn pullback(&self, alpha: &FormExpr) -> Result<FormExpr> {
        check_coordinates(alpha, &self.base)?;
        let mut out = FormExpr::zero();
        for (w, f) in alpha.terms() {
            let lifted: Wedge = w.iter().filter_map(|v| self.lift(*v)).collect();
            out = out.add(&FormExpr::term(lifted, f.substitute(&|v| self.lift(v).map(Poly::var))));
        }
        Ok(out)
    }

    /// Fiber integral `f_! θ`, characterised by `θ = f^*(f_! θ) ∧ vol_fiber`
    /// on fiber-top components, with fibers oriented so that
    /// `vol_base ∧ vol_fiber` is the total orientation.
    pub fn fiber_integrate(&self, theta: &FormExpr) -> Result<FormExpr> {
        check_coordinates(theta, &self.total)?;
        if theta.contains_fiber() {
            return Err(Error::Form("nested fiber integrals are not supported".into()));
        }
        let fiber = self.fiber_vars();
        let orientation = self.orientation_sign();
        let mut out = FormExpr::zero();
        for (w, g) in theta.terms() {
            if !fiber.iter().all(|v| w.contains(v)) {
                continue;
            }
            let rest: Wedge = w.iter().filter(|v| !fiber.contains(v)).copied().collect();
            // dI = ε dJ ∧ d(fiber)
            let split: Wedge = rest.iter().chain(&fiber).copied().collect();
            let eps = FormExpr::term(split, Poly::one()).coefficient(w).as_constant().unwrap_or_default();
            let coefficient = self.integrate_over_fiber(g, &fiber)?.scale(&(eps * Rat::from_integer(Int::from(orientation))));
            let lowered: Wedge = rest.iter().filter_map(|v| self.descend(*v)).collect();
            out = out.add(&FormExpr::term(lowered, coefficient));
        }
        Ok(out)
    }

    /// Integrates a coefficient over the fiber coordinates, keeping factors
    /// free of fiber coordinates outside and splitting the rest into
    /// independent fiber integrals.
    fn integrate_over_fiber(&self, g: &Poly, fiber: &[Var]) -> Result<Poly> {
        let rename = |v: Var| self.descend(v).map(Poly::var);
        let mut out = Poly::zero();
        for (mono, c) in g.terms() {
            let mut outside = Poly::constant(c.clone());
            let mut groups: Vec<(BTreeSet<Var>, Monomial)> = Vec::new();
            for (atom, &k) in mono {
                let touched: BTreeSet<Var> = atom.vars().into_iter().filter(|v| fiber.contains(v)).collect();
                let factor = Poly::from_monomial([(atom.clone(), k)].into_iter().collect(), Rat::one());
                if touched.is_empty() {
                    outside = outside.mul(&factor.substitute(&rename));
                    continue;
                }
                let mut merged = (touched, Monomial::new());
                merged.1.insert(atom.clone(), k);
                let mut keep = Vec::new();
                for grp in groups.drain(..) {
                    if grp.0.is_disjoint(&merged.0) {
                        keep.push(grp);
                    } else {
                        merged.0.extend(grp.0);
                        merged.1.extend(grp.1);
                    }
                }
                keep.push(merged);
                groups = keep;
            }
            let covered: BTreeSet<Var> = groups.iter().flat_map(|g| g.0.iter().copied()).collect();
            let mut circles = 0;
            for v in fiber.iter().filter(|v| !covered.contains(v)) {
                match v {
                    Var::T(_, Part::Theta) => circles += 1,
                    _ => return Err(Error::DivergenceSuspected(format!("fiber integrand is constant along {v}"))),
                }
            }
            // untouched circles contribute (2π)^k, carried as an integral of 1
            let mut term = outside;
            if circles > 0 {
                term = term.mul(&Poly::fiber(Poly::one(), vec![Domain::Circle; circles]));
            }
            for (vars, monomial) in groups {
                let vars: Vec<Var> = vars.into_iter().collect();
                let domains: Vec<Domain> = vars
                    .iter()
                    .map(|v| match v {
                        Var::X(_) => Domain::Line,
                        Var::T(_, Part::R) => Domain::Radial,
                        _ => Domain::Circle,
                    })
                    .collect();
                let integrand = Poly::from_monomial(monomial, Rat::one()).substitute(&|v| {
                    vars.iter().position(|w| *w == v).map(|k| Poly::var(Var::Bound(k))).or_else(|| rename(v))
                });
                term = term.mul(&Poly::fiber(integrand, domains));
            }
            out = out.add(&term);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjunctionReport {
    /// `∫_base α ∧ f_! θ`.
    pub base_side: Integral,
    /// `∫_total f^* α ∧ θ`.
    pub total_side: Integral,
    pub discrepancy: f64,
}

impl AdjunctionReport {
    pub fn within(&self, tolerance: f64) -> bool {
        self.discrepancy <= tolerance
    }
}

/// Compares both sides of `∫ α ∧ f_! θ = ∫ f^* α ∧ θ`.
pub fn adjunction_check(
    proj: &CoordinateProjection,
    alpha: &FormExpr,
    theta: &FormExpr,
    opts: &QuadratureOptions,
) -> Result<AdjunctionReport> {
    let pushed = proj.fiber_integrate(theta)?;
    let base_side = integrate(&alpha.wedge(&pushed), &proj.base, opts)?;
    let total_side = integrate(&proj.pullback(alpha)?.wedge(theta), &proj.total, opts)?;
    Ok(AdjunctionReport { discrepancy: (base_side.value - total_side.value).abs(), base_side, total_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::parse_form;
    use crate::lattice::Polytope;

    #[test]
    fn identity_projection_changes_nothing() {
        let sig = ChartSignature::new(1, Polytope::quadrant(1));
        let p = CoordinateProjection::new(sig, vec![0], vec![0]).unwrap();
        let w = parse_form("exp(-x^2) * bump(0, 1, r) * dx ^ dr ^ dth").unwrap();
        assert_eq!(p.fiber_integrate(&w).unwrap(), w);
    }

    #[test]
    fn gaussian_fiber_over_the_line() {
        let sig = ChartSignature::new(2, Polytope::whole_space(0));
        let p = CoordinateProjection::new(sig, vec![0], vec![]).unwrap();
        let w = parse_form("exp(-x1^2 - x2^2) * dx1 ^ dx2").unwrap();
        let pushed = p.fiber_integrate(&w).unwrap();
        let mut pt = super::super::expr::Point::zeros(1, 0);
        pt.x[0] = 0.5;
        let coefficient = pushed.coefficient(&[Var::x(0)]).eval(&pt);
        assert!((coefficient - (-0.25f64).exp() * std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn sublattice_projection_is_refused() {
        let p = Polytope::from_generators(2, &[vec![Rat::from_integer(0.into()); 2]], &[vec![2.into(), 1.into()]], &[]);
        let sig = ChartSignature::new(0, p);
        assert!(matches!(
            CoordinateProjection::new(sig, vec![], vec![0]),
            Err(Error::IntegralVectorSurjectivityFailure { .. })
        ));
    }
}
