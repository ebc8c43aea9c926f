//! Integration over the smooth strata of a chart, admissibility and Stokes.
//!
//! A chart form is written in the coordinates `(x, r, θ)` of the smooth
//! stratum over the base corner of `P` (the origin when it is a vertex,
//! otherwise the lexicographically least vertex). Its restriction to the
//! stratum of a face `S` is the limit along `r ↦ r - T w` with `w` pointing
//! from the base corner into the relative interior of `S`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_traits::{ToPrimitive, Zero};

use super::expr::{product, Part, Point, Poly, Var};
use super::form::{FormExpr, Wedge};
use super::quad::{integrate_box, Range};
use crate::chart::ChartSignature;
use crate::lattice::{Int, Polytope, Rat};
use crate::{Error, Result};

/// How far along a limit direction a stratum is probed.
const LIMIT_SHIFT: i64 = 60;
/// Values below this are treated as zero when sampling limits.
const VANISHING: f64 = 1e-9;
const SAMPLES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Target absolute error of the whole integral.
    pub tolerance: f64,
    /// Maximum bisection depth before an integral is declared divergent.
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { tolerance: 1e-9, max_depth: 32 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
}

/// `dx_1 ∧ ... ∧ dx_n ∧ dr_1 ∧ dθ_1 ∧ ... ∧ dr_m ∧ dθ_m`, the positive volume.
pub fn volume_wedge(n: usize, m: usize) -> Wedge {
    let mut w: Wedge = (0..n).map(Var::x).collect();
    for i in 0..m {
        w.push(Var::r(i));
        w.push(Var::theta(i));
    }
    w
}

/// Errors unless every coordinate of `form` exists on the chart and its
/// degree does not exceed the chart dimension.
pub fn check_coordinates(form: &FormExpr, sig: &ChartSignature) -> Result<()> {
    let (n, m) = (sig.n, sig.m());
    for v in form.vars() {
        let ok = match v {
            Var::X(j) => j < n,
            Var::T(i, _) => i < m,
            Var::Bound(_) => false,
        };
        if !ok {
            return Err(Error::Form(format!("coordinate {v} does not exist on a chart with n={n}, m={m}")));
        }
    }
    if let Some(&top) = form.degrees().iter().next_back() {
        if top > sig.total_dim() {
            return Err(Error::DegreeOverflow { degree: top, dim: sig.total_dim() });
        }
    }
    Ok(())
}

/// Vertices of `P` that belong to `P` (open faces excluded).
fn corners(p: &Polytope) -> Vec<Vec<Rat>> {
    let mut v: Vec<Vec<Rat>> = p.vertices().into_iter().filter(|v| p.contains(v)).collect();
    v.sort();
    v
}

/// The corner whose smooth stratum carries the chart coordinates.
pub fn base_corner(p: &Polytope) -> Option<Vec<Rat>> {
    let cs = corners(p);
    let origin = vec![Rat::zero(); p.ambient_dim()];
    if cs.contains(&origin) {
        Some(origin)
    } else {
        cs.into_iter().next()
    }
}

/// Substitutes `r ↦ r - T dir` for the probe shift `T`.
fn shifted(f: &Poly, dir: &[Rat]) -> Poly {
    let t = Rat::from_integer(Int::from(LIMIT_SHIFT));
    f.substitute(&|v| match v {
        Var::T(i, Part::R) if !dir[i].is_zero() => Some(Poly::var(v).sub(&Poly::constant(&dir[i] * &t))),
        _ => None,
    })
}

fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let (mut inv, mut f) = (0.0, 1.0 / base as f64);
    while k > 0 {
        inv += f * (k % base) as f64;
        k /= base;
        f /= base as f64;
    }
    inv
}

/// Halton points covering `x, r ∈ [-4, 4]` and `θ ∈ [0, 2π)`.
fn sample_points(n: usize, m: usize) -> Vec<Point> {
    const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    (1..=SAMPLES)
        .map(|k| {
            let mut p = Point::zeros(n, m);
            let mut axis = 0;
            let mut next = || {
                let u = radical_inverse(k, PRIMES[axis % PRIMES.len()]);
                axis += 1;
                u
            };
            for x in p.x.iter_mut() {
                *x = 8.0 * next() - 4.0;
            }
            for i in 0..m {
                p.r[i] = 8.0 * next() - 4.0;
                p.theta[i] = TAU * next();
            }
            p
        })
        .collect()
}

fn max_abs(f: &Poly, pts: &[Point]) -> f64 {
    pts.iter().map(|p| f.eval(p).abs()).fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn range_of(v: Var, half_line: Option<usize>) -> Range {
    match v {
        Var::X(j) if Some(j) == half_line => Range::NegativeHalfLine,
        Var::X(_) => Range::Line,
        Var::T(_, Part::R) => Range::Radial,
        _ => Range::Circle,
    }
}

fn diverges(what: String) -> Error {
    Error::DivergenceSuspected(what)
}

/// Integrates a function over the product of coordinate ranges, splitting
/// each monomial into factors that share no coordinate.
fn integrate_function(
    f: &Poly,
    coords: &[(Var, Range)],
    n: usize,
    m: usize,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    let terms = f.len().max(1) as f64;
    let mut total = Integral { value: 0.0, error: 0.0 };
    for (mono, c) in f.terms() {
        let c = c.to_f64().unwrap_or(f64::NAN);
        let atoms: Vec<_> = mono.iter().collect();
        let index = |v: &Var| coords.iter().position(|(w, _)| w == v);
        // union-find over coordinate positions
        let mut parent: Vec<usize> = (0..coords.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        let mut atom_vars = Vec::new();
        for (a, _) in &atoms {
            let mut idx = Vec::new();
            for v in a.vars() {
                idx.push(index(&v).ok_or_else(|| Error::Form(format!("coefficient depends on {v}, which is not integrated")))?);
            }
            for w in idx.windows(2) {
                let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[x] = y;
            }
            atom_vars.push(idx);
        }
        let mut factors: Vec<Integral> = Vec::new();
        let mut constant = c;
        let used: BTreeSet<usize> = atom_vars.iter().flatten().copied().collect();
        for (i, (v, range)) in coords.iter().enumerate() {
            if used.contains(&i) {
                continue;
            }
            match range {
                Range::Circle => constant *= TAU,
                _ => return Err(diverges(format!("coefficient term is constant along {v}"))),
            }
        }
        let roots: BTreeSet<usize> = used.iter().map(|&i| find(&mut parent, i)).collect();
        let comps = roots.len().max(1) as f64;
        // atoms with no coordinates at all are constants
        for ((a, k), idx) in atoms.iter().zip(&atom_vars) {
            if idx.is_empty() {
                constant *= a.eval(&Point::zeros(n, m)).powi(**k as i32);
            }
        }
        for root in roots {
            let members: Vec<usize> = (0..coords.len()).filter(|&i| used.contains(&i) && find(&mut parent, i) == root).collect();
            let chosen: Vec<(&&super::expr::Atom, &&u32)> = atoms
                .iter()
                .zip(&atom_vars)
                .filter(|(_, idx)| idx.first().is_some_and(|&i| find(&mut parent, i) == root))
                .map(|((a, k), _)| (a, k))
                .collect();
            let ranges: Vec<Range> = members.iter().map(|&i| coords[i].1).collect();
            let mut point = Point::zeros(n, m);
            let tol = opts.tolerance / (terms * comps * (1.0 + c.abs()));
            let est = integrate_box(
                &mut |vals| {
                    for (&i, &t) in members.iter().zip(vals) {
                        point.set(coords[i].0, t);
                    }
                    product(chosen.iter().map(|(a, k)| a.eval(&point).powi(***k as i32)))
                },
                &ranges,
                tol,
                opts.max_depth,
            )
            .ok_or_else(|| {
                let names: Vec<String> = members.iter().map(|&i| coords[i].0.to_string()).collect();
                diverges(format!("no convergence integrating over {}", names.join(", ")))
            })?;
            factors.push(Integral { value: est.value, error: est.error });
        }
        let value: f64 = constant * factors.iter().map(|f| f.value).product::<f64>();
        let mut error = 0.0;
        for (k, fk) in factors.iter().enumerate() {
            let others: f64 = factors.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, f)| f.value.abs()).product();
            error += constant.abs() * fk.error * others;
        }
        if !value.is_finite() {
            return Err(diverges("integrand is not finite".into()));
        }
        total.value += value;
        total.error += error;
    }
    Ok(total)
}

/// Requires the top coefficient to vanish on every corner other than the base.
fn check_other_corners(top: &Poly, sig: &ChartSignature, base: &[Rat]) -> Result<()> {
    let pts = sample_points(sig.n, sig.m());
    for v in corners(&sig.polytope) {
        if v == base {
            continue;
        }
        let dir: Vec<Rat> = v.iter().zip(base).map(|(a, b)| a - b).collect();
        let size = max_abs(&shifted(top, &dir), &pts);
        if !(size <= VANISHING) {
            return Err(diverges(format!("form does not decay toward the corner {v:?}")));
        }
    }
    Ok(())
}

fn integrate_top(form: &FormExpr, sig: &ChartSignature, half_line: Option<usize>, opts: &QuadratureOptions) -> Result<Integral> {
    check_coordinates(form, sig)?;
    let (n, m) = (sig.n, sig.m());
    let zero = Integral { value: 0.0, error: 0.0 };
    let Some(base) = base_corner(&sig.polytope) else {
        return Ok(zero);
    };
    let top = form.coefficient(&volume_wedge(n, m));
    if top.is_zero() {
        return Ok(zero);
    }
    check_other_corners(&top, sig, &base)?;
    let coords: Vec<(Var, Range)> = volume_wedge(n, m).into_iter().map(|v| (v, range_of(v, half_line))).collect();
    integrate_function(&top, &coords, n, m, opts)
}

/// Integral of the top-degree part of `form` over the chart. Only the base
/// corner's stratum has positive measure; elsewhere the form must decay.
pub fn integrate(form: &FormExpr, sig: &ChartSignature, opts: &QuadratureOptions) -> Result<Integral> {
    integrate_top(form, sig, None, opts)
}

/// Integral over the half chart `x_j ≤ 0`.
pub fn integrate_half(form: &FormExpr, sig: &ChartSignature, boundary: usize, opts: &QuadratureOptions) -> Result<Integral> {
    if boundary >= sig.n {
        return Err(Error::Form(format!("boundary coordinate x{} does not exist", boundary + 1)));
    }
    integrate_top(form, sig, Some(boundary), opts)
}

/// Outcome of the admissibility test on one stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumCheck {
    /// Index into the face lattice of `P`.
    pub face: usize,
    pub dim: usize,
    /// Contraction with every integral vector of the stratum vanishes.
    pub integral_vectors: bool,
    /// Contraction with the angular fields of the stratum's recession
    /// directions vanishes.
    pub angular_directions: bool,
    /// Largest sampled contraction.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Admissibility {
    pub strata: Vec<StratumCheck>,
}

impl Admissibility {
    pub fn passed(&self) -> bool {
        self.strata.iter().all(|s| s.integral_vectors && s.angular_directions)
    }

    pub fn integral_vectors_ok(&self) -> bool {
        self.strata.iter().all(|s| s.integral_vectors)
    }

    pub fn angular_directions_ok(&self) -> bool {
        self.strata.iter().all(|s| s.angular_directions)
    }
}

fn field(dirs: &[Int], part: Part) -> Vec<(Var, Rat)> {
    dirs.iter().enumerate().map(|(i, c)| (Var::T(i, part), Rat::from_integer(c.clone()))).collect()
}

/// Tests the two vanishing conditions on every stratum of positive
/// tropical dimension: contraction with integral vectors (the `∂r`
/// directions parallel to the face) and with the `∂θ` directions of the
/// face's recession cone, which are tangent to the images of
/// `T^1_{(0,∞)}`.
pub fn check_admissible(form: &FormExpr, sig: &ChartSignature) -> Result<Admissibility> {
    check_coordinates(form, sig)?;
    let (n, m) = (sig.n, sig.m());
    let lattice = sig.polytope.face_lattice()?;
    let base = base_corner(&sig.polytope).unwrap_or_else(|| vec![Rat::zero(); m]);
    let pts = sample_points(n, m);
    let mut strata = Vec::new();
    for (idx, face) in lattice.faces.iter().enumerate() {
        if face.dim == 0 {
            continue;
        }
        let inside = face.relative_interior_point();
        if !sig.polytope.contains(&inside) {
            continue;
        }
        let dir: Vec<Rat> = inside.iter().zip(&base).map(|(a, b)| a - b).collect();
        let limit = form.map_coefficients(|f| shifted(f, &dir));
        let size = |w: &FormExpr| w.terms().map(|(_, f)| max_abs(f, &pts)).fold(0.0, f64::max);
        let mut residual: f64 = 0.0;
        let mut worst = |fields: Vec<Vec<(Var, Rat)>>| {
            let r = fields.iter().map(|v| size(&limit.interior(v))).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
            residual = if r.is_nan() { f64::NAN } else { residual.max(r) };
            r <= VANISHING
        };
        let integral = worst(face.direction_lattice(m).lattice_basis().iter().map(|v| field(v, Part::R)).collect());
        let angular = worst(face.recession_lattice(m).lattice_basis().iter().map(|v| field(v, Part::Theta)).collect());
        strata.push(StratumCheck { face: idx, dim: face.dim, integral_vectors: integral, angular_directions: angular, residual });
    }
    Ok(Admissibility { strata })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StokesReport {
    /// `∫_M dω`.
    pub interior: Integral,
    /// `∫_{∂M} ω`, zero without a boundary.
    pub boundary: Integral,
    pub discrepancy: f64,
    pub admissibility: Admissibility,
}

impl StokesReport {
    /// Set when `ω` fails admissibility, so the theorem does not apply.
    pub fn hypothesis_violated(&self) -> bool {
        !self.admissibility.passed()
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.discrepancy <= tolerance
    }
}

/// Compares `∫_M dω` with `∫_{∂M} ω`, where `M` is the chart or, with
/// `boundary = Some(j)`, its half `x_j ≤ 0` with the outward-normal-first
/// boundary orientation.
pub fn stokes_check(form: &FormExpr, sig: &ChartSignature, boundary: Option<usize>, opts: &QuadratureOptions) -> Result<StokesReport> {
    check_coordinates(form, sig)?;
    let dim = sig.total_dim();
    if !form.is_zero() && form.degree() != Some(dim.saturating_sub(1)) {
        return Err(Error::Form(format!("Stokes needs a form of degree {}", dim.saturating_sub(1))));
    }
    let admissibility = check_admissible(form, sig)?;
    let d = form.d();
    let (interior, boundary_integral) = match boundary {
        None => (integrate(&d, sig, opts)?, Integral { value: 0.0, error: 0.0 }),
        Some(j) => {
            let interior = integrate_half(&d, sig, j, opts)?;
            (interior, boundary_integral(form, sig, j, opts)?)
        }
    };
    Ok(StokesReport {
        discrepancy: (interior.value - boundary_integral.value).abs(),
        interior,
        boundary: boundary_integral,
        admissibility,
    })
}

fn boundary_integral(form: &FormExpr, sig: &ChartSignature, j: usize, opts: &QuadratureOptions) -> Result<Integral> {
    let (n, m) = (sig.n, sig.m());
    let Some(base) = base_corner(&sig.polytope) else {
        return Ok(Integral { value: 0.0, error: 0.0 });
    };
    let rest: Wedge = volume_wedge(n, m).into_iter().filter(|v| *v != Var::x(j)).collect();
    let restricted = form.coefficient(&rest).substitute(&|v| (v == Var::x(j)).then(Poly::zero));
    if restricted.is_zero() {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    check_other_corners(&restricted, sig, &base)?;
    let coords: Vec<(Var, Range)> = rest.into_iter().map(|v| (v, range_of(v, None))).collect();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let i = integrate_function(&restricted, &coords, n, m, opts)?;
    Ok(Integral { value: sign * i.value, error: i.error })
}
