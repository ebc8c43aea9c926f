use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::dd::cone_generators;
use super::matrix::{dot_int, primitive_integer, Int, QMatrix, Rat};
use super::Saturation;
use crate::error::{Error, Result};

/// Closed half-space `normal . y >= rhs`. `open` marks the face where
/// equality holds as removed; only completeness looks at it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub normal: Vec<Int>,
    pub rhs: Rat,
    pub open: bool,
}

impl Inequality {
    pub fn new(normal: &[i64], rhs: Rat) -> Self {
        Inequality { normal: normal.iter().map(|&v| Int::from(v)).collect(), rhs, open: false }
    }

    pub fn open(normal: &[i64], rhs: Rat) -> Self {
        Inequality { open: true, ..Self::new(normal, rhs) }
    }

    pub fn eval(&self, y: &[Rat]) -> Rat {
        self.normal.iter().zip(y).fold(Rat::zero(), |acc, (a, x)| acc + Rat::from_integer(a.clone()) * x) - &self.rhs
    }

    /// Homogenized integer row `(den * a, -num)` for the cone over the polytope.
    fn homogenized(&self) -> Vec<Int> {
        let den = self.rhs.denom().clone();
        let mut row: Vec<Int> = self.normal.iter().map(|a| a * &den).collect();
        row.push(-self.rhs.numer().clone());
        row
    }
}

/// Generators of the homogenized cone `{(y, t) : a.y - b t >= 0, t >= 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Homogenized {
    rays: Vec<Vec<Int>>,
    lines: Vec<Vec<Int>>,
}

/// Rational polyhedron in `Q^m` given by inequalities, with its vertex/ray
/// description cached at construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Polytope {
    ambient_dim: usize,
    inequalities: Vec<Inequality>,
    hom: Homogenized,
}

impl Polytope {
    pub fn new(ambient_dim: usize, inequalities: Vec<Inequality>) -> Self {
        for ineq in &inequalities {
            assert_eq!(ineq.normal.len(), ambient_dim, "inequality of wrong dimension");
        }
        let mut rows: Vec<Vec<Int>> = inequalities.iter().map(Inequality::homogenized).collect();
        let mut t_row = vec![Int::zero(); ambient_dim + 1];
        t_row[ambient_dim] = Int::one();
        rows.push(t_row);
        let g = cone_generators(&rows, ambient_dim + 1);
        Polytope { ambient_dim, inequalities, hom: Homogenized { rays: g.rays, lines: g.lines } }
    }

    /// All of `Q^m`.
    pub fn whole_space(ambient_dim: usize) -> Self {
        Self::new(ambient_dim, Vec::new())
    }

    /// The quadrant `[0, inf)^m`.
    pub fn quadrant(m: usize) -> Self {
        let ineqs = (0..m)
            .map(|i| {
                let mut a = vec![0; m];
                a[i] = 1;
                Inequality::new(&a, Rat::zero())
            })
            .collect();
        Self::new(m, ineqs)
    }

    /// Axis-parallel box; `None` upper bounds are unbounded.
    pub fn product_of_intervals(bounds: &[(i64, Option<i64>)]) -> Self {
        let m = bounds.len();
        let mut ineqs = Vec::new();
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let mut a = vec![0; m];
            a[i] = 1;
            ineqs.push(Inequality::new(&a, Rat::from_integer(Int::from(lo))));
            if let Some(hi) = hi {
                a[i] = -1;
                ineqs.push(Inequality::new(&a, Rat::from_integer(Int::from(-hi))));
            }
        }
        Self::new(m, ineqs)
    }

    /// Convex hull of `points` plus the cone over `rays` and the span of `lines`.
    pub fn from_generators(ambient_dim: usize, points: &[Vec<Rat>], rays: &[Vec<Int>], lines: &[Vec<Int>]) -> Self {
        let mut gens: Vec<Vec<Int>> = Vec::new();
        for p in points {
            let mut h = p.clone();
            h.push(Rat::one());
            gens.push(primitive_integer(&h));
        }
        for r in rays.iter().chain(lines) {
            let mut h = r.clone();
            h.push(Int::zero());
            gens.push(h);
        }
        for l in lines {
            let mut h: Vec<Int> = l.iter().map(|x| -x.clone()).collect();
            h.push(Int::zero());
            gens.push(h);
        }
        if points.is_empty() {
            // Empty: 0 >= 1.
            return Self::new(ambient_dim, vec![Inequality::new(&vec![0; ambient_dim], Rat::one())]);
        }
        let dual = cone_generators(&gens, ambient_dim + 1);
        let mut ineqs = Vec::new();
        let mut push = |a: &[Int]| {
            let normal = a[..ambient_dim].to_vec();
            if normal.iter().all(Zero::is_zero) {
                return;
            }
            let rhs = Rat::from_integer(-a[ambient_dim].clone());
            ineqs.push(Inequality { normal, rhs, open: false });
        };
        for r in &dual.rays {
            push(r);
        }
        for l in &dual.lines {
            push(l);
            let neg: Vec<Int> = l.iter().map(|x| -x.clone()).collect();
            push(&neg);
        }
        Self::new(ambient_dim, ineqs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn is_empty(&self) -> bool {
        self.hom.rays.iter().all(|r| r[self.ambient_dim].is_zero())
    }

    fn nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyPolytope)
        } else {
            Ok(())
        }
    }

    /// Points of the minimal faces (vertices when the polytope has no lines).
    pub fn points(&self) -> Vec<Vec<Rat>> {
        let m = self.ambient_dim;
        self.hom
            .rays
            .iter()
            .filter(|r| r[m].is_positive())
            .map(|r| {
                let t = Rat::from_integer(r[m].clone());
                r[..m].iter().map(|x| Rat::from_integer(x.clone()) / &t).collect()
            })
            .collect()
    }

    /// Vertices; empty when the polytope contains a line.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        if self.contains_lines() {
            Vec::new()
        } else {
            self.points()
        }
    }

    /// Extreme rays of the recession cone, modulo lines.
    pub fn rays(&self) -> Vec<Vec<Int>> {
        let m = self.ambient_dim;
        self.hom.rays.iter().filter(|r| r[m].is_zero()).map(|r| r[..m].to_vec()).collect()
    }

    /// Basis of the lineality space.
    pub fn lines(&self) -> Vec<Vec<Int>> {
        self.hom.lines.iter().map(|l| l[..self.ambient_dim].to_vec()).collect()
    }

    pub fn contains_lines(&self) -> bool {
        !self.hom.lines.is_empty()
    }

    /// Closed with no face declared open.
    pub fn is_complete(&self) -> bool {
        self.inequalities.iter().all(|i| !i.open)
    }

    pub fn is_bounded(&self) -> bool {
        !self.contains_lines() && self.rays().is_empty()
    }

    pub fn contains(&self, y: &[Rat]) -> bool {
        self.inequalities.iter().all(|i| !i.eval(y).is_negative())
    }

    /// Saturated lattice spanned by the recession directions; its rank is `k`.
    pub fn unbounded_span(&self) -> Result<Saturation> {
        self.nonempty()?;
        let mut gens = self.rays();
        gens.extend(self.lines());
        Ok(Saturation::of_generators(&gens, self.ambient_dim))
    }

    /// A point in the relative interior: barycenter of the minimal-face
    /// points pushed along every ray.
    pub fn relative_interior_point(&self) -> Result<Vec<Rat>> {
        self.nonempty()?;
        let pts = self.points();
        let n = Rat::from_integer(Int::from(pts.len() as i64));
        let mut p = vec![Rat::zero(); self.ambient_dim];
        for q in &pts {
            for (a, b) in p.iter_mut().zip(q) {
                *a += b / &n;
            }
        }
        for r in self.rays() {
            for (a, b) in p.iter_mut().zip(&r) {
                *a += Rat::from_integer(b.clone());
            }
        }
        Ok(p)
    }

    /// Polytope cut out by both systems.
    pub fn intersection(&self, other: &Polytope) -> Polytope {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut ineqs = self.inequalities.clone();
        ineqs.extend(other.inequalities.iter().cloned());
        Polytope::new(self.ambient_dim, ineqs)
    }

    /// Image under `y -> A y` for an integer matrix with `ambient_dim` columns.
    pub fn image(&self, a: &super::IntegerMatrix) -> Polytope {
        assert_eq!(a.cols(), self.ambient_dim);
        let aq = a.to_rational();
        let points: Vec<Vec<Rat>> = self.points().iter().map(|p| aq.mul_vec(p)).collect();
        let apply = |v: &Vec<Int>| -> Vec<Int> { (0..a.rows()).map(|i| dot_int(a.row(i), v)).collect() };
        let rays: Vec<Vec<Int>> = self.rays().iter().map(apply).collect();
        let lines: Vec<Vec<Int>> = self.lines().iter().map(apply).collect();
        Polytope::from_generators(a.rows(), &points, &rays, &lines)
    }

    /// Whether every point of `self` lies in `other` (generator test).
    pub fn is_subset_of(&self, other: &Polytope) -> bool {
        if self.is_empty() {
            return true;
        }
        let rec_ok = |v: &[Int]| {
            other.inequalities.iter().all(|i| !dot_int(&i.normal, v).is_negative())
        };
        self.points().iter().all(|p| other.contains(p))
            && self.rays().iter().all(|r| rec_ok(r))
            && self.lines().iter().all(|l| {
                let neg: Vec<Int> = l.iter().map(|x| -x.clone()).collect();
                rec_ok(l) && rec_ok(&neg)
            })
    }

    pub fn same_set(&self, other: &Polytope) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// Dimension of the affine hull (`None` when empty).
    pub fn dim(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let all: Vec<usize> = (0..self.hom.rays.len()).collect();
        Some(self.face_dim(&all))
    }

    fn face_dim(&self, rays: &[usize]) -> usize {
        let width = self.ambient_dim + 1;
        let mut rows: Vec<Vec<Rat>> = rays
            .iter()
            .map(|&i| self.hom.rays[i].iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        rows.extend(self.hom.lines.iter().map(|l| l.iter().map(|x| Rat::from_integer(x.clone())).collect()));
        QMatrix::from_rows(rows, width).rank() - 1
    }

    /// All nonempty faces ordered by dimension, then by generator index set.
    pub fn face_lattice(&self) -> Result<FaceLattice> {
        self.nonempty()?;
        let m = self.ambient_dim;
        let rows: Vec<Vec<Int>> = self.inequalities.iter().map(Inequality::homogenized).collect();
        let zero_on = |i: usize, g: usize| dot_int(&rows[i], &self.hom.rays[g]).is_zero();
        let finite = |set: &BTreeSet<usize>| set.iter().any(|&g| self.hom.rays[g][m].is_positive());

        let top: BTreeSet<usize> = (0..self.hom.rays.len()).collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let mut queue = VecDeque::from([top.clone()]);
        seen.insert(top);
        while let Some(face) = queue.pop_front() {
            for i in 0..rows.len() {
                let sub: BTreeSet<usize> = face.iter().copied().filter(|&g| zero_on(i, g)).collect();
                if sub.len() == face.len() || !finite(&sub) {
                    continue;
                }
                if seen.insert(sub.clone()) {
                    queue.push_back(sub);
                }
            }
        }

        let mut faces: Vec<Face> = seen
            .into_iter()
            .map(|set| {
                let gens: Vec<usize> = set.into_iter().collect();
                let tight = (0..rows.len()).filter(|&i| gens.iter().all(|&g| zero_on(i, g))).collect();
                let mut points = Vec::new();
                let mut rays = Vec::new();
                for &g in &gens {
                    let r = &self.hom.rays[g];
                    if r[m].is_positive() {
                        let t = Rat::from_integer(r[m].clone());
                        points.push(r[..m].iter().map(|x| Rat::from_integer(x.clone()) / &t).collect());
                    } else {
                        rays.push(r[..m].to_vec());
                    }
                }
                Face { dim: self.face_dim(&gens), generators: gens, tight, points, rays, lines: self.lines() }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.generators.cmp(&b.generators)));

        let mut below = vec![Vec::new(); faces.len()];
        for (i, f) in faces.iter().enumerate() {
            for (j, g) in faces.iter().enumerate() {
                if i != j && g.dim < f.dim && g.generators.iter().all(|x| f.generators.contains(x)) {
                    below[i].push(j);
                }
            }
        }
        Ok(FaceLattice { faces, below })
    }
}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .inequalities
            .iter()
            .map(|i| {
                let a: Vec<String> = i.normal.iter().map(|x| x.to_string()).collect();
                format!("{} {} {}", a.join(" "), if i.open { ">" } else { ">=" }, i.rhs)
            })
            .collect();
        write!(f, "Polytope(m={}; {})", self.ambient_dim, parts.join("; "))
    }
}

/// A face of a polytope, recorded through the generators it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    generators: Vec<usize>,
    /// Indices of the polytope's inequalities that are equalities on the face.
    pub tight: Vec<usize>,
    pub points: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Int>>,
    pub lines: Vec<Vec<Int>>,
}

impl Face {
    /// Zero-dimensional faces are the corners carrying smooth strata.
    pub fn is_corner(&self) -> bool {
        self.dim == 0
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    /// Saturated lattice of directions parallel to the face.
    pub fn direction_lattice(&self, ambient: usize) -> Saturation {
        let mut gens: Vec<Vec<Int>> = Vec::new();
        if let Some(p0) = self.points.first() {
            for p in &self.points[1..] {
                let d: Vec<Rat> = p.iter().zip(p0).map(|(a, b)| a - b).collect();
                gens.push(primitive_integer(&d));
            }
        }
        gens.extend(self.rays.iter().cloned());
        gens.extend(self.lines.iter().cloned());
        gens.retain(|g| g.iter().any(|x| !x.is_zero()));
        Saturation::of_generators(&gens, ambient)
    }

    /// Saturated lattice of the face's recession directions.
    pub fn recession_lattice(&self, ambient: usize) -> Saturation {
        let mut gens = self.rays.clone();
        gens.extend(self.lines.iter().cloned());
        Saturation::of_generators(&gens, ambient)
    }

    /// The face as a polytope in its own right: tight inequalities become equalities.
    pub fn as_polytope(&self, parent: &Polytope) -> Polytope {
        let mut ineqs: Vec<Inequality> =
            parent.inequalities.iter().map(|i| Inequality { open: false, ..i.clone() }).collect();
        for &t in &self.tight {
            let i = &parent.inequalities[t];
            ineqs.push(Inequality {
                normal: i.normal.iter().map(|x| -x.clone()).collect(),
                rhs: -i.rhs.clone(),
                open: false,
            });
        }
        Polytope::new(parent.ambient_dim, ineqs)
    }

    /// Barycenter of the points pushed along every ray.
    pub fn relative_interior_point(&self) -> Vec<Rat> {
        let n = Rat::from_integer(Int::from(self.points.len() as i64));
        let dim = self.points[0].len();
        let mut p = vec![Rat::zero(); dim];
        for q in &self.points {
            for (a, b) in p.iter_mut().zip(q) {
                *a += b / &n;
            }
        }
        for r in &self.rays {
            for (a, b) in p.iter_mut().zip(r) {
                *a += Rat::from_integer(b.clone());
            }
        }
        p
    }

    pub fn contains_face(&self, other: &Face) -> bool {
        other.generators.iter().all(|g| self.generators.contains(g))
    }
}

/// Faces with their covering relation (`below[i]` = faces strictly inside face `i`).
#[derive(Clone, Debug)]
pub struct FaceLattice {
    pub faces: Vec<Face>,
    pub below: Vec<Vec<usize>>,
}

impl FaceLattice {
    pub fn corners(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.is_corner())
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let top = self.faces.iter().map(|f| f.dim).max().unwrap_or(0);
        let mut counts = vec![0; top + 1];
        for f in &self.faces {
            counts[f.dim] += 1;
        }
        counts
    }

    /// Smallest face containing both, found by generator-set intersection.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let common: Vec<usize> = self.faces[a]
            .generators
            .iter()
            .copied()
            .filter(|g| self.faces[b].generators.contains(g))
            .collect();
        self.faces.iter().position(|f| f.generators == common)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn interval() -> Polytope {
        Polytope::product_of_intervals(&[(0, Some(1))])
    }

    #[test]
    fn interval_faces() {
        let fl = interval().face_lattice().unwrap();
        assert_eq!(fl.count_by_dim(), vec![2, 1]);
        assert_eq!(fl.corners().count(), 2);
    }

    #[test]
    fn ray_faces() {
        let p = Polytope::quadrant(1);
        let fl = p.face_lattice().unwrap();
        assert_eq!(fl.count_by_dim(), vec![1, 1]);
        assert_eq!(p.rays(), vec![vec![Int::from(1)]]);
        assert!(p.is_complete());
        assert!(!p.contains_lines());
    }

    #[test]
    fn quadrant_faces() {
        let fl = Polytope::quadrant(2).face_lattice().unwrap();
        assert_eq!(fl.count_by_dim(), vec![1, 2, 1]);
    }

    #[test]
    fn line_has_no_corners() {
        let p = Polytope::whole_space(1);
        assert!(p.contains_lines());
        assert!(p.is_complete());
        let fl = p.face_lattice().unwrap();
        assert_eq!(fl.faces.len(), 1);
        assert_eq!(fl.corners().count(), 0);
        assert_eq!(p.unbounded_span().unwrap().rank, 1);
    }

    #[test]
    fn empty_polytope_errors() {
        let p = Polytope::new(1, vec![Inequality::new(&[1], rat(1)), Inequality::new(&[-1], rat(0))]);
        assert!(p.is_empty());
        assert_eq!(p.face_lattice().unwrap_err(), Error::EmptyPolytope);
        assert_eq!(p.unbounded_span().unwrap_err(), Error::EmptyPolytope);
    }

    #[test]
    fn open_face_is_incomplete() {
        let p = Polytope::new(1, vec![Inequality::open(&[1], rat(0))]);
        assert!(!p.is_complete());
        assert!(!p.contains_lines());
    }

    #[test]
    fn skew_cone_spans_the_plane() {
        // b >= 0, a + b >= 0: rays (1,0) and (-1,1)
        let p = Polytope::new(2, vec![Inequality::new(&[0, 1], rat(0)), Inequality::new(&[1, 1], rat(0))]);
        let mut rays = p.rays();
        rays.sort();
        assert_eq!(rays, vec![vec![Int::from(-1), Int::from(1)], vec![Int::from(1), Int::from(0)]]);
        assert_eq!(p.unbounded_span().unwrap().rank, 2);
    }

    #[test]
    fn generators_roundtrip() {
        let p = Polytope::product_of_intervals(&[(0, None), (0, Some(1))]);
        let q = Polytope::from_generators(2, &p.points(), &p.rays(), &p.lines());
        assert!(p.same_set(&q));
        let empty = Polytope::from_generators(2, &[], &[], &[]);
        assert!(empty.is_empty());
    }

    #[test]
    fn face_as_polytope_satisfies_its_inequalities() {
        let p = Polytope::product_of_intervals(&[(0, Some(1)), (0, None)]);
        let fl = p.face_lattice().unwrap();
        for f in &fl.faces {
            let fp = f.as_polytope(&p);
            assert_eq!(fp.dim(), Some(f.dim));
            for q in &f.points {
                assert!(fp.contains(q));
            }
        }
    }
}
