use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::matrix::{primitive, Int, IntegerMatrix, Rat};
use super::polytope::Polytope;
use crate::error::{Error, Result};

/// Pointed rational polyhedral cone with apex at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    /// Primitive extreme rays, sorted.
    pub rays: Vec<Vec<Int>>,
    pub polytope: Polytope,
}

impl Cone {
    pub fn new(ambient_dim: usize, generators: &[Vec<Int>]) -> Result<Self> {
        let origin = vec![Rat::zero(); ambient_dim];
        let polytope = Polytope::from_generators(ambient_dim, &[origin], generators, &[]);
        if polytope.contains_lines() {
            return Err(Error::UnsupportedFan("cone is not pointed".into()));
        }
        let mut rays: Vec<Vec<Int>> = polytope.rays().iter().map(|r| primitive(r)).collect();
        rays.sort();
        Ok(Cone { rays, polytope })
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim().expect("cone contains the origin")
    }

    /// Faces of the cone, each returned as its sorted ray set.
    pub fn face_ray_sets(&self) -> Vec<Vec<Vec<Int>>> {
        let fl = self.polytope.face_lattice().expect("cone contains the origin");
        fl.faces
            .iter()
            .map(|f| {
                let mut r: Vec<Vec<Int>> = f.rays.iter().map(|x| primitive(x)).collect();
                r.sort();
                r
            })
            .collect()
    }
}

/// A fan given by its maximal cones; faces are implied.
#[derive(Clone, Debug)]
pub struct Fan {
    ambient_dim: usize,
    maximal: Vec<Cone>,
    /// Every cone of the fan as a sorted ray set (face-closed, deduplicated).
    cones: Vec<Vec<Vec<Int>>>,
}

impl Fan {
    pub fn new(ambient_dim: usize, generators: &[Vec<Vec<Int>>]) -> Result<Self> {
        let cones = generators.iter().map(|g| Cone::new(ambient_dim, g)).collect::<Result<Vec<_>>>()?;
        let mut maximal: Vec<Cone> = Vec::new();
        for c in cones {
            if !maximal.iter().any(|m| m.rays == c.rays) {
                maximal.push(c);
            }
        }
        let mut all: BTreeSet<Vec<Vec<Int>>> = BTreeSet::new();
        for c in &maximal {
            all.extend(c.face_ray_sets());
        }
        // Drop listed cones that are faces of other listed cones.
        let maximal: Vec<Cone> = maximal
            .iter()
            .filter(|c| {
                !generators.is_empty()
                    && !maximal.iter().any(|o| o.rays != c.rays && o.face_ray_sets().contains(&c.rays))
            })
            .cloned()
            .collect();
        let fan = Fan { ambient_dim, maximal, cones: all.into_iter().collect() };
        fan.check_intersections()?;
        Ok(fan)
    }

    fn check_intersections(&self) -> Result<()> {
        for (i, a) in self.maximal.iter().enumerate() {
            for b in &self.maximal[i + 1..] {
                let meet = a.polytope.intersection(&b.polytope);
                let mut rays: Vec<Vec<Int>> = meet.rays().iter().map(|r| primitive(r)).collect();
                rays.sort();
                if meet.contains_lines()
                    || !a.face_ray_sets().contains(&rays)
                    || !b.face_ray_sets().contains(&rays)
                {
                    return Err(Error::UnsupportedFan(format!(
                        "cones {:?} and {:?} do not meet in a common face",
                        a.rays, b.rays
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn maximal_cones(&self) -> &[Cone] {
        &self.maximal
    }

    /// All cones as ray sets, the origin cone included.
    pub fn cones(&self) -> &[Vec<Vec<Int>>] {
        &self.cones
    }

    fn cone_dim(&self, rays: &[Vec<Int>]) -> usize {
        if rays.is_empty() {
            return 0;
        }
        IntegerMatrix::from_big_rows(rays.to_vec(), self.ambient_dim).rational_rank()
    }

    /// `d[j]` = number of `j`-dimensional cones.
    pub fn cone_counts(&self) -> Vec<usize> {
        let mut d = vec![0; self.ambient_dim + 1];
        for c in &self.cones {
            d[self.cone_dim(c)] += 1;
        }
        d
    }

    /// Complete iff all maximal cones are full-dimensional and every
    /// codimension-one cone lies in exactly two of them.
    pub fn is_complete(&self) -> bool {
        let n = self.ambient_dim;
        if n == 0 || self.maximal.is_empty() || self.maximal.iter().any(|c| c.dim() != n) {
            return false;
        }
        let faces_of: Vec<Vec<Vec<Vec<Int>>>> = self.maximal.iter().map(Cone::face_ray_sets).collect();
        self.cones.iter().filter(|c| self.cone_dim(c) == n - 1).all(|c| {
            faces_of.iter().filter(|fs| fs.contains(c)).count() == 2
        })
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| self.cone_dim(c) == c.len())
    }

    /// Every maximal cone is generated by part of a lattice basis.
    pub fn is_smooth(&self) -> bool {
        self.is_simplicial()
            && self.maximal.iter().all(|c| {
                let m = IntegerMatrix::from_big_rows(c.rays.clone(), self.ambient_dim);
                super::snf::smith_normal_form(&m).diagonal().iter().all(|d| d.is_one())
            })
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Even Betti numbers `(b_0, b_2, ..., b_2n)` of the smooth complete toric
/// variety of `fan`, from its cone counts.
pub fn danilov_betti(fan: &Fan) -> Result<Vec<i64>> {
    if !fan.is_complete() {
        return Err(Error::UnsupportedFan("fan is not complete".into()));
    }
    if !fan.is_smooth() {
        return Err(Error::UnsupportedFan("fan is not smooth".into()));
    }
    let n = fan.ambient_dim();
    let d = fan.cone_counts();
    Ok((0..=n)
        .map(|k| {
            (k..=n)
                .map(|i| {
                    let sign = if (i - k) % 2 == 0 { 1 } else { -1 };
                    sign * binomial(i, k) * d[n - i] as i64
                })
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    fn p1() -> Fan {
        Fan::new(1, &[vec![v(&[1])], vec![v(&[-1])]]).unwrap()
    }

    fn p2() -> Fan {
        let (e1, e2, e3) = (v(&[1, 0]), v(&[0, 1]), v(&[-1, -1]));
        Fan::new(2, &[vec![e1.clone(), e2.clone()], vec![e2, e3.clone()], vec![e3, e1]]).unwrap()
    }

    #[test]
    fn projective_line() {
        let f = p1();
        assert_eq!(f.cone_counts(), vec![1, 2]);
        assert!(f.is_complete());
        assert_eq!(danilov_betti(&f).unwrap(), vec![1, 1]);
    }

    #[test]
    fn projective_plane() {
        let f = p2();
        assert_eq!(f.cone_counts(), vec![1, 3, 3]);
        assert_eq!(danilov_betti(&f).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn product_of_lines() {
        let q = |a: [i64; 2], b: [i64; 2]| vec![v(&a), v(&b)];
        let f = Fan::new(
            2,
            &[q([1, 0], [0, 1]), q([0, 1], [-1, 0]), q([-1, 0], [0, -1]), q([0, -1], [1, 0])],
        )
        .unwrap();
        assert_eq!(f.cone_counts(), vec![1, 4, 4]);
        assert_eq!(danilov_betti(&f).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn incomplete_fan_is_rejected() {
        let f = Fan::new(1, &[vec![v(&[1])]]).unwrap();
        assert!(!f.is_complete());
        assert!(matches!(danilov_betti(&f), Err(Error::UnsupportedFan(_))));
    }

    #[test]
    fn non_smooth_fan_is_rejected() {
        let f = Fan::new(
            2,
            &[
                vec![v(&[1, 0]), v(&[1, 2])],
                vec![v(&[1, 2]), v(&[-1, 0])],
                vec![v(&[-1, 0]), v(&[0, -1])],
                vec![v(&[0, -1]), v(&[1, 0])],
            ],
        )
        .unwrap();
        assert!(f.is_complete());
        assert!(f.is_simplicial());
        assert!(!f.is_smooth());
        assert!(matches!(danilov_betti(&f), Err(Error::UnsupportedFan(_))));
    }

    #[test]
    fn whole_line_is_not_a_pointed_cone() {
        assert!(matches!(Fan::new(1, &[vec![v(&[1]), v(&[-1])]]), Err(Error::UnsupportedFan(_))));
    }

    #[test]
    fn overlapping_cones_are_rejected() {
        let r = Fan::new(2, &[vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[1, 1]), v(&[-1, 0])]]);
        assert!(matches!(r, Err(Error::UnsupportedFan(_))));
    }
}
