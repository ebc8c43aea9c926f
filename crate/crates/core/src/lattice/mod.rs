//! Integral affine polytopes, fans and the exact integer linear algebra
//! under them.

mod dd;
mod fan;
mod matrix;
mod polytope;
mod snf;

pub use dd::{cone_generators, ConeGenerators};
pub use fan::{danilov_betti, Cone, Fan};
pub use matrix::{
    dot_int, dot_rat, primitive, primitive_integer, rat, rat_frac, sign_of, Int, IntegerMatrix, QMatrix, Rat,
};
pub use polytope::{Face, FaceLattice, Inequality, Polytope};
pub use snf::{smith_normal_form, unimodular_inverse, SmithForm};

use num_traits::{One, Zero};

/// A saturated sublattice `L` of `Z^m` together with an adapted basis of `Z^m`.
///
/// The adapted basis comes from the Smith form of the generator matrix: the
/// first `rank` rows of `basis` span `L`, the remaining rows complete it to a
/// basis of `Z^m`. `dual` is the inverse transpose, so column `i` of `dual`
/// pairs to 1 with row `i` of `basis` and to 0 with the others; the columns
/// `rank..m` therefore form a lattice basis of the annihilator of `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub ambient: usize,
    pub rank: usize,
    pub basis: IntegerMatrix,
    pub dual: IntegerMatrix,
}

impl Saturation {
    pub fn of_generators(gens: &[Vec<Int>], ambient: usize) -> Self {
        if gens.is_empty() || ambient == 0 {
            return Saturation {
                ambient,
                rank: 0,
                basis: IntegerMatrix::identity(ambient),
                dual: IntegerMatrix::identity(ambient),
            };
        }
        let m = IntegerMatrix::from_big_rows(gens.to_vec(), ambient);
        let s = smith_normal_form(&m);
        let rank = s.rank();
        let basis = unimodular_inverse(&s.v);
        Saturation { ambient, rank, basis, dual: s.v }
    }

    /// Saturated basis vectors of `L` (rows).
    pub fn lattice_basis(&self) -> Vec<Vec<Int>> {
        (0..self.rank).map(|i| self.basis.row(i).to_vec()).collect()
    }

    /// Integer covectors spanning the annihilator of `L`.
    pub fn annihilator_basis(&self) -> Vec<Vec<Int>> {
        (self.rank..self.ambient).map(|j| self.dual.col(j)).collect()
    }

    /// Covectors dual to the lattice basis of `L`.
    pub fn span_dual_basis(&self) -> Vec<Vec<Int>> {
        (0..self.rank).map(|j| self.dual.col(j)).collect()
    }

    /// Coordinates of `v` in the adapted basis (i.e. `v * dual`).
    pub fn coordinates(&self, v: &[Int]) -> Vec<Int> {
        (0..self.ambient).map(|j| dot_int(v, &self.dual.col(j))).collect()
    }

    /// Coordinates of a covector `w` against the annihilator-adapted dual basis.
    pub fn covector_coordinates(&self, w: &[Int]) -> Vec<Int> {
        (0..self.ambient).map(|i| dot_int(w, self.basis.row(i))).collect()
    }

    /// Whether `v` lies in `L`: its coordinates past `rank` vanish.
    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v)[self.rank..].iter().all(Zero::is_zero)
    }
}

/// Whether the lattice generated by `gens` is already saturated.
pub fn is_saturated(gens: &[Vec<Int>], ambient: usize) -> bool {
    if gens.is_empty() {
        return true;
    }
    let s = smith_normal_form(&IntegerMatrix::from_big_rows(gens.to_vec(), ambient));
    s.diagonal().iter().filter(|d| !d.is_zero()).all(One::is_one)
}
