//! Orientation conventions for kernels, cokernels and fiber products of
//! linear maps, computed exactly over `Q`.
//!
//! A map `A: X -> Y` orients `ker A` relative to `coker A` through the block
//! map `A': coker A (+) X -> ker A (+) Y`, which sends a cokernel vector to
//! itself as an element of `im(A)^perp`, and `x` to its orthogonal projection
//! onto `ker A` together with `A x`. Fiber products are oriented by
//! `coker df (+) T(A x_C B) (+) coker dg = ker df (+) TC (+) ker dg`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{sign_of, Int, QMatrix, Rat};

/// A subspace of `Q^n` spanned by the columns of `basis`, oriented as
/// `sign` times the orientation of that basis. A zero-dimensional space is
/// just a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedSubspace {
    pub basis: QMatrix,
    pub sign: i32,
}

impl OrientedSubspace {
    pub fn standard(n: usize) -> Self {
        OrientedSubspace { basis: QMatrix::identity(n), sign: 1 }
    }

    pub fn new(basis: QMatrix, sign: i32) -> Self {
        OrientedSubspace { basis, sign }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    /// `+1` if both orient the same subspace the same way, `-1` if
    /// opposite, `None` if the spans differ.
    pub fn compare(&self, other: &OrientedSubspace) -> Option<i32> {
        if self.dim() != other.dim() || self.ambient() != other.ambient() {
            return None;
        }
        if self.dim() == 0 {
            return Some(self.sign * other.sign);
        }
        let t = other.basis.solve(&self.basis)?;
        if &other.basis * &t != self.basis {
            return None;
        }
        Some(sign_of(&t.determinant()) * self.sign * other.sign)
    }

    /// Orientation relative to the standard one; only for full subspaces.
    pub fn ambient_sign(&self) -> Option<i32> {
        (self.dim() == self.ambient()).then(|| self.sign * sign_of(&self.basis.determinant()))
    }

    /// Same orientation, basis mapped through `m`.
    pub fn map(&self, m: &QMatrix) -> OrientedSubspace {
        OrientedSubspace { basis: m * &self.basis, sign: self.sign }
    }
}

/// A linear map between oriented spaces; the spaces are `Q^k` with the
/// standard orientation times the given signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedMap {
    pub matrix: QMatrix,
    pub source_sign: i32,
    pub target_sign: i32,
}

impl OrientedMap {
    pub fn new(matrix: QMatrix) -> Self {
        OrientedMap { matrix, source_sign: 1, target_sign: 1 }
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Which side the kernel and cokernel sit on: `coker (+) X = ker (+) Y`
/// or `X (+) coker = Y (+) ker`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeOrientation {
    /// Columns spanning `ker A`.
    pub kernel: QMatrix,
    /// Columns spanning `im(A)^perp`.
    pub cokernel: QMatrix,
    /// Sign of `det A'` in these bases: the kernel basis is positively
    /// oriented relative to the cokernel basis iff this is `+1`.
    pub sign: i32,
}

fn columns(vs: Vec<Vec<Rat>>, rows: usize) -> QMatrix {
    QMatrix::from_cols(&vs, rows)
}

/// Coordinates of the orthogonal projection onto `span(k)` in the basis `k`.
fn projection_coordinates(k: &QMatrix) -> QMatrix {
    if k.cols() == 0 {
        return QMatrix::zeros(0, k.rows());
    }
    let kt = k.transpose();
    let gram = (&kt * k).inverse().expect("kernel basis is independent");
    &gram * &kt
}

/// Block matrix from a grid of optional blocks with given row/column sizes.
fn blocks(rows: &[usize], cols: &[usize], parts: &[(usize, usize, &QMatrix)]) -> QMatrix {
    let mut out = QMatrix::zeros(rows.iter().sum(), cols.iter().sum());
    for &(bi, bj, m) in parts {
        let r0: usize = rows[..bi].iter().sum();
        let c0: usize = cols[..bj].iter().sum();
        debug_assert_eq!((m.rows(), m.cols()), (rows[bi], cols[bj]));
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(r0 + i, c0 + j, m.get(i, j).clone());
            }
        }
    }
    out
}

fn det_sign(m: &QMatrix) -> i32 {
    if m.rows() == 0 {
        1
    } else {
        sign_of(&m.determinant())
    }
}

pub fn relative_orientation(a: &QMatrix, placement: Placement) -> RelativeOrientation {
    let (y, x) = (a.rows(), a.cols());
    let kernel = columns(a.kernel(), x);
    let cokernel = columns(a.transpose().kernel(), y);
    let proj = projection_coordinates(&kernel);
    let (dk, dc) = (kernel.cols(), cokernel.cols());
    let m = match placement {
        Placement::Left => blocks(&[dk, y], &[dc, x], &[(0, 1, &proj), (1, 0, &cokernel), (1, 1, a)]),
        Placement::Right => blocks(&[y, dk], &[x, dc], &[(0, 0, a), (1, 0, &proj), (0, 1, &cokernel)]),
    };
    RelativeOrientation { kernel, cokernel, sign: det_sign(&m) }
}

fn transverse(df: &QMatrix, dg: &QMatrix) -> bool {
    df.hstack(&dg.scale(&-Rat::one())).rank() == df.rows()
}

/// Oriented `T(A x_C B)` as a subspace of `TA (+) TB`.
pub fn fiber_product_orientation(df: &OrientedMap, dg: &OrientedMap) -> Result<OrientedSubspace> {
    let (f, g) = (&df.matrix, &dg.matrix);
    let (a, b, c) = (f.cols(), g.cols(), f.rows());
    if g.rows() != c {
        return Err(Error::ShapeError { expected: (c, b), found: (g.rows(), g.cols()) });
    }
    if !transverse(f, g) {
        return Err(Error::NotTransverse);
    }
    let rf = relative_orientation(f, Placement::Left);
    let rg = relative_orientation(g, Placement::Right);
    let joint = f.hstack(&g.scale(&-Rat::one()));
    let fp = columns(joint.kernel(), a + b);
    let d = fp.cols();
    let alpha = fp.select_rows(&(0..a).collect::<Vec<_>>());
    let beta = fp.select_rows(&(a..a + b).collect::<Vec<_>>());
    let kf = &projection_coordinates(&rf.kernel) * &alpha;
    let kg = &projection_coordinates(&rg.kernel) * &beta;
    let image = f * &alpha;
    let (dkf, dkg, dcf, dcg) = (rf.kernel.cols(), rg.kernel.cols(), rf.cokernel.cols(), rg.cokernel.cols());
    let m = blocks(
        &[dkf, c, dkg],
        &[dcf, d, dcg],
        &[(1, 0, &rf.cokernel), (0, 1, &kf), (1, 1, &image), (2, 1, &kg), (1, 2, &rg.cokernel)],
    );
    // Orientation signs of the three factors flip ker df, TC and ker dg in
    // turn; A and B enter through the relative orientations.
    let sign = det_sign(&m) * rf.sign * rg.sign * df.source_sign * dg.source_sign * df.target_sign;
    debug_assert_eq!(df.target_sign, dg.target_sign);
    Ok(OrientedSubspace { basis: fp, sign })
}

/// Convenience wrapper with all spaces standard-oriented.
pub fn fiber_product(df: &QMatrix, dg: &QMatrix) -> Result<OrientedSubspace> {
    fiber_product_orientation(&OrientedMap::new(df.clone()), &OrientedMap::new(dg.clone()))
}

/// Sign of `T(A x_C B) (+) TC = T(A x B)`, the normal directions being
/// identified with `TC` through `df - dg`.
pub fn normal_bundle_sign(df: &QMatrix, dg: &QMatrix) -> Result<i32> {
    let fp = fiber_product(df, dg)?;
    let joint = df.hstack(&dg.scale(&-Rat::one()));
    let lifts = joint.solve(&QMatrix::identity(df.rows())).ok_or(Error::NotTransverse)?;
    Ok(fp.sign * det_sign(&fp.basis.hstack(&lifts)))
}

/// Sign comparing `B x_C A` (coordinates swapped back) with `A x_C B`.
pub fn swap_sign(df: &QMatrix, dg: &QMatrix) -> Result<i32> {
    let ab = fiber_product(df, dg)?;
    let ba = fiber_product(dg, df)?;
    let (a, b) = (df.cols(), dg.cols());
    let mut swap = QMatrix::zeros(a + b, a + b);
    for i in 0..b {
        swap.set(a + i, i, Rat::one());
    }
    for i in 0..a {
        swap.set(i, b + i, Rat::one());
    }
    Ok(ba.map(&swap).compare(&ab).expect("both span the same fiber product"))
}

/// Oriented complement `N` with `T (+) N` positively oriented in the ambient
/// space, where `T` is spanned by the columns of `tangent`.
fn normal_space(tangent: &QMatrix) -> OrientedSubspace {
    let n = tangent.rows();
    let normal = columns(tangent.transpose().kernel(), n);
    let sign = det_sign(&tangent.hstack(&normal));
    OrientedSubspace { basis: normal, sign }
}

/// For subspaces `A`, `B` of `M` given by oriented bases, the sign of
/// `T(A cap B) (+) N_B (+) N_A = TM` with the fiber-product orientation on
/// `A cap B` and normals oriented by `TA (+) N_A = TM`.
pub fn intersection_sign(a: &QMatrix, b: &QMatrix) -> Result<i32> {
    let fp = fiber_product(a, b)?;
    let alpha = fp.basis.select_rows(&(0..a.cols()).collect::<Vec<_>>());
    let inside = a * &alpha;
    let (na, nb) = (normal_space(a), normal_space(b));
    Ok(fp.sign * nb.sign * na.sign * det_sign(&inside.hstack(&nb.basis).hstack(&na.basis)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociativityReport {
    /// The three parenthesizations, as subspaces of `TA (+) TB (+) TC`.
    pub left: OrientedSubspace,
    pub right: OrientedSubspace,
    pub middle: OrientedSubspace,
}

impl AssociativityReport {
    pub fn passed(&self) -> bool {
        self.left.compare(&self.middle) == Some(1) && self.right.compare(&self.middle) == Some(1)
    }
}

fn block_diag(a: &QMatrix, b: &QMatrix) -> QMatrix {
    blocks(&[a.rows(), b.rows()], &[a.cols(), b.cols()], &[(0, 0, a), (1, 1, b)])
}

fn select_range(m: &QMatrix, r: std::ops::Range<usize>) -> QMatrix {
    m.select_rows(&r.collect::<Vec<_>>())
}

/// Compares `A x (B x C)`, `(A x B) x C` and `(A x B) x_B (B x C)` for
/// `A -f-> M1 <-g- B -h-> M2 <-k- C`.
pub fn associativity_check(f: &QMatrix, g: &QMatrix, h: &QMatrix, k: &QMatrix) -> Result<AssociativityReport> {
    let (a, b, c) = (f.cols(), g.cols(), k.cols());
    let ab = fiber_product(f, g)?;
    let bc = fiber_product(h, k)?;
    let as_map = |s: &OrientedSubspace, m: QMatrix| OrientedMap { matrix: m, source_sign: s.sign, target_sign: 1 };
    let std = |m: &QMatrix| OrientedMap::new(m.clone());

    // A x_{f, g k'} (B x_{h,k} C)
    let bc_to_b = select_range(&bc.basis, 0..b);
    let left = fiber_product_orientation(&std(f), &as_map(&bc, g * &bc_to_b))?;
    let left = left.map(&block_diag(&QMatrix::identity(a), &bc.basis));

    // (A x_{f,g} B) x_{h f', k} C
    let ab_to_b = select_range(&ab.basis, a..a + b);
    let right = fiber_product_orientation(&as_map(&ab, h * &ab_to_b), &std(k))?;
    let right = right.map(&block_diag(&ab.basis, &QMatrix::identity(c)));

    // (A x_{f,g} B) x_{f', k'} (B x_{h,k} C), then forget the repeated B
    let middle = fiber_product_orientation(&as_map(&ab, ab_to_b), &as_map(&bc, bc_to_b))?;
    let middle = middle.map(&block_diag(&ab.basis, &bc.basis));
    let forget = {
        let mut m = QMatrix::zeros(a + b + c, a + b + b + c);
        for i in 0..a + b {
            m.set(i, i, Rat::one());
        }
        for i in 0..c {
            m.set(a + b + i, a + 2 * b + i, Rat::one());
        }
        m
    };
    let middle = middle.map(&forget);
    Ok(AssociativityReport { left, right, middle })
}

/// Exact polynomial over `Q`, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
struct RatPoly(Vec<Rat>);

impl RatPoly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    /// Newton interpolation through `(i, values[i])`.
    fn interpolate(values: &[Rat]) -> RatPoly {
        let n = values.len();
        let mut coef = values.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                coef[i] = (&coef[i] - &coef[i - 1]) / Rat::from_integer((j as i64).into());
            }
        }
        let mut poly = vec![Rat::zero(); n];
        for i in (0..n).rev() {
            // poly = poly * (t - i) + coef[i]
            let mut next = vec![Rat::zero(); n];
            for (d, c) in poly.iter().enumerate() {
                if d + 1 < n {
                    next[d + 1] += c;
                }
                next[d] -= c * Rat::from_integer((i as i64).into());
            }
            next[0] += &coef[i];
            poly = next;
        }
        RatPoly(poly).trim()
    }

    /// Number of distinct real roots in `(lo, hi]` by Sturm's theorem.
    fn roots_in(&self, lo: &Rat, hi: &Rat) -> usize {
        IntPoly::from_rational(self).roots_in(lo, hi)
    }
}

/// Integer polynomial, used for Sturm chains: remainders are taken by
/// pseudo-division with a positive multiplier and reduced to primitive form,
/// which keeps the signs Sturm's theorem needs and the coefficients small.
#[derive(Clone, Debug)]
struct IntPoly(Vec<Int>);

impl IntPoly {
    fn from_rational(p: &RatPoly) -> Self {
        let den = p.0.iter().fold(Int::one(), |acc, c| acc.lcm(c.denom()));
        IntPoly(p.0.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect()).primitive()
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn primitive(self) -> Self {
        let content = self.0.iter().fold(Int::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() || content.is_one() {
            return self.trim();
        }
        IntPoly(self.0.into_iter().map(|c| c / &content).collect()).trim()
    }

    fn derivative(&self) -> Self {
        IntPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * Int::from(i)).collect()).trim()
    }

    /// `|lc(d)|^k * self mod d`, a positive multiple of the true remainder.
    fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.0[dd].clone();
        let scale = lead.abs();
        let sign = Int::from(sign_of(&Rat::from_integer(lead)));
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            // r <- |lc| r - sign(lc) lc(r) x^shift d
            let top = r.last().unwrap().clone() * &sign;
            for c in r.iter_mut() {
                *c *= &scale;
            }
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &top * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPoly(r).primitive()
    }

    /// Sign of `p(a/b)` with `b > 0`, from the homogenised form.
    fn sign_at(&self, t: &Rat) -> i32 {
        let (a, b) = (t.numer(), t.denom());
        let mut acc = Int::zero();
        let mut bpow = Int::one();
        for c in self.0.iter().rev() {
            acc = acc * a + c * &bpow;
            bpow *= b;
        }
        sign_of(&Rat::from_integer(acc))
    }

    fn roots_in(&self, lo: &Rat, hi: &Rat) -> usize {
        let mut chain = vec![self.clone(), self.derivative().primitive()];
        while chain.last().is_some_and(|p| p.degree().is_some()) {
            let n = chain.len();
            let r = chain[n - 2].pseudo_rem(&chain[n - 1]);
            chain.push(IntPoly(r.0.into_iter().map(|c| -c).collect()));
        }
        let changes = |t: &Rat| {
            let signs: Vec<i32> = chain.iter().map(|p| p.sign_at(t)).filter(|&s| s != 0).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(lo) - changes(hi)
    }
}

fn lerp(a: &QMatrix, b: &QMatrix, t: &Rat) -> QMatrix {
    a.scale(&(Rat::one() - t)).add(&b.scale(t))
}

/// Whether `[df(t), -dg(t)]` stays surjective for every `t` in `[0, 1]`
/// along the straight path, decided exactly.
pub fn path_is_transverse(f0: &QMatrix, g0: &QMatrix, f1: &QMatrix, g1: &QMatrix) -> bool {
    let c = f0.rows();
    if c == 0 {
        return true;
    }
    let jacobian = |t: &Rat| lerp(f0, f1, t).hstack(&lerp(g0, g1, t).scale(&-Rat::one()));
    let at = |i: usize| Rat::from_integer((i as i64).into());
    let start = jacobian(&Rat::zero());
    let (_, pivots) = start.rref();
    if pivots.len() < c {
        return false;
    }
    // Fast path: one maximal minor that never vanishes on [0, 1] suffices.
    let minor: Vec<Rat> = (0..=c).map(|i| jacobian(&at(i)).select_cols(&pivots).determinant()).collect();
    if RatPoly::interpolate(&minor).roots_in(&Rat::zero(), &Rat::one()) == 0 {
        return true;
    }
    // Otherwise the Gram determinant, the sum of all squared maximal minors.
    let gram: Vec<Rat> = (0..=2 * c)
        .map(|i| {
            let j = jacobian(&at(i));
            (&j * &j.transpose()).determinant()
        })
        .collect();
    RatPoly::interpolate(&gram).roots_in(&Rat::zero(), &Rat::one()) == 0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityReport {
    pub samples: usize,
    /// Adjacent samples whose orientations disagree even after refinement.
    pub flips: usize,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.flips == 0
    }
}

/// Follows the fiber-product orientation along the straight path from
/// `(f0, g0)` to `(f1, g1)` and counts orientation jumps between samples.
pub fn continuity_check(
    f0: &QMatrix,
    g0: &QMatrix,
    f1: &QMatrix,
    g1: &QMatrix,
    samples: usize,
) -> Result<ContinuityReport> {
    if !path_is_transverse(f0, g0, f1, g1) {
        return Err(Error::NotTransverse);
    }
    let at = |t: &Rat| fiber_product(&lerp(f0, f1, t), &lerp(g0, g1, t));
    let agree = |p: &OrientedSubspace, q: &OrientedSubspace| -> i32 {
        if p.dim() == 0 {
            return p.sign * q.sign;
        }
        sign_of(&(&p.basis.transpose() * &q.basis).determinant()) * p.sign * q.sign
    };
    fn check(
        lo: (Rat, OrientedSubspace),
        hi: (Rat, OrientedSubspace),
        depth: u32,
        at: &dyn Fn(&Rat) -> Result<OrientedSubspace>,
        agree: &dyn Fn(&OrientedSubspace, &OrientedSubspace) -> i32,
    ) -> Result<bool> {
        if agree(&lo.1, &hi.1) > 0 {
            return Ok(true);
        }
        if depth == 0 {
            return Ok(false);
        }
        let mid_t = (&lo.0 + &hi.0) / Rat::from_integer(2.into());
        let mid = (mid_t.clone(), at(&mid_t)?);
        Ok(check(lo, mid.clone(), depth - 1, at, agree)? && check(mid, hi, depth - 1, at, agree)?)
    }
    let n = samples.max(1);
    let ts: Vec<Rat> = (0..=n).map(|i| Rat::new((i as i64).into(), (n as i64).into())).collect();
    let spaces = ts.iter().map(|t| at(t)).collect::<Result<Vec<_>>>()?;
    let mut flips = 0;
    for i in 0..n {
        if !check((ts[i].clone(), spaces[i].clone()), (ts[i + 1].clone(), spaces[i + 1].clone()), 12, &at, &agree)? {
            flips += 1;
        }
    }
    Ok(ContinuityReport { samples: n + 1, flips })
}

/// `(-1)^e`.
pub fn parity_sign(e: usize) -> i32 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Whether a rational matrix has a negative determinant (square only).
pub fn reverses_orientation(m: &QMatrix) -> bool {
    m.determinant().is_negative()
}
