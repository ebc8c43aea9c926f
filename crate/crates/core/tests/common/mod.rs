#![allow(dead_code)]

use explode_core::cech::{CoverManifest, GluingClass};
use explode_core::chart::ChartSignature;
use explode_core::lattice::{Fan, Int, IntegerMatrix, Polytope, QMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn v(xs: &[i64]) -> Vec<Int> {
    xs.iter().map(|&x| Int::from(x)).collect()
}

fn fan_from(dim: usize, cones: &[&[&[i64]]]) -> Fan {
    let gens: Vec<Vec<Vec<Int>>> = cones.iter().map(|c| c.iter().map(|r| v(r)).collect()).collect();
    Fan::new(dim, &gens).unwrap()
}

pub fn p1() -> Fan {
    fan_from(1, &[&[&[1]], &[&[-1]]])
}

pub fn p2() -> Fan {
    fan_from(2, &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[-1, -1]], &[&[-1, -1], &[1, 0]]])
}

pub fn p1_x_p1() -> Fan {
    fan_from(
        2,
        &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[-1, 0]], &[&[-1, 0], &[0, -1]], &[&[0, -1], &[1, 0]]],
    )
}

pub fn hirzebruch1() -> Fan {
    fan_from(
        2,
        &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[-1, 1]], &[&[-1, 1], &[0, -1]], &[&[0, -1], &[1, 0]]],
    )
}

/// Quadrant-class cover whose nerve is the given downward-closed complex;
/// every chart and overlap is `T^1_{[0,inf)}` with identity gluing.
pub fn quadrant_manifest(vertices: usize, simplices: &[Vec<usize>]) -> CoverManifest {
    let ray = ChartSignature::new(0, Polytope::quadrant(1));
    let name = |i: usize| format!("u{i}");
    let mut m = CoverManifest::new(GluingClass::Quadrant);
    for i in 0..vertices {
        m.add_chart(name(i), ray.clone());
    }
    for s in simplices.iter().filter(|s| s.len() >= 2) {
        let names: Vec<String> = s.iter().map(|&i| name(i)).collect();
        let maps: Vec<(String, IntegerMatrix)> =
            names.iter().map(|n| (n.clone(), IntegerMatrix::identity(1))).collect();
        m.add_overlap(&names, ray.clone(), &maps);
    }
    m
}

/// All proper faces of the 3-simplex: its boundary, a 2-sphere.
pub fn tetrahedron_faces() -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..15 {
        out.push((0..4).filter(|i| mask >> i & 1 == 1).collect());
    }
    out
}

const PRIME: i64 = 1_000_000_007;

fn rank_mod_p(mut rows: Vec<Vec<i64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        let inv = pow_mod(rows[rank][c], PRIME - 2);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c] * inv % PRIME;
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] - f * rows[rank][k]).rem_euclid(PRIME);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: i64, mut e: i64) -> i64 {
    let mut acc = 1;
    b = b.rem_euclid(PRIME);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    acc
}

/// Simplicial cohomology Betti numbers of a complex given by all its
/// simplices (sorted vertex lists), computed from coboundary ranks mod a
/// large prime.
pub fn nerve_betti(simplices: &[Vec<usize>]) -> Vec<usize> {
    let top = simplices.iter().map(Vec::len).max().unwrap_or(1);
    let by_dim: Vec<Vec<&Vec<usize>>> =
        (1..=top).map(|k| simplices.iter().filter(|s| s.len() == k).collect()).collect();
    let ranks: Vec<usize> = (0..top.saturating_sub(1))
        .map(|p| {
            let rows: Vec<Vec<i64>> = by_dim[p + 1]
                .iter()
                .map(|big| {
                    by_dim[p]
                        .iter()
                        .map(|small| match (0..big.len()).find(|&a| {
                            let mut f = (*big).clone();
                            f.remove(a);
                            &f == *small
                        }) {
                            Some(a) if a % 2 == 0 => 1,
                            Some(_) => PRIME - 1,
                            None => 0,
                        })
                        .collect()
                })
                .collect();
            rank_mod_p(rows)
        })
        .collect();
    (0..top)
        .map(|p| {
            let out = ranks.get(p).copied().unwrap_or(0);
            let inc = if p == 0 { 0 } else { ranks[p - 1] };
            by_dim[p].len() - out - inc
        })
        .collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    QMatrix::from_i64_rows(&data, cols)
}

/// Random transverse pair `A -> C <- B` with all dims at most 5.
pub fn transverse_pair(rng: &mut ChaCha8Rng) -> (QMatrix, QMatrix) {
    loop {
        let c = rng.gen_range(0..=5);
        let a = rng.gen_range(0..=5);
        let b = rng.gen_range(0..=5);
        let (f, g) = (random_matrix(rng, c, a), random_matrix(rng, c, b));
        if f.hstack(&g).rank() == c {
            return (f, g);
        }
    }
}
