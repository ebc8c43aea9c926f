//! Double description: generators of a polyhedral cone `{x : A x >= 0}`.
//!
//! Incremental over the rows of `A`. Lineality is tracked explicitly; when a
//! row cuts a line, the first such line (in index order) becomes a ray.
//! Rays are combined only across combinatorially adjacent pairs.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::matrix::{dot_int, primitive, primitive_integer, Int, QMatrix, Rat};

/// Generators of a cone: `cone = span(lines) + cone(rays)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeGenerators {
    pub lines: Vec<Vec<Int>>,
    pub rays: Vec<Vec<Int>>,
}

pub fn cone_generators(rows: &[Vec<Int>], dim: usize) -> ConeGenerators {
    let mut lines: Vec<Vec<Int>> = (0..dim)
        .map(|i| {
            let mut e = vec![Int::zero(); dim];
            e[i] = Int::from(1);
            e
        })
        .collect();
    let mut rays: Vec<Vec<Int>> = Vec::new();

    for (step, h) in rows.iter().enumerate() {
        debug_assert_eq!(h.len(), dim);
        if let Some(pos) = lines.iter().position(|l| !dot_int(h, l).is_zero()) {
            let mut pivot = lines.remove(pos);
            if dot_int(h, &pivot).is_negative() {
                pivot.iter_mut().for_each(|x| *x = -x.clone());
            }
            let hp = dot_int(h, &pivot);
            for l in lines.iter_mut() {
                let hl = dot_int(h, l);
                if !hl.is_zero() {
                    *l = primitive(&combine(&hp, l, &hl, &pivot));
                }
            }
            for r in rays.iter_mut() {
                let hr = dot_int(h, r);
                if !hr.is_zero() {
                    *r = primitive(&combine(&hp, r, &hr, &pivot));
                }
            }
            rays.push(pivot);
            continue;
        }

        let processed = &rows[..step];
        let zero_sets: Vec<BTreeSet<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| dot_int(a, r).is_zero())
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let values: Vec<Int> = rays.iter().map(|r| dot_int(h, r)).collect();
        let mut next = Vec::new();
        for (r, v) in rays.iter().zip(&values) {
            if !v.is_negative() {
                next.push(r.clone());
            }
        }
        for (p, vp) in values.iter().enumerate().filter(|(_, v)| v.is_positive()) {
            for (n, vn) in values.iter().enumerate().filter(|(_, v)| v.is_negative()) {
                let common: BTreeSet<usize> = zero_sets[p].intersection(&zero_sets[n]).copied().collect();
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != n)
                    .all(|r| !common.is_subset(&zero_sets[r]));
                if adjacent {
                    // vp * n - vn * p, both coefficients positive
                    next.push(primitive(&combine(vp, &rays[n], vn, &rays[p])));
                }
            }
        }
        rays = next;
    }

    // Canonical representatives: rays orthogonal to the lineality space.
    let rays = if lines.is_empty() {
        rays
    } else {
        let l = QMatrix::from_rows(
            lines.iter().map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect(),
            dim,
        );
        let gram_inv = (&l * &l.transpose()).inverse().expect("lines are independent");
        rays.iter()
            .map(|r| {
                let rv: Vec<Rat> = r.iter().map(|x| Rat::from_integer(x.clone())).collect();
                let coeffs = gram_inv.mul_vec(&l.mul_vec(&rv));
                let mut out = rv.clone();
                for (c, line) in coeffs.iter().zip(0..lines.len()) {
                    for j in 0..dim {
                        out[j] -= c * l.get(line, j);
                    }
                }
                primitive_integer(&out)
            })
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect()
    };
    let mut uniq: Vec<Vec<Int>> = Vec::new();
    for r in rays {
        if !uniq.contains(&r) {
            uniq.push(r);
        }
    }
    uniq.sort();
    let mut lines: Vec<Vec<Int>> = lines.into_iter().map(|l| primitive(&l)).collect();
    canonicalize_lines(&mut lines, dim);
    ConeGenerators { lines, rays: uniq }
}

/// `a * x - b * y`
fn combine(a: &Int, x: &[Int], b: &Int, y: &[Int]) -> Vec<Int> {
    x.iter().zip(y).map(|(xi, yi)| a * xi - b * yi).collect()
}

/// Replace a line basis by the primitive rows of its reduced echelon form.
fn canonicalize_lines(lines: &mut Vec<Vec<Int>>, dim: usize) {
    if lines.is_empty() {
        return;
    }
    let m = QMatrix::from_rows(
        lines.iter().map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect(),
        dim,
    );
    let (r, pivots) = m.rref();
    *lines = (0..pivots.len()).map(|i| primitive_integer(r.row(i))).collect();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Int>> {
        rows.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect()
    }

    #[test]
    fn positive_quadrant() {
        let g = cone_generators(&ints(&[&[1, 0], &[0, 1]]), 2);
        assert!(g.lines.is_empty());
        assert_eq!(g.rays, ints(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn half_plane_has_a_line() {
        let g = cone_generators(&ints(&[&[0, 1]]), 2);
        assert_eq!(g.lines, ints(&[&[1, 0]]));
        assert_eq!(g.rays, ints(&[&[0, 1]]));
    }

    #[test]
    fn unconstrained_space_is_all_lines() {
        let g = cone_generators(&[], 3);
        assert_eq!(g.lines.len(), 3);
        assert!(g.rays.is_empty());
    }

    #[test]
    fn square_pyramid_has_four_rays() {
        // cone over the square [-1,1]^2 at height 1
        let rows = ints(&[&[1, 0, 1], &[-1, 0, 1], &[0, 1, 1], &[0, -1, 1]]);
        let g = cone_generators(&rows, 3);
        assert!(g.lines.is_empty());
        assert_eq!(g.rays.len(), 4);
        for r in &g.rays {
            assert_eq!(r[2], Int::from(1));
        }
    }

    #[test]
    fn zero_cone() {
        let g = cone_generators(&ints(&[&[1], &[-1]]), 1);
        assert!(g.lines.is_empty());
        assert!(g.rays.is_empty());
    }
}
