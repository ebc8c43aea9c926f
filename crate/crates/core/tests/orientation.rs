mod common;

use common::{random_matrix, transverse_pair};
use explode_core::lattice::{sign_of, QMatrix};
use explode_core::orientation::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: usize = 500;

fn parity(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn products_get_the_product_orientation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..TRIALS {
        let (a, b) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
        let fp = fiber_product(&QMatrix::zeros(0, a), &QMatrix::zeros(0, b)).unwrap();
        assert_eq!(fp.ambient_sign(), Some(1));
    }
}

#[test]
fn intersections_follow_the_normal_convention() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    while done < TRIALS {
        let m = rng.gen_range(1..=5);
        let (a, b) = (rng.gen_range(0..=m), rng.gen_range(0..=m));
        let (ta, tb) = (random_matrix(&mut rng, m, a), random_matrix(&mut rng, m, b));
        if ta.rank() < a || tb.rank() < b || ta.hstack(&tb).rank() < m {
            continue;
        }
        assert_eq!(intersection_sign(&ta, &tb).unwrap(), 1);
        done += 1;
    }
}

#[test]
fn swapping_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..TRIALS {
        let (f, g) = transverse_pair(&mut rng);
        let (a, b, c) = (f.cols() as i64, g.cols() as i64, f.rows() as i64);
        assert_eq!(swap_sign(&f, &g).unwrap(), parity((a - c) * (b - c)));
    }
}

#[test]
fn orientation_is_locally_constant_along_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    while done < TRIALS {
        let (f0, g0) = transverse_pair(&mut rng);
        let f1 = random_matrix(&mut rng, f0.rows(), f0.cols());
        let g1 = random_matrix(&mut rng, g0.rows(), g0.cols());
        if !path_is_transverse(&f0, &g0, &f1, &g1) {
            continue;
        }
        assert!(continuity_check(&f0, &g0, &f1, &g1, 4).unwrap().passed());
        done += 1;
    }
}

#[test]
fn normal_bundle_identification() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..TRIALS {
        let (f, g) = transverse_pair(&mut rng);
        assert_eq!(normal_bundle_sign(&f, &g).unwrap(), parity_sign(g.cols() * f.rows()));
    }
}

#[test]
fn fiber_products_associate() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    while done < TRIALS {
        let (f, g) = transverse_pair(&mut rng);
        let m2 = rng.gen_range(0..=4);
        let c = rng.gen_range(0..=4);
        let (h, k) = (random_matrix(&mut rng, m2, g.cols()), random_matrix(&mut rng, m2, c));
        match associativity_check(&f, &g, &h, &k) {
            Ok(r) => {
                assert!(r.passed(), "{r:?}");
                done += 1;
            }
            Err(explode_core::Error::NotTransverse) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

fn quotient_sign(image: &QMatrix, w1: &QMatrix, w2: &QMatrix) -> i32 {
    sign_of(&(image.hstack(w1).determinant() * image.hstack(w2).determinant()))
}

fn invertible(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    loop {
        let p = random_matrix(rng, n, n);
        if p.rank() == n {
            return p;
        }
    }
}

fn det_sign(m: &QMatrix) -> i32 {
    if m.rows() == 0 {
        1
    } else {
        sign_of(&m.determinant())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Changing coordinates on `X` by `P` and on `Y` by `Q` changes the
    /// relative orientation by `sign det P * sign det Q`, whatever metric
    /// the new coordinates induce.
    #[test]
    fn relative_orientation_follows_basis_changes(seed in any::<u64>(), x in 0usize..=4, y in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, y, x);
        let p = invertible(&mut rng, x);
        let q = invertible(&mut rng, y);
        // x = P x', y = Q y'
        let moved = &(&q.inverse().unwrap() * &a) * &p;
        let before = relative_orientation(&a, Placement::Left);
        let after = relative_orientation(&moved, Placement::Left);
        let kernel_cmp = OrientedSubspace::new(&p * &after.kernel, after.sign)
            .compare(&OrientedSubspace::new(before.kernel.clone(), before.sign))
            .unwrap();
        let image = a.select_cols(&a.rref().1);
        let coker_cmp = quotient_sign(&image, &(&q * &after.cokernel), &before.cokernel);
        prop_assert_eq!(kernel_cmp * coker_cmp, det_sign(&p) * det_sign(&q));
    }
}
