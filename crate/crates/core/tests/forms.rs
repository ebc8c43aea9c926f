use std::f64::consts::{PI, TAU};

use explode_core::chart::{binomial, chart_cohomology, ChartSignature};
use explode_core::forms::*;
use explode_core::lattice::{rat, rat_frac, Int, IntegerMatrix, Polytope, Rat};
use explode_core::Error;
use proptest::prelude::*;

fn opts() -> QuadratureOptions {
    QuadratureOptions::default()
}

fn form(s: &str) -> FormExpr {
    parse_form(s).unwrap()
}

fn ray() -> Polytope {
    Polytope::quadrant(1)
}

fn interval() -> Polytope {
    Polytope::product_of_intervals(&[(0, Some(1))])
}

fn point(x: &[i64]) -> Vec<Rat> {
    x.iter().map(|&v| rat(v)).collect()
}

#[test]
fn winding_form_breaks_stokes_and_is_flagged() {
    let sig = ChartSignature::new(0, ray());
    let report = stokes_check(&form("step(0, 1, r) * dth"), &sig, None, &opts()).unwrap();
    assert!((report.discrepancy - TAU).abs() < 1e-6, "{report:?}");
    assert!(report.hypothesis_violated());
    assert!(report.admissibility.integral_vectors_ok());
    assert!(!report.admissibility.angular_directions_ok());
}

#[test]
fn admissible_forms_satisfy_stokes() {
    let cases: Vec<(usize, Polytope, Option<usize>, &str, f64)> = vec![
        (0, ray(), None, "bump(0, 1, r) * dth", 0.0),
        (1, interval(), Some(0), "exp(x) * bump(0, 1, r) * dr ^ dth", TAU),
        (1, interval(), Some(0), "exp(x) * (2 + sin(x)) * bump(0, 1, r) * dr ^ dth", 2.0 * TAU),
        (2, ray(), Some(1), "exp(-x1^2) * exp(x2) * bump(0, 1, r) * dx1 ^ dr ^ dth", -PI.sqrt() * TAU),
        (
            0,
            Polytope::product_of_intervals(&[(0, None), (0, Some(1))]),
            None,
            "bump(0, 1, r1) * bump(0, 1, r2) * sin(th2) * dth1 ^ dr2 ^ dth2",
            0.0,
        ),
    ];
    for (n, p, boundary, text, expected) in cases {
        let sig = ChartSignature::new(n, p);
        let report = stokes_check(&form(text), &sig, boundary, &opts()).unwrap();
        assert!(!report.hypothesis_violated(), "{text}: {:?}", report.admissibility);
        assert!(report.within(1e-6), "{text}: {report:?}");
        assert!((report.interior.value - expected).abs() < 1e-6, "{text}: {report:?}");
    }
}

#[test]
fn top_forms_on_the_interval_chart() {
    // only the corner at 0 carries area; the bump keeps away from the corner at 1
    let sig = ChartSignature::new(0, interval());
    let i = integrate(&form("cos(th)^2 * bump(0, 1, r) * dr ^ dth"), &sig, &opts()).unwrap();
    assert!((i.value - PI).abs() < 1e-8);
    let early = form("bump(-1, 1, r + 1) * dr ^ dth");
    assert!(integrate(&early, &sig, &opts()).is_ok());
    let unbounded = form("exp(r) * dr ^ dth");
    assert!(matches!(integrate(&unbounded, &sig, &opts()), Err(Error::DivergenceSuspected(_))));
}

#[test]
fn area_form_with_full_radial_support_diverges() {
    let sig = ChartSignature::new(0, ray());
    let w = form("step(0, 1, r) * dr ^ dth");
    assert!(matches!(integrate(&w, &sig, &opts()), Err(Error::DivergenceSuspected(_))));
}

fn adjunction_cases() -> Vec<(CoordinateProjection, &'static str, &'static str, f64)> {
    let two_reals = ChartSignature::new(2, Polytope::whole_space(0));
    vec![
        (
            CoordinateProjection::new(ChartSignature::new(1, ray()), vec![], vec![0]).unwrap(),
            "2 + cos(th) * exp(r)",
            "exp(-x^2) * bump(0, 1, r) * dx ^ dr ^ dth",
            2.0 * TAU * PI.sqrt(),
        ),
        (
            CoordinateProjection::new(two_reals.clone(), vec![0], vec![]).unwrap(),
            "exp(x1)",
            "exp(-x1^2 - x1*x2 - x2^2) * dx1 ^ dx2",
            TAU / 3f64.sqrt() * (1.0f64 / 3.0).exp(),
        ),
        (
            CoordinateProjection::new(two_reals, vec![1], vec![]).unwrap(),
            "exp(x1)",
            "exp(-x1^2 - x2^2) * dx1 ^ dx2",
            PI * 0.25f64.exp(),
        ),
        (
            CoordinateProjection::new(
                ChartSignature::new(0, Polytope::product_of_intervals(&[(0, None), (0, Some(1))])),
                vec![],
                vec![0],
            )
            .unwrap(),
            "3 + cos(th1)",
            "bump(0, 1, r1) * bump(0, 1, r2) * (1 + cos(th2)) * dr1 ^ dth1 ^ dr2 ^ dth2",
            3.0 * TAU * TAU,
        ),
    ]
}

#[test]
fn fiber_integration_is_adjoint_to_pullback() {
    for (proj, alpha, theta, expected) in adjunction_cases() {
        let report = adjunction_check(&proj, &form(alpha), &form(theta), &opts()).unwrap();
        assert!(report.within(1e-6), "{theta}: {report:?}");
        assert!((report.total_side.value - expected).abs() < 1e-6, "{theta}: {report:?} vs {expected}");
    }
}

#[test]
fn projections_must_be_surjective_on_integral_vectors() {
    let slanted = Polytope::from_generators(2, &[point(&[0, 0])], &[vec![Int::from(2), Int::from(1)]], &[]);
    let err = CoordinateProjection::new(ChartSignature::new(0, slanted), vec![], vec![0]).unwrap_err();
    assert!(matches!(err, Error::IntegralVectorSurjectivityFailure { .. }), "{err}");
    // a projection collapsing a bounded edge onto a point is fine
    let square = Polytope::product_of_intervals(&[(0, Some(1)), (0, Some(1))]);
    assert!(CoordinateProjection::new(ChartSignature::new(0, square), vec![], vec![0]).is_ok());
}

fn duality_fixtures() -> Vec<Polytope> {
    let triangle = Polytope::from_generators(2, &[point(&[0, 0]), point(&[1, 0]), point(&[0, 1])], &[], &[]);
    let wedge = Polytope::from_generators(2, &[point(&[0, 0])], &[vec![Int::from(1), Int::from(0)], vec![Int::from(1), Int::from(2)]], &[]);
    vec![
        Polytope::whole_space(0),
        interval(),
        ray(),
        Polytope::product_of_intervals(&[(0, Some(1)), (0, Some(2))]),
        Polytope::quadrant(2),
        Polytope::product_of_intervals(&[(0, Some(1)), (0, None)]),
        triangle,
        wedge,
    ]
}

#[test]
fn chart_pairing_is_perfect() {
    for p in duality_fixtures() {
        for n in 0..=2 {
            let sig = ChartSignature::new(n, p.clone());
            let free = chart_cohomology(&sig).unwrap().h1_dim();
            for j in 0..=free {
                let pm = pairing_matrix(&sig, j, &opts()).unwrap();
                assert_eq!(pm.rank(1e-6), binomial(free, j), "{sig:?} j={j}");
                assert!(pm.is_nondegenerate(1e-6));
                assert!(pm.is_signed_unit(1e-6), "{pm:?}");
            }
        }
    }
}

#[test]
fn pairing_needs_duality() {
    let line = Polytope::whole_space(1);
    assert!(matches!(pairing_matrix(&ChartSignature::new(0, line), 0, &opts()), Err(Error::DualityUnavailable(_))));
}

#[test]
fn monomial_pullback_of_the_angular_form() {
    let a = IntegerMatrix::from_rows(&[[1, 2]]);
    let pulled = form("exp(r) * dth").pullback_monomial(&a).unwrap();
    assert_eq!(pulled, form("exp(r1 + 2*r2) * (dth1 + 2*dth2)"));
}

// ---- symbolic identities on random forms ----

fn leaf() -> impl Strategy<Value = Poly> {
    prop_oneof![
        (-3i64..=3).prop_map(Poly::integer),
        (0usize..2).prop_map(|j| Poly::var(Var::x(j))),
        (0usize..2).prop_map(|i| Poly::var(Var::r(i))),
        (0usize..2).prop_map(|i| Poly::var(Var::theta(i))),
    ]
}

fn poly() -> impl Strategy<Value = Poly> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            inner.clone().prop_map(Poly::exp),
            inner.clone().prop_map(Poly::sin),
            inner.clone().prop_map(Poly::cos),
            inner.clone().prop_map(|a| Poly::bump(rat(0), rat(1), a)),
            inner.prop_map(|a| Poly::step(rat_frac(-1, 2), rat(2), a)),
        ]
    })
}

fn coordinates() -> Vec<Var> {
    vec![Var::x(0), Var::x(1), Var::r(0), Var::theta(0), Var::r(1), Var::theta(1)]
}

fn random_form() -> impl Strategy<Value = FormExpr> {
    prop::collection::vec((poly(), prop::collection::vec(0usize..6, 0..4)), 1..3).prop_map(|terms| {
        let all = coordinates();
        terms.into_iter().fold(FormExpr::zero(), |acc, (f, idx)| {
            acc.add(&FormExpr::term(idx.into_iter().map(|i| all[i]).collect(), f))
        })
    })
}

fn homogeneous(deg: usize) -> impl Strategy<Value = FormExpr> {
    (poly(), prop::sample::subsequence((0..6).collect::<Vec<usize>>(), deg)).prop_map(|(f, idx)| {
        let all = coordinates();
        FormExpr::term(idx.into_iter().map(|i| all[i]).collect(), f)
    })
}

fn small_matrix() -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec(-2i64..=2, 4).prop_map(|v| IntegerMatrix::from_rows(&[[v[0], v[1]], [v[2], v[3]]]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn exterior_derivative_squares_to_zero(w in random_form()) {
        prop_assert!(w.d().d().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn leibniz_rule(a in (0usize..3).prop_flat_map(homogeneous), b in random_form()) {
        let deg = a.degree().unwrap_or(0);
        let sign = if deg % 2 == 0 { rat(1) } else { rat(-1) };
        let lhs = a.wedge(&b).d();
        let rhs = a.d().wedge(&b).add(&a.wedge(&b.d()).scale(&sign));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_commutes_with_d_and_wedge(a in random_form(), b in random_form(), m in small_matrix()) {
        let pa = a.pullback_monomial(&m).unwrap();
        let pb = b.pullback_monomial(&m).unwrap();
        prop_assert_eq!(a.d().pullback_monomial(&m).unwrap(), pa.d());
        prop_assert_eq!(a.wedge(&b).pullback_monomial(&m).unwrap(), pa.wedge(&pb));
    }

    #[test]
    fn printed_forms_parse_back(w in random_form()) {
        prop_assert_eq!(parse_form(&w.to_string()).unwrap(), w);
    }
}
