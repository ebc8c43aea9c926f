mod common;

use explode_core::cech::{refinement_manifest, total_betti, CoverManifest, GluingClass};
use explode_core::chart::ChartSignature;
use explode_core::format::{parse_fan, parse_manifest, print_fan, print_manifest};
use explode_core::lattice::{Inequality, Int, IntegerMatrix, Polytope, Rat};
use explode_core::Error;
use proptest::prelude::*;

#[test]
fn refinement_manifests_round_trip() {
    for fan in [common::p1(), common::p2(), common::p1_x_p1(), common::hirzebruch1()] {
        let m = refinement_manifest(&fan, fan.ambient_dim()).unwrap();
        let text = print_manifest(&m);
        let back = parse_manifest(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(total_betti(&back).unwrap(), total_betti(&m).unwrap());
    }
}

#[test]
fn fans_round_trip() {
    for fan in [common::p1(), common::p2(), common::hirzebruch1()] {
        let text = print_fan(&fan);
        let back = parse_fan(&text).unwrap();
        assert_eq!(back.maximal_cones(), fan.maximal_cones());
        assert_eq!(print_fan(&back), text);
    }
}

#[test]
fn hand_written_manifest() {
    let text = "\
# two rays glued along the whole line
[meta]
gluing_class = general

[chart a]
n = 0
m = 1
1 >= 0

[chart b]
m = 1
-1 >= 0

[overlap a,b]
n = 0
m = 1
map a = 1
map b = 1
";
    let m = parse_manifest(text).unwrap();
    assert_eq!(m.gluing_class, GluingClass::General);
    assert_eq!(m.charts.len(), 2);
    let o = &m.overlaps[&vec!["a".to_string(), "b".to_string()]];
    assert_eq!(o.signature.polytope, Polytope::whole_space(1));
    assert_eq!(o.maps["b"], IntegerMatrix::identity(1));
}

#[test]
fn malformed_manifests_report_positions() {
    let cases: &[(&str, usize)] = &[
        ("", 1),
        ("n = 1\n", 1),
        ("[chart a]\nn = 0\n1 >= 0\n[chart a]\n1 >= 0\n", 4),
        ("[chart a]\n\n1 >= 1/0\n", 3),
        ("[meta]\ngluing_class = round\n", 2),
        ("[chart a]\nm = 2\n1 0 >= 0\n[overlap a,a]\nm = 1\nmap a = 1; 0 1\n", 6),
        ("[chart a\n", 1),
    ];
    for (text, line) in cases {
        match parse_manifest(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, *line, "{text:?}"),
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}

fn inequality(m: usize) -> impl Strategy<Value = Inequality> {
    (prop::collection::vec(-3i64..=3, m), -5i64..=5, 1i64..=3, any::<bool>()).prop_map(|(a, p, q, open)| Inequality {
        normal: a.into_iter().map(Int::from).collect(),
        rhs: Rat::new(Int::from(p), Int::from(q)),
        open,
    })
}

fn signature() -> impl Strategy<Value = ChartSignature> {
    (0usize..3, 0usize..4).prop_flat_map(|(n, m)| {
        prop::collection::vec(inequality(m), 0..4).prop_map(move |ineqs| ChartSignature::new(n, Polytope::new(m, ineqs)))
    })
}

fn manifest() -> impl Strategy<Value = CoverManifest> {
    let class = prop_oneof![Just(GluingClass::Quadrant), Just(GluingClass::PureMonomial), Just(GluingClass::General)];
    (class, any::<bool>(), prop::collection::vec(signature(), 1..4), signature(), prop::collection::vec(-2i64..=2, 16))
        .prop_map(|(class, oriented, charts, overlap, entries)| {
            let mut m = CoverManifest::new(class);
            m.oriented = oriented;
            for (i, s) in charts.iter().enumerate() {
                m.add_chart(format!("c{i}"), s.clone());
            }
            if charts.len() >= 2 {
                let members = ["c0".to_string(), "c1".to_string()];
                let maps: Vec<(String, IntegerMatrix)> = members
                    .iter()
                    .enumerate()
                    .map(|(k, id)| {
                        let (r, c) = (charts[k].m(), overlap.m());
                        let rows: Vec<Vec<Int>> =
                            (0..r).map(|i| (0..c).map(|j| Int::from(entries[(k * 8 + i * 3 + j) % 16])).collect()).collect();
                        let a = if r * c == 0 { IntegerMatrix::zeros(r, c) } else { IntegerMatrix::from_big_rows(rows, c) };
                        (id.clone(), a)
                    })
                    .collect();
                m.add_overlap(&members, overlap.clone(), &maps);
            }
            m
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printed_manifests_parse_back(m in manifest()) {
        let text = print_manifest(&m);
        let back = parse_manifest(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(print_manifest(&back), text);
    }
}
