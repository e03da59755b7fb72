use num_complex::Complex64;
use proptest::prelude::*;

use hypermono::developing::{blaschke, build_l0_map, build_u1_family, DevelopingMap, Model};
use hypermono::moebius::MoebiusMap;
use hypermono::subgroup::{classify_subgroup, Verdict};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn u1() -> DevelopingMap {
    let fam = build_u1_family(&[(c(0.4, 0.1), 0.5), (c(-0.3, -0.4), 1.5), (c(0.0, 0.6), 0.25)], vec![], c(0.0, 0.0)).unwrap();
    fam.member(0.7 * fam.upper()).unwrap()
}

fn l0() -> DevelopingMap {
    build_l0_map(&[(c(0.4, 0.1), 1.0), (c(-0.3, -0.4), 0.5)], 0.8, 2.0, c(0.0, 0.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn monodromy_is_a_homomorphism(seed in 0u64..1_000_000, which in 0usize..2) {
        let f = if which == 0 { u1() } else { l0() };
        let loops = f.random_loops(2, seed);
        let joined = loops[0].then(&loops[1]).unwrap();
        let m1 = f.monodromy_around(&loops[0]).unwrap();
        let m2 = f.monodromy_around(&loops[1]).unwrap();
        let m12 = f.monodromy_around(&joined).unwrap();
        prop_assert!(m12.map.operator_distance(&(m1.map * m2.map)) <= 1e-8);
        prop_assert!(m1.is_accepted() && m2.is_accepted() && m12.is_accepted());
    }

    #[test]
    fn images_stay_in_the_model(x in -0.95..0.95f64, y in -0.95..0.95f64, which in 0usize..2) {
        let z = c(x, y);
        prop_assume!(z.norm() < 0.95);
        let f = if which == 0 { u1() } else { l0() };
        prop_assume!(f.poles().iter().all(|p| (z - p).norm() > 1e-3));
        let v = f.eval_at(z).unwrap();
        match f.model() {
            Model::Disc => prop_assert!(v.norm() < 1.0),
            Model::HalfPlane => prop_assert!(v.im > 0.0),
        }
    }

    #[test]
    fn blaschke_monodromy_is_trivial(seed in 0u64..1_000_000) {
        let b = blaschke(&[(c(0.2, 0.1), 2), (c(-0.5, 0.3), 1)], c(0.0, 1.0)).unwrap();
        for path in b.random_loops(3, seed) {
            prop_assert!(b.monodromy_around(&path).unwrap().map.is_identity(1e-12));
        }
    }
}

fn group(f: &DevelopingMap) -> Verdict {
    let maps: Vec<MoebiusMap> = f.generator_loops().unwrap().iter().map(|l| f.monodromy_around(l).unwrap().map).collect();
    classify_subgroup(&maps).unwrap().verdict
}

#[test]
fn monodromy_classes() {
    assert_eq!(group(&u1()), Verdict::H3);
    assert_eq!(group(&l0()), Verdict::L0);
    // Integer residues give trivial monodromy.
    let fam = build_u1_family(&[(c(0.4, 0.0), 2.0), (c(-0.4, 0.0), 1.0)], vec![], c(0.0, 0.3)).unwrap();
    assert_eq!(group(&fam.member(0.5 * fam.upper()).unwrap()), Verdict::Trivial);
}

#[test]
fn entire_part_uses_grid_estimate() {
    let fam = build_u1_family(&[(c(0.0, 0.0), 0.5)], vec![c(1.0, 0.0)], c(0.5, 0.0)).unwrap();
    let g = fam.growth();
    assert!(g.entire_factor_is_estimate);
    // grid sup of exp(Re z) over the disc of radius 0.999
    assert!(g.entire_factor <= 0.999f64.exp() && g.entire_factor > 0.98f64.exp());
    assert!(fam.member(0.99 * fam.upper()).is_ok());
}
