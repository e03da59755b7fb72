use num_complex::Complex64;
use proptest::prelude::*;

use hypermono::audits::{divisor_table_audit, heins_admissible, random_rational_map, residue_audit, Divisor};
use hypermono::developing::{blaschke, build_l0_map, build_u1_family};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn residues_sum_to_minus_two(seed in any::<u64>(), degree in 1usize..=6) {
        let f = random_rational_map(seed, degree);
        let r = residue_audit(&f).unwrap();
        prop_assert_eq!(r.total, -2);
        prop_assert!(r.max_contour_error <= 1e-9, "contour error {}", r.max_contour_error);
        prop_assert!((r.numeric_total + 2.0).norm() <= 1e-9);
    }

    #[test]
    fn heins_slack_is_monotone(
        genus in 0u32..4,
        thetas in prop::collection::vec(0.0..4.0f64, 0..6),
        k in 0usize..6,
        bump in 0.01..2.0f64,
    ) {
        let thetas: Vec<f64> = thetas.into_iter().filter(|t| (*t - 1.0).abs() > 1e-9).collect();
        prop_assume!(!thetas.is_empty());
        let k = k % thetas.len();
        prop_assume!((thetas[k] + bump - 1.0).abs() > 1e-9);
        let label = |i: usize| format!("p{i}");
        let d0 = Divisor::new(thetas.iter().enumerate().map(|(i, t)| (label(i), *t)).collect()).unwrap();
        let mut raised = thetas.clone();
        raised[k] += bump;
        let d1 = Divisor::new(raised.iter().enumerate().map(|(i, t)| (label(i), *t)).collect()).unwrap();
        prop_assert!(heins_admissible(genus, &d1).slack > heins_admissible(genus, &d0).slack);
    }
}

#[test]
fn quadratic_balance_holds_for_constructions() {
    let fam = build_u1_family(&[(c(0.5, 0.0), 0.5), (c(-0.5, 0.0), 0.5)], vec![], c(0.0, 0.3)).unwrap();
    let pair = fam.member(0.5 * fam.upper()).unwrap();
    let b = blaschke(&[(c(0.0, 0.0), 1), (c(0.5, 0.0), 1)], c(1.0, 0.0)).unwrap();
    let sq = blaschke(&[(c(0.0, 0.0), 3), (c(0.2, -0.4), 2)], c(1.0, 0.0)).unwrap();
    for f in [pair, b, sq] {
        let t = divisor_table_audit(&f).unwrap();
        let q = t.quadratic.expect("quadratic data");
        assert!(q.holds(), "{q:?}");
    }
    let l0 = build_l0_map(&[(c(0.5, 0.0), 1.0), (c(-0.5, 0.0), 2.0)], 1.0, 2.5, c(0.0, 0.3)).unwrap();
    let t = divisor_table_audit(&l0).unwrap();
    assert!(t.quadratic.is_none());
    // Cusps give h-residue −1, the zero of ω between them gives its order.
    for row in &t.rows {
        let h = row.checks.iter().find(|k| k.object.name() == "h").unwrap();
        let expected = if row.theta == 0.0 { -1.0 } else { row.theta - 1.0 };
        assert!((h.measured_residue.unwrap() - c(expected, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn irrational_residues_have_no_quadratic_data() {
    let fam = build_u1_family(&[(c(0.0, 0.0), 0.3)], vec![], c(0.5, 0.0)).unwrap();
    let t = divisor_table_audit(&fam.member(0.5 * fam.upper()).unwrap()).unwrap();
    assert!(t.quadratic.is_none());
    assert_eq!(t.rows[0].checks[0].measured_order, -1.0);
}
