use num_complex::Complex64;
use proptest::prelude::*;

use siegel_lab::brjuno::{brjuno_b, yoccoz_y};
use siegel_lab::capacity::transfinite_diameter;
use siegel_lab::cfrac::{cf_expand, convergents, Angle};
use siegel_lab::experiments::{lemma_scan, summarize};
use siegel_lab::families::{quad_germ, rescale};
use siegel_lab::powerseries::{compose_oracle, hadamard_radius, linearize, revert, DEFAULT_WINDOW};

fn periodic_angle() -> impl Strategy<Value = Angle> {
    prop::collection::vec(1u64..=12, 1..=8).prop_map(|p| Angle::from_cf(&[], &p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn last_convergent_of_rational_is_itself(p in 1i64..100_000, q in 2i64..100_000) {
        prop_assume!(p < q);
        let a = Angle::rational(p, q).unwrap();
        let cf = cf_expand(&a, 200).unwrap();
        prop_assert!(cf.terminated);
        let c = convergents(&cf);
        let last = c.as_rational(c.len() - 1);
        prop_assert_eq!(Angle::Rational(last), a);
    }

    #[test]
    fn periodic_expansion_repeats(period in prop::collection::vec(1u64..=12, 1..=8)) {
        let a = Angle::from_cf(&[], &period).unwrap();
        let cf = cf_expand(&a, 3 * period.len() + 4).unwrap();
        for (i, q) in cf.partial_quotients.iter().enumerate() {
            prop_assert_eq!(q.to_u64().unwrap(), period[i % period.len()]);
        }
    }

    #[test]
    fn y_is_translation_invariant_and_positive(a in periodic_angle(), k in -5i64..5) {
        let y = yoccoz_y(&a, 64).unwrap();
        let yk = yoccoz_y(&a.add_integer(k), 64).unwrap();
        prop_assert!(y.is_finite());
        prop_assert!(y.midpoint() > 0.0);
        prop_assert!((y.midpoint() - yk.midpoint()).abs() < 1e-12);
    }

    #[test]
    fn y_and_b_stay_close(a in periodic_angle()) {
        // the two sums differ by a bounded amount; 3 is generous for quotients ≤ 12
        let y = yoccoz_y(&a, 64).unwrap().midpoint();
        let b = brjuno_b(&a, 64).unwrap().midpoint();
        prop_assert!((y - b).abs() < 3.0, "Y = {y}, B = {b}");
    }

    #[test]
    fn mul_mod1_matches_floating_point(a in periodic_angle(), m in 1u64..200) {
        let exact = a.mul_mod1(m).unwrap().to_f64();
        let approx = (a.to_f64() * m as f64).rem_euclid(1.0);
        let d = (exact - approx).abs();
        prop_assert!(d.min(1.0 - d) < 1e-10);
    }

    #[test]
    fn rescaling_shifts_log_radius(a in periodic_angle(), r in 0.25f64..4.0, phase in 0.0f64..std::f64::consts::TAU) {
        let f = quad_germ(&a, 64).unwrap();
        let s = Complex64::from_polar(r, phase);
        let g = rescale(&f, s).unwrap();
        let lf = hadamard_radius(&linearize(&f, 128, 53).unwrap(), DEFAULT_WINDOW).unwrap();
        let lg = hadamard_radius(&linearize(&g, 128, 53).unwrap(), DEFAULT_WINDOW).unwrap();
        prop_assert!((lg.log_value - lf.log_value - r.ln()).abs() < 1e-9);
    }

    #[test]
    fn reversion_is_an_involution(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..8)) {
        let mut h = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        h.extend(c.iter().map(|&(re, im)| Complex64::new(re, im) * 0.5));
        let n = 10;
        let g = revert(&h, n).unwrap();
        let id = compose_oracle(&h, &g, n).unwrap();
        for (k, z) in id.iter().enumerate() {
            let expect = if k == 1 { 1.0 } else { 0.0 };
            prop_assert!((z - Complex64::new(expect, 0.0)).norm() < 1e-9, "{k}: {z}");
        }
    }

    #[test]
    fn diameter_is_similarity_covariant(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8..40),
        scale in 0.1f64..10.0,
        shift in (-5.0f64..5.0, -5.0f64..5.0),
    ) {
        let p: Vec<Complex64> = pts.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
        prop_assume!(p.iter().enumerate().all(|(i, a)| p[..i].iter().all(|b| (a - b).norm() > 1e-3)));
        let t = Complex64::new(shift.0, shift.1);
        let q: Vec<Complex64> = p.iter().map(|z| z * scale + t).collect();
        let dp = transfinite_diameter(&p).unwrap().transfinite_diameter;
        let dq = transfinite_diameter(&q).unwrap().transfinite_diameter;
        prop_assert!((dq / dp - scale).abs() < 1e-9 * scale);
    }
}

#[test]
fn summary_matches_rows() {
    let r = lemma_scan(&[Angle::golden(), Angle::silver(), Angle::rational(1, 3).unwrap()], &[1, 2, 3], 32);
    let again = summarize(&r.rows, r.summary.fitted.clone());
    assert_eq!(again, r.summary);
    assert_eq!(r.summary.flagged, 3);
}
