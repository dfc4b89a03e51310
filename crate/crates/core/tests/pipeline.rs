use siegel_lab::brjuno::{yoccoz_y, SumStatus};
use siegel_lab::cfrac::Angle;
use siegel_lab::experiments::{conjecture_scan, dstar_bounds_scan, log_radius};
use siegel_lab::families::{geyer_germ, quad_germ, FamilySpec};
use siegel_lab::powerseries::linearize;
use siegel_lab::Error;

#[test]
fn descriptors_round_trip() {
    for text in ["golden", "silver", "quad:-1,1,5,2", "3/7", "quad:2,3,7,5", "0.3183098861837907"] {
        let a = Angle::parse(text).unwrap();
        let again = Angle::parse(&a.to_string()).unwrap();
        assert_eq!(a, again, "{text}");
    }
    for bad in ["", "quad:1,2,3", "quad:1,1,-5,2", "1/0", "abc"] {
        assert!(Angle::parse(bad).is_err(), "{bad}");
    }
}

#[test]
fn rational_angle_resonates() {
    let f = quad_germ(&Angle::rational(2, 5).unwrap(), 64).unwrap();
    assert_eq!(linearize(&f, 64, 53).unwrap_err(), Error::Resonance(6));
    assert_eq!(yoccoz_y(&Angle::rational(2, 5).unwrap(), 64).unwrap().status, SumStatus::Infinite);
}

#[test]
fn family_descriptors_round_trip() {
    for text in ["quad", "linear", "cubic", "mobius-pole", "unicritical:4", "geyer:3", "dstar:5", "conjugate:mobius", "conjugate:expm1"] {
        let f: FamilySpec = text.parse().unwrap();
        assert_eq!(f.to_string(), text);
    }
    assert!("dstar:1".parse::<FamilySpec>().is_err());
}

#[test]
fn golden_radius_converges_downward() {
    // the window estimate decreases towards the conformal radius ≈ 0.3257
    let f = quad_germ(&Angle::golden(), 64).unwrap();
    let r: Vec<f64> = [512usize, 1024, 2048].iter().map(|&n| log_radius(&f, n, 53).unwrap().value).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
    assert!(r[2] > 0.320 && r[2] < 0.335, "{r:?}");
}

#[test]
fn geyer_radius_is_power_of_dstar_radius() {
    let theta = Angle::silver();
    let dt = theta.mul_mod1(2).unwrap();
    let d = log_radius(&siegel_lab::families::dstar_germ(3, &theta, 64).unwrap(), 2048, 53).unwrap();
    let g = log_radius(&geyer_germ(3, &dt, 64).unwrap(), 2048, 53).unwrap();
    assert!((g.log_value - 2.0 * d.log_value).abs() < 0.05 * (2.0 * d.log_value).abs());
}

#[test]
fn small_scans_are_reproducible() {
    let thetas = vec![Angle::golden(), Angle::silver(), Angle::rational(1, 4).unwrap()];
    let a = conjecture_scan(&thetas, 256, 53, 32);
    let b = conjecture_scan(&thetas, 256, 53, 32);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
    assert_eq!(a.summary_json(), b.summary_json());
    assert_eq!(a.summary.flagged, 1);
    assert!(dstar_bounds_scan(2, &thetas, 256, 53, 32).is_err());
}
