//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p siegel-cli --test acceptance`.

use std::cmp::Ordering;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Integer, Rational};

use siegel_lab::brjuno::yoccoz_y;
use siegel_lab::capacity::{conformal_radius_capacity, DEFAULT_BURNIN, DEFAULT_COUNT, DEFAULT_LEJA_POINTS};
use siegel_lab::cfrac::{cf_expand, convergents, fibonacci, Angle};
use siegel_lab::experiments::{
    conjecture_scan, dstar_bounds_scan, fatou_check, harmonicity_check, lemma_scan, log_radius,
    sample_quadratic_angles, Tolerances, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT,
};
use siegel_lab::families::{
    mobius_conjugate_germ, quad_germ, semiconjugacy_residual, semiconjugacy_residual_with, ConjugatingMap, FamilySpec,
};
use siegel_lab::powerseries::{compose_oracle, hadamard_radius, linearize, ExtComplex, GermSeries, DEFAULT_WINDOW};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// 1: golden value against log(1/g)/(1 − g), the sum of the geometric series
// g^{n−1} log(1/g).
fn brjuno_golden() -> Verdict {
    let start = Instant::now();
    let y = yoccoz_y(&Angle::golden(), 64).expect("golden mean expands");
    let elapsed = start.elapsed();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let expect = -g.ln() / (1.0 - g);
    let err = (y.midpoint() - expect).abs();
    verdict(err < 1e-9 && elapsed < Duration::from_secs(1), format!("|Y − {expect:.6}| = {err:.1e}, {}", secs(elapsed)))
}

fn cmp_angle(alpha: &Angle, r: &Rational) -> Ordering {
    match alpha {
        Angle::Rational(a) => a.cmp(r),
        Angle::Quadratic(s) => s.cmp_rational(r),
        Angle::Real(_) => unreachable!("only exact angles are sampled"),
    }
}

/// `lo < α − c < hi` exactly, with `strict_hi` selecting `<` or `≤` on the right.
fn in_shell(alpha: &Angle, c: &Rational, lo: &Rational, hi: &Rational, strict_hi: bool) -> bool {
    let below = |x: Rational| cmp_angle(alpha, &x);
    let d_lo_plus = below(Rational::from(c + lo));
    let d_lo_minus = below(Rational::from(c - lo));
    let d_hi_plus = below(Rational::from(c + hi));
    let d_hi_minus = below(Rational::from(c - hi));
    let outside_lo = d_lo_plus == Ordering::Greater || d_lo_minus == Ordering::Less;
    let inside_hi = if strict_hi {
        d_hi_plus == Ordering::Less && d_hi_minus == Ordering::Greater
    } else {
        d_hi_plus != Ordering::Greater && d_hi_minus != Ordering::Less
    };
    outside_lo && inside_hi
}

// 2: determinant identity, the two-sided approximation bound, q_n ≥ F_n,
// and Legendre's criterion, all in exact arithmetic.
fn cf_invariants() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut angles = sample_quadratic_angles(500, 2, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT);
    angles.extend((0..500).map(|_| {
        let q: i64 = rng.gen_range(2..1_000_000);
        Angle::rational(rng.gen_range(1..q), q).unwrap()
    }));
    let fib = fibonacci(64);
    let mut failures = Vec::new();
    let mut legendre_hits = 0usize;
    for alpha in &angles {
        let cf = cf_expand(alpha, 40).unwrap();
        let conv = convergents(&cf);
        let k = conv.len() - 1;
        let (mut pm, mut qm) = (Integer::from(1), Integer::new());
        for n in 0..=k {
            let det = Integer::from(conv.p(n) * &qm) - Integer::from(&pm * conv.q(n));
            let sign = if n % 2 == 1 { 1 } else { -1 };
            if det != sign {
                failures.push(format!("determinant at {alpha} n={n}"));
            }
            pm = conv.p(n).clone();
            qm = conv.q(n).clone();
            if *conv.q(n) < fib[n] {
                failures.push(format!("q_n < F_n at {alpha} n={n}"));
            }
        }
        for n in 0..k {
            let prod = Integer::from(conv.q(n) * conv.q(n + 1));
            let hi = Rational::from((Integer::from(1), prod.clone()));
            let lo = Rational::from((Integer::from(1), prod * 2u32));
            // the last step of a finite expansion attains the upper bound
            let strict = !(cf.terminated && n + 1 == k);
            if !in_shell(alpha, &conv.as_rational(n), &lo, &hi, strict) {
                failures.push(format!("approximation bound at {alpha} n={n}"));
            }
        }
        let x = alpha.to_f64();
        for q in 1i64..=300 {
            let base = (x * q as f64).floor() as i64;
            for p in base - 1..=base + 2 {
                let r = Rational::from((p, q));
                if r.denom() != &Integer::from(q) {
                    continue;
                }
                let tol = Rational::from((1, 2 * q * q));
                let close = cmp_angle(alpha, &Rational::from(&r + &tol)) == Ordering::Less
                    && cmp_angle(alpha, &Rational::from(&r - &tol)) == Ordering::Greater;
                if close {
                    legendre_hits += 1;
                    if !conv.contains(&r) {
                        failures.push(format!("{p}/{q} close to {alpha} but not a convergent"));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!("{} angles, {legendre_hits} close fractions, {} failures{}, {}", angles.len(), failures.len(),
            failures.first().map_or(String::new(), |f| format!(" (first: {f})")), secs(elapsed)),
    )
}

fn ext_to_mp(z: &ExtComplex, prec: u32) -> Complex {
    let m = z.mantissa();
    let mut c = Complex::with_val(prec, (m.re, m.im));
    c <<= z.exponent() as i32;
    c
}

// 3: the computed h satisfies f∘h = h∘R_θ, checked by direct composition.
fn linearizer_oracle() -> Verdict {
    let n = 256;
    let prec = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let thetas = sample_quadratic_angles(20, 3, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT);
    let mut worst = 0.0f64;
    for theta in &thetas {
        let d = rng.gen_range(2..=6usize);
        let higher: Vec<Complex64> =
            (2..=d).map(|_| Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU))).collect();
        let f = GermSeries::polynomial(theta, &higher, prec, "random").unwrap();
        let l = linearize(&f, n, prec).unwrap();
        let h: Vec<Complex> = l.b.iter().map(|b| ext_to_mp(b, prec)).collect();
        let fc = f.coefficients(d);
        let lhs = compose_oracle(&fc, &h, n).unwrap();
        let lam = f.lambda();
        let mut lam_k = Complex::with_val(prec, 1);
        for k in 1..=n {
            lam_k *= &lam;
            let rhs = Complex::with_val(prec, &h[k] * &lam_k);
            let diff = Complex::with_val(prec, &lhs[k] - &rhs).abs().real().to_f64();
            let scale = rhs.abs().real().to_f64();
            worst = worst.max(diff / scale);
        }
    }
    verdict(worst < 1e-10, format!("20 germs, max relative residual {worst:.1e} at N = {n}"))
}

// 4: conjugates of rotations by known maps.
fn mobius_exact() -> Verdict {
    let theta = Angle::golden();
    let f = mobius_conjugate_germ(&theta, 128).unwrap();
    let l = linearize(&f, 512, 128).unwrap();
    let err = (1..=512).map(|k| (l.b[k].to_c64() - Complex64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    let r = hadamard_radius(&l, DEFAULT_WINDOW).unwrap();
    let mobius_ok = err < 1e-12 && (r.value - 1.0).abs() < 1e-3;

    let f = FamilySpec::Conjugate(ConjugatingMap::Expm1).build(&theta, 64, 512).unwrap();
    let l = linearize(&f, 64, 512).unwrap();
    let mut factorial = 1.0f64;
    let mut rel = 0.0f64;
    for k in 1..=60 {
        factorial *= k as f64;
        rel = rel.max((l.b[k].to_c64() * factorial - Complex64::new(1.0, 0.0)).norm());
    }
    let e = hadamard_radius(&l, DEFAULT_WINDOW).unwrap();
    verdict(
        mobius_ok && rel < 1e-8 && e.infinite,
        format!(
            "z/(1−z): max |b_n − 1| = {err:.1e}, R̂ = {:.6}; e^z−1: max rel err {rel:.1e}, infinite = {}",
            r.value, e.infinite
        ),
    )
}

// 5: φ∘f = g∘φ with φ = −z^{d−1}.
fn semiconjugacy() -> Verdict {
    let mut thetas = vec![Angle::golden(), Angle::silver()];
    thetas.extend(sample_quadratic_angles(1, 5, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT));
    let mut worst = 0.0f64;
    let mut control = f64::INFINITY;
    for t in &thetas {
        for d in 2..=8 {
            worst = worst.max(semiconjugacy_residual(d, t, 64).unwrap());
            // wrong multiplier: g at θ instead of (d−1)θ (equal when d = 2)
            if d > 2 {
                control = control.min(semiconjugacy_residual_with(d, t, t, 64).unwrap());
            }
        }
    }
    verdict(worst < 1e-12 && control > 0.1, format!("max residual {worst:.1e}, smallest negative control {control:.3}"))
}

// 6: two independent radius estimates for the golden quadratic Siegel disk.
fn cross_radius(tol: &Tolerances) -> Verdict {
    let start = Instant::now();
    let theta = Angle::golden();
    let h = log_radius(&quad_germ(&theta, 64).unwrap(), 4096, 53).unwrap();
    let c = conformal_radius_capacity(&theta, DEFAULT_COUNT, DEFAULT_BURNIN, DEFAULT_LEJA_POINTS).unwrap();
    let elapsed = start.elapsed();
    let rel = (h.value - c.conformal_radius).abs() / c.conformal_radius;
    verdict(
        rel < tol.radius_cross && elapsed < Duration::from_secs(120),
        format!("Hadamard {:.5}, capacity {:.5}, relative gap {:.2}%, {}", h.value, c.conformal_radius, 100.0 * rel, secs(elapsed)),
    )
}

// 7: Δ(r) vanishes for λz and stays below the recorded bound, flat in r,
// for λ(z + z³/4).
fn harmonicity(tol: &Tolerances) -> Verdict {
    let theta = Angle::golden();
    let radii = [11.0, 12.0, 15.0];
    let lin = harmonicity_check(FamilySpec::Linear, &theta, &radii, 64, 1024, 53).unwrap();
    let cub = harmonicity_check(FamilySpec::Cubic, &theta, &radii, 64, 1024, 53).unwrap();
    let lin_max = lin.rows.iter().map(|r| r.s.abs()).fold(0.0, f64::max);
    let cub_max = cub.rows.iter().map(|r| r.s.abs()).fold(0.0, f64::max);
    let (lo, hi) = cub.rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.s), b.max(r.s)));
    let unc = cub.rows.iter().map(|r| r.uncertainty).fold(f64::INFINITY, f64::min);
    let flagged = lin.summary.flagged + cub.summary.flagged;
    verdict(
        flagged == 0 && lin_max < tol.trivial_delta && cub_max < tol.harmonic_delta && hi - lo <= unc,
        format!("λz: max |Δ| = {lin_max:.1e}; λ(z+z³/4): max |Δ| = {cub_max:.1e} (bound {:.0e}), spread {:.1e}", tol.harmonic_delta, hi - lo),
    )
}

// 8: log R̂(f) ≥ circle average on the univalent whitelist.
fn fatou() -> Verdict {
    let cases = [
        (FamilySpec::Linear, Angle::golden()),
        (FamilySpec::MobiusPole, Angle::golden()),
        (FamilySpec::Cubic, Angle::silver()),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (fam, theta) in &cases {
        let o = fatou_check(*fam, theta, 11.0, 64, 1024, 53).unwrap();
        pass &= o.holds;
        parts.push(format!("{fam}: slack {:.3}", o.slack));
    }
    verdict(pass, parts.join(", "))
}

// 9: S = Y + log R̂ bounded and not widening with N.
fn conjecture_band(tol: &Tolerances) -> Verdict {
    let start = Instant::now();
    let thetas = sample_quadratic_angles(50, 1, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT);
    let a = conjecture_scan(&thetas, 4096, 53, 64);
    let b = conjecture_scan(&thetas, 8192, 53, 64);
    let elapsed = start.elapsed();
    let width = |r: &siegel_lab::experiments::ScanReport| r.summary.max_s - r.summary.min_s;
    let unc = a.rows.iter().chain(&b.rows).map(|r| r.uncertainty).fold(0.0, f64::max);
    let max_abs = a.rows.iter().chain(&b.rows).map(|r| r.s.abs()).fold(0.0, f64::max);
    let flagged = a.summary.flagged + b.summary.flagged;
    verdict(
        flagged == 0 && width(&b) <= width(&a) + unc && max_abs < tol.conjecture_band && elapsed < Duration::from_secs(600),
        format!(
            "width {:.4} → {:.4} (row unc ≤ {unc:.4}), max |S| = {max_abs:.3} (band {}), {}",
            width(&a), width(&b), tol.conjecture_band, secs(elapsed)
        ),
    )
}

// 10: Y(θ) ≤ Y(mθ) + C log(2m) with a fitted C, stable under doubling.
fn multiplication_lemma(tol: &Tolerances) -> Verdict {
    let ms: Vec<u64> = (2..=64).collect();
    let small = lemma_scan(&sample_quadratic_angles(200, 3, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT), &ms, 64);
    let large = lemma_scan(&sample_quadratic_angles(400, 3, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT), &ms, 64);
    let c1 = small.summary.fitted["c"];
    let c2 = large.summary.fitted["c"];
    let violations = small.summary.fitted["violations"];
    let change = (c2 - c1).abs() / c1;
    verdict(
        violations == 0.0 && small.summary.flagged == 0 && change < tol.lemma_stability,
        format!("C = {c1:.4} (200 angles), {c2:.4} (400 angles), {violations} violations"),
    )
}

// 11: the z + z³ centered quantity and the radius relation with the
// semiconjugate family.
fn dstar_bounds(tol: &Tolerances) -> Verdict {
    let thetas = sample_quadratic_angles(30, 2, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT);
    let r = dstar_bounds_scan(3, &thetas, 4096, 53, 64).unwrap();
    let max_abs = r.rows.iter().map(|x| x.s.abs()).fold(0.0, f64::max);
    let rel = r.summary.fitted["max_relation_error"];
    verdict(
        r.summary.flagged == 0 && max_abs < tol.dstar_band && rel < tol.dstar_relation,
        format!("centered ∈ [{:.3}, {:.3}] (band {}), relation error {:.2}%", r.summary.min_s, r.summary.max_s, tol.dstar_band, 100.0 * rel),
    )
}

// 12: every subcommand twice, comparing output bytes.
fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("siegel-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let runs: [&[&str]; 10] = [
        &["brjuno", "--theta", "golden", "--theta", "3/7"],
        &["linearize", "--N", "512"],
        &["radius", "--N", "1024", "--family", "cubic"],
        &["capacity"],
        &["scan-conjecture", "--samples", "8", "--N", "1024", "--seed", "4"],
        &["check-harmonic", "--N", "256", "--M", "32"],
        &["check-fatou", "--N", "256", "--M", "32"],
        &["check-lemma", "--samples", "10", "--m-max", "16"],
        &["scan-dstar", "--samples", "5", "--N", "1024"],
        &["semiconj"],
    ];
    let mut bad = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let prefix = dir.join(format!("{i}-{rep}")).to_str().unwrap().to_string();
            let status = Command::new(env!("CARGO_BIN_EXE_siegel")).args(*args).args(["--out", &prefix]).status().unwrap();
            let read = |ext: &str| std::fs::read(format!("{prefix}.{ext}")).unwrap_or_default();
            outputs.push((status.code(), read("csv"), read("json")));
        }
        if outputs[0].0 != Some(0) || outputs[0] != outputs[1] || outputs[0].1.is_empty() {
            bad.push(args[0]);
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(bad.is_empty(), format!("10 subcommands rerun, mismatched or failed: {bad:?}"))
}

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("Brjuno golden value", Box::new(brjuno_golden)),
        ("continued-fraction invariants", Box::new(cf_invariants)),
        ("linearizer oracle equivalence", Box::new(linearizer_oracle)),
        ("Möbius and exponential exact cases", Box::new(mobius_exact)),
        ("semi-conjugacy residual", Box::new(semiconjugacy)),
        ("cross-oracle radius", Box::new(|| cross_radius(&tol))),
        ("harmonicity identity", Box::new(|| harmonicity(&tol))),
        ("Fatou inequality", Box::new(fatou)),
        ("conjecture band", Box::new(|| conjecture_band(&tol))),
        ("multiplication lemma", Box::new(|| multiplication_lemma(&tol))),
        ("z + z^d bounds", Box::new(|| dstar_bounds(&tol))),
        ("determinism", Box::new(determinism)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("[{}] {id:>2}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
