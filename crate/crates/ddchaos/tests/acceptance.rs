//! Acceptance gate: ten numbered checks covering the metric, the density
//! estimator, the special-function routes, the fractional derivative, the
//! defining identities, the desk-scale chaos experiments, and report
//! determinism. One test per check; tolerances are pinned here.
//!
//! Check 3 is expected to fail for order 1.5: the tail expansion's optimal
//! f64 truncation floors near 3e-3 absolute on the |z| in [10, 12] annulus,
//! so the 1e-6 cross-route target is not reachable there. The failure output
//! carries the measured values.

use std::time::Instant;

use ddchaos::density::{upper_density_estimate, MembershipTrace};
use ddchaos::detect::{
    build_block_vector, sector_condition_check, AmplitudeRule, BlockPlan, CheckStatus,
    RegionKind, RegionPredicate, SectorVariant,
};
use ddchaos::element::{Element, GridFunction, SpectralVector};
use ddchaos::frechet::{frechet_metric, SeminormFamily, SpaceKind, Weight};
use ddchaos::ml::{caputo_l1, ml_asymptotic, ml_eval, ml_series, MlParams};
use ddchaos::models::{
    check_block_identity, check_integrated_identity, check_resolvent_identity,
    translate_orbit_norm, translate_orbit_norm_quadrature, FamilySpec, Symbol,
};
use ddchaos::num_complex::Complex64;
use ddchaos::scenario::{bundled_scenarios, run_config_text, RunOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vector(rng: &mut ChaCha8Rng) -> SpectralVector {
    let n = rng.gen_range(1..=4);
    SpectralVector::from_modes((0..n).map(|_| {
        (
            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    }))
}

/// Metric inequalities on random tuples: translation subadditivity,
/// the (|c|+1) scaling bound, and the scalar separation lower bound.
#[test]
fn c01_metric_inequalities_hold_on_random_tuples() {
    const N_MAX: u32 = 8;
    const TUPLES: usize = 1000;
    let slack = 2.0 * 0.5f64.powi(N_MAX as i32) + 1e-12;
    let space = SeminormFamily::spectral_l1(SpaceKind::Frechet, N_MAX).unwrap();
    let d = |x: &SpectralVector, y: &SpectralVector| -> f64 {
        frechet_metric(
            &space,
            &Element::Spectral(x.clone()),
            &Element::Spectral(y.clone()),
        )
        .unwrap()
    };
    let zero = SpectralVector::new();
    let phi = |t: f64| t / (1.0 + t);

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..TUPLES {
        let x = random_vector(&mut rng);
        let y = random_vector(&mut rng);
        let u = random_vector(&mut rng);
        let v = random_vector(&mut rng);
        let s = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let alpha = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let beta = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));

        let lhs = d(&x.add(&u), &y.add(&v));
        let rhs = d(&x, &y) + d(&u, &v) + slack;
        assert!(lhs <= rhs, "tuple {i}: translation subadditivity broke: {lhs} > {rhs}");

        let lhs = d(&x.scale(s), &y.scale(s));
        let rhs = (s.norm() + 1.0) * d(&x, &y) + slack;
        assert!(lhs <= rhs, "tuple {i}: scaling bound broke: {lhs} > {rhs}");

        let lhs = d(&x.scale(alpha), &x.scale(beta));
        let rhs = phi((alpha - beta).norm()) * d(&zero, &x) - slack;
        assert!(lhs >= rhs, "tuple {i}: separation lower bound broke: {lhs} < {rhs}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "metric sweep took {elapsed:?}");
    println!("PASS: 3 inequalities x {TUPLES} tuples, slack {slack:.3e}, {elapsed:?}");
}

/// Upper density of the union of [4^k, 2*4^k]: the densest tail prefix is
/// [0, 2*4^6] with member measure 4^0 + ... + 4^6 = (4^7 - 1)/3 = 5461,
/// giving 5461/8192; the running-limit value is 2/3. All-member and
/// all-non-member traces are bit-exact 1 and 0.
#[test]
fn c02_upper_density_oracle_values() {
    let mut samples = Vec::new();
    for k in 0..=6u32 {
        let a = 4.0f64.powi(k as i32);
        samples.push((a, false));
        samples.push((2.0 * a, true));
    }
    let trace = MembershipTrace::new(samples).unwrap();
    let est = upper_density_estimate(&trace, 0.5).unwrap();
    let oracle = 5461.0 / 8192.0;
    assert!(
        (est - oracle).abs() <= 1e-12,
        "estimate {est} differs from the brute-force profile value {oracle}"
    );
    assert!((0.646..=0.686).contains(&est), "estimate {est} outside [0.646, 0.686]");

    let ones = MembershipTrace::from_fn(&[1.0, 2.0, 7.7], |_| true).unwrap();
    assert_eq!(upper_density_estimate(&ones, 0.5).unwrap(), 1.0);
    let zeros = MembershipTrace::from_fn(&[1.0, 2.0, 7.7], |_| false).unwrap();
    assert_eq!(upper_density_estimate(&zeros, 0.5).unwrap(), 0.0);
    println!("PASS: estimate {est} == {oracle}, all-member 1.0, all-non-member 0.0");
}

/// Special-function routes: E_1 against exp, E_2 against cosh, and the
/// series/expansion agreement on the crossover annulus in both sectors.
#[test]
fn c03_special_function_routes_agree() {
    let params1 = MlParams::new(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_exp = 0.0f64;
    for _ in 0..200 {
        let r = 5.0 * rng.gen::<f64>().sqrt();
        let th = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let z = Complex64::from_polar(r, th);
        let rel = (ml_eval(&params1, z).unwrap().value - z.exp()).norm() / z.exp().norm();
        worst_exp = worst_exp.max(rel);
    }
    assert!(worst_exp <= 1e-10, "E_1 vs exp: worst rel {worst_exp}");
    println!("E_1 vs exp on 200 points |z| <= 5: worst rel {worst_exp:.3e}");

    let params2 = MlParams::new(2.0);
    let mut worst_cosh = 0.0f64;
    for _ in 0..200 {
        let r = 3.0 * rng.gen::<f64>().sqrt();
        let th = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let z = Complex64::from_polar(r, th);
        let rel = (ml_eval(&params2, z * z).unwrap().value - z.cosh()).norm() / z.cosh().norm();
        worst_cosh = worst_cosh.max(rel);
    }
    assert!(worst_cosh <= 1e-10, "E_2(z^2) vs cosh: worst rel {worst_cosh}");
    println!("E_2(z^2) vs cosh on 200 points |z| <= 3: worst rel {worst_cosh:.3e}");

    let mut failures = Vec::new();
    for zeta in [0.5f64, 1.5] {
        let half = zeta * std::f64::consts::FRAC_PI_2;
        let mut worst = (0.0f64, Complex64::ZERO);
        for r in [10.0, 10.7, 11.3, 12.0] {
            let args = [
                0.0,
                half * 0.5,
                -half * 0.8,
                std::f64::consts::PI - 1e-9,
                half + 0.5 * (std::f64::consts::PI - half),
                -(half + 0.2),
            ];
            for arg in args {
                let z = Complex64::from_polar(r, arg);
                let s = ml_series(zeta, z, 1e-14).unwrap().value;
                let a = ml_asymptotic(zeta, z, 10).unwrap().value;
                let rel = (s - a).norm() / s.norm();
                if rel > worst.0 {
                    worst = (rel, z);
                }
            }
        }
        println!(
            "order {zeta} on |z| in [10, 12], both sectors: worst cross-route rel {:.3e} at z = {}",
            worst.0, worst.1
        );
        if worst.0 > 1e-6 {
            failures.push(format!("order {zeta}: worst rel {:.3e} at z = {}", worst.0, worst.1));
        }
    }
    assert!(
        failures.is_empty(),
        "series and expansion disagree beyond 1e-6 on the annulus: {}; \
         the expansion's optimal f64 truncation floors near 3e-3 absolute \
         for order 1.5 there, so this target is unreachable at that order",
        failures.join("; ")
    );
}

/// L1 fractional derivative: exactness on affine data and the eigen-relation
/// of the order-1/2 decay mode.
#[test]
fn c04_caputo_derivative_checks() {
    let h = 1e-4;
    let n = (1.0f64 / h).round() as usize;
    let samples: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let d = caputo_l1(&samples, h, 0.5).unwrap();
    let target = 2.0 / std::f64::consts::PI.sqrt();
    let err = (d[n - 1] - target).abs();
    assert!(err <= 1e-3, "half-derivative of t at 1: {} vs {target}", d[n - 1]);

    // f(t) = E_{1/2}(-sqrt t) solves D^{1/2} f = -f.
    let t_end = 3.0;
    let m = (t_end / h).round() as usize;
    let params = MlParams::new(0.5);
    let f: Vec<f64> = (0..=m)
        .map(|j| {
            let t = j as f64 * h;
            ml_eval(&params, c(-t.sqrt(), 0.0)).unwrap().value.re
        })
        .collect();
    let df = caputo_l1(&f, h, 0.5).unwrap();
    let mut worst = 0.0f64;
    for i in 1..=m {
        let t = i as f64 * h;
        if t < 0.5 {
            continue;
        }
        worst = worst.max((df[i - 1] + f[i]).abs() / f[i].abs());
    }
    assert!(worst <= 1e-2, "eigen-relation worst rel {worst} on t in [0.5, 3]");
    println!("PASS: affine err {err:.3e} (bound 1e-3), eigen-relation worst rel {worst:.3e} (bound 1e-2), h = {h}");
}

/// Defining identities: the fractional resolvent equation on eigen-modes and
/// first-order convergence of the once-integrated translation identity.
#[test]
fn c05_defining_identities() {
    let spec = FamilySpec::fractional("frac", 1.5, 0.0, vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let mut worst = 0.0f64;
    for lam in [c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)] {
        for t in [1.0, 3.0] {
            let x = SpectralVector::single(lam, c(1.0, 0.0));
            let r = check_resolvent_identity(&spec, &x, t, 1e-4).unwrap();
            assert!(r <= 1e-6, "resolvent residual {r} at lambda = {lam}, t = {t}");
            worst = worst.max(r);
        }
    }
    println!("resolvent identity: worst residual {worst:.3e} over lambda in {{-1, 1, i}}, t in {{1, 3}} (bound 1e-6)");

    let spec = FamilySpec::translation("shift", 1.0, Weight::ExpDecay { a: 1.0 }, 2.0);
    let residual_at = |h: f64| -> f64 {
        let g = GridFunction::from_fn(h, 10.0, |x| {
            let u = x - 2.0;
            if u.abs() > 6.0 {
                0.0
            } else {
                (-u * u).exp()
            }
        })
        .unwrap();
        check_integrated_identity(&spec, &Element::Grid(g), 1.0, 1.0, h).unwrap()
    };
    let r1 = residual_at(0.02);
    let r2 = residual_at(0.01);
    let ratio = r1 / r2;
    assert!(
        ratio >= 1.8,
        "integrated identity residual fell only {ratio}x under step halving ({r1} -> {r2})"
    );
    println!("PASS: integrated identity residuals {r1:.3e} -> {r2:.3e}, ratio {ratio:.2} (need >= 1.8)");
}

/// The paired block operator's once-integrated identity converges under two
/// grid/quadrature refinement levels.
#[test]
fn c06_block_identity_refinement() {
    let residual_at = |h: f64| -> f64 {
        let make = |odd: bool| {
            GridFunction::from_fn(h, 12.0, move |x| {
                if x.abs() > 8.0 {
                    0.0
                } else {
                    let g = (-x * x).exp();
                    if odd {
                        x * g
                    } else {
                        g
                    }
                }
            })
            .unwrap()
        };
        let v1 = make(false);
        let v2 = make(true);
        check_block_identity((&v1, &v2), 1.0, h).unwrap()
    };
    let r = [residual_at(0.02), residual_at(0.01), residual_at(0.005)];
    let q1 = r[0] / r[1];
    let q2 = r[1] / r[2];
    assert!(q1 >= 1.8, "first refinement ratio {q1} < 1.8 ({} -> {})", r[0], r[1]);
    assert!(q2 >= 1.8, "second refinement ratio {q2} < 1.8 ({} -> {})", r[1], r[2]);
    println!("PASS: residuals {:.3e} -> {:.3e} -> {:.3e}, ratios {q1:.2}, {q2:.2}", r[0], r[1], r[2]);
}

/// Tail dichotomy of the order-3/2 scalar multiplier: the decay branch
/// matches the reciprocal leading term of its expansion, the growth branch
/// grows at the exponential rate.
#[test]
fn c07_asymptotic_dichotomy() {
    let params = MlParams::new(1.5);
    let t = 30.0f64;
    let z = c(-t.powf(1.5), 0.0);
    let e = ml_eval(&params, z).unwrap().value;
    // Gamma(1 - 3/2) = Gamma(-1/2) = -2 sqrt(pi)
    let gamma_m_half = -2.0 * std::f64::consts::PI.sqrt();
    let ratio = e * gamma_m_half * z;
    // leading term of the tail expansion: E ~ -z^{-1}/Gamma(-1/2), so the
    // normalized ratio sits at -1
    assert!(
        (ratio - c(-1.0, 0.0)).norm() <= 0.1,
        "decay-branch ratio {ratio} is not within 10% of -1"
    );

    let mut worst: (f64, f64) = (0.0, 0.0);
    for k in 0..=10 {
        let t = 10.0 + k as f64;
        let e = ml_eval(&params, c(t.powf(1.5), 0.0)).unwrap().value;
        let gap = e.norm().ln() - t;
        if gap.abs() > worst.0.abs() {
            worst = (gap, t);
        }
        assert!(
            (-2.0..=2.0).contains(&gap),
            "growth branch: log|E| - t = {gap} at t = {t} leaves [-2, 2]"
        );
    }
    println!(
        "PASS: decay ratio {ratio} (within 10% of -1), growth log-gap extreme {:.4} at t = {} (limit ln(2/3) = {:.4})",
        worst.0,
        worst.1,
        (2.0f64 / 3.0).ln()
    );
}

/// Two-speed scrambled-pair experiment: the bundled scenario certifies both
/// densities above 0.85, and the closed-form orbit norms match independent
/// quadrature at 100 log-uniform random times per speed.
#[test]
fn c08_disjoint_scrambled_pair_experiment() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let text = ddchaos::scenario::bundled("blocks-disjoint-2speed").unwrap();
    let report = run_config_text(text, &RunOptions::new(dir.path())).unwrap();
    assert!(report.all_ok, "bundled two-speed scenario failed");
    let v = report.verdict.as_ref().expect("detection verdict");
    let sep = v.separation_density.expect("separation density");
    let prox = v.proximity_density.expect("proximity density");
    assert!(sep >= 0.85, "separation density {sep} < 0.85");
    assert!(prox >= 0.85, "proximity density {prox} < 0.85");

    let plan = BlockPlan {
        a1: 400.0,
        ratio_in: 20.0,
        ratio_gap: 20.0,
        k_count: 5,
        amplitude: AmplitudeRule::Linear,
    };
    let w = build_block_vector(&plan).unwrap();
    let weight = Weight::ExpDecay { a: 1.0 };
    let (t_min, horizon) = (1.0f64, 2.048e14f64);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for speed in [1.0, 2.0] {
        for _ in 0..100 {
            let t = t_min * (horizon / t_min).powf(rng.gen::<f64>());
            let a = translate_orbit_norm(&w, &weight, speed, t, 2.0).unwrap();
            let b = translate_orbit_norm_quadrature(&w, &weight, speed, t, 2.0).unwrap();
            let rel = if a == 0.0 && b == 0.0 { 0.0 } else { (a - b).abs() / a.max(b) };
            assert!(rel <= 1e-8, "norm routes disagree: {a} vs {b} at t = {t}, speed {speed}");
            worst = worst.max(rel);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "experiment took {elapsed:?}");
    println!(
        "PASS: separation {sep}, proximity {prox} (need 0.85); 200 norm cross-checks worst rel {worst:.3e} (bound 1e-8); {elapsed:?}"
    );
}

/// Sector-condition reports: the bundled polynomial scenario passes both
/// half-plane conditions, a sign-flipped growth witness fails the growth
/// condition, and a boundary point fails the rotated-sector decay condition.
#[test]
fn c09_sector_condition_reports() {
    let dir = tempfile::tempdir().unwrap();
    let text = ddchaos::scenario::bundled("polinomi-AB").unwrap();
    let report = run_config_text(text, &RunOptions::new(dir.path())).unwrap();
    let sector = report
        .checks
        .iter()
        .find(|chk| chk.kind == "sector")
        .expect("sector check in the report");
    assert!(sector.ok, "bundled sector check failed: {}", sector.detail);
    let hyp = sector.hypotheses.as_ref().expect("hypothesis report");
    assert!(hyp.checks.iter().any(|h| h.name == "A" && h.status == CheckStatus::Pass));
    assert!(hyp.checks.iter().any(|h| h.name == "B" && h.status == CheckStatus::Pass));

    let polys = vec![
        Symbol::poly(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        Symbol::poly(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
    ];
    let mut region = RegionPredicate {
        kind: RegionKind::Disk { center: c(-1.0, 0.0), radius: 0.3 },
        negate: false,
        samples: vec![c(-0.8, 0.0), c(-1.2, 0.0), c(-1.0, 0.2), c(-1.0, -0.2)],
        cluster: c(-1.0, 0.0),
        growth_candidates: vec![c(-1.0, 0.0)],
    };
    let flipped = sector_condition_check(&polys, &region, &SectorVariant::AB).unwrap();
    let b = flipped.checks.iter().find(|h| h.name == "B").unwrap();
    assert_eq!(b.status, CheckStatus::Fail, "witness -1 should fail the growth condition");

    // z = e^{-i pi/4} maps to the rotated-sector boundary: -z has argument
    // exactly 3 pi / 4 = (3/2) * pi / 2.
    let boundary = -Complex64::from_polar(1.0, 0.75 * std::f64::consts::PI);
    region.kind = RegionKind::Disk { center: boundary, radius: 0.1 };
    region.samples = vec![boundary];
    region.cluster = boundary;
    region.growth_candidates = vec![c(-0.3, 0.0)];
    let polys = vec![Symbol::poly(vec![c(0.0, 0.0), c(1.0, 0.0)])];
    let variant = SectorVariant::ABprime { zeta: 1.5, theta: 0.0 };
    let rep = sector_condition_check(&polys, &region, &variant).unwrap();
    let a_prime = rep.checks.iter().find(|h| h.name == "A_prime").unwrap();
    assert_eq!(a_prime.status, CheckStatus::Fail, "boundary point must fail the decay condition");
    assert!(
        a_prime.detail.contains("boundary"),
        "failure should name the boundary: {}",
        a_prime.detail
    );
    println!("PASS: bundled conditions pass; flipped witness fails B; boundary point fails A_prime");
}

/// Every bundled scenario reruns byte-identically outside the metadata file.
#[test]
fn c10_reports_are_deterministic() {
    for (name, text) in bundled_scenarios() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run_config_text(text, &RunOptions::new(dir_a.path())).unwrap();
        run_config_text(text, &RunOptions::new(dir_b.path())).unwrap();
        let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != "run_meta.json")
            .collect();
        names.sort();
        assert!(names.contains(&"report.json".to_string()));
        for file in names {
            let a = std::fs::read(dir_a.path().join(&file)).unwrap();
            let b = std::fs::read(dir_b.path().join(&file)).unwrap();
            assert_eq!(a, b, "{name}/{file} differs between identical runs");
        }
    }
    println!("PASS: {} scenarios, all report bytes reproduced", bundled_scenarios().len());
}
