use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rqchannel::correlators::*;
use rqchannel::quadrature::gk::{integrate_plain, GkOptions};
use rqchannel::quadrature::{extrapolate_ladder, Regulator};

/// `K_1(x) = int_0^inf e^{-x cosh u} cosh u du`; trapezoid converges
/// geometrically for this entire, rapidly decaying integrand.
fn bessel_k1(x: f64) -> f64 {
    let h: f64 = 1e-3;
    let mut sum = 0.5 * (-x).exp();
    let mut u: f64 = h;
    loop {
        let v = (-x * u.cosh()).exp() * u.cosh();
        sum += v;
        if v < 1e-300 || u > 50.0 {
            break;
        }
        u += h;
    }
    sum * h
}

#[test]
fn massless_closed_form_examples() {
    let w = wightman(0.0, 0.0, 1.0, 1e-12).unwrap();
    assert!((w.re - 1.0 / (4.0 * PI * PI)).abs() < 1e-12);
    let w = wightman(0.0, 2.0, 0.0, 1e-12).unwrap();
    assert!((w.re + 1.0 / (16.0 * PI * PI)).abs() < 1e-12);
    assert!((w.re + 0.006333).abs() < 1e-6);
}

#[test]
fn massive_equal_time_matches_bessel_form() {
    // At dt = 0 the regulated mode integral is the Euclidean propagator at
    // distance sqrt(r^2 + eps^2): m K_1(m rho) / (4 pi^2 rho).
    let (m, r, eps): (f64, f64, f64) = (1.0, 2.0, 1e-3);
    let rho = (r * r + eps * eps).sqrt();
    let exact = m * bessel_k1(m * rho) / (4.0 * PI * PI * rho);
    let w = wightman(m, 0.0, r, eps).unwrap();
    assert!(((w.re - exact) / exact).abs() < 1e-8, "{w} vs {exact}");
    assert!(w.im.abs() < 1e-10 * exact);
}

#[test]
fn massive_equal_time_matches_truncated_trapezoid() {
    // Independent fixed-grid oracle: the eps damping makes [0, 40/eps]
    // sufficient, and the integrand is even in p so the trapezoid rule has
    // no endpoint corrections at p = 0.
    let (m, r, eps): (f64, f64, f64) = (1.0, 2.0, 1e-3);
    let n = 400_000;
    let top = 40.0 / eps;
    let h = top / n as f64;
    let mut sum = 0.0;
    for k in 1..=n {
        let p = k as f64 * h;
        let e = (p * p + m * m).sqrt();
        sum += p * (p * r).sin() / e * (-eps * e).exp();
    }
    let oracle = sum * h / (4.0 * PI * PI * r);
    let w = wightman(m, 0.0, r, eps).unwrap();
    assert!(((w.re - oracle) / oracle).abs() < 1e-6, "{} vs {oracle}", w.re);
}

#[test]
fn mode_integral_matches_closed_form_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 20 {
        let dt: f64 = rng.random_range(-3.0..3.0);
        let r: f64 = rng.random_range(0.0..3.0);
        if (dt * dt - r * r).abs() <= 0.01 {
            continue;
        }
        let eps = 0.05;
        let closed = wightman_massless(dt, r, eps);
        let mode = wightman_mode(0.0, dt, r, eps).unwrap();
        assert!((mode - closed).norm() <= 1e-6 * closed.norm(), "dt={dt} r={r}: {mode} vs {closed}");
        checked += 1;
    }
}

#[test]
fn commutator_antisymmetry_and_zero_at_equal_time() {
    for &(m, dt, r) in &[(0.0, 0.7, 1.0), (0.0, 1.3, 0.4), (0.5, 0.9, 1.2)] {
        let a = commutator_eps(m, dt, r, 0.05).unwrap();
        let b = commutator_eps(m, -dt, r, 0.05).unwrap();
        assert_eq!(a + b, Complex64::new(0.0, 0.0));
    }
    assert_eq!(commutator_eps(0.0, 0.0, 1.0, 0.1).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn microcausality_ladder_extrapolates_to_zero() {
    // The eps expansion converges only for eps below the distance to the
    // lightcone, so the ladder starts at a fraction of that distance.
    for &(dt, r) in &[(0.5, 1.0), (-0.2, 0.3), (1.9, 2.0), (0.998, 1.0)] {
        let gap: f64 = r - f64::abs(dt);
        let reg = Regulator::halving(0.25 * gap, 8);
        let (v, _) = regulator_limit(&reg, 6, |eps| commutator_eps(0.0, dt, r, eps)).unwrap();
        assert!(v.norm() < 1e-8 / (4.0 * PI * PI * r * r), "dt={dt} r={r}: {v}");
    }
}

#[test]
fn commutator_delta_strength_recovered_by_integration() {
    let r = 1.0;
    let support = commutator_distributional(0.0, r).unwrap();
    let opts = GkOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        ..GkOptions::default()
    };
    for &(locus, weight) in &support.loci {
        let ladder: Vec<(f64, Complex64)> = Regulator::halving(0.02, 6)
            .ladder
            .iter()
            .map(|&eps| {
                let out = integrate_plain(
                    |dt| commutator_eps(0.0, dt, r, eps).unwrap(),
                    locus - 0.5,
                    locus + 0.5,
                    &[locus],
                    &opts,
                )
                .unwrap();
                (eps, out.value)
            })
            .collect();
        let (v, _) = extrapolate_ladder(&ladder, 4).unwrap();
        assert!((v - weight).norm() < 1e-6 * weight.norm(), "locus {locus}: {v} vs {weight}");
    }
    assert!((support.weight() - 1.0 / (4.0 * PI)).abs() < 1e-15);
    let two = commutator_distributional(0.0, 2.0).unwrap();
    assert!((two.weight() - 1.0 / (8.0 * PI)).abs() < 1e-15);
    assert!(commutator_distributional(1.0, 1.0).is_err());
}

#[test]
fn feynman_examples() {
    let f = feynman(0.0, 0.0, 1.0, 1e-12).unwrap();
    assert!((f.re - 1.0 / (4.0 * PI * PI)).abs() < 1e-12);
    assert_eq!(feynman(0.0, 3.0, 1.0, 0.01).unwrap(), wightman(0.0, 3.0, 1.0, 0.01).unwrap());
    for &dt in &[0.3, 1.7, 4.0] {
        assert_eq!(feynman(0.2, dt, 1.0, 0.05).unwrap(), feynman(0.2, -dt, 1.0, 0.05).unwrap());
    }
}

#[test]
fn feynman_spacelike_tail_is_real_and_nonzero() {
    let (v, _) = regulator_limit(&Regulator::default(), 6, |eps| feynman(0.0, 0.4, 1.0, eps)).unwrap();
    assert!(v.re.abs() > 1e-3);
    assert!(v.im.abs() < 1e-8);
}

#[test]
fn positive_frequency_is_the_wightman_function() {
    for &(m, dt, r) in &[(0.0, 0.0, 1.0), (0.0, 0.5, 1.0), (0.7, 1.2, 0.3)] {
        assert_eq!(positive_frequency(m, dt, r, 0.05).unwrap(), wightman(m, dt, r, 0.05).unwrap());
    }
    let (v, _) = regulator_limit(&Regulator::default(), 6, |eps| positive_frequency(0.0, 0.5, 1.0, eps)).unwrap();
    assert!(v.norm() > 1e-3);
}
