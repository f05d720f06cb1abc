use std::f64::consts::PI;

use num_complex::Complex64;
use rqchannel::correlators::commutator_distributional;
use rqchannel::error::Error;
use rqchannel::quadrature::gk::{integrate_plain, GkOptions};
use rqchannel::quadrature::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn symmetric_integrand_simplex_is_half_the_square() {
    let p = QuadraturePolicy::default();
    let f = TimeIntegrand::new(2, |t| c((t[0] * t[1]).cos() + t[0] * t[0] * t[1] * t[1]));
    let tri = integrate_simplex(&f, 0.0, 2.0, &p).unwrap();
    let sq = integrate_pieces(&f, &[Piece::unit(Domain::cube(2, 0.0, 2.0))], &p.nested()).unwrap();
    assert!((2.0 * tri.value - sq.value).norm() <= p.rel_tol * sq.value.norm());
}

#[test]
fn oscillatory_simplex_matches_antiderivative() {
    // int_0^{2 pi} dt1 int_0^{t1} dt2 e^{i(t1 - t2)} = 2 pi i
    let f = TimeIntegrand::new(2, |t| Complex64::from_polar(1.0, t[0] - t[1])).with_frequency(1.0);
    let r = integrate_simplex(&f, 0.0, 2.0 * PI, &QuadraturePolicy::default()).unwrap();
    assert!((r.value - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-9);
}

#[test]
fn error_estimates_are_honest() {
    // (integrand, a, b, exact)
    type Case = (fn(f64) -> f64, f64, f64, f64);
    let corpus: Vec<Case> = vec![
        (|x| x.exp(), 0.0, 1.0, 1f64.exp() - 1.0),
        (|x| 1.0 / (1.0 + x * x), -5.0, 5.0, 2.0 * 5f64.atan()),
        (|x| x.sqrt(), 0.0, 1.0, 2.0 / 3.0),
        (|x| (10.0 * x).sin(), 0.0, 1.3, (1.0 - 13f64.cos()) / 10.0),
        (|x| x.ln(), 1e-12, 1.0, -1.0),
        (|x| (-x * x).exp(), -6.0, 6.0, PI.sqrt() * statrs::function::erf::erf(6.0)),
        (|x| 1.0 / (x + 1e-3), 0.0, 1.0, (1.001f64 / 1e-3).ln()),
        (|x| (50.0 * x).cos() * x, 0.0, 1.0, (50f64.sin() / 50.0) + (50f64.cos() - 1.0) / 2500.0),
        (|x| x.abs().powf(0.3), -1.0, 1.0, 2.0 / 1.3),
        (|x| 1.0 / x.cosh(), -20.0, 20.0, 2.0 * (20f64.sinh().atan())),
    ];
    let tolerances = [1e-4, 1e-7, 1e-10];
    let mut honest = 0;
    let mut total = 0;
    for (f, a, b, exact) in &corpus {
        for &tol in &tolerances {
            let opts = GkOptions {
                rel_tol: tol,
                abs_tol: 0.0,
                ..GkOptions::default()
            };
            let out = integrate_plain(|x| c(f(x)), *a, *b, &[], &opts).unwrap();
            total += 1;
            if (out.value.re - exact).abs() <= 10.0 * out.error {
                honest += 1;
            }
        }
    }
    assert!(honest as f64 >= 0.95 * total as f64, "{honest}/{total}");
}

#[test]
fn budget_exhaustion_carries_best_value() {
    let opts = GkOptions {
        max_segments: 3,
        rel_tol: 1e-14,
        ..GkOptions::default()
    };
    match integrate_plain(|x| c((1.0 / x).sin()), 1e-4, 1.0, &[], &opts) {
        Err(Error::Quadrature { estimate, .. }) => assert!(estimate > 0.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn collapse_outside_the_window_is_empty() {
    let support = commutator_distributional(0.0, 1.0).unwrap();
    let pieces = [Piece::unit(Domain::simplex(2, 0.0, 0.5))];
    assert!(collapse_delta(&pieces, &support, 0, 1).pieces.is_empty());
}

#[test]
fn collapse_evaluates_the_delta() {
    // int_{t2 <= t1} eta(t1) eta(t2) [phi(t1), phi(t2)] with the +r locus only
    // inside the ordered region: (weight at dt = +r) * int eta(t1) eta(t1 - r) dt1.
    let (r, w0, w1) = (1.0, 0.0, 3.0);
    let eta = |t: f64| (PI * (t - w0) / (w1 - w0)).sin().powi(2);
    let support = commutator_distributional(0.0, r).unwrap();
    let pieces = collapse_delta(&[Piece::unit(Domain::simplex(2, w0, w1))], &support, 0, 1).pieces;
    let f = TimeIntegrand::new(2, |t| c(eta(t[0]) * eta(t[1])));
    let got = integrate_pieces(&f, &pieces, &QuadraturePolicy::default().nested()).unwrap();
    let direct = integrate_plain(|t| c(eta(t) * eta(t - r)), w0 + r, w1, &[], &GkOptions::default()).unwrap();
    let weight = support.loci.iter().find(|l| l.0 > 0.0).unwrap().1;
    assert!((got.value - weight * direct.value).norm() < 1e-10);
}

#[test]
fn ladder_recovers_polynomial_intercepts() {
    let reg = Regulator::default();
    let lin: Vec<_> = reg.ladder.iter().map(|&e| (e, c(2.5 - 4.0 * e))).collect();
    let (v, _) = extrapolate_ladder(&lin, 6).unwrap();
    assert!((v.re - 2.5).abs() < 1e-14);
    let flat: Vec<_> = reg.ladder.iter().map(|&e| (e, c(0.75))).collect();
    let (v, res) = extrapolate_ladder(&flat, 6).unwrap();
    assert_eq!((v.re, res), (0.75, 0.0));
    let quad: Vec<_> = reg
        .ladder
        .iter()
        .map(|&e| (e, c(1.7 - 3.0 * e + 11.0 * e * e)))
        .collect();
    let (v, _) = extrapolate_ladder(&quad, 6).unwrap();
    assert!(((v.re - 1.7) / 1.7).abs() < 1e-10);
}

#[test]
fn ladder_rejects_divergent_rungs() {
    let reg = Regulator::default();
    let wild: Vec<_> = reg.ladder.iter().map(|&e| (e, c((1.0 / e).sin() / e))).collect();
    assert!(matches!(extrapolate_ladder(&wild, 6), Err(Error::LadderDivergent { .. })));
}

#[test]
fn too_many_variables_rejected() {
    let f = TimeIntegrand::new(5, |_| c(1.0));
    assert!(integrate_simplex(&f, 0.0, 1.0, &QuadraturePolicy::default()).is_err());
}
