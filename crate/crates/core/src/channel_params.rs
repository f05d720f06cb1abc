//! Leading-order channel coefficients `P_e, A, B, C, D`, the Fermi
//! transition probability and the Glauber-detector leakage.
//!
//! Times are ordered `t1 >= t2 >= t3 >= t4` inside the switching window and
//! stored as `t[0..4]`. Massless commutators are collapsed onto their delta
//! support; every remaining Wightman factor is regulated and extrapolated
//! along the scenario's regulator ladder.

use num_complex::Complex64;

use crate::correlators::{commutator_distributional, WightmanFn};
use crate::error::{Error, Result};
use crate::quadrature::collapse::{collapse_delta, merge};
use crate::quadrature::{
    integrate_pieces, regulated, Domain, IntegralResult, Piece, TimeIntegrand,
};
use crate::scenario::{classify_separation, ScenarioSpec, Separation};

/// Couplings above this are flagged as outside the weak-coupling regime.
pub const WEAK_COUPLING: f64 = 0.3;

/// Allowed relative imaginary residue of `P_e`.
pub const PE_IMAG_TOL: f64 = 1e-8;

/// Allowed relative imaginary residue of `A` and `B`.
pub const REALITY_TOL: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How integrals containing a field commutator are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Delta collapse for massless fields, regulator ladder otherwise.
    #[default]
    Auto,
    Collapse,
    Ladder,
}

/// A computed quantity with its combined quadrature and extrapolation
/// uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub uncertainty: f64,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

impl Estimate<Complex64> {
    fn from_result(r: IntegralResult) -> Self {
        Estimate {
            value: r.value,
            uncertainty: r.uncertainty(),
            evaluations: r.evaluations,
            warnings: r.warnings,
        }
    }

    fn zero() -> Self {
        Estimate {
            value: ZERO,
            uncertainty: 0.0,
            evaluations: 0,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamsMeta {
    pub separation: Option<Separation>,
    /// Uncertainties of `P_e, A, B, C, D`, in that order.
    pub uncertainties: [f64; 5],
    pub evaluations: usize,
    /// Length of the interaction window, when the switching has compact support.
    pub window: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub pe: f64,
    pub a: f64,
    pub b: f64,
    pub c: Complex64,
    pub d: Complex64,
    pub meta: ParamsMeta,
}

impl ChannelParams {
    pub fn new(pe: f64, a: f64, b: f64, c: Complex64, d: Complex64) -> Self {
        ChannelParams {
            pe,
            a,
            b,
            c,
            d,
            meta: ParamsMeta::default(),
        }
    }

    pub fn zero() -> Self {
        ChannelParams::new(0.0, 0.0, 0.0, ZERO, ZERO)
    }

    /// Checks finiteness, population bounds and the Kraus radicands, each
    /// with slack equal to the recorded uncertainties.
    pub fn validate(&self) -> Result<()> {
        let [upe, ua, ub, uc, ud] = self.meta.uncertainties;
        let floor = 1e-12;
        let vals = [
            self.pe, self.a, self.b, self.c.re, self.c.im, self.d.re, self.d.im,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonphysicalParams("non-finite component".into()));
        }
        let mut problems = Vec::new();
        if self.pe < -(upe + floor) {
            problems.push(format!("P_e = {:.6e} < 0", self.pe));
        }
        for (name, v, u) in [
            ("P_e + A", self.pe + self.a, upe + ua),
            ("P_e + B", self.pe + self.b, upe + ub),
        ] {
            if v < -(u + floor) || v > 1.0 + u + floor {
                problems.push(format!("{name} = {v:.6e} outside [0, 1]"));
            }
        }
        let qa = 1.0 - self.pe - self.a;
        let qb = 1.0 - self.pe - self.b;
        if qa > 0.0 && qb > 0.0 {
            let rc = self.pe + self.a - self.c.norm_sqr() / qb;
            let slack_c = upe + ua + 2.0 * self.c.norm() * uc / qb + floor;
            if rc < -slack_c {
                problems.push(format!("P_e + A - |C|^2/(1 - P_e - B) = {rc:.6e} < 0"));
            }
            let rd = self.pe + self.b - self.d.norm_sqr() / qa;
            let slack_d = upe + ub + 2.0 * self.d.norm() * ud / qa + floor;
            if rd < -slack_d {
                problems.push(format!("P_e + B - |D|^2/(1 - P_e - A) = {rd:.6e} < 0"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::NonphysicalParams(problems.join("; ")))
        }
    }
}

fn method_for(spec: &ScenarioSpec, method: Method) -> Method {
    match method {
        Method::Auto if spec.field.mass == 0.0 => Method::Collapse,
        Method::Auto => Method::Ladder,
        m => m,
    }
}

fn window(spec: &ScenarioSpec) -> (f64, f64, f64) {
    let s = spec.switching;
    (s.start, s.end, s.end - s.start)
}

/// `P_e = alpha2^2 int int eta eta W(t1 - t2, 0) exp(-i dE (t1 - t2))` over
/// the full square window.
pub fn compute_pe(spec: &ScenarioSpec) -> Result<Estimate<f64>> {
    spec.validate()?;
    let a2 = spec.detector2.coupling;
    if a2 == 0.0 {
        return Ok(real_zero());
    }
    let (start, end, len) = window(spec);
    let (m, gap, sw, pol) = (spec.field.mass, spec.gap, spec.switching, &spec.quadrature);
    let r = regulated(pol, |eps| {
        let w = WightmanFn::new(m, 0.0, eps, len)?;
        let f = TimeIntegrand::new(2, |t| {
            let dt = t[0] - t[1];
            w.eval(dt) * Complex64::from_polar(1.0, -gap * dt)
        })
        .singular_at(0, 1, &[0.0])
        .with_frequency(gap)
        .with_weight(|x| sw.eval(x));
        integrate_pieces(&f, &[Piece::unit(Domain::cube(2, start, end))], &pol.rung())
    })?
    .scaled(Complex64::new(a2 * a2, 0.0));
    let est = Estimate::from_result(r);
    if est.value.im.abs() > PE_IMAG_TOL * est.value.re.abs() + est.uncertainty {
        return Err(Error::NonphysicalParams(format!(
            "P_e has imaginary residue {:.3e} (real part {:.6e})",
            est.value.im, est.value.re
        )));
    }
    if est.value.re < -est.uncertainty {
        return Err(Error::NonphysicalPe(est.value.re));
    }
    Ok(real_part(est))
}

fn real_zero() -> Estimate<f64> {
    Estimate {
        value: 0.0,
        uncertainty: 0.0,
        evaluations: 0,
        warnings: Vec::new(),
    }
}

fn real_part(e: Estimate<Complex64>) -> Estimate<f64> {
    Estimate {
        value: e.value.re,
        uncertainty: e.uncertainty,
        evaluations: e.evaluations,
        warnings: e.warnings,
    }
}

/// `int_{t2 <= t1} eta eta phase(t1, t2) [phi(x1(t2)), phi(x2(t1))]`.
fn commutator_pair<P>(spec: &ScenarioSpec, method: Method, phase: P) -> Result<Estimate<Complex64>>
where
    P: Fn(f64, f64) -> Complex64 + Sync,
{
    let (start, end, len) = window(spec);
    let (m, l, sw, pol) = (
        spec.field.mass,
        spec.separation(),
        spec.switching,
        &spec.quadrature,
    );
    let base = [Piece::unit(Domain::simplex(2, start, end))];
    let freq = spec.gap.abs() * 2.0;
    let r = match method_for(spec, method) {
        Method::Collapse => {
            let sup = commutator_distributional(m, l)?;
            let col = collapse_delta(&base, &sup, 1, 0);
            let f = TimeIntegrand::new(2, |t| phase(t[0], t[1]))
                .with_frequency(freq)
                .with_weight(|x| sw.eval(x));
            let mut r = integrate_pieces(&f, &col.pieces, &pol.nested())?;
            r.warnings.extend(col.warnings);
            r
        }
        _ => regulated(pol, |eps| {
            let w = WightmanFn::new(m, l, eps, len)?;
            let f = TimeIntegrand::new(2, |t| phase(t[0], t[1]) * w.commutator(t[1] - t[0]))
                .singular_at(1, 0, &[-l, l])
                .with_frequency(freq)
                .with_weight(|x| sw.eval(x));
            integrate_pieces(&f, &base, &pol.rung())
        })?,
    };
    Ok(Estimate::from_result(r))
}

fn coupling_product(spec: &ScenarioSpec) -> f64 {
    spec.detector1.coupling * spec.detector2.coupling
}

fn scale(mut e: Estimate<Complex64>, k: f64) -> Estimate<Complex64> {
    e.value *= k;
    e.uncertainty *= k.abs();
    e
}

/// `C = alpha1 alpha2 int_{t2 <= t1} eta eta exp(i dE (t2 - t1)) [phi(x1(t2)), phi(x2(t1))]`.
pub fn compute_c(spec: &ScenarioSpec) -> Result<Estimate<Complex64>> {
    compute_c_with(spec, Method::Auto)
}

pub fn compute_c_with(spec: &ScenarioSpec, method: Method) -> Result<Estimate<Complex64>> {
    spec.validate()?;
    let k = coupling_product(spec);
    if k == 0.0 {
        return Ok(Estimate::zero());
    }
    let g = spec.gap;
    let e = commutator_pair(spec, method, |t1, t2| {
        Complex64::from_polar(1.0, g * (t2 - t1))
    })?;
    Ok(scale(e, k))
}

/// `D = -alpha1 alpha2 int_{t2 <= t1} eta eta exp(i dE (t2 + t1)) [phi(x1(t2)), phi(x2(t1))]`.
pub fn compute_d(spec: &ScenarioSpec) -> Result<Estimate<Complex64>> {
    compute_d_with(spec, Method::Auto)
}

pub fn compute_d_with(spec: &ScenarioSpec, method: Method) -> Result<Estimate<Complex64>> {
    spec.validate()?;
    let k = coupling_product(spec);
    if k == 0.0 {
        return Ok(Estimate::zero());
    }
    let g = spec.gap;
    let e = commutator_pair(spec, method, |t1, t2| {
        Complex64::from_polar(1.0, g * (t2 + t1))
    })?;
    Ok(scale(e, -k))
}

/// Time permutations of the first block of the `A` integrand: the block
/// itself, `t1 <-> t2` and `t2 <-> t3`.
const F_PERMS: [[usize; 4]; 3] = [[0, 1, 2, 3], [1, 0, 2, 3], [0, 2, 1, 3]];

/// First block at times `s = t[perm]`, without its commutator
/// `[phi(x2(s1)), phi(x1(s3))]`:
/// `cos(g (s1 - s2)) [exp(-i g (s3 - s4)) W(s4 - s2) - exp(i g (s3 - s4)) W(s2 - s4)]`.
#[inline]
fn f_block(g: f64, w: &WightmanFn, t: &[f64], p: &[usize; 4]) -> Complex64 {
    let (s1, s2, s3, s4) = (t[p[0]], t[p[1]], t[p[2]], t[p[3]]);
    let ph = Complex64::from_polar(1.0, g * (s3 - s4));
    (g * (s1 - s2)).cos() * (ph.conj() * w.eval(s4 - s2) - ph * w.eval(s2 - s4))
}

/// Second block without its commutator `[phi(x1(t2)), phi(x2(t1))]`:
/// `i sin(g (t2 - t3)) [exp(-i g (t1 - t4)) W(t3 - t4) + exp(i g (t1 - t4)) W(t4 - t3)]`.
#[inline]
fn g_block(g: f64, w: &WightmanFn, t: &[f64]) -> Complex64 {
    let ph = Complex64::from_polar(1.0, g * (t[0] - t[3]));
    I * (g * (t[1] - t[2])).sin() * (ph.conj() * w.eval(t[2] - t[3]) + ph * w.eval(t[3] - t[2]))
}

/// The braced fourth-order integral defining `A`, at gap `g` (which may be
/// negative), without the prefactor `2 (alpha1 alpha2)^2`.
fn a_integral(spec: &ScenarioSpec, g: f64, method: Method) -> Result<IntegralResult> {
    let (start, end, len) = window(spec);
    let (m, l, sw, pol) = (
        spec.field.mass,
        spec.separation(),
        spec.switching,
        &spec.quadrature,
    );
    let base = [Piece::unit(Domain::simplex(4, start, end))];
    let freq = 2.0 * g.abs();
    match method_for(spec, method) {
        Method::Collapse => {
            let sup = commutator_distributional(m, l)?;
            let mut warnings = Vec::new();
            // Commutator axis/partner for each F permutation, then G.
            let mut f_pieces = Vec::new();
            for p in &F_PERMS {
                let c = collapse_delta(&base, &sup, p[0], p[2]);
                warnings.extend(c.warnings);
                f_pieces.push(c.pieces);
            }
            let gc = collapse_delta(&base, &sup, 1, 0);
            warnings.extend(gc.warnings);
            let g_pieces = gc.pieces;
            let mut r = regulated(pol, |eps| {
                let w = WightmanFn::new(m, l, eps, len)?;
                let mut acc = IntegralResult::zero();
                for (p, pieces) in F_PERMS.iter().zip(&f_pieces) {
                    if pieces.is_empty() {
                        continue;
                    }
                    let f = TimeIntegrand::new(4, |t| f_block(g, &w, t, p))
                        .singular_at(p[3], p[1], &[-l, l])
                        .with_frequency(freq)
                        .with_weight(|x| sw.eval(x));
                    acc = acc.add(integrate_pieces(&f, pieces, &pol.rung())?);
                }
                if !g_pieces.is_empty() {
                    let f = TimeIntegrand::new(4, |t| g_block(g, &w, t))
                        .singular_at(2, 3, &[-l, l])
                        .with_frequency(freq)
                        .with_weight(|x| sw.eval(x));
                    acc = acc.add(integrate_pieces(&f, &g_pieces, &pol.rung())?);
                }
                Ok(acc)
            })?;
            r.warnings.extend(warnings);
            Ok(r)
        }
        _ => regulated(pol, |eps| {
            let w = WightmanFn::new(m, l, eps, len)?;
            let f = TimeIntegrand::new(4, |t| {
                let mut v = ZERO;
                for p in &F_PERMS {
                    v += f_block(g, &w, t, p) * w.commutator(t[p[0]] - t[p[2]]);
                }
                v += g_block(g, &w, t) * w.commutator(t[1] - t[0]);
                v
            })
            .singular_at(0, 1, &[-l, l])
            .singular_at(0, 2, &[-l, l])
            .singular_at(0, 3, &[-l, l])
            .singular_at(1, 2, &[-l, l])
            .singular_at(1, 3, &[-l, l])
            .singular_at(2, 3, &[-l, l])
            .with_frequency(freq)
            .with_weight(|x| sw.eval(x));
            integrate_pieces(&f, &base, &pol.rung())
        }),
    }
}

/// `int eta^4 sin(g (t2 - t3)) sin(g (t1 - t4)) [phi(x1(t2)), phi(x2(t1))] [phi(x2(t4)), phi(x1(t3))]`
/// over the ordered simplex.
fn double_commutator_integral(spec: &ScenarioSpec, method: Method) -> Result<IntegralResult> {
    let (start, end, len) = window(spec);
    let (m, l, sw, pol, g) = (
        spec.field.mass,
        spec.separation(),
        spec.switching,
        &spec.quadrature,
        spec.gap,
    );
    let base = [Piece::unit(Domain::simplex(4, start, end))];
    let freq = 2.0 * g.abs();
    let kernel = move |t: &[f64]| (g * (t[1] - t[2])).sin() * (g * (t[0] - t[3])).sin();
    match method_for(spec, method) {
        Method::Collapse => {
            let sup = commutator_distributional(m, l)?;
            let first = collapse_delta(&base, &sup, 1, 0);
            let second = collapse_delta(&first.pieces, &sup, 3, 2);
            let pieces = merge(second.pieces);
            let f = TimeIntegrand::new(4, |t| Complex64::new(kernel(t), 0.0))
                .with_frequency(freq)
                .with_weight(|x| sw.eval(x));
            let mut r = integrate_pieces(&f, &pieces, &pol.nested())?;
            r.warnings.extend(first.warnings);
            r.warnings.extend(second.warnings);
            Ok(r)
        }
        _ => regulated(pol, |eps| {
            let w = WightmanFn::new(m, l, eps, len)?;
            let f = TimeIntegrand::new(4, |t| {
                w.commutator(t[1] - t[0]) * w.commutator(t[3] - t[2]) * kernel(t)
            })
            .singular_at(1, 0, &[-l, l])
            .singular_at(3, 2, &[-l, l])
            .with_frequency(freq)
            .with_weight(|x| sw.eval(x));
            integrate_pieces(&f, &base, &pol.rung())
        }),
    }
}

fn check_real(name: &str, e: Estimate<Complex64>) -> Result<Estimate<f64>> {
    if e.value.im.abs() > REALITY_TOL * e.value.re.abs() + e.uncertainty {
        return Err(Error::NonphysicalParams(format!(
            "{name} has imaginary residue {:.3e} (real part {:.6e}, uncertainty {:.1e})",
            e.value.im, e.value.re, e.uncertainty
        )));
    }
    Ok(real_part(e))
}

/// Fourth-order coefficient `A` (excited input on detector 1).
pub fn compute_a(spec: &ScenarioSpec) -> Result<Estimate<f64>> {
    compute_a_with(spec, Method::Auto)
}

pub fn compute_a_with(spec: &ScenarioSpec, method: Method) -> Result<Estimate<f64>> {
    spec.validate()?;
    let k = coupling_product(spec);
    if k == 0.0 {
        return Ok(real_zero());
    }
    let r = a_integral(spec, spec.gap, method)?;
    check_real("A", scale(Estimate::from_result(r), 2.0 * k * k))
}

/// `A` evaluated at a signed gap; `compute_a_at(spec, -dE, ..)` is the
/// first contribution to `B`.
pub fn compute_a_at(spec: &ScenarioSpec, gap: f64, method: Method) -> Result<Estimate<f64>> {
    spec.clone().with_gap(gap.abs()).validate()?;
    let k = coupling_product(spec);
    if k == 0.0 {
        return Ok(real_zero());
    }
    let r = a_integral(spec, gap, method)?;
    check_real("A", scale(Estimate::from_result(r), 2.0 * k * k))
}

/// The two contributions to `B`: `A(-dE)` and the double-commutator term,
/// both including their coupling prefactors.
pub fn compute_b_parts(
    spec: &ScenarioSpec,
    method: Method,
) -> Result<(Estimate<Complex64>, Estimate<Complex64>)> {
    spec.validate()?;
    let k = coupling_product(spec);
    if k == 0.0 {
        return Ok((Estimate::zero(), Estimate::zero()));
    }
    let a_neg = scale(
        Estimate::from_result(a_integral(spec, -spec.gap, method)?),
        2.0 * k * k,
    );
    let dbl = scale(
        Estimate::from_result(double_commutator_integral(spec, method)?),
        4.0 * k * k,
    );
    Ok((a_neg, dbl))
}

/// Fourth-order coefficient `B = A(-dE) + (double-commutator term)`.
pub fn compute_b(spec: &ScenarioSpec) -> Result<Estimate<f64>> {
    compute_b_with(spec, Method::Auto)
}

pub fn compute_b_with(spec: &ScenarioSpec, method: Method) -> Result<Estimate<f64>> {
    let (a_neg, dbl) = compute_b_parts(spec, method)?;
    let mut warnings = a_neg.warnings;
    warnings.extend(dbl.warnings);
    check_real(
        "B",
        Estimate {
            value: a_neg.value + dbl.value,
            uncertainty: a_neg.uncertainty + dbl.uncertainty,
            evaluations: a_neg.evaluations + dbl.evaluations,
            warnings,
        },
    )
}

/// All five coefficients, validated.
pub fn compute_params(spec: &ScenarioSpec) -> Result<ChannelParams> {
    spec.validate()?;
    let mut meta = ParamsMeta {
        separation: classify_separation(spec).ok(),
        window: spec.switching.is_compact().then(|| spec.switching.length()),
        ..ParamsMeta::default()
    };
    for (name, a) in [
        ("detector1", spec.detector1.coupling),
        ("detector2", spec.detector2.coupling),
    ] {
        if a > WEAK_COUPLING {
            meta.warnings.push(format!(
                "{name} coupling {a} exceeds the weak-coupling threshold {WEAK_COUPLING}"
            ));
        }
    }
    let pe = compute_pe(spec)?;
    let a = compute_a(spec)?;
    let b = compute_b(spec)?;
    let c = compute_c(spec)?;
    let d = compute_d(spec)?;
    meta.uncertainties = [
        pe.uncertainty,
        a.uncertainty,
        b.uncertainty,
        c.uncertainty,
        d.uncertainty,
    ];
    meta.evaluations =
        pe.evaluations + a.evaluations + b.evaluations + c.evaluations + d.evaluations;
    for w in [pe.warnings, a.warnings, b.warnings, c.warnings, d.warnings]
        .into_iter()
        .flatten()
    {
        if !meta.warnings.contains(&w) {
            meta.warnings.push(w);
        }
    }
    let p = ChannelParams {
        pe: pe.value,
        a: a.value,
        b: b.value,
        c: c.value,
        d: d.value,
        meta,
    };
    p.validate()?;
    Ok(p)
}

/// `|alpha1 alpha2 int int eta eta exp(i dE (t2 - t1)) D_F(x1(t1), x2(t2))|^2`
/// over the full square window.
pub fn fermi_probability(spec: &ScenarioSpec) -> Result<Estimate<f64>> {
    spec.validate()?;
    let k = coupling_product(spec);
    if k == 0.0 {
        return Ok(real_zero());
    }
    let (start, end, len) = window(spec);
    let (m, l, sw, pol, g) = (
        spec.field.mass,
        spec.separation(),
        spec.switching,
        &spec.quadrature,
        spec.gap,
    );
    let r = regulated(pol, |eps| {
        let w = WightmanFn::new(m, l, eps, len)?;
        let f = TimeIntegrand::new(2, |t| {
            w.feynman(t[0] - t[1]) * Complex64::from_polar(1.0, g * (t[1] - t[0]))
        })
        .singular_at(0, 1, &[-l, 0.0, l])
        .with_frequency(g)
        .with_weight(|x| sw.eval(x));
        integrate_pieces(&f, &[Piece::unit(Domain::cube(2, start, end))], &pol.rung())
    })?;
    let amp = r.value * k;
    let u = r.uncertainty() * k;
    Ok(Estimate {
        value: amp.norm_sqr(),
        uncertainty: 2.0 * amp.norm() * u + u * u,
        evaluations: r.evaluations,
        warnings: r.warnings,
    })
}

/// Coefficient of `<e|rho1|g>` at second order in the channel of two
/// Glauber detectors:
/// `-alpha1 alpha2 int_{t2 <= t1} eta eta exp(i dE (t1 - t2)) D(x2(t1) - x1(t2))`,
/// with `D` the positive-frequency correlator.
pub fn glauber_leakage(spec: &ScenarioSpec) -> Result<Estimate<Complex64>> {
    spec.validate()?;
    let k = coupling_product(spec);
    if k == 0.0 {
        return Ok(Estimate::zero());
    }
    let (start, end, len) = window(spec);
    let (m, l, sw, pol, g) = (
        spec.field.mass,
        spec.separation(),
        spec.switching,
        &spec.quadrature,
        spec.gap,
    );
    let r = regulated(pol, |eps| {
        let w = WightmanFn::new(m, l, eps, len)?;
        let f = TimeIntegrand::new(2, |t| {
            let dt = t[0] - t[1];
            w.eval(dt) * Complex64::from_polar(1.0, g * dt)
        })
        .singular_at(0, 1, &[-l, l])
        .with_frequency(g)
        .with_weight(|x| sw.eval(x));
        integrate_pieces(
            &f,
            &[Piece::unit(Domain::simplex(2, start, end))],
            &pol.rung(),
        )
    })?;
    Ok(scale(Estimate::from_result(r), -k))
}
