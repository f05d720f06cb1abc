//! Vacuum two-point functions of a free scalar field in 3+1 Minkowski
//! spacetime, as functions of the time difference `dt = t_x - t_y` and the
//! spatial distance `r = |x - y|`.
//!
//! Smooth forms carry the `i epsilon` regulator explicitly; the massless
//! commutator is also available in its exact delta-supported form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::gk::{self, GkOptions};
pub use crate::quadrature::ladder::{extrapolate_ladder, Regulator};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this fraction of the regulator the mode integral switches to its
/// `r -> 0` form, which avoids the cancellation in `sin(p r) / r`.
const SMALL_R: f64 = 1e-6;

fn mode_options() -> GkOptions {
    GkOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-15,
        max_segments: 4000,
        max_initial_width: f64::INFINITY,
    }
}

/// Closed-form massless Wightman function
/// `-1 / (4 pi^2 ((dt - i eps)^2 - r^2))`.
#[inline]
pub fn wightman_massless(dt: f64, r: f64, eps: f64) -> Complex64 {
    let z = Complex64::new(dt, -eps);
    -1.0 / (4.0 * PI * PI * (z * z - r * r))
}

/// Wightman function `<0| phi(x) phi(y) |0>` at regulator `eps`.
///
/// Massless fields use the closed form, massive ones the damped mode
/// integral (see [`wightman_mode`]).
pub fn wightman(m: f64, dt: f64, r: f64, eps: f64) -> Result<Complex64> {
    check_args(m, r, eps)?;
    if m == 0.0 {
        Ok(wightman_massless(dt, r, eps))
    } else {
        wightman_mode(m, dt, r, eps)
    }
}

fn check_args(m: f64, r: f64, eps: f64) -> Result<()> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::Domain(format!("mass must be non-negative, got {m}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "distance must be non-negative, got {r}"
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!(
            "regulator must be positive, got {eps}"
        )));
    }
    Ok(())
}

/// `(1 / (4 pi^2 r)) int_0^inf p sin(p r) / E exp(-i E dt - eps E) dp`,
/// `E = sqrt(p^2 + m^2)`, valid for any `m >= 0`.
///
/// The exponentials are integrated along rays `p = rho exp(i theta)` tilted
/// into the half plane where they decay; the branch points `p = +-i m` lie
/// outside the swept sectors.
pub fn wightman_mode(m: f64, dt: f64, r: f64, eps: f64) -> Result<Complex64> {
    check_args(m, r, eps)?;
    let energy = |p: Complex64| (p * p + m * m).sqrt();
    if r <= SMALL_R * eps {
        // (1 / 4 pi^2) int p^2 / E exp(-i E dt - eps E)
        let theta = ray_angle(-dt, eps);
        let v = ray_integral(theta, -dt, eps, m, |p| {
            let e = energy(p);
            p * p / e * (-I * e * dt - eps * e).exp()
        })?;
        return Ok(v / (4.0 * PI * PI));
    }
    if dt.abs() > r {
        // Both exponentials of sin(p r) decay in the same half plane.
        let kappa = -dt.signum() * (dt.abs() - r);
        let theta = -dt.signum() * std::f64::consts::FRAC_PI_4;
        let v = ray_integral(theta, kappa, eps, m, |p| {
            let e = energy(p);
            // sin(p r) expanded so that no factor overflows on its own.
            let g = -I * e * dt - eps * e;
            p / e * ((I * p * r + g).exp() - (-I * p * r + g).exp()) / (2.0 * I)
        })?;
        return Ok(v / (4.0 * PI * PI * r));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for s in [1.0, -1.0] {
        let kappa = s * r - dt;
        let theta = ray_angle(kappa, eps);
        let v = ray_integral(theta, kappa, eps, m, |p| {
            let e = energy(p);
            p / e * (I * s * p * r - I * e * dt - eps * e).exp()
        })?;
        total += s * v / (2.0 * I);
    }
    Ok(total / (4.0 * PI * PI * r))
}

// Direction of fastest decay of exp((i kappa - eps) p), kept within 45
// degrees of the real axis.
fn ray_angle(kappa: f64, eps: f64) -> f64 {
    kappa
        .atan2(eps)
        .clamp(-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)
}

fn ray_integral<F>(theta: f64, kappa: f64, eps: f64, m: f64, f: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let u = Complex64::from_polar(1.0, theta);
    let decay = kappa * theta.sin() + eps * theta.cos();
    let scale = (1.0 / decay).min(1e6).max(1e-6);
    let mut opts = mode_options();
    if m > 0.0 {
        // Resolve the mass scale before the asymptotic region.
        opts.max_initial_width = 0.05;
    }
    let out = gk::integrate_to_infinity(|rho| f(u * rho) * u, 0.0, scale, &opts)?;
    Ok(out.value)
}

/// `W(dt) - W(-dt)`, antisymmetric in `dt` by construction.
pub fn commutator_eps(m: f64, dt: f64, r: f64, eps: f64) -> Result<Complex64> {
    if dt == 0.0 {
        check_args(m, r, eps)?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Evaluate at |dt| and flip, so that c(-dt) == -c(dt) bit for bit.
    let a = dt.abs();
    let c = wightman(m, a, r, eps)? - wightman(m, -a, r, eps)?;
    Ok(if dt > 0.0 { c } else { -c })
}

/// Massless commutator in closed form,
/// `(i / (4 pi r)) (delta(dt + r) - delta(dt - r))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorSupport {
    pub separation: f64,
    /// `(dt, weight)` for each delta locus.
    pub loci: [(f64, Complex64); 2],
}

impl CommutatorSupport {
    /// Magnitude of each locus weight, `1 / (4 pi r)`.
    pub fn weight(&self) -> f64 {
        1.0 / (4.0 * PI * self.separation)
    }
}

pub fn commutator_distributional(m: f64, r: f64) -> Result<CommutatorSupport> {
    if m != 0.0 {
        return Err(Error::MassiveDistributional);
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "commutator support needs r > 0, got {r}"
        )));
    }
    let w = Complex64::new(0.0, 1.0 / (4.0 * PI * r));
    Ok(CommutatorSupport {
        separation: r,
        loci: [(-r, w), (r, -w)],
    })
}

/// Time-ordered two-point function `theta(dt) W(dt) + theta(-dt) W(-dt)`.
pub fn feynman(m: f64, dt: f64, r: f64, eps: f64) -> Result<Complex64> {
    wightman(m, dt.abs(), r, eps)
}

/// Positive-frequency correlator `<0| phi+(x) phi-(y) |0>`; in the free
/// vacuum this is the Wightman function.
pub fn positive_frequency(m: f64, dt: f64, r: f64, eps: f64) -> Result<Complex64> {
    wightman(m, dt, r, eps)
}

/// Evaluates `f` along a regulator ladder and extrapolates to zero.
/// Returns `(value, residual)`.
pub fn regulator_limit<F>(reg: &Regulator, order: usize, mut f: F) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    reg.validate()?;
    let mut rungs = Vec::with_capacity(reg.ladder.len());
    for &eps in &reg.ladder {
        rungs.push((eps, f(eps)?));
    }
    extrapolate_ladder(&rungs, order)
}

/// Nodes per Chebyshev piece of a [`WightmanTable`].
const CHEB_NODES: usize = 17;

/// Piecewise Chebyshev interpolant of `dt -> W(dt, r)` at fixed `m, r, eps`
/// on a closed interval, refined until the trailing coefficients of every
/// piece fall below `tol` times the piece's magnitude.
#[derive(Debug, Clone)]
pub struct WightmanTable {
    breaks: Vec<f64>,
    coeffs: Vec<[Complex64; CHEB_NODES]>,
}

impl WightmanTable {
    pub fn build(m: f64, r: f64, eps: f64, lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Domain(format!("empty table interval [{lo}, {hi}]")));
        }
        let mut seeds = vec![lo];
        for x in [-r, 0.0, r] {
            if x > lo && x < hi && !seeds.contains(&x) {
                seeds.push(x);
            }
        }
        seeds.push(hi);
        seeds.sort_by(f64::total_cmp);
        let min_width = 1e-10 * (hi - lo);
        let mut pieces: Vec<(f64, f64, [Complex64; CHEB_NODES])> = Vec::new();
        let mut stack: Vec<(f64, f64)> = seeds.windows(2).rev().map(|w| (w[0], w[1])).collect();
        while let Some((a, b)) = stack.pop() {
            let c = cheb_fit(a, b, |x| wightman(m, x, r, eps))?;
            let mag = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let tail = c[CHEB_NODES - 1].norm() + c[CHEB_NODES - 2].norm();
            if tail <= tol * mag || b - a <= min_width {
                pieces.push((a, b, c));
            } else {
                let mid = 0.5 * (a + b);
                stack.push((mid, b));
                stack.push((a, mid));
            }
        }
        let mut breaks = vec![pieces[0].0];
        breaks.extend(pieces.iter().map(|p| p.1));
        Ok(WightmanTable {
            breaks,
            coeffs: pieces.into_iter().map(|p| p.2).collect(),
        })
    }

    pub fn pieces(&self) -> usize {
        self.coeffs.len()
    }

    /// Interpolated value; `dt` is clamped to the table interval.
    pub fn eval(&self, dt: f64) -> Complex64 {
        let n = self.coeffs.len();
        let k = self.breaks[1..n].partition_point(|&b| b <= dt);
        let (a, b) = (self.breaks[k], self.breaks[k + 1]);
        let x = ((2.0 * dt - a - b) / (b - a)).clamp(-1.0, 1.0);
        clenshaw(&self.coeffs[k], x)
    }
}

fn cheb_fit<F>(a: f64, b: f64, f: F) -> Result<[Complex64; CHEB_NODES]>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let n = CHEB_NODES;
    let mut vals = [Complex64::new(0.0, 0.0); CHEB_NODES];
    for (j, v) in vals.iter_mut().enumerate() {
        let x = (PI * (j as f64 + 0.5) / n as f64).cos();
        *v = f(0.5 * (a + b) + 0.5 * (b - a) * x)?;
    }
    let mut c = [Complex64::new(0.0, 0.0); CHEB_NODES];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, v) in vals.iter().enumerate() {
            s += v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
        }
        *ck = s * (2.0 / n as f64);
    }
    c[0] *= 0.5;
    Ok(c)
}

fn clenshaw(c: &[Complex64; CHEB_NODES], x: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * x - b2
}

/// `dt -> W(dt, r)` at fixed mass, distance and regulator: the closed form
/// for massless fields, a [`WightmanTable`] over `[-span, span]` otherwise.
#[derive(Debug, Clone)]
pub enum WightmanFn {
    Massless { r: f64, eps: f64 },
    Tabulated(WightmanTable),
}

/// Relative accuracy of tabulated massive correlators.
pub const TABLE_TOL: f64 = 1e-11;

impl WightmanFn {
    pub fn new(m: f64, r: f64, eps: f64, span: f64) -> Result<Self> {
        check_args(m, r, eps)?;
        if m == 0.0 {
            Ok(WightmanFn::Massless { r, eps })
        } else {
            let s = span.abs().max(r) * 1.001 + eps;
            Ok(WightmanFn::Tabulated(WightmanTable::build(
                m, r, eps, -s, s, TABLE_TOL,
            )?))
        }
    }

    #[inline]
    pub fn eval(&self, dt: f64) -> Complex64 {
        match self {
            WightmanFn::Massless { r, eps } => wightman_massless(dt, *r, *eps),
            WightmanFn::Tabulated(t) => t.eval(dt),
        }
    }

    /// `W(dt) - W(-dt)`.
    #[inline]
    pub fn commutator(&self, dt: f64) -> Complex64 {
        let a = dt.abs();
        let c = self.eval(a) - self.eval(-a);
        if dt >= 0.0 {
            c
        } else {
            -c
        }
    }

    /// `W(|dt|)`.
    #[inline]
    pub fn feynman(&self, dt: f64) -> Complex64 {
        self.eval(dt.abs())
    }
}
