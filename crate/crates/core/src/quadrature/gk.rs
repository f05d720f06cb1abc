//! Globally adaptive Gauss-Kronrod (10/21) quadrature for complex-valued
//! integrands on finite intervals.
//!
//! Integrands return a value together with an error bound of their own
//! (non-zero when the integrand is itself an inner integral). That inner
//! error is integrated alongside the value and added to the reported
//! estimate, but it does not drive subdivision.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208969760237,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd Kronrod abscissae XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651146,
];

/// Points evaluated per segment.
pub const NODES_PER_SEGMENT: usize = 21;

#[derive(Debug, Clone, Copy)]
pub struct GkOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
    /// Upper bound on the width of the initial segments (used to seed
    /// oscillatory integrands with enough nodes per period).
    pub max_initial_width: f64,
}

impl Default for GkOptions {
    fn default() -> Self {
        GkOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_segments: 4000,
            max_initial_width: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GkOutput {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    aux: f64,
    splittable: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Unsplittable segments sink to the bottom of the heap.
        let ka = if self.splittable { self.error } else { -1.0 };
        let kb = if other.splittable { other.error } else { -1.0 };
        ka.total_cmp(&kb).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rule<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<(Complex64, f64)>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 21];
    let mut aux_sum = 0.0;
    for (j, &x) in XGK.iter().enumerate() {
        if j == 10 {
            let (v, e) = f(c)?;
            fv[10] = v;
            aux_sum += WGK[10] * e;
        } else {
            let (v1, e1) = f(c - h * x)?;
            let (v2, e2) = f(c + h * x)?;
            fv[j] = v1;
            fv[20 - j] = v2;
            aux_sum += WGK[j] * (e1 + e2);
        }
    }
    let mut kron = fv[10] * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = WGK[10] * fv[10].norm();
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        kron += pair * WGK[j];
        resabs += WGK[j] * (fv[j].norm() + fv[20 - j].norm());
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[10] * (fv[10] - mean).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[j] - mean).norm() + (fv[20 - j] - mean).norm());
    }
    let hh = h.abs();
    let value = kron * h;
    resabs *= hh;
    resasc *= hh;
    let mut err = ((kron - gauss) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(roundoff);
    }
    let width = b - a;
    // Halving a segment whose error is pure roundoff cannot reduce it.
    let splittable = width.abs() > 1e-13 * (a.abs().max(b.abs()).max(1e-300)) && err > roundoff;
    Ok(Segment {
        a,
        b,
        value,
        error: err,
        aux: aux_sum * hh,
        splittable,
    })
}

/// Integrates `f` over `[a, b]`, honouring interior `breaks` as forced
/// segment boundaries. `a > b` integrates with the sign flipped.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breaks: &[f64], opts: &GkOptions) -> Result<GkOutput>
where
    F: FnMut(f64) -> Result<(Complex64, f64)>,
{
    if a == b {
        return Ok(GkOutput::default());
    }
    if a > b {
        let out = integrate(f, b, a, breaks, opts)?;
        return Ok(GkOutput {
            value: -out.value,
            ..out
        });
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    cuts.push(a);
    cuts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (b - a));

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let n = if opts.max_initial_width.is_finite() && opts.max_initial_width > 0.0 {
            ((hi - lo) / opts.max_initial_width).ceil().max(1.0) as usize
        } else {
            1
        };
        for k in 0..n {
            let s = lo + (hi - lo) * k as f64 / n as f64;
            let e = if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * (k + 1) as f64 / n as f64
            };
            heap.push(rule(&mut f, s, e)?);
            evaluations += NODES_PER_SEGMENT;
        }
    }

    loop {
        let (total, err_total, err_split) =
            heap.iter().fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |acc, s| {
                let split = if s.splittable { s.error } else { 0.0 };
                (acc.0 + s.value, acc.1 + s.error, acc.2 + split)
            });
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        let worst = *heap.peek().expect("at least one segment");
        // Errors of unsplittable segments are irreducible; once the rest is
        // converged, more subdivision only accumulates roundoff.
        if err_total <= target || err_split <= 0.5 * target || !worst.splittable {
            let aux: f64 = heap.iter().map(|s| s.aux).sum();
            return Ok(GkOutput {
                value: sum_sorted(&heap),
                error: err_total + aux,
                evaluations,
            });
        }
        if heap.len() >= opts.max_segments {
            return Err(Error::Quadrature {
                message: format!(
                    "subdivision budget of {} segments exhausted on [{a}, {b}]",
                    opts.max_segments
                ),
                best: total,
                estimate: err_total,
            });
        }
        let seg = heap.pop().unwrap();
        let mid = 0.5 * (seg.a + seg.b);
        heap.push(rule(&mut f, seg.a, mid)?);
        heap.push(rule(&mut f, mid, seg.b)?);
        evaluations += 2 * NODES_PER_SEGMENT;
    }
}

// Sum in interval order so results do not depend on heap layout.
fn sum_sorted(heap: &BinaryHeap<Segment>) -> Complex64 {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    segs.iter()
        .fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value)
}

/// Convenience wrapper for plain integrands without an inner error.
pub fn integrate_plain<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &GkOptions,
) -> Result<GkOutput>
where
    F: FnMut(f64) -> Complex64,
{
    integrate(|x| Ok((f(x), 0.0)), a, b, breaks, opts)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &GkOptions,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let out = integrate(|x| Ok((Complex64::new(f(x), 0.0), 0.0)), a, b, breaks, opts)?;
    Ok((out.value.re, out.error))
}

/// Integrates over `[a, inf)` through `p = a + scale * x / (1 - x)`.
/// Intended for integrands that decay at least like a power beyond `scale`.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, scale: f64, opts: &GkOptions) -> Result<GkOutput>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_plain(
        |x| {
            if x >= 1.0 {
                return Complex64::new(0.0, 0.0);
            }
            let d = 1.0 - x;
            let p = a + scale * x / d;
            let v = f(p);
            if v == Complex64::new(0.0, 0.0) {
                v
            } else {
                v * (scale / (d * d))
            }
        },
        0.0,
        1.0,
        &[],
        opts,
    )
}
