//! Iterated adaptive integration over polytopes cut out by window bounds and
//! difference constraints `t_x - t_y <= c`.
//!
//! Ordered simplices, full boxes and the lower-dimensional domains produced
//! by pinning a time variable to a delta locus are all of this form. Each
//! free variable is integrated with clamped limits determined by the
//! variables outside it; constraints between two variables are enforced on
//! the inner one.

use std::cell::Cell;

use num_complex::Complex64;

use super::gk::{self, GkOptions};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    Free,
    /// `t = t_base + offset`, with `base` free.
    Shift {
        base: usize,
        offset: f64,
    },
}

/// `t_x - t_y <= c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffConstraint {
    pub x: usize,
    pub y: usize,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    diffs: Vec<DiffConstraint>,
    slots: Vec<Slot>,
    empty: bool,
}

impl Domain {
    /// `start <= t_k <= ... <= t_2 <= t_1 <= end` (index 0 is `t_1`).
    pub fn simplex(dim: usize, start: f64, end: f64) -> Self {
        let mut d = Domain::cube(dim, start, end);
        for j in 1..dim {
            d.diffs.push(DiffConstraint {
                x: j,
                y: j - 1,
                c: 0.0,
            });
        }
        d
    }

    pub fn cube(dim: usize, start: f64, end: f64) -> Self {
        Domain {
            lower: vec![start; dim],
            upper: vec![end; dim],
            diffs: Vec::new(),
            slots: vec![Slot::Free; dim],
            empty: start >= end,
        }
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn free_dim(&self) -> usize {
        self.slots.iter().filter(|s| **s == Slot::Free).count()
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    /// Follows shifts down to a free variable: `t_var = t_base + offset`.
    pub fn resolve(&self, var: usize) -> (usize, f64) {
        let mut v = var;
        let mut off = 0.0;
        while let Slot::Shift { base, offset } = self.slots[v] {
            off += offset;
            v = base;
        }
        (v, off)
    }

    /// Eliminates `var` by the substitution `t_var = t_partner + offset`.
    ///
    /// Returns the smallest slack among the constraints that became constant
    /// checks or bound intersections, as a measure of tangency.
    pub fn pin(&mut self, var: usize, partner: usize, offset: f64) -> f64 {
        assert!(
            matches!(self.slots[var], Slot::Free),
            "variable already pinned"
        );
        let (base, off0) = self.resolve(partner);
        assert_ne!(base, var, "cannot pin a variable to itself");
        let shift = off0 + offset;
        let mut slack = f64::INFINITY;

        let lo = self.lower[var] - shift;
        let hi = self.upper[var] - shift;
        self.lower[base] = self.lower[base].max(lo);
        self.upper[base] = self.upper[base].min(hi);
        slack = slack.min(self.upper[base] - self.lower[base]);

        let mut kept = Vec::with_capacity(self.diffs.len());
        for d in self.diffs.drain(..) {
            let mut d = d;
            if d.x == var {
                d.x = base;
                d.c -= shift;
            }
            if d.y == var {
                d.y = base;
                d.c += shift;
            }
            if d.x == d.y {
                slack = slack.min(d.c);
                if d.c < 0.0 {
                    self.empty = true;
                }
                continue;
            }
            kept.push(d);
        }
        self.diffs = kept;
        self.slots[var] = Slot::Shift {
            base,
            offset: shift,
        };
        if self.lower[base] >= self.upper[base] {
            self.empty = true;
        }
        slack
    }
}

/// `t_a - t_b` is singular (or sharply peaked) at each of `offsets`.
#[derive(Debug, Clone, PartialEq)]
pub struct Singularity {
    pub a: usize,
    pub b: usize,
    pub offsets: Vec<f64>,
}

/// A function of the full time vector, plus hints for the integrator.
pub struct TimeIntegrand<'a> {
    pub dim: usize,
    pub f: Box<dyn Fn(&[f64]) -> Complex64 + Sync + 'a>,
    pub singular: Vec<Singularity>,
    /// Largest angular frequency of explicit phases, used to seed the
    /// initial subdivision.
    pub frequency: f64,
    /// Optional factor `w(t_k)` applied to every time coordinate. It is
    /// evaluated once per node of the level owning the coordinate, and a zero
    /// skips the whole inner integral.
    pub weight: Option<Box<dyn Fn(f64) -> f64 + Sync + 'a>>,
}

impl<'a> TimeIntegrand<'a> {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> Complex64 + Sync + 'a) -> Self {
        TimeIntegrand {
            dim,
            f: Box::new(f),
            singular: Vec::new(),
            frequency: 0.0,
            weight: None,
        }
    }

    pub fn with_weight(mut self, w: impl Fn(f64) -> f64 + Sync + 'a) -> Self {
        self.weight = Some(Box::new(w));
        self
    }

    pub fn singular_at(mut self, a: usize, b: usize, offsets: &[f64]) -> Self {
        self.singular.push(Singularity {
            a,
            b,
            offsets: offsets.to_vec(),
        });
        self
    }

    pub fn with_frequency(mut self, w: f64) -> Self {
        self.frequency = w.abs();
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NestedOptions {
    pub gk: GkOptions,
    /// Nodes per oscillation period the initial subdivision must provide.
    pub oscillation_factor: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NestedOutput {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Level {
    var: usize,
    // Offsets of every coordinate that resolves to `var`, itself included.
    weighted: Vec<f64>,
    // t_var >= t_other + c for an outer other
    lower: Vec<(usize, f64)>,
    // t_var <= t_other + c
    upper: Vec<(usize, f64)>,
}

struct Plan<'d, 'f, 'a> {
    domain: &'d Domain,
    integrand: &'f TimeIntegrand<'a>,
    levels: Vec<Level>,
    // Pinned slots, written into the time vector before each evaluation.
    shifts: Vec<(usize, usize, f64)>,
    opts: GkOptions,
    calls: Cell<usize>,
}

impl Plan<'_, '_, '_> {
    fn limits(&self, depth: usize, t: &[f64]) -> (f64, f64) {
        let lv = &self.levels[depth];
        let mut lo = self.domain.lower[lv.var];
        let mut hi = self.domain.upper[lv.var];
        for &(o, c) in &lv.lower {
            lo = lo.max(t[o] + c);
        }
        for &(o, c) in &lv.upper {
            hi = hi.min(t[o] + c);
        }
        (lo, hi)
    }

    fn breakpoints(&self, depth: usize, t: &[f64], out: &mut Vec<f64>) {
        let v = self.levels[depth].var;
        let outer = |u: usize| self.levels[..depth].iter().any(|l| l.var == u);
        for s in &self.integrand.singular {
            let (ba, oa) = self.domain.resolve(s.a);
            let (bb, ob) = self.domain.resolve(s.b);
            // Locus: (t_ba + oa) - (t_bb + ob) = o.
            for &o in &s.offsets {
                if ba == v && bb != v {
                    let kappa = ob + o - oa; // t_v = t_bb + kappa
                    if outer(bb) {
                        out.push(t[bb] + kappa);
                    } else {
                        self.inner_hits(bb, -kappa, v, depth, t, out);
                    }
                } else if bb == v && ba != v {
                    let kappa = oa - o - ob; // t_v = t_ba + kappa
                    if outer(ba) {
                        out.push(t[ba] + kappa);
                    } else {
                        self.inner_hits(ba, -kappa, v, depth, t, out);
                    }
                }
            }
        }
    }

    // A locus t_w = t_v + kappa with w integrated inside v: the inner
    // integral has a kink wherever the locus crosses one of w's limits.
    fn inner_hits(
        &self,
        w: usize,
        kappa: f64,
        v: usize,
        depth: usize,
        t: &[f64],
        out: &mut Vec<f64>,
    ) {
        let Some(lv) = self.levels.iter().find(|l| l.var == w) else {
            return;
        };
        out.push(self.domain.lower[w] - kappa);
        out.push(self.domain.upper[w] - kappa);
        for &(o, c) in lv.lower.iter().chain(lv.upper.iter()) {
            if o != v && self.levels[..depth].iter().any(|l| l.var == o) {
                out.push(t[o] + c - kappa);
            }
        }
    }

    fn level(&self, depth: usize, t: &mut Vec<f64>) -> Result<(Complex64, f64)> {
        let (lo, hi) = self.limits(depth, t);
        if !(hi > lo) {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let var = self.levels[depth].var;
        let weighted = &self.levels[depth].weighted;
        let mut breaks = Vec::new();
        self.breakpoints(depth, t, &mut breaks);
        let last = depth + 1 == self.levels.len();
        let out = gk::integrate(
            |x| {
                t[var] = x;
                let mut fac = 1.0;
                if let Some(w) = &self.integrand.weight {
                    for &off in weighted {
                        fac *= w(x + off);
                    }
                    if fac == 0.0 {
                        return Ok((Complex64::new(0.0, 0.0), 0.0));
                    }
                }
                let (v, e) = if last {
                    self.calls.set(self.calls.get() + 1);
                    for &(k, b, off) in &self.shifts {
                        t[k] = t[b] + off;
                    }
                    ((self.integrand.f)(t), 0.0)
                } else {
                    self.level(depth + 1, t)?
                };
                Ok((v * fac, e * fac))
            },
            lo,
            hi,
            &breaks,
            &self.opts,
        )?;
        Ok((out.value, out.error))
    }
}

/// Integrates `integrand` over `domain`.
pub fn integrate_domain(
    integrand: &TimeIntegrand<'_>,
    domain: &Domain,
    opts: &NestedOptions,
) -> Result<NestedOutput> {
    assert_eq!(
        integrand.dim,
        domain.dim(),
        "integrand/domain dimension mismatch"
    );
    if domain.is_empty() {
        return Ok(NestedOutput::default());
    }
    let free: Vec<usize> = (0..domain.dim())
        .filter(|&k| domain.slots[k] == Slot::Free)
        .collect();
    if free.is_empty() {
        let t: Vec<f64> = vec![0.0; domain.dim()];
        let fac = integrand
            .weight
            .as_ref()
            .map_or(1.0, |w| t.iter().map(|&x| w(x)).product());
        return Ok(NestedOutput {
            value: (integrand.f)(&t) * fac,
            error: 0.0,
            evaluations: 1,
        });
    }
    let pos = |v: usize| free.iter().position(|&u| u == v);
    let mut levels: Vec<Level> = free
        .iter()
        .map(|&v| Level {
            var: v,
            weighted: (0..domain.dim())
                .filter_map(|k| {
                    let (b, off) = domain.resolve(k);
                    (b == v).then_some(off)
                })
                .collect(),
            lower: Vec::new(),
            upper: Vec::new(),
        })
        .collect();
    for d in &domain.diffs {
        let (px, py) = (pos(d.x).unwrap(), pos(d.y).unwrap());
        if px > py {
            // t_x <= t_y + c, x inner
            levels[px].upper.push((d.y, d.c));
        } else {
            // t_y >= t_x - c, y inner
            levels[py].lower.push((d.x, -d.c));
        }
    }
    let mut gk_opts = opts.gk;
    if integrand.frequency > 0.0 && opts.oscillation_factor > 0.0 {
        let period = 2.0 * std::f64::consts::PI / integrand.frequency;
        gk_opts.max_initial_width = period * gk::NODES_PER_SEGMENT as f64 / opts.oscillation_factor;
    }
    let shifts = (0..domain.dim())
        .filter(|&k| domain.slots[k] != Slot::Free)
        .map(|k| {
            let (b, off) = domain.resolve(k);
            (k, b, off)
        })
        .collect();
    let plan = Plan {
        domain,
        integrand,
        levels,
        shifts,
        opts: gk_opts,
        calls: Cell::new(0),
    };
    let mut t = vec![0.0; domain.dim()];
    let (value, error) = plan.level(0, &mut t)?;
    Ok(NestedOutput {
        value,
        error,
        evaluations: plan.calls.get(),
    })
}
