//! Gauss-Legendre panels, adaptive bisection on finite intervals, and
//! segment-wise integration of slowly decaying integrands on `[x0, inf)`.
//!
//! The semi-infinite integrator sums the integrand over consecutive segments
//! of fixed length (normally the spacing between zeros of an oscillatory
//! factor) and stops either when a caller-supplied tail bound is small enough
//! or when an accelerated limit of the partial sums settles. The accelerant
//! smooths the partial sums with iterated pairwise averaging (binomial
//! weights), which damps every oscillating component of the remainder, and
//! then Richardson-extrapolates the smoothed values in `1/K` to remove the
//! non-oscillating power-law part.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SincError};

/// Nodes per Gauss-Legendre panel.
pub const GAUSS_ORDER: usize = 16;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// One panel on `[a, b]`.
    pub fn integrate<G: Fn(f64) -> f64 + ?Sized>(&self, g: &G, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * g(mid + half * x))
            .sum();
        s * half
    }

    /// `panels` equal panels on `[a, b]`.
    pub fn integrate_panels<G: Fn(f64) -> f64 + ?Sized>(
        &self,
        g: &G,
        a: f64,
        b: f64,
        panels: usize,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                let hi = if p + 1 == panels { b } else { lo + h };
                self.integrate(g, lo, hi)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 16-point rule.
pub fn gauss16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(GAUSS_ORDER))
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Adaptive bisection on `[a, b]` with a 16-point Gauss rule per panel. A
/// panel is accepted when it agrees with the sum of its halves to within its
/// share of `tol`.
pub fn adaptive_gauss<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> AdaptiveResult {
    let rule = gauss16();
    let width = (b - a).abs();
    let mut total = CompensatedSum::default();
    let mut err = 0.0;
    let mut panels = 0;
    let mut stack = vec![(a, b, rule.integrate(g, a, b), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(g, lo, mid);
        let right = rule.integrate(g, mid, hi);
        let diff = (whole - (left + right)).abs();
        let share = tol * (hi - lo).abs() / width;
        if diff <= share || depth >= max_depth {
            total.add(left + right);
            err += diff;
            panels += 2;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    AdaptiveResult {
        value: total.value(),
        error_estimate: err,
        panels,
    }
}

/// How the semi-infinite integrator decided it was done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailControl {
    /// A rigorous tail bound fell below half the tolerance.
    Bound,
    /// Successive accelerated limits agreed within half the tolerance.
    Extrapolation,
}

/// Result of a quadrature with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub segments_used: usize,
    pub converged: bool,
    pub tail_control: TailControl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentOptions {
    pub tol: f64,
    pub max_segments: usize,
    pub panels_per_segment: usize,
    /// Richardson levels in the accelerant.
    pub levels: usize,
    /// Smallest top-level window of the accelerant.
    pub first_window: usize,
}

impl SegmentOptions {
    pub fn new(tol: f64, max_segments: usize) -> Self {
        SegmentOptions {
            tol,
            max_segments,
            panels_per_segment: 1,
            levels: 4,
            first_window: 64,
        }
    }
}

/// Integrates `g` over `[x0, inf)` in segments of length `period`.
///
/// `tail_bound(X)` must bound `|int_X^inf g|` when supplied. On failure the
/// best estimate is returned inside [`SincError::NotConverged`].
pub fn integrate_semi_infinite<G, B>(
    g: &G,
    x0: f64,
    period: f64,
    tail_bound: Option<&B>,
    opts: &SegmentOptions,
) -> Result<QuadratureResult>
where
    G: Fn(f64) -> f64 + Sync + ?Sized,
    B: Fn(f64) -> f64 + ?Sized,
{
    if !(period > 0.0 && period.is_finite()) {
        return Err(SincError::InvalidParam(format!(
            "segment length must be > 0, got {period}"
        )));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(SincError::InvalidParam(format!(
            "tolerance must be > 0, got {}",
            opts.tol
        )));
    }
    let levels = opts.levels.max(1);
    let rule = gauss16();
    let panels = opts.panels_per_segment.max(1);
    let segment = |k: usize| {
        let a = x0 + period * k as f64;
        rule.integrate_panels(g, a, a + period, panels)
    };

    // prefix[k] = integral over the first k segments
    let mut prefix = vec![0.0];
    let mut running = CompensatedSum::default();
    let mut abs_mass = 0.0;
    let mut window = opts.first_window.max(1 << levels);
    let mut previous: Option<f64> = None;
    let mut best = QuadratureResult {
        value: 0.0,
        error_estimate: f64::INFINITY,
        segments_used: 0,
        converged: false,
        tail_control: TailControl::Extrapolation,
    };

    loop {
        let needed = window + window / 2;
        if needed > opts.max_segments {
            break;
        }
        let start = prefix.len() - 1;
        let fresh: Vec<f64> = (start..needed).into_par_iter().map(segment).collect();
        for s in fresh {
            running.add(s);
            abs_mass += s.abs();
            prefix.push(running.value());
        }
        let roundoff = 64.0 * f64::EPSILON * abs_mass;

        if let Some(bound) = tail_bound {
            let tb = bound(x0 + period * needed as f64);
            if tb + roundoff < 0.5 * opts.tol {
                return Ok(QuadratureResult {
                    value: prefix[needed],
                    error_estimate: tb + roundoff,
                    segments_used: needed,
                    converged: true,
                    tail_control: TailControl::Bound,
                });
            }
        }

        let accel = accelerate(&prefix, window, levels);
        if let Some(prev) = previous {
            let diff = (accel - prev).abs() + roundoff;
            best = QuadratureResult {
                value: accel,
                error_estimate: diff,
                segments_used: needed,
                converged: false,
                tail_control: TailControl::Extrapolation,
            };
            if diff < 0.5 * opts.tol {
                best.converged = true;
                return Ok(best);
            }
        }
        previous = Some(accel);
        window *= 2;
    }
    Err(SincError::NotConverged(best))
}

/// Accelerated limit of the partial sums using windows of `top` segments
/// and `levels` Richardson levels.
pub fn accelerate(prefix: &[f64], top: usize, levels: usize) -> f64 {
    let mut values = Vec::with_capacity(levels);
    let mut steps = Vec::with_capacity(levels);
    for j in 0..levels {
        let c = top >> (levels - 1 - j);
        let start = c / 2;
        values.push(binomial_average(&prefix[start..=start + c]));
        steps.push(1.0 / (start as f64 + 0.5 * c as f64));
    }
    richardson_to_zero(&steps, values)
}

/// `len - 1` rounds of pairwise averaging, computed directly from the
/// binomial weights.
pub fn binomial_average(values: &[f64]) -> f64 {
    let r = values.len() - 1;
    if r == 0 {
        return values[0];
    }
    let mut log_w = Vec::with_capacity(r + 1);
    let mut lw = 0.0;
    for i in 0..=r {
        log_w.push(lw);
        if i < r {
            lw += ((r - i) as f64 / (i + 1) as f64).ln();
        }
    }
    let peak = log_w[r / 2];
    let mut num = CompensatedSum::default();
    let mut den = CompensatedSum::default();
    for (v, lw) in values.iter().zip(&log_w) {
        let w = (lw - peak).exp();
        num.add(w * v);
        den.add(w);
    }
    num.value() / den.value()
}

/// Neville extrapolation of `values[i] ~ P(steps[i])` to `P(0)`.
pub fn richardson_to_zero(steps: &[f64], mut values: Vec<f64>) -> f64 {
    let n = values.len();
    for k in 1..n {
        for i in (k..n).rev() {
            values[i] =
                (steps[i - k] * values[i] - steps[i] * values[i - 1]) / (steps[i - k] - steps[i]);
        }
    }
    values[n - 1]
}
