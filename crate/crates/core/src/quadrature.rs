//! Composite Gauss–Legendre quadrature with panel doubling.
//!
//! Every integral in the crate goes through [`adaptive_1d`] or
//! [`adaptive_2d`]. The integration interval is first split at caller-given
//! break points (where the integrand is only piecewise smooth); each piece is
//! covered by `2^d` equal panels carrying a fixed-order rule, and `d` grows
//! until two consecutive estimates agree.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Refinement policy shared by curve, disk and kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Nodes per panel.
    pub order: usize,
    pub max_doublings: u32,
    pub rel_tol: f64,
    /// Absolute floor on the convergence test.
    pub abs_floor: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            order: 16,
            max_doublings: 6,
            rel_tol: 1e-8,
            abs_floor: 1e-10,
        }
    }
}

/// Converged value plus the size of the last refinement step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub delta: f64,
    pub doublings: u32,
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
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
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

fn rule(order: usize) -> std::borrow::Cow<'static, (Vec<f64>, Vec<f64>)> {
    if order == 16 {
        std::borrow::Cow::Borrowed(rule16())
    } else {
        std::borrow::Cow::Owned(gauss_legendre(order))
    }
}

/// Pairwise (tree) summation; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier-compensated summation.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0_f64, 0.0_f64);
    for &x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// Mapped nodes and weights of the composite rule on `pieces` with
/// `panels_per_piece` panels each.
pub fn composite_nodes(pieces: &[f64], panels_per_piece: usize, order: usize) -> Vec<(f64, f64)> {
    let r = rule(order);
    let (xs, ws) = (&r.0, &r.1);
    let mut out = Vec::with_capacity((pieces.len().saturating_sub(1)) * panels_per_piece * order);
    for win in pieces.windows(2) {
        let (a, b) = (win[0], win[1]);
        let h = (b - a) / panels_per_piece as f64;
        for p in 0..panels_per_piece {
            let lo = a + p as f64 * h;
            let half = 0.5 * h;
            let mid = lo + half;
            for (x, w) in xs.iter().zip(ws.iter()) {
                out.push((mid + half * x, half * w));
            }
        }
    }
    out
}

fn converged(curr: f64, prev: f64, opts: &QuadratureOptions) -> bool {
    (curr - prev).abs() <= (opts.rel_tol * curr.abs()).max(opts.abs_floor)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, refining until two
/// successive composite estimates agree.
pub fn adaptive_1d<F>(f: F, breaks: &[f64], opts: &QuadratureOptions) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if breaks.len() < 2 {
        return Err(Error::invalid("breaks", "need at least two break points"));
    }
    let eval = |panels: usize| -> Result<f64> {
        let nodes = composite_nodes(breaks, panels, opts.order);
        let mut terms = Vec::with_capacity(nodes.len());
        for (x, w) in nodes {
            terms.push(w * f(x)?);
        }
        Ok(pairwise_sum(&terms))
    };
    let mut prev = eval(1)?;
    for d in 1..=opts.max_doublings {
        let curr = eval(1 << d)?;
        if converged(curr, prev, opts) {
            return Ok(Estimate {
                value: curr,
                delta: (curr - prev).abs(),
                doublings: d,
            });
        }
        if d == opts.max_doublings {
            return Err(Error::NonConvergent {
                doublings: d,
                last: curr,
                previous: prev,
            });
        }
        prev = curr;
    }
    Err(Error::invalid("max_doublings", "must be at least 1"))
}

/// Tensor-product version of [`adaptive_1d`] on a rectangle of break grids;
/// both axes are refined together.
pub fn adaptive_2d<F>(f: F, breaks_u: &[f64], breaks_v: &[f64], opts: &QuadratureOptions) -> Result<Estimate>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    if breaks_u.len() < 2 || breaks_v.len() < 2 {
        return Err(Error::invalid("breaks", "need at least two break points per axis"));
    }
    use rayon::prelude::*;
    let eval = |panels: usize| -> Result<f64> {
        let nu = composite_nodes(breaks_u, panels, opts.order);
        let nv = composite_nodes(breaks_v, panels, opts.order);
        let rows: Vec<f64> = nv
            .par_iter()
            .map(|&(v, wv)| -> Result<f64> {
                let mut terms = Vec::with_capacity(nu.len());
                for &(u, wu) in &nu {
                    terms.push(wu * f(u, v)?);
                }
                Ok(wv * pairwise_sum(&terms))
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&rows))
    };
    let mut prev = eval(1)?;
    for d in 1..=opts.max_doublings {
        let curr = eval(1 << d)?;
        if converged(curr, prev, opts) {
            return Ok(Estimate {
                value: curr,
                delta: (curr - prev).abs(),
                doublings: d,
            });
        }
        if d == opts.max_doublings {
            return Err(Error::NonConvergent {
                doublings: d,
                last: curr,
                previous: prev,
            });
        }
        prev = curr;
    }
    Err(Error::invalid("max_doublings", "must be at least 1"))
}
