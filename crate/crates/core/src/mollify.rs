//! Regularization by the standard mollifier
//! `η(x) = A·exp(1/(|x|² − 1))` on the open unit ball, and the quantitative
//! bounds it satisfies for Hölder data:
//!
//! * `sup|uᵉ| ≤ sup|u|`
//! * `sup|uᵉ − u| ≤ ‖u‖_θ εᶿ`
//! * `‖duᵉ‖ ≤ ‖dη‖_{L¹} ‖u‖_θ ε^{θ−1}`
//!
//! The discrete kernel is renormalized to unit mass on the grid, so the
//! first bound holds exactly at any resolution; the analytic constant `A` is
//! kept for `‖dη‖_{L¹}`.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{c_theta_norm, fmt17, Axis, GridField, DEFAULT_SLACK};
use crate::quadrature::{adaptive_1d, adaptive_2d, compensated_sum, pairwise_sum, QuadratureOptions};

/// Quadrature policy for kernel integrals: tight enough for 1e-8 on `∫η`.
pub fn kernel_quadrature() -> QuadratureOptions {
    QuadratureOptions {
        order: 16,
        max_doublings: 8,
        rel_tol: 1e-13,
        abs_floor: 1e-15,
    }
}

/// Unnormalized bump `exp(1/(r² − 1))` for `r² < 1`.
fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (1.0 / (r2 - 1.0)).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    dim: usize,
    normalization: f64,
}

impl Mollifier {
    pub fn new(dim: usize) -> Result<Self> {
        Ok(Self {
            dim,
            normalization: normalization_constant(dim)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `A` with `∫η = 1`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        self.normalization * bump(r2)
    }

    /// `∂η/∂xᵢ = −2xᵢ η(x) / (|x|² − 1)²` inside the ball, zero outside.
    pub fn partial(&self, x: &[f64], i: usize) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            return 0.0;
        }
        let q = r2 - 1.0;
        -2.0 * x[i] * self.normalization * bump(r2) / (q * q)
    }

    /// `max_i ∫|∂η/∂xᵢ| dx`.
    pub fn deta_l1(&self) -> Result<f64> {
        let opts = kernel_quadrature();
        match self.dim {
            1 => Ok(adaptive_1d(|x| Ok(self.partial(&[x], 0).abs()), &[-1.0, 0.0, 1.0], &opts)?.value),
            2 => {
                let br = [-1.0, 0.0, 1.0];
                let mut best = 0.0_f64;
                for i in 0..2 {
                    let v = adaptive_2d(|x, y| Ok(self.partial(&[x, y], i).abs()), &br, &br, &opts)?;
                    best = best.max(v.value);
                }
                Ok(best)
            }
            n => Err(Error::invalid("n", format!("dimension {n} not in {{1, 2}}"))),
        }
    }
}

/// `A = 1 / ∫_{|x|<1} exp(1/(|x|² − 1)) dx` for n ∈ {1, 2}.
pub fn normalization_constant(n: usize) -> Result<f64> {
    let opts = kernel_quadrature();
    let integral = match n {
        1 => adaptive_1d(|x| Ok(bump(x * x)), &[-1.0, 0.0, 1.0], &opts)?.value,
        // Radial reduction: ∫_{|x|<1} = 2π ∫_0^1 r·bump(r²) dr.
        2 => std::f64::consts::TAU * adaptive_1d(|r| Ok(r * bump(r * r)), &[0.0, 1.0], &opts)?.value,
        _ => return Err(Error::invalid("n", format!("dimension {n} not in {{1, 2}}"))),
    };
    Ok(1.0 / integral)
}

/// `‖dη‖_{L¹}` for the standard mollifier in dimension `n`, computed once
/// per dimension.
pub fn deta_l1(n: usize) -> Result<f64> {
    static CACHE: [OnceLock<f64>; 2] = [OnceLock::new(), OnceLock::new()];
    let slot = CACHE
        .get(n.wrapping_sub(1))
        .ok_or_else(|| Error::invalid("n", format!("dimension {n} not in {{1, 2}}")))?;
    if let Some(&v) = slot.get() {
        return Ok(v);
    }
    let v = Mollifier::new(n)?.deta_l1()?;
    Ok(*slot.get_or_init(|| v))
}

/// Discrete `η_ε` on a grid's spacing: offsets `(k, l)` and unit-sum weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    pub entries: Vec<(isize, isize, f64)>,
}

impl DiscreteKernel {
    pub fn for_grid(axes: &[Axis], epsilon: f64) -> Self {
        let hx = axes[0].spacing();
        let kx = (epsilon / hx).ceil() as isize;
        let (hy, ky) = match axes.get(1) {
            Some(a) => (a.spacing(), (epsilon / a.spacing()).ceil() as isize),
            None => (1.0, 0),
        };
        let mut entries = Vec::new();
        for l in -ky..=ky {
            for k in -kx..=kx {
                let dx = k as f64 * hx / epsilon;
                let dy = if axes.len() > 1 { l as f64 * hy / epsilon } else { 0.0 };
                let w = bump(dx * dx + dy * dy);
                if w > 0.0 {
                    entries.push((k, l, w));
                }
            }
        }
        // ε below the spacing: only the center node survives.
        if entries.is_empty() {
            entries.push((0, 0, 1.0));
        }
        let weights: Vec<f64> = entries.iter().map(|e| e.2).collect();
        let total = pairwise_sum(&weights);
        for e in &mut entries {
            e.2 /= total;
        }
        // the center absorbs the rounding so the weights sum to 1 exactly
        let others: Vec<f64> = entries.iter().filter(|e| (e.0, e.1) != (0, 0)).map(|e| e.2).collect();
        let center = 1.0 - compensated_sum(&others);
        for e in &mut entries {
            if (e.0, e.1) == (0, 0) {
                e.2 = center;
            }
        }
        Self { entries }
    }

    pub fn mass(&self) -> f64 {
        let w: Vec<f64> = self.entries.iter().map(|e| e.2).collect();
        compensated_sum(&w)
    }

    /// Entries grouped by `l`, as `(l, k_max, weights by descending k)`.
    /// Within one `l` the offsets `k` are contiguous.
    fn rows(&self) -> Vec<(isize, isize, Vec<f64>)> {
        let mut rows: Vec<(isize, isize, Vec<f64>)> = Vec::new();
        for &(k, l, w) in &self.entries {
            match rows.last_mut() {
                Some(row) if row.0 == l => row.2.push(w),
                _ => rows.push((l, k, vec![w])),
            }
        }
        for row in &mut rows {
            row.1 += row.2.len() as isize - 1;
            row.2.reverse();
        }
        rows
    }

    /// Largest offset magnitude, per axis.
    fn reach(&self) -> (usize, usize) {
        self.entries.iter().fold((0, 0), |(a, b), &(k, l, _)| {
            (a.max(k.unsigned_abs()), b.max(l.unsigned_abs()))
        })
    }
}

fn check_epsilon(u: &GridField, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(
            "epsilon",
            format!("{epsilon} must be positive and finite"),
        ));
    }
    for a in u.axes() {
        if !a.periodic && epsilon >= 0.5 * a.width() {
            return Err(Error::EpsilonTooLarge {
                epsilon,
                width: a.width(),
                limit: 0.5 * a.width(),
            });
        }
    }
    Ok(())
}

/// Index range of output nodes on one axis: full on periodic axes, the
/// ε-shrunk interior otherwise.
fn valid_range(a: &Axis, reach: usize) -> (usize, usize) {
    if a.periodic {
        (0, a.nodes - 1)
    } else {
        (reach, a.nodes - 1 - reach)
    }
}

/// `uᵉ = η_ε ∗ u`, restricted to the ε-interior on non-periodic axes.
pub fn mollify(u: &GridField, epsilon: f64) -> Result<GridField> {
    check_epsilon(u, epsilon)?;
    let kernel = DiscreteKernel::for_grid(u.axes(), epsilon);
    let (rx, ry) = kernel.reach();
    let ax = u.axes()[0];
    let ay = u.axes().get(1).copied();
    let (ix0, ix1) = valid_range(&ax, rx);
    let (iy0, iy1) = ay.map_or((0, 0), |a| valid_range(&a, ry));
    if ix1 <= ix0 || (ay.is_some() && iy1 <= iy0) {
        return Err(Error::EpsilonTooLarge {
            epsilon,
            width: ax.width(),
            limit: 0.5 * ax.width(),
        });
    }
    let nx = u.nx();
    let ny = u.len() / nx;
    let out_nx = ix1 - ix0 + 1;
    let out_ny = iy1 - iy0 + 1;
    let (lo, hi) = u.min_max();
    let vals = u.values();
    let wrap = |a: &Axis, i: isize| -> usize {
        if a.periodic {
            i.rem_euclid((a.nodes - 1) as isize) as usize
        } else {
            i as usize
        }
    };
    // Source rows padded by the x-reach so that every kernel row becomes one
    // contiguous dot product.
    let pad = rx;
    let width = nx + 2 * pad;
    let mut padded = vec![0.0; ny * width];
    for (j, row) in padded.chunks_mut(width).enumerate() {
        for (p, slot) in row.iter_mut().enumerate() {
            let x = p as isize - pad as isize;
            if ax.periodic || (0..nx as isize).contains(&x) {
                *slot = vals[j * nx + wrap(&ax, x)];
            }
        }
    }
    let rows = kernel.rows();
    let mut out = vec![0.0; out_nx * out_ny];
    out.par_chunks_mut(out_nx).enumerate().for_each(|(r, dst)| {
        let j = (iy0 + r) as isize;
        for (c, slot) in dst.iter_mut().enumerate() {
            let i = ix0 + c;
            let mut acc = 0.0;
            for (dl, k_max, w) in &rows {
                let sj = match &ay {
                    Some(a) => wrap(a, j - dl),
                    None => 0,
                };
                let start = sj * width + (i as isize + pad as isize - k_max) as usize;
                let src = &padded[start..start + w.len()];
                acc += w.iter().zip(src).map(|(a, b)| a * b).sum::<f64>();
            }
            // A convex combination of samples; clamp rounding excursions.
            *slot = acc.clamp(lo, hi);
        }
    });
    let mut axes = vec![sub_axis(&ax, ix0, ix1)];
    if let Some(a) = ay {
        axes.push(sub_axis(&a, iy0, iy1));
    }
    // Re-impose exact seams: wrapped sums at the two seam nodes coincide only
    // up to summation order.
    if ax.periodic {
        for j in 0..out_ny {
            out[j * out_nx + out_nx - 1] = out[j * out_nx];
        }
    }
    if let Some(a) = ay {
        if a.periodic {
            for i in 0..out_nx {
                out[(out_ny - 1) * out_nx + i] = out[i];
            }
        }
    }
    Ok(GridField::from_parts_unchecked(axes, out))
}

fn sub_axis(a: &Axis, i0: usize, i1: usize) -> Axis {
    if a.periodic {
        *a
    } else {
        Axis {
            lo: a.coord(i0),
            hi: a.coord(i1),
            nodes: i1 - i0 + 1,
            periodic: false,
        }
    }
}

/// Samples of `u` on the nodes of `sub`, which must be a sub-grid produced
/// by [`mollify`].
pub fn restrict_to(u: &GridField, sub: &GridField) -> Result<GridField> {
    let mut offsets = [0usize; 2];
    for (d, (a, b)) in u.axes().iter().zip(sub.axes()).enumerate() {
        let off = ((b.lo - a.lo) / a.spacing()).round();
        if off < 0.0 || (b.spacing() - a.spacing()).abs() > 1e-9 * a.spacing() {
            return Err(Error::invalid("sub", "not a sub-grid of the field"));
        }
        offsets[d] = off as usize;
    }
    let nx = sub.nx();
    let vals: Vec<f64> = (0..sub.len())
        .map(|k| u.at(offsets[0] + k % nx, offsets[1] + k / nx))
        .collect();
    Ok(sub.with_values(vals))
}

/// Measured versus predicted regularization error at one ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationReport {
    pub epsilon: f64,
    pub theta: f64,
    pub cnorm: f64,
    pub slack: f64,
    pub sup_u: f64,
    pub sup_ue: f64,
    pub pass_b: bool,
    pub measured_c: f64,
    pub bound_c: f64,
    pub pass_c: bool,
    pub measured_d: f64,
    pub bound_d: f64,
    pub pass_d: bool,
}

impl RegularizationReport {
    pub fn passed(&self) -> bool {
        self.pass_b && self.pass_c && self.pass_d
    }

    pub const CSV_HEADER: [&'static str; 7] = [
        "epsilon",
        "measured_c",
        "bound_c",
        "measured_d",
        "bound_d",
        "pass_c",
        "pass_d",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            fmt17(self.epsilon),
            fmt17(self.measured_c),
            fmt17(self.bound_c),
            fmt17(self.measured_d),
            fmt17(self.bound_d),
            self.pass_c.to_string(),
            self.pass_d.to_string(),
        ]
    }
}

/// Checks the three regularization bounds at every ε, with the field's
/// `C^θ` norm estimated on sampled pairs and a multiplicative slack.
pub fn verify_regularization(u: &GridField, theta: f64, epsilons: &[f64]) -> Result<Vec<RegularizationReport>> {
    verify_regularization_with(u, theta, epsilons, DEFAULT_SLACK)
}

pub fn verify_regularization_with(
    u: &GridField,
    theta: f64,
    epsilons: &[f64],
    slack: f64,
) -> Result<Vec<RegularizationReport>> {
    let cnorm = c_theta_norm(u, theta)?.cnorm;
    let deta = deta_l1(u.dim())?;
    let sup_u = u.sup_norm();
    epsilons
        .iter()
        .map(|&eps| {
            let h = u.axes().iter().map(Axis::spacing).fold(0.0, f64::max);
            if h > eps / 10.0 {
                return Err(Error::UnderResolved {
                    resolution: u.nx(),
                    required: (10.0 * u.axes()[0].width() / eps).ceil() as usize + 1,
                    reason: format!("derivative check needs spacing ≤ ε/10 = {}", eps / 10.0),
                });
            }
            let ue = mollify(u, eps)?;
            let base = restrict_to(u, &ue)?;
            let measured_c = ue
                .values()
                .iter()
                .zip(base.values())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            let mut measured_d = 0.0_f64;
            for axis in 0..ue.dim() {
                measured_d = measured_d.max(ue.partial(axis)?.sup_norm());
            }
            let sup_ue = ue.sup_norm();
            let bound_c = cnorm * eps.powf(theta);
            let bound_d = deta * cnorm * eps.powf(theta - 1.0);
            Ok(RegularizationReport {
                epsilon: eps,
                theta,
                cnorm,
                slack,
                sup_u,
                sup_ue,
                pass_b: sup_ue <= sup_u,
                measured_c,
                bound_c,
                pass_c: measured_c <= bound_c * slack,
                measured_d,
                bound_d,
                pass_d: measured_d <= bound_d * slack,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_weierstrass;

    /// Trapezoid rule, an independent oracle: spectrally accurate for the
    /// flat-at-the-ends bump.
    fn trapezoid_bump_1d(n: usize) -> f64 {
        let h = 2.0 / n as f64;
        (0..=n).map(|i| bump((-1.0 + i as f64 * h).powi(2))).sum::<f64>() * h
    }

    #[test]
    fn normalization_1d_against_trapezoid() {
        let a = normalization_constant(1).unwrap();
        let oracle = 1.0 / trapezoid_bump_1d(20_000);
        assert!((a - oracle).abs() < 1e-9, "{a} vs {oracle}");
        assert!((a - 2.2523).abs() < 1e-4);
    }

    #[test]
    fn analytic_mass_is_one() {
        for n in [1, 2] {
            let m = Mollifier::new(n).unwrap();
            // Integrate η itself on the Cartesian grid, independent of the
            // radial reduction used for A.
            let mass = match n {
                1 => trapezoid_bump_1d(20_000) * m.normalization(),
                _ => {
                    let k = 1200;
                    let h = 2.0 / k as f64;
                    let mut s = 0.0;
                    for i in 0..=k {
                        for j in 0..=k {
                            s += m.eval(&[-1.0 + i as f64 * h, -1.0 + j as f64 * h]);
                        }
                    }
                    s * h * h
                }
            };
            assert!((mass - 1.0).abs() < 1e-8, "n = {n}: {mass}");
        }
    }

    #[test]
    fn deta_1d_is_twice_peak() {
        let m = Mollifier::new(1).unwrap();
        let expected = 2.0 * m.normalization() * (-1.0f64).exp();
        assert!((m.deta_l1().unwrap() - expected).abs() < 1e-10);
        assert_eq!(m.partial(&[0.0], 0), 0.0);
    }

    #[test]
    fn deta_2d_coordinates_agree_and_match_slice_identity() {
        // For each x₂ the x₁-profile is unimodal, so ∫|∂₁η| = 2∫η(0, x₂)dx₂
        // = 2·A₂/A₁.
        let m = Mollifier::new(2).unwrap();
        let br = [-1.0, 0.0, 1.0];
        let opts = kernel_quadrature();
        let i0 = adaptive_2d(|x, y| Ok(m.partial(&[x, y], 0).abs()), &br, &br, &opts).unwrap();
        let i1 = adaptive_2d(|x, y| Ok(m.partial(&[x, y], 1).abs()), &br, &br, &opts).unwrap();
        assert!((i0.value - i1.value).abs() < 1e-10);
        let oracle = 2.0 * normalization_constant(2).unwrap() / normalization_constant(1).unwrap();
        assert!((m.deta_l1().unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn discrete_kernel_unit_mass() {
        let ax = [
            Axis::periodic(0.0, 1.0, 513).unwrap(),
            Axis::periodic(0.0, 1.0, 129).unwrap(),
        ];
        for eps in [0.001, 0.02, 0.1] {
            let k = DiscreteKernel::for_grid(&ax, eps);
            assert!((k.mass() - 1.0).abs() <= 1e-15);
            assert!(k.entries.iter().all(|e| e.2 > 0.0));
        }
    }

    #[test]
    fn constant_preserved_exactly() {
        let u = GridField::from_fn(vec![Axis::closed(0.0, 1.0, 201).unwrap()], |_| 2.5).unwrap();
        let ue = mollify(&u, 0.1).unwrap();
        assert!(ue.values().iter().all(|&v| v == 2.5));
        // The kernel reaches only nodes strictly inside the ε-ball.
        assert!(ue.axes()[0].lo >= 0.1 - 0.005 - 1e-12 && ue.axes()[0].hi <= 0.9 + 0.005 + 1e-12);
    }

    #[test]
    fn linear_field_reproduced_on_interior() {
        let u = GridField::from_fn(vec![Axis::closed(0.0, 1.0, 401).unwrap()], |p| p[0]).unwrap();
        let ue = mollify(&u, 0.05).unwrap();
        for i in 0..ue.nx() {
            let x = ue.node(i, 0)[0];
            assert!((ue.at(i, 0) - x).abs() < 1e-6);
        }
    }

    #[test]
    fn epsilon_too_large_rejected() {
        let u = GridField::from_fn(vec![Axis::closed(0.0, 1.0, 101).unwrap()], |p| p[0]).unwrap();
        assert!(matches!(mollify(&u, 0.5), Err(Error::EpsilonTooLarge { .. })));
        assert!(mollify(&u, -1.0).is_err());
    }

    #[test]
    fn kink_lipschitz_case() {
        let u = GridField::from_fn(vec![Axis::closed(0.0, 1.0, 2001).unwrap()], |p| (p[0] - 0.5).abs()).unwrap();
        let r = &verify_regularization(&u, 1.0, &[0.1]).unwrap()[0];
        assert!(r.measured_c <= 0.1, "{}", r.measured_c);
        assert!(r.passed());
    }

    #[test]
    fn weierstrass_bound_c() {
        let w = make_weierstrass(0.5, 2, 8, 4096).unwrap();
        let cnorm = c_theta_norm(&w, 0.5).unwrap().cnorm;
        let ue = mollify(&w, 0.05).unwrap();
        let dev = ue
            .values()
            .iter()
            .zip(w.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(dev <= cnorm * 0.05f64.sqrt() * 1.05);
    }

    #[test]
    fn under_resolved_derivative_check_rejected() {
        let u = GridField::from_fn(vec![Axis::periodic(0.0, 1.0, 51).unwrap()], |p| p[0].sin()).unwrap();
        assert!(matches!(
            verify_regularization(&u, 0.5, &[0.1]),
            Err(Error::UnderResolved { .. })
        ));
    }
}
