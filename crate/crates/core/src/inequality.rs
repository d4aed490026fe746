//! The boundary-integral inequality for Hölder 1-forms on small disks: the
//! constant C(θ), the ε-sweep and its minimizer, the mollification split,
//! the flat isoperimetric inequality and the family verifier.

use rand::Rng;
use rayon::prelude::*;

use crate::chains::{
    convex_hull, exterior_derivative, integrate_one_form, integrate_two_form, measure_disk, ChainMeasures, OneForm,
    ParamDisk,
};
use crate::error::{Error, Result};
use crate::fields::{fmt17, Point, DEFAULT_SLACK};
use crate::mollify::deta_l1;

/// Default smallness threshold on the unit torus.
pub const DEFAULT_SIGMA: f64 = 0.5;
/// Absolute tolerance below which a boundary integral counts as zero.
pub const LHS_TOL: f64 = 1e-10;

fn check_open_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid("theta", format!("{theta} not in (0, 1)")));
    }
    Ok(())
}

/// `((1−θ)/θ)^θ + (θ/(1−θ))^{1−θ}`.
pub fn theta_bracket(theta: f64) -> Result<f64> {
    check_open_theta(theta)?;
    let q = (1.0 - theta) / theta;
    Ok(q.powf(theta) + q.recip().powf(1.0 - theta))
}

/// `C(θ) = max{1, ‖dη‖_{L¹}} · bracket(θ)`.
pub fn c_theta_constant(theta: f64, deta_l1: f64) -> Result<f64> {
    Ok(deta_l1.max(1.0) * theta_bracket(theta)?)
}

/// `ε* = (1−θ)|D| / (θ|∂D|)`.
pub fn eps_star(area: f64, length: f64, theta: f64) -> Result<f64> {
    check_open_theta(theta)?;
    if !(length > 0.0) {
        return Err(Error::invalid("length", format!("{length} must be positive")));
    }
    if area < 0.0 {
        return Err(Error::invalid("area", format!("{area} is negative")));
    }
    Ok((1.0 - theta) * area / (theta * length))
}

/// `|∂D|^{1−θ} |D|^θ`.
pub fn rhs_shape(area: f64, length: f64, theta: f64) -> f64 {
    length.powf(1.0 - theta) * area.powf(theta)
}

/// Bound of the split at one ε, before the constant.
fn split_shape(area: f64, length: f64, theta: f64, eps: f64) -> f64 {
    length * eps.powf(theta) + area * eps.powf(theta - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsSweep {
    pub epsilons: Vec<f64>,
    /// `max{1, ‖dη‖}·cnorm·(|∂D|εᶿ + |D|ε^{θ−1})` per grid point.
    pub bounds: Vec<f64>,
    pub argmin: usize,
    /// `C(θ)·cnorm·|∂D|^{1−θ}|D|^θ`, the exact minimum over all ε > 0.
    pub closed_form_min: f64,
}

impl EpsSweep {
    pub fn min_epsilon(&self) -> f64 {
        self.epsilons[self.argmin]
    }

    pub fn min_value(&self) -> f64 {
        self.bounds[self.argmin]
    }
}

/// Evaluates the split bound on `eps_grid` with the 2-dimensional kernel's
/// `‖dη‖_{L¹}`.
pub fn eps_sweep(cnorm: f64, area: f64, length: f64, theta: f64, eps_grid: &[f64]) -> Result<EpsSweep> {
    eps_sweep_with(cnorm, area, length, theta, eps_grid, deta_l1(2)?)
}

pub fn eps_sweep_with(cnorm: f64, area: f64, length: f64, theta: f64, eps_grid: &[f64], deta: f64) -> Result<EpsSweep> {
    check_open_theta(theta)?;
    if eps_grid.is_empty() || eps_grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("eps_grid", "must be non-empty and positive"));
    }
    if eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("eps_grid", "must be strictly increasing"));
    }
    let pre = deta.max(1.0) * cnorm;
    let bounds: Vec<f64> = eps_grid
        .iter()
        .map(|&e| pre * split_shape(area, length, theta, e))
        .collect();
    let argmin = bounds
        .iter()
        .enumerate()
        .fold(0, |best, (i, &b)| if b < bounds[best] { i } else { best });
    Ok(EpsSweep {
        epsilons: eps_grid.to_vec(),
        bounds,
        argmin,
        closed_form_min: c_theta_constant(theta, deta)? * cnorm * rhs_shape(area, length, theta),
    })
}

/// `n` points spaced evenly in `log ε` on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::invalid("log_grid", "need 0 < lo < hi and n ≥ 2"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// The three measured terms of `∫_{∂D}α = ∫_{∂D}(α−αᵉ) + ∫_D dαᵉ` and
/// their theoretical bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    pub epsilon: f64,
    pub theta: f64,
    pub cnorm: f64,
    pub slack: f64,
    pub lhs: f64,
    pub boundary_term: f64,
    pub interior_term: f64,
    /// Stokes residual `|∫_{∂D}αᵉ − ∫_D dαᵉ|`, used as quadrature tolerance.
    pub stokes_residual: f64,
    pub boundary_bound: f64,
    pub interior_bound: f64,
    pub pass_split: bool,
    pub pass_boundary: bool,
    pub pass_interior: bool,
}

impl SplitRecord {
    pub fn passed(&self) -> bool {
        self.pass_split && self.pass_boundary && self.pass_interior
    }
}

pub fn mollification_split_check(alpha: &OneForm, disk: &ParamDisk, epsilon: f64) -> Result<SplitRecord> {
    mollification_split_check_with(alpha, disk, epsilon, DEFAULT_SLACK)
}

pub fn mollification_split_check_with(
    alpha: &OneForm,
    disk: &ParamDisk,
    epsilon: f64,
    slack: f64,
) -> Result<SplitRecord> {
    let theta = alpha.theta();
    let cnorm = alpha.cnorm()?.cnorm;
    let m = measure_disk(disk)?;
    let boundary = disk.boundary();
    let ae = alpha.mollify(epsilon)?;
    let whole = integrate_one_form(alpha, &boundary)?;
    let smooth = integrate_one_form(&ae, &boundary)?;
    let interior = integrate_two_form(&exterior_derivative(&ae)?, disk)?;
    let lhs = whole.abs();
    let boundary_term = (whole - smooth).abs();
    let interior_term = interior.abs();
    let stokes_residual = (smooth - interior).abs();
    let boundary_bound = m.length * cnorm * epsilon.powf(theta) * slack;
    let interior_bound = m.area * deta_l1(2)? * cnorm * epsilon.powf(theta - 1.0) * slack;
    Ok(SplitRecord {
        epsilon,
        theta,
        cnorm,
        slack,
        lhs,
        boundary_term,
        interior_term,
        stokes_residual,
        boundary_bound,
        interior_bound,
        pass_split: lhs <= boundary_term + interior_term + stokes_residual + LHS_TOL,
        pass_boundary: boundary_term <= boundary_bound,
        pass_interior: interior_term <= interior_bound,
    })
}

/// `C_n = 1 / (nⁿ ωₙ)^{1/(n−1)}`, ωₙ the volume of the unit ball.
pub fn isoperimetric_constant(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", "dimension must be at least 2"));
    }
    Ok(1.0 / ((n as f64).powi(n as i32) * unit_ball_volume(n)).powf(1.0 / (n as f64 - 1.0)))
}

/// `ωₙ` by `ωₙ = (2π/n)·ω_{n−2}`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => std::f64::consts::TAU / n as f64 * unit_ball_volume(n - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoperimetricReport {
    pub area: f64,
    pub length: f64,
    /// `C₂|∂D|²`.
    pub bound: f64,
    /// `bound − area`; zero for the round disk.
    pub gap: f64,
    pub holds: bool,
}

/// Checks `|D| ≤ C₂|∂D|²` up to a relative 1e−9 for quadrature.
pub fn isoperimetric_check(disk: &ParamDisk) -> Result<IsoperimetricReport> {
    let m = measure_disk(disk)?;
    Ok(isoperimetric_from_measures(m.area, m.length))
}

pub fn isoperimetric_from_measures(area: f64, length: f64) -> IsoperimetricReport {
    let bound = length * length / (4.0 * std::f64::consts::PI);
    IsoperimetricReport {
        area,
        length,
        bound,
        gap: bound - area,
        holds: area <= bound * (1.0 + 1e-9),
    }
}

/// Convex hull of `n` uniform points in the unit square, as a cone chart
/// around the vertex centroid.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, n: usize) -> Result<ParamDisk> {
    if n < 3 {
        return Err(Error::invalid("n", "need at least three points"));
    }
    let pts: Vec<Point> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    let hull = convex_hull(pts);
    if hull.len() < 3 {
        return Err(Error::invalid("polygon", "degenerate hull"));
    }
    let k = hull.len() as f64;
    let center = [
        hull.iter().map(|p| p[0]).sum::<f64>() / k,
        hull.iter().map(|p| p[1]).sum::<f64>() / k,
    ];
    Ok(ParamDisk::StarPolygon { center, vertices: hull })
}

/// Squares `[x₀, x₀+r]×[y₀, y₀+r]` with `r = 2^{−j}`.
pub fn dyadic_squares(corner: Point, js: impl IntoIterator<Item = i32>) -> Vec<(f64, ParamDisk)> {
    js.into_iter()
        .map(|j| {
            let r = 2f64.powi(-j);
            (r, ParamDisk::square(corner, r))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub disk_id: usize,
    pub measures: ChainMeasures,
    pub lhs: f64,
    pub theta: f64,
    pub cnorm: f64,
    pub c_theta: f64,
    pub eps_star: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
    /// Running max of `ratio` up to and including this report.
    pub empirical_k: f64,
    /// Failed `max{diam, |∂D|} < σ`; lhs and ratio are then not computed.
    pub skipped: bool,
}

impl InequalityReport {
    pub const CSV_HEADER: [&'static str; 9] = [
        "disk_id",
        "length",
        "area",
        "diameter",
        "lhs",
        "rhs_shape",
        "ratio",
        "eps_star",
        "skipped_flag",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.disk_id.to_string(),
            fmt17(self.measures.length),
            fmt17(self.measures.area),
            fmt17(self.measures.diameter),
            fmt17(self.lhs),
            fmt17(self.rhs_shape),
            fmt17(self.ratio),
            fmt17(self.eps_star),
            u8::from(self.skipped).to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub reports: Vec<InequalityReport>,
    pub empirical_k: f64,
    pub non_finite: usize,
}

impl FamilyReport {
    pub fn evaluated(&self) -> impl Iterator<Item = &InequalityReport> {
        self.reports.iter().filter(|r| !r.skipped)
    }
}

/// Runs the inequality on every disk of `family` that passes the smallness
/// filter. `cnorm` is the `C^θ` norm of α, estimated once.
pub fn verify_main_inequality(alpha: &OneForm, family: &[ParamDisk], theta: f64, sigma: f64) -> Result<FamilyReport> {
    check_open_theta(theta)?;
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("{sigma} must be positive")));
    }
    let cnorm = alpha.cnorm_at(theta)?.cnorm;
    verify_with_cnorm(alpha, family, theta, sigma, cnorm)
}

/// As [`verify_main_inequality`] with a precomputed norm.
pub fn verify_with_cnorm(
    alpha: &OneForm,
    family: &[ParamDisk],
    theta: f64,
    sigma: f64,
    cnorm: f64,
) -> Result<FamilyReport> {
    let c_theta = c_theta_constant(theta, deta_l1(2)?)?;
    let rows: Vec<(ChainMeasures, Option<f64>)> = family
        .par_iter()
        .map(|d| -> Result<_> {
            let m = measure_disk(d)?;
            if m.diameter.max(m.length) >= sigma {
                return Ok((m, None));
            }
            Ok((m, Some(integrate_one_form(alpha, &d.boundary())?.abs())))
        })
        .collect::<Result<_>>()?;
    let mut reports = Vec::with_capacity(rows.len());
    let mut running = 0.0_f64;
    let mut non_finite = 0;
    for (disk_id, (m, lhs)) in rows.into_iter().enumerate() {
        let shape = rhs_shape(m.area, m.length, theta);
        let (lhs, ratio, skipped) = match lhs {
            None => (f64::NAN, f64::NAN, true),
            Some(lhs) => {
                if cnorm == 0.0 && lhs > LHS_TOL {
                    return Err(Error::Inconsistent(format!(
                        "disk {disk_id}: zero form integrates to {lhs:e}"
                    )));
                }
                let ratio = if lhs <= LHS_TOL && (cnorm == 0.0 || shape == 0.0) {
                    0.0
                } else {
                    lhs / (cnorm * shape)
                };
                if ratio.is_finite() {
                    running = running.max(ratio);
                } else {
                    non_finite += 1;
                }
                (lhs, ratio, false)
            }
        };
        reports.push(InequalityReport {
            disk_id,
            measures: m,
            lhs,
            theta,
            cnorm,
            c_theta,
            eps_star: eps_star(m.area, m.length, theta)?,
            rhs_shape: shape,
            ratio,
            empirical_k: running,
            skipped,
        });
    }
    Ok(FamilyReport {
        reports,
        empirical_k: running,
        non_finite,
    })
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("samples", "need two or more paired values"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("samples", "abscissae coincide"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Axis, GridField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bracket_values() {
        assert_eq!(theta_bracket(0.5).unwrap(), 2.0);
        let b = theta_bracket(0.25).unwrap();
        assert!((b - (3f64.powf(0.25) + 3f64.powf(-0.75))).abs() < 1e-14);
        assert!(theta_bracket(0.0).is_err() && theta_bracket(1.0).is_err());
    }

    #[test]
    fn c_theta_tends_to_prefactor() {
        let d = deta_l1(2).unwrap();
        let c = c_theta_constant(0.999, d).unwrap();
        assert!((c / d.max(1.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn eps_star_examples() {
        assert_eq!(eps_star(1.0, 1.0, 0.5).unwrap(), 1.0);
        assert!((eps_star(0.01, 0.4, 0.5).unwrap() - 0.025).abs() < 1e-15);
        assert_eq!(eps_star(0.0, 1.0, 0.5).unwrap(), 0.0);
        assert!(eps_star(1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn sweep_with_zero_area_is_increasing() {
        let grid = log_grid(1e-3, 1.0, 50).unwrap();
        let s = eps_sweep_with(1.0, 0.0, 1.0, 0.5, &grid, 2.0).unwrap();
        assert_eq!(s.argmin, 0);
        assert!(s.bounds.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sweep_matches_closed_form() {
        let e = eps_star(0.01, 0.4, 0.5).unwrap();
        let grid = log_grid(e / 10.0, e * 10.0, 1000).unwrap();
        let s = eps_sweep_with(3.0, 0.01, 0.4, 0.5, &grid, 4.0).unwrap();
        assert!((s.min_value() / s.closed_form_min - 1.0).abs() < 5e-3);
        assert!(s.bounds.iter().all(|&b| b >= s.closed_form_min - 1e-10));
        let step = (grid[1] / grid[0]).ln();
        assert!((s.min_epsilon() / e).ln().abs() <= step);
    }

    #[test]
    fn isoperimetric_constants() {
        assert!((isoperimetric_constant(2).unwrap() - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-16);
        // n = 3: ω₃ = 4π/3, C₃ = (36π)^{-1/2}, the round ball again.
        let c3 = isoperimetric_constant(3).unwrap();
        assert!((c3 - (36.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-15);
        let sq = isoperimetric_check(&ParamDisk::square([0.0, 0.0], 1.0)).unwrap();
        assert!(sq.holds && (sq.bound - 4.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!(isoperimetric_from_measures(0.0, 2.0).holds);
    }

    #[test]
    fn random_polygons_are_convex_and_strict() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let d = random_convex_polygon(&mut rng, 12).unwrap();
            let r = isoperimetric_check(&d).unwrap();
            assert!(r.holds && r.gap > 0.0);
        }
    }

    fn form(f: impl Fn(Point) -> [f64; 2] + Sync) -> OneForm {
        let ax = Axis::periodic(0.0, 1.0, 129).unwrap();
        let a1 = GridField::from_fn(vec![ax, ax], |p| f(p)[0]).unwrap();
        let a2 = GridField::from_fn(vec![ax, ax], |p| f(p)[1]).unwrap();
        OneForm::new(a1, a2, 0.5).unwrap()
    }

    #[test]
    fn exact_form_ratios_vanish() {
        let dy = form(|_| [0.0, 1.0]);
        let fam: Vec<ParamDisk> = dyadic_squares([0.1, 0.2], 2..=6).into_iter().map(|d| d.1).collect();
        let rep = verify_main_inequality(&dy, &fam, 0.5, DEFAULT_SIGMA).unwrap();
        assert!(rep.reports[0].skipped);
        for r in rep.evaluated() {
            assert!(r.lhs <= LHS_TOL && r.ratio <= 1e-8);
        }
    }

    #[test]
    fn empirical_k_monotone_and_homogeneous() {
        let a = form(|p| [0.0, (std::f64::consts::TAU * p[0]).sin()]);
        let fam: Vec<ParamDisk> = dyadic_squares([0.05, 0.3], 3..=6).into_iter().map(|d| d.1).collect();
        let r1 = verify_main_inequality(&a, &fam, 0.5, DEFAULT_SIGMA).unwrap();
        let r5 = verify_main_inequality(&a.scaled(5.0), &fam, 0.5, DEFAULT_SIGMA).unwrap();
        assert!(r1.reports.windows(2).all(|w| w[1].empirical_k >= w[0].empirical_k));
        for (x, y) in r1.evaluated().zip(r5.evaluated()) {
            assert!((x.ratio - y.ratio).abs() <= 1e-10 * x.ratio.max(1.0));
        }
    }

    #[test]
    fn zero_form_is_consistent() {
        let z = form(|_| [0.0, 0.0]);
        let fam = vec![ParamDisk::square([0.1, 0.1], 0.1)];
        let r = verify_main_inequality(&z, &fam, 0.5, DEFAULT_SIGMA).unwrap();
        assert_eq!(r.empirical_k, 0.0);
    }

    #[test]
    fn split_for_area_form() {
        let ax = Axis::closed(-1.0, 2.0, 301).unwrap();
        let a1 = GridField::from_fn(vec![ax, ax], |_| 0.0).unwrap();
        let a2 = GridField::from_fn(vec![ax, ax], |p| p[0]).unwrap();
        let xdy = OneForm::new(a1, a2, 0.5).unwrap();
        let d = ParamDisk::square([0.2, 0.3], 0.2);
        let rec = mollification_split_check(&xdy, &d, 0.05).unwrap();
        assert!((rec.interior_term - 0.04).abs() < 1e-9);
        assert!(rec.boundary_term < 1e-9);
        assert!(rec.passed());
    }

    #[test]
    fn constant_form_split_is_trivial() {
        let c = form(|_| [0.3, -0.7]);
        let rec = mollification_split_check(&c, &ParamDisk::square([0.2, 0.3], 0.2), 0.05).unwrap();
        assert!(rec.lhs < 1e-12 && rec.interior_term < 1e-12 && rec.passed());
    }

    #[test]
    fn slope_of_line() {
        assert!((ls_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap() - 2.0).abs() < 1e-15);
    }
}
