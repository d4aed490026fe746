//! Decay of the telescoped boundary bound under a linear hyperbolic model:
//! iterate an aligned rectangle, cut the image into `N ≍ μᵏ` strips, bound
//! each strip by the main inequality and compare the growth rate of the sum
//! with `μνᶿ`.

use crate::chains::{integrate_one_form, Affine, OneForm, ParamCurve, ParamDisk, Segment};
use crate::error::{Error, Result};
use crate::fields::{fmt17, Point};
use crate::inequality::{dyadic_squares, ls_slope, rhs_shape, verify_with_cnorm};

/// Iterated edges beyond this length are rejected.
pub const OVERFLOW_GUARD: f64 = 1e12;
/// Admissible k used for the fitted rate.
pub const FIT_WINDOW: usize = 3;

/// Real 2×2 map with eigenvalues `μ > 1 > ν > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel {
    matrix: [[f64; 2]; 2],
    mu: f64,
    nu: f64,
    eu: Point,
    es: Point,
}

fn eigenvector(m: &[[f64; 2]; 2], lambda: f64, fallback: Point) -> Point {
    let [[a, b], [c, d]] = *m;
    let v = if b != 0.0 {
        [b, lambda - a]
    } else if c != 0.0 {
        [lambda - d, c]
    } else {
        fallback
    };
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

impl LinearModel {
    pub fn new(matrix: [[f64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        let tr = a + d;
        let det = a * d - b * c;
        let disc = tr * tr - 4.0 * det;
        if !(disc > 0.0) {
            return Err(Error::invalid("model", "eigenvalues are not real and distinct"));
        }
        let r = disc.sqrt();
        let (mu, nu) = ((tr + r) / 2.0, (tr - r) / 2.0);
        if !(mu > 1.0 && nu > 0.0 && nu < 1.0) {
            return Err(Error::invalid(
                "model",
                format!("need μ > 1 > ν > 0, got μ = {mu}, ν = {nu}"),
            ));
        }
        // For diagonal input the eigenvalue on the first diagonal slot owns e₁.
        let (fu, fs) = if a >= d {
            ([1.0, 0.0], [0.0, 1.0])
        } else {
            ([0.0, 1.0], [1.0, 0.0])
        };
        Ok(Self {
            matrix,
            mu,
            nu,
            eu: eigenvector(&matrix, mu, fu),
            es: eigenvector(&matrix, nu, fs),
        })
    }

    pub fn diagonal(mu: f64, nu: f64) -> Result<Self> {
        Self::new([[mu, 0.0], [0.0, nu]])
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.matrix
    }

    /// `μνᶿ`.
    pub fn predicted_rate(&self, theta: f64) -> f64 {
        self.mu * self.nu.powf(theta)
    }

    fn apply(&self, p: Point) -> Point {
        Affine::linear(self.matrix).apply(p)
    }
}

/// Parallelogram spanned from `corner` by `unstable·eu` (the base) and
/// `stable·es` (the sides).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct USRectangle {
    pub corner: Point,
    pub unstable: f64,
    pub stable: f64,
    pub eu: Point,
    pub es: Point,
}

impl USRectangle {
    pub fn new(model: &LinearModel, corner: Point, unstable: f64, stable: f64) -> Result<Self> {
        if !(unstable > 0.0 && stable > 0.0) {
            return Err(Error::invalid("rectangle", "edge lengths must be positive"));
        }
        Ok(Self {
            corner,
            unstable,
            stable,
            eu: model.eu,
            es: model.es,
        })
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.unstable + self.stable)
    }

    pub fn area(&self) -> f64 {
        (self.eu[0] * self.es[1] - self.eu[1] * self.es[0]).abs() * self.unstable * self.stable
    }

    /// `|∂ᵘD|`, the base and the opposite edge.
    pub fn u_boundary(&self) -> f64 {
        2.0 * self.unstable
    }

    /// `|∂ˢD|`, the two sides.
    pub fn s_boundary(&self) -> f64 {
        2.0 * self.stable
    }

    fn vertex(&self, s_u: f64, s_s: f64) -> Point {
        [
            self.corner[0] + s_u * self.eu[0] + s_s * self.es[0],
            self.corner[1] + s_u * self.eu[1] + s_s * self.es[1],
        ]
    }

    /// `Ψ(r, s) = corner + r·unstable·eu + s·stable·es`.
    pub fn disk(&self) -> ParamDisk {
        ParamDisk::LinearImage {
            map: Affine {
                matrix: [
                    [self.unstable * self.eu[0], self.stable * self.es[0]],
                    [self.unstable * self.eu[1], self.stable * self.es[1]],
                ],
                offset: self.corner,
            },
            inner: Box::new(ParamDisk::square([0.0, 0.0], 1.0)),
        }
    }

    /// Boundary with both unstable edges split into `pieces` equal segments,
    /// matching the strip cut points.
    pub fn subdivided_boundary(&self, pieces: usize) -> Result<ParamCurve> {
        let n = pieces.max(1);
        let mut segs = Vec::with_capacity(2 * n + 2);
        let u = |i: usize| self.unstable * i as f64 / n as f64;
        for i in 0..n {
            segs.push(Segment::Line {
                from: self.vertex(u(i), 0.0),
                to: self.vertex(u(i + 1), 0.0),
            });
        }
        segs.push(Segment::Line {
            from: self.vertex(self.unstable, 0.0),
            to: self.vertex(self.unstable, self.stable),
        });
        for i in (0..n).rev() {
            segs.push(Segment::Line {
                from: self.vertex(u(i + 1), self.stable),
                to: self.vertex(u(i), self.stable),
            });
        }
        segs.push(Segment::Line {
            from: self.vertex(0.0, self.stable),
            to: self.vertex(0.0, 0.0),
        });
        ParamCurve::from_segments(segs)
    }
}

/// `fᵏ(D)`: edges scale by `μᵏ` and `νᵏ`.
pub fn iterate_rectangle(model: &LinearModel, d: &USRectangle, k: u32) -> Result<USRectangle> {
    let unstable = d.unstable * model.mu.powi(k as i32);
    if !(unstable <= OVERFLOW_GUARD) {
        return Err(Error::invalid(
            "k",
            format!("unstable edge {unstable:e} exceeds {OVERFLOW_GUARD:e}"),
        ));
    }
    let mut corner = d.corner;
    for _ in 0..k {
        corner = model.apply(corner);
    }
    Ok(USRectangle {
        corner,
        unstable,
        stable: d.stable * model.nu.powi(k as i32),
        eu: d.eu,
        es: d.es,
    })
}

/// `N` strips along the unstable edge, each with the full stable height.
pub fn cut_strips(d: &USRectangle, n: usize) -> Result<Vec<USRectangle>> {
    if n == 0 {
        return Err(Error::invalid("N", "need at least one strip"));
    }
    let w = d.unstable / n as f64;
    Ok((0..n)
        .map(|i| USRectangle {
            corner: d.vertex(d.unstable * i as f64 / n as f64, 0.0),
            unstable: w,
            ..*d
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StripChoice {
    /// `N₀ < n < 2N₀`.
    Admissible { n0: f64, n: usize },
    /// `C₁|∂D|νᵏ ≥ σ/2`.
    PreAsymptotic { n0: f64 },
    /// No integer in `(N₀, 2N₀)`.
    EmptyBand { n0: f64 },
}

/// `N₀ = 2C₁|∂D|μᵏ/σ` and `N = ⌈1.5·N₀⌉`, or the smallest integer above
/// `N₀` when rounding leaves the band.
pub fn choose_strip_count(k: u32, model: &LinearModel, d: &USRectangle, sigma: f64, c1: f64) -> Result<StripChoice> {
    if !(sigma > 0.0 && c1 > 0.0) {
        return Err(Error::invalid("sigma", "σ and C₁ must be positive"));
    }
    let len = d.perimeter();
    let n0 = 2.0 * c1 * len * model.mu.powi(k as i32) / sigma;
    if c1 * len * model.nu.powi(k as i32) >= sigma / 2.0 {
        return Ok(StripChoice::PreAsymptotic { n0 });
    }
    let mut n = (1.5 * n0).ceil();
    if n >= 2.0 * n0 {
        n = n0.floor() + 1.0;
    }
    if n <= n0 || n >= 2.0 * n0 {
        return Ok(StripChoice::EmptyBand { n0 });
    }
    Ok(StripChoice::Admissible { n0, n: n as usize })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOptions {
    pub theta: f64,
    pub sigma: f64,
    pub c1: f64,
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            theta: 0.5,
            sigma: 0.5,
            c1: 1.0,
            k_min: 0,
            k_max: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub k: u32,
    pub choice: StripChoice,
    pub bound: f64,
    pub ratio_to_previous: Option<f64>,
    pub strip_area: f64,
    pub max_strip_length: f64,
    pub max_strip_diameter: f64,
    /// `max |∫_{∂Dᵢ} α|` over strips.
    pub max_strip_lhs: f64,
    /// `|Σᵢ ∫_{∂fᵏDᵢ} α − ∫_{∂fᵏD} α|`.
    pub telescoping_residual: f64,
}

impl DecayRow {
    pub fn strips(&self) -> Option<usize> {
        match self.choice {
            StripChoice::Admissible { n, .. } => Some(n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub rows: Vec<DecayRow>,
    pub predicted_rate: f64,
    /// `exp` of the least-squares slope of `log bound_k` over the last
    /// admissible k; `None` with fewer than two or a zero bound.
    pub fitted_rate: Option<f64>,
    pub k_emp: f64,
    pub cnorm: f64,
}

impl DecaySeries {
    pub const CSV_HEADER: [&'static str; 5] = ["k", "N_k", "bound_k", "ratio_to_previous", "predicted_rate"];

    pub fn admissible(&self) -> impl Iterator<Item = &DecayRow> {
        self.rows.iter().filter(|r| r.strips().is_some())
    }

    /// A fitted rate at or above 1 contradicts decay.
    pub fn criterion_violating(&self) -> bool {
        self.fitted_rate.is_some_and(|r| r >= 1.0)
    }

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.admissible()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.strips().map_or(String::new(), |n| n.to_string()),
                    fmt17(r.bound),
                    r.ratio_to_previous.map_or(String::new(), fmt17),
                    fmt17(self.predicted_rate),
                ]
            })
            .collect()
    }
}

/// Empirical K of the form over dyadic squares `2^{−j}`, `j ∈ js`, with
/// corner `corner`.
pub fn calibrate_k_emp(
    alpha: &OneForm,
    corner: Point,
    js: impl IntoIterator<Item = i32>,
    theta: f64,
    sigma: f64,
    cnorm: f64,
) -> Result<f64> {
    let fam: Vec<ParamDisk> = dyadic_squares(corner, js).into_iter().map(|d| d.1).collect();
    Ok(verify_with_cnorm(alpha, &fam, theta, sigma, cnorm)?.empirical_k)
}

/// Runs the strip decomposition for every `k` in the range. `k_emp` and
/// `cnorm` are frozen inputs.
pub fn decay_bound_series(
    alpha: &OneForm,
    model: &LinearModel,
    d: &USRectangle,
    opts: &DecayOptions,
    k_emp: f64,
    cnorm: f64,
) -> Result<DecaySeries> {
    if opts.k_min > opts.k_max {
        return Err(Error::invalid("k_range", "k_min exceeds k_max"));
    }
    let theta = opts.theta;
    let mut rows: Vec<DecayRow> = Vec::new();
    let mut previous: Option<(u32, f64)> = None;
    for k in opts.k_min..=opts.k_max {
        let choice = choose_strip_count(k, model, d, opts.sigma, opts.c1)?;
        let StripChoice::Admissible { n, .. } = choice else {
            rows.push(DecayRow {
                k,
                choice,
                bound: f64::NAN,
                ratio_to_previous: None,
                strip_area: f64::NAN,
                max_strip_length: f64::NAN,
                max_strip_diameter: f64::NAN,
                max_strip_lhs: f64::NAN,
                telescoping_residual: f64::NAN,
            });
            continue;
        };
        let fk = iterate_rectangle(model, d, k)?;
        let strips = cut_strips(&fk, n)?;
        let disks: Vec<ParamDisk> = strips.iter().map(USRectangle::disk).collect();
        let fam = verify_with_cnorm(alpha, &disks, theta, opts.sigma, cnorm)?;
        if let Some(r) = fam.reports.iter().find(|r| r.skipped) {
            return Err(Error::Inconsistent(format!(
                "k = {k}: strip {} fails the smallness filter (|∂| = {})",
                r.disk_id, r.measures.length
            )));
        }
        let terms: Vec<f64> = fam
            .reports
            .iter()
            .map(|r| k_emp * cnorm * rhs_shape(r.measures.area, r.measures.length, theta))
            .collect();
        let bound = crate::quadrature::pairwise_sum(&terms);
        let mut pieces = 0.0;
        for s in &strips {
            pieces += integrate_one_form(alpha, &s.disk().boundary())?;
        }
        let whole = integrate_one_form(alpha, &fk.subdivided_boundary(n)?)?;
        let ratio_to_previous = match previous {
            Some((pk, pb)) if pk + 1 == k && pb > 0.0 => Some(bound / pb),
            _ => None,
        };
        previous = Some((k, bound));
        rows.push(DecayRow {
            k,
            choice,
            bound,
            ratio_to_previous,
            strip_area: fk.area() / n as f64,
            max_strip_length: fam.reports.iter().map(|r| r.measures.length).fold(0.0, f64::max),
            max_strip_diameter: fam.reports.iter().map(|r| r.measures.diameter).fold(0.0, f64::max),
            max_strip_lhs: fam.reports.iter().map(|r| r.lhs).fold(0.0, f64::max),
            telescoping_residual: (pieces - whole).abs(),
        });
    }
    let tail: Vec<&DecayRow> = rows.iter().filter(|r| r.strips().is_some()).collect();
    let tail = &tail[tail.len().saturating_sub(FIT_WINDOW)..];
    let fitted_rate = if tail.len() >= 2 && tail.iter().all(|r| r.bound > 0.0) {
        let ks: Vec<f64> = tail.iter().map(|r| f64::from(r.k)).collect();
        let logs: Vec<f64> = tail.iter().map(|r| r.bound.ln()).collect();
        Some(ls_slope(&ks, &logs)?.exp())
    } else {
        None
    };
    Ok(DecaySeries {
        rows,
        predicted_rate: model.predicted_rate(theta),
        fitted_rate,
        k_emp,
        cnorm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::curve_length;
    use crate::fields::{Axis, GridField};

    fn model() -> LinearModel {
        LinearModel::diagonal(1.5, 0.4).unwrap()
    }

    #[test]
    fn iterate_examples() {
        let m = model();
        let d = USRectangle::new(&m, [0.0, 0.0], 0.1, 0.1).unwrap();
        assert_eq!(iterate_rectangle(&m, &d, 0).unwrap(), d);
        let d3 = iterate_rectangle(&m, &d, 3).unwrap();
        assert!((d3.unstable - 0.3375).abs() < 1e-15 && (d3.stable - 0.0064).abs() < 1e-15);
        assert!((d3.area() - 0.6f64.powi(3) * d.area()).abs() < 1e-15);
        assert!(iterate_rectangle(&m, &d, 80).is_err());
    }

    #[test]
    fn strips_partition() {
        let m = model();
        let d = USRectangle::new(&m, [0.1, 0.2], 0.8, 0.1).unwrap();
        assert_eq!(cut_strips(&d, 1).unwrap(), vec![d]);
        let s = cut_strips(&d, 4).unwrap();
        assert!(s
            .iter()
            .all(|r| (r.unstable - 0.2).abs() < 1e-15 && r.s_boundary() == d.s_boundary()));
        let u: f64 = s.iter().map(USRectangle::u_boundary).sum();
        assert!((u - d.u_boundary()).abs() < 1e-14);
        assert!(s.iter().all(|r| (r.area() - d.area() / 4.0).abs() < 1e-10));
    }

    #[test]
    fn strip_count_example() {
        let m = model();
        // |∂D| = 0.4
        let d = USRectangle::new(&m, [0.0, 0.0], 0.1, 0.1).unwrap();
        match choose_strip_count(5, &m, &d, 0.5, 1.0).unwrap() {
            StripChoice::Admissible { n0, n } => {
                assert!((n0 - 12.15).abs() < 1e-12);
                assert_eq!(n, 19);
            }
            other => panic!("{other:?}"),
        }
        let big = USRectangle::new(&m, [0.0, 0.0], 1.0, 1.0).unwrap();
        assert!(matches!(
            choose_strip_count(0, &m, &big, 0.5, 1.0).unwrap(),
            StripChoice::PreAsymptotic { .. }
        ));
    }

    #[test]
    fn subdivided_boundary_has_the_same_length() {
        let m = model();
        let d = USRectangle::new(&m, [0.1, 0.2], 0.8, 0.1).unwrap();
        let c = d.subdivided_boundary(7).unwrap();
        assert!(c.is_closed());
        assert!((curve_length(&c).unwrap() - d.perimeter()).abs() < 1e-12);
    }

    #[test]
    fn exact_form_series_is_zero() {
        let ax = Axis::periodic(0.0, 1.0, 65).unwrap();
        let a1 = GridField::from_fn(vec![ax, ax], |_| 0.0).unwrap();
        let a2 = GridField::from_fn(vec![ax, ax], |_| 1.0).unwrap();
        let dy = OneForm::new(a1, a2, 0.5).unwrap();
        let m = model();
        let d = USRectangle::new(&m, [0.3, 0.3], 0.1, 0.1).unwrap();
        let opts = DecayOptions {
            k_max: 5,
            ..Default::default()
        };
        let s = decay_bound_series(&dy, &m, &d, &opts, 1.0, 1.0).unwrap();
        for r in s.admissible() {
            assert!(r.max_strip_lhs <= 1e-10);
            assert!(r.max_strip_length < opts.sigma);
        }
    }

    #[test]
    fn non_diagonal_model_maps_vertices() {
        let m = LinearModel::new([[2.0, 1.0], [0.0, 0.5]]).unwrap();
        assert_eq!((m.mu(), m.nu()), (2.0, 0.5));
        let d = USRectangle::new(&m, [0.1, 0.2], 0.3, 0.4).unwrap();
        let f2 = iterate_rectangle(&m, &d, 2).unwrap();
        let far = d.vertex(0.3, 0.4);
        let image = m.apply(m.apply(far));
        let v = f2.vertex(f2.unstable, f2.stable);
        assert!((image[0] - v[0]).abs() < 1e-14 && (image[1] - v[1]).abs() < 1e-14);
    }
}
