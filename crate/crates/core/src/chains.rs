//! Piecewise-C¹ curves and parametrized disks in the plane, their flat
//! measures, and integration of 1-forms over curves and 2-forms over disks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{c_theta_norm, Axis, GridField, HolderEstimate, Point};
use crate::mollify::mollify;
use crate::quadrature::{adaptive_1d, adaptive_2d, Estimate, QuadratureOptions};

const JOIN_TOL: f64 = 1e-10;
/// Samples per curve piece for the diameter scan.
const DIAMETER_SAMPLES: usize = 1024;

/// Affine map `p ↦ M·p + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub matrix: [[f64; 2]; 2],
    #[serde(default)]
    pub offset: Point,
}

impl Affine {
    pub fn linear(matrix: [[f64; 2]; 2]) -> Self {
        Self {
            matrix,
            offset: [0.0, 0.0],
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let m = &self.matrix;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + self.offset[0],
            m[1][0] * p[0] + m[1][1] * p[1] + self.offset[1],
        ]
    }

    pub fn apply_vector(&self, v: Point) -> Point {
        let m = &self.matrix;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn det(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// One C¹ map `[0, 1] → ℝ²` with an analytic velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Segment {
    Line {
        from: Point,
        to: Point,
    },
    /// Counter-clockwise when `end > start` (angles in radians).
    CircleArc {
        center: Point,
        radius: f64,
        start: f64,
        end: f64,
    },
    LinearImage {
        map: Affine,
        inner: Box<Segment>,
    },
    /// `inner ∘ φ` with `φ(t) = t − a·sin(2πt)/(2π)`, increasing for |a| < 1.
    Warped {
        amplitude: f64,
        inner: Box<Segment>,
    },
}

impl Segment {
    pub fn point(&self, t: f64) -> Point {
        match self {
            Segment::Line { from, to } => [from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])],
            Segment::CircleArc {
                center,
                radius,
                start,
                end,
            } => {
                let a = start + t * (end - start);
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
            Segment::LinearImage { map, inner } => map.apply(inner.point(t)),
            Segment::Warped { amplitude, inner } => inner.point(warp(*amplitude, t)),
        }
    }

    pub fn velocity(&self, t: f64) -> Point {
        match self {
            Segment::Line { from, to } => [to[0] - from[0], to[1] - from[1]],
            Segment::CircleArc { radius, start, end, .. } => {
                let w = end - start;
                let a = start + t * w;
                [-radius * w * a.sin(), radius * w * a.cos()]
            }
            Segment::LinearImage { map, inner } => map.apply_vector(inner.velocity(t)),
            Segment::Warped { amplitude, inner } => {
                let v = inner.velocity(warp(*amplitude, t));
                let d = 1.0 - amplitude * (std::f64::consts::TAU * t).cos();
                [v[0] * d, v[1] * d]
            }
        }
    }
}

fn warp(a: f64, t: f64) -> f64 {
    t - a * (std::f64::consts::TAU * t).sin() / std::f64::consts::TAU
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub segment: Segment,
    #[serde(default)]
    pub reversed: bool,
}

impl Piece {
    pub fn start(&self) -> Point {
        self.segment.point(if self.reversed { 1.0 } else { 0.0 })
    }

    pub fn end(&self) -> Point {
        self.segment.point(if self.reversed { 0.0 } else { 1.0 })
    }

    pub fn point(&self, t: f64) -> Point {
        self.segment.point(if self.reversed { 1.0 - t } else { t })
    }
}

/// Concatenation of C¹ pieces with matching endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Piece>", into = "Vec<Piece>")]
pub struct ParamCurve {
    pieces: Vec<Piece>,
}

impl TryFrom<Vec<Piece>> for ParamCurve {
    type Error = Error;
    fn try_from(pieces: Vec<Piece>) -> Result<Self> {
        ParamCurve::new(pieces)
    }
}

impl From<ParamCurve> for Vec<Piece> {
    fn from(c: ParamCurve) -> Self {
        c.pieces
    }
}

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

impl ParamCurve {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("curve", "no pieces"));
        }
        for (i, w) in pieces.windows(2).enumerate() {
            let gap = dist(w[0].end(), w[1].start());
            if gap > JOIN_TOL {
                return Err(Error::invalid(
                    "curve",
                    format!("pieces {i} and {} are {gap:e} apart", i + 1),
                ));
            }
        }
        Ok(Self { pieces })
    }

    pub fn from_segments(segments: impl IntoIterator<Item = Segment>) -> Result<Self> {
        Self::new(
            segments
                .into_iter()
                .map(|segment| Piece {
                    segment,
                    reversed: false,
                })
                .collect(),
        )
    }

    pub fn segment(from: Point, to: Point) -> Self {
        Self {
            pieces: vec![Piece {
                segment: Segment::Line { from, to },
                reversed: false,
            }],
        }
    }

    /// Counter-clockwise circle as a single arc piece.
    pub fn circle(center: Point, radius: f64) -> Self {
        Self {
            pieces: vec![Piece {
                segment: Segment::CircleArc {
                    center,
                    radius,
                    start: 0.0,
                    end: std::f64::consts::TAU,
                },
                reversed: false,
            }],
        }
    }

    /// Closed polygon through `vertices` in the given order.
    pub fn polygon(vertices: &[Point]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("vertices", "need at least two"));
        }
        let n = vertices.len();
        Self::from_segments((0..n).map(|i| Segment::Line {
            from: vertices[i],
            to: vertices[(i + 1) % n],
        }))
    }

    /// Counter-clockwise boundary `γ₁ + γ₂ + γ₃ + γ₄` of an axis-aligned
    /// rectangle: bottom, right, top, left.
    pub fn rectangle(corner: Point, width: f64, height: f64) -> Self {
        let [x, y] = corner;
        Self::polygon(&[[x, y], [x + width, y], [x + width, y + height], [x, y + height]]).expect("four vertices")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn reversed(&self) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .rev()
                .map(|p| Piece {
                    segment: p.segment.clone(),
                    reversed: !p.reversed,
                })
                .collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Self::new(pieces)
    }

    pub fn transformed(&self, map: &Affine) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    segment: Segment::LinearImage {
                        map: *map,
                        inner: Box::new(p.segment.clone()),
                    },
                    reversed: p.reversed,
                })
                .collect(),
        }
    }

    pub fn warped(&self, amplitude: f64) -> Result<Self> {
        if amplitude.abs() >= 1.0 {
            return Err(Error::invalid("amplitude", "|a| < 1 keeps the warp increasing"));
        }
        Ok(Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    segment: Segment::Warped {
                        amplitude,
                        inner: Box::new(p.segment.clone()),
                    },
                    reversed: p.reversed,
                })
                .collect(),
        })
    }

    pub fn start(&self) -> Point {
        self.pieces[0].start()
    }

    pub fn end(&self) -> Point {
        self.pieces[self.pieces.len() - 1].end()
    }

    pub fn is_closed(&self) -> bool {
        dist(self.start(), self.end()) <= JOIN_TOL
    }
}

fn speed_at(seg: &Segment, t: f64) -> Result<f64> {
    let v = seg.velocity(t);
    let s = v[0].hypot(v[1]);
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid("curve", format!("speed {s} at parameter {t}")));
    }
    Ok(s)
}

pub fn curve_length(curve: &ParamCurve) -> Result<f64> {
    curve_length_with(curve, &QuadratureOptions::default())
}

pub fn curve_length_with(curve: &ParamCurve, opts: &QuadratureOptions) -> Result<f64> {
    let mut total = 0.0;
    for p in &curve.pieces {
        total += adaptive_1d(|t| speed_at(&p.segment, t), &[0.0, 1.0], opts)?.value;
    }
    Ok(total)
}

/// Max pairwise distance over uniformly spaced boundary samples, taken on
/// their convex hull.
pub fn curve_diameter(curve: &ParamCurve) -> f64 {
    let mut pts = Vec::with_capacity(curve.pieces.len() * (DIAMETER_SAMPLES + 1));
    for p in &curve.pieces {
        for i in 0..=DIAMETER_SAMPLES {
            pts.push(p.point(i as f64 / DIAMETER_SAMPLES as f64));
        }
    }
    let hull = convex_hull(pts);
    let mut best = 0.0_f64;
    for (i, &a) in hull.iter().enumerate() {
        for &b in &hull[i + 1..] {
            best = best.max(dist(a, b));
        }
    }
    best
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone chain; collinear points dropped.
pub fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// A map `Ψ: [0,1]² → ℝ²`, built from named primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamDisk {
    /// `Ψ(r, s) = corner + (r·width, s·height)`.
    Rectangle {
        corner: Point,
        width: f64,
        height: f64,
    },
    /// `Ψ(r, s) = center + radius·r·(cos 2πs, sin 2πs)`.
    Polar {
        center: Point,
        radius: f64,
    },
    /// Cone over a closed polygon: `Ψ(r, s) = center + r·(P(s) − center)`,
    /// `P` traversing one edge per `1/m` of `s`.
    StarPolygon {
        center: Point,
        vertices: Vec<Point>,
    },
    LinearImage {
        map: Affine,
        inner: Box<ParamDisk>,
    },
}

impl ParamDisk {
    pub fn square(corner: Point, side: f64) -> Self {
        ParamDisk::Rectangle {
            corner,
            width: side,
            height: side,
        }
    }

    pub fn unit_disk() -> Self {
        ParamDisk::Polar {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    fn polygon_point(vertices: &[Point], s: f64) -> (Point, Point) {
        let m = vertices.len();
        let u = (s * m as f64).clamp(0.0, m as f64);
        let i = (u.floor() as usize).min(m - 1);
        let f = u - i as f64;
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        let d = [(b[0] - a[0]) * m as f64, (b[1] - a[1]) * m as f64];
        ([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])], d)
    }

    pub fn point(&self, r: f64, s: f64) -> Point {
        match self {
            ParamDisk::Rectangle { corner, width, height } => [corner[0] + r * width, corner[1] + s * height],
            ParamDisk::Polar { center, radius } => {
                let a = std::f64::consts::TAU * s;
                [center[0] + radius * r * a.cos(), center[1] + radius * r * a.sin()]
            }
            ParamDisk::StarPolygon { center, vertices } => {
                let (p, _) = Self::polygon_point(vertices, s);
                [center[0] + r * (p[0] - center[0]), center[1] + r * (p[1] - center[1])]
            }
            ParamDisk::LinearImage { map, inner } => map.apply(inner.point(r, s)),
        }
    }

    /// Columns `∂Ψ/∂r`, `∂Ψ/∂s`.
    pub fn jacobian(&self, r: f64, s: f64) -> [Point; 2] {
        match self {
            ParamDisk::Rectangle { width, height, .. } => [[*width, 0.0], [0.0, *height]],
            ParamDisk::Polar { radius, .. } => {
                let a = std::f64::consts::TAU * s;
                [
                    [radius * a.cos(), radius * a.sin()],
                    [
                        -std::f64::consts::TAU * radius * r * a.sin(),
                        std::f64::consts::TAU * radius * r * a.cos(),
                    ],
                ]
            }
            ParamDisk::StarPolygon { center, vertices } => {
                let (p, dp) = Self::polygon_point(vertices, s);
                [[p[0] - center[0], p[1] - center[1]], [r * dp[0], r * dp[1]]]
            }
            ParamDisk::LinearImage { map, inner } => {
                let [jr, js] = inner.jacobian(r, s);
                [map.apply_vector(jr), map.apply_vector(js)]
            }
        }
    }

    pub fn jacobian_det(&self, r: f64, s: f64) -> f64 {
        let [a, b] = self.jacobian(r, s);
        a[0] * b[1] - a[1] * b[0]
    }

    /// Parameter break points where Ψ is only piecewise smooth.
    pub fn breaks(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ParamDisk::StarPolygon { vertices, .. } => {
                let m = vertices.len();
                (vec![0.0, 1.0], (0..=m).map(|i| i as f64 / m as f64).collect())
            }
            ParamDisk::LinearImage { inner, .. } => inner.breaks(),
            _ => (vec![0.0, 1.0], vec![0.0, 1.0]),
        }
    }

    /// Geometric boundary: the image of the parameter square's boundary
    /// with degenerate and mutually cancelling edges dropped.
    pub fn boundary(&self) -> ParamCurve {
        match self {
            ParamDisk::Rectangle { corner, width, height } => ParamCurve::rectangle(*corner, *width, *height),
            ParamDisk::Polar { center, radius } => ParamCurve::circle(*center, *radius),
            ParamDisk::StarPolygon { vertices, .. } => ParamCurve::polygon(vertices).expect("validated polygon"),
            ParamDisk::LinearImage { map, inner } => inner.boundary().transformed(map),
        }
    }
}

fn checked_det(d: &ParamDisk, r: f64, s: f64) -> Result<f64> {
    let det = d.jacobian_det(r, s);
    if det == 0.0 || !det.is_finite() {
        return Err(Error::invalid("disk", format!("Jacobian rank < 2 at ({r}, {s})")));
    }
    Ok(det)
}

pub fn disk_area(d: &ParamDisk) -> Result<f64> {
    disk_area_with(d, &QuadratureOptions::default())
}

pub fn disk_area_with(d: &ParamDisk, opts: &QuadratureOptions) -> Result<f64> {
    let (br, bs) = d.breaks();
    Ok(adaptive_2d(|r, s| Ok(checked_det(d, r, s)?.abs()), &br, &bs, opts)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainMeasures {
    pub length: f64,
    pub area: f64,
    pub diameter: f64,
}

pub fn measure_disk(d: &ParamDisk) -> Result<ChainMeasures> {
    let boundary = d.boundary();
    Ok(ChainMeasures {
        length: curve_length(&boundary)?,
        area: disk_area(d)?,
        diameter: curve_diameter(&boundary),
    })
}

/// Anything that returns the coefficients `(a₁, a₂)` of `a₁dx + a₂dy`.
pub trait OneFormField: Sync {
    fn coefficients(&self, p: Point) -> Result<[f64; 2]>;
}

/// Coefficient `b` of `b dx∧dy`.
pub trait TwoFormField: Sync {
    fn coefficient(&self, p: Point) -> Result<f64>;

    /// Sampling grid, if any; quadrature breaks are aligned with its cells
    /// where the disk chart allows.
    fn grid(&self) -> Option<&[Axis]> {
        None
    }
}

/// Closed-form 1-form, for oracles.
pub struct AnalyticOneForm<F>(pub F);

impl<F: Fn(Point) -> [f64; 2] + Sync> OneFormField for AnalyticOneForm<F> {
    fn coefficients(&self, p: Point) -> Result<[f64; 2]> {
        Ok((self.0)(p))
    }
}

pub struct AnalyticTwoForm<F>(pub F);

impl<F: Fn(Point) -> f64 + Sync> TwoFormField for AnalyticTwoForm<F> {
    fn coefficient(&self, p: Point) -> Result<f64> {
        Ok((self.0)(p))
    }
}

impl TwoFormField for GridField {
    fn coefficient(&self, p: Point) -> Result<f64> {
        self.try_value_at(p)
    }

    fn grid(&self) -> Option<&[Axis]> {
        Some(self.axes())
    }
}

/// Parameter values in `(0, 1)` where `lo + t·len` crosses a node line.
fn node_breaks(axis: &Axis, lo: f64, len: f64) -> Vec<f64> {
    let h = axis.spacing();
    let first = ((lo - axis.lo) / h).floor() as i64 + 1;
    let last = ((lo + len - axis.lo) / h).ceil() as i64 - 1;
    let mut out = vec![0.0];
    for m in first..=last {
        let t = (axis.lo + m as f64 * h - lo) / len;
        if t > 1e-12 && t < 1.0 - 1e-12 {
            out.push(t);
        }
    }
    out.push(1.0);
    out
}

/// Grid-sampled `a₁dx + a₂dy` with a declared Hölder exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    a1: GridField,
    a2: GridField,
    theta: f64,
}

impl OneForm {
    pub fn new(a1: GridField, a2: GridField, theta: f64) -> Result<Self> {
        if a1.dim() != 2 || a1.axes() != a2.axes() {
            return Err(Error::invalid("components", "must share one 2-dimensional grid"));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::invalid("theta", format!("{theta} not in (0, 1]")));
        }
        Ok(Self { a1, a2, theta })
    }

    pub fn a1(&self) -> &GridField {
        &self.a1
    }

    pub fn a2(&self) -> &GridField {
        &self.a2
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Componentwise regularization.
    pub fn mollify(&self, epsilon: f64) -> Result<Self> {
        Self::new(mollify(&self.a1, epsilon)?, mollify(&self.a2, epsilon)?, self.theta)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a1: self.a1.scaled(c),
            a2: self.a2.scaled(c),
            theta: self.theta,
        }
    }

    /// `a·self + b·other`, keeping this form's exponent.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        Self::new(
            self.a1.combine(a, &other.a1, b)?,
            self.a2.combine(a, &other.a2, b)?,
            self.theta,
        )
    }

    /// `‖α‖_θ = max` over components of their sampled `C^θ` norms.
    pub fn cnorm(&self) -> Result<HolderEstimate> {
        self.cnorm_at(self.theta)
    }

    pub fn cnorm_at(&self, theta: f64) -> Result<HolderEstimate> {
        let e1 = c_theta_norm(&self.a1, theta)?;
        let e2 = c_theta_norm(&self.a2, theta)?;
        Ok(if e1.cnorm >= e2.cnorm { e1 } else { e2 })
    }
}

impl OneFormField for OneForm {
    fn coefficients(&self, p: Point) -> Result<[f64; 2]> {
        Ok([self.a1.try_value_at(p)?, self.a2.try_value_at(p)?])
    }
}

/// `Σ ∫₀¹ a(γ(t))·γ̇(t) dt` over the pieces; the last refinement delta is
/// the largest over pieces.
pub fn integrate_one_form_with<A: OneFormField + ?Sized>(
    alpha: &A,
    curve: &ParamCurve,
    opts: &QuadratureOptions,
) -> Result<Estimate> {
    let mut value = 0.0;
    let mut delta = 0.0_f64;
    let mut doublings = 0;
    for p in &curve.pieces {
        let seg = &p.segment;
        let est = adaptive_1d(
            |t| {
                let a = alpha.coefficients(seg.point(t))?;
                let v = seg.velocity(t);
                Ok(a[0] * v[0] + a[1] * v[1])
            },
            &[0.0, 1.0],
            opts,
        )?;
        // Reversal is applied to the forward integral so that it negates
        // exactly.
        value += if p.reversed { -est.value } else { est.value };
        delta = delta.max(est.delta);
        doublings = doublings.max(est.doublings);
    }
    Ok(Estimate {
        value,
        delta,
        doublings,
    })
}

pub fn integrate_one_form<A: OneFormField + ?Sized>(alpha: &A, curve: &ParamCurve) -> Result<f64> {
    Ok(integrate_one_form_with(alpha, curve, &QuadratureOptions::default())?.value)
}

/// `∫∫ β(Ψ(r, s))·det JΨ(r, s) dr ds`.
pub fn integrate_two_form_with<B: TwoFormField + ?Sized>(
    beta: &B,
    disk: &ParamDisk,
    opts: &QuadratureOptions,
) -> Result<Estimate> {
    let mut opts = *opts;
    let (br, bs) = match (disk, beta.grid()) {
        (ParamDisk::Rectangle { corner, width, height }, Some(axes)) if axes.len() == 2 => {
            // Bilinear on every cell of the aligned break grid: two nodes
            // per panel are already exact.
            opts.order = opts.order.min(2);
            (
                node_breaks(&axes[0], corner[0], *width),
                node_breaks(&axes[1], corner[1], *height),
            )
        }
        _ => disk.breaks(),
    };
    adaptive_2d(
        |r, s| Ok(beta.coefficient(disk.point(r, s))? * checked_det(disk, r, s)?),
        &br,
        &bs,
        &opts,
    )
}

pub fn integrate_two_form<B: TwoFormField + ?Sized>(beta: &B, disk: &ParamDisk) -> Result<f64> {
    Ok(integrate_two_form_with(beta, disk, &QuadratureOptions::default())?.value)
}

/// `dα = (∂a₂/∂x − ∂a₁/∂y) dx∧dy` by centered differences. Meant for
/// mollified or analytic-sampled forms only.
pub fn exterior_derivative(alpha: &OneForm) -> Result<GridField> {
    let d2x = alpha.a2.partial(0)?;
    let d1y = alpha.a1.partial(1)?;
    d2x.combine(1.0, &d1y, -1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid_form(f: impl Fn(Point) -> [f64; 2] + Sync, periodic: bool) -> OneForm {
        let ax = if periodic {
            Axis::periodic(0.0, 1.0, 65).unwrap()
        } else {
            Axis::closed(-2.0, 2.0, 81).unwrap()
        };
        let a1 = GridField::from_fn(vec![ax, ax], |p| f(p)[0]).unwrap();
        let a2 = GridField::from_fn(vec![ax, ax], |p| f(p)[1]).unwrap();
        OneForm::new(a1, a2, 1.0).unwrap()
    }

    #[test]
    fn circle_measures() {
        let c = ParamCurve::circle([0.0, 0.0], 1.0);
        assert!((curve_length(&c).unwrap() - 2.0 * PI).abs() < 1e-8);
        assert!((curve_diameter(&c) - 2.0).abs() < 1e-6);
        assert!(c.is_closed());
    }

    #[test]
    fn unit_square_area() {
        assert!((disk_area(&ParamDisk::square([0.0, 0.0], 1.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ellipse_area_is_pi_ab() {
        let e = ParamDisk::LinearImage {
            map: Affine::linear([[2.0, 0.0], [0.0, 1.0]]),
            inner: Box::new(ParamDisk::unit_disk()),
        };
        assert!((disk_area(&e).unwrap() - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn polygon_cone_area_is_exact() {
        let d = ParamDisk::StarPolygon {
            center: [0.5, 0.5],
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        };
        assert!((disk_area(&d).unwrap() - 1.0).abs() < 1e-12);
        assert!((curve_length(&d.boundary()).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn discontinuous_join_rejected() {
        let pieces = vec![
            Piece {
                segment: Segment::Line {
                    from: [0.0, 0.0],
                    to: [1.0, 0.0],
                },
                reversed: false,
            },
            Piece {
                segment: Segment::Line {
                    from: [1.0, 0.1],
                    to: [0.0, 0.0],
                },
                reversed: false,
            },
        ];
        assert!(ParamCurve::new(pieces).is_err());
    }

    #[test]
    fn exact_form_over_cycle_vanishes() {
        let dy = AnalyticOneForm(|_p: Point| [0.0, 1.0]);
        let c = ParamCurve::circle([0.3, -0.2], 0.7);
        assert!(integrate_one_form(&dy, &c).unwrap().abs() < 1e-10);
        let g = grid_form(|_| [0.0, 1.0], true);
        let sq = ParamCurve::rectangle([0.1, 0.2], 0.3, 0.4);
        assert!(integrate_one_form(&g, &sq).unwrap().abs() < 1e-10);
    }

    #[test]
    fn x_dy_over_unit_circle_is_pi() {
        let xdy = AnalyticOneForm(|p: Point| [0.0, p[0]]);
        let c = ParamCurve::circle([0.0, 0.0], 1.0);
        assert!((integrate_one_form(&xdy, &c).unwrap() - PI).abs() < 1e-6);
        // Sampled x dy is reproduced exactly by bilinear interpolation.
        let g = grid_form(|p| [0.0, p[0]], false);
        assert!((integrate_one_form(&g, &c).unwrap() - PI).abs() < 1e-6);
    }

    #[test]
    fn unit_square_and_disk_two_forms() {
        let one = AnalyticTwoForm(|_p: Point| 1.0);
        assert!((integrate_two_form(&one, &ParamDisk::square([0.0, 0.0], 1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((integrate_two_form(&one, &ParamDisk::unit_disk()).unwrap() - PI).abs() < 1e-6);
    }

    #[test]
    fn exterior_derivative_of_x_dy_is_one() {
        let g = grid_form(|p| [0.0, p[0]], false);
        let d = exterior_derivative(&g).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-8));
        let dy = grid_form(|_| [0.0, 1.0], true);
        assert!(exterior_derivative(&dy).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn outside_domain_rejected() {
        let g = grid_form(|p| [0.0, p[0]], false);
        let c = ParamCurve::circle([1.5, 0.0], 1.0);
        assert!(matches!(integrate_one_form(&g, &c), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn reversal_negates_exactly() {
        let f = AnalyticOneForm(|p: Point| [p[1].sin(), p[0] * p[0] * p[1]]);
        let c = ParamCurve::rectangle([0.1, 0.2], 0.5, 0.3)
            .concat(&ParamCurve::segment([0.1, 0.2], [0.7, 0.9]))
            .unwrap();
        let fwd = integrate_one_form(&f, &c).unwrap();
        let back = integrate_one_form(&f, &c.reversed()).unwrap();
        assert_eq!(fwd, -back);
    }

    #[test]
    fn zero_speed_rejected() {
        let c = ParamCurve::segment([0.0, 0.0], [0.0, 0.0]);
        assert!(curve_length(&c).is_err());
    }

    #[test]
    fn disk_serializes_as_structured_text() {
        let d = ParamDisk::LinearImage {
            map: Affine::linear([[2.0, 0.0], [0.0, 1.0]]),
            inner: Box::new(ParamDisk::unit_disk()),
        };
        let text = toml::to_string(&d).unwrap();
        let back: ParamDisk = toml::from_str(&text).unwrap();
        assert_eq!(d, back);
    }
}
