//! Uniformly sampled scalar fields on boxes and flat tori, and Hölder
//! regularity measured over finite pair sets.
//!
//! A [`GridField`] stores samples at the nodes `lo + i·h`, `i = 0..nodes`,
//! of every axis, both endpoints included. On a periodic axis the last node
//! duplicates the first, so the period is `hi - lo` and distances wrap to the
//! shortest representative. Values between nodes are read by bilinear
//! interpolation.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Node counts at or below this get the exhaustive pair scan.
pub const ALL_PAIRS_LIMIT: usize = 1 << 12;
/// Size of the seeded node subsample used above [`ALL_PAIRS_LIMIT`].
pub const DEFAULT_SUBSAMPLE: usize = 2048;
/// Multiplier applied to sampled seminorms wherever an upper bound is needed.
pub const DEFAULT_SLACK: f64 = 1.05;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
    pub periodic: bool,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, nodes: usize, periodic: bool) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::invalid("axis", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        if nodes < 2 {
            return Err(Error::invalid("axis", format!("resolution {nodes} < 2")));
        }
        Ok(Self {
            lo,
            hi,
            nodes,
            periodic,
        })
    }

    pub fn periodic(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        Self::new(lo, hi, nodes, true)
    }

    pub fn closed(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        Self::new(lo, hi, nodes, false)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn spacing(&self) -> f64 {
        self.width() / (self.nodes - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    /// Number of nodes that are distinct points of the axis.
    pub fn distinct_nodes(&self) -> usize {
        if self.periodic {
            self.nodes - 1
        } else {
            self.nodes
        }
    }

    /// Distance along this axis, wrapped on periodic axes.
    pub fn separation(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        if self.periodic {
            let p = self.width();
            let d = d.rem_euclid(p);
            d.min(p - d)
        } else {
            d
        }
    }

    /// Cell index and fractional offset of `x`; `None` off a non-periodic axis.
    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let h = self.spacing();
        let x = if self.periodic {
            self.lo + (x - self.lo).rem_euclid(self.width())
        } else {
            let tol = 1e-12 * self.width().max(1.0);
            if x < self.lo - tol || x > self.hi + tol {
                return None;
            }
            x.clamp(self.lo, self.hi)
        };
        let t = (x - self.lo) / h;
        let i = (t.floor() as usize).min(self.nodes - 2);
        Some((i, (t - i as f64).clamp(0.0, 1.0)))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.locate(x).is_some()
    }
}

/// Samples of a real function on a 1- or 2-dimensional grid, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    axes: Vec<Axis>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(axes: Vec<Axis>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::invalid(
                "axes",
                format!("dimension {} not in {{1, 2}}", axes.len()),
            ));
        }
        let expected: usize = axes.iter().map(|a| a.nodes).product();
        if values.len() != expected {
            return Err(Error::invalid(
                "values",
                format!("expected {expected} samples, got {}", values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid("values", format!("sample {i} is not finite")));
        }
        let field = Self { axes, values };
        field.check_periodic_seams()?;
        Ok(field)
    }

    /// Samples `f` at every node. Periodic seams are copied, not re-evaluated,
    /// so `value(lo) == value(hi)` holds exactly.
    pub fn from_fn(axes: Vec<Axis>, f: impl Fn(Point) -> f64 + Sync) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::invalid(
                "axes",
                format!("dimension {} not in {{1, 2}}", axes.len()),
            ));
        }
        let nx = axes[0].nodes;
        let ny = axes.get(1).map_or(1, |a| a.nodes);
        let mut values: Vec<f64> = (0..nx * ny)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % nx, k / nx);
                let x = axes[0].coord(i);
                let y = axes.get(1).map_or(0.0, |a| a.coord(j));
                f([x, y])
            })
            .collect();
        if axes[0].periodic {
            for j in 0..ny {
                values[j * nx + nx - 1] = values[j * nx];
            }
        }
        if ny > 1 && axes[1].periodic {
            for i in 0..nx {
                values[(ny - 1) * nx + i] = values[i];
            }
        }
        Self::new(axes, values)
    }

    fn check_periodic_seams(&self) -> Result<()> {
        let nx = self.axes[0].nodes;
        let ny = self.ny();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        if self.axes[0].periodic {
            for j in 0..ny {
                if !close(self.values[j * nx], self.values[j * nx + nx - 1]) {
                    return Err(Error::invalid(
                        "values",
                        format!("periodic seam mismatch on x at row {j}"),
                    ));
                }
            }
        }
        if ny > 1 && self.axes[1].periodic {
            for i in 0..nx {
                if !close(self.values[i], self.values[(ny - 1) * nx + i]) {
                    return Err(Error::invalid(
                        "values",
                        format!("periodic seam mismatch on y at column {i}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn nx(&self) -> usize {
        self.axes[0].nodes
    }

    pub(crate) fn ny(&self) -> usize {
        self.axes.get(1).map_or(1, |a| a.nodes)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx() + i]
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        [self.axes[0].coord(i), self.axes.get(1).map_or(0.0, |a| a.coord(j))]
    }

    /// Flat distance between two points, each axis wrapped if periodic.
    pub fn distance(&self, p: Point, q: Point) -> f64 {
        let dx = self.axes[0].separation(p[0], q[0]);
        match self.axes.get(1) {
            Some(ay) => dx.hypot(ay.separation(p[1], q[1])),
            None => dx,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.axes[0].contains(p[0]) && self.axes.get(1).is_none_or(|a| a.contains(p[1]))
    }

    /// Bilinear (linear in 1D) interpolation; `None` outside a non-periodic box.
    pub fn value_at(&self, p: Point) -> Option<f64> {
        let (i, fx) = self.axes[0].locate(p[0])?;
        let nx = self.nx();
        match self.axes.get(1) {
            None => Some(self.values[i] * (1.0 - fx) + self.values[i + 1] * fx),
            Some(ay) => {
                let (j, fy) = ay.locate(p[1])?;
                let v00 = self.values[j * nx + i];
                let v10 = self.values[j * nx + i + 1];
                let v01 = self.values[(j + 1) * nx + i];
                let v11 = self.values[(j + 1) * nx + i + 1];
                Some((v00 * (1.0 - fx) + v10 * fx) * (1.0 - fy) + (v01 * (1.0 - fx) + v11 * fx) * fy)
            }
        }
    }

    pub fn try_value_at(&self, p: Point) -> Result<f64> {
        self.value_at(p).ok_or(Error::OutsideDomain { x: p[0], y: p[1] })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.axes.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            axes: self.axes.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.axes != other.axes {
            return Err(Error::invalid("other", "grids differ"));
        }
        Ok(Self {
            axes: self.axes.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            axes: self.axes.clone(),
            values,
        }
    }

    pub(crate) fn from_parts_unchecked(axes: Vec<Axis>, values: Vec<f64>) -> Self {
        Self { axes, values }
    }

    /// Centered-difference partial derivative along `axis` (0 = x, 1 = y).
    /// Periodic axes wrap; ends of closed axes use second-order one-sided
    /// stencils.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        let a = *self
            .axes
            .get(axis)
            .ok_or_else(|| Error::invalid("axis", format!("field has no axis {axis}")))?;
        let nx = self.nx();
        let n = a.nodes;
        let h = a.spacing();
        let stride = if axis == 0 { 1 } else { nx };
        let mut out = vec![0.0; self.values.len()];
        for (k, slot) in out.iter_mut().enumerate() {
            let (i, j) = (k % nx, k / nx);
            let pos = if axis == 0 { i } else { j };
            let base = k - pos * stride;
            let v = |p: usize| self.values[base + p * stride];
            *slot = if a.periodic {
                let m = n - 1;
                let p = pos % m;
                (v((p + 1) % m) - v((p + m - 1) % m)) / (2.0 * h)
            } else if n == 2 {
                (v(1) - v(0)) / h
            } else if pos == 0 {
                (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h)
            } else if pos == n - 1 {
                (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h)
            } else {
                (v(pos + 1) - v(pos - 1)) / (2.0 * h)
            };
        }
        Ok(self.with_values(out))
    }

    /// Node indices that are distinct points (periodic duplicates dropped).
    fn distinct_indices(&self) -> Vec<(usize, usize)> {
        let mx = self.axes[0].distinct_nodes();
        let my = self.axes.get(1).map_or(1, |a| a.distinct_nodes());
        (0..my).flat_map(|j| (0..mx).map(move |i| (i, j))).collect()
    }

    /// Serializes as `# dim,resolution,lo,hi,periodic`, one metadata comment
    /// line per axis, then one CSV line per row of x-samples.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("# dim,resolution,lo,hi,periodic\n");
        for a in &self.axes {
            let _ = writeln!(
                s,
                "# {},{},{},{},{}",
                self.dim(),
                a.nodes,
                fmt17(a.lo),
                fmt17(a.hi),
                a.periodic
            );
        }
        let nx = self.nx();
        for row in self.values.chunks(nx) {
            let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        if header.trim() != "# dim,resolution,lo,hi,periodic" {
            return Err(Error::Parse(format!("unexpected header `{header}`")));
        }
        let mut axes = Vec::new();
        let mut dim = None;
        let mut values = Vec::new();
        for line in lines {
            if let Some(meta) = line.trim().strip_prefix('#') {
                let parts: Vec<&str> = meta.split(',').map(str::trim).collect();
                if parts.len() != 5 {
                    return Err(Error::Parse(format!("axis line `{line}` needs 5 fields")));
                }
                let d: usize = parse(parts[0])?;
                if *dim.get_or_insert(d) != d {
                    return Err(Error::Parse("inconsistent dim across axis lines".into()));
                }
                let periodic = match parts[4] {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    other => return Err(Error::Parse(format!("bad periodic flag `{other}`"))),
                };
                axes.push(Axis::new(
                    parse(parts[2])?,
                    parse(parts[3])?,
                    parse(parts[1])?,
                    periodic,
                )?);
            } else {
                for tok in line.split(',') {
                    values.push(parse::<f64>(tok.trim())?);
                }
            }
        }
        if Some(axes.len()) != dim {
            return Err(Error::Parse(format!("dim {:?} but {} axis lines", dim, axes.len())));
        }
        Self::new(axes, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("cannot parse `{s}`")))
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Sampled Hölder data of one field at one exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderEstimate {
    pub theta: f64,
    /// Max of the Hölder quotient over the evaluated pairs; a lower bound on
    /// the true seminorm.
    pub seminorm: f64,
    pub supnorm: f64,
    pub cnorm: f64,
    pub pairs: u64,
}

/// Which node pairs enter the seminorm maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSet {
    /// Every pair of distinct nodes.
    All,
    /// Pairs at every dyadic index offset along each axis (and the diagonal
    /// in 2D), plus all pairs inside a seeded random node subsample.
    Stratified { seed: u64, subsample: usize },
    /// Only dyadic offsets (no subsample); a subset of `Stratified`.
    Dyadic,
}

impl PairSet {
    /// Exhaustive for small grids, stratified above [`ALL_PAIRS_LIMIT`] nodes.
    pub fn for_field(field: &GridField, seed: u64) -> Self {
        if field.len() <= ALL_PAIRS_LIMIT {
            PairSet::All
        } else {
            PairSet::Stratified {
                seed,
                subsample: DEFAULT_SUBSAMPLE,
            }
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid("theta", format!("{theta} not in (0, 1]")));
    }
    Ok(())
}

/// Seminorm over the default pair set for this grid, seed 0.
pub fn holder_seminorm(f: &GridField, theta: f64) -> Result<HolderEstimate> {
    holder_seminorm_with(f, theta, PairSet::for_field(f, 0))
}

pub fn holder_seminorm_with(f: &GridField, theta: f64, pairs: PairSet) -> Result<HolderEstimate> {
    check_theta(theta)?;
    let idx = f.distinct_indices();
    let quotient = |a: (usize, usize), b: (usize, usize)| -> f64 {
        let d = f.distance(f.node(a.0, a.1), f.node(b.0, b.1));
        if d <= 0.0 {
            return 0.0;
        }
        (f.at(a.0, a.1) - f.at(b.0, b.1)).abs() / d.powf(theta)
    };
    let (seminorm, count) = match pairs {
        PairSet::All => all_pairs_max(&idx, &quotient),
        PairSet::Dyadic => dyadic_max(f, &quotient),
        PairSet::Stratified { seed, subsample } => {
            let (d, nd) = dyadic_max(f, &quotient);
            let k = subsample.min(idx.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chosen: Vec<(usize, usize)> = sample(&mut rng, idx.len(), k).into_iter().map(|i| idx[i]).collect();
            chosen.sort_unstable();
            let (s, ns) = all_pairs_max(&chosen, &quotient);
            (d.max(s), nd + ns)
        }
    };
    let supnorm = f.sup_norm();
    Ok(HolderEstimate {
        theta,
        seminorm,
        supnorm,
        cnorm: supnorm + seminorm,
        pairs: count,
    })
}

/// `sup|f| + H_θ(f)` with the same pair policy as [`holder_seminorm`].
pub fn c_theta_norm(f: &GridField, theta: f64) -> Result<HolderEstimate> {
    holder_seminorm(f, theta)
}

fn all_pairs_max<Q>(idx: &[(usize, usize)], q: &Q) -> (f64, u64)
where
    Q: Fn((usize, usize), (usize, usize)) -> f64 + Sync,
{
    let m = idx
        .par_iter()
        .enumerate()
        .map(|(a, &p)| idx[a + 1..].iter().fold(0.0_f64, |m, &r| m.max(q(p, r))))
        .reduce(|| 0.0, f64::max);
    let n = idx.len() as u64;
    (m, n * n.saturating_sub(1) / 2)
}

fn dyadic_max<Q>(f: &GridField, q: &Q) -> (f64, u64)
where
    Q: Fn((usize, usize), (usize, usize)) -> f64 + Sync,
{
    let ax = f.axes()[0];
    let ay = f.axes().get(1).copied();
    let mx = ax.distinct_nodes();
    let my = ay.map_or(1, |a| a.distinct_nodes());
    let step = |axis: &Axis, m: usize, i: usize, off: usize| -> Option<usize> {
        if axis.periodic {
            Some((i + off) % m)
        } else if i + off < m {
            Some(i + off)
        } else {
            None
        }
    };
    let mut offsets = Vec::new();
    let longest = mx.max(my);
    let mut o = 1;
    while o < longest {
        offsets.push(o);
        o *= 2;
    }
    let rows: Vec<(f64, u64)> = (0..my)
        .into_par_iter()
        .map(|j| {
            let mut best = 0.0_f64;
            let mut n = 0u64;
            for i in 0..mx {
                for &off in &offsets {
                    if let Some(i2) = step(&ax, mx, i, off) {
                        best = best.max(q((i, j), (i2, j)));
                        n += 1;
                    }
                    if let Some(ay) = ay {
                        if let Some(j2) = step(&ay, my, j, off) {
                            best = best.max(q((i, j), (i, j2)));
                            n += 1;
                            if let Some(i2) = step(&ax, mx, i, off) {
                                best = best.max(q((i, j), (i2, j2)));
                                n += 1;
                            }
                        }
                    }
                }
            }
            (best, n)
        })
        .collect();
    rows.into_iter().fold((0.0, 0), |(m, c), (b, n)| (m.max(b), c + n))
}

/// Partial sum `Σ_{k<terms} base^{-θk} cos(2π base^k x)`.
pub fn weierstrass_value(theta: f64, base: u32, terms: u32, x: f64) -> f64 {
    let b = base as f64;
    let mut amp = 1.0;
    let mut freq = 1.0;
    let mut s = 0.0;
    for _ in 0..terms {
        // Reduce the phase before the cosine so large frequencies stay exact.
        let phase = (freq * x).rem_euclid(1.0);
        s += amp * (std::f64::consts::TAU * phase).cos();
        amp *= b.powf(-theta);
        freq *= b;
    }
    s
}

/// I.i.d. uniform samples in `[−1, 1]` at the distinct nodes, with periodic
/// seams copied.
pub fn random_field<R: rand::Rng>(rng: &mut R, axes: Vec<Axis>) -> Result<GridField> {
    let nx = axes.first().map_or(0, |a| a.nodes);
    let ny = axes.get(1).map_or(1, |a| a.nodes);
    let px = axes.first().is_some_and(|a| a.periodic);
    let py = axes.get(1).is_some_and(|a| a.periodic);
    let mut values = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let si = if px && i == nx - 1 { 0 } else { i };
            let sj = if py && j == ny - 1 { 0 } else { j };
            values[j * nx + i] = if (si, sj) == (i, j) {
                rng.random_range(-1.0..=1.0)
            } else {
                values[sj * nx + si]
            };
        }
    }
    GridField::new(axes, values)
}

/// Minimum resolution that resolves the finest oscillation of the series.
pub fn weierstrass_min_resolution(base: u32, terms: u32) -> usize {
    4 * (base as usize).pow(terms.saturating_sub(1))
}

fn check_weierstrass(theta: f64, base: u32, terms: u32, resolution: usize) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid("theta", format!("{theta} not in (0, 1)")));
    }
    if base < 2 {
        return Err(Error::invalid("base", format!("{base} < 2")));
    }
    if terms < 1 {
        return Err(Error::invalid("terms", "need at least one term"));
    }
    let required = weierstrass_min_resolution(base, terms);
    if resolution < required {
        return Err(Error::UnderResolved {
            resolution,
            required,
            reason: format!("finest oscillation has period {}^-{}", base, terms - 1),
        });
    }
    Ok(())
}

/// Truncated Weierstrass series on the periodic unit interval.
pub fn make_weierstrass(theta: f64, base: u32, terms: u32, resolution: usize) -> Result<GridField> {
    check_weierstrass(theta, base, terms, resolution)?;
    GridField::from_fn(vec![Axis::periodic(0.0, 1.0, resolution)?], |p| {
        weierstrass_value(theta, base, terms, p[0])
    })
}

/// The same series as a function of x alone, sampled on the periodic unit
/// square with `ny` nodes along y.
pub fn make_weierstrass_2d(theta: f64, base: u32, terms: u32, resolution: usize, ny: usize) -> Result<GridField> {
    check_weierstrass(theta, base, terms, resolution)?;
    GridField::from_fn(
        vec![Axis::periodic(0.0, 1.0, resolution)?, Axis::periodic(0.0, 1.0, ny)?],
        |p| weierstrass_value(theta, base, terms, p[0]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_1d(n: usize) -> GridField {
        GridField::from_fn(vec![Axis::closed(0.0, 1.0, n).unwrap()], |p| p[0]).unwrap()
    }

    #[test]
    fn single_term_is_cosine() {
        let w = make_weierstrass(0.5, 2, 1, 64).unwrap();
        assert!((w.sup_norm() - 1.0).abs() < 1e-15);
        for i in 0..64 {
            let x = w.node(i, 0)[0];
            assert!((w.at(i, 0) - (std::f64::consts::TAU * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_sum_at_origin() {
        // Σ_{k=0}^{7} 2^{-k/2} = (1 − 2^{-4}) / (1 − 2^{-1/2}).
        let expected: f64 = (0..8).map(|k| 2f64.powf(-0.5 * k as f64)).sum();
        assert!((expected - 0.9375 / (1.0 - 0.5f64.sqrt())).abs() < 1e-13);
        let w = make_weierstrass(0.5, 2, 8, 1024).unwrap();
        assert!((w.at(0, 0) - expected).abs() < 1e-12);
        assert_eq!(w.at(0, 0), w.at(1023, 0));
    }

    #[test]
    fn under_resolution_rejected() {
        let err = make_weierstrass(0.5, 2, 8, 511).unwrap_err();
        assert!(matches!(err, Error::UnderResolved { required: 512, .. }), "{err}");
        assert!(err.to_string().contains("under-resolved"));
    }

    #[test]
    fn constant_has_zero_seminorm() {
        let f = GridField::from_fn(vec![Axis::periodic(0.0, 1.0, 100).unwrap()], |_| 3.0).unwrap();
        let e = c_theta_norm(&f, 0.5).unwrap();
        assert_eq!(e.seminorm, 0.0);
        assert_eq!(e.cnorm, 3.0);
    }

    #[test]
    fn identity_is_one_lipschitz() {
        let e = c_theta_norm(&identity_1d(257), 1.0).unwrap();
        assert!((e.seminorm - 1.0).abs() < 1e-12);
        assert!((e.cnorm - 2.0).abs() < 1e-12);
        assert_eq!(e.cnorm, e.supnorm + e.seminorm);
    }

    #[test]
    fn periodic_distance_wraps() {
        let f = make_weierstrass(0.5, 2, 1, 8).unwrap();
        assert!((f.distance([0.05, 0.0], [0.95, 0.0]) - 0.1).abs() < 1e-15);
        let g = identity_1d(8);
        assert!((g.distance([0.05, 0.0], [0.95, 0.0]) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn interpolation_reproduces_bilinear_functions() {
        let f = GridField::from_fn(
            vec![Axis::closed(-1.0, 2.0, 7).unwrap(), Axis::closed(0.0, 1.0, 5).unwrap()],
            |p| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1],
        )
        .unwrap();
        let p = [0.37, 0.81];
        let exact = 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1];
        assert!((f.value_at(p).unwrap() - exact).abs() < 1e-13);
        assert!(f.value_at([2.5, 0.5]).is_none());
    }

    #[test]
    fn seam_mismatch_rejected() {
        let ax = Axis::periodic(0.0, 1.0, 4).unwrap();
        assert!(GridField::new(vec![ax], vec![0.0, 1.0, 2.0, 0.5]).is_err());
        assert!(GridField::new(vec![ax], vec![0.0, 1.0, 2.0, 0.0]).is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        let ax = Axis::closed(0.0, 1.0, 3).unwrap();
        assert!(GridField::new(vec![ax], vec![0.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn csv_round_trip_2d() {
        let f = make_weierstrass_2d(0.5, 2, 3, 17, 5).unwrap();
        let g = GridField::from_csv_str(&f.to_csv_string()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(GridField::from_csv_str("dim\n1,2\n").is_err());
    }

    #[test]
    fn stratified_is_superset_of_dyadic() {
        let w = make_weierstrass(0.5, 2, 8, 4097).unwrap();
        let dy = holder_seminorm_with(&w, 0.5, PairSet::Dyadic).unwrap();
        let st = holder_seminorm_with(
            &w,
            0.5,
            PairSet::Stratified {
                seed: 7,
                subsample: 512,
            },
        )
        .unwrap();
        let all = holder_seminorm_with(&w, 0.5, PairSet::All).unwrap();
        assert!(dy.seminorm <= st.seminorm);
        assert!(st.seminorm <= all.seminorm);
    }
}
