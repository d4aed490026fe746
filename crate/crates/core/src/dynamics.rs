//! Rate algebra for linear toral maps: eigenvalue moduli grouped into
//! stable, center and unstable rates, the cross-section and
//! non-accessibility criteria, the standard Hölder-exponent bound and the
//! Pisot example.

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::fmt17;

pub const MAX_DIM: usize = 4;
/// Moduli within this distance of 1 are center.
pub const CENTER_TOL: f64 = 1e-9;
/// Moduli with `CENTER_TOL ≤ |m − 1| < AMBIGUOUS_BAND` are rejected.
pub const AMBIGUOUS_BAND: f64 = 1e-6;
const ROOT_TOL: f64 = 1e-12;

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<i64>) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::invalid("matrix", format!("size {n} not in 1..={MAX_DIM}")));
        }
        if entries.len() != n * n {
            return Err(Error::invalid(
                "matrix",
                format!("{} entries for a {n}×{n} matrix", entries.len()),
            ));
        }
        Ok(Self { n, entries })
    }

    /// Square matrix from a flat row-major list; the size is its square root.
    pub fn from_row_major(entries: &[i64]) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        Self::new(n, entries.to_vec())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, (0..n * n).map(|k| i64::from(k / n == k % n)).collect())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::invalid("matrix", "size mismatch"));
        }
        let n = self.n;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc += i128::from(self.get(i, k)) * i128::from(other.get(k, j));
                }
                out[i * n + j] = i64::try_from(acc).map_err(|_| Error::invalid("matrix", "entry overflow"))?;
            }
        }
        Self::new(n, out)
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n;
        let entries = (0..n)
            .filter(|&i| i != row)
            .flat_map(|i| (0..n).filter(move |&j| j != col).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Self { n: n - 1, entries }
    }

    /// Laplace expansion; exact for n ≤ 4.
    pub fn det(&self) -> i128 {
        match self.n {
            1 => i128::from(self.entries[0]),
            _ => (0..self.n)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    sign * i128::from(self.get(0, j)) * self.minor(0, j).det()
                })
                .sum(),
        }
    }

    pub fn adjugate(&self) -> Result<Self> {
        let n = self.n;
        if n == 1 {
            return Self::new(1, vec![1]);
        }
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                let c = sign * self.minor(i, j).det();
                out[j * n + i] = i64::try_from(c).map_err(|_| Error::invalid("matrix", "cofactor overflow"))?;
            }
        }
        Self::new(n, out)
    }

    /// Integer inverse; requires `|det| = 1`.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.abs() != 1 {
            return Err(Error::invalid("matrix", format!("determinant {d} is not ±1")));
        }
        let adj = self.adjugate()?;
        Self::new(self.n, adj.entries.iter().map(|&v| v * d as i64).collect())
    }

    /// Coefficients `c₀, …, c_{n−1}, 1` of `det(xI − A)`, by Faddeev–LeVerrier
    /// in exact integer arithmetic.
    pub fn char_poly(&self) -> Vec<i128> {
        let n = self.n;
        let a: Vec<i128> = self.entries.iter().map(|&v| i128::from(v)).collect();
        let matmul = |x: &[i128], y: &[i128]| -> Vec<i128> {
            let mut out = vec![0i128; n * n];
            for i in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        out[i * n + j] += x[i * n + k] * y[k * n + j];
                    }
                }
            }
            out
        };
        let mut c = vec![0i128; n + 1];
        c[n] = 1;
        let mut m = vec![0i128; n * n];
        for k in 1..=n {
            for i in 0..n {
                m[i * n + i] += c[n - k + 1];
            }
            let am = matmul(&a, &m);
            let tr: i128 = (0..n).map(|i| am[i * n + i]).sum();
            c[n - k] = -tr / k as i128;
            m = am;
        }
        c
    }
}

/// Unimodular integer matrix with its characteristic polynomial and
/// eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ToralAutomorphism {
    matrix: IntMatrix,
    det: i128,
    char_poly: Vec<i128>,
    eigenvalues: Vec<Complex64>,
}

impl ToralAutomorphism {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        let det = matrix.det();
        if det.abs() != 1 {
            return Err(Error::invalid("matrix", format!("|det| = {} is not 1", det.abs())));
        }
        let char_poly = matrix.char_poly();
        let eigenvalues = integer_poly_roots(&char_poly)?;
        let scale: f64 = char_poly.iter().map(|&c| (c as f64).abs()).sum();
        for z in &eigenvalues {
            let r = eval_real_poly(&char_poly.iter().map(|&c| c as f64).collect::<Vec<_>>(), *z).norm();
            if r > 1e-9 * scale * z.norm().max(1.0).powi(matrix.size() as i32) {
                return Err(Error::Inconsistent(format!("eigenvalue {z} leaves residual {r:e}")));
            }
        }
        Ok(Self {
            matrix,
            det,
            char_poly,
            eigenvalues,
        })
    }

    pub fn from_row_major(entries: &[i64]) -> Result<Self> {
        Self::new(IntMatrix::from_row_major(entries)?)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> i128 {
        self.det
    }

    pub fn char_poly(&self) -> &[i128] {
        &self.char_poly
    }

    /// With multiplicity, sorted by modulus and then argument.
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.matrix.inverse()?)
    }

    /// `P A P⁻¹` for a unimodular `P`.
    pub fn conjugate(&self, p: &IntMatrix) -> Result<Self> {
        Self::new(p.mul(&self.matrix)?.mul(&p.inverse()?)?)
    }

    /// No eigenvalue modulus within [`CENTER_TOL`] of 1.
    pub fn is_hyperbolic(&self) -> bool {
        self.eigenvalues.iter().all(|z| (z.norm() - 1.0).abs() >= CENTER_TOL)
    }
}

/// Companion matrix of `x³ + c₂x² + c₁x + c₀`.
pub fn companion_matrix(c2: i64, c1: i64, c0: i64) -> Result<ToralAutomorphism> {
    if c0.abs() != 1 {
        return Err(Error::invalid("c0", format!("constant term {c0} is not ±1")));
    }
    ToralAutomorphism::new(IntMatrix::new(3, vec![0, 0, -c0, 1, 0, -c1, 0, 1, -c2])?)
}

fn eval_real_poly(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        d = d * z + p;
        p = p * z + a;
    }
    (p, d)
}

type Q = Ratio<i128>;

fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.len() > 1 && p.last().is_some_and(|c| *c == Q::from_integer(0)) {
        p.pop();
    }
    p
}

fn derivative(p: &[Q]) -> Vec<Q> {
    if p.len() <= 1 {
        return vec![Q::from_integer(0)];
    }
    trim((1..p.len()).map(|i| p[i] * Q::from_integer(i as i128)).collect())
}

fn is_zero(p: &[Q]) -> bool {
    p.iter().all(|c| *c == Q::from_integer(0))
}

/// Quotient and remainder; `b` nonzero.
fn divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![Q::from_integer(0)], r);
    }
    let mut q = vec![Q::from_integer(0); r.len() - b.len() + 1];
    let lead = *b.last().expect("nonzero divisor");
    while r.len() >= b.len() && !is_zero(&r) {
        let shift = r.len() - b.len();
        let f = *r.last().expect("nonempty") / lead;
        q[shift] = f;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] -= f * bi;
        }
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(p: Vec<Q>) -> Vec<Q> {
    let lead = *p.last().expect("nonempty");
    p.into_iter().map(|c| c / lead).collect()
}

fn gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !is_zero(&b) {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// Yun's square-free decomposition: `(factor, multiplicity)` pairs.
fn square_free(f: &[Q]) -> Vec<(Vec<Q>, usize)> {
    let f = monic(trim(f.to_vec()));
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = divrem(&f, &a0).0;
    let mut c = divrem(&df, &a0).0;
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let db = derivative(&b);
        let d: Vec<Q> = (0..c.len().max(db.len()))
            .map(|k| c.get(k).copied().unwrap_or(Q::from_integer(0)) - db.get(k).copied().unwrap_or(Q::from_integer(0)))
            .collect();
        let d = trim(d);
        let a = if is_zero(&d) { monic(b.clone()) } else { gcd(&b, &d) };
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = divrem(&b, &a).0;
        c = if is_zero(&d) {
            vec![Q::from_integer(0)]
        } else {
            divrem(&d, &a).0
        };
        i += 1;
    }
    out
}

fn to_complex(p: &[Q]) -> Vec<Complex64> {
    p.iter()
        .map(|c| Complex64::new(*c.numer() as f64 / *c.denom() as f64, 0.0))
        .collect()
}

fn newton(c: &[Complex64], mut z: Complex64, iters: usize) -> Complex64 {
    for _ in 0..iters {
        let (p, d) = eval_with_derivative(c, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = p / d;
        z -= step;
        if step.norm() <= ROOT_TOL * z.norm().max(1.0) * 1e-4 {
            break;
        }
    }
    z
}

/// Roots of a square-free polynomial: Newton with deflation, then each
/// root polished against the undeflated polynomial.
fn simple_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut work = c.to_vec();
    let mut roots = Vec::new();
    while work.len() > 2 {
        let z = newton(&work, Complex64::new(0.4, 0.9), 500);
        roots.push(z);
        // Synthetic division by (x − z).
        let n = work.len() - 1;
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        q[n - 1] = work[n];
        for k in (0..n - 1).rev() {
            q[k] = work[k + 1] + z * q[k + 1];
        }
        work = q;
    }
    if work.len() == 2 {
        roots.push(-work[0] / work[1]);
    }
    roots.into_iter().map(|z| newton(c, z, 50)).map(snap_real).collect()
}

fn snap_real(z: Complex64) -> Complex64 {
    if z.im.abs() <= ROOT_TOL * z.norm().max(1.0) {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

/// All complex roots with multiplicity of an integer polynomial
/// (coefficients low to high), sorted by modulus then argument.
pub fn integer_poly_roots(coeffs: &[i128]) -> Result<Vec<Complex64>> {
    let p: Vec<Q> = trim(coeffs.iter().map(|&c| Q::from_integer(c)).collect());
    if p.len() < 2 {
        return Err(Error::invalid("polynomial", "constant polynomial has no roots"));
    }
    let mut roots = Vec::new();
    for (factor, mult) in square_free(&p) {
        for z in simple_roots(&to_complex(&factor)) {
            roots.extend(std::iter::repeat_n(z, mult));
        }
    }
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(roots)
}

/// Moduli of the eigenvalues grouped against 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRates {
    /// `‖T^u f‖`, `m(T^u f)`; `None` without unstable directions.
    pub lambda_u: Option<f64>,
    pub m_u: Option<f64>,
    /// `‖T^s f‖`, `m(T^s f)`.
    pub lambda_s: Option<f64>,
    pub m_s: Option<f64>,
    /// `m(T^c f)`, `‖T^c f‖`; both 1 without center directions.
    pub m_c: f64,
    pub big_m_c: f64,
    pub dim_s: usize,
    pub dim_c: usize,
    pub dim_u: usize,
}

fn required(v: Option<f64>, what: &'static str) -> Result<f64> {
    v.ok_or_else(|| Error::invalid(what, "the splitting has no such directions"))
}

impl SpectralRates {
    /// Groups moduli (with multiplicity) against 1.
    pub fn from_moduli(moduli: &[f64]) -> Result<Self> {
        let (mut s, mut c, mut u) = (Vec::new(), Vec::new(), Vec::new());
        for &m in moduli {
            let gap = (m - 1.0).abs();
            if gap < CENTER_TOL {
                c.push(m);
            } else if gap < AMBIGUOUS_BAND {
                return Err(Error::AmbiguousModulus {
                    re: m,
                    im: 0.0,
                    modulus: m,
                });
            } else if m < 1.0 {
                s.push(m);
            } else {
                u.push(m);
            }
        }
        let min = |v: &[f64]| v.iter().copied().reduce(f64::min);
        let max = |v: &[f64]| v.iter().copied().reduce(f64::max);
        Ok(Self {
            lambda_u: max(&u),
            m_u: min(&u),
            lambda_s: max(&s),
            m_s: min(&s),
            m_c: min(&c).unwrap_or(1.0),
            big_m_c: max(&c).unwrap_or(1.0),
            dim_s: s.len(),
            dim_c: c.len(),
            dim_u: u.len(),
        })
    }

    /// Flow notation: `μ = λ_u`.
    pub fn mu(&self) -> Result<f64> {
        required(self.lambda_u, "lambda_u")
    }

    /// Flow notation: `ν = λ_s`.
    pub fn nu(&self) -> Result<f64> {
        required(self.lambda_s, "lambda_s")
    }

    /// Rates of the inverse map: stable and unstable swap, all reciprocal.
    pub fn inverse(&self) -> Self {
        let r = |v: Option<f64>| v.map(f64::recip);
        Self {
            lambda_u: r(self.m_s),
            m_u: r(self.lambda_s),
            lambda_s: r(self.m_u),
            m_s: r(self.lambda_u),
            m_c: self.big_m_c.recip(),
            big_m_c: self.m_c.recip(),
            dim_s: self.dim_u,
            dim_c: self.dim_c,
            dim_u: self.dim_s,
        }
    }
}

/// Rates of `A × id_{T^extra}`.
pub fn spectral_rates(a: &ToralAutomorphism, extra_center_dims: usize) -> Result<SpectralRates> {
    for z in a.eigenvalues() {
        let gap = (z.norm() - 1.0).abs();
        if (CENTER_TOL..AMBIGUOUS_BAND).contains(&gap) {
            return Err(Error::AmbiguousModulus {
                re: z.re,
                im: z.im,
                modulus: z.norm(),
            });
        }
    }
    let mut moduli: Vec<f64> = a.eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.extend(std::iter::repeat_n(1.0, extra_center_dims));
    SpectralRates::from_moduli(&moduli)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub name: &'static str,
    pub value: f64,
    /// `value < 1`.
    pub holds: bool,
    pub theta: f64,
    /// Solution of `value(θ) = 1`, not clamped.
    pub theta_threshold: f64,
    /// `theta_threshold ∈ (0, 1)`.
    pub threshold_reachable: bool,
}

impl CriterionReport {
    pub const CSV_HEADER: [&'static str; 6] = [
        "criterion",
        "theta",
        "value",
        "holds",
        "theta_threshold",
        "threshold_reachable",
    ];

    fn new(name: &'static str, value: f64, theta: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            holds: value < 1.0,
            theta,
            theta_threshold: threshold,
            threshold_reachable: threshold > 0.0 && threshold < 1.0,
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.name.to_string(),
            fmt17(self.theta),
            fmt17(self.value),
            self.holds.to_string(),
            fmt17(self.theta_threshold),
            self.threshold_reachable.to_string(),
        ]
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid("theta", format!("{theta} not in (0, 1)")));
    }
    Ok(())
}

/// `μ·νᶿ`, threshold `ln μ / (−ln ν)`.
pub fn anosov_section_criterion(rates: &SpectralRates, theta: f64) -> Result<CriterionReport> {
    check_theta(theta)?;
    anosov_value(rates.mu()?, rates.nu()?, theta)
}

/// As [`anosov_section_criterion`] on raw rates, admitting any θ.
pub fn anosov_value(mu: f64, nu: f64, theta: f64) -> Result<CriterionReport> {
    if !(mu > 1.0 && nu > 0.0 && nu < 1.0) {
        return Err(Error::invalid(
            "rates",
            format!("need μ > 1 > ν > 0, got μ = {mu}, ν = {nu}"),
        ));
    }
    Ok(CriterionReport::new(
        "anosov_section",
        mu * nu.powf(theta),
        theta,
        mu.ln() / -nu.ln(),
    ))
}

/// `λ_u^ℓ·λ_sᶿ / m_c^ℓ`, threshold `ℓ·ln(λ_u/m_c) / (−ln λ_s)`.
pub fn accessibility_criterion(rates: &SpectralRates, theta: f64, ell: usize) -> Result<CriterionReport> {
    check_theta(theta)?;
    if ell != rates.dim_c {
        return Err(Error::invalid(
            "ell",
            format!("ℓ = {ell} must equal dim E^c = {}", rates.dim_c),
        ));
    }
    if ell > rates.dim_s.min(rates.dim_u) {
        return Err(Error::DimensionHypothesis {
            ell,
            dim_s: rates.dim_s,
            dim_u: rates.dim_u,
        });
    }
    accessibility_value(rates.mu()?, rates.nu()?, rates.m_c, theta, ell)
}

pub fn accessibility_value(lambda_u: f64, lambda_s: f64, m_c: f64, theta: f64, ell: usize) -> Result<CriterionReport> {
    if !(lambda_s > 0.0 && lambda_s < 1.0 && m_c > 0.0) {
        return Err(Error::invalid("rates", "need 0 < λ_s < 1 and m_c > 0"));
    }
    let l = ell as f64;
    Ok(CriterionReport::new(
        "accessibility",
        (lambda_u / m_c).powf(l) * lambda_s.powf(theta),
        theta,
        l * (lambda_u / m_c).ln() / -lambda_s.ln(),
    ))
}

/// Largest θ ∈ [0, 1] with `m_u·m_sᶿ / M_c > 1`, clamped; 0 when no positive
/// exponent is certified.
pub fn standard_holder_bound(rates: &SpectralRates) -> Result<f64> {
    let m_u = required(rates.m_u, "m_u")?;
    let m_s = required(rates.m_s, "m_s")?;
    standard_holder_value(m_u, m_s, rates.big_m_c)
}

pub fn standard_holder_value(m_u: f64, m_s: f64, big_m_c: f64) -> Result<f64> {
    if !(m_s > 0.0 && m_s < 1.0 && m_u > 1.0) {
        return Err(Error::invalid("rates", "need m_s < 1 < m_u"));
    }
    Ok(((m_u / big_m_c).ln() / -m_s.ln()).clamp(0.0, 1.0))
}

/// Non-normative: the speculative improved exponent `τ = 1/(2 − θ)` for
/// forms smooth along leaves.
pub fn leafwise_exponent(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(1.0 / (2.0 - theta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PisotReport {
    pub xi: f64,
    pub eta: f64,
    /// `|ξη² − 1|`.
    pub det_residual: f64,
    /// `|p(ξ)|`.
    pub poly_residual: f64,
    pub rates: SpectralRates,
    pub accessibility_threshold: f64,
    pub standard_bound: f64,
}

impl PisotReport {
    /// Both thresholds coincide at ½.
    pub fn thresholds_coincide(&self, tol: f64) -> bool {
        (self.accessibility_threshold - 0.5).abs() <= tol && (self.standard_bound - 0.5).abs() <= tol
    }
}

/// `f_A⁻¹ × id_{S¹}` for `A` the companion matrix of `x³ − x − 1`.
pub fn pisot_example() -> Result<PisotReport> {
    let a = companion_matrix(0, -1, -1)?;
    let real = a
        .eigenvalues()
        .iter()
        .filter(|z| z.im == 0.0 && z.re > 1.0)
        .map(|z| z.re)
        .next()
        .ok_or_else(|| Error::Inconsistent("no real root above 1".into()))?;
    let eta = a
        .eigenvalues()
        .iter()
        .filter(|z| z.im != 0.0)
        .map(|z| z.norm())
        .next()
        .ok_or_else(|| Error::Inconsistent("no complex pair".into()))?;
    let rates = spectral_rates(&a.inverse()?, 1)?;
    let accessibility = accessibility_criterion(&rates, 0.5, 1)?;
    Ok(PisotReport {
        xi: real,
        eta,
        det_residual: (real * eta * eta - 1.0).abs(),
        poly_residual: (real.powi(3) - real - 1.0).abs(),
        rates,
        accessibility_threshold: accessibility.theta_threshold,
        standard_bound: standard_holder_bound(&rates)?,
    })
}

/// Random element of SL(2, ℤ) as a product of `factors` elementary shears
/// with entries in `[−bound, bound]`.
pub fn random_sl2z<R: Rng>(rng: &mut R, factors: usize, bound: i64) -> Result<IntMatrix> {
    let mut p = IntMatrix::identity(2)?;
    for i in 0..factors {
        let t = rng.random_range(-bound..=bound);
        let e = if i % 2 == 0 { vec![1, t, 0, 1] } else { vec![1, 0, t, 1] };
        p = p.mul(&IntMatrix::new(2, e)?)?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cat() -> ToralAutomorphism {
        ToralAutomorphism::from_row_major(&[2, 1, 1, 1]).unwrap()
    }

    #[test]
    fn char_poly_of_cat_map() {
        assert_eq!(cat().char_poly(), &[1, -3, 1]);
        let c = companion_matrix(0, -1, -1).unwrap();
        assert_eq!(c.char_poly(), &[-1, -1, 0, 1]);
        assert_eq!(c.det(), 1);
    }

    #[test]
    fn cat_map_eigenvalues() {
        let e = cat().eigenvalues().to_vec();
        let s5 = 5f64.sqrt();
        assert!((e[0].re - (3.0 - s5) / 2.0).abs() < 1e-12 && e[0].im == 0.0);
        assert!((e[1].re - (3.0 + s5) / 2.0).abs() < 1e-12 && e[1].im == 0.0);
    }

    #[test]
    fn repeated_roots_are_exact() {
        let id = ToralAutomorphism::new(IntMatrix::identity(3).unwrap()).unwrap();
        assert!(id.eigenvalues().iter().all(|z| (*z - 1.0).norm() < 1e-15));
        // (x − 1)²(x + 1)
        let r = integer_poly_roots(&[1, -1, -1, 1]).unwrap();
        assert!((r[0] + 1.0).norm() < 1e-15 || (r[2] + 1.0).norm() < 1e-15);
        assert_eq!(r.iter().filter(|z| (**z - 1.0).norm() < 1e-15).count(), 2);
    }

    #[test]
    fn integer_inverse() {
        let a = cat();
        let inv = a.inverse().unwrap();
        assert_eq!(inv.matrix().entries(), &[1, -1, -1, 2]);
        let id = a.matrix().mul(inv.matrix()).unwrap();
        assert_eq!(id, IntMatrix::identity(2).unwrap());
    }

    #[test]
    fn non_unimodular_rejected() {
        assert!(ToralAutomorphism::from_row_major(&[2, 0, 0, 1]).is_err());
        assert!(companion_matrix(0, 0, 2).is_err());
    }

    #[test]
    fn cube_root_of_unity_is_not_hyperbolic() {
        let a = companion_matrix(0, 0, -1).unwrap();
        assert!(!a.is_hyperbolic());
        let r = spectral_rates(&a, 0).unwrap();
        assert_eq!((r.dim_s, r.dim_c, r.dim_u), (0, 3, 0));
    }

    #[test]
    fn ambiguous_modulus_rejected() {
        assert!(matches!(
            SpectralRates::from_moduli(&[0.5, 1.0 + 1e-7, 2.0]),
            Err(Error::AmbiguousModulus { .. })
        ));
    }

    #[test]
    fn identity_circle_is_all_center() {
        let r = spectral_rates(&ToralAutomorphism::new(IntMatrix::identity(1).unwrap()).unwrap(), 0).unwrap();
        assert_eq!((r.m_c, r.big_m_c, r.dim_c), (1.0, 1.0, 1));
        assert!(r.lambda_u.is_none() && r.lambda_s.is_none());
    }

    #[test]
    fn inverse_duality() {
        let a = companion_matrix(0, -1, -1).unwrap();
        let direct = spectral_rates(&a.inverse().unwrap(), 1).unwrap();
        let dual = spectral_rates(&a, 1).unwrap().inverse();
        for (x, y) in [
            (direct.lambda_u, dual.lambda_u),
            (direct.m_u, dual.m_u),
            (direct.lambda_s, dual.lambda_s),
            (direct.m_s, dual.m_s),
        ] {
            assert!((x.unwrap() - y.unwrap()).abs() < 1e-12);
        }
        assert_eq!((direct.dim_s, direct.dim_c, direct.dim_u), (1, 1, 2));
    }

    #[test]
    fn anosov_examples() {
        let r = anosov_value(1.2, 0.3, 0.5).unwrap();
        assert!((r.value - 1.2 * 0.3f64.sqrt()).abs() < 1e-15 && r.holds);
        let rates = spectral_rates(&cat(), 0).unwrap();
        let c = anosov_section_criterion(&rates, 0.5).unwrap();
        assert!(!c.holds && !c.threshold_reachable);
        let at = anosov_value(2.0, 0.25, 0.5).unwrap();
        assert!(!at.holds, "equality is not strict");
    }

    #[test]
    fn accessibility_examples() {
        let r = accessibility_value(2.0, 0.5, 1.0, 0.5, 1).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-15 && !r.holds);
        let strong = accessibility_value(3.0, 0.5, 3.0, 0.5, 1).unwrap();
        assert!(strong.holds);
        let cat_rates = spectral_rates(&cat(), 1).unwrap();
        let c = accessibility_criterion(&cat_rates, 0.5, 1).unwrap();
        assert!((c.value - cat_rates.mu().unwrap().sqrt()).abs() < 1e-12);
        let no_center = spectral_rates(&cat(), 0).unwrap();
        assert!(accessibility_criterion(&no_center, 0.5, 1).is_err());
    }

    #[test]
    fn dimension_hypothesis_violated() {
        // Two center directions but one-dimensional stable and unstable.
        let rates = spectral_rates(&cat(), 2).unwrap();
        assert!(matches!(
            accessibility_criterion(&rates, 0.5, 2),
            Err(Error::DimensionHypothesis { ell: 2, .. })
        ));
    }

    #[test]
    fn standard_bound_examples() {
        assert_eq!(standard_holder_bound(&spectral_rates(&cat(), 0).unwrap()).unwrap(), 1.0);
        assert_eq!(standard_holder_value(1.5, 0.5, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn pisot_numbers() {
        let p = pisot_example().unwrap();
        assert!((p.xi - 1.3247179572).abs() < 1e-9);
        assert!((p.eta - 0.8688369).abs() < 1e-7);
        assert!(p.det_residual <= 1e-9 && p.poly_residual <= 1e-9);
        assert!(p.thresholds_coincide(1e-9));
    }

    #[test]
    fn leafwise_exponent_improves() {
        assert!((leafwise_exponent(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn random_conjugates_are_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let p = random_sl2z(&mut rng, 4, 3).unwrap();
            assert_eq!(p.det(), 1);
            let c = cat().conjugate(&p).unwrap();
            let r = spectral_rates(&c, 0).unwrap();
            assert!((r.mu().unwrap() * r.nu().unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
