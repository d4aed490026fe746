//! Experiment configuration: a TOML document with one table per experiment.
//! Unknown keys are rejected; numeric fields are validated before any run.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::chains::{OneForm, ParamDisk};
use crate::error::{Error, Result};
use crate::fields::{make_weierstrass_2d, Axis, GridField, Point, DEFAULT_SLACK};
use crate::inequality::DEFAULT_SIGMA;

pub const OUTPUT_DIR_ENV: &str = "HOLDERFORMS_OUTPUT_DIR";

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, format!("{v} must be positive and finite")))
    }
}

fn open_unit(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(bad(key, format!("{v} not in (0, 1)")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub slack: Option<f64>,
    pub sigma: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub svg: Option<bool>,
    pub form: Option<FormSpec>,
    pub disks: Option<FamilySpec>,
    pub mollify: Option<MollifyConfig>,
    pub stokes: Option<StokesConfig>,
    pub isoperimetric: Option<IsoperimetricConfig>,
    pub criteria: Option<CriteriaConfig>,
    pub decay: Option<DecayConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| bad("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn slack(&self) -> Result<f64> {
        let s = self.slack.unwrap_or(DEFAULT_SLACK);
        if s >= 1.0 && s.is_finite() {
            Ok(s)
        } else {
            Err(bad("slack", format!("{s} must be at least 1")))
        }
    }

    pub fn sigma(&self) -> Result<f64> {
        positive("sigma", self.sigma.unwrap_or(DEFAULT_SIGMA))
    }

    pub fn form(&self) -> Result<&FormSpec> {
        self.form.as_ref().ok_or_else(|| {
            bad(
                "form",
                "missing form spec: add a [form] table (kind = \"weierstrass\", ...)",
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Dx,
    Dy,
}

/// A sampled 1-form on the unit torus or on a box.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FormSpec {
    /// `c·W_θ(x) dy` (or `dx`) on the periodic unit square.
    Weierstrass {
        theta: Option<f64>,
        base: Option<u32>,
        terms: Option<u32>,
        nx: Option<usize>,
        ny: Option<usize>,
        component: Option<Component>,
        scale: Option<f64>,
    },
    /// `dy` on the periodic unit square.
    ExactDy { nodes: Option<usize>, theta: Option<f64> },
    /// `x dy` on `[lo, hi]²`.
    AreaForm {
        nodes: Option<usize>,
        lo: Option<f64>,
        hi: Option<f64>,
        theta: Option<f64>,
    },
    /// Components read from grid CSV files.
    Files { a1: PathBuf, a2: PathBuf, theta: f64 },
}

impl FormSpec {
    pub fn theta(&self) -> f64 {
        match self {
            FormSpec::Weierstrass { theta, .. }
            | FormSpec::ExactDy { theta, .. }
            | FormSpec::AreaForm { theta, .. } => theta.unwrap_or(0.5),
            FormSpec::Files { theta, .. } => *theta,
        }
    }

    pub fn with_theta(&self, t: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            FormSpec::Weierstrass { theta, .. }
            | FormSpec::ExactDy { theta, .. }
            | FormSpec::AreaForm { theta, .. } => *theta = Some(t),
            FormSpec::Files { theta, .. } => *theta = t,
        }
        out
    }

    pub fn build(&self) -> Result<OneForm> {
        let theta = open_unit("form.theta", self.theta())?;
        match self {
            FormSpec::Weierstrass {
                base,
                terms,
                nx,
                ny,
                component,
                scale,
                ..
            } => {
                let w = make_weierstrass_2d(
                    theta,
                    base.unwrap_or(2),
                    terms.unwrap_or(8),
                    nx.unwrap_or(4097),
                    ny.unwrap_or(65),
                )
                .map_err(|e| bad("form", e.to_string()))?;
                let w = w.scaled(scale.unwrap_or(1.0));
                let z = w.scaled(0.0);
                match component.unwrap_or(Component::Dy) {
                    Component::Dy => OneForm::new(z, w, theta),
                    Component::Dx => OneForm::new(w, z, theta),
                }
            }
            FormSpec::ExactDy { nodes, .. } => {
                let ax = Axis::periodic(0.0, 1.0, nodes.unwrap_or(65)).map_err(|e| bad("form.nodes", e.to_string()))?;
                let a1 = GridField::from_fn(vec![ax, ax], |_| 0.0)?;
                let a2 = GridField::from_fn(vec![ax, ax], |_| 1.0)?;
                OneForm::new(a1, a2, theta)
            }
            FormSpec::AreaForm { nodes, lo, hi, .. } => {
                let ax = Axis::closed(lo.unwrap_or(-2.0), hi.unwrap_or(2.0), nodes.unwrap_or(257))
                    .map_err(|e| bad("form", e.to_string()))?;
                let a1 = GridField::from_fn(vec![ax, ax], |_| 0.0)?;
                let a2 = GridField::from_fn(vec![ax, ax], |p| p[0])?;
                OneForm::new(a1, a2, theta)
            }
            FormSpec::Files { a1, a2, .. } => OneForm::new(GridField::read_csv(a1)?, GridField::read_csv(a2)?, theta),
        }
    }
}

/// A family of test disks.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Squares of side `2^{−j}`, `j_min ≤ j ≤ j_max`, sharing one corner.
    Dyadic {
        corner: Option<Point>,
        j_min: Option<i32>,
        j_max: Option<i32>,
    },
    Explicit {
        items: Vec<ParamDisk>,
    },
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Dyadic {
            corner: None,
            j_min: None,
            j_max: None,
        }
    }
}

impl FamilySpec {
    /// Disks plus, for dyadic families, their side lengths.
    pub fn build(&self) -> Result<(Vec<ParamDisk>, Option<Vec<f64>>)> {
        match self {
            FamilySpec::Dyadic { corner, j_min, j_max } => {
                let (lo, hi) = (j_min.unwrap_or(2), j_max.unwrap_or(8));
                if lo > hi || lo < 0 || hi > 30 {
                    return Err(bad(
                        "disks.j_min",
                        format!("need 0 ≤ j_min ≤ j_max ≤ 30, got {lo}..{hi}"),
                    ));
                }
                let (r, d): (Vec<f64>, Vec<ParamDisk>) =
                    crate::inequality::dyadic_squares(corner.unwrap_or([0.0, 0.0]), lo..=hi)
                        .into_iter()
                        .unzip();
                Ok((d, Some(r)))
            }
            FamilySpec::Explicit { items } => {
                if items.is_empty() {
                    return Err(bad("disks.items", "empty family"));
                }
                Ok((items.clone(), None))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifyConfig {
    pub theta: Option<f64>,
    pub base: Option<u32>,
    pub terms: Option<u32>,
    pub resolution: Option<usize>,
    pub epsilons: Option<Vec<f64>>,
    pub random_fields: Option<usize>,
}

impl MollifyConfig {
    pub fn epsilons(&self) -> Result<Vec<f64>> {
        let e = self.epsilons.clone().unwrap_or_else(|| vec![0.02, 0.05, 0.1]);
        if e.is_empty() {
            return Err(bad("mollify.epsilons", "empty list"));
        }
        for &v in &e {
            positive("mollify.epsilons", v)?;
            if v >= 0.5 {
                return Err(bad(
                    "mollify.epsilons",
                    format!("{v} must be below 0.5 on the unit interval"),
                ));
            }
        }
        Ok(e)
    }

    pub fn theta(&self) -> Result<f64> {
        let t = self.theta.unwrap_or(0.5);
        if t > 0.0 && t <= 1.0 {
            Ok(t)
        } else {
            Err(bad("mollify.theta", format!("{t} not in (0, 1]")))
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StokesConfig {
    pub epsilon: Option<f64>,
    pub disk: Option<ParamDisk>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoperimetricConfig {
    pub polygons: Option<usize>,
    pub vertices: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaConfig {
    /// Row-major integer entries of a square matrix.
    pub matrix: Option<Vec<i64>>,
    pub theta: Option<f64>,
    pub ell: Option<usize>,
    pub extra_center_dims: Option<usize>,
}

impl CriteriaConfig {
    pub fn theta(&self) -> Result<f64> {
        open_unit("criteria.theta", self.theta.unwrap_or(0.5))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub matrix: Option<[[f64; 2]; 2]>,
    pub theta: Option<f64>,
    pub corner: Option<Point>,
    pub unstable: Option<f64>,
    pub stable: Option<f64>,
    pub k_min: Option<u32>,
    pub k_max: Option<u32>,
    pub c1: Option<f64>,
    /// Corner of the dyadic family that fixes the empirical K.
    pub calibration_corner: Option<Point>,
    pub calibration_j_min: Option<i32>,
    pub calibration_j_max: Option<i32>,
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        positive("decay.unstable", self.unstable.unwrap_or(0.1))?;
        positive("decay.stable", self.stable.unwrap_or(0.1))?;
        positive("decay.c1", self.c1.unwrap_or(1.0))?;
        if self.k_min.unwrap_or(0) > self.k_max.unwrap_or(12) {
            return Err(bad("decay.k_min", "exceeds k_max"));
        }
        if self.k_max.unwrap_or(12) > 60 {
            return Err(bad("decay.k_max", "at most 60"));
        }
        if let Some(t) = self.theta {
            open_unit("decay.theta", t)?;
        }
        Ok(())
    }
}
