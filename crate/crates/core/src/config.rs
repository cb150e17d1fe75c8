//! Experiment configuration: a single JSON document describing geometry,
//! materials, loads and the ε ladder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::ExpansionSetup;
use crate::error::{Error, Result};
use crate::geometry::{curve_from_shape, make_circle, ClosedCurve, CurveShape, NodePlacement, Point, ThicknessProfile};
use crate::kernels::{LameParams, MaterialTriple};
use crate::transmission::BackgroundField;

fn default_nodes() -> usize {
    128
}

fn default_seed() -> u64 {
    7
}

fn default_delta() -> f64 {
    1e-3
}

fn default_stride() -> usize {
    8
}

/// Random probes in the annulus `inner·R < |x - c| < outer·R` about the
/// curve's centroid `c`, with `R` its bounding radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub inner: f64,
    pub outer: f64,
    pub count: usize,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self { inner: 1.5, outer: 2.5, count: 32 }
    }
}

/// The circle `S` of radius `radius_factor·R` about the centroid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementCurveSpec {
    pub radius_factor: f64,
    #[serde(default = "default_nodes")]
    pub n_nodes: usize,
}

impl Default for MeasurementCurveSpec {
    fn default() -> Self {
        Self { radius_factor: 2.0, n_nodes: 128 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for JumpSpec {
    fn default() -> Self {
        Self { delta: default_delta(), stride: default_stride() }
    }
}

/// One experiment of a batch run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Solve,
    CertifyThm11,
    CertifyThm12,
    CheckJumps,
    CheckIdentities,
    OracleCompare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiments performed by a batch run, in order.
    #[serde(default)]
    pub tasks: Vec<Task>,
    pub curve: CurveShape,
    #[serde(default)]
    pub placement: NodePlacement,
    #[serde(default = "default_nodes")]
    pub n_nodes: usize,
    /// Node counts of the coated solves, one per ladder entry; empty means
    /// `n_nodes` throughout.
    #[serde(default)]
    pub nodes_per_epsilon: Vec<usize>,
    pub thickness: ThicknessProfile,
    pub materials: MaterialTriple,
    /// The load `H`.
    pub background: BackgroundField,
    /// The measurement load `F`; defaults to `H`.
    #[serde(default)]
    pub measurement: Option<BackgroundField>,
    /// Layer thickness for single solves.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub ladder: Vec<f64>,
    #[serde(default)]
    pub probes: ProbeSpec,
    #[serde(default)]
    pub measurement_curve: MeasurementCurveSpec,
    #[serde(default)]
    pub jumps: JumpSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<String>,
}

fn field(name: &str, e: impl std::fmt::Display) -> Error {
    Error::Invalid(format!("config field `{name}`: {e}"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field against the preconditions of the solvers.
    pub fn validate(&self) -> Result<()> {
        self.curve.validate().map_err(|e| field("curve", e))?;
        if self.n_nodes < 16 || self.n_nodes % 2 != 0 {
            return Err(field("n_nodes", format!("need an even count of at least 16, got {}", self.n_nodes)));
        }
        if !self.nodes_per_epsilon.is_empty() {
            if self.nodes_per_epsilon.len() != self.ladder.len() {
                return Err(field(
                    "nodes_per_epsilon",
                    format!("has {} entries but the ladder has {}", self.nodes_per_epsilon.len(), self.ladder.len()),
                ));
            }
            if let Some(n) = self.nodes_per_epsilon.iter().find(|n| **n < 16 || **n % 2 != 0) {
                return Err(field("nodes_per_epsilon", format!("need even counts of at least 16, got {n}")));
            }
        }
        self.thickness.validate().map_err(|e| field("thickness", e))?;
        self.checked_materials().map_err(|e| field("materials", e))?;
        self.background.validate().map_err(|e| field("background", e))?;
        if let Some(f) = &self.measurement {
            f.validate().map_err(|e| field("measurement", e))?;
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(field("epsilon", format!("must be positive, got {e}")));
            }
        }
        if self.ladder.iter().any(|e| !(*e > 0.0 && e.is_finite())) || self.ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(field("ladder", "values must be positive and strictly decreasing"));
        }
        let p = &self.probes;
        if !(p.inner > 1.0 && p.outer > p.inner && p.outer.is_finite()) || p.count == 0 {
            return Err(field("probes", "need 1 < inner < outer (multiples of the bounding radius) and count > 0"));
        }
        let s = &self.measurement_curve;
        if !(s.radius_factor > 1.0 && s.radius_factor.is_finite()) || s.n_nodes < 16 {
            return Err(field("measurement_curve", "need radius_factor > 1 and at least 16 nodes"));
        }
        if !(self.jumps.delta > 0.0 && self.jumps.delta < 0.1) || self.jumps.stride == 0 {
            return Err(field("jumps", "need 0 < delta < 0.1 and stride > 0"));
        }
        Ok(())
    }

    /// Equal phases are allowed; otherwise the contrast must be genuine.
    pub fn checked_materials(&self) -> Result<MaterialTriple> {
        let m = &self.materials;
        if m.background == m.core && m.background == m.layer {
            m.background.validate()?;
            Ok(MaterialTriple::trivial(m.background))
        } else {
            MaterialTriple::new(m.background, m.core, m.layer)
        }
    }

    pub fn base_curve(&self) -> Result<ClosedCurve> {
        self.curve_with(self.n_nodes)
    }

    pub fn curve_with(&self, n: usize) -> Result<ClosedCurve> {
        curve_from_shape(&self.curve, n, self.placement)
    }

    /// Seeded probes in the configured annulus.
    pub fn probe_points(&self, curve: &ClosedCurve) -> Vec<Point> {
        let (c, r) = (curve.nodes().centroid(), curve.bounding_radius());
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.probes.count)
            .map(|_| {
                let rho = r * rng.random_range(self.probes.inner..self.probes.outer);
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                c + Point::new(rho * t.cos(), rho * t.sin())
            })
            .collect()
    }

    /// `S`, centred at the origin so that it also encloses curves whose
    /// centroid is off the origin.
    pub fn measurement_surface(&self, curve: &ClosedCurve) -> Result<ClosedCurve> {
        let radius = self.measurement_curve.radius_factor * curve.bounding_radius() + curve.nodes().centroid().norm();
        make_circle(radius, self.measurement_curve.n_nodes)
    }

    pub fn measurement_field(&self) -> BackgroundField {
        self.measurement.clone().unwrap_or_else(|| self.background.clone())
    }

    pub fn expansion_setup(&self) -> Result<ExpansionSetup> {
        let base = self.base_curve()?;
        let probes = self.probe_points(&base);
        Ok(ExpansionSetup {
            materials: self.checked_materials()?,
            base,
            profile: self.thickness.clone(),
            background: self.background.clone(),
            probes,
            coated_nodes: self.nodes_per_epsilon.clone(),
        })
    }

    /// A smooth density for the jump checks.
    pub fn jump_density(curve: &ClosedCurve) -> Vec<crate::kernels::Vec2> {
        curve.nodes().points.iter().map(|x| crate::kernels::Vec2::new((x.x + 0.3 * x.y).cos(), x.x * x.y + 0.5)).collect()
    }

    /// The background material, checked.
    pub fn background_material(&self) -> Result<LameParams> {
        Ok(self.checked_materials()?.background)
    }
}
