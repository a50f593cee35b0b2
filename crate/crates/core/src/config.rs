//! Scenario files: layers, interfaces, load, sampling grid and quadrature
//! settings in TOML.
//!
//! ```toml
//! interfaces = [0.0, 0.5]
//! layers = [
//!     { lame_lambda = 1.0, lame_mu = 1.0, c1 = 1.7320508, c2 = 1.0 },
//!     { lame_lambda = 0.5, lame_mu = 0.5, c1 = 1.2247449, c2 = 0.7071068 },
//! ]
//! load = { type = "pulse", amplitude = 1.0, center = 0.0, width = 1.0, duration = 3.0 }
//!
//! [grid]
//! x = { from = 0.0, to = 1.0, count = 11 }
//! y = { from = -1.0, to = 1.0, count = 11 }
//! t = [0.0, 0.25, 0.5, 0.75, 1.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elastic::{ElasticError, ElasticLayer, ElasticScenario, GridSpec, KernelSpec, Load, SolverSpec};
use crate::linalg::c;
use crate::medium::{dirichlet_boundary, CouplingSet, MediumStack};
use crate::transform::{PiecewiseField, Profile, QuadratureSpec, Term};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Elastic(#[from] ElasticError),
}

/// Sample positions, listed or evenly spaced with both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { from: f64, to: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::List(ref v) => v.clone(),
            Axis::Range { from, count: 1, .. } => vec![from],
            Axis::Range { from, to, count } => (0..count).map(|i| from + (to - from) * i as f64 / (count - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: Axis,
    pub y: Axis,
    pub t: Axis,
}

impl GridConfig {
    pub fn spec(&self) -> GridSpec {
        GridSpec { x: self.x.values(), y: self.y.values(), t: self.t.values() }
    }
}

/// Quadrature settings; unset fields keep the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub lambda_max: Option<f64>,
    pub epsilon: Option<f64>,
    pub panel_tol: Option<f64>,
    pub max_panels: Option<usize>,
    pub contour_panels: Option<usize>,
    /// Relative level of `|p̄|` where the `ξ` integral stops.
    pub xi_level: Option<f64>,
    /// Upper limit of the homogeneous-kernel integral.
    pub eta_max: Option<f64>,
}

impl QuadratureConfig {
    /// Settings of a standalone transform.
    pub fn transform(&self) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        QuadratureSpec {
            lambda_max: self.lambda_max.unwrap_or(d.lambda_max),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            panel_tol: self.panel_tol.unwrap_or(d.panel_tol),
            max_panels: self.max_panels.unwrap_or(d.max_panels),
            contour_panels: self.contour_panels.unwrap_or(d.contour_panels),
            ..d
        }
    }

    pub fn solver(&self) -> SolverSpec {
        let d = SolverSpec::default();
        let t = d.transform;
        SolverSpec {
            transform: QuadratureSpec {
                lambda_max: self.lambda_max.unwrap_or(t.lambda_max),
                epsilon: self.epsilon.unwrap_or(t.epsilon),
                panel_tol: self.panel_tol.unwrap_or(t.panel_tol),
                max_panels: self.max_panels.unwrap_or(t.max_panels),
                contour_panels: self.contour_panels.unwrap_or(t.contour_panels),
                ..t
            },
            xi_level: self.xi_level.unwrap_or(d.xi_level),
        }
    }

    pub fn kernel(&self) -> KernelSpec {
        let d = KernelSpec::default();
        KernelSpec { eta_max: self.eta_max.unwrap_or(d.eta_max), ..d }
    }
}

/// Surface rows used by the transform commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    /// Traction-free surface of the elastic problem.
    #[default]
    Traction,
    /// `y(l0) = 0`, the classical sine-transform setting.
    Dirichlet,
}

/// Scalar profile of a test field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Gaussian { center: f64, width: f64 },
    ExpMonomial { x0: f64, power: usize, rate: f64 },
    Bump { center: f64, half_width: f64, power: usize },
}

impl ProfileConfig {
    pub fn profile(&self) -> Profile {
        match *self {
            ProfileConfig::Gaussian { center, width } => Profile::gaussian(center, width),
            ProfileConfig::ExpMonomial { x0, power, rate } => Profile::exp_monomial(x0, power, rate),
            ProfileConfig::Bump { center, half_width, power } => Profile::bump(center, half_width, power),
        }
    }
}

fn default_samples() -> usize {
    100
}

/// Test field `weights · profile(x)` for the `roundtrip` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundtripConfig {
    #[serde(default)]
    pub xi: f64,
    #[serde(default)]
    pub surface: Surface,
    pub profile: ProfileConfig,
    pub weights: [f64; 2],
    /// Samples are spread evenly over `(l0, x_max)`.
    pub x_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Relative error accepted by the command.
    #[serde(default = "default_roundtrip_tolerance")]
    pub tolerance: f64,
}

fn default_roundtrip_tolerance() -> f64 {
    1e-3
}

/// Samples of `u` and `u*` for the `spectrum` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub xi: f64,
    #[serde(default)]
    pub surface: Surface,
    pub lambda: Axis,
    pub x: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub layers: Vec<ElasticLayer>,
    pub interfaces: Vec<f64>,
    #[serde(default = "Load::zero")]
    pub load: Load,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub roundtrip: Option<RoundtripConfig>,
    pub spectrum: Option<SpectrumConfig>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The scenario, with the load checked.
    pub fn scenario(&self) -> Result<ElasticScenario, ConfigError> {
        self.load.validate()?;
        Ok(ElasticScenario::new(self.layers.clone(), self.interfaces.clone(), self.load.clone())?)
    }

    pub fn grid(&self) -> Result<GridSpec, ConfigError> {
        self.grid.as_ref().map(GridConfig::spec).ok_or_else(|| ConfigError::Invalid("the scenario has no [grid] section".into()))
    }
}

/// Medium and coupling at `ξ` with the requested surface rows.
pub fn transform_setting(scenario: &ElasticScenario, xi: f64, surface: Surface) -> Result<(MediumStack, CouplingSet), ConfigError> {
    let (medium, coupling) = scenario.build_coupling(xi)?;
    match surface {
        Surface::Traction => Ok((medium, coupling)),
        Surface::Dirichlet => {
            let c = CouplingSet::new(2, dirichlet_boundary(2), coupling.interfaces.clone()).map_err(ElasticError::from)?;
            Ok((medium, c))
        }
    }
}

impl RoundtripConfig {
    pub fn field(&self, medium: &MediumStack) -> PiecewiseField {
        let v = vec![c(self.weights[0], 0.0), c(self.weights[1], 0.0)];
        PiecewiseField::uniform(medium, vec![Term::new(v, self.profile.profile())])
    }

    /// Midpoints of `samples` equal cells of `(l0, x_max)`, minus points
    /// within `1e-3` of an interface.
    pub fn sample_points(&self, interfaces: &[f64]) -> Vec<f64> {
        let l0 = interfaces[0];
        let h = (self.x_max - l0) / self.samples as f64;
        (0..self.samples)
            .map(|i| l0 + (i as f64 + 0.5) * h)
            .filter(|x| interfaces.iter().all(|l| (x - l).abs() > 1e-3))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LAYER: &str = r#"
interfaces = [0.0, 0.5]
layers = [
    { lame_lambda = 1.0, lame_mu = 1.0, c1 = 1.7320508075688772, c2 = 1.0 },
    { lame_lambda = 0.5, lame_mu = 0.5, c1 = 1.224744871391589, c2 = 0.7071067811865476 },
]
load = { type = "pulse", amplitude = 1.0, center = 0.0, width = 1.0, duration = 3.0 }

[grid]
x = { from = 0.0, to = 1.0, count = 11 }
y = { from = -1.0, to = 1.0, count = 11 }
t = [0.0, 0.5, 1.0]

[quadrature]
lambda_max = 80.0
"#;

    #[test]
    fn parses_a_two_layer_scenario() {
        let cfg = ScenarioConfig::parse(TWO_LAYER).unwrap();
        let sc = cfg.scenario().unwrap();
        assert_eq!(sc.layers().len(), 2);
        let g = cfg.grid().unwrap();
        assert_eq!(g.x.len(), 11);
        assert!((g.x[10] - 1.0).abs() < 1e-15 && (g.y[5]).abs() < 1e-15);
        assert_eq!(cfg.quadrature.solver().transform.lambda_max, 80.0);
        assert_eq!(cfg.quadrature.solver().xi_level, SolverSpec::default().xi_level);
    }

    #[test]
    fn serialized_config_parses_back() {
        let cfg = ScenarioConfig::parse(TWO_LAYER).unwrap();
        assert_eq!(ScenarioConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_and_bad_syntax_are_parse_errors() {
        assert!(matches!(ScenarioConfig::parse("interfaces = [0.0]\nlayers = []\nspeed = 3"), Err(ConfigError::Parse(_))));
        assert!(matches!(ScenarioConfig::parse("interfaces = [0.0"), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn decreasing_interfaces_fail_validation() {
        let text = TWO_LAYER.replace("[0.0, 0.5]", "[0.5, 0.0]");
        let cfg = ScenarioConfig::parse(&text).unwrap();
        assert!(matches!(cfg.scenario(), Err(ConfigError::Elastic(_))));
    }

    #[test]
    fn sample_points_avoid_interfaces() {
        let rt = RoundtripConfig {
            xi: 0.5,
            surface: Surface::Traction,
            profile: ProfileConfig::Bump { center: 0.5, half_width: 0.3, power: 4 },
            weights: [1.0, 0.5],
            x_max: 1.0,
            samples: 10,
            tolerance: 1e-3,
        };
        let xs = rt.sample_points(&[0.0, 0.45]);
        assert_eq!(xs.len(), 9);
        assert!(xs.iter().all(|x| (x - 0.45f64).abs() > 1e-3));
    }
}
