//! Declarative experiment configuration, read from TOML.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{KerginError, Result};
use crate::geometry::{sample_ball, sample_sphere};
use crate::kergin::{KerginConfig, RulePolicy};
use crate::oracle::{builtin_oracle, FunctionOracle, OracleParams};
use crate::poly::{build_divergence_poly, CoeffValue, MultiPoly, PolyTerm};
use crate::scalar::{Exact, Scalar, C64};
use crate::space::{NormKind, Point};

pub const DEFAULT_MAX_DEGREE: usize = 8;
pub const DEFAULT_SAMPLE_COUNT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Interpolate,
    Remainder,
    Converge,
    Diverge,
    Certify,
    Validate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Interpolate => "interpolate",
            ExperimentKind::Remainder => "remainder",
            ExperimentKind::Converge => "converge",
            ExperimentKind::Diverge => "diverge",
            ExperimentKind::Certify => "certify",
            ExperimentKind::Validate => "validate",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluation strategy: symbolic rational arithmetic or floating point
/// with numerical derivatives and quadrature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Exact,
    #[default]
    Float,
}

/// One coordinate: a real number, a rational string, or a `[re, im]` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(CoeffValue),
    Pair([CoeffValue; 2]),
}

impl ComplexEntry {
    fn parts(&self) -> (CoeffValue, CoeffValue) {
        match self {
            ComplexEntry::Real(re) => (re.clone(), CoeffValue::Float(0.0)),
            ComplexEntry::Pair([re, im]) => (re.clone(), im.clone()),
        }
    }

    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        let (re, im) = self.parts();
        let (re, im) = (re.to_ratio()?, im.to_ratio()?);
        Ok(S::from_ratio(&re) + S::from_ratio(&im) * S::from_complex(C64::new(0.0, 1.0)))
    }
}

pub fn entries_to_point<S: Scalar>(entries: &[ComplexEntry]) -> Result<Point<S>> {
    let coords = entries.iter().map(|e| e.to_scalar()).collect::<Result<Vec<S>>>()?;
    Point::new(coords)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleName {
    #[default]
    RationalPole,
    ExpLinear,
    Poly,
    /// `Σ_{n=1}^{d} n! x_1 ... x_n`.
    Divergence,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    pub kind: OracleName,
    pub u: Option<Vec<ComplexEntry>>,
    /// Norm in which the domain ball of `rational_pole` is measured;
    /// defaults to the experiment norm.
    pub norm: Option<NormKind>,
    pub terms: Vec<PolyTerm>,
}

/// A finite point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSpec {
    Explicit {
        points: Vec<Vec<ComplexEntry>>,
    },
    /// `e_{offset+1}, ..., e_{offset+count}`.
    BasisPrefix {
        count: usize,
        #[serde(default)]
        offset: usize,
    },
    Origin,
    /// Points on the sphere of the given radius, led by `±radius e_j`.
    Sphere {
        count: usize,
        radius: f64,
        seed: Option<u64>,
        #[serde(default = "yes")]
        complex: bool,
    },
    /// Points strictly inside the ball of the given radius.
    Ball {
        count: usize,
        radius: f64,
        seed: Option<u64>,
        #[serde(default = "yes")]
        complex: bool,
    },
}

fn yes() -> bool {
    true
}

impl PointSpec {
    /// Float points; sampled sets without their own seed use `default_seed`.
    pub fn float_points(&self, dim: usize, norm: NormKind, default_seed: u64) -> Result<Vec<Point<C64>>> {
        let points = match self {
            PointSpec::Explicit { points } => points
                .iter()
                .map(|p| entries_to_point::<C64>(p))
                .collect::<Result<Vec<_>>>()?,
            PointSpec::Sphere {
                count,
                radius,
                seed,
                complex,
            } => {
                check_radius(*radius)?;
                sample_sphere(dim, *radius, norm, *count, *complex, seed.unwrap_or(default_seed))
            }
            PointSpec::Ball {
                count,
                radius,
                seed,
                complex,
            } => {
                check_radius(*radius)?;
                sample_ball(dim, *radius, norm, *count, *complex, seed.unwrap_or(default_seed))
            }
            PointSpec::BasisPrefix { .. } | PointSpec::Origin => {
                self.exact_points(dim)?.iter().map(Point::to_float).collect()
            }
        };
        check_points(points, dim)
    }

    /// Exact points; sampled sets have no exact form.
    pub fn exact_points(&self, dim: usize) -> Result<Vec<Point<Exact>>> {
        let points = match self {
            PointSpec::Explicit { points } => points
                .iter()
                .map(|p| entries_to_point::<Exact>(p))
                .collect::<Result<Vec<_>>>()?,
            PointSpec::BasisPrefix { count, offset } => {
                if offset + count > dim {
                    return Err(KerginError::Config(format!(
                        "basis_prefix needs e_{} but the dimension is {dim}",
                        offset + count
                    )));
                }
                (*offset..offset + count).map(|i| Point::basis(dim, i)).collect()
            }
            PointSpec::Origin => vec![Point::zeros(dim)],
            PointSpec::Sphere { .. } | PointSpec::Ball { .. } => {
                return Err(KerginError::Config(
                    "sampled point sets are floating point; use explicit points on the exact path".into(),
                ))
            }
        };
        check_points(points, dim)
    }

    /// Radius of the origin ball the sampled set lives in, if any.
    pub fn sample_radius(&self) -> Option<f64> {
        match self {
            PointSpec::Sphere { radius, .. } | PointSpec::Ball { radius, .. } => Some(*radius),
            _ => None,
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(KerginError::Config(format!(
            "sampling radius must be positive, got {radius}"
        )))
    }
}

fn check_points<S: Scalar>(points: Vec<Point<S>>, dim: usize) -> Result<Vec<Point<S>>> {
    if points.is_empty() {
        return Err(KerginError::Config("point set is empty".into()));
    }
    for p in &points {
        p.check_dim(dim).map_err(|e| KerginError::Config(e.to_string()))?;
    }
    Ok(points)
}

/// Generators and radii for the `certify` experiment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    /// Radius of the evaluation ball `V`.
    pub r: Option<f64>,
    /// Radius of the node ball `L`.
    pub r_prime: Option<f64>,
    /// Values of ρ to certify; the experiment ρ when empty.
    pub rho: Vec<f64>,
    /// Radius of the origin ball `U`.
    pub domain_radius: Option<f64>,
    /// Sphere samples per generator set.
    pub samples: Option<usize>,
    /// Explicit generators, overriding the sampled spheres.
    pub l: Option<PointSpec>,
    pub v: Option<PointSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
    /// File stem; the experiment name when absent.
    pub stem: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dimension: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
    pub rho: Option<f64>,
    #[serde(default)]
    pub norm: NormKind,
    pub path: Option<PathKind>,
    pub oracle: Option<OracleSpec>,
    pub nodes: Option<PointSpec>,
    pub points: Option<PointSpec>,
    #[serde(default)]
    pub kergin: KerginConfig,
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_max_degree() -> usize {
    DEFAULT_MAX_DEGREE
}

impl ExperimentConfig {
    /// A config with every optional section empty.
    pub fn new(experiment: ExperimentKind, dimension: usize) -> Self {
        ExperimentConfig {
            experiment,
            dimension,
            seed: 0,
            max_degree: DEFAULT_MAX_DEGREE,
            rho: None,
            norm: NormKind::default(),
            path: None,
            oracle: None,
            nodes: None,
            points: None,
            kergin: KerginConfig::default(),
            geometry: None,
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| KerginError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KerginError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(KerginError::Config("dimension must be at least 1".into()));
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(KerginError::Config(format!("rho must be positive, got {rho}")));
            }
        }
        Ok(())
    }

    /// Replaces the run seed; an automatic quadrature policy follows it.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let RulePolicy::Auto { seed: s } = &mut self.kergin.quadrature {
            *s = seed;
        }
        self
    }

    /// Hex SHA-256 of the canonical JSON form of the config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn path_or(&self, default: PathKind) -> PathKind {
        self.path.unwrap_or(default)
    }

    pub fn require_rho(&self) -> Result<f64> {
        self.rho
            .ok_or_else(|| KerginError::Config(format!("`{}` needs `rho`", self.experiment)))
    }

    pub fn oracle_spec(&self) -> Result<&OracleSpec> {
        self.oracle
            .as_ref()
            .ok_or_else(|| KerginError::Config(format!("`{}` needs an [oracle] section", self.experiment)))
    }

    pub fn float_oracle(&self) -> Result<FunctionOracle> {
        let spec = self.oracle_spec()?;
        let dim = self.dimension;
        if spec.kind == OracleName::Divergence {
            return Ok(FunctionOracle::polynomial(build_divergence_poly(dim)));
        }
        let u = spec.u.as_deref().map(entries_to_point::<C64>).transpose()?;
        if let Some(u) = &u {
            u.check_dim(dim).map_err(|e| KerginError::Config(e.to_string()))?;
        }
        let poly = match spec.kind {
            OracleName::Poly => Some(MultiPoly::from_records(dim, &spec.terms)?),
            _ => None,
        };
        let params = OracleParams {
            u,
            norm: spec.norm.unwrap_or(self.norm),
            poly,
        };
        let name = match spec.kind {
            OracleName::RationalPole => "rational_pole",
            OracleName::ExpLinear => "exp_linear",
            OracleName::Poly | OracleName::Divergence => "poly",
        };
        builtin_oracle(name, &params).map_err(|e| match e {
            KerginError::InvalidArgument(msg) => KerginError::Config(msg),
            other => other,
        })
    }

    /// The oracle as an exact polynomial; other oracles have no exact path.
    pub fn exact_poly(&self) -> Result<MultiPoly<Exact>> {
        let spec = self.oracle_spec()?;
        match spec.kind {
            OracleName::Divergence => Ok(build_divergence_poly(self.dimension)),
            OracleName::Poly => MultiPoly::from_records(self.dimension, &spec.terms),
            other => Err(KerginError::Config(format!(
                "the exact path needs a polynomial oracle, got {other:?}"
            ))),
        }
    }

    pub fn node_spec(&self) -> Result<&PointSpec> {
        self.nodes
            .as_ref()
            .ok_or_else(|| KerginError::Config(format!("`{}` needs a [nodes] section", self.experiment)))
    }

    pub fn point_spec(&self) -> Result<&PointSpec> {
        self.points
            .as_ref()
            .ok_or_else(|| KerginError::Config(format!("`{}` needs a [points] section", self.experiment)))
    }

    pub fn float_nodes(&self) -> Result<Vec<Point<C64>>> {
        self.node_spec()?.float_points(self.dimension, self.norm, self.seed)
    }

    pub fn float_eval_points(&self) -> Result<Vec<Point<C64>>> {
        self.point_spec()?
            .float_points(self.dimension, self.norm, self.seed.wrapping_add(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
experiment = "converge"
dimension = 2
seed = 11
rho = 8.0

[oracle]
kind = "rational_pole"
u = [1.0, [1.0, 0.0]]

[nodes]
kind = "ball"
count = 9
radius = 0.05

[points]
kind = "explicit"
points = [["1/40", 0.0], [[0.0, 0.01], -0.02]]

[kergin.derivative]
contour_radius = 0.5
nodes_per_circle = 32

[kergin.quadrature]
policy = "fixed"
rule = { kind = "gm", degree = 13 }
"#;

    #[test]
    fn parses_sample() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.max_degree, DEFAULT_MAX_DEGREE);
        assert_eq!(cfg.norm, NormKind::L1);
        let f = cfg.float_oracle().unwrap();
        assert_eq!(f.name(), "rational_pole");
        let nodes = cfg.float_nodes().unwrap();
        assert_eq!(nodes.len(), 9);
        assert!(nodes.iter().all(|p| p.norm(NormKind::L1) < 0.05));
        let pts = cfg.float_eval_points().unwrap();
        assert_eq!(pts[0].coords()[0], C64::new(0.025, 0.0));
        assert_eq!(pts[1].coords()[0], C64::new(0.0, 0.01));
        let exact = cfg.points.as_ref().unwrap().exact_points(2).unwrap();
        assert_eq!(exact[0].coords()[0], crate::scalar::exact(1, 40, 0, 1));
    }

    #[test]
    fn hash_tracks_seed() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.hash(), cfg.clone().hash());
        assert_ne!(cfg.hash(), cfg.clone().with_seed(12).hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml_str("experiment = \"converge\"\ndimension = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"sweep\"\ndimension = 2").is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"converge\"\ndimension = 2\nbogus = 1").is_err());
        let cfg = ExperimentConfig::new(ExperimentKind::Converge, 2);
        assert!(matches!(cfg.float_oracle(), Err(KerginError::Config(_))));
        let spec = PointSpec::BasisPrefix { count: 3, offset: 0 };
        assert!(spec.exact_points(2).is_err());
        let sampled = PointSpec::Ball {
            count: 3,
            radius: 0.1,
            seed: None,
            complex: true,
        };
        assert!(sampled.exact_points(2).is_err());
    }

    #[test]
    fn seed_override_reaches_auto_policy() {
        let cfg = ExperimentConfig::new(ExperimentKind::Interpolate, 2).with_seed(42);
        assert_eq!(cfg.kergin.quadrature, RulePolicy::Auto { seed: 42 });
    }
}
