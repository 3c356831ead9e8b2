//! Holomorphic functions the interpolation code can evaluate.

use std::fmt;
use std::sync::Arc;

use crate::error::{KerginError, Result};
use crate::poly::MultiPoly;
use crate::scalar::C64;
use crate::space::{NormKind, Point};

/// Where a function is defined. Balls are open: the boundary is excluded.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    AllSpace,
    Ball {
        center: Point<C64>,
        radius: f64,
        norm: NormKind,
    },
}

impl DomainSpec {
    pub fn ball_at_origin(dim: usize, radius: f64, norm: NormKind) -> Self {
        DomainSpec::Ball {
            center: Point::zeros(dim),
            radius,
            norm,
        }
    }

    /// Signed distance from `x` to the boundary, measured in the ball's
    /// norm; positive inside, `+inf` for the whole space.
    pub fn distance_to_boundary(&self, x: &Point<C64>) -> Result<f64> {
        match self {
            DomainSpec::AllSpace => Ok(f64::INFINITY),
            DomainSpec::Ball { center, radius, norm } => Ok(radius - x.sub(center)?.norm(*norm)),
        }
    }

    pub fn contains(&self, x: &Point<C64>) -> bool {
        matches!(self.distance_to_boundary(x), Ok(d) if d > 0.0)
    }

    pub fn check(&self, x: &Point<C64>) -> Result<()> {
        let distance = self.distance_to_boundary(x)?;
        if distance > 0.0 {
            Ok(())
        } else {
            Err(KerginError::DomainViolation {
                point: x.to_string(),
                distance,
                context: None,
            })
        }
    }

    /// Ball parameters, if this is a ball centered at the origin.
    pub fn origin_ball(&self) -> Option<(f64, NormKind)> {
        match self {
            DomainSpec::Ball { center, radius, norm } if center.is_zero() => Some((*radius, *norm)),
            _ => None,
        }
    }
}

type Evaluator = Arc<dyn Fn(&Point<C64>) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum OracleKind {
    Polynomial(MultiPoly<C64>),
    /// `1 / (1 - <u, x>)`
    RationalPole {
        u: Point<C64>,
    },
    /// `exp(<u, x>)`
    ExpLinear {
        u: Point<C64>,
    },
    Custom {
        name: String,
        f: Evaluator,
    },
}

/// An evaluatable holomorphic function `C^d -> C` with its domain.
#[derive(Clone)]
pub struct FunctionOracle {
    dim: usize,
    kind: OracleKind,
    domain: DomainSpec,
}

impl FunctionOracle {
    pub fn polynomial(p: MultiPoly<C64>) -> Self {
        FunctionOracle {
            dim: p.dim(),
            kind: OracleKind::Polynomial(p),
            domain: DomainSpec::AllSpace,
        }
    }

    /// `1 / (1 - <u, x>)` on the open ball `||x|| < 1 / ||u||_*`, where
    /// `||.||_*` is the dual of `norm`. On that ball `|<u, x>| < 1`.
    pub fn rational_pole(u: Point<C64>, norm: NormKind) -> Result<Self> {
        let dual = u.norm(norm.dual());
        if !(dual > 0.0 && dual.is_finite()) {
            return Err(KerginError::InvalidArgument(
                "rational_pole needs a nonzero finite direction u".into(),
            ));
        }
        Ok(FunctionOracle {
            dim: u.dim(),
            domain: DomainSpec::ball_at_origin(u.dim(), 1.0 / dual, norm),
            kind: OracleKind::RationalPole { u },
        })
    }

    pub fn exp_linear(u: Point<C64>) -> Self {
        FunctionOracle {
            dim: u.dim(),
            kind: OracleKind::ExpLinear { u },
            domain: DomainSpec::AllSpace,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        domain: DomainSpec,
        f: impl Fn(&Point<C64>) -> C64 + Send + Sync + 'static,
    ) -> Self {
        FunctionOracle {
            dim,
            kind: OracleKind::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
            domain,
        }
    }

    /// Replaces the declared domain (e.g. to restrict an entire function
    /// to a ball for a convergence experiment).
    pub fn with_domain(mut self, domain: DomainSpec) -> Self {
        self.domain = domain;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            OracleKind::Polynomial(_) => "poly",
            OracleKind::RationalPole { .. } => "rational_pole",
            OracleKind::ExpLinear { .. } => "exp_linear",
            OracleKind::Custom { name, .. } => name,
        }
    }

    pub fn as_polynomial(&self) -> Option<&MultiPoly<C64>> {
        match &self.kind {
            OracleKind::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    /// Whether derivatives can be taken symbolically.
    pub fn exact_derivatives(&self) -> bool {
        self.as_polynomial().is_some()
    }

    pub fn eval(&self, x: &Point<C64>) -> Result<C64> {
        x.check_dim(self.dim)?;
        self.domain.check(x)?;
        self.eval_unchecked(x)
    }

    /// Evaluation without the domain test, for callers that already
    /// certified the point.
    pub(crate) fn eval_unchecked(&self, x: &Point<C64>) -> Result<C64> {
        Ok(match &self.kind {
            OracleKind::Polynomial(p) => p.eval(x)?,
            OracleKind::RationalPole { u } => C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - u.dot(x)?),
            OracleKind::ExpLinear { u } => u.dot(x)?.exp(),
            OracleKind::Custom { f, .. } => f(x),
        })
    }
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("name", &self.name())
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Free-function form of [`FunctionOracle::eval`].
pub fn eval(oracle: &FunctionOracle, x: &Point<C64>) -> Result<C64> {
    oracle.eval(x)
}

/// Parameters accepted by [`builtin_oracle`].
#[derive(Clone, Debug, Default)]
pub struct OracleParams {
    pub u: Option<Point<C64>>,
    pub norm: NormKind,
    pub poly: Option<MultiPoly<C64>>,
}

/// Looks up one of the named test functions: `rational_pole`,
/// `exp_linear`, or `poly`.
pub fn builtin_oracle(name: &str, params: &OracleParams) -> Result<FunctionOracle> {
    let need_u = || {
        params
            .u
            .clone()
            .ok_or_else(|| KerginError::InvalidArgument(format!("`{name}` needs a direction `u`")))
    };
    match name {
        "rational_pole" => FunctionOracle::rational_pole(need_u()?, params.norm),
        "exp_linear" => Ok(FunctionOracle::exp_linear(need_u()?)),
        "poly" => params
            .poly
            .clone()
            .map(FunctionOracle::polynomial)
            .ok_or_else(|| KerginError::InvalidArgument("`poly` needs polynomial terms".into())),
        other => Err(KerginError::UnknownOracle(other.to_string())),
    }
}
