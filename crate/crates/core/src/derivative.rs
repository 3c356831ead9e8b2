//! Higher directional derivatives `d^k f(a; v_0, ..., v_{k-1})`.
//!
//! Four routes are provided and cross-checked against each other:
//!
//! * [`dk_exact`]: symbolic, for polynomials, on either scalar path.
//! * [`dk_cauchy`]: trapezoid rule on the torus `T^k` applied to the Cauchy
//!   coefficient formula
//!   `d^k f(a; v) = r^{-k} ∫ f(a + r Σ v_j e^{2πi t_j}) e^{-2πi Σ t_j} dt`.
//!   Cost `m^k` evaluations.
//! * [`dk_polarized`]: the polarization identity turns the mixed derivative
//!   into `2^k - 1` pure derivatives `D_u^k f(a)`, each a single-circle
//!   Cauchy integral. Cost `(2^k - 1) m` evaluations.
//! * [`dk_fd`]: nested central differences, a low-accuracy independent check.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{KerginError, Result};
use crate::oracle::{DomainSpec, FunctionOracle};
use crate::poly::MultiPoly;
use crate::scalar::{Scalar, C64};
use crate::space::{NormKind, Point};

/// Contour nodes must stay inside the domain even when the radius is
/// inflated by `1 / CONTOUR_SAFETY`.
pub const CONTOUR_SAFETY: f64 = 0.9;
const BISECTION_STEPS: usize = 30;
pub const MIN_NODES_PER_CIRCLE: usize = 16;
pub const DEFAULT_FD_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    Exact,
    Cauchy,
    Polarized,
    FiniteDifference,
}

impl DerivativeMethod {
    pub fn label(self) -> &'static str {
        match self {
            DerivativeMethod::Exact => "exact",
            DerivativeMethod::Cauchy => "cauchy",
            DerivativeMethod::Polarized => "polarized",
            DerivativeMethod::FiniteDifference => "fd",
        }
    }
}

/// Tuning knobs shared by every derivative evaluation in a run. `None`
/// fields fall back to the documented defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DerivativeSettings {
    pub method: Option<DerivativeMethod>,
    pub contour_radius: Option<f64>,
    pub nodes_per_circle: Option<usize>,
    pub fd_step: f64,
}

impl Default for DerivativeSettings {
    fn default() -> Self {
        DerivativeSettings {
            method: None,
            contour_radius: None,
            nodes_per_circle: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

impl DerivativeSettings {
    pub fn with_method(method: DerivativeMethod) -> Self {
        DerivativeSettings {
            method: Some(method),
            ..Default::default()
        }
    }

    /// Method actually used for `f`: the configured one, or the most
    /// accurate applicable one (exact for polynomials, polarized otherwise).
    pub fn resolve_method(&self, f: &FunctionOracle) -> DerivativeMethod {
        self.method.unwrap_or_else(|| select_method(f))
    }

    /// Short provenance string, e.g. `polarized(m=32,r=0.5)`.
    pub fn describe(&self, f: &FunctionOracle) -> String {
        let method = self.resolve_method(f);
        match method {
            DerivativeMethod::Exact => "exact".into(),
            DerivativeMethod::FiniteDifference => format!("fd(h={})", self.fd_step),
            DerivativeMethod::Cauchy | DerivativeMethod::Polarized => {
                let m = self.nodes_per_circle.unwrap_or_else(|| default_nodes_per_circle(f));
                let r = match self.contour_radius {
                    Some(r) => r.to_string(),
                    None => "auto".into(),
                };
                format!("{}(m={m},r={r})", method.label())
            }
        }
    }
}

/// One evaluation of `d^k f(base; directions)`.
#[derive(Clone, Debug)]
pub struct DerivativeRequest {
    pub base: Point<C64>,
    pub directions: Vec<Point<C64>>,
    pub settings: DerivativeSettings,
}

impl DerivativeRequest {
    pub fn new(base: Point<C64>, directions: Vec<Point<C64>>) -> Result<Self> {
        if directions.is_empty() {
            return Err(KerginError::InvalidArgument(
                "a derivative request needs at least one direction".into(),
            ));
        }
        for v in &directions {
            v.check_dim(base.dim())?;
        }
        Ok(DerivativeRequest {
            base,
            directions,
            settings: DerivativeSettings::default(),
        })
    }

    pub fn with_settings(mut self, settings: DerivativeSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn method(mut self, method: DerivativeMethod) -> Self {
        self.settings.method = Some(method);
        self
    }

    pub fn contour_radius(mut self, r: f64) -> Self {
        self.settings.contour_radius = Some(r);
        self
    }

    pub fn nodes_per_circle(mut self, m: usize) -> Self {
        self.settings.nodes_per_circle = Some(m);
        self
    }

    pub fn fd_step(mut self, h: f64) -> Self {
        self.settings.fd_step = h;
        self
    }

    pub fn order(&self) -> usize {
        self.directions.len()
    }
}

/// Preferred method for an oracle: exact > polarized.
pub fn select_method(f: &FunctionOracle) -> DerivativeMethod {
    if f.exact_derivatives() {
        DerivativeMethod::Exact
    } else {
        DerivativeMethod::Polarized
    }
}

/// `max(16, deg + 1)` for polynomials, 16 otherwise. The trapezoid rule
/// with `m` nodes recovers Taylor coefficients exactly when the integrand
/// has no frequencies aliasing onto the one extracted.
pub fn default_nodes_per_circle(f: &FunctionOracle) -> usize {
    match f.as_polynomial().and_then(MultiPoly::degree) {
        Some(deg) => MIN_NODES_PER_CIRCLE.max(deg as usize + 1),
        None => MIN_NODES_PER_CIRCLE,
    }
}

/// Dispatches on the request's method (or the oracle's preferred one).
pub fn dk(f: &FunctionOracle, req: &DerivativeRequest) -> Result<C64> {
    match req.settings.resolve_method(f) {
        DerivativeMethod::Exact => {
            let p = f.as_polynomial().ok_or_else(|| {
                KerginError::InvalidArgument(format!(
                    "exact derivatives need a polynomial oracle, got `{}`",
                    f.name()
                ))
            })?;
            dk_exact(p, &req.base, &req.directions)
        }
        DerivativeMethod::Cauchy => dk_cauchy(f, req),
        DerivativeMethod::Polarized => dk_polarized(f, req),
        DerivativeMethod::FiniteDifference => dk_fd(f, req),
    }
}

/// Iterates [`MultiPoly::derive`] over the directions and evaluates at `a`.
pub fn dk_exact<S: Scalar>(p: &MultiPoly<S>, a: &Point<S>, directions: &[Point<S>]) -> Result<S> {
    a.check_dim(p.dim())?;
    p.derive_along(directions)?.eval(a)
}

fn unit_roots(m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| C64::from_polar(1.0, TAU * j as f64 / m as f64))
        .collect()
}

fn resolve_nodes(f: &FunctionOracle, req: &DerivativeRequest) -> Result<usize> {
    let m = req
        .settings
        .nodes_per_circle
        .unwrap_or_else(|| default_nodes_per_circle(f));
    if m < 2 {
        return Err(KerginError::InvalidArgument(format!(
            "nodes per circle must be >= 2, got {m}"
        )));
    }
    Ok(m)
}

/// Shape of the contour set whose extent limits the radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContourShape {
    /// Torus: nodes `a + r Σ_j v_j ω_j`, extent `Σ ||v_j||`.
    Torus,
    /// Union of circles `a + r u_ε ω` over subset sums `u_ε`.
    SubsetCircles,
}

fn contour_extent(domain: &DomainSpec, directions: &[Point<C64>], shape: ContourShape) -> Result<f64> {
    let norm = match domain {
        DomainSpec::AllSpace => return Ok(0.0),
        DomainSpec::Ball { norm, .. } => *norm,
    };
    Ok(match shape {
        ContourShape::Torus => directions.iter().map(|v| v.norm(norm)).sum(),
        ContourShape::SubsetCircles => {
            let mut widest: f64 = 0.0;
            for mask in 1..(1u64 << directions.len()) {
                widest = widest.max(subset_sum(directions, mask)?.norm(norm));
            }
            widest
        }
    })
}

/// Largest radius multiplier `r <= 1` such that the contour at `r / 0.9`
/// stays inside the domain (triangle-inequality bound), found by
/// bisection.
pub fn default_contour_radius(
    f: &FunctionOracle,
    base: &Point<C64>,
    directions: &[Point<C64>],
    shape: ContourShape,
) -> Result<f64> {
    let slack = f.domain().distance_to_boundary(base)?;
    if slack <= 0.0 {
        return Err(KerginError::DomainViolation {
            point: base.to_string(),
            distance: slack,
            context: Some("derivative base point".into()),
        });
    }
    let extent = contour_extent(f.domain(), directions, shape)?;
    let fits = |r: f64| extent * r / CONTOUR_SAFETY < slack;
    if fits(1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(KerginError::DomainViolation {
            point: base.to_string(),
            distance: slack,
            context: Some("no admissible contour radius".into()),
        });
    }
    Ok(lo)
}

fn resolve_radius(f: &FunctionOracle, req: &DerivativeRequest, shape: ContourShape) -> Result<f64> {
    match req.settings.contour_radius {
        Some(r) if r > 0.0 && r.is_finite() => Ok(r),
        Some(r) => Err(KerginError::InvalidArgument(format!(
            "contour radius must be positive, got {r}"
        ))),
        None => default_contour_radius(f, &req.base, &req.directions, shape),
    }
}

fn subset_sum(directions: &[Point<C64>], mask: u64) -> Result<Point<C64>> {
    let mut u = Point::zeros(directions[0].dim());
    for (j, v) in directions.iter().enumerate() {
        if mask & (1 << j) != 0 {
            u = u.add(v)?;
        }
    }
    Ok(u)
}

/// Checks every node before any evaluation so a violation is reported at
/// the first offending node rather than half-way through a sum.
fn check_nodes<'a>(f: &FunctionOracle, nodes: impl Iterator<Item = &'a Point<C64>>) -> Result<()> {
    for (i, node) in nodes.enumerate() {
        f.domain()
            .check(node)
            .map_err(|e| e.with_context(format!("contour node {i}")))?;
    }
    Ok(())
}

/// Tensor-product trapezoid rule on `T^k` with the phase factor
/// `e^{-2πi Σ t_j}`.
pub fn dk_cauchy(f: &FunctionOracle, req: &DerivativeRequest) -> Result<C64> {
    let m = resolve_nodes(f, req)?;
    let r = resolve_radius(f, req, ContourShape::Torus)?;
    let k = req.order();
    let roots = unit_roots(m);
    let scaled: Vec<Point<C64>> = req.directions.iter().map(|v| v.scale(&C64::new(r, 0.0))).collect();

    let total = m
        .checked_pow(k as u32)
        .ok_or_else(|| KerginError::InvalidArgument(format!("tensor grid {m}^{k} is too large")))?;
    let mut nodes = Vec::with_capacity(total);
    let mut phases = Vec::with_capacity(total);
    let mut index = vec![0usize; k];
    for _ in 0..total {
        let mut p = req.base.clone();
        for (v, &j) in scaled.iter().zip(&index) {
            p = p.axpy(&roots[j], v)?;
        }
        let phase_index = (m - index.iter().sum::<usize>() % m) % m;
        nodes.push(p);
        phases.push(roots[phase_index]);
        for digit in index.iter_mut() {
            *digit += 1;
            if *digit < m {
                break;
            }
            *digit = 0;
        }
    }
    check_nodes(f, nodes.iter())?;
    let mut acc = C64::new(0.0, 0.0);
    for (node, phase) in nodes.iter().zip(&phases) {
        acc += f.eval_unchecked(node)? * phase;
    }
    Ok(acc / (total as f64 * r.powi(k as i32)))
}

/// Polarization identity
/// `d^k f(a; v) = (1/k!) Σ_{ε ≠ 0} (-1)^{k-|ε|} D^k_{u_ε} f(a)`,
/// with each `D^k_u f(a) = k! r^{-k} (1/m) Σ_j f(a + r u ω^j) ω^{-jk}`.
pub fn dk_polarized(f: &FunctionOracle, req: &DerivativeRequest) -> Result<C64> {
    let m = resolve_nodes(f, req)?;
    let r = resolve_radius(f, req, ContourShape::SubsetCircles)?;
    let k = req.order();
    if k >= 63 {
        return Err(KerginError::InvalidArgument(format!(
            "order {k} too large for polarization"
        )));
    }
    let roots = unit_roots(m);
    let mut circles = Vec::with_capacity((1 << k) - 1);
    for mask in 1u64..(1u64 << k) {
        let u = subset_sum(&req.directions, mask)?.scale(&C64::new(r, 0.0));
        let nodes = roots.iter().map(|w| req.base.axpy(w, &u)).collect::<Result<Vec<_>>>()?;
        let sign = if (k - mask.count_ones() as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        circles.push((sign, nodes));
    }
    check_nodes(f, circles.iter().flat_map(|(_, nodes)| nodes.iter()))?;

    let mut acc = C64::new(0.0, 0.0);
    for (sign, nodes) in &circles {
        let mut circle = C64::new(0.0, 0.0);
        for (j, node) in nodes.iter().enumerate() {
            circle += f.eval_unchecked(node)? * roots[(m - (j * k) % m) % m];
        }
        acc += circle * *sign;
    }
    Ok(acc / (m as f64 * r.powi(k as i32)))
}

/// Nested central differences, one level per direction. `h` is the step
/// length along each normalized direction; the result is rescaled by the
/// direction lengths, so short directions do not shrink the step.
pub fn dk_fd(f: &FunctionOracle, req: &DerivativeRequest) -> Result<C64> {
    let h = req.settings.fd_step;
    if !(h > 0.0 && h.is_finite()) {
        return Err(KerginError::InvalidArgument(format!(
            "fd step must be positive, got {h}"
        )));
    }
    let mut scale = 1.0;
    let mut units = Vec::with_capacity(req.directions.len());
    for v in &req.directions {
        let len = v.norm(NormKind::L2);
        if len == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        scale *= len;
        units.push(v.scale(&C64::new(1.0 / len, 0.0)));
    }
    Ok(central_difference(f, &req.base, &units, h)? * scale)
}

fn central_difference(f: &FunctionOracle, a: &Point<C64>, dirs: &[Point<C64>], h: f64) -> Result<C64> {
    match dirs.split_last() {
        None => f.eval(a),
        Some((last, rest)) => {
            let step = C64::new(h, 0.0);
            let plus = central_difference(f, &a.axpy(&step, last)?, rest, h)?;
            let minus = central_difference(f, &a.axpy(&-step, last)?, rest, h)?;
            Ok((plus - minus) / (2.0 * h))
        }
    }
}

/// `∫_{T^k} f(a + Σ_j r v_j e^{2πi t_j}) dt` on an `m^k` grid: the
/// Cauchy integral with the phase factor dropped. By the mean value
/// property this is `f(a)`, not a derivative; kept as a regression
/// reference for the phase-factor correction in [`dk_cauchy`].
pub fn torus_average(
    f: &FunctionOracle,
    base: &Point<C64>,
    directions: &[Point<C64>],
    m: usize,
    r: f64,
) -> Result<C64> {
    let k = directions.len();
    let roots = unit_roots(m);
    let total = m.pow(k as u32);
    let mut index = vec![0usize; k];
    let mut acc = C64::new(0.0, 0.0);
    for _ in 0..total {
        let mut p = base.clone();
        for (v, &j) in directions.iter().zip(&index) {
            p = p.axpy(&(roots[j] * r), v)?;
        }
        acc += f.eval(&p)?;
        for digit in index.iter_mut() {
            *digit += 1;
            if *digit < m {
                break;
            }
            *digit = 0;
        }
    }
    Ok(acc / total as f64)
}
