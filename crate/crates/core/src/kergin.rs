//! Kergin terms, interpolants and remainders.
//!
//! For nodes `p_0, ..., p_n` the degree-`n` Kergin interpolant at `x` is
//!
//! ```text
//! K_n f(x) = f(p_0) + Σ_{k=1}^{n} ∫_{S_k} d^k f(s_0 p_0 + ... + s_k p_k; x - p_0, ..., x - p_{k-1}) ds
//! ```
//!
//! and the remainder `f(x) - K_{k-1} f(x)` equals the same integral with
//! the last node `p_k` replaced by `x`.
//!
//! Polynomial integrands are handled symbolically: after differentiating,
//! the base point is substituted as a linear form in the barycentric
//! coordinates and every monomial is integrated with the Dirichlet
//! formula. On the exact scalar path this involves no rounding at all.

use serde::{Deserialize, Serialize};

use crate::derivative::{dk, dk_exact, DerivativeRequest, DerivativeSettings};
use crate::error::{KerginError, Result};
use crate::oracle::FunctionOracle;
use crate::poly::MultiPoly;
use crate::scalar::{Scalar, C64};
use crate::simplex::{build_rule, integrate_barycentric_poly, integrate_simplex, RuleKind};
use crate::space::{affine_point, Point};

/// Ordered interpolation nodes; repeats are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet<S> {
    points: Vec<Point<S>>,
}

impl<S: Scalar> NodeSet<S> {
    pub fn new(points: Vec<Point<S>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| KerginError::InvalidArgument("a node set needs at least one point".into()))?;
        let dim = first.dim();
        for p in &points {
            p.check_dim(dim)?;
        }
        Ok(NodeSet { points })
    }

    /// `e_1, ..., e_count` in dimension `dim`.
    pub fn basis_prefix(dim: usize, count: usize) -> Result<Self> {
        if count > dim {
            return Err(KerginError::InvalidArgument(format!(
                "cannot take {count} basis vectors in dimension {dim}"
            )));
        }
        Self::new((0..count).map(|i| Point::basis(dim, i)).collect())
    }

    pub fn repeated(point: Point<S>, count: usize) -> Result<Self> {
        Self::new(vec![point; count])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn to_float(&self) -> NodeSet<C64> {
        NodeSet {
            points: self.points.iter().map(Point::to_float).collect(),
        }
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.len() < needed {
            return Err(KerginError::InsufficientNodes {
                needed,
                available: self.len(),
            });
        }
        Ok(())
    }
}

/// How the simplex integral of each term is computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum RulePolicy {
    /// Closed form for polynomial oracles; otherwise Grundmann–Möller of
    /// degree 7 up to `k = 4` and Monte Carlo with 2·10⁴ samples above.
    Auto { seed: u64 },
    /// The same rule for every degree.
    Fixed { rule: RuleKind },
}

impl Default for RulePolicy {
    fn default() -> Self {
        RulePolicy::Auto { seed: 0 }
    }
}

pub const AUTO_GM_DEGREE: u32 = 7;
pub const AUTO_GM_MAX_K: usize = 4;
pub const AUTO_MC_SAMPLES: usize = 20_000;

impl RulePolicy {
    pub fn rule_for(&self, f: &FunctionOracle, k: usize) -> RuleKind {
        match self {
            RulePolicy::Fixed { rule } => *rule,
            RulePolicy::Auto { .. } if f.exact_derivatives() => RuleKind::ClosedForm,
            RulePolicy::Auto { .. } if k <= AUTO_GM_MAX_K => RuleKind::Gm { degree: AUTO_GM_DEGREE },
            RulePolicy::Auto { seed } => RuleKind::MonteCarlo {
                samples: AUTO_MC_SAMPLES,
                seed: seed.wrapping_add(k as u64),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KerginConfig {
    pub derivative: DerivativeSettings,
    pub quadrature: RulePolicy,
}

impl KerginConfig {
    pub fn new(derivative: DerivativeSettings, quadrature: RulePolicy) -> Self {
        KerginConfig { derivative, quadrature }
    }

    pub fn fixed_rule(rule: RuleKind) -> Self {
        KerginConfig {
            derivative: DerivativeSettings::default(),
            quadrature: RulePolicy::Fixed { rule },
        }
    }
}

/// One simplex integral together with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexTerm {
    pub value: C64,
    pub std_error: Option<f64>,
    pub provenance: String,
}

/// Per-degree line of a [`KerginReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct TermRecord<S> {
    pub k: usize,
    pub value: S,
    pub partial_sum: S,
    pub std_error: Option<f64>,
    pub provenance: String,
}

/// Terms `T_0, ..., T_n` and their running sums, in ascending `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct KerginReport<S> {
    pub terms: Vec<TermRecord<S>>,
}

impl<S: Scalar> KerginReport<S> {
    fn from_terms(terms: Vec<(S, Option<f64>, String)>) -> Self {
        let mut running = S::zero();
        let terms = terms
            .into_iter()
            .enumerate()
            .map(|(k, (value, std_error, provenance))| {
                running = running.clone() + value.clone();
                TermRecord {
                    k,
                    value,
                    partial_sum: running.clone(),
                    std_error,
                    provenance,
                }
            })
            .collect();
        KerginReport { terms }
    }

    /// `K_n f(x)`, the last partial sum.
    pub fn value(&self) -> S {
        self.terms.last().map(|t| t.partial_sum.clone()).unwrap_or_else(S::zero)
    }

    pub fn partial_sum(&self, n: usize) -> Option<&S> {
        self.terms.get(n).map(|t| &t.partial_sum)
    }

    /// Combined standard error of `K_n` (root sum of squares over the
    /// Monte Carlo terms up to `n`).
    pub fn std_error_through(&self, n: usize) -> Option<f64> {
        let errors: Vec<f64> = self.terms.iter().take(n + 1).filter_map(|t| t.std_error).collect();
        if errors.is_empty() {
            None
        } else {
            Some(errors.iter().map(|e| e * e).sum::<f64>().sqrt())
        }
    }
}

/// `∫_{S_k} d^k p(Σ_j s_j base_j; directions) ds` evaluated symbolically.
fn poly_simplex_integral<S: Scalar>(p: &MultiPoly<S>, base_points: &[Point<S>], directions: &[Point<S>]) -> Result<S> {
    let derived = p.derive_along(directions)?;
    if derived.is_zero() {
        return Ok(S::zero());
    }
    let bary_dim = base_points.len();
    let forms = (0..p.dim())
        .map(|i| {
            MultiPoly::from_terms(
                bary_dim,
                base_points.iter().enumerate().map(|(j, b)| {
                    let mut exps = vec![0; bary_dim];
                    exps[j] = 1;
                    (exps, b.coords()[i].clone())
                }),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(integrate_barycentric_poly(&derived.compose(&forms)?))
}

/// Base points and directions of a simplex integrand.
type Geometry<S> = (Vec<Point<S>>, Vec<Point<S>>);

fn term_geometry<S: Scalar>(nodes: &NodeSet<S>, x: &Point<S>, k: usize) -> Result<Geometry<S>> {
    nodes.require(k + 1)?;
    x.check_dim(nodes.dim())?;
    let base = nodes.points()[..=k].to_vec();
    let dirs = nodes.points()[..k]
        .iter()
        .map(|p| x.sub(p))
        .collect::<Result<Vec<_>>>()?;
    Ok((base, dirs))
}

fn remainder_geometry<S: Scalar>(nodes: &NodeSet<S>, x: &Point<S>, k: usize) -> Result<Geometry<S>> {
    if k == 0 {
        return Err(KerginError::InvalidArgument("remainder order must be >= 1".into()));
    }
    nodes.require(k)?;
    x.check_dim(nodes.dim())?;
    let mut base = nodes.points()[..k].to_vec();
    base.push(x.clone());
    let dirs = nodes.points()[..k]
        .iter()
        .map(|p| x.sub(p))
        .collect::<Result<Vec<_>>>()?;
    Ok((base, dirs))
}

/// Symbolic `T_k` for a polynomial; `T_0 = p(p_0)`.
pub fn poly_kergin_term<S: Scalar>(p: &MultiPoly<S>, nodes: &NodeSet<S>, x: &Point<S>, k: usize) -> Result<S> {
    if k == 0 {
        nodes.require(1)?;
        return p.eval(&nodes.points()[0]);
    }
    let (base, dirs) = term_geometry(nodes, x, k)?;
    poly_simplex_integral(p, &base, &dirs)
}

/// Symbolic `K_n p(x)` with its term report.
pub fn poly_kergin_interpolant<S: Scalar>(
    p: &MultiPoly<S>,
    nodes: &NodeSet<S>,
    x: &Point<S>,
    n: usize,
) -> Result<(S, KerginReport<S>)> {
    nodes.require(n + 1)?;
    let terms = (0..=n)
        .map(|k| Ok((poly_kergin_term(p, nodes, x, k)?, None, provenance_exact::<S>())))
        .collect::<Result<Vec<_>>>()?;
    let report = KerginReport::from_terms(terms);
    Ok((report.value(), report))
}

/// Symbolic remainder `R_k(x)` built from the first `k` nodes.
pub fn poly_kergin_remainder<S: Scalar>(p: &MultiPoly<S>, nodes: &NodeSet<S>, x: &Point<S>, k: usize) -> Result<S> {
    let (base, dirs) = remainder_geometry(nodes, x, k)?;
    poly_simplex_integral(p, &base, &dirs)
}

fn provenance_exact<S: Scalar>() -> String {
    if S::EXACT {
        "exact+closed_form(rational)".into()
    } else {
        "exact+closed_form".into()
    }
}

/// Simplex integral of `d^k f(a(s); directions)` for an arbitrary oracle,
/// where `a(s)` is the barycentric combination of `base_points`.
fn oracle_simplex_integral(
    f: &FunctionOracle,
    base_points: &[Point<C64>],
    directions: &[Point<C64>],
    cfg: &KerginConfig,
) -> Result<SimplexTerm> {
    let k = directions.len();
    let rule_kind = cfg.quadrature.rule_for(f, k);
    let provenance = format!("{}+{}", cfg.derivative.describe(f), rule_kind.label());
    if rule_kind == RuleKind::ClosedForm {
        let p = f.as_polynomial().ok_or_else(|| {
            KerginError::UnsupportedRule(format!(
                "closed-form integration needs a polynomial oracle, got `{}`",
                f.name()
            ))
        })?;
        return Ok(SimplexTerm {
            value: poly_simplex_integral(p, base_points, directions)?,
            std_error: None,
            provenance,
        });
    }
    let rule = build_rule(k, rule_kind)?;
    let integral = integrate_simplex(
        |s| {
            let base = affine_point(base_points, s, None)?;
            let req = DerivativeRequest::new(base, directions.to_vec())?.with_settings(cfg.derivative.clone());
            dk(f, &req)
        },
        &rule,
    )?;
    Ok(SimplexTerm {
        value: integral.value,
        std_error: integral.std_error,
        provenance,
    })
}

/// `T_k`: the `k`-th summand of the Kergin interpolant at `x`.
pub fn kergin_term(
    f: &FunctionOracle,
    nodes: &NodeSet<C64>,
    x: &Point<C64>,
    k: usize,
    cfg: &KerginConfig,
) -> Result<SimplexTerm> {
    if k == 0 {
        nodes.require(1)?;
        let value = f.eval(&nodes.points()[0]).map_err(|e| e.with_context("node p_0"))?;
        return Ok(SimplexTerm {
            value,
            std_error: None,
            provenance: "eval".into(),
        });
    }
    let (base, dirs) = term_geometry(nodes, x, k)?;
    oracle_simplex_integral(f, &base, &dirs, cfg).map_err(|e| e.with_context(format!("term k={k}")))
}

/// `K_n f(x)` and the per-term report.
pub fn kergin_interpolant(
    f: &FunctionOracle,
    nodes: &NodeSet<C64>,
    x: &Point<C64>,
    n: usize,
    cfg: &KerginConfig,
) -> Result<(C64, KerginReport<C64>)> {
    nodes.require(n + 1)?;
    let terms = (0..=n)
        .map(|k| {
            let t = kergin_term(f, nodes, x, k, cfg)?;
            Ok((t.value, t.std_error, t.provenance))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = KerginReport::from_terms(terms);
    Ok((report.value(), report))
}

/// `R_k(x) = f(x) - K_{k-1} f(x)` via the remainder integral, using the
/// nodes `p_0, ..., p_{k-1}`.
pub fn kergin_remainder(
    f: &FunctionOracle,
    nodes: &NodeSet<C64>,
    x: &Point<C64>,
    k: usize,
    cfg: &KerginConfig,
) -> Result<SimplexTerm> {
    let (base, dirs) = remainder_geometry(nodes, x, k)?;
    oracle_simplex_integral(f, &base, &dirs, cfg).map_err(|e| e.with_context(format!("remainder k={k}")))
}

/// Newton-form interpolant of a function of one variable. Repeated nodes
/// need derivatives, which are only available for polynomial oracles.
pub fn newton_1d(f: &FunctionOracle, nodes: &[C64], x: C64) -> Result<C64> {
    if f.dim() != 1 {
        return Err(KerginError::DimensionMismatch {
            expected: 1,
            found: f.dim(),
        });
    }
    if nodes.is_empty() {
        return Err(KerginError::InsufficientNodes {
            needed: 1,
            available: 0,
        });
    }
    // The interpolant does not depend on node order; grouping equal nodes
    // makes every confluent block contiguous.
    let mut z = nodes.to_vec();
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let at = |c: C64| Point::new(vec![c]);

    let mut level: Vec<C64> = z.iter().map(|&c| f.eval(&at(c)?)).collect::<Result<_>>()?;
    let mut leading = vec![level[0]];
    for j in 1..z.len() {
        let mut next = Vec::with_capacity(z.len() - j);
        for i in 0..z.len() - j {
            let span = z[i + j] - z[i];
            let value = if span == C64::new(0.0, 0.0) {
                confluent_difference(f, z[i], j)?
            } else {
                (level[i + 1] - level[i]) / span
            };
            next.push(value);
        }
        leading.push(next[0]);
        level = next;
    }
    let mut value = leading[leading.len() - 1];
    for j in (0..leading.len() - 1).rev() {
        value = value * (x - z[j]) + leading[j];
    }
    Ok(value)
}

/// `f^{(j)}(z) / j!`, the divided difference on `j + 1` coincident nodes.
fn confluent_difference(f: &FunctionOracle, z: C64, j: usize) -> Result<C64> {
    let p = f.as_polynomial().ok_or_else(|| {
        KerginError::InvalidArgument(format!(
            "repeated node {z} needs derivatives, which `{}` cannot supply",
            f.name()
        ))
    })?;
    let one = Point::new(vec![C64::new(1.0, 0.0)])?;
    let derivative = dk_exact(p, &Point::new(vec![z])?, &vec![one; j])?;
    let j_factorial: f64 = (1..=j).map(|i| i as f64).product();
    Ok(derivative / j_factorial)
}

/// `Σ_{k=0}^{n} d^k p(a; x - a, ..., x - a) / k!`.
pub fn taylor_sum<S: Scalar>(p: &MultiPoly<S>, a: &Point<S>, x: &Point<S>, n: usize) -> Result<S> {
    let h = x.sub(a)?;
    let mut total = p.eval(a)?;
    let mut derived = p.clone();
    let mut k_factorial = S::one();
    for k in 1..=n {
        derived = derived.derive(&h)?;
        if derived.is_zero() {
            break;
        }
        k_factorial = k_factorial * S::from_i64(k as i64);
        total = total + derived.eval(a)? / k_factorial.clone();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivative::DerivativeMethod;
    use crate::poly::{build_divergence_poly, tests::random_exact_poly};
    use crate::scalar::{exact, exact_int, Exact};
    use crate::space::NormKind;
    use proptest::prelude::*;

    fn square_1d() -> MultiPoly<Exact> {
        MultiPoly::from_int_terms(1, &[(vec![2], 1)]).unwrap()
    }

    fn pt1(x: f64) -> Point<Exact> {
        Point::from_f64(&[x]).unwrap()
    }

    #[test]
    fn square_through_zero_and_one() {
        let nodes = NodeSet::new(vec![pt1(0.0), pt1(1.0)]).unwrap();
        for x in [-2.0, 0.25, 3.0] {
            let (value, report) = poly_kergin_interpolant(&square_1d(), &nodes, &pt1(x), 1).unwrap();
            assert_eq!(value, Exact::from_f64(x));
            assert_eq!(report.terms[0].value, exact_int(0));
            assert_eq!(report.terms[1].value, Exact::from_f64(x));

            let f = FunctionOracle::polynomial(square_1d().to_float());
            let newton = newton_1d(&f, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], C64::new(x, 0.0)).unwrap();
            assert_eq!(newton, C64::new(x, 0.0));
        }
    }

    #[test]
    fn coincident_nodes_give_taylor_terms() {
        let nodes = NodeSet::repeated(pt1(0.0), 3).unwrap();
        let x = pt1(1.5);
        assert_eq!(
            poly_kergin_term(&square_1d(), &nodes, &x, 2).unwrap(),
            Exact::from_f64(2.25)
        );
        assert_eq!(taylor_sum(&square_1d(), &pt1(0.0), &x, 1).unwrap(), exact_int(0));
        assert_eq!(
            taylor_sum(&square_1d(), &pt1(0.0), &x, 2).unwrap(),
            Exact::from_f64(2.25)
        );
    }

    #[test]
    fn degree_zero_is_value_at_first_node() {
        let p = build_divergence_poly::<Exact>(3);
        let nodes = NodeSet::basis_prefix(3, 3).unwrap();
        let (v, _) = poly_kergin_interpolant(&p, &nodes, &Point::zeros(3), 0).unwrap();
        assert_eq!(v, exact_int(1));
    }

    #[test]
    fn divergence_terms_alternate() {
        let d = 7;
        let p = build_divergence_poly::<Exact>(d);
        let nodes = NodeSet::basis_prefix(d, d).unwrap();
        for k in 1..d {
            let t = poly_kergin_term(&p, &nodes, &Point::zeros(d), k).unwrap();
            let expected = if k % 2 == 0 { exact_int(2) } else { exact_int(-2) };
            assert_eq!(t, expected, "k={k}");
        }
    }

    #[test]
    fn first_remainder_is_increment() {
        let p = MultiPoly::<Exact>::from_terms(2, [(vec![3, 1], exact(2, 3, 1, 1)), (vec![0, 2], exact(-1, 1, 0, 1))])
            .unwrap();
        let nodes = NodeSet::new(vec![Point::from_f64(&[0.5, -1.0]).unwrap()]).unwrap();
        let x = Point::from_f64(&[0.25, 2.0]).unwrap();
        let r1 = poly_kergin_remainder(&p, &nodes, &x, 1).unwrap();
        assert_eq!(r1, p.eval(&x).unwrap() - p.eval(&nodes.points()[0]).unwrap());
    }

    #[test]
    fn low_degree_polynomial_has_zero_remainder() {
        let p = MultiPoly::<Exact>::from_int_terms(2, &[(vec![1, 1], 3), (vec![2, 0], -1)]).unwrap();
        let nodes = NodeSet::new(vec![
            Point::from_f64(&[0.5, 0.0]).unwrap(),
            Point::from_f64(&[1.0, 2.0]).unwrap(),
            Point::from_f64(&[0.0, -1.0]).unwrap(),
        ])
        .unwrap();
        let x = Point::from_f64(&[3.0, 1.0]).unwrap();
        assert_eq!(poly_kergin_remainder(&p, &nodes, &x, 3).unwrap(), exact_int(0));
    }

    #[test]
    fn insufficient_nodes() {
        let nodes = NodeSet::new(vec![pt1(0.0)]).unwrap();
        assert!(matches!(
            poly_kergin_term(&square_1d(), &nodes, &pt1(1.0), 1),
            Err(KerginError::InsufficientNodes {
                needed: 2,
                available: 1
            })
        ));
        assert!(NodeSet::<Exact>::new(vec![]).is_err());
    }

    #[test]
    fn newton_handles_repeated_nodes_for_polynomials() {
        let f = FunctionOracle::polynomial(MultiPoly::from_terms(1, [(vec![3], C64::new(1.0, 0.0))]).unwrap());
        let z = C64::new(0.5, 0.0);
        // Hermite cubic matching value and first three derivatives at 0.5 reproduces x^3.
        let v = newton_1d(&f, &[z, z, z, z], C64::new(2.0, 0.0)).unwrap();
        assert!((v - C64::new(8.0, 0.0)).norm() < 1e-12);
        let g = FunctionOracle::exp_linear(Point::from_f64(&[1.0]).unwrap());
        assert!(newton_1d(&g, &[z, z], z).is_err());
        assert_eq!(
            newton_1d(&g, &[z], C64::new(3.0, 0.0)).unwrap(),
            g.eval(&Point::new(vec![z]).unwrap()).unwrap()
        );
    }

    #[test]
    fn domain_violation_names_the_term() {
        let f = FunctionOracle::rational_pole(Point::from_f64(&[1.0, 0.0]).unwrap(), NormKind::L1).unwrap();
        let nodes = NodeSet::new(vec![
            Point::from_f64(&[0.0, 0.0]).unwrap(),
            Point::from_f64(&[1.5, 0.0]).unwrap(),
        ])
        .unwrap();
        let err = kergin_term(
            &f,
            &nodes,
            &Point::from_f64(&[0.1, 0.0]).unwrap(),
            1,
            &KerginConfig::default(),
        )
        .unwrap_err();
        assert!(err.is_domain_violation());
        assert!(err.to_string().contains("term k=1"));
    }

    #[test]
    fn float_rule_path_matches_symbolic_path() {
        let p = MultiPoly::<Exact>::from_terms(
            2,
            [
                (vec![2, 1], exact(1, 2, 1, 1)),
                (vec![0, 3], exact(-2, 1, 0, 1)),
                (vec![1, 0], exact(1, 1, 0, 1)),
            ],
        )
        .unwrap();
        let nodes = NodeSet::new(vec![
            Point::from_f64(&[0.1, 0.2]).unwrap(),
            Point::from_f64(&[-0.3, 0.5]).unwrap(),
            Point::from_f64(&[0.7, -0.1]).unwrap(),
            Point::from_f64(&[0.0, 0.4]).unwrap(),
        ])
        .unwrap();
        let x = Point::from_f64(&[0.3, -0.6]).unwrap();
        let (exact_value, _) = poly_kergin_interpolant(&p, &nodes, &x, 3).unwrap();
        let f = FunctionOracle::polynomial(p.to_float());
        for method in [
            DerivativeMethod::Exact,
            DerivativeMethod::Polarized,
            DerivativeMethod::Cauchy,
        ] {
            let cfg = KerginConfig::new(
                DerivativeSettings::with_method(method),
                RulePolicy::Fixed {
                    rule: RuleKind::Gm { degree: 7 },
                },
            );
            let (v, report) = kergin_interpolant(&f, &nodes.to_float(), &x.to_float(), 3, &cfg).unwrap();
            assert!((v - exact_value.to_complex()).norm() < 1e-12, "{method:?}");
            assert_eq!(report.terms.len(), 4);
        }
    }

    fn exact_points(dim: usize, count: usize) -> impl Strategy<Value = Vec<Point<Exact>>> {
        prop::collection::vec(prop::collection::vec((-4i64..=4, 1i64..=3), dim), count).prop_map(|pts| {
            pts.into_iter()
                .map(|c| Point::new(c.into_iter().map(|(a, b)| exact(a, b, 0, 1)).collect()).unwrap())
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn interpolates_at_every_node(p in random_exact_poly(2, 4), pts in exact_points(2, 4)) {
            let nodes = NodeSet::new(pts.clone()).unwrap();
            for node in &pts {
                let (v, _) = poly_kergin_interpolant(&p, &nodes, node, 3).unwrap();
                prop_assert_eq!(v, p.eval(node).unwrap());
            }
        }

        #[test]
        fn linear_in_the_function(p in random_exact_poly(2, 4), q in random_exact_poly(2, 4),
                                  pts in exact_points(2, 4), x in exact_points(2, 1)) {
            let nodes = NodeSet::new(pts).unwrap();
            let alpha = exact(3, 7, -1, 2);
            let combo = p.scale(&alpha).add(&q).unwrap();
            let lhs = poly_kergin_interpolant(&combo, &nodes, &x[0], 3).unwrap().0;
            let rhs = alpha * poly_kergin_interpolant(&p, &nodes, &x[0], 3).unwrap().0
                + poly_kergin_interpolant(&q, &nodes, &x[0], 3).unwrap().0;
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn reproduces_low_degree_polynomials(p in random_exact_poly(3, 3), pts in exact_points(3, 4), x in exact_points(3, 1)) {
            let nodes = NodeSet::new(pts).unwrap();
            prop_assert_eq!(poly_kergin_interpolant(&p, &nodes, &x[0], 3).unwrap().0, p.eval(&x[0]).unwrap());
        }

        #[test]
        fn remainder_identity_is_exact(p in random_exact_poly(2, 5), pts in exact_points(2, 5), x in exact_points(2, 1)) {
            let nodes = NodeSet::new(pts).unwrap();
            for k in 1..=5 {
                let (partial, _) = poly_kergin_interpolant(&p, &nodes, &x[0], k - 1).unwrap();
                let r = poly_kergin_remainder(&p, &nodes, &x[0], k).unwrap();
                prop_assert_eq!(p.eval(&x[0]).unwrap(), partial + r);
            }
        }

        #[test]
        fn coincident_nodes_match_taylor(p in random_exact_poly(2, 5), a in exact_points(2, 1), x in exact_points(2, 1), n in 0usize..=4) {
            let nodes = NodeSet::repeated(a[0].clone(), n + 1).unwrap();
            let (v, _) = poly_kergin_interpolant(&p, &nodes, &x[0], n).unwrap();
            prop_assert_eq!(v, taylor_sum(&p, &a[0], &x[0], n).unwrap());
        }
    }
}
