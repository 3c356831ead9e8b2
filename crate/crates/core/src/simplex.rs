//! Quadrature on the standard simplex `S_k = {s ∈ R^k : s_j >= 0, Σ s_j <= 1}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KerginError, Result};
use crate::poly::MultiPoly;
use crate::scalar::{factorial, Scalar, C64};
use crate::space::SimplexCoords;

pub const MAX_GM_DEGREE: u32 = 13;

/// `∫_{S_k} Π_j s_j^{α_j} ds = Π α_j! / (k + |α|)!` with `k = alpha.len()`.
pub fn monomial_simplex_integral(alpha: &[u32]) -> BigRational {
    assert!(!alpha.is_empty(), "simplex dimension must be at least 1");
    let mut bary = Vec::with_capacity(alpha.len() + 1);
    bary.push(0);
    bary.extend_from_slice(alpha);
    barycentric_monomial_integral(&bary)
}

/// Dirichlet integral over `S_k` in barycentric form: `alpha` has `k + 1`
/// entries, the first being the exponent of `s_0 = 1 - Σ s_j`.
pub fn barycentric_monomial_integral(alpha: &[u32]) -> BigRational {
    assert!(alpha.len() >= 2, "barycentric exponents need k + 1 >= 2 entries");
    let k = (alpha.len() - 1) as u32;
    let total: u32 = alpha.iter().sum();
    let numer = alpha.iter().fold(BigInt::one(), |acc, &a| acc * factorial(a));
    BigRational::new(numer, factorial(k + total))
}

/// `vol(S_k) = 1/k!`.
pub fn simplex_volume(k: usize) -> f64 {
    1.0 / factorial(k as u32).to_f64().unwrap_or(f64::INFINITY)
}

/// Integrates a polynomial in the barycentric variables `(s_0, ..., s_k)`
/// exactly, term by term.
pub fn integrate_barycentric_poly<S: Scalar>(p: &MultiPoly<S>) -> S {
    p.terms().fold(S::zero(), |acc, (exps, c)| {
        acc + c.clone() * S::from_ratio(&barycentric_monomial_integral(exps))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleKind {
    /// Symbolic integration via the Dirichlet formula; polynomial
    /// integrands only.
    ClosedForm,
    /// Grundmann–Möller rule exact through odd degree `degree`.
    Gm { degree: u32 },
    /// Uniform samples on `S_k` from normalized exponential spacings.
    MonteCarlo { samples: usize, seed: u64 },
}

impl RuleKind {
    pub fn label(&self) -> String {
        match self {
            RuleKind::ClosedForm => "closed_form".into(),
            RuleKind::Gm { degree } => format!("gm{degree}"),
            RuleKind::MonteCarlo { samples, seed } => format!("mc(N={samples},seed={seed})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexRule {
    pub k: usize,
    pub kind: RuleKind,
    pub nodes: Vec<SimplexCoords>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn build_rule(k: usize, kind: RuleKind) -> Result<SimplexRule> {
    if k == 0 {
        return Err(KerginError::InvalidArgument("simplex dimension must be >= 1".into()));
    }
    let (nodes, weights) = match kind {
        RuleKind::ClosedForm => (Vec::new(), Vec::new()),
        RuleKind::Gm { degree } => grundmann_moller(k, degree)?,
        RuleKind::MonteCarlo { samples, seed } => monte_carlo(k, samples, seed)?,
    };
    Ok(SimplexRule {
        k,
        kind,
        nodes,
        weights,
    })
}

/// Grundmann–Möller rule of degree `2s + 1` on `S_n`:
///
/// `Σ_{i=0}^{s} (-1)^i 2^{-2s} (D+n-2i)^D / (i! (D+n-i)!) Σ_{|β|=s-i} f((2β+1)/(D+n-2i))`
///
/// with `β ∈ N^{n+1}` and the point given in barycentric coordinates.
fn grundmann_moller(n: usize, degree: u32) -> Result<(Vec<SimplexCoords>, Vec<f64>)> {
    if degree.is_multiple_of(2) || degree > MAX_GM_DEGREE {
        return Err(KerginError::UnsupportedRule(format!(
            "Grundmann–Möller degree must be odd and <= {MAX_GM_DEGREE}, got {degree}"
        )));
    }
    let s = (degree - 1) / 2;
    let d = degree as i64;
    let n_i = n as i64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s {
        let i_l = i as i64;
        let denom_pts = d + n_i - 2 * i_l;
        let weight = BigRational::new(
            BigInt::from(denom_pts).pow(degree) * if i % 2 == 0 { 1 } else { -1 },
            BigInt::from(2).pow(2 * s) * factorial(i) * factorial((d + n_i - i_l) as u32),
        );
        let weight = weight.to_f64().unwrap_or(f64::NAN);
        for beta in compositions(s - i, n + 1) {
            let bary: Vec<f64> = beta
                .iter()
                .map(|&b| (2 * b as i64 + 1) as f64 / denom_pts as f64)
                .collect();
            nodes.push(SimplexCoords::from_barycentric(&bary)?);
            weights.push(weight);
        }
    }
    Ok((nodes, weights))
}

/// All ordered ways to write `total` as a sum of `parts` nonnegative
/// integers, in lexicographic order.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn recurse(remaining: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            recurse(remaining - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    recurse(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn monte_carlo(k: usize, samples: usize, seed: u64) -> Result<(Vec<SimplexCoords>, Vec<f64>)> {
    if samples == 0 {
        return Err(KerginError::UnsupportedRule(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(samples);
    let mut spacing = vec![0.0f64; k + 1];
    for _ in 0..samples {
        for e in spacing.iter_mut() {
            *e = Exp1.sample(&mut rng);
        }
        let total: f64 = spacing.iter().sum();
        let s: Vec<f64> = spacing[1..].iter().map(|e| e / total).collect();
        nodes.push(SimplexCoords::new(s)?);
    }
    let w = simplex_volume(k) / samples as f64;
    Ok((nodes, vec![w; samples]))
}

/// Quadrature value plus, for Monte Carlo rules, the sample standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct Integral<S> {
    pub value: S,
    pub std_error: Option<f64>,
}

/// `Σ_i w_i g(node_i)`. Nodes are evaluated in parallel and reduced in
/// node order, so the result does not depend on thread scheduling.
pub fn integrate_simplex<S, G>(g: G, rule: &SimplexRule) -> Result<Integral<S>>
where
    S: Scalar,
    G: Fn(&SimplexCoords) -> Result<S> + Sync,
{
    if rule.kind == RuleKind::ClosedForm {
        return Err(KerginError::UnsupportedRule(
            "closed-form rules integrate polynomials only; use integrate_barycentric_poly".into(),
        ));
    }
    let values: Vec<Result<S>> = rule.nodes.par_iter().map(&g).collect();
    let mut evaluated = Vec::with_capacity(values.len());
    for (i, v) in values.into_iter().enumerate() {
        let v = v.map_err(|e| e.with_context(format!("simplex node {i} s={:?}", rule.nodes[i].s())))?;
        evaluated.push(v);
    }
    let value = match rule.kind {
        // Equal weights: vol(S_k) * mean keeps the constant function exact.
        RuleKind::MonteCarlo { samples, .. } => {
            let sum = evaluated.iter().fold(S::zero(), |acc, v| acc + v.clone());
            sum / S::from_f64(samples as f64) * S::from_f64(simplex_volume(rule.k))
        }
        _ => evaluated
            .iter()
            .zip(&rule.weights)
            .fold(S::zero(), |acc, (v, w)| acc + v.clone() * S::from_f64(*w)),
    };
    let std_error = match rule.kind {
        RuleKind::MonteCarlo { samples, .. } => Some(mc_std_error(&evaluated, samples, rule.k)),
        _ => None,
    };
    Ok(Integral { value, std_error })
}

fn mc_std_error<S: Scalar>(values: &[S], samples: usize, k: usize) -> f64 {
    if samples < 2 {
        return f64::INFINITY;
    }
    let n = samples as f64;
    let mean: C64 = values.iter().map(Scalar::to_complex).sum::<C64>() / n;
    let var = values.iter().map(|v| (v.to_complex() - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    simplex_volume(k) * (var / n).sqrt()
}
