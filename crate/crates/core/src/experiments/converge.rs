//! `converge`: decay of `|f(x) - K_{k-1} f(x)|` against the Stirling bound.

use std::f64::consts::{E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{KerginError, Result};
use crate::geometry::{ball_containment_certificate, containment_certificate, stirling_error_bound, GeneratorSet};
use crate::kergin::{kergin_interpolant, kergin_remainder, NodeSet};
use crate::oracle::{DomainSpec, FunctionOracle};
use crate::scalar::C64;
use crate::space::Point;

use super::config::ExperimentConfig;
use super::pointwise::combine;
use super::report::{Cell, Check, Report, Table};

const COLUMNS: &[&str] = &[
    "k",
    "x_index",
    "error",
    "remainder",
    "bound_rigorous",
    "bound_asymptotic",
    "mc_stderr",
    "provenance",
];

/// Samples of `b(s, t)` used to estimate `M`.
pub const M_HAT_SAMPLES: usize = 10_000;
/// Errors may exceed the bound with estimated `M` by this factor.
pub const BOUND_SAFETY: f64 = 2.0;
/// Slack added to `e/ρ` in the mean-ratio check.
pub const RATIO_SLACK: f64 = 0.1;
/// Degrees over which successive error ratios are averaged.
pub const RATIO_WINDOW: (usize, usize) = (3, 8);
/// Errors below this multiple of `ε max(1, |f(x)|)` are at rounding
/// level and excluded from the decay checks.
pub const NOISE_FLOOR_ULPS: f64 = 64.0;

/// Estimate of `max |f(b(s,t))|` over the proof's integration set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MHat {
    pub value: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    /// First sample that left the domain, if any.
    pub violation: Option<String>,
}

/// `b(s,t) = a(s,x) + Σ_j (x - p_j) ρ e^{2πi t_j} / k`, sampled with
/// `s` uniform on `S_k` and `t` uniform on the torus, cycling through
/// `k = 1..n` and the evaluation points.
pub fn estimate_m_hat(
    f: &FunctionOracle,
    nodes: &[Point<C64>],
    points: &[Point<C64>],
    rho: f64,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<MHat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for i in 0..samples {
        let k = 1 + i % n;
        let x = &points[(i / n) % points.len()];
        let spacings: Vec<f64> = (0..=k).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = spacings.iter().sum();
        let mut b = x.scale(&C64::new(spacings[k] / total, 0.0));
        for j in 0..k {
            b = b.axpy(&C64::new(spacings[j] / total, 0.0), &nodes[j])?;
            let t: f64 = rng.random();
            let phase = C64::from_polar(rho / k as f64, 2.0 * PI * t);
            b = b.axpy(&phase, &x.sub(&nodes[j])?)?;
        }
        match f.eval(&b) {
            Ok(v) => best = best.max(v.norm()),
            Err(e) if e.is_domain_violation() => {
                return Ok(MHat {
                    value: None,
                    samples: i + 1,
                    seed,
                    violation: Some(e.to_string()),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(MHat {
        value: Some(best),
        samples,
        seed,
        violation: None,
    })
}

struct PointRun {
    fx: C64,
    errors: Vec<f64>,
    remainders: Vec<(C64, Option<f64>, String)>,
    stderr: Vec<Option<f64>>,
}

fn run_point(
    f: &FunctionOracle,
    nodes: &NodeSet<C64>,
    x: &Point<C64>,
    n: usize,
    cfg: &ExperimentConfig,
) -> Result<PointRun> {
    let fx = f.eval(x)?;
    let (_, partials) = kergin_interpolant(f, nodes, x, n - 1, &cfg.kergin)?;
    let mut out = PointRun {
        fx,
        errors: Vec::with_capacity(n),
        remainders: Vec::with_capacity(n),
        stderr: Vec::with_capacity(n),
    };
    for k in 1..=n {
        let partial = partials.partial_sum(k - 1).expect("k - 1 <= n - 1");
        out.errors.push((fx - partial).norm());
        let r = kergin_remainder(f, nodes, x, k, &cfg.kergin)?;
        out.stderr.push(combine(partials.std_error_through(k - 1), r.std_error));
        out.remainders.push((r.value, r.std_error, r.provenance));
    }
    Ok(out)
}

pub fn run_converge(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.max_degree;
    if n == 0 {
        return Err(KerginError::Config("converge needs max_degree >= 1".into()));
    }
    let rho = cfg.require_rho()?;
    let f = cfg.float_oracle()?;
    let all_nodes = cfg.float_nodes()?;
    if all_nodes.len() < n {
        return Err(KerginError::InsufficientNodes {
            needed: n,
            available: all_nodes.len(),
        });
    }
    let used_nodes = all_nodes[..n].to_vec();
    let nodes = NodeSet::new(used_nodes.clone())?;
    let points = cfg.float_eval_points()?;

    // Guarantee: W + ρW' ⊂ U for the nodes actually used and the points.
    let (guaranteed, certificate_detail, certificate) = match f.domain() {
        DomainSpec::AllSpace => (true, "entire oracle: every rho is admissible".to_string(), None),
        domain => {
            let c = containment_certificate(
                &GeneratorSet::new(used_nodes.clone())?,
                &GeneratorSet::new(points.clone())?,
                rho,
                domain,
            )?;
            (c.verdict.passed(), format!("margin {:e}", c.margin), Some(c))
        }
    };
    let analytic = match (
        f.domain().origin_ball(),
        cfg.node_spec()?.sample_radius(),
        cfg.point_spec()?.sample_radius(),
    ) {
        (Some((radius, norm)), Some(rp), Some(r)) => Some(ball_containment_certificate(r, rp, rho, radius, norm)?),
        _ => None,
    };

    let m_seed = cfg.seed.wrapping_add(2);
    let m_hat = estimate_m_hat(&f, &used_nodes, &points, rho, n, M_HAT_SAMPLES, m_seed)?;

    let mut table = Table::new(COLUMNS);
    let mut runs = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        let run = run_point(&f, &nodes, x, n, cfg).map_err(|e| e.with_context(format!("x_index={i}")))?;
        for k in 1..=n {
            let bound = m_hat.value.map(|m| stirling_error_bound(k, rho, m));
            let (r, _, provenance) = &run.remainders[k - 1];
            table.push(vec![
                k.into(),
                i.into(),
                run.errors[k - 1].into(),
                r.norm().into(),
                Cell::opt_float(bound.map(|b| b.rigorous)),
                Cell::opt_float(bound.map(|b| b.asymptotic)),
                Cell::opt_float(run.stderr[k - 1]),
                provenance.clone().into(),
            ]);
        }
        runs.push(run);
    }

    let mut report = Report::new("converge", cfg.hash(), cfg.seed, table);
    report.note(format!(
        "error_k = |f(x) - K_(k-1) f(x)|, remainder = |R_k(x)|; rho = {rho}, n = {n}, {} points",
        points.len()
    ));
    match m_hat.value {
        Some(m) => report.note(format!(
            "bounds use an estimated M = {m:e} (max |f(b(s,t))| over {} samples, seed {m_seed}); safety factor {BOUND_SAFETY}",
            m_hat.samples
        )),
        None => report.note("M could not be estimated: sampled b(s,t) left the domain; bounds omitted"),
    }
    if !guaranteed {
        report.note("unguaranteed: the containment certificate fails, so convergence is not guaranteed");
    }

    report.check(Check::new("certificate", guaranteed, certificate_detail));
    let (decrease, ratio, bound) = decay_checks(&runs, rho, m_hat.value, n);
    report.check(decrease);
    report.check(ratio);
    if guaranteed {
        report.check(bound);
    }
    report.extra("certificate", &certificate);
    report.extra("analytic_certificate", &analytic);
    report.extra("m_hat", &m_hat);
    Ok(report)
}

fn floor_for(run: &PointRun) -> f64 {
    NOISE_FLOOR_ULPS * f64::EPSILON * run.fx.norm().max(1.0)
}

fn decay_checks(runs: &[PointRun], rho: f64, m_hat: Option<f64>, n: usize) -> (Check, Check, Check) {
    let mut decrease_ok = true;
    let mut skipped = 0usize;
    let mut first_bad = None;
    let limit = E / rho + RATIO_SLACK;
    let mut worst_mean = 0.0f64;
    let mut ratio_ok = true;
    let mut bound_ok = m_hat.is_some();
    let mut worst_bound = 0.0f64;

    for (i, run) in runs.iter().enumerate() {
        let floor = floor_for(run);
        for k in 2..=n {
            let (prev, cur) = (run.errors[k - 2], run.errors[k - 1]);
            if prev <= floor && cur <= floor {
                skipped += 1;
                continue;
            }
            if cur >= prev {
                decrease_ok = false;
                first_bad.get_or_insert(format!("x_index={i} k={k}: {cur:e} >= {prev:e}"));
            }
        }
        let ratios: Vec<f64> = (RATIO_WINDOW.0..=RATIO_WINDOW.1.min(n))
            .filter(|&k| run.errors[k - 2] > floor)
            .map(|k| run.errors[k - 1] / run.errors[k - 2])
            .collect();
        if !ratios.is_empty() {
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            worst_mean = worst_mean.max(mean);
            ratio_ok &= mean <= limit;
        }
        if let Some(m) = m_hat {
            for k in 1..=n {
                let b = stirling_error_bound(k, rho, m).rigorous;
                worst_bound = worst_bound.max(run.errors[k - 1] / b);
                bound_ok &= run.errors[k - 1] <= BOUND_SAFETY * b;
            }
        }
    }
    let decrease = Check::new(
        "strict_decrease",
        decrease_ok,
        match first_bad {
            Some(b) => b,
            None => format!("error_k < error_(k-1) for k >= 2; {skipped} pairs at rounding level skipped"),
        },
    );
    let ratio = Check::new(
        "mean_ratio",
        ratio_ok,
        format!(
            "largest mean of error_k/error_(k-1) over k in [{}, {}] is {worst_mean:e}; limit e/rho + {RATIO_SLACK} = {limit:e}",
            RATIO_WINDOW.0, RATIO_WINDOW.1
        ),
    );
    let bound = Check::new(
        "stirling_bound",
        bound_ok,
        format!("max error_k / bound_rigorous = {worst_bound:e}; allowed {BOUND_SAFETY}"),
    );
    (decrease, ratio, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::{ExperimentConfig, ExperimentKind, OracleName, OracleSpec, PointSpec};
    use crate::poly::PolyTerm;

    fn poly_config() -> ExperimentConfig {
        let text = r#"
experiment = "converge"
dimension = 2
max_degree = 5
rho = 8.0

[oracle]
kind = "poly"
terms = [
  { exponents = [2, 0], coeff_re = 1.0 },
  { exponents = [0, 1], coeff_re = -3.0 },
]

[nodes]
kind = "ball"
count = 5
radius = 0.1

[points]
kind = "ball"
count = 2
radius = 0.1
"#;
        ExperimentConfig::from_toml_str(text).unwrap()
    }

    #[test]
    fn polynomial_error_vanishes_after_its_degree() {
        let report = run_converge(&poly_config()).unwrap();
        let (k, err) = (report.table.column("k").unwrap(), report.table.column("error").unwrap());
        for row in &report.table.rows {
            if let (Cell::Int(k), Cell::Float(e)) = (&row[k], &row[err]) {
                if *k >= 3 {
                    assert!(*e < 1e-15, "k={k} error={e}");
                }
            }
        }
        assert_eq!(report.checks[0].name, "certificate");
        assert!(report.checks[0].passed);
    }

    #[test]
    fn pole_outside_certificate_is_unguaranteed() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Converge, 2);
        cfg.max_degree = 2;
        cfg.rho = Some(8.0);
        cfg.oracle = Some(OracleSpec {
            kind: OracleName::RationalPole,
            u: Some(vec![
                crate::experiments::config::ComplexEntry::Real(crate::poly::CoeffValue::Float(1.0)),
                crate::experiments::config::ComplexEntry::Real(crate::poly::CoeffValue::Float(1.0)),
            ]),
            norm: None,
            terms: Vec::<PolyTerm>::new(),
        });
        cfg.nodes = Some(PointSpec::Ball {
            count: 3,
            radius: 0.3,
            seed: None,
            complex: true,
        });
        cfg.points = Some(PointSpec::Ball {
            count: 1,
            radius: 0.3,
            seed: None,
            complex: true,
        });
        let report = run_converge(&cfg).unwrap();
        assert!(!report.passed());
        assert_eq!(report.first_failure().unwrap().name, "certificate");
        assert!(report.metadata.notes.iter().any(|n| n.starts_with("unguaranteed")));
    }

    #[test]
    fn m_hat_is_deterministic_and_covers_f_at_points() {
        let f =
            FunctionOracle::rational_pole(Point::from_f64(&[1.0, 1.0]).unwrap(), crate::space::NormKind::L1).unwrap();
        let nodes = vec![
            Point::from_f64(&[0.01, 0.02]).unwrap(),
            Point::from_f64(&[-0.03, 0.0]).unwrap(),
        ];
        let points = vec![Point::from_f64(&[0.02, -0.01]).unwrap()];
        let a = estimate_m_hat(&f, &nodes, &points, 8.0, 2, 2000, 5).unwrap();
        let b = estimate_m_hat(&f, &nodes, &points, 8.0, 2, 2000, 5).unwrap();
        assert_eq!(a, b);
        let m = a.value.unwrap();
        assert!((1.0 / 1.11..1.0 / (1.0 - 0.03 - 8.0 * 0.06)).contains(&m));
    }

    #[test]
    fn zero_degree_is_rejected() {
        let mut cfg = poly_config();
        cfg.max_degree = 0;
        assert!(matches!(run_converge(&cfg), Err(KerginError::Config(_))));
    }
}
