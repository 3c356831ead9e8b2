//! `interpolate` and `remainder`: term tables at individual points.

use num_traits::Zero;

use crate::error::Result;
use crate::kergin::{
    kergin_interpolant, kergin_remainder, poly_kergin_interpolant, poly_kergin_remainder, KerginReport, NodeSet,
};
use crate::poly::MultiPoly;
use crate::scalar::{Exact, Scalar, C64};
use crate::space::Point;

use super::config::{ExperimentConfig, PathKind};
use super::format_exact;
use super::report::{Cell, Check, Report, Table};

/// Float residual allowed in `f(x) - K_{k-1} f(x) - R_k(x)` on top of five
/// Monte Carlo standard errors.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;

const INTERPOLATE_COLUMNS: &[&str] = &[
    "x_index",
    "k",
    "term_re",
    "term_im",
    "partial_re",
    "partial_im",
    "error",
    "mc_stderr",
    "provenance",
    "partial_exact",
];

const REMAINDER_COLUMNS: &[&str] = &[
    "x_index",
    "k",
    "remainder_re",
    "remainder_im",
    "error_re",
    "error_im",
    "identity_residual",
    "mc_stderr",
    "provenance",
];

type ExactInputs = (MultiPoly<Exact>, NodeSet<Exact>, Vec<Point<Exact>>);

fn exact_inputs(cfg: &ExperimentConfig) -> Result<ExactInputs> {
    let p = cfg.exact_poly()?;
    let nodes = NodeSet::new(cfg.node_spec()?.exact_points(cfg.dimension)?)?;
    let points = cfg.point_spec()?.exact_points(cfg.dimension)?;
    Ok((p, nodes, points))
}

fn push_terms<S: Scalar>(
    table: &mut Table,
    x_index: usize,
    fx: &S,
    report: &KerginReport<S>,
    exact_text: impl Fn(&S) -> Cell,
) {
    for t in &report.terms {
        let term = t.value.to_complex();
        let partial = t.partial_sum.to_complex();
        table.push(vec![
            x_index.into(),
            t.k.into(),
            term.re.into(),
            term.im.into(),
            partial.re.into(),
            partial.im.into(),
            (fx.clone() - t.partial_sum.clone()).modulus().into(),
            Cell::opt_float(report.std_error_through(t.k)),
            t.provenance.clone().into(),
            exact_text(&t.partial_sum),
        ]);
    }
}

pub fn run_interpolate(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.max_degree;
    let mut table = Table::new(INTERPOLATE_COLUMNS);
    let path = cfg.path_or(PathKind::Float);
    match path {
        PathKind::Exact => {
            let (p, nodes, points) = exact_inputs(cfg)?;
            for (i, x) in points.iter().enumerate() {
                let (_, report) = poly_kergin_interpolant(&p, &nodes, x, n)?;
                push_terms(&mut table, i, &p.eval(x)?, &report, |z| Cell::Text(format_exact(z)));
            }
        }
        PathKind::Float => {
            let f = cfg.float_oracle()?;
            let nodes = NodeSet::new(cfg.float_nodes()?)?;
            for (i, x) in cfg.float_eval_points()?.iter().enumerate() {
                let (_, report) = kergin_interpolant(&f, &nodes, x, n, &cfg.kergin)
                    .map_err(|e| e.with_context(format!("x_index={i}")))?;
                push_terms(&mut table, i, &f.eval(x)?, &report, |_| Cell::Empty);
            }
        }
    }
    let mut report = Report::new("interpolate", cfg.hash(), cfg.seed, table);
    report.note(format!(
        "path={path:?}, n={n}; error is |f(x) - K_k f(x)| for the partial sum through k"
    ));
    Ok(report)
}

pub fn run_remainder(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.max_degree.max(1);
    let mut table = Table::new(REMAINDER_COLUMNS);
    let mut worst = 0.0f64;
    let mut all_ok = true;
    let path = cfg.path_or(PathKind::Float);
    match path {
        PathKind::Exact => {
            let (p, nodes, points) = exact_inputs(cfg)?;
            for (i, x) in points.iter().enumerate() {
                let fx = p.eval(x)?;
                let (_, partials) = poly_kergin_interpolant(&p, &nodes, x, n - 1)?;
                for k in 1..=n {
                    let r = poly_kergin_remainder(&p, &nodes, x, k)?;
                    let err = fx.clone() - partials.partial_sum(k - 1).expect("k - 1 <= n - 1").clone();
                    let diff = err.clone() - r.clone();
                    let residual = diff.modulus();
                    all_ok &= diff.is_zero();
                    worst = worst.max(residual);
                    let (rc, ec) = (r.to_complex(), err.to_complex());
                    table.push(vec![
                        i.into(),
                        k.into(),
                        rc.re.into(),
                        rc.im.into(),
                        ec.re.into(),
                        ec.im.into(),
                        residual.into(),
                        Cell::Empty,
                        "exact+closed_form(rational)".into(),
                    ]);
                }
            }
        }
        PathKind::Float => {
            let f = cfg.float_oracle()?;
            let nodes = NodeSet::new(cfg.float_nodes()?)?;
            for (i, x) in cfg.float_eval_points()?.iter().enumerate() {
                let fx = f.eval(x)?;
                let (_, partials) = kergin_interpolant(&f, &nodes, x, n - 1, &cfg.kergin)?;
                for k in 1..=n {
                    let r = kergin_remainder(&f, &nodes, x, k, &cfg.kergin)?;
                    let err: C64 = fx - partials.partial_sum(k - 1).expect("k - 1 <= n - 1");
                    let residual = (err - r.value).norm();
                    let stderr = combine(partials.std_error_through(k - 1), r.std_error);
                    all_ok &= residual <= IDENTITY_TOLERANCE + 5.0 * stderr.unwrap_or(0.0);
                    worst = worst.max(residual);
                    table.push(vec![
                        i.into(),
                        k.into(),
                        r.value.re.into(),
                        r.value.im.into(),
                        err.re.into(),
                        err.im.into(),
                        residual.into(),
                        Cell::opt_float(stderr),
                        r.provenance.into(),
                    ]);
                }
            }
        }
    }
    let mut report = Report::new("remainder", cfg.hash(), cfg.seed, table);
    report.note(format!(
        "path={path:?}; error is f(x) - K_(k-1) f(x), residual is |error - R_k(x)|"
    ));
    let tolerance = match path {
        PathKind::Exact => "0 (exact)".to_string(),
        PathKind::Float => format!("{IDENTITY_TOLERANCE:e} + 5 stderr"),
    };
    report.check(Check::new(
        "remainder_identity",
        all_ok,
        format!("max residual {worst:e}, tolerance {tolerance}"),
    ));
    Ok(report)
}

/// Root sum of squares of the available standard errors.
pub(crate) fn combine(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(0.0).powi(2) + b.unwrap_or(0.0).powi(2)).sqrt()),
    }
}
