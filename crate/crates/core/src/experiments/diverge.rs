//! `diverge`: exact Kergin terms of `Σ_n n! x_1 ... x_n` at the origin
//! with nodes `e_1, e_2, ...`.

use num_traits::{One, Signed, Zero};

use crate::error::{KerginError, Result};
use crate::kergin::{poly_kergin_term, NodeSet};
use crate::poly::build_divergence_poly;
use crate::scalar::{format_ratio, ratio_to_f64, Exact};
use crate::space::Point;

use super::config::{ExperimentConfig, OracleName, PathKind, PointSpec};
use super::report::{Check, Report, Table};

const COLUMNS: &[&str] = &["k", "term_num", "term_den", "term_float", "abs_ge_1", "partial_sum"];

/// Exact terms `T_0, ..., T_n` for dimension `d`.
pub fn divergence_terms(d: usize, n: usize) -> Result<Vec<Exact>> {
    if d < n + 2 {
        return Err(KerginError::Config(format!(
            "dimension {d} is too small for degree {n}: the series is only exact for d >= n + 2"
        )));
    }
    let p = build_divergence_poly::<Exact>(d);
    let nodes = NodeSet::basis_prefix(d, n + 1)?;
    let origin = Point::zeros(d);
    (0..=n).map(|k| poly_kergin_term(&p, &nodes, &origin, k)).collect()
}

fn check_config(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.path_or(PathKind::Exact) == PathKind::Float {
        return Err(KerginError::Config(
            "diverge runs on the exact path only; remove `path = \"float\"`".into(),
        ));
    }
    if let Some(spec) = &cfg.oracle {
        if spec.kind != OracleName::Divergence {
            return Err(KerginError::Config(format!(
                "diverge uses the divergence oracle, got {:?}",
                spec.kind
            )));
        }
    }
    let n = cfg.max_degree;
    match &cfg.nodes {
        None | Some(PointSpec::BasisPrefix { offset: 0, .. }) => {}
        Some(_) => return Err(KerginError::Config("diverge uses the nodes e_1, e_2, ... only".into())),
    }
    if let Some(PointSpec::BasisPrefix { count, .. }) = &cfg.nodes {
        if *count < n + 1 {
            return Err(KerginError::Config(format!(
                "degree {n} needs {} nodes, got {count}",
                n + 1
            )));
        }
    }
    match &cfg.points {
        None | Some(PointSpec::Origin) => Ok(()),
        Some(_) => Err(KerginError::Config("diverge evaluates at the origin only".into())),
    }
}

pub fn run_diverge(cfg: &ExperimentConfig) -> Result<Report> {
    check_config(cfg)?;
    let (d, n) = (cfg.dimension, cfg.max_degree);
    let terms = divergence_terms(d, n)?;

    let mut table = Table::new(COLUMNS);
    let mut partial = Exact::zero();
    let mut all_large = true;
    let mut pattern = true;
    let mut partials = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        if !t.im.is_zero() {
            return Err(KerginError::InvalidArgument(format!("term {k} is not real")));
        }
        partial += t.clone();
        let ge_1 = t.re.abs() >= num_rational::BigRational::one();
        all_large &= ge_1;
        let expected = match k {
            0 => 1,
            k if k % 2 == 0 => 2,
            _ => -2,
        };
        if k < d {
            pattern &= t.re == num_rational::BigRational::from_integer(expected.into());
        }
        partials.push(partial.re.clone());
        table.push(vec![
            k.into(),
            t.re.numer().to_string().into(),
            t.re.denom().to_string().into(),
            ratio_to_f64(&t.re).into(),
            ge_1.into(),
            format_ratio(&partial.re).into(),
        ]);
    }

    let mut report = Report::new("diverge", cfg.hash(), cfg.seed, table);
    report.note(format!(
        "f = sum_(m=1..{d}) m! x_1...x_m, nodes e_1..e_{}, x = 0, exact rational arithmetic",
        n + 1
    ));
    report.check(Check::new("abs_term_ge_1", all_large, "|T_k| >= 1 for k = 0..n"));
    report.check(Check::new(
        "alternating_pattern",
        pattern,
        "T_0 = 1 and T_k = 2 (-1)^k for 1 <= k <= min(n, d - 1)",
    ));
    let steps_ok = partials
        .windows(2)
        .all(|w| (w[1].clone() - w[0].clone()).abs() >= num_rational::BigRational::one());
    report.check(Check::new(
        "not_cauchy",
        steps_ok && n >= 1,
        format!(
            "consecutive partial sums differ by at least 1; partial sums {}",
            partials.iter().map(format_ratio).collect::<Vec<_>>().join(", ")
        ),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::{ExperimentKind, OracleSpec};

    #[test]
    fn terms_for_small_dimension() {
        let terms = divergence_terms(6, 4).unwrap();
        let values: Vec<String> = terms.iter().map(|t| format_ratio(&t.re)).collect();
        assert_eq!(values, ["1", "-2", "2", "-2", "2"]);
        assert!(divergence_terms(5, 4).is_err());
    }

    #[test]
    fn report_passes_and_oscillates() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Diverge, 7);
        cfg.max_degree = 5;
        let report = run_diverge(&cfg).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
        let ps = report.table.column("partial_sum").unwrap();
        let sums: Vec<String> = report.table.rows.iter().map(|r| r[ps].to_string()).collect();
        assert_eq!(sums, ["1", "-1", "1", "-1", "1", "-1"]);
    }

    #[test]
    fn refuses_float_and_foreign_oracles() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Diverge, 7);
        cfg.max_degree = 3;
        cfg.path = Some(PathKind::Float);
        assert!(matches!(run_diverge(&cfg), Err(KerginError::Config(_))));
        cfg.path = None;
        cfg.oracle = Some(OracleSpec::default());
        assert!(matches!(run_diverge(&cfg), Err(KerginError::Config(_))));
        cfg.oracle = None;
        cfg.points = Some(PointSpec::BasisPrefix { count: 1, offset: 0 });
        assert!(run_diverge(&cfg).is_err());
    }
}
