//! `certify`: containment certificates and the radius condition.

use crate::error::{KerginError, Result};
use crate::geometry::{
    ball_containment_certificate, containment_certificate, example1_check, sample_sphere, Certificate, GeneratorSet,
    RadiusCheck,
};
use crate::oracle::DomainSpec;

use super::config::{ExperimentConfig, GeometrySpec, DEFAULT_SAMPLE_COUNT};
use super::report::{Cell, Check, Report, Table};

const COLUMNS: &[&str] = &[
    "item", "method", "rho", "margin", "verdict", "rho_low", "rho_high", "note",
];

/// Generators of a set given either explicitly or as a sphere radius.
fn generators(
    cfg: &ExperimentConfig,
    explicit: Option<&super::config::PointSpec>,
    radius: Option<f64>,
    samples: usize,
    seed: u64,
    label: &str,
) -> Result<GeneratorSet> {
    let dim = cfg.dimension;
    if let Some(spec) = explicit {
        return GeneratorSet::new(spec.float_points(dim, cfg.norm, seed)?);
    }
    match radius {
        Some(0.0) => Ok(GeneratorSet::origin(dim)),
        Some(r) if r > 0.0 && r.is_finite() => GeneratorSet::new(sample_sphere(dim, r, cfg.norm, samples, true, seed)),
        Some(r) => Err(KerginError::Config(format!(
            "radius of {label} must be nonnegative, got {r}"
        ))),
        None => Err(KerginError::Config(format!(
            "geometry needs either `{label}` generators or a radius for it"
        ))),
    }
}

fn certificate_row(table: &mut Table, item: &str, c: &Certificate) {
    table.push(vec![
        item.into(),
        c.method.into(),
        c.rho.into(),
        c.margin.into(),
        format!("{:?}", c.verdict).to_lowercase().into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
    ]);
}

fn radius_row(table: &mut Table, c: &RadiusCheck) {
    let (lo, hi) = match c.rho_interval {
        Some((lo, hi)) => (Cell::Float(lo), Cell::Float(hi)),
        None => (Cell::Empty, Cell::Empty),
    };
    let note = match &c.erratum {
        Some(_) => "erratum".into(),
        None => format!("ratio={:e}", c.ratio),
    };
    table.push(vec![
        "radius_condition".into(),
        "ratio".into(),
        Cell::Empty,
        c.margin.into(),
        format!("{:?}", c.verdict).to_lowercase().into(),
        lo,
        hi,
        note.into(),
    ]);
}

pub fn run_certify(cfg: &ExperimentConfig) -> Result<Report> {
    let geo: &GeometrySpec = cfg
        .geometry
        .as_ref()
        .ok_or_else(|| KerginError::Config("certify needs a [geometry] section".into()))?;
    let rhos: Vec<f64> = if geo.rho.is_empty() {
        vec![cfg.require_rho()?]
    } else {
        geo.rho.clone()
    };
    if let Some(bad) = rhos.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(KerginError::Config(format!("rho must be positive, got {bad}")));
    }
    let radius = geo.domain_radius.unwrap_or(1.0);
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(KerginError::Config(format!(
            "domain_radius must be positive, got {radius}"
        )));
    }
    let samples = geo.samples.unwrap_or(DEFAULT_SAMPLE_COUNT);
    let l = generators(cfg, geo.l.as_ref(), geo.r_prime, samples, cfg.seed, "l")?;
    let v = generators(cfg, geo.v.as_ref(), geo.r, samples, cfg.seed.wrapping_add(1), "v")?;
    let u = DomainSpec::ball_at_origin(cfg.dimension, radius, cfg.norm);

    let mut table = Table::new(COLUMNS);
    let mut certificates = Vec::new();
    let mut report_checks = Vec::new();
    for &rho in &rhos {
        let c = containment_certificate(&l, &v, rho, &u)?;
        certificate_row(&mut table, "containment", &c);
        report_checks.push(Check::new(
            format!("containment(rho={rho})"),
            c.verdict.passed(),
            format!("margin {:e} via {}", c.margin, c.method),
        ));
        certificates.push(c);
        // The analytic form applies to origin balls given by radii alone.
        if geo.l.is_none() && geo.v.is_none() {
            if let (Some(r), Some(rp)) = (geo.r, geo.r_prime) {
                let a = ball_containment_certificate(r, rp, rho, radius, cfg.norm)?;
                certificate_row(&mut table, "containment", &a);
                certificates.push(a);
            }
        }
    }

    let mut report = Report::new("certify", cfg.hash(), cfg.seed, table);
    report.note(format!(
        "U = origin ball of radius {radius} in {}; sufficient condition max||w|| + rho max||l+v|| < radius",
        cfg.norm
    ));
    for c in report_checks {
        report.check(c);
    }

    let radius_check = match (geo.r, geo.r_prime) {
        (Some(r), Some(rp)) if r > 0.0 && rp > 0.0 => Some(example1_check(r, rp).map_err(|e| match e {
            KerginError::InvalidArgument(msg) => KerginError::Config(msg),
            other => other,
        })?),
        _ => None,
    };
    if let Some(c) = &radius_check {
        radius_row(&mut report.table, c);
        report.check(Check::new(
            "radius_condition",
            c.verdict.passed(),
            format!("(1 - max(r,r'))/(r + r') = {:e} vs e", c.ratio),
        ));
        if let Some(text) = &c.erratum {
            report.note(format!("erratum: {text}"));
        }
        report.extra("radius_condition", c);
    } else {
        report.note("radius condition skipped: it needs positive radii r and r_prime");
    }
    report.extra("certificates", &certificates);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::{ExperimentKind, PointSpec};
    use crate::geometry::misquoted_radius;

    fn config(r: f64, rho: Vec<f64>) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Certify, 3);
        cfg.geometry = Some(GeometrySpec {
            r: Some(r),
            r_prime: Some(r),
            rho,
            samples: Some(32),
            ..Default::default()
        });
        cfg
    }

    #[test]
    fn tenth_radius_passes_with_interval() {
        let report = run_certify(&config(0.1, vec![3.0])).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
        let rc = &report.extras["radius_condition"];
        assert!((rc["ratio"].as_f64().unwrap() - 4.5).abs() < 1e-12);
        assert!((rc["rho_interval"][1].as_f64().unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn rho_five_fails_by_a_tenth() {
        let report = run_certify(&config(0.1, vec![3.0, 5.0])).unwrap();
        assert!(!report.passed());
        let failing = report.first_failure().unwrap();
        assert_eq!(failing.name, "containment(rho=5)");
        let certs = report.extras["certificates"].as_array().unwrap();
        assert!((certs[2]["margin"].as_f64().unwrap() + 0.1).abs() < 1e-12);
    }

    #[test]
    fn misquoted_radius_fails_with_erratum() {
        let report = run_certify(&config(misquoted_radius(), vec![3.0])).unwrap();
        assert!(!report.passed());
        assert!(report.metadata.notes.iter().any(|n| n.starts_with("erratum")));
        assert!(report.extras["radius_condition"]["erratum"].is_string());
    }

    #[test]
    fn origin_generators_pass() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Certify, 2);
        cfg.geometry = Some(GeometrySpec {
            l: Some(PointSpec::Origin),
            v: Some(PointSpec::Origin),
            rho: vec![1.0, 100.0, 1e9],
            ..Default::default()
        });
        let report = run_certify(&cfg).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn malformed_geometry() {
        let cfg = ExperimentConfig::new(ExperimentKind::Certify, 2);
        assert!(run_certify(&cfg).is_err());
        assert!(run_certify(&config(-0.1, vec![3.0])).is_err());
        assert!(run_certify(&config(1.5, vec![3.0])).is_err());
    }
}
