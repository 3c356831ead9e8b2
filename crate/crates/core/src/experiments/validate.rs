//! `validate`: cross-checks of the derivative engines, the quadrature
//! rules and the interpolation invariants, one row per check.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivative::{dk, dk_exact, torus_average, DerivativeMethod, DerivativeRequest, DerivativeSettings};
use crate::error::Result;
use crate::kergin::{
    kergin_interpolant, kergin_remainder, newton_1d, poly_kergin_interpolant, poly_kergin_remainder, taylor_sum,
    KerginConfig, NodeSet, RulePolicy,
};
use crate::oracle::FunctionOracle;
use crate::poly::MultiPoly;
use crate::scalar::{exact, Exact, Scalar, C64};
use crate::simplex::{build_rule, integrate_simplex, monomial_simplex_integral, simplex_volume, RuleKind};
use crate::space::{NormKind, Point};

use super::config::ExperimentConfig;
use super::report::{Check, Report, Table};

const COLUMNS: &[&str] = &["block", "check", "measured", "tolerance", "passed"];

struct Suite {
    table: Table,
    checks: Vec<Check>,
}

impl Suite {
    fn record(&mut self, block: &str, check: &str, measured: f64, tolerance: f64, passed: bool) {
        self.table.push(vec![
            block.into(),
            check.into(),
            measured.into(),
            tolerance.into(),
            passed.into(),
        ]);
        self.checks.push(Check::new(
            format!("{block}/{check}"),
            passed,
            format!("measured {measured:e}, tolerance {tolerance:e}"),
        ));
    }

    fn at_most(&mut self, block: &str, check: &str, measured: f64, tolerance: f64) {
        self.record(block, check, measured, tolerance, measured <= tolerance);
    }

    fn exact_zero(&mut self, block: &str, check: &str, all_zero: bool, worst: f64) {
        self.record(block, check, worst, 0.0, all_zero);
    }
}

fn small_ratio(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> BigRational {
    BigRational::new(
        rng.random_range(-max_num..=max_num).into(),
        rng.random_range(1..=max_den).into(),
    )
}

fn random_exact(rng: &mut ChaCha8Rng, complex: bool) -> Exact {
    let re = small_ratio(rng, 5, 4);
    let im = if complex {
        small_ratio(rng, 5, 4)
    } else {
        BigRational::zero()
    };
    Exact::new(re, im)
}

fn random_exact_point(rng: &mut ChaCha8Rng, dim: usize) -> Point<Exact> {
    let coords = (0..dim)
        .map(|_| Exact::new(small_ratio(rng, 4, 5), small_ratio(rng, 4, 5)))
        .collect();
    Point::new(coords).expect("dim >= 1")
}

/// Random polynomial of total degree exactly `degree` (the leading
/// monomial always has a nonzero coefficient).
fn random_exact_poly(rng: &mut ChaCha8Rng, dim: usize, degree: u32, complex: bool) -> MultiPoly<Exact> {
    let mut terms = Vec::new();
    let count = rng.random_range(1..=6);
    for _ in 0..count {
        let total = rng.random_range(0..=degree);
        terms.push((random_exponents(rng, dim, total), random_exact(rng, complex)));
    }
    let lead = random_exponents(rng, dim, degree);
    terms.push((lead, exact(1, 1, 0, 1)));
    MultiPoly::from_terms(dim, terms).expect("consistent dimension")
}

fn random_exponents(rng: &mut ChaCha8Rng, dim: usize, total: u32) -> Vec<u32> {
    let mut e = vec![0u32; dim];
    for _ in 0..total {
        e[rng.random_range(0..dim)] += 1;
    }
    e
}

fn random_float_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Point<C64> {
    let coords = (0..dim)
        .map(|_| {
            C64::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius)) / (2.0 * dim as f64).sqrt()
        })
        .collect();
    Point::new(coords).expect("dim >= 1")
}

fn derivative_block(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let (mut cauchy, mut polarized, mut fd) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let dim = rng.random_range(1..=3);
        let k = rng.random_range(1..=4);
        let degree = rng.random_range(k as u32..=6);
        let p = random_exact_poly(rng, dim, degree, true).to_float();
        let f = FunctionOracle::polynomial(p.clone());
        let a = random_float_point(rng, dim, 1.0);
        let dirs: Vec<Point<C64>> = (0..k).map(|_| random_float_point(rng, dim, 1.0)).collect();
        let truth = dk_exact(&p, &a, &dirs)?;
        let scale = truth.norm().max(1.0);
        let req = DerivativeRequest::new(a, dirs)?;
        for (method, worst) in [
            (DerivativeMethod::Cauchy, &mut cauchy),
            (DerivativeMethod::Polarized, &mut polarized),
            (DerivativeMethod::FiniteDifference, &mut fd),
        ] {
            let v = dk(&f, &req.clone().method(method))?;
            *worst = worst.max((v - truth).norm() / scale);
        }
    }
    s.at_most("derivative", "cauchy_vs_exact", cauchy, 1e-10);
    s.at_most("derivative", "polarized_vs_exact", polarized, 1e-10);
    s.at_most("derivative", "fd_vs_exact(h=1e-3)", fd, 1e-4);

    // Averaging without the phase factor returns f(a), not a derivative.
    let f = FunctionOracle::exp_linear(Point::from_f64(&[1.0, 2.0])?);
    let a = Point::from_f64(&[0.1, -0.2])?;
    let v = Point::from_f64(&[0.5, 0.25])?;
    let avg = torus_average(&f, &a, std::slice::from_ref(&v), 32, 0.5)?;
    s.at_most(
        "derivative",
        "unphased_average_is_f(a)",
        (avg - f.eval(&a)?).norm(),
        1e-12,
    );
    Ok(())
}

fn quadrature_block(s: &mut Suite) -> Result<()> {
    let mut worst = 0.0f64;
    let mut weights = 0.0f64;
    for k in 1..=5 {
        for total in 0..=7u32 {
            let degree = total | 1;
            let rule = build_rule(k, RuleKind::Gm { degree })?;
            weights = weights.max((rule.weight_sum() - simplex_volume(k)).abs());
            for alpha in compositions(total, k) {
                let truth = crate::scalar::ratio_to_f64(&monomial_simplex_integral(&alpha));
                let got = integrate_simplex(
                    |x| {
                        Ok(C64::new(
                            x.s().iter().zip(&alpha).map(|(v, &e)| v.powi(e as i32)).product(),
                            0.0,
                        ))
                    },
                    &rule,
                )?;
                worst = worst.max((got.value.re - truth).abs());
            }
        }
    }
    s.at_most("quadrature", "gm_monomial_exactness(k<=5,D<=7)", worst, 1e-12);
    s.at_most("quadrature", "weight_sum_is_1/k!", weights, 1e-14);
    Ok(())
}

/// Exponent vectors of length `parts` summing to `total`.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn gm_config(degree: u32) -> KerginConfig {
    KerginConfig::fixed_rule(RuleKind::Gm { degree })
}

fn kergin_block(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    // Interpolation at the nodes, d = 2, degree <= 4, five nodes.
    let (mut exact_ok, mut float_worst) = (true, 0.0f64);
    for _ in 0..5 {
        let degree = rng.random_range(0..=4);
        let p = random_exact_poly(rng, 2, degree, true);
        let nodes = NodeSet::new((0..5).map(|_| random_exact_point(rng, 2)).collect())?;
        let f = FunctionOracle::polynomial(p.to_float());
        let float_nodes = nodes.to_float();
        for node in nodes.points() {
            let (v, _) = poly_kergin_interpolant(&p, &nodes, node, 4)?;
            exact_ok &= v == p.eval(node)?;
            let (fv, _) = kergin_interpolant(&f, &float_nodes, &node.to_float(), 4, &gm_config(7))?;
            float_worst = float_worst.max((fv - f.eval(&node.to_float())?).norm());
        }
    }
    s.exact_zero("kergin", "interpolates_nodes(exact)", exact_ok, 0.0);
    s.at_most("kergin", "interpolates_nodes(float,gm7)", float_worst, 1e-8);

    // Reproduction of polynomials of degree <= n.
    let (mut exact_ok, mut float_worst) = (true, 0.0f64);
    for n in 1..=4usize {
        let p = random_exact_poly(rng, 2, n as u32, true);
        let nodes = NodeSet::new((0..=n).map(|_| random_exact_point(rng, 2)).collect())?;
        let f = FunctionOracle::polynomial(p.to_float());
        for _ in 0..5 {
            let x = random_exact_point(rng, 2);
            let (v, _) = poly_kergin_interpolant(&p, &nodes, &x, n)?;
            exact_ok &= v == p.eval(&x)?;
            let (fv, _) = kergin_interpolant(&f, &nodes.to_float(), &x.to_float(), n, &gm_config(7))?;
            float_worst = float_worst.max((fv - f.eval(&x.to_float())?).norm());
        }
    }
    s.exact_zero("kergin", "reproduces_degree_n(exact)", exact_ok, 0.0);
    s.at_most("kergin", "reproduces_degree_n(float)", float_worst, 1e-8);

    // One variable: agreement with Newton's form.
    let f = FunctionOracle::rational_pole(Point::from_f64(&[1.0])?, NormKind::L1)?;
    let zs: Vec<C64> = (0..6).map(|_| random_float_point(rng, 1, 0.1).coords()[0]).collect();
    let nodes = NodeSet::new(zs.iter().map(|&z| Point::new(vec![z])).collect::<Result<Vec<_>>>()?)?;
    let cfg = KerginConfig::new(
        DerivativeSettings {
            nodes_per_circle: Some(32),
            contour_radius: Some(0.5),
            ..Default::default()
        },
        RulePolicy::Fixed {
            rule: RuleKind::Gm { degree: 13 },
        },
    );
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = random_float_point(rng, 1, 0.1);
        let (v, _) = kergin_interpolant(&f, &nodes, &x, 5, &cfg)?;
        worst = worst.max((v - newton_1d(&f, &zs, x.coords()[0])?).norm());
    }
    s.at_most("kergin", "newton_1d_reduction", worst, 1e-10);

    // Coincident nodes: the Taylor polynomial.
    let mut ok = true;
    for n in 0..=4usize {
        let p = random_exact_poly(rng, 2, 6, true);
        let a = random_exact_point(rng, 2);
        let x = random_exact_point(rng, 2);
        let nodes = NodeSet::repeated(a.clone(), n + 1)?;
        let (v, _) = poly_kergin_interpolant(&p, &nodes, &x, n)?;
        ok &= v == taylor_sum(&p, &a, &x, n)?;
    }
    s.exact_zero("kergin", "taylor_reduction", ok, 0.0);

    // Remainder identity.
    let f = FunctionOracle::rational_pole(Point::from_f64(&[0.5, 0.5])?, NormKind::L1)?;
    let nodes = NodeSet::new((0..5).map(|_| random_float_point(rng, 2, 0.1)).collect())?;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let x = random_float_point(rng, 2, 0.1);
        let (_, partials) = kergin_interpolant(&f, &nodes, &x, 4, &gm_config(7))?;
        for k in 1..=5 {
            let r = kergin_remainder(&f, &nodes, &x, k, &gm_config(7))?;
            let lhs = f.eval(&x)? - partials.partial_sum(k - 1).expect("k <= 5");
            worst = worst.max((lhs - r.value).norm());
        }
    }
    s.at_most("kergin", "remainder_identity(float)", worst, 1e-6);
    let mut ok = true;
    for _ in 0..3 {
        let p = random_exact_poly(rng, 2, 5, true);
        let nodes = NodeSet::new((0..4).map(|_| random_exact_point(rng, 2)).collect())?;
        let x = random_exact_point(rng, 2);
        let (_, partials) = poly_kergin_interpolant(&p, &nodes, &x, 3)?;
        for k in 1..=4 {
            let r = poly_kergin_remainder(&p, &nodes, &x, k)?;
            ok &= p.eval(&x)? - partials.partial_sum(k - 1).expect("k <= 4").clone() == r;
        }
    }
    s.exact_zero("kergin", "remainder_identity(exact)", ok, 0.0);

    // Degree in x: (n+1)-th forward differences along lines vanish.
    let mut ok = true;
    for n in 1..=4usize {
        let p = random_exact_poly(rng, 2, n as u32 + 2, true);
        let nodes = NodeSet::new((0..=n).map(|_| random_exact_point(rng, 2)).collect())?;
        let x0 = random_exact_point(rng, 2);
        let h = random_exact_point(rng, 2);
        let values = (0..=n + 1)
            .map(|j| {
                let x = x0.axpy(&Exact::from_i64(j as i64), &h)?;
                Ok(poly_kergin_interpolant(&p, &nodes, &x, n)?.0)
            })
            .collect::<Result<Vec<_>>>()?;
        ok &= forward_difference(values).is_zero();
    }
    s.exact_zero("kergin", "degree_at_most_n", ok, 0.0);
    Ok(())
}

fn forward_difference(mut values: Vec<Exact>) -> Exact {
    while values.len() > 1 {
        values = values.windows(2).map(|w| w[1].clone() - w[0].clone()).collect();
    }
    values.pop().unwrap_or_else(Exact::zero)
}

/// For real data in one variable, `(N - f)^{(k)}` must vanish somewhere in
/// the hull of any `k + 1` nodes. Checked on consecutive windows of the
/// sorted nodes by looking for a sign change on a grid.
fn mean_value_block(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut ok = true;
    let mut newton_matches = true;
    for n in 1..=4usize {
        let f = random_exact_poly(rng, 1, n as u32 + 3, false);
        let mut zs: Vec<BigRational> = Vec::new();
        while zs.len() < n + 1 {
            let z = small_ratio(rng, 8, 9);
            if !zs.contains(&z) {
                zs.push(z);
            }
        }
        zs.sort();
        let newton = newton_poly(&f, &zs)?;
        let nodes = NodeSet::new(
            zs.iter()
                .map(|z| Point::new(vec![Exact::from_ratio(z)]))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let probe = Point::new(vec![exact(1, 3, 0, 1)])?;
        newton_matches &= poly_kergin_interpolant(&f, &nodes, &probe, n)?.0 == newton.eval(&probe)?;
        let err = newton.sub(&f)?;
        let one = Point::new(vec![Exact::from_i64(1)])?;
        for k in 0..=n {
            let dk = err.derive_along(&vec![one.clone(); k])?;
            for w in zs.windows(k + 1) {
                ok &= has_root_on(&dk, &w[0], &w[k])?;
            }
        }
    }
    s.exact_zero("mean_value_1d", "kergin_matches_newton", newton_matches, 0.0);
    s.exact_zero("mean_value_1d", "derivative_of_error_has_root_in_hull", ok, 0.0);
    Ok(())
}

/// Newton interpolation polynomial of a real polynomial at distinct nodes.
fn newton_poly(f: &MultiPoly<Exact>, zs: &[BigRational]) -> Result<MultiPoly<Exact>> {
    let at = |z: &BigRational| Point::new(vec![Exact::from_ratio(z)]);
    let mut level: Vec<Exact> = zs.iter().map(|z| f.eval(&at(z)?)).collect::<Result<_>>()?;
    let mut coeffs = vec![level[0].clone()];
    for j in 1..zs.len() {
        level = (0..zs.len() - j)
            .map(|i| {
                (level[i + 1].clone() - level[i].clone()) / Exact::from_ratio(&(zs[i + j].clone() - zs[i].clone()))
            })
            .collect();
        coeffs.push(level[0].clone());
    }
    let x = MultiPoly::<Exact>::variable(1, 0);
    let mut basis = MultiPoly::constant(1, Exact::from_i64(1));
    let mut out = MultiPoly::zero(1);
    for (j, c) in coeffs.iter().enumerate() {
        out = out.add(&basis.scale(c))?;
        basis = basis.mul(&x.sub(&MultiPoly::constant(1, Exact::from_ratio(&zs[j])))?)?;
    }
    Ok(out)
}

fn has_root_on(p: &MultiPoly<Exact>, lo: &BigRational, hi: &BigRational) -> Result<bool> {
    const GRID: i64 = 64;
    let mut sign_seen = (false, false);
    for i in 0..=GRID {
        let t = lo.clone() + (hi.clone() - lo.clone()) * BigRational::new(i.into(), GRID.into());
        let v = p.eval(&Point::new(vec![Exact::from_ratio(&t)])?)?.re;
        if v.is_zero() {
            return Ok(true);
        }
        if v.is_positive() {
            sign_seen.0 = true;
        } else {
            sign_seen.1 = true;
        }
    }
    Ok(sign_seen.0 && sign_seen.1)
}

pub fn run_validate(cfg: &ExperimentConfig) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut suite = Suite {
        table: Table::new(COLUMNS),
        checks: Vec::new(),
    };
    derivative_block(&mut suite, &mut rng)?;
    quadrature_block(&mut suite)?;
    kergin_block(&mut suite, &mut rng)?;
    mean_value_block(&mut suite, &mut rng)?;

    let mut report = Report::new("validate", cfg.hash(), cfg.seed, suite.table);
    report.note(
        "relative derivative errors are |computed - exact| / max(|exact|, 1); a tolerance of 0 means exact equality",
    );
    report.note("mean_value_1d is a spot check on consecutive node windows, not a proof");
    for c in suite.checks {
        report.check(c);
    }
    Ok(report)
}
