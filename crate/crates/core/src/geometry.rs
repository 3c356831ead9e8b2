//! Sufficient conditions for convergence of the Kergin series.
//!
//! With nodes in a compact convex `L ⊂ U`, evaluation set `V`,
//! `W = conv(L ∪ V)` and `W'` the balanced convex hull of `L + V`, the
//! series converges on compact subsets of `V` whenever `W + ρW' ⊂ U` for
//! some `ρ > e`. For a ball `U` this is certified by the triangle
//! inequality: `max_{w ∈ W} ||w|| + ρ max_{u ∈ W'} ||u|| < radius(U)`.
//! Norms are convex and invariant under unit-modulus scaling, so both
//! maxima are attained at generators.

use std::f64::consts::{E, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::Serialize;

use crate::error::{KerginError, Result};
use crate::oracle::DomainSpec;
use crate::scalar::C64;
use crate::space::{NormKind, Point};

/// Finite set of generators of a hull.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    points: Vec<Point<C64>>,
}

impl GeneratorSet {
    pub fn new(points: Vec<Point<C64>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| KerginError::InvalidArgument("a generator set needs at least one point".into()))?;
        let dim = first.dim();
        for p in &points {
            p.check_dim(dim)?;
        }
        Ok(GeneratorSet { points })
    }

    pub fn origin(dim: usize) -> Self {
        GeneratorSet {
            points: vec![Point::zeros(dim)],
        }
    }

    pub fn points(&self) -> &[Point<C64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        GeneratorSet {
            points: self.points.iter().map(|p| p.scale(&C64::new(factor, 0.0))).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        if margin > 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Coordinates as `[re, im]` pairs, for reports.
pub fn coords_pairs(p: &Point<C64>) -> Vec<[f64; 2]> {
    p.coords().iter().map(|z| [z.re, z.im]).collect()
}

/// The generator pair that realizes the margin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witnesses {
    /// Index into `L` followed by `V` of the farthest generator of `W`.
    pub w_index: usize,
    pub w: Vec<[f64; 2]>,
    pub w_norm: f64,
    pub l_index: usize,
    pub v_index: usize,
    /// `l + v`, the farthest generator of `W'`.
    pub u: Vec<[f64; 2]>,
    pub u_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    /// `radius - (max ||w|| + ρ max ||l + v||)`; positive slack on success.
    pub margin: f64,
    pub rho: f64,
    pub radius: f64,
    pub norm: NormKind,
    /// `generators` or `analytic_balls`.
    pub method: &'static str,
    pub witnesses: Option<Witnesses>,
}

impl Certificate {
    /// Margin recomputed from the stored witness points alone.
    pub fn recompute_margin(&self) -> Option<f64> {
        let w = self.witnesses.as_ref()?;
        let norm_of = |pairs: &[[f64; 2]]| {
            self.norm
                .of_moduli(pairs.iter().map(|[re, im]| C64::new(*re, *im).norm()))
        };
        Some(self.radius - (norm_of(&w.w) + self.rho * norm_of(&w.u)))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(KerginError::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// Lowest-index argmax of `values`.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values.enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, v)| if v > best.1 { (i, v) } else { best },
    )
}

/// Triangle-inequality certificate of `W + ρW' ⊂ U` for a ball `U`
/// centered at the origin.
pub fn containment_certificate(l: &GeneratorSet, v: &GeneratorSet, rho: f64, u: &DomainSpec) -> Result<Certificate> {
    check_rho(rho)?;
    let (radius, norm) = u.origin_ball().ok_or_else(|| {
        KerginError::InvalidArgument("containment certificates need an origin-centered ball U".into())
    })?;
    if l.dim() != v.dim() {
        return Err(KerginError::DimensionMismatch {
            expected: l.dim(),
            found: v.dim(),
        });
    }
    let w_gens: Vec<&Point<C64>> = l.points().iter().chain(v.points()).collect();
    let (w_index, w_norm) = argmax(w_gens.iter().map(|p| p.norm(norm)));

    let mut sums = Vec::with_capacity(l.points().len() * v.points().len());
    for a in l.points() {
        for b in v.points() {
            sums.push(a.add(b)?);
        }
    }
    let (pair_index, u_norm) = argmax(sums.iter().map(|p| p.norm(norm)));
    let (l_index, v_index) = (pair_index / v.points().len(), pair_index % v.points().len());

    let margin = radius - (w_norm + rho * u_norm);
    Ok(Certificate {
        verdict: Verdict::from_margin(margin),
        margin,
        rho,
        radius,
        norm,
        method: "generators",
        witnesses: Some(Witnesses {
            w_index,
            w: coords_pairs(w_gens[w_index]),
            w_norm,
            l_index,
            v_index,
            u: coords_pairs(&sums[pair_index]),
            u_norm,
        }),
    })
}

/// Analytic form for origin-centered balls `L ⊂ B(r')`, `V ⊂ B(r)`:
/// `W ⊂ B(max(r, r'))` and `W' ⊂ B(r + r')`.
pub fn ball_containment_certificate(
    r: f64,
    r_prime: f64,
    rho: f64,
    radius: f64,
    norm: NormKind,
) -> Result<Certificate> {
    check_rho(rho)?;
    if !(r >= 0.0 && r_prime >= 0.0) {
        return Err(KerginError::InvalidArgument("radii must be nonnegative".into()));
    }
    let margin = radius - (r.max(r_prime) + rho * (r + r_prime));
    Ok(Certificate {
        verdict: Verdict::from_margin(margin),
        margin,
        rho,
        radius,
        norm,
        method: "analytic_balls",
        witnesses: None,
    })
}

/// Result of the radius condition `(1 - max(r, r')) / (r + r') > e`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusCheck {
    pub verdict: Verdict,
    pub r: f64,
    pub r_prime: f64,
    pub ratio: f64,
    /// `ratio - e`.
    pub margin: f64,
    /// Admissible `ρ ∈ (e, ratio)` when nonempty.
    pub rho_interval: Option<(f64, f64)>,
    pub erratum: Option<String>,
}

/// Radius pair sometimes quoted as satisfying the condition; it gives
/// ratio `e/2`.
pub fn misquoted_radius() -> f64 {
    1.0 / (E + 1.0)
}

pub fn example1_check(r: f64, r_prime: f64) -> Result<RadiusCheck> {
    if !(r > 0.0 && r_prime > 0.0 && r.max(r_prime) < 1.0) {
        return Err(KerginError::InvalidArgument(format!(
            "radii must satisfy 0 < r, r' and max(r, r') < 1; got r={r}, r'={r_prime}"
        )));
    }
    let ratio = (1.0 - r.max(r_prime)) / (r + r_prime);
    let margin = ratio - E;
    let verdict = Verdict::from_margin(margin);
    let rho_interval = verdict.passed().then_some((E, ratio));
    let quoted = misquoted_radius();
    let erratum = ((r - quoted).abs() < 1e-12 && (r_prime - quoted).abs() < 1e-12).then(|| {
        format!(
            "r = r' = 1/(e+1) is sometimes cited as satisfying (1 - max(r,r'))/(r+r') > e, \
             but the ratio is e/2 = {:.6} < e; for r = r' the condition holds iff r < 1/(2e+1) = {:.6}",
            E / 2.0,
            1.0 / (2.0 * E + 1.0)
        )
    });
    Ok(RadiusCheck {
        verdict,
        r,
        r_prime,
        ratio,
        margin,
        rho_interval,
        erratum,
    })
}

/// Both forms of the remainder bound for degree `k - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StirlingBound {
    /// `(k/ρ)^k M / k!`
    pub rigorous: f64,
    /// `(e/ρ)^k M / sqrt(2πk)`
    pub asymptotic: f64,
}

pub fn stirling_error_bound(k: usize, rho: f64, m: f64) -> StirlingBound {
    assert!(k >= 1, "bound is defined for k >= 1");
    let kf = k as f64;
    let ln_factorial: f64 = (2..=k).map(|j| (j as f64).ln()).sum();
    let rigorous = m * (kf * (kf / rho).ln() - ln_factorial).exp();
    let asymptotic = m * (kf * (E / rho).ln()).exp() / (2.0 * PI * kf).sqrt();
    StirlingBound { rigorous, asymptotic }
}

/// Seeded points on the sphere `||x|| = radius`, preceded by the axis
/// points `±radius e_j` (the extremal generators for coordinate norms).
pub fn sample_sphere(
    dim: usize,
    radius: f64,
    norm: NormKind,
    count: usize,
    complex: bool,
    seed: u64,
) -> Vec<Point<C64>> {
    let mut out = Vec::with_capacity(2 * dim + count);
    for j in 0..dim {
        let e = Point::<C64>::basis(dim, j);
        out.push(e.scale(&C64::new(radius, 0.0)));
        out.push(e.scale(&C64::new(-radius, 0.0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < 2 * dim + count {
        let p = gaussian_point(&mut rng, dim, complex);
        let n = p.norm(norm);
        if n > 0.0 {
            out.push(p.scale(&C64::new(radius / n, 0.0)));
        }
    }
    out
}

/// Seeded points strictly inside the ball `||x|| < radius`: normalized
/// Gaussian directions with radial factor `U^{1/D}`, `D` the real
/// dimension.
pub fn sample_ball(dim: usize, radius: f64, norm: NormKind, count: usize, complex: bool, seed: u64) -> Vec<Point<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let real_dim = if complex { 2 * dim } else { dim } as f64;
    let unit = Uniform::new(0.0f64, 1.0).expect("valid range");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = gaussian_point(&mut rng, dim, complex);
        let n = p.norm(norm);
        let t: f64 = unit.sample(&mut rng);
        if n > 0.0 && t > 0.0 {
            out.push(p.scale(&C64::new(radius * t.powf(1.0 / real_dim) / n, 0.0)));
        }
    }
    out
}

fn gaussian_point(rng: &mut ChaCha8Rng, dim: usize, complex: bool) -> Point<C64> {
    let coords = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = if complex { StandardNormal.sample(rng) } else { 0.0 };
            C64::new(re, im)
        })
        .collect();
    Point::new(coords).expect("dim >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_ball(dim: usize, norm: NormKind) -> DomainSpec {
        DomainSpec::ball_at_origin(dim, 1.0, norm)
    }

    #[test]
    fn origin_generators_pass_for_any_rho() {
        for rho in [0.5, 3.0, 1e6] {
            let c = containment_certificate(
                &GeneratorSet::origin(3),
                &GeneratorSet::origin(3),
                rho,
                &unit_ball(3, NormKind::L2),
            )
            .unwrap();
            assert_eq!(c.verdict, Verdict::Pass);
            assert_eq!(c.margin, 1.0);
        }
    }

    #[test]
    fn sampled_sphere_setup() {
        let l = GeneratorSet::new(sample_sphere(3, 0.1, NormKind::L2, 40, true, 1)).unwrap();
        let v = GeneratorSet::new(sample_sphere(3, 0.1, NormKind::L2, 40, true, 2)).unwrap();
        let pass = containment_certificate(&l, &v, 3.0, &unit_ball(3, NormKind::L2)).unwrap();
        assert_eq!(pass.verdict, Verdict::Pass);
        assert!((pass.margin - 0.3).abs() < 1e-12, "{}", pass.margin);
        let fail = containment_certificate(&l, &v, 5.0, &unit_ball(3, NormKind::L2)).unwrap();
        assert_eq!(fail.verdict, Verdict::Fail);
        assert!((fail.margin + 0.1).abs() < 1e-12);
        assert!((fail.recompute_margin().unwrap() - fail.margin).abs() < 1e-12);

        let analytic = ball_containment_certificate(0.1, 0.1, 3.0, 1.0, NormKind::L2).unwrap();
        assert!((analytic.margin - 0.3).abs() < 1e-12);
        assert!(analytic.recompute_margin().is_none());
    }

    #[test]
    fn certificate_errors() {
        let g = GeneratorSet::origin(2);
        assert!(containment_certificate(&g, &g, 0.0, &unit_ball(2, NormKind::L1)).is_err());
        assert!(containment_certificate(&g, &g, 3.0, &DomainSpec::AllSpace).is_err());
        let shifted = DomainSpec::Ball {
            center: Point::from_f64(&[0.5, 0.0]).unwrap(),
            radius: 1.0,
            norm: NormKind::L1,
        };
        assert!(containment_certificate(&g, &g, 3.0, &shifted).is_err());
    }

    #[test]
    fn radius_condition_examples() {
        let c = example1_check(0.1, 0.1).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!((c.ratio - 4.5).abs() < 1e-12);
        assert_eq!(c.rho_interval, Some((E, c.ratio)));
        assert!(c.erratum.is_none());

        let r = misquoted_radius();
        let c = example1_check(r, r).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!((c.ratio - E / 2.0).abs() < 1e-12);
        assert!(c.rho_interval.is_none());
        assert!(c.erratum.is_some());

        let threshold = 1.0 / (2.0 * E + 1.0);
        let at = example1_check(threshold, threshold).unwrap();
        assert!(at.margin.abs() < 1e-12);
        assert!(
            example1_check(threshold * (1.0 + 1e-9), threshold * (1.0 + 1e-9))
                .unwrap()
                .verdict
                == Verdict::Fail
        );
        assert!(
            example1_check(threshold * (1.0 - 1e-9), threshold * (1.0 - 1e-9))
                .unwrap()
                .verdict
                == Verdict::Pass
        );

        let c = example1_check(0.15, 0.15).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!((c.ratio - 0.85 / 0.3).abs() < 1e-12);

        assert!(example1_check(0.0, 0.1).is_err());
        assert!(example1_check(1.0, 0.1).is_err());
    }

    #[test]
    fn stirling_examples() {
        let b = stirling_error_bound(1, E * E, 1.0);
        assert!((b.asymptotic - (-1.0f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((b.asymptotic - 0.1468).abs() < 1e-4);
        assert!((b.rigorous - 1.0 / (E * E)).abs() < 1e-15);
        assert!((b.rigorous - 0.1353).abs() < 1e-4);
    }

    #[test]
    fn stirling_asymptotics() {
        let rho = 4.0;
        let mut prev = stirling_error_bound(1, rho, 1.0).asymptotic;
        for k in 2..200 {
            let cur = stirling_error_bound(k, rho, 1.0).asymptotic;
            assert!(cur < prev);
            prev = cur;
        }
        let k = 400;
        let ratio_r = stirling_error_bound(k + 1, rho, 1.0).rigorous / stirling_error_bound(k, rho, 1.0).rigorous;
        let ratio_a = stirling_error_bound(k + 1, rho, 1.0).asymptotic / stirling_error_bound(k, rho, 1.0).asymptotic;
        assert!((ratio_r - E / rho).abs() < 1e-2);
        assert!((ratio_a - E / rho).abs() < 1e-2);
        let b = stirling_error_bound(50, 8.0, 1.0);
        assert!(b.rigorous <= b.asymptotic);
        assert!((b.rigorous / b.asymptotic - 1.0).abs() < 0.01);
    }

    #[test]
    fn samples_respect_radius() {
        for norm in [NormKind::L1, NormKind::L2, NormKind::Linf] {
            for p in sample_sphere(3, 0.2, norm, 20, true, 5) {
                assert!((p.norm(norm) - 0.2).abs() < 1e-14);
            }
            for p in sample_ball(3, 0.2, norm, 50, true, 5) {
                assert!(p.norm(norm) < 0.2);
            }
        }
        assert_eq!(
            sample_ball(2, 1.0, NormKind::L2, 5, false, 9),
            sample_ball(2, 1.0, NormKind::L2, 5, false, 9)
        );
    }

    proptest! {
        #[test]
        fn radius_check_is_symmetric(r in 0.001..0.99f64, rp in 0.001..0.99f64) {
            let (a, b) = (example1_check(r, rp).unwrap(), example1_check(rp, r).unwrap());
            prop_assert_eq!(a.ratio, b.ratio);
            prop_assert_eq!(a.margin, b.margin);
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert_eq!(a.rho_interval, b.rho_interval);
        }

        #[test]
        fn margin_decreases_in_rho_and_scale(seed in 0u64..500, rho in 0.5..10.0f64, bump in 0.01..2.0f64, scale in 1.01..3.0f64) {
            let l = GeneratorSet::new(sample_ball(2, 0.1, NormKind::L1, 5, true, seed)).unwrap();
            let v = GeneratorSet::new(sample_ball(2, 0.1, NormKind::L1, 5, true, seed + 1)).unwrap();
            let u = unit_ball(2, NormKind::L1);
            let base = containment_certificate(&l, &v, rho, &u).unwrap();
            let more_rho = containment_certificate(&l, &v, rho + bump, &u).unwrap();
            let scaled = containment_certificate(&l.scaled(scale), &v.scaled(scale), rho, &u).unwrap();
            prop_assert!(more_rho.margin < base.margin);
            prop_assert!(scaled.margin < base.margin);
            prop_assert!((base.recompute_margin().unwrap() - base.margin).abs() < 1e-12);
        }
    }
}
