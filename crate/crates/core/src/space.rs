//! Points of C^d, the three supported norms, and simplex combinations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KerginError, Result};
use crate::scalar::{Scalar, C64};

/// Slack allowed when validating simplex coordinates produced by floating
/// point quadrature rules.
const SIMPLEX_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    L1,
    L2,
    Linf,
}

impl NormKind {
    /// The norm whose unit ball is polar to this one.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::Linf,
            NormKind::L2 => NormKind::L2,
            NormKind::Linf => NormKind::L1,
        }
    }

    /// Applies the norm to a list of coordinate moduli.
    pub fn of_moduli(self, moduli: impl Iterator<Item = f64>) -> f64 {
        match self {
            NormKind::L1 => moduli.sum(),
            NormKind::L2 => moduli.map(|m| m * m).sum::<f64>().sqrt(),
            NormKind::Linf => moduli.fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::Linf => "linf",
        };
        f.write_str(name)
    }
}

/// A vector in C^d. The dimension travels with the value and every binary
/// operation checks it.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<S> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return Err(KerginError::EmptyPoint);
        }
        Ok(Point { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Point {
            coords: vec![S::zero(); dim],
        }
    }

    /// The standard basis vector `e_{index+1}` (zero-based `index`).
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut p = Self::zeros(dim);
        p.coords[index] = S::one();
        p
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| S::from_f64(x)).collect())
    }

    pub fn from_complex(coords: &[C64]) -> Result<Self> {
        Self::new(coords.iter().map(|&z| S::from_complex(z)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(KerginError::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        other.check_dim(self.dim())?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        other.check_dim(self.dim())?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    pub fn scale(&self, factor: &S) -> Self {
        Point {
            coords: self.coords.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: &S, other: &Self) -> Result<Self> {
        other.check_dim(self.dim())?;
        Ok(self.zip_with(other, |a, b| a.clone() + factor.clone() * b.clone()))
    }

    pub fn neg(&self) -> Self {
        Point {
            coords: self.coords.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// Bilinear pairing `sum u_j x_j` (no conjugation).
    pub fn dot(&self, other: &Self) -> Result<S> {
        other.check_dim(self.dim())?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        kind.of_moduli(self.coords.iter().map(Scalar::modulus))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn to_float(&self) -> Point<C64> {
        Point {
            coords: self.coords.iter().map(Scalar::to_complex).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Point {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl<S: Scalar> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let z = c.to_complex();
            if z.im == 0.0 {
                write!(f, "{}", z.re)?;
            } else {
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
        }
        f.write_str(")")
    }
}

/// `norm` as a free function over any scalar path.
pub fn norm<S: Scalar>(p: &Point<S>, kind: NormKind) -> f64 {
    p.norm(kind)
}

/// A point `(s_1, ..., s_k)` of the standard simplex `S_k`, with the implied
/// barycentric coordinate `s_0 = 1 - sum s_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexCoords {
    s: Vec<f64>,
}

impl SimplexCoords {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(KerginError::InvalidArgument("simplex coordinates need k >= 1".into()));
        }
        let total: f64 = s.iter().sum();
        if s.iter().any(|&x| !x.is_finite() || x < -SIMPLEX_SLACK) || total > 1.0 + SIMPLEX_SLACK {
            return Err(KerginError::OutsideSimplex { coords: s });
        }
        Ok(SimplexCoords { s })
    }

    /// Builds coordinates from a full barycentric vector `(s_0, ..., s_k)`.
    pub fn from_barycentric(bary: &[f64]) -> Result<Self> {
        if bary.len() < 2 {
            return Err(KerginError::InvalidArgument(
                "barycentric coordinates need at least two entries".into(),
            ));
        }
        Self::new(bary[1..].to_vec())
    }

    /// Simplex dimension `k`.
    pub fn k(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn s0(&self) -> f64 {
        1.0 - self.s.iter().sum::<f64>()
    }

    /// `(s_0, s_1, ..., s_k)`.
    pub fn barycentric(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.s.len() + 1);
        out.push(self.s0());
        out.extend_from_slice(&self.s);
        out
    }
}

/// `s_0 node_0 + s_1 node_1 + ... + s_k node_k`, where the last point is
/// replaced by `x` when given (the base point of the remainder integrand).
pub fn affine_point<S: Scalar>(nodes: &[Point<S>], s: &SimplexCoords, x: Option<&Point<S>>) -> Result<Point<S>> {
    let k = s.k();
    let expected_nodes = if x.is_some() { k } else { k + 1 };
    if nodes.len() != expected_nodes {
        return Err(KerginError::InsufficientNodes {
            needed: expected_nodes,
            available: nodes.len(),
        });
    }
    let dim = nodes
        .first()
        .map(Point::dim)
        .or_else(|| x.map(Point::dim))
        .ok_or(KerginError::EmptyPoint)?;
    let weights = s.barycentric();
    let mut acc = Point::<S>::zeros(dim);
    let points = nodes.iter().chain(x);
    for (w, p) in weights.iter().zip(points) {
        acc = acc.axpy(&S::from_f64(*w), p)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use proptest::prelude::*;

    fn real(coords: &[f64]) -> Point<C64> {
        Point::from_f64(coords).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Point::<C64>::basis(3, 0).norm(NormKind::L1), 1.0);
        assert_eq!(real(&[1.0, 1.0]).norm(NormKind::L1), 2.0);
        assert_eq!(real(&[3.0, 4.0]).norm(NormKind::L2), 5.0);
        assert_eq!(real(&[3.0, -4.0]).norm(NormKind::Linf), 4.0);
    }

    #[test]
    fn dimension_is_checked() {
        let a = real(&[1.0, 2.0]);
        let b = real(&[1.0]);
        assert_eq!(a.add(&b), Err(KerginError::DimensionMismatch { expected: 2, found: 1 }));
        assert_eq!(Point::<C64>::new(vec![]), Err(KerginError::EmptyPoint));
    }

    #[test]
    fn affine_point_examples() {
        let p0 = real(&[1.0, 2.0]);
        let p1 = real(&[3.0, -2.0]);
        let x = real(&[7.0, 7.0]);
        let origin = SimplexCoords::new(vec![0.0]).unwrap();
        assert_eq!(affine_point(&[p0.clone(), p1.clone()], &origin, None).unwrap(), p0);

        let top = SimplexCoords::new(vec![1.0]).unwrap();
        assert_eq!(affine_point(std::slice::from_ref(&p0), &top, Some(&x)).unwrap(), x);

        let half = SimplexCoords::new(vec![0.5]).unwrap();
        assert_eq!(
            affine_point(&[p0.clone(), p1.clone()], &half, None).unwrap(),
            real(&[2.0, 0.0])
        );

        assert!(affine_point(&[p0], &half, None).is_err());
    }

    #[test]
    fn simplex_coords_validation() {
        assert!(SimplexCoords::new(vec![0.6, 0.6]).is_err());
        assert!(SimplexCoords::new(vec![-0.1, 0.2]).is_err());
        let s = SimplexCoords::new(vec![0.25, 0.5]).unwrap();
        assert_eq!(s.s0(), 0.25);
        assert_eq!(s.barycentric(), vec![0.25, 0.25, 0.5]);
    }

    #[test]
    fn exact_affine_point_is_exact() {
        let p0 = Point::<Exact>::basis(2, 0);
        let p1 = Point::<Exact>::basis(2, 1);
        let s = SimplexCoords::new(vec![0.25]).unwrap();
        let a = affine_point(&[p0, p1], &s, None).unwrap();
        assert_eq!(a, Point::<Exact>::from_f64(&[0.75, 0.25]).unwrap());
    }

    fn complex_vec(d: usize) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), d)
            .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
    }

    fn simplex_point(k: usize) -> impl Strategy<Value = SimplexCoords> {
        prop::collection::vec(0.01..1.0f64, k + 1).prop_map(|raw| {
            let total: f64 = raw.iter().sum();
            let bary: Vec<f64> = raw.iter().map(|x| x / total).collect();
            SimplexCoords::new(bary[1..].to_vec())
                .unwrap_or_else(|_| SimplexCoords::new(vec![0.0; bary.len() - 1]).unwrap())
        })
    }

    proptest! {
        #[test]
        fn norm_axioms(a in complex_vec(3), b in complex_vec(3), scale in (-3.0..3.0f64, -3.0..3.0f64)) {
            let pa = Point::new(a).unwrap();
            let pb = Point::new(b).unwrap();
            let alpha = C64::new(scale.0, scale.1);
            for kind in [NormKind::L1, NormKind::L2, NormKind::Linf] {
                let sum = pa.add(&pb).unwrap();
                prop_assert!(pa.norm(kind) >= 0.0);
                prop_assert!(sum.norm(kind) <= pa.norm(kind) + pb.norm(kind) + 1e-12);
                let scaled = pa.scale(&alpha).norm(kind);
                prop_assert!((scaled - alpha.norm() * pa.norm(kind)).abs() <= 1e-10 * (1.0 + scaled));
                prop_assert_eq!(Point::<C64>::zeros(3).norm(kind), 0.0);
            }
        }

        #[test]
        fn norm_is_phase_invariant(a in complex_vec(4), phases in prop::collection::vec(0.0..std::f64::consts::TAU, 4)) {
            let p = Point::new(a.clone()).unwrap();
            let rotated = Point::new(
                a.iter().zip(&phases).map(|(z, t)| z * C64::from_polar(1.0, *t)).collect(),
            ).unwrap();
            for kind in [NormKind::L1, NormKind::L2, NormKind::Linf] {
                prop_assert!((p.norm(kind) - rotated.norm(kind)).abs() <= 1e-12 * (1.0 + p.norm(kind)));
            }
        }

        #[test]
        fn affine_point_is_convex_combination(
            nodes in prop::collection::vec(complex_vec(2), 4),
            s in simplex_point(3),
        ) {
            let pts: Vec<Point<C64>> = nodes.into_iter().map(|c| Point::new(c).unwrap()).collect();
            let a = affine_point(&pts, &s, None).unwrap();
            let bary = s.barycentric();
            prop_assert!((bary.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(bary.iter().all(|&w| w >= -1e-12));
            // Any norm ball containing the generators contains the combination.
            let radius = pts.iter().map(|p| p.norm(NormKind::L2)).fold(0.0, f64::max);
            prop_assert!(a.norm(NormKind::L2) <= radius + 1e-9);
        }

        #[test]
        fn exact_and_float_paths_agree(
            nums in prop::collection::vec((-1000i64..1000, 1i64..1000, -1000i64..1000, 1i64..1000), 4)
        ) {
            let ex: Vec<crate::scalar::Exact> = nums
                .iter()
                .map(|&(a, b, c, d)| crate::scalar::exact(a, b, c, d))
                .collect();
            let fl: Vec<C64> = ex.iter().map(Scalar::to_complex).collect();
            let ex_val = (ex[0].clone() * ex[1].clone() + ex[2].clone()) - ex[3].clone() * ex[0].clone();
            let fl_val = (fl[0] * fl[1] + fl[2]) - fl[3] * fl[0];
            let diff = (ex_val.to_complex() - fl_val).norm();
            prop_assert!(diff <= 1e-12 * (1.0 + fl_val.norm()));
            let denom = ex[1].clone() + crate::scalar::exact_int(2000);
            let q_ex = ex[0].clone() / denom.clone();
            let q_fl = fl[0] / denom.to_complex();
            prop_assert!((q_ex.to_complex() - q_fl).norm() <= 1e-12 * (1.0 + q_fl.norm()));
        }
    }
}
