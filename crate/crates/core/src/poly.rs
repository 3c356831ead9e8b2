//! Sparse multivariate polynomials over either scalar path.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KerginError, Result};
use crate::scalar::{f64_to_ratio, format_ratio, parse_ratio, Exact, Scalar, C64};
use crate::space::Point;

/// Exponent multi-index, one entry per variable.
pub type Exponents = Vec<u32>;

/// A polynomial in `dim` complex variables stored as a map from exponent
/// multi-indices to nonzero coefficients.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<S> {
    dim: usize,
    terms: BTreeMap<Exponents, S>,
}

impl<S: Scalar> MultiPoly<S> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate function `x_{index+1}`.
    pub fn variable(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut exps = vec![0; dim];
        exps[index] = 1;
        Self::monomial(exps, S::one()).expect("valid exponents")
    }

    pub fn monomial(exponents: Exponents, coeff: S) -> Result<Self> {
        let mut p = Self::zero(exponents.len().max(1));
        if exponents.is_empty() {
            return Err(KerginError::EmptyPoint);
        }
        p.add_term(exponents, coeff);
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated exponents.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Exponents, S)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (exps, c) in terms {
            if exps.len() != dim {
                return Err(KerginError::DimensionMismatch {
                    expected: dim,
                    found: exps.len(),
                });
            }
            p.add_term(exps, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Exponents, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> S {
        self.terms.get(exps).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(KerginError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, factor: &S) -> Self {
        if factor.is_zero() {
            return Self::zero(self.dim);
        }
        self.map_coeffs(|c| c.clone() * factor.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    fn map_coeffs(&self, f: impl Fn(&S) -> S) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn eval(&self, x: &Point<S>) -> Result<S> {
        x.check_dim(self.dim)?;
        let mut powers: Vec<Vec<S>> = x.coords().iter().map(|c| vec![S::one(), c.clone()]).collect();
        let mut total = S::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (var, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let table = &mut powers[var];
                while table.len() <= e as usize {
                    let next = table[table.len() - 1].clone() * table[1].clone();
                    table.push(next);
                }
                term = term * table[e as usize].clone();
            }
            total = total + term;
        }
        Ok(total)
    }

    /// Directional derivative `sum_j v_j dp/dx_j`.
    pub fn derive(&self, v: &Point<S>) -> Result<Self> {
        v.check_dim(self.dim)?;
        let mut out = Self::zero(self.dim);
        for (exps, coeff) in &self.terms {
            for (var, dir) in v.coords().iter().enumerate() {
                let e = exps[var];
                if e == 0 || dir.is_zero() {
                    continue;
                }
                let mut lowered = exps.clone();
                lowered[var] -= 1;
                out.add_term(lowered, coeff.clone() * dir.clone() * S::from_i64(e as i64));
            }
        }
        Ok(out)
    }

    /// Iterated directional derivative along each direction in turn.
    pub fn derive_along(&self, directions: &[Point<S>]) -> Result<Self> {
        directions.iter().try_fold(self.clone(), |p, v| p.derive(v))
    }

    /// Substitutes `x_i -> forms[i]`, where all forms live in a common
    /// (possibly different) dimension.
    pub fn compose(&self, forms: &[MultiPoly<S>]) -> Result<Self> {
        if forms.len() != self.dim {
            return Err(KerginError::DimensionMismatch {
                expected: self.dim,
                found: forms.len(),
            });
        }
        let target_dim = forms.first().map(|f| f.dim).unwrap_or(1);
        if let Some(bad) = forms.iter().find(|f| f.dim != target_dim) {
            return Err(KerginError::DimensionMismatch {
                expected: target_dim,
                found: bad.dim,
            });
        }
        let mut powers: Vec<Vec<MultiPoly<S>>> = forms
            .iter()
            .map(|f| vec![MultiPoly::constant(target_dim, S::one()), f.clone()])
            .collect();
        let mut out = MultiPoly::zero(target_dim);
        for (exps, coeff) in &self.terms {
            let mut term = MultiPoly::constant(target_dim, coeff.clone());
            for (var, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let table = &mut powers[var];
                while table.len() <= e as usize {
                    let next = table[table.len() - 1].mul(&table[1])?;
                    table.push(next);
                }
                term = term.mul(&table[e as usize])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    pub fn to_float(&self) -> MultiPoly<C64> {
        let mut out = MultiPoly::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.to_complex());
        }
        out
    }

    /// Parses serialized coefficient records.
    pub fn from_records(dim: usize, records: &[PolyTerm]) -> Result<Self> {
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let re = r.coeff_re.to_ratio()?;
            let im = r.coeff_im.to_ratio()?;
            let c = S::from_ratio(&re) + S::from_ratio(&im) * imaginary_unit::<S>();
            terms.push((r.exponents.clone(), c));
        }
        Self::from_terms(dim, terms)
    }
}

fn imaginary_unit<S: Scalar>() -> S {
    S::from_complex(C64::new(0.0, 1.0))
}

/// Free-function form of [`MultiPoly::derive`].
pub fn derive_poly<S: Scalar>(p: &MultiPoly<S>, v: &Point<S>) -> Result<MultiPoly<S>> {
    p.derive(v)
}

/// `sum_{n=1}^{d} n! x_1 x_2 ... x_n`: the finite truncation of the entire
/// function on l^1 whose Kergin series at the origin diverges for the
/// nodes `e_1, e_2, ...`.
pub fn build_divergence_poly<S: Scalar>(d: usize) -> MultiPoly<S> {
    let mut p = MultiPoly::zero(d);
    let mut n_factorial = S::one();
    for n in 1..=d {
        n_factorial = n_factorial * S::from_i64(n as i64);
        let mut exps = vec![0; d];
        exps[..n].iter_mut().for_each(|e| *e = 1);
        p.add_term(exps, n_factorial.clone());
    }
    p
}

/// The product `x_1 x_2 ... x_n` in dimension `d`.
pub fn coordinate_product<S: Scalar>(d: usize, n: usize) -> MultiPoly<S> {
    assert!(n <= d);
    let mut exps = vec![0; d];
    exps[..n].iter_mut().for_each(|e| *e = 1);
    MultiPoly::monomial(exps, S::one()).expect("nonempty exponents")
}

impl<S: Scalar> fmt::Debug for MultiPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly(dim={}", self.dim)?;
        for (e, c) in &self.terms {
            write!(f, ", {c:?}*x^{e:?}")?;
        }
        f.write_str(")")
    }
}

/// A coefficient as it appears in config files: a float or a rational
/// string such as `"-3/7"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffValue {
    Float(f64),
    Text(String),
}

impl Default for CoeffValue {
    fn default() -> Self {
        CoeffValue::Float(0.0)
    }
}

impl CoeffValue {
    pub fn to_ratio(&self) -> Result<num_rational::BigRational> {
        match self {
            CoeffValue::Float(x) if x.is_finite() => Ok(f64_to_ratio(*x)),
            CoeffValue::Float(x) => Err(KerginError::Config(format!("non-finite coefficient {x}"))),
            CoeffValue::Text(t) => {
                parse_ratio(t).ok_or_else(|| KerginError::Config(format!("cannot parse coefficient `{t}`")))
            }
        }
    }
}

/// Serialized polynomial term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff_re: CoeffValue,
    #[serde(default)]
    pub coeff_im: CoeffValue,
}

impl MultiPoly<C64> {
    pub fn to_records(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(e, c)| PolyTerm {
                exponents: e.clone(),
                coeff_re: CoeffValue::Float(c.re),
                coeff_im: CoeffValue::Float(c.im),
            })
            .collect()
    }
}

impl MultiPoly<Exact> {
    pub fn to_records(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(e, c)| PolyTerm {
                exponents: e.clone(),
                coeff_re: CoeffValue::Text(format_ratio(&c.re)),
                coeff_im: CoeffValue::Text(format_ratio(&c.im)),
            })
            .collect()
    }

    /// Exact real coefficients from integers.
    pub fn from_int_terms(dim: usize, terms: &[(Exponents, i64)]) -> Result<Self> {
        Self::from_terms(dim, terms.iter().map(|(e, c)| (e.clone(), Exact::from_i64(*c))))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::{exact, exact_int};
    use proptest::prelude::*;

    fn xy() -> MultiPoly<Exact> {
        MultiPoly::from_int_terms(2, &[(vec![1, 1], 1)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = xy();
        let x = Point::<Exact>::from_f64(&[2.0, 3.0]).unwrap();
        assert_eq!(p.eval(&x).unwrap(), exact_int(6));
        let f = build_divergence_poly::<Exact>(3);
        assert_eq!(f.eval(&Point::basis(3, 0)).unwrap(), exact_int(1));
        assert_eq!(
            f.eval(&Point::from_f64(&[1.0, 1.0, 1.0]).unwrap()).unwrap(),
            exact_int(9)
        );
    }

    #[test]
    fn divergence_poly_small_cases() {
        let one = build_divergence_poly::<Exact>(1);
        assert_eq!(one, MultiPoly::variable(1, 0));
        let two = build_divergence_poly::<Exact>(2);
        let expected = MultiPoly::from_int_terms(2, &[(vec![1, 0], 1), (vec![1, 1], 2)]).unwrap();
        assert_eq!(two, expected);
    }

    #[test]
    fn derivative_examples() {
        let e1 = Point::<Exact>::basis(2, 0);
        assert_eq!(xy().derive(&e1).unwrap(), MultiPoly::variable(2, 1));
        let c = MultiPoly::constant(2, exact(3, 1, 1, 2));
        assert!(c.derive(&Point::from_f64(&[1.0, -2.0]).unwrap()).unwrap().is_zero());
        assert!(xy().derive(&Point::basis(3, 0)).is_err());
    }

    #[test]
    fn coordinate_product_derivative_table() {
        let d = 6;
        for n in 1..=d {
            let f_n = coordinate_product::<Exact>(d, n);
            for k in 1..=d {
                let dirs: Vec<Point<Exact>> = (0..k).map(|i| Point::basis(d, i)).collect();
                let g = f_n.derive_along(&dirs).unwrap();
                if k < n {
                    let mut exps = vec![0; d];
                    exps[k..n].iter_mut().for_each(|e| *e = 1);
                    assert_eq!(g, MultiPoly::monomial(exps, exact_int(1)).unwrap());
                } else if k == n {
                    assert_eq!(g, MultiPoly::constant(d, exact_int(1)));
                } else {
                    assert!(g.is_zero(), "k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn divergence_poly_sums_factorials_at_ones() {
        for d in 1..=12 {
            let f = build_divergence_poly::<Exact>(d);
            let ones = Point::from_f64(&vec![1.0; d]).unwrap();
            let expected: i64 = (1..=d as i64)
                .scan(1i64, |acc, n| {
                    *acc *= n;
                    Some(*acc)
                })
                .sum();
            assert_eq!(f.eval(&ones).unwrap(), exact_int(expected));
        }
    }

    #[test]
    fn compose_with_linear_forms() {
        // (x + y)^2 with x = s, y = 1 - s  ->  1
        let p = MultiPoly::<Exact>::from_int_terms(2, &[(vec![2, 0], 1), (vec![1, 1], 2), (vec![0, 2], 1)]).unwrap();
        let s = MultiPoly::<Exact>::variable(1, 0);
        let one_minus_s = MultiPoly::constant(1, exact_int(1)).sub(&s).unwrap();
        let composed = p.compose(&[s, one_minus_s]).unwrap();
        assert_eq!(composed, MultiPoly::constant(1, exact_int(1)));
    }

    #[test]
    fn records_round_trip() {
        let p = MultiPoly::<Exact>::from_terms(2, [(vec![1, 0], exact(1, 3, -2, 5)), (vec![0, 4], exact(7, 1, 0, 1))])
            .unwrap();
        let back = MultiPoly::<Exact>::from_records(2, &p.to_records()).unwrap();
        assert_eq!(back, p);
        let json = serde_json::to_string(&p.to_float().to_records()).unwrap();
        let parsed: Vec<PolyTerm> = serde_json::from_str(&json).unwrap();
        assert_eq!(MultiPoly::<C64>::from_records(2, &parsed).unwrap(), p.to_float());
    }

    pub(crate) fn random_exact_poly(dim: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly<Exact>> {
        prop::collection::vec((prop::collection::vec(0..=max_deg, dim), -9i64..=9, -9i64..=9), 1..6).prop_map(
            move |raw| {
                MultiPoly::from_terms(
                    dim,
                    raw.into_iter()
                        .filter(|(e, _, _)| e.iter().sum::<u32>() <= max_deg)
                        .map(|(e, re, im)| (e, exact(re, 1, im, 1))),
                )
                .unwrap()
            },
        )
    }

    fn exact_point(dim: usize) -> impl Strategy<Value = Point<Exact>> {
        prop::collection::vec((-5i64..=5, 1i64..=4, -5i64..=5, 1i64..=4), dim)
            .prop_map(|v| Point::new(v.into_iter().map(|(a, b, c, d)| exact(a, b, c, d)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn derive_is_linear(p in random_exact_poly(3, 4), q in random_exact_poly(3, 4),
                            v in exact_point(3), alpha in exact_point(1)) {
            let a = alpha.coords()[0].clone();
            let lhs = p.add(&q).unwrap().derive(&v).unwrap();
            let rhs = p.derive(&v).unwrap().add(&q.derive(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(p.derive(&v.scale(&a)).unwrap(), p.derive(&v).unwrap().scale(&a));
        }

        #[test]
        fn eval_is_linear(p in random_exact_poly(2, 5), q in random_exact_poly(2, 5), x in exact_point(2)) {
            let sum = p.add(&q).unwrap().eval(&x).unwrap();
            prop_assert_eq!(sum, p.eval(&x).unwrap() + q.eval(&x).unwrap());
        }

        #[test]
        fn iterated_derivatives_commute(p in random_exact_poly(3, 5),
                                        dirs in prop::collection::vec(exact_point(3), 1..=4),
                                        rot in 0usize..4) {
            let forward = p.derive_along(&dirs).unwrap();
            let mut reversed = dirs.clone();
            reversed.reverse();
            prop_assert_eq!(&forward, &p.derive_along(&reversed).unwrap());
            let mut rotated = dirs.clone();
            let len = rotated.len();
            rotated.rotate_left(rot % len);
            prop_assert_eq!(&forward, &p.derive_along(&rotated).unwrap());
        }
    }
}
