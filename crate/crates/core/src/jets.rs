//! Second-order forward-mode differentiation over the four chart coordinates.
//!
//! A [`Jet2`] carries a value together with its gradient and Hessian with
//! respect to `(x^0, x^1, x^2, x^3)`. Arithmetic and the elementary functions
//! propagate all three channels exactly (up to roundoff), so every partial
//! derivative that appears in connection, curvature, exterior-derivative and
//! bracket formulas is read off a jet rather than differenced.
//!
//! [`Jet1`] is the first-order truncation. It is what remains after one
//! derivative has been taken out of a `Jet2` (e.g. a Christoffel symbol with
//! its gradient), and supports the ring operations only.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::scalar::Scalar;

/// Number of chart coordinates.
pub const DIM: usize = 4;

/// Packed upper-triangle index of the Hessian entry `(i, j)`.
#[inline(always)]
pub const fn hess_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    // rows hold 4, 3, 2, 1 entries
    a * DIM - a * (a + 1) / 2 + b
}

/// A domain violation raised by a jet operation. The coordinate point is
/// attached by the field that evaluated the expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("{function} evaluated outside its real domain (argument {argument})")]
    Domain { function: &'static str, argument: f64 },
    #[error("non-finite value produced by {function}")]
    NonFinite { function: &'static str },
}

/// Value, gradient and symmetric Hessian of a scalar function of the chart
/// coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    value: T,
    grad: [T; DIM],
    hess: [T; 10],
}

impl<T: Scalar> Default for Jet2<T> {
    fn default() -> Self {
        Self::constant(T::zero())
    }
}

impl<T: Scalar> Jet2<T> {
    #[inline]
    pub fn constant(value: T) -> Self {
        Self { value, grad: [T::zero(); DIM], hess: [T::zero(); 10] }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// Jet of the coordinate function `x^index` at the value `value`.
    ///
    /// Panics if `index >= 4`.
    pub fn seed(value: T, index: usize) -> Self {
        assert!(index < DIM, "coordinate index {index} out of range");
        let mut grad = [T::zero(); DIM];
        grad[index] = T::one();
        Self { value, grad, hess: [T::zero(); 10] }
    }

    /// Builds a jet from explicit channels; the Hessian is symmetrized.
    pub fn from_parts(value: T, grad: [T; DIM], hess: [[T; DIM]; DIM]) -> Self {
        let half = T::lit(0.5);
        let mut packed = [T::zero(); 10];
        for i in 0..DIM {
            for j in i..DIM {
                packed[hess_index(i, j)] = if i == j { hess[i][i] } else { (hess[i][j] + hess[j][i]) * half };
            }
        }
        Self { value, grad, hess: packed }
    }

    #[inline]
    pub fn value(&self) -> T {
        self.value
    }

    #[inline]
    pub fn grad(&self) -> [T; DIM] {
        self.grad
    }

    #[inline]
    pub fn d(&self, i: usize) -> T {
        self.grad[i]
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> T {
        self.hess[hess_index(i, j)]
    }

    pub fn hessian(&self) -> [[T; DIM]; DIM] {
        let mut h = [[T::zero(); DIM]; DIM];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.hess(i, j);
            }
        }
        h
    }

    /// The first-order jet of `∂_i` of this function.
    pub fn partial(&self, i: usize) -> Jet1<T> {
        let mut grad = [T::zero(); DIM];
        for (m, g) in grad.iter_mut().enumerate() {
            *g = self.hess(i, m);
        }
        Jet1 { value: self.grad[i], grad }
    }

    pub fn truncate(&self) -> Jet1<T> {
        Jet1 { value: self.value, grad: self.grad }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite()) && self.hess.iter().all(|h| h.is_finite())
    }

    /// Returns `self` if every channel is finite, otherwise a poisoning error
    /// attributed to `function`.
    pub fn finite_or(self, function: &'static str) -> Result<Self, JetError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(JetError::NonFinite { function })
        }
    }

    pub fn scale(&self, c: T) -> Self {
        let mut out = *self;
        out.value = out.value * c;
        out.grad.iter_mut().for_each(|g| *g = *g * c);
        out.hess.iter_mut().for_each(|h| *h = *h * c);
        out
    }

    /// Applies a univariate function with derivatives `f1 = f'(a)`,
    /// `f2 = f''(a)` through the second-order chain rule.
    #[inline]
    fn chain(&self, f0: T, f1: T, f2: T) -> Self {
        let mut grad = [T::zero(); DIM];
        for (g, a) in grad.iter_mut().zip(self.grad.iter()) {
            *g = f1 * *a;
        }
        let mut hess = [T::zero(); 10];
        for i in 0..DIM {
            for j in i..DIM {
                let k = hess_index(i, j);
                hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
            }
        }
        Self { value: f0, grad, hess }
    }

    pub fn recip(&self) -> Self {
        let inv = self.value.recip();
        self.chain(inv, -inv * inv, T::lit(2.0) * inv * inv * inv)
    }

    /// Quotient that refuses a zero denominator.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self, JetError> {
        if rhs.value == T::zero() {
            return Err(JetError::Domain { function: "div", argument: 0.0 });
        }
        Ok(*self / *rhs)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Result<Self, JetError> {
        let c = self.value.cos();
        if c == T::zero() {
            return Err(self.domain("tan"));
        }
        let t = self.value.tan();
        let sec2 = T::one() + t * t;
        Ok(self.chain(t, sec2, T::lit(2.0) * t * sec2))
    }

    pub fn cot(&self) -> Result<Self, JetError> {
        let (s, c) = self.value.sin_cos();
        if s == T::zero() {
            return Err(self.domain("cot"));
        }
        let ct = c / s;
        let csc2 = T::one() + ct * ct;
        Ok(self.chain(ct, -csc2, T::lit(2.0) * ct * csc2))
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        if !(self.value > T::zero()) {
            return Err(self.domain("log"));
        }
        let inv = self.value.recip();
        Ok(self.chain(self.value.ln(), inv, -inv * inv))
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        if !(self.value > T::zero()) {
            return Err(self.domain("sqrt"));
        }
        let s = self.value.sqrt();
        let half = T::lit(0.5);
        let f1 = half / s;
        Ok(self.chain(s, f1, -half * f1 / self.value))
    }

    /// Integer power. Negative exponents need a nonzero base.
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        match n {
            0 => Ok(Self::one()),
            1 => Ok(*self),
            _ => {
                if n < 0 && self.value == T::zero() {
                    return Err(self.domain("pow"));
                }
                let nf = T::from_i32(n).expect("i32 exponent");
                let f0 = self.value.powi(n);
                let f1 = nf * self.value.powi(n - 1);
                let f2 = nf * (nf - T::one()) * self.value.powi(n - 2);
                Ok(self.chain(f0, f1, f2))
            }
        }
    }

    /// Power with a constant real exponent. Non-integral exponents need a
    /// positive base.
    pub fn powf(&self, exponent: T) -> Result<Self, JetError> {
        if exponent.fract() == T::zero() && exponent.abs() < T::lit(2_147_483_647.0) {
            let n = exponent.to_i32().expect("integral exponent");
            return self.powi(n);
        }
        if !(self.value > T::zero()) {
            return Err(self.domain("pow"));
        }
        let f0 = self.value.powf(exponent);
        let f1 = exponent * f0 / self.value;
        let f2 = exponent * (exponent - T::one()) * f0 / (self.value * self.value);
        Ok(self.chain(f0, f1, f2))
    }

    fn domain(&self, function: &'static str) -> JetError {
        JetError::Domain { function, argument: self.value.as_f64() }
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Scalar> AddAssign for Jet2<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.value = self.value + rhs.value;
        for i in 0..DIM {
            self.grad[i] = self.grad[i] + rhs.grad[i];
        }
        for k in 0..10 {
            self.hess[k] = self.hess[k] + rhs.hess[k];
        }
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<T: Scalar> SubAssign for Jet2<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.value = self.value - rhs.value;
        for i in 0..DIM {
            self.grad[i] = self.grad[i] - rhs.grad[i];
        }
        for k in 0..10 {
            self.hess[k] = self.hess[k] - rhs.hess[k];
        }
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self, &rhs);
        let mut grad = [T::zero(); DIM];
        for i in 0..DIM {
            grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
        }
        let mut hess = [T::zero(); 10];
        for i in 0..DIM {
            for j in i..DIM {
                let k = hess_index(i, j);
                hess[k] = a.hess[k] * b.value + a.value * b.hess[k] + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
            }
        }
        Self { value: a.value * b.value, grad, hess }
    }
}

impl<T: Scalar> MulAssign for Jet2<T> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<T: Scalar> Div for Jet2<T> {
    type Output = Self;
    /// Quotient rule in the form `q' = (a' - q b') / b`,
    /// `q'' = (a'' - q b'' - q' b'ᵀ - b' q'ᵀ) / b`, which makes `a / a`
    /// exactly the constant one.
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let (a, b) = (&self, &rhs);
        let q = a.value / b.value;
        let mut grad = [T::zero(); DIM];
        for i in 0..DIM {
            grad[i] = (a.grad[i] - q * b.grad[i]) / b.value;
        }
        let mut hess = [T::zero(); 10];
        for i in 0..DIM {
            for j in i..DIM {
                let k = hess_index(i, j);
                hess[k] = (a.hess[k] - q * b.hess[k] - grad[i] * b.grad[j] - b.grad[i] * grad[j]) / b.value;
            }
        }
        Self { value: q, grad, hess }
    }
}

impl<T: Scalar> Add<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: T) -> Self {
        self.value = self.value + rhs;
        self
    }
}

impl<T: Scalar> Sub<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: T) -> Self {
        self.value = self.value - rhs;
        self
    }
}

impl<T: Scalar> Mul<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}

impl<T: Scalar> Div<T> for Jet2<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: T) -> Self {
        self.scale(rhs.recip())
    }
}

macro_rules! scalar_lhs_ops {
    ($($t:ty),*) => {$(
        impl Add<Jet2<$t>> for $t {
            type Output = Jet2<$t>;
            #[inline]
            fn add(self, rhs: Jet2<$t>) -> Jet2<$t> { rhs + self }
        }
        impl Sub<Jet2<$t>> for $t {
            type Output = Jet2<$t>;
            #[inline]
            fn sub(self, rhs: Jet2<$t>) -> Jet2<$t> { -rhs + self }
        }
        impl Mul<Jet2<$t>> for $t {
            type Output = Jet2<$t>;
            #[inline]
            fn mul(self, rhs: Jet2<$t>) -> Jet2<$t> { rhs.scale(self) }
        }
        impl Div<Jet2<$t>> for $t {
            type Output = Jet2<$t>;
            #[inline]
            fn div(self, rhs: Jet2<$t>) -> Jet2<$t> { rhs.recip().scale(self) }
        }
    )*};
}
scalar_lhs_ops!(f32, f64);

impl<T: Scalar> std::iter::Sum for Jet2<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

/// Value and gradient only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1<T> {
    pub value: T,
    pub grad: [T; DIM],
}

impl<T: Scalar> Default for Jet1<T> {
    fn default() -> Self {
        Self::constant(T::zero())
    }
}

impl<T: Scalar> Jet1<T> {
    pub fn constant(value: T) -> Self {
        Self { value, grad: [T::zero(); DIM] }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn scale(&self, c: T) -> Self {
        let mut out = *self;
        out.value = out.value * c;
        out.grad.iter_mut().for_each(|g| *g = *g * c);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }
}

impl<T: Scalar> From<Jet2<T>> for Jet1<T> {
    fn from(j: Jet2<T>) -> Self {
        j.truncate()
    }
}

impl<T: Scalar> Add for Jet1<T> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Scalar> AddAssign for Jet1<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.value = self.value + rhs.value;
        for i in 0..DIM {
            self.grad[i] = self.grad[i] + rhs.grad[i];
        }
    }
}

impl<T: Scalar> Sub for Jet1<T> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<T: Scalar> SubAssign for Jet1<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.value = self.value - rhs.value;
        for i in 0..DIM {
            self.grad[i] = self.grad[i] - rhs.grad[i];
        }
    }
}

impl<T: Scalar> Neg for Jet1<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for Jet1<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut grad = [T::zero(); DIM];
        for i in 0..DIM {
            grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        Self { value: self.value * rhs.value, grad }
    }
}

impl<T: Scalar> Div for Jet1<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        let mut grad = [T::zero(); DIM];
        for i in 0..DIM {
            grad[i] = (self.grad[i] - q * rhs.grad[i]) / rhs.value;
        }
        Self { value: q, grad }
    }
}

impl<T: Scalar> Mul<T> for Jet1<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}

impl<T: Scalar> std::iter::Sum for Jet1<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

/// Seeded coordinate jets of a chart point.
pub type Coords<T> = [Jet2<T>; DIM];

/// Jets of the four coordinate functions at `coords`.
pub fn seed_all<T: Scalar>(coords: [T; DIM]) -> Coords<T> {
    [Jet2::seed(coords[0], 0), Jet2::seed(coords[1], 1), Jet2::seed(coords[2], 2), Jet2::seed(coords[3], 3)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_at(v: f64) -> Jet2<f64> {
        Jet2::seed(v, 0)
    }

    #[test]
    fn packed_hessian_indices_are_a_bijection() {
        let mut seen = [false; 10];
        for i in 0..DIM {
            for j in i..DIM {
                let k = hess_index(i, j);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(k, hess_index(j, i));
            }
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn seeding_gives_unit_gradient_and_zero_hessian() {
        let p = [3.0, 1.0, 2.0, 0.0];
        let c = seed_all(p);
        assert_eq!(c[0].value(), 3.0);
        assert_eq!(c[0].grad(), [1.0, 0.0, 0.0, 0.0]);
        let z = Jet2::seed(0.0, 2);
        assert_eq!(z.grad(), [0.0, 0.0, 1.0, 0.0]);
        for j in c.iter() {
            assert!(j.hessian().iter().flatten().all(|h| *h == 0.0));
        }
    }

    #[test]
    fn square_of_coordinate() {
        let x = x_at(3.0);
        let sq = x * x;
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.grad(), [6.0, 0.0, 0.0, 0.0]);
        assert_eq!(sq.hess(0, 0), 2.0);
    }

    #[test]
    fn self_quotient_is_exactly_one() {
        let c = seed_all([1.3, -0.7, 2.0, 0.4]);
        let a = (c[0] * c[1]).sin() + c[2].exp() * c[3];
        let q = a / a;
        assert_eq!(q.value(), 1.0);
        assert!(q.grad().iter().all(|g| *g == 0.0));
        assert!(q.hessian().iter().flatten().all(|h| *h == 0.0));
    }

    #[test]
    fn difference_of_squares_matches_expansion() {
        let c = seed_all([2.0, 1.0, 0.0, 0.0]);
        let (x, y) = (c[0], c[1]);
        let lhs = (x + y) * (x - y);
        let rhs = x * x - y * y;
        assert_eq!(lhs.value(), rhs.value());
        assert_eq!(lhs.grad(), rhs.grad());
        assert_eq!(lhs.hessian(), rhs.hessian());
        assert_eq!(lhs.value(), 3.0);
        assert_eq!(lhs.grad(), [4.0, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn sin_at_origin() {
        let s = x_at(0.0).sin();
        assert_eq!(s.value(), 0.0);
        assert_eq!(s.grad(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.hess(0, 0), 0.0);
    }

    #[test]
    fn inverse_compositions_recover_the_coordinate() {
        let x = x_at(1.7);
        let round = x.exp().ln().unwrap();
        assert!((round.value() - 1.7).abs() < 1e-15);
        assert!((round.d(0) - 1.0).abs() < 1e-15);
        assert!(round.hess(0, 0).abs() < 1e-14);

        let x = x_at(2.5);
        let r = (x * x).sqrt().unwrap();
        assert!((r.value() - 2.5).abs() < 1e-15);
        assert!((r.d(0) - 1.0).abs() < 1e-15);
        assert!(r.hess(0, 0).abs() < 1e-15);
    }

    #[test]
    fn domain_violations_are_reported() {
        let x = x_at(-1.0);
        assert!(matches!(x.sqrt(), Err(JetError::Domain { function: "sqrt", .. })));
        assert!(matches!(x.ln(), Err(JetError::Domain { function: "log", .. })));
        assert!(matches!(x_at(0.0).cot(), Err(JetError::Domain { function: "cot", .. })));
        assert!(matches!(x.powf(0.5), Err(JetError::Domain { function: "pow", .. })));
        assert!(x_at(1.0).checked_div(&x_at(0.0)).is_err());
        // integral exponents accept negative bases
        let cube = x.powf(3.0).unwrap();
        assert_eq!(cube.value(), -1.0);
        assert_eq!(cube.d(0), 3.0);
        assert_eq!(cube.hess(0, 0), -6.0);
    }

    #[test]
    fn poisoned_jets_are_caught() {
        let bad = x_at(1.0) / x_at(0.0);
        assert!(!bad.is_finite());
        assert!(bad.finite_or("div").is_err());
    }

    #[test]
    fn partial_extracts_second_derivatives() {
        let c = seed_all::<f64>([0.3, 1.1, 0.0, 0.0]);
        let f = c[0] * c[0] * c[1];
        let dx = f.partial(0);
        assert!((dx.value - 2.0 * 0.3 * 1.1).abs() < 1e-15);
        assert!((dx.grad[0] - 2.0 * 1.1).abs() < 1e-15);
        assert!((dx.grad[1] - 2.0 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let x = Jet2::<f32>::seed(0.5, 1);
        let y = (x * x).exp();
        assert!((y.d(1) - 2.0 * 0.5 * 0.25f32.exp()).abs() < 1e-6);
    }
}
