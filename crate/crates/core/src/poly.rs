//! Dense univariate polynomials over the BLS12-381 scalar field.

use std::ops::{Add, Mul, Neg, Sub};

use ark_ff::{batch_inversion, Field, One, Zero};

use crate::pairing::Scalar;

/// Coefficients are stored lowest degree first with no trailing zeros, so
/// the zero polynomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DensePolynomial {
    coeffs: Vec<Scalar>,
}

impl DensePolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_coefficients(vec![c])
    }

    pub fn from_coefficients(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `X - a`
    pub fn linear_root(a: Scalar) -> Self {
        Self { coeffs: vec![-a, Scalar::one()] }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn evaluate(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_coefficients(self.coeffs.iter().map(|c| *c * s).collect())
    }

    /// Synthetic division by `X - a`. Returns the quotient and `self(a)`.
    pub fn divide_by_linear(&self, a: &Scalar) -> (Self, Scalar) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Scalar::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![Scalar::zero(); n - 1];
        let mut carry = Scalar::zero();
        for k in (0..n).rev() {
            let cur = self.coeffs[k] + carry * a;
            if k == 0 {
                return (Self::from_coefficients(q), cur);
            }
            q[k - 1] = cur;
            carry = cur;
        }
        unreachable!()
    }

    /// Euclidean division. Panics when `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let lead_inv = divisor.coeffs[dd].inverse().unwrap();
        let mut rem = self.coeffs.clone();
        let mut q = vec![Scalar::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let coef = rem[k + dd] * lead_inv;
            if coef.is_zero() {
                continue;
            }
            q[k] = coef;
            for (t, d) in divisor.coeffs.iter().enumerate() {
                rem[k + t] -= coef * d;
            }
        }
        rem.truncate(dd);
        (Self::from_coefficients(q), Self::from_coefficients(rem))
    }

    /// `prod (X - x)` over `x` in `start..start+len`.
    pub fn vanishing_range(start: u64, len: u64) -> Self {
        let mut acc = Self::constant(Scalar::one());
        for x in start..start + len {
            acc = &acc * &Self::linear_root(Scalar::from(x));
        }
        acc
    }

    /// Interpolates `values` over the domain `{0, .., n-1}`.
    pub fn interpolate(values: &[Scalar]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::zero();
        }
        let v = Self::vanishing_range(0, n as u64);
        let mut weights: Vec<Scalar> = (0..n).map(|i| barycentric_denominator(n, i)).collect();
        batch_inversion(&mut weights);
        let mut acc = vec![Scalar::zero(); n];
        for (i, (m, w)) in values.iter().zip(&weights).enumerate() {
            if m.is_zero() {
                continue;
            }
            let (basis, _) = v.divide_by_linear(&Scalar::from(i as u64));
            let s = *m * w;
            for (a, b) in acc.iter_mut().zip(basis.coeffs()) {
                *a += s * b;
            }
        }
        Self::from_coefficients(acc)
    }
}

/// `prod_{j != i} (i - j)` over the domain `{0, .., n-1}`, which equals
/// `i! * (-1)^(n-1-i) * (n-1-i)!`.
pub fn barycentric_denominator(n: usize, i: usize) -> Scalar {
    let mut acc = Scalar::one();
    for k in 1..=i as u64 {
        acc *= Scalar::from(k);
    }
    for k in 1..=(n - 1 - i) as u64 {
        acc *= Scalar::from(k);
    }
    if (n - 1 - i) % 2 == 1 {
        -acc
    } else {
        acc
    }
}

impl Add for &DensePolynomial {
    type Output = DensePolynomial;
    fn add(self, rhs: Self) -> DensePolynomial {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() { (self, rhs) } else { (rhs, self) };
        let mut c = long.coeffs.clone();
        for (a, b) in c.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        DensePolynomial::from_coefficients(c)
    }
}

impl Neg for &DensePolynomial {
    type Output = DensePolynomial;
    fn neg(self) -> DensePolynomial {
        DensePolynomial { coeffs: self.coeffs.iter().map(|c| -*c).collect() }
    }
}

impl Sub for &DensePolynomial {
    type Output = DensePolynomial;
    fn sub(self, rhs: Self) -> DensePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &DensePolynomial {
    type Output = DensePolynomial;
    fn mul(self, rhs: Self) -> DensePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return DensePolynomial::zero();
        }
        let mut c = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += *a * b;
            }
        }
        DensePolynomial::from_coefficients(c)
    }
}
