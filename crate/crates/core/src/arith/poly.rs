use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::Field;
use super::ArithError;

/// Dense univariate polynomial over a field.
///
/// `coeffs[i]` is the coefficient of the `i`-th power. Trailing zeros are
/// always trimmed, so the zero polynomial is the empty vector and equality is
/// structural.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: Field> Poly<C> {
    pub fn from_coeffs(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::monomial(C::one(), 1)
    }

    pub fn constant(c: C) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: C, power: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C::zero(); power + 1];
        coeffs[power] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of the `power`-th power (zero past the degree).
    pub fn coeff(&self, power: usize) -> C {
        self.coeffs.get(power).cloned().unwrap_or_else(C::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// True for nonzero constants.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.inverse().expect("leading coefficient is nonzero")),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Quotient and remainder with `deg(r) < deg(divisor)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), ArithError> {
        let d_deg = divisor.degree().ok_or(ArithError::DivisionByZero)?;
        let lc_inv = divisor.coeffs[d_deg]
            .inverse()
            .expect("leading coefficient is nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![C::zero(); rem.len() - d_deg];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d_deg].times(&lc_inv);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].minus(&c.times(dc));
            }
            quot[k] = c;
        }
        rem.truncate(d_deg);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact quotient; fails with `NotDivisible` on a nonzero remainder.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, ArithError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(ArithError::NotDivisible)
        }
    }

    /// Canonical remainder modulo `modulus`.
    pub fn rem(&self, modulus: &Self) -> Result<Self, ArithError> {
        self.div_rem(modulus).map(|(_, r)| r)
    }

    pub fn divides(&self, other: &Self) -> bool {
        match other.rem(self) {
            Ok(r) => r.is_zero(),
            Err(_) => other.is_zero(),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Substitution `self(inner)`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    pub fn eval(&self, at: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(at).plus(c);
        }
        acc
    }

    /// Canonical text form in descending powers of `var`.
    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let nterms = self.term_count();
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let term = if k == 0 {
                if c.needs_parens() && nterms > 1 {
                    format!("({c})")
                } else {
                    c.to_string()
                }
            } else {
                let mono = if k == 1 {
                    var.to_string()
                } else {
                    format!("{var}^{k}")
                };
                if c.is_one() {
                    mono
                } else if c.negated().is_one() {
                    format!("-{mono}")
                } else if c.needs_parens() {
                    format!("({c})*{mono}")
                } else {
                    format!("{c}*{mono}")
                }
            };
            if !out.is_empty() && !term.starts_with('-') {
                out.push('+');
            }
            out.push_str(&term);
        }
        out
    }
}

impl<C: Field> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

impl<'a, C: Field> Add<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &'a Poly<C>) -> Poly<C> {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = c.plus(s);
        }
        Poly::from_coeffs(coeffs)
    }
}

impl<'a, C: Field> Sub<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &'a Poly<C>) -> Poly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.minus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.negated(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::from_coeffs(coeffs)
    }
}

impl<'a, C: Field> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &'a Poly<C>) -> Poly<C> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].plus(&a.times(b));
                }
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl<C: Field> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.negated()).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl<C: Field> $tr<Poly<C>> for Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<C: Field> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::{int, rat, Rational};

    fn p(c: &[i64]) -> Poly<Rational> {
        Poly::from_coeffs(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn trims_and_degree_marker() {
        let z = p(&[0, 0]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(p(&[1, 2, 0]).degree(), Some(1));
    }

    #[test]
    fn gcd_by_euclid() {
        // x^2-1 and x^2-2x+1 share exactly x-1
        let g = p(&[-1, 0, 1]).gcd(&p(&[1, -2, 1]));
        assert_eq!(g, p(&[-1, 1]));
    }

    #[test]
    fn gcd_with_zero_is_monic_input() {
        let a = p(&[2, 4]);
        assert_eq!(
            a.gcd(&Poly::zero()),
            Poly::from_coeffs(vec![rat(1, 2), int(1)])
        );
        assert!(Poly::<Rational>::zero().gcd(&Poly::zero()).is_zero());
    }

    #[test]
    fn exact_division_and_failure() {
        let a = p(&[-1, 0, 1]);
        assert_eq!(a.div_exact(&p(&[1, 1])).unwrap(), p(&[-1, 1]));
        assert_eq!(a.div_exact(&Poly::one()).unwrap(), a);
        // x^2+1 = (x-1)(x+1) + 2
        assert_eq!(
            p(&[1, 0, 1]).div_exact(&p(&[-1, 1])),
            Err(ArithError::NotDivisible)
        );
        assert_eq!(a.div_exact(&Poly::zero()), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn remainder_by_long_division() {
        assert_eq!(p(&[1, 1, 0, 1]).rem(&p(&[0, 0, 1])).unwrap(), p(&[1, 1]));
        let m = p(&[3, 0, 1]);
        assert!((&p(&[1, 5, 2]) * &m).rem(&m).unwrap().is_zero());
        assert_eq!(p(&[1]).rem(&Poly::zero()), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn compose_and_eval() {
        // (x^2+1)(x+1) = x^2+2x+2
        let f = p(&[1, 0, 1]);
        assert_eq!(f.compose(&p(&[1, 1])), p(&[2, 2, 1]));
        assert_eq!(f.eval(&int(3)), int(10));
        assert_eq!(p(&[1, 1]).pow(3), p(&[1, 3, 3, 1]));
    }

    #[test]
    fn printing() {
        assert_eq!(p(&[-1, 0, 1]).to_string(), "x^2-1");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
        let f = Poly::from_coeffs(vec![rat(-3, 2), int(0), rat(1, 2)]);
        assert_eq!(f.to_string_in("q"), "1/2*q^2-3/2");
        assert_eq!(Poly::<Rational>::zero().to_string(), "0");
    }
}
