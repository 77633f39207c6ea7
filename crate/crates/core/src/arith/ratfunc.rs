use std::fmt;

use super::field::{Field, Rational};
use super::poly::Poly;
use super::ArithError;

/// Polynomial in the formal parameter `q` with rational coefficients.
pub type QPoly = Poly<Rational>;

/// Element of the rational-function field Q(q).
///
/// Always stored in lowest terms with a monic denominator, so two values are
/// equal exactly when their fields are equal.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: QPoly, den: QPoly) -> Self {
        if num.is_zero() {
            return Self::from_poly(QPoly::zero());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff().expect("denominator is nonzero").clone();
        if lc.is_one() {
            Self { num, den }
        } else {
            let inv = lc.inverse().expect("nonzero");
            Self {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn from_poly(num: QPoly) -> Self {
        Self {
            num,
            den: QPoly::one(),
        }
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_poly(QPoly::constant(c))
    }

    /// The formal parameter `q`.
    pub fn q() -> Self {
        Self::from_poly(QPoly::var())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    /// The value as a rational constant, if it does not depend on `q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num.is_constant() && self.den.is_one() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    /// Re-canonicalizes; idempotent on canonical values.
    pub fn normalized(&self) -> Self {
        Self::canonical(self.num.clone(), self.den.clone())
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        Self::from_poly(QPoly::zero())
    }
    fn one() -> Self {
        Self::from_poly(QPoly::one())
    }
    fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn plus(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self::canonical(&self.num + &rhs.num, self.den.clone());
        }
        Self::canonical(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negated())
    }
    fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
    fn negated(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::canonical(self.den.clone(), self.num.clone()))
        }
    }
    fn needs_parens(&self) -> bool {
        self.den.is_one() && self.num.term_count() > 1
    }
    fn prints_negative(&self) -> bool {
        self.to_string().starts_with('-')
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.to_string_in("q");
        if self.den.is_one() {
            return f.write_str(&num);
        }
        let den = self.den.to_string_in("q");
        let num = if self.num.term_count() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = if self.den.term_count() > 1 {
            format!("({den})")
        } else {
            den
        };
        write!(f, "{num}/{den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::int;

    fn qp(c: &[i64]) -> QPoly {
        QPoly::from_coeffs(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn reduces_to_lowest_terms_with_monic_denominator() {
        // (1-q^2)/(2-2q) = (1+q)/2
        let r = RatFunc::new(qp(&[1, 0, -1]), qp(&[2, -2])).unwrap();
        assert_eq!(r.den(), &QPoly::one());
        assert_eq!(
            r.num(),
            &QPoly::from_coeffs(vec![crate::arith::rat(1, 2); 2])
        );
        assert_eq!(
            RatFunc::new(qp(&[1]), QPoly::zero()),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn display_forms() {
        let q = RatFunc::q();
        let one = RatFunc::one();
        assert_eq!(one.minus(&q).to_string(), "-q+1");
        assert_eq!(one.divided(&q.minus(&one)).unwrap().to_string(), "1/(q-1)");
        assert_eq!(one.divided(&q.times(&q)).unwrap().to_string(), "1/q^2");
        let r = q.plus(&one).divided(&q.times(&q).plus(&one)).unwrap();
        assert_eq!(r.to_string(), "(q+1)/(q^2+1)");
    }

    #[test]
    fn field_identities_on_samples() {
        let q = RatFunc::q();
        let a = q
            .plus(&RatFunc::from_int(2))
            .divided(&q.minus(&RatFunc::one()))
            .unwrap();
        let b = q.times(&q).minus(&RatFunc::from_int(3));
        let c = RatFunc::one().divided(&q).unwrap();
        assert_eq!(a.plus(&b).times(&c), a.times(&c).plus(&b.times(&c)));
        assert!(a.times(&a.inverse().unwrap()).is_one());
        assert!(RatFunc::zero().inverse().is_none());
    }
}
