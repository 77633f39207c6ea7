use std::fmt;

use super::field::{Field, Rational};
use super::ratfunc::RatFunc;

/// Element of Q or Q(q).
///
/// Values that do not depend on `q` are always held as `Rat`, so the fast
/// rational path is taken whenever possible and equality stays structural.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Rat(Rational),
    Func(RatFunc),
}

impl Scalar {
    pub fn from_func(f: RatFunc) -> Self {
        match f.as_rational() {
            Some(r) => Scalar::Rat(r),
            None => Scalar::Func(f),
        }
    }

    pub fn q() -> Self {
        Scalar::Func(RatFunc::q())
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Scalar::Rat(super::field::rat(n, d))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Func(_) => None,
        }
    }

    /// True when the value involves the parameter `q`.
    pub fn involves_q(&self) -> bool {
        matches!(self, Scalar::Func(_))
    }

    fn to_func(&self) -> RatFunc {
        match self {
            Scalar::Rat(r) => RatFunc::from_rational(r.clone()),
            Scalar::Func(f) => f.clone(),
        }
    }

    fn lift(
        &self,
        rhs: &Self,
        rat: impl Fn(&Rational, &Rational) -> Rational,
        func: impl Fn(&RatFunc, &RatFunc) -> RatFunc,
    ) -> Self {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(rat(a, b)),
            _ => Scalar::from_func(func(&self.to_func(), &rhs.to_func())),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<RatFunc> for Scalar {
    fn from(f: RatFunc) -> Self {
        Scalar::from_func(f)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }
    fn one() -> Self {
        Scalar::Rat(Rational::one())
    }
    fn from_int(n: i64) -> Self {
        Scalar::Rat(Rational::from_int(n))
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Func(f) => f.is_zero(),
        }
    }
    fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Func(_) => false,
        }
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.lift(rhs, |a, b| a.plus(b), |a, b| a.plus(b))
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.lift(rhs, |a, b| a.minus(b), |a, b| a.minus(b))
    }
    fn times(&self, rhs: &Self) -> Self {
        self.lift(rhs, |a, b| a.times(b), |a, b| a.times(b))
    }
    fn negated(&self) -> Self {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.negated()),
            Scalar::Func(f) => Scalar::Func(f.negated()),
        }
    }
    fn inverse(&self) -> Option<Self> {
        match self {
            Scalar::Rat(r) => r.inverse().map(Scalar::Rat),
            Scalar::Func(f) => f.inverse().map(Scalar::from_func),
        }
    }
    fn needs_parens(&self) -> bool {
        match self {
            Scalar::Rat(_) => false,
            Scalar::Func(f) => f.needs_parens(),
        }
    }
    fn prints_negative(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.prints_negative(),
            Scalar::Func(f) => f.prints_negative(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Func(g) => write!(f, "{g}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_demote_to_rational() {
        let q = Scalar::q();
        let d = q.minus(&q);
        assert_eq!(d, Scalar::zero());
        let r = q.divided(&q).unwrap();
        assert_eq!(r, Scalar::one());
        assert!(!q.times(&Scalar::from_int(2)).as_rational().is_some());
    }

    #[test]
    fn mixed_arithmetic() {
        let q = Scalar::q();
        let half = Scalar::rational(1, 2);
        let s = q.plus(&half);
        assert_eq!(s.to_string(), "q+1/2");
        assert!(s.needs_parens());
        assert_eq!(s.minus(&q), half);
    }
}
