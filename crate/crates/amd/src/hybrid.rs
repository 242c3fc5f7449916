//! Exact rationals with a machine-word fast path.
//!
//! Tableau entries of the design programs mostly stay small, so values are
//! kept as a reduced `i64` fraction and only promoted to [`Rational`] when an
//! intermediate result no longer fits. Arithmetic is exact in both
//! representations; the split is invisible to callers.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use sinkmech::{Rational, Scalar};

#[derive(Clone, Debug)]
pub enum HybridRational {
    /// Numerator and positive denominator in lowest terms.
    Small(i64, i64),
    Big(Rational),
}

use HybridRational::{Big, Small};

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl HybridRational {
    /// Reduces `n / d` (`d ≠ 0`) computed in 128 bits.
    fn from_wide(n: i128, d: i128) -> Self {
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        if n == 0 {
            return Small(0, 1);
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Small(n, d),
            _ => Big(Rational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: Rational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Small(n, d),
            _ => Big(r),
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Small(n, d) => Rational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Big(r) => r.clone(),
        }
    }

    fn big_op(&self, other: &Self, op: impl Fn(Rational, &Rational) -> Rational) -> Self {
        Self::from_big(op(self.to_rational(), &other.to_rational()))
    }

    fn add_ref(&self, other: &Self) -> Self {
        match (self, other) {
            (Small(a, b), Small(c, d)) => {
                if b == d {
                    Self::from_wide(*a as i128 + *c as i128, *b as i128)
                } else {
                    Self::from_wide(
                        *a as i128 * *d as i128 + *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => self.big_op(other, |x, y| x + y),
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        match (self, other) {
            (Small(a, b), Small(c, d)) => {
                Self::from_wide(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => self.big_op(other, |x, y| x * y),
        }
    }

    fn neg_ref(&self) -> Self {
        match self {
            Small(n, d) => match n.checked_neg() {
                Some(n) => Small(n, *d),
                None => Big(-self.to_rational()),
            },
            Big(r) => Big(-r.clone()),
        }
    }

    fn recip(&self) -> Self {
        match self {
            Small(n, d) => Self::from_wide(*d as i128, *n as i128),
            Big(r) => Self::from_big(r.recip()),
        }
    }
}

impl PartialEq for HybridRational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Small(a, b), Small(c, d)) => a == c && b == d,
            _ => self.to_rational() == other.to_rational(),
        }
    }
}

impl PartialOrd for HybridRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Small(a, b), Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_rational().cmp(&other.to_rational()),
        })
    }
}

impl fmt::Display for HybridRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Small(n, 1) => write!(f, "{n}"),
            Small(n, d) => write!(f, "{n}/{d}"),
            Big(r) => write!(f, "{r}"),
        }
    }
}

impl Zero for HybridRational {
    fn zero() -> Self {
        Small(0, 1)
    }

    fn is_zero(&self) -> bool {
        match self {
            Small(n, _) => *n == 0,
            Big(r) => r.is_zero(),
        }
    }
}

impl One for HybridRational {
    fn one() -> Self {
        Small(1, 1)
    }
}

macro_rules! binary_ops {
    ($($tr:ident $method:ident $body:expr;)*) => {$(
        impl $tr for HybridRational {
            type Output = HybridRational;
            fn $method(self, rhs: HybridRational) -> HybridRational {
                let f: fn(&HybridRational, &HybridRational) -> HybridRational = $body;
                f(&self, &rhs)
            }
        }
        impl<'a> $tr<&'a HybridRational> for HybridRational {
            type Output = HybridRational;
            fn $method(self, rhs: &'a HybridRational) -> HybridRational {
                let f: fn(&HybridRational, &HybridRational) -> HybridRational = $body;
                f(&self, rhs)
            }
        }
    )*};
}

binary_ops! {
    Add add |a, b| a.add_ref(b);
    Sub sub |a, b| a.add_ref(&b.neg_ref());
    Mul mul |a, b| a.mul_ref(b);
    Div div |a, b| a.mul_ref(&b.recip());
}

impl Neg for HybridRational {
    type Output = HybridRational;
    fn neg(self) -> HybridRational {
        self.neg_ref()
    }
}

impl Sum for HybridRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc.add_ref(&x))
    }
}

impl Scalar for HybridRational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_wide(numer as i128, denom as i128)
    }

    fn from_rational(value: &Rational) -> Self {
        Self::from_big(value.clone())
    }

    fn to_f64(&self) -> f64 {
        match self {
            Small(n, d) => *n as f64 / *d as f64,
            Big(r) => Scalar::to_f64(r),
        }
    }

    fn magnitude(&self) -> Self {
        match self {
            Small(n, d) if *n != i64::MIN => Small(n.abs(), *d),
            _ => Self::from_big(self.to_rational().abs()),
        }
    }

    fn tolerance() -> Self {
        Self::zero()
    }

    fn parse_scalar(text: &str) -> sinkmech::Result<Self> {
        Rational::parse_scalar(text).map(Self::from_big)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(
            a in any::<i64>(), b in 1i64..=i64::MAX,
            c in any::<i64>(), d in 1i64..=i64::MAX,
        ) {
            let (x, y) = (HybridRational::from_ratio(a, b), HybridRational::from_ratio(c, d));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((x.clone() + &y).to_rational(), &bx + &by);
            prop_assert_eq!((x.clone() - &y).to_rational(), &bx - &by);
            prop_assert_eq!((x.clone() * &y).to_rational(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((x.clone() / y.clone()).to_rational(), &bx / &by);
            }
            prop_assert_eq!(x.partial_cmp(&y), bx.partial_cmp(&by));
            prop_assert_eq!(x == y, bx == by);
            prop_assert_eq!(x.to_string(), bx.to_string());
        }
    }

    #[test]
    fn promotion_and_demotion() {
        let huge = HybridRational::from_int(i64::MAX);
        let sq = huge.clone() * &huge;
        assert!(matches!(sq, Big(_)));
        let back = sq / huge.clone();
        assert!(matches!(back, Small(_, 1)));
        assert_eq!(back, huge);
        assert_eq!(-HybridRational::from_int(i64::MIN), HybridRational::from_rational(&-big(i64::MIN, 1)));
    }
}
