//! Exact rational scalars.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// An exact rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in an `i64` are stored inline;
/// everything else falls back to a `BigRational`. The representation is
/// canonical, so derived equality is value equality.
#[derive(Clone)]
pub struct Coeff(Repr);

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_u(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Coeff {
    /// Canonical value from an `i128` fraction with nonzero denominator.
    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        if n == 0 {
            return Coeff::zero();
        }
        let g = gcd_u(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Coeff(Repr::Small(a, b)),
            _ => Coeff::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_rational(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Coeff(Repr::Small(a, b)),
            _ => Coeff(Repr::Big(r)),
        }
    }

    fn to_rational(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn zero() -> Self {
        Coeff(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Coeff(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Coeff(Repr::Small(n, 1))
    }

    /// `num/den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coeff::from_i128(num as i128, den as i128)
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(Coeff::from_rational(BigRational::new(num, den)))
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    /// `(numerator, denominator)` when both fit in `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(n, d) => Some((*n, *d)),
            Repr::Big(_) => None,
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.0 {
            Repr::Small(n, d) => Coeff::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Coeff::from_rational(r.recip()),
        })
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut result = Coeff::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Some(result)
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Coeff {}

impl Hash for Coeff {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{}", n),
            Repr::Small(n, d) => write!(f, "{}/{}", n, d),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Coeff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|e| e.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                Coeff::from_big(parse(n)?, parse(d)?).ok_or_else(|| "zero denominator".into())
            }
            None => Ok(Coeff::from_rational(BigRational::from_integer(parse(s)?))),
        }
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

fn add_ref(a: &Coeff, b: &Coeff) -> Coeff {
    match (&a.0, &b.0) {
        (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
            if d1 == d2 {
                if *d1 == 1 {
                    if let Some(s) = n1.checked_add(*n2) {
                        return Coeff(Repr::Small(s, 1));
                    }
                }
                return Coeff::from_i128(*n1 as i128 + *n2 as i128, *d1 as i128);
            }
            let (n1, d1, n2, d2) = (*n1 as i128, *d1 as i128, *n2 as i128, *d2 as i128);
            match (n1 * d2).checked_add(n2 * d1) {
                Some(n) => Coeff::from_i128(n, d1 * d2),
                None => Coeff::from_rational(a.to_rational() + b.to_rational()),
            }
        }
        _ => Coeff::from_rational(a.to_rational() + b.to_rational()),
    }
}

fn mul_ref(a: &Coeff, b: &Coeff) -> Coeff {
    match (&a.0, &b.0) {
        (Repr::Small(n1, 1), Repr::Small(n2, 1)) => match n1.checked_mul(*n2) {
            Some(p) => Coeff(Repr::Small(p, 1)),
            None => Coeff::from_i128(*n1 as i128 * *n2 as i128, 1),
        },
        (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
            Coeff::from_i128(*n1 as i128 * *n2 as i128, *d1 as i128 * *d2 as i128)
        }
        _ => Coeff::from_rational(a.to_rational() * b.to_rational()),
    }
}

fn neg_ref(a: &Coeff) -> Coeff {
    match &a.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(m) => Coeff(Repr::Small(m, *d)),
            None => Coeff::from_i128(-(*n as i128), *d as i128),
        },
        Repr::Big(r) => Coeff::from_rational(-r),
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $f:expr) => {
        impl $tr<&Coeff> for &Coeff {
            type Output = Coeff;
            fn $method(self, rhs: &Coeff) -> Coeff {
                $f(self, rhs)
            }
        }
        impl $tr<Coeff> for Coeff {
            type Output = Coeff;
            fn $method(self, rhs: Coeff) -> Coeff {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Coeff> for Coeff {
            type Output = Coeff;
            fn $method(self, rhs: &Coeff) -> Coeff {
                $f(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, |a: &Coeff, b: &Coeff| add_ref(a, &neg_ref(b)));
forward_binop!(Mul, mul, mul_ref);

impl Div<&Coeff> for &Coeff {
    type Output = Coeff;
    /// Panics on division by zero.
    fn div(self, rhs: &Coeff) -> Coeff {
        mul_ref(self, &rhs.inv().expect("division by zero"))
    }
}

impl Div<Coeff> for Coeff {
    type Output = Coeff;
    fn div(self, rhs: Coeff) -> Coeff {
        &self / &rhs
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        neg_ref(&self)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        neg_ref(self)
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        *self = add_ref(self, rhs);
    }
}

impl SubAssign<&Coeff> for Coeff {
    fn sub_assign(&mut self, rhs: &Coeff) {
        *self = add_ref(self, &neg_ref(rhs));
    }
}

impl MulAssign<&Coeff> for Coeff {
    fn mul_assign(&mut self, rhs: &Coeff) {
        *self = mul_ref(self, rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let c = Coeff::new(6, -4);
        assert_eq!(c.to_string(), "-3/2");
        assert_eq!(c.denom(), BigInt::from(2));
        assert_eq!(Coeff::new(0, 5), Coeff::zero());
    }

    #[test]
    fn parse_and_pow() {
        let c: Coeff = "3/9".parse().unwrap();
        assert_eq!(c, Coeff::new(1, 3));
        assert_eq!(c.pow(-2).unwrap(), Coeff::from_int(9));
        assert!(Coeff::zero().pow(-1).is_none());
        assert!("1/0".parse::<Coeff>().is_err());
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Coeff::from_int(i64::MAX);
        let sq = &big * &big;
        assert_eq!(sq.to_string(), "85070591730234615847396907784232501249");
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let m = Coeff::from_int(i64::MIN);
        assert_eq!((-&m).to_string(), "9223372036854775808");
        assert_eq!(&(&m + &m) - &m, m);
    }

    #[test]
    fn small_and_big_agree() {
        let vals = [(3, 7), (-5, 2), (i64::MAX, 3), (1, i64::MAX), (0, 1)];
        for &(a, b) in &vals {
            for &(c, d) in &vals {
                let x = Coeff::new(a, b);
                let y = Coeff::new(c, d);
                let rx = BigRational::new(a.into(), b.into());
                let ry = BigRational::new(c.into(), d.into());
                assert_eq!((&x + &y).to_rational(), &rx + &ry);
                assert_eq!((&x - &y).to_rational(), &rx - &ry);
                assert_eq!((&x * &y).to_rational(), &rx * &ry);
                assert_eq!(x.cmp(&y), rx.cmp(&ry));
            }
        }
    }
}
