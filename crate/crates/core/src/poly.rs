//! Sparse multivariate polynomials over the rationals, Laurent in `x`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::monomial::{Monomial, Var};

/// Generator images for [`MultiPoly::substitute`]; unlisted variables are fixed.
pub type Images = BTreeMap<Var, MultiPoly>;

/// Variable assignment for [`MultiPoly::eval`].
pub type Point = BTreeMap<Var, Coeff>;

/// Canonical sparse polynomial. Terms are kept sorted by descending monomial
/// order with no zero coefficients, so structural equality is polynomial
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: Vec<(Monomial, Coeff)>,
}

type Acc = FxHashMap<Monomial, Coeff>;

fn add_into(acc: &mut Acc, m: Monomial, c: Coeff) {
    match acc.entry(m) {
        std::collections::hash_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
        }
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Coeff::from_int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::constant(Coeff::new(n, d))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), Coeff::one())
    }

    pub fn x_pow(e: i32) -> Self {
        Self::term(Monomial::var_pow(Var::X, e), Coeff::one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly { terms: vec![(m, c)] }
        }
    }

    /// Collects arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(it: I) -> Self {
        let mut acc = Acc::default();
        for (m, c) in it {
            add_into(&mut acc, m, c);
        }
        Self::from_acc(acc)
    }

    fn from_acc(acc: Acc) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { terms }
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = &(Monomial, Coeff)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term under the global monomial order.
    pub fn leading(&self) -> Option<&(Monomial, Coeff)> {
        self.terms.first()
    }

    /// The constant value if this is a constant polynomial (zero included).
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.as_slice() {
            [] => Some(Coeff::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    /// Multiplication by the monomial `c * m`.
    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        // Multiplying by a monomial preserves the order.
        MultiPoly {
            terms: self.terms.iter().map(|(n, k)| (n.mul(m), k * c)).collect(),
        }
    }

    /// Multiplication by `x^k`.
    pub fn shift_x(&self, k: i32) -> Self {
        self.mul_monomial(&Monomial::var_pow(Var::X, k), &Coeff::one())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        MultiPoly { terms: out }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_monomial(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_monomial(m, c);
        }
        let mut acc = Acc::default();
        acc.reserve(self.terms.len().max(other.terms.len()) * 4);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                add_into(&mut acc, m1.mul(m2), c1 * c2);
            }
        }
        Self::from_acc(acc)
    }

    /// `self * other` with every term of x exponent `>= k` dropped.
    pub fn mul_trunc_x(&self, other: &Self, k: i32) -> Self {
        let (Some(va), Some(vb)) = (self.x_valuation(), other.x_valuation()) else {
            return Self::zero();
        };
        let a = self.filter_terms(|m, _| m.exp(Var::X) < k - vb);
        let b = other.filter_terms(|m, _| m.exp(Var::X) < k - va);
        (&a * &b).filter_terms(|m, _| m.exp(Var::X) < k)
    }

    /// Formal partial derivative; the power rule applies to negative x powers.
    pub fn partial(&self, v: Var) -> Self {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.set_exp(v, e - 1);
            terms.push((m2, c * &Coeff::from_int(e as i64)));
        }
        // Distinct monomials stay distinct after lowering one exponent.
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { terms }
    }

    /// Minimum x exponent; `None` stands for +∞ (the zero polynomial).
    pub fn x_valuation(&self) -> Option<i32> {
        self.terms.iter().map(|(m, _)| m.exp(Var::X)).min()
    }

    pub fn is_integral(&self) -> bool {
        self.x_valuation().map_or(true, |v| v >= 0)
    }

    /// Drops every term with x exponent `>= k`.
    pub fn reduce_mod_x(&self, k: u32) -> Result<Self> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        Ok(MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(Var::X) < k as i32)
                .cloned()
                .collect(),
        })
    }

    /// The x-free coefficient of `x^k`.
    pub fn x_coefficient(&self, k: i32) -> Self {
        let mut terms: Vec<_> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(Var::X) == k)
            .map(|(m, c)| {
                let mut m = *m;
                m.set_exp(Var::X, 0);
                (m, c.clone())
            })
            .collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { terms }
    }

    pub fn degree(&self, v: Var) -> i32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn is_free_of(&self, v: Var) -> bool {
        self.terms.iter().all(|(m, _)| m.exp(v) == 0)
    }

    pub fn vars(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|&v| !self.is_free_of(v)).collect()
    }

    /// Ring homomorphism application: every variable listed in `images` is
    /// replaced by its image, the rest are fixed.
    ///
    /// When the polynomial has negative x powers the image of x must be a
    /// single term `k * x * c^j` with `k != 0`.
    pub fn substitute(&self, images: &Images) -> Result<Self> {
        // light: identity or single-term images, folded into the monomial
        // heavy: everything else, expanded by cached powers
        let mut light: [Option<(Monomial, Coeff)>; 6] = Default::default();
        let mut heavy: Vec<Var> = Vec::new();
        for v in Var::ALL {
            match images.get(&v) {
                None => light[v.index()] = Some((Monomial::var(v), Coeff::one())),
                Some(img) if img.len() == 1 => light[v.index()] = Some(img.terms[0].clone()),
                Some(img) if img.is_zero() => {
                    light[v.index()] = Some((Monomial::ONE, Coeff::zero()))
                }
                Some(_) => {
                    if !self.is_free_of(v) {
                        heavy.push(v)
                    }
                }
            }
        }
        if self.x_valuation().map_or(false, |e| e < 0) {
            match &light[Var::X.index()] {
                Some((m, c)) if !c.is_zero() => {
                    let mut rest = *m;
                    rest.set_exp(Var::X, 0);
                    rest.set_exp(Var::C, 0);
                    if m.exp(Var::X) != 1 || !rest.is_one() {
                        return Err(Error::NonInvertibleXImage);
                    }
                }
                _ => return Err(Error::NonInvertibleXImage),
            }
        }

        // Group terms by their heavy exponents.
        let mut groups: FxHashMap<Monomial, Acc> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut key = Monomial::ONE;
            let mut lm = Monomial::ONE;
            let mut lc = c.clone();
            for v in Var::ALL {
                let e = m.exp(v);
                if e == 0 {
                    continue;
                }
                match &light[v.index()] {
                    Some((im, ic)) => {
                        if ic.is_zero() {
                            lc = Coeff::zero();
                            break;
                        }
                        let mut scaled = *im;
                        for x in scaled.0.iter_mut() {
                            *x *= e;
                        }
                        lm = lm.mul(&scaled);
                        if !ic.is_one() {
                            lc *= &ic.pow(e).expect("nonzero image coefficient");
                        }
                    }
                    None => key.set_exp(v, e),
                }
            }
            if lc.is_zero() {
                continue;
            }
            add_into(groups.entry(key).or_default(), lm, lc);
        }

        let mut powers: FxHashMap<(Var, i32), MultiPoly> = FxHashMap::default();
        let mut power = |v: Var, e: i32| -> MultiPoly {
            if let Some(p) = powers.get(&(v, e)) {
                return p.clone();
            }
            let p = images[&v].pow(e as u32);
            powers.insert((v, e), p.clone());
            p
        };

        let mut acc = Acc::default();
        let mut keys: Vec<_> = groups.into_iter().collect();
        keys.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        for (key, lights) in keys {
            let light_poly = MultiPoly::from_acc(lights);
            if light_poly.is_zero() {
                continue;
            }
            let mut prod = light_poly;
            for &v in &heavy {
                let e = key.exp(v);
                if e > 0 {
                    prod = &prod * &power(v, e);
                }
            }
            for (m, c) in prod.terms {
                add_into(&mut acc, m, c);
            }
        }
        let out = MultiPoly::from_acc(acc);
        if out.terms.iter().any(|(m, _)| !m.is_valid()) {
            return Err(Error::NonInvertibleXImage);
        }
        Ok(out)
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &Point) -> Result<Coeff> {
        let mut cache: FxHashMap<(Var, i32), Coeff> = FxHashMap::default();
        let mut total = Coeff::zero();
        for (m, c) in &self.terms {
            let mut val = c.clone();
            for v in Var::ALL {
                let e = m.exp(v);
                if e == 0 {
                    continue;
                }
                let pv = match cache.get(&(v, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let base = point.get(&v).ok_or(Error::MissingAssignment(v))?;
                        let p = base.pow(e).ok_or(Error::ZeroAtPole)?;
                        cache.insert((v, e), p.clone());
                        p
                    }
                };
                val *= &pv;
            }
            total += &val;
        }
        Ok(total)
    }

    /// Replaces variable `v` by a rational constant.
    pub fn specialize(&self, v: Var, value: &Coeff) -> Result<Self> {
        let mut acc = Acc::default();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let mut m2 = *m;
            m2.set_exp(v, 0);
            let f = value.pow(e).ok_or(Error::ZeroAtPole)?;
            add_into(&mut acc, m2, c * &f);
        }
        Ok(Self::from_acc(acc))
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial, &Coeff) -> bool) -> Self {
        MultiPoly {
            terms: self.terms.iter().filter(|(m, c)| keep(m, c)).cloned().collect(),
        }
    }

    /// Renders at most `limit` terms, appending the omitted count.
    pub fn render_truncated(&self, limit: usize) -> (String, bool) {
        if self.terms.len() <= limit {
            return (self.to_string(), false);
        }
        let head = MultiPoly {
            terms: self.terms[..limit].to_vec(),
        };
        (
            format!(
                "{} + ... ({} of {} terms shown)",
                head,
                limit,
                self.terms.len()
            ),
            true,
        )
    }
}

impl MultiPoly {
    /// Descending monomial order, coefficients as `a` or `a/b`, variables
    /// written as `name(v)`.
    pub fn render_with(&self, name: impl Fn(Var) -> &'static str + Copy) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if m.is_one() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&m.render_with(name));
            } else {
                out.push_str(&format!("{}*{}", a, m.render_with(name)));
            }
        }
        out
    }

    /// Rendering of an abstract polynomial: the slots print as `Y`, `V`, `W`,
    /// `T`.
    pub fn render_abstract(&self) -> String {
        self.render_with(|v| match v {
            Var::Y => "Y",
            Var::Z => "V",
            Var::U => "W",
            Var::T => "T",
            other => other.name(),
        })
    }
}

impl fmt::Display for MultiPoly {
    /// The output parses back to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(Var::name))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({})", self)
    }
}

impl From<Var> for MultiPoly {
    fn from(v: Var) -> Self {
        MultiPoly::var(v)
    }
}

impl From<Coeff> for MultiPoly {
    fn from(c: Coeff) -> Self {
        MultiPoly::constant(c)
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.merge(rhs, false)
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.merge(rhs, true)
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_impl(rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// Shorthand constructors for the variables.
pub mod vars {
    use super::MultiPoly;
    use crate::monomial::Var;

    pub fn x() -> MultiPoly {
        MultiPoly::var(Var::X)
    }
    pub fn y() -> MultiPoly {
        MultiPoly::var(Var::Y)
    }
    pub fn z() -> MultiPoly {
        MultiPoly::var(Var::Z)
    }
    pub fn u() -> MultiPoly {
        MultiPoly::var(Var::U)
    }
    pub fn t() -> MultiPoly {
        MultiPoly::var(Var::T)
    }
    pub fn c() -> MultiPoly {
        MultiPoly::var(Var::C)
    }
}

#[cfg(test)]
mod tests {
    use super::vars::*;
    use super::*;
    use crate::frame::std_polys;

    #[test]
    fn cancellation_and_identity() {
        assert_eq!(&(&y() + &z()) + &(-z()), y());
        let (p, _, _) = std_polys();
        assert_eq!(&MultiPoly::zero() + &p, p);
    }

    #[test]
    fn difference_of_squares_and_laurent() {
        assert_eq!(&(&y() + &z()) * &(&y() - &z()), &y().pow(2) - &z().pow(2));
        assert_eq!(&MultiPoly::x_pow(-1) * &MultiPoly::x_pow(2), x());
    }

    #[test]
    fn partials() {
        let (p, v, w) = std_polys();
        assert_eq!(p.partial(Var::U), y());
        assert_eq!(v.partial(Var::Z), &x() + &(&MultiPoly::int(2) * &(&y() * &z())));
        // x^-2 w = u - 2 z p / x - y p^2 / x^2
        let d = w.shift_x(-2).partial(Var::X);
        let expect = &(&(&z() * &p).scale(&Coeff::from_int(2))).shift_x(-2)
            + &(&y() * &p.pow(2)).scale(&Coeff::from_int(2)).shift_x(-3);
        assert_eq!(d, expect);
    }

    #[test]
    fn valuation_and_reduction() {
        let (p, v, w) = std_polys();
        assert_eq!(p.shift_x(2).x_valuation(), Some(2));
        assert_eq!(v.x_valuation(), Some(0));
        assert_eq!(MultiPoly::zero().x_valuation(), None);
        assert!(!w.shift_x(-2).is_integral());
        assert!(MultiPoly::zero().is_integral());
        assert_eq!(v.reduce_mod_x(1).unwrap(), &y() * &p);
        assert!(w.shift_x(3).reduce_mod_x(2).unwrap().is_zero());
        assert_eq!(w.shift_x(-1).reduce_mod_x(1), Err(Error::NotIntegral));
    }

    #[test]
    fn substitute_monomial_x_image() {
        let q = &y() * &MultiPoly::x_pow(-1);
        let mut im = Images::new();
        im.insert(Var::X, MultiPoly::int(2) * x());
        assert_eq!(q.substitute(&im).unwrap(), q.scale(&Coeff::new(1, 2)));
        im.insert(Var::X, &x() + &y());
        assert_eq!(q.substitute(&im), Err(Error::NonInvertibleXImage));
        assert_eq!(q.substitute(&Images::new()).unwrap(), q);
    }

    #[test]
    fn eval_points() {
        let (p, v, w) = std_polys();
        let pt: Point = [
            (Var::X, Coeff::one()),
            (Var::Y, Coeff::one()),
            (Var::Z, Coeff::one()),
            (Var::U, Coeff::one()),
        ]
        .into_iter()
        .collect();
        assert_eq!(p.eval(&pt).unwrap(), Coeff::from_int(2));
        assert_eq!(v.eval(&pt).unwrap(), Coeff::from_int(3));
        assert_eq!(w.eval(&pt).unwrap(), Coeff::from_int(-7));
        let rel = &(&(&y() * &w) + &v.pow(2)) - &p.shift_x(2);
        assert_eq!(rel.eval(&pt).unwrap(), Coeff::zero());
        assert_eq!(MultiPoly::zero().eval(&Point::new()).unwrap(), Coeff::zero());
        assert_eq!(y().eval(&Point::new()), Err(Error::MissingAssignment(Var::Y)));
        let mut at0 = pt.clone();
        at0.insert(Var::X, Coeff::zero());
        assert_eq!(MultiPoly::x_pow(-1).eval(&at0), Err(Error::ZeroAtPole));
    }

    #[test]
    fn render_parse_shape() {
        let q = &(&MultiPoly::rational(-3, 4) * &y()) + &MultiPoly::x_pow(-2);
        assert_eq!(q.to_string(), "-3/4*y + x^-2");
    }
}
