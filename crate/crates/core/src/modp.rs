//! Evaluation modulo the prime `2^61 − 1`, used by the random-point oracles
//! on polynomials too large for exact rational evaluation.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::coeff::Coeff;
use crate::map::PolyMap;
use crate::monomial::Var;
use crate::poly::MultiPoly;

pub const PRIME: u64 = (1 << 61) - 1;

pub fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

pub fn add(a: u64, b: u64) -> u64 {
    (a + b) % PRIME
}

pub fn sub(a: u64, b: u64) -> u64 {
    (a + PRIME - b) % PRIME
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

/// `None` for zero.
pub fn inv(a: u64) -> Option<u64> {
    (a % PRIME != 0).then(|| pow(a, PRIME - 2))
}

fn reduce_big(n: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = ((n % &p) + &p) % &p;
    r.to_u64().expect("residue fits in u64")
}

/// `None` if the denominator vanishes mod the prime.
pub fn coeff(c: &Coeff) -> Option<u64> {
    if let Some((n, d)) = c.as_small() {
        let n = n.rem_euclid(PRIME as i64) as u64;
        if d == 1 {
            return Some(n);
        }
        return Some(mul(n, inv(d as u64 % PRIME)?));
    }
    let n = reduce_big(&c.numer());
    let d = reduce_big(&c.denom());
    Some(mul(n, inv(d)?))
}

/// A point mod the prime, indexed by [`Var::index`].
pub type ModPoint = [u64; 6];

/// Uniform residues with `x` and `c` nonzero.
pub fn random_point<R: Rng>(rng: &mut R) -> ModPoint {
    let mut pt = [0; 6];
    for v in Var::ALL {
        let lo = if matches!(v, Var::X | Var::C) { 1 } else { 0 };
        pt[v.index()] = rng.gen_range(lo..PRIME);
    }
    pt
}

/// Value of `p` at `pt`; `None` if a denominator or `x` vanishes.
pub fn eval(p: &MultiPoly, pt: &ModPoint) -> Option<u64> {
    let x_inv = inv(pt[Var::X.index()])?;
    let mut powers: [Vec<u64>; 6] = Default::default();
    let mut x_neg: Vec<u64> = vec![1];
    let mut total = 0;
    for (m, c) in p.terms() {
        let mut val = coeff(c)?;
        for v in Var::ALL {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let (table, base) = if e < 0 {
                (&mut x_neg, x_inv)
            } else {
                (&mut powers[v.index()], pt[v.index()])
            };
            let k = e.unsigned_abs() as usize;
            if table.is_empty() {
                table.push(1);
            }
            while table.len() <= k {
                let next = mul(*table.last().expect("nonempty"), base);
                table.push(next);
            }
            val = mul(val, table[k]);
        }
        total = add(total, val);
    }
    Some(total)
}

pub fn eval_map(m: &PolyMap, pt: &ModPoint) -> Option<ModPoint> {
    let mut out = *pt;
    for (v, img) in m.images() {
        out[v.index()] = eval(img, pt)?;
    }
    Some(out)
}

/// A value with its gradient in four directions, for forward-mode
/// differentiation mod the prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Jet {
    pub v: u64,
    pub d: [u64; 4],
}

impl Jet {
    pub fn constant(v: u64) -> Jet {
        Jet { v, d: [0; 4] }
    }

    /// The `i`-th coordinate function at value `v`.
    pub fn seed(v: u64, i: usize) -> Jet {
        let mut d = [0; 4];
        d[i] = 1;
        Jet { v, d }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet {
            v: add(self.v, o.v),
            d: std::array::from_fn(|i| add(self.d[i], o.d[i])),
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet {
            v: sub(self.v, o.v),
            d: std::array::from_fn(|i| sub(self.d[i], o.d[i])),
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        Jet {
            v: mul(self.v, o.v),
            d: std::array::from_fn(|i| add(mul(self.v, o.d[i]), mul(o.v, self.d[i]))),
        }
    }

    pub fn scale(&self, c: u64) -> Jet {
        Jet {
            v: mul(self.v, c),
            d: self.d.map(|e| mul(e, c)),
        }
    }
}

/// A jet point indexed by [`Var::index`]; `x` must be constant.
pub type JetPoint = [Jet; 6];

pub fn eval_jet(p: &MultiPoly, pt: &JetPoint) -> Option<Jet> {
    let x_inv = Jet::constant(inv(pt[Var::X.index()].v)?);
    let mut powers: [Vec<Jet>; 6] = Default::default();
    let mut x_neg: Vec<Jet> = Vec::new();
    let mut total = Jet::constant(0);
    for (m, c) in p.terms() {
        let mut val = Jet::constant(coeff(c)?);
        for v in Var::ALL {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let (table, base) = if e < 0 {
                (&mut x_neg, x_inv)
            } else {
                (&mut powers[v.index()], pt[v.index()])
            };
            let k = e.unsigned_abs() as usize;
            if table.is_empty() {
                table.push(Jet::constant(1));
            }
            while table.len() <= k {
                let next = table.last().expect("nonempty").mul(&base);
                table.push(next);
            }
            val = val.mul(&table[k]);
        }
        total = total.add(&val);
    }
    Some(total)
}

pub fn eval_map_jet(m: &PolyMap, pt: &JetPoint) -> Option<JetPoint> {
    let mut out = *pt;
    for (v, img) in m.images() {
        out[v.index()] = eval_jet(img, pt)?;
    }
    Some(out)
}

/// Determinant by Gaussian elimination.
pub fn det(mut m: Vec<Vec<u64>>) -> u64 {
    let n = m.len();
    let mut d = 1;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(piv, col);
            d = sub(0, d);
        }
        d = mul(d, m[col][col]);
        let pinv = inv(m[col][col]).expect("pivot is nonzero");
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let f = mul(m[r][col], pinv);
            for c in col..n {
                let t = mul(f, m[col][c]);
                m[r][c] = sub(m[r][c], t);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars::*;

    #[test]
    fn agrees_with_exact_eval() {
        let p = &(&x().pow(3) * &y()) + &(&z() * &x().shift_x(-2)).scale(&Coeff::new(3, 5));
        let mut exact = crate::poly::Point::new();
        let mut pt = [0; 6];
        for (v, n) in [(Var::X, 3), (Var::Y, -2), (Var::Z, 7), (Var::U, 0), (Var::T, 0), (Var::C, 1)] {
            exact.insert(v, Coeff::from_int(n));
            pt[v.index()] = coeff(&Coeff::from_int(n)).unwrap();
        }
        assert_eq!(eval(&p, &pt), coeff(&p.eval(&exact).unwrap()));
    }

    #[test]
    fn jets_differentiate() {
        // d/dy (y^2 z) = 2 y z, d/dz = y^2 at (y, z) = (3, 5).
        let p = &y().pow(2) * &z();
        let mut pt = [Jet::constant(1); 6];
        pt[Var::Y.index()] = Jet::seed(3, 0);
        pt[Var::Z.index()] = Jet::seed(5, 1);
        let j = eval_jet(&p, &pt).unwrap();
        assert_eq!((j.v, j.d[0], j.d[1], j.d[2]), (45, 30, 9, 0));
    }

    #[test]
    fn inverse_and_det() {
        assert_eq!(mul(7, inv(7).unwrap()), 1);
        assert_eq!(inv(0), None);
        let m = vec![vec![2, 1], vec![3, 4]];
        assert_eq!(det(m), 5);
        assert_eq!(sub(0, 1), PRIME - 1);
    }
}
