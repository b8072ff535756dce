//! Principal-ideal membership by single-divisor reduction.

use crate::error::{Error, Result};
use crate::poly::MultiPoly;

/// Returns `r` with `p = q * r` when it exists.
///
/// `x` is treated as a unit (the ring is Laurent in `x`): both operands are
/// first shifted to x-valuation zero, then `p` is reduced by `q` under graded
/// lex. A single polynomial is a Gröbner basis of the ideal it generates, so
/// a zero remainder is equivalent to membership.
pub fn exact_divide(p: &MultiPoly, q: &MultiPoly) -> Result<Option<MultiPoly>> {
    let (Some(vq), Some(vp)) = (q.x_valuation(), p.x_valuation()) else {
        if q.is_zero() {
            return Err(Error::DivideByZero);
        }
        return Ok(Some(MultiPoly::zero()));
    };
    let q0 = q.shift_x(-vq);
    let mut rem = p.shift_x(-vp);
    let (lm_q, lc_q) = q0.leading().cloned().expect("nonzero divisor");
    let lc_inv = lc_q.inv().expect("nonzero leading coefficient");
    let mut quot = Vec::new();
    while let Some((lm, lc)) = rem.leading().cloned() {
        match lm.div(&lm_q) {
            Some(shift) => {
                let c = &lc * &lc_inv;
                rem = &rem - &q0.mul_monomial(&shift, &c);
                quot.push((shift, c));
            }
            // The leading term is never cancelled later, so the remainder is nonzero.
            None => return Ok(None),
        }
    }
    Ok(Some(MultiPoly::from_terms(quot).shift_x(vp - vq)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::std_polys;
    use crate::monomial::abstract_slot::{V, W, Y};
    use crate::poly::vars::*;

    fn yw_v2() -> MultiPoly {
        &(&MultiPoly::var(Y) * &MultiPoly::var(W)) + &MultiPoly::var(V).pow(2)
    }

    #[test]
    fn ideal_multiple() {
        let g = yw_v2();
        let h = &MultiPoly::var(Y) + &MultiPoly::var(V);
        assert_eq!(exact_divide(&(&g * &h), &g).unwrap(), Some(h));
    }

    #[test]
    fn degree_obstruction() {
        let g = yw_v2();
        let yv = &MultiPoly::var(Y) * &MultiPoly::var(V);
        assert_eq!(exact_divide(&yv, &g).unwrap(), None);
        let (p, _, _) = std_polys();
        assert_eq!(exact_divide(&p, &y()).unwrap(), None);
    }

    #[test]
    fn zero_cases() {
        assert_eq!(exact_divide(&y(), &MultiPoly::zero()), Err(Error::DivideByZero));
        assert_eq!(
            exact_divide(&MultiPoly::zero(), &y()).unwrap(),
            Some(MultiPoly::zero())
        );
    }

    #[test]
    fn x_is_a_unit() {
        let q = &x() * &y();
        let p = &MultiPoly::x_pow(-2) * &y().pow(3);
        assert_eq!(
            exact_divide(&p, &q).unwrap(),
            Some(&MultiPoly::x_pow(-3) * &y().pow(2))
        );
    }
}
