//! Derivations given on generators, their exponentials and conjugates.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::map::{verify_inverse_pair, PolyMap};
use crate::monomial::Var;
use crate::poly::MultiPoly;

/// Iteration bound used by [`Derivation::exp`] when none is given.
pub const DEFAULT_MAX_ITER: usize = 64;

/// A derivation over `Q[x^±1]`: `x` is always sent to zero, the other
/// generators to arbitrary (possibly Laurent) polynomials.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    images: BTreeMap<Var, MultiPoly>,
}

impl Derivation {
    pub fn zero() -> Self {
        Derivation::default()
    }

    /// Panics if an image for `x` is supplied.
    pub fn from_images<I: IntoIterator<Item = (Var, MultiPoly)>>(it: I) -> Self {
        let mut d = Derivation::zero();
        for (v, p) in it {
            assert!(v != Var::X, "derivations are linear over x");
            if !p.is_zero() {
                d.images.insert(v, p);
            }
        }
        d
    }

    pub fn image(&self, v: Var) -> MultiPoly {
        self.images.get(&v).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.images.is_empty()
    }

    /// `Σ ∂p/∂v · D(v)`.
    pub fn apply(&self, p: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for (v, img) in &self.images {
            let dp = p.partial(*v);
            if !dp.is_zero() {
                acc = &acc + &(&dp * img);
            }
        }
        acc
    }

    /// The derivation `h · D`.
    pub fn times(&self, h: &MultiPoly) -> Derivation {
        Derivation::from_images(self.images.iter().map(|(v, p)| (*v, h * p)))
    }

    /// `J(f, g, ·)`: `h ↦ det ∂(f, g, h)/∂(y, z, u)`, stored by its values on
    /// `y`, `z`, `u`.
    pub fn jacobian(f: &MultiPoly, g: &MultiPoly) -> Derivation {
        let cols = [Var::Y, Var::Z, Var::U];
        let df: Vec<MultiPoly> = cols.iter().map(|&v| f.partial(v)).collect();
        let dg: Vec<MultiPoly> = cols.iter().map(|&v| g.partial(v)).collect();
        // Cofactors of the third row.
        let cof = |i: usize, j: usize| &(&df[i] * &dg[j]) - &(&df[j] * &dg[i]);
        Derivation::from_images([
            (Var::Y, cof(1, 2)),
            (Var::Z, -&cof(0, 2)),
            (Var::U, cof(0, 1)),
        ])
    }

    /// `exp(D)`: each generator `g` goes to `Σ_k D^k(g)/k!`, which must
    /// terminate within `max_iter` applications.
    pub fn exp(&self, max_iter: usize) -> Result<PolyMap> {
        let mut out = PolyMap::identity();
        for v in Var::ALL {
            if v == Var::X {
                continue;
            }
            let mut term = MultiPoly::var(v);
            let mut sum = term.clone();
            let mut k = 0usize;
            loop {
                term = self.apply(&term);
                if term.is_zero() {
                    break;
                }
                k += 1;
                if k > max_iter {
                    return Err(Error::NotNilpotentWithinBound(max_iter));
                }
                term = term.scale(&Coeff::new(1, k as i64));
                sum = &sum + &term;
            }
            out.set(v, sum);
        }
        Ok(out)
    }

    /// `g ↦ f(D(f_inv(g)))` on generators, i.e. `f ∘ D ∘ f⁻¹` as operators.
    pub fn conjugate(&self, f: &PolyMap, f_inv: &PolyMap) -> Result<Derivation> {
        if !verify_inverse_pair(f, f_inv, &Var::ALL) {
            return Err(Error::NotInversePair);
        }
        let mut images = Vec::new();
        for v in Var::ALL {
            if v == Var::X {
                continue;
            }
            let pre = f_inv.image(v);
            images.push((v, f.apply(&self.apply(&pre))?));
        }
        Ok(Derivation::from_images(images))
    }

    pub fn negate(&self) -> Derivation {
        Derivation::from_images(self.images.iter().map(|(v, p)| (*v, -p)))
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.images.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .images
            .iter()
            .map(|(v, p)| format!("({}) d/d{}", p, v))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation[{}]", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::std_polys;
    use crate::poly::vars::*;

    fn nagata_d() -> Derivation {
        Derivation::from_images([(Var::Z, y()), (Var::U, z().scale(&Coeff::from_int(-2)))])
    }

    #[test]
    fn d_kills_p() {
        let (p, _, _) = std_polys();
        let d = nagata_d();
        assert!(d.apply(&p).is_zero());
        assert_eq!(d.apply(&z()), y());
        assert_eq!(d.apply(&u()), z().scale(&Coeff::from_int(-2)));
    }

    #[test]
    fn jacobian_rows() {
        let j = Derivation::jacobian(&z(), &u());
        assert_eq!(j.apply(&y()), MultiPoly::one());
        let (_, v, w) = std_polys();
        let d = Derivation::jacobian(&v, &w);
        assert!(d.apply(&v).is_zero());
        assert!(d.apply(&w).is_zero());
        // brute-force cofactor for the y row
        let minor = &(&v.partial(Var::Z) * &w.partial(Var::U)) - &(&v.partial(Var::U) * &w.partial(Var::Z));
        assert_eq!(d.apply(&y()), minor);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert!(Derivation::zero().exp(DEFAULT_MAX_ITER).unwrap().is_identity());
    }

    #[test]
    fn non_nilpotent_reports_bound() {
        // z d/dz is not locally nilpotent
        let d = Derivation::from_images([(Var::Z, z())]);
        assert_eq!(d.exp(8), Err(Error::NotNilpotentWithinBound(8)));
    }
}
