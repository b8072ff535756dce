//! Frames: `(p, v, w)` triples with exact x-power inversion formulas linking
//! the `(y, v, w)` and `(y, z, u)` presentations.

use crate::coeff::Coeff;
use crate::error::Result;
use crate::map::PolyMap;
use crate::monomial::{abstract_slot, Var};
use crate::poly::{vars::*, Images, MultiPoly};

/// `p = y u + z^2`, `v = x z + y p`, `w = x^2 u - 2 x z p - y p^2`.
pub fn std_polys() -> (MultiPoly, MultiPoly, MultiPoly) {
    let p = &(&y() * &u()) + &z().pow(2);
    let v = &(&x() * &z()) + &(&y() * &p);
    let w = &(&(&x().pow(2) * &u()) - &(&x() * &z() * &p).scale(&Coeff::from_int(2)))
        - &(&y() * &p.pow(2));
    (p, v, w)
}

/// A `(p, v, w)` triple with
/// `z = (v - y p) x^-e_z`, `u = (w + 2 v p - y p^2) x^-e_u`,
/// `p = (y w + v^2) x^-e_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub name: &'static str,
    pub p: MultiPoly,
    pub v: MultiPoly,
    pub w: MultiPoly,
    pub e_z: i32,
    pub e_u: i32,
    pub e_p: i32,
}

impl Frame {
    pub fn standard() -> Frame {
        let (p, v, w) = std_polys();
        Frame {
            name: "standard",
            p,
            v,
            w,
            e_z: 1,
            e_u: 2,
            e_p: 2,
        }
    }

    /// `p0 = x y u + z^2`, `v0 = z + y p0`, `w0 = x u - 2 v0 p0 + y p0^2`.
    pub fn zero() -> Frame {
        let p = &(&x() * &y() * &u()) + &z().pow(2);
        let v = &z() + &(&y() * &p);
        let w = &(&(&x() * &u()) - &(&v * &p).scale(&Coeff::from_int(2))) + &(&y() * &p.pow(2));
        Frame {
            name: "zero",
            p,
            v,
            w,
            e_z: 0,
            e_u: 1,
            e_p: 0,
        }
    }

    /// `(y w + v^2) x^-e_p`, which must equal the stored `p`.
    pub fn p_from_vw(&self) -> MultiPoly {
        (&(&y() * &self.w) + &self.v.pow(2)).shift_x(-self.e_p)
    }

    /// Residuals of the three inversion identities (all zero for a valid frame).
    pub fn inversion_residuals(&self) -> [MultiPoly; 3] {
        let rz = &(&self.v - &(&y() * &self.p)).shift_x(-self.e_z) - &z();
        let ru = &(&(&self.w + &(&self.v * &self.p).scale(&Coeff::from_int(2)))
            - &(&y() * &self.p.pow(2)))
            .shift_x(-self.e_u)
            - &u();
        let rp = &self.p_from_vw() - &self.p;
        [rz, ru, rp]
    }

    /// Expands an abstract `(Y, V, W, T)` polynomial through the frame.
    pub fn expand(&self, f: &MultiPoly) -> MultiPoly {
        let mut im = Images::new();
        im.insert(abstract_slot::V, self.v.clone());
        im.insert(abstract_slot::W, self.w.clone());
        f.substitute(&im)
            .expect("frame polynomials are integral; no x image is set")
    }

    /// The endomorphism of `(y, z, u[, t])` induced by `Y -> f_y`, `V -> f_v`,
    /// `W -> f_w` (and `T -> f_t` when given). Images may be Laurent in x.
    pub fn extend(
        &self,
        f_y: &MultiPoly,
        f_v: &MultiPoly,
        f_w: &MultiPoly,
        f_t: Option<&MultiPoly>,
    ) -> PolyMap {
        let py = self.expand(f_y);
        let pv = self.expand(f_v);
        let pw = self.expand(f_w);
        let pp = (&(&py * &pw) + &pv.pow(2)).shift_x(-self.e_p);
        let iz = (&pv - &(&py * &pp)).shift_x(-self.e_z);
        let iu = (&(&pw + &(&pv * &pp).scale(&Coeff::from_int(2))) - &(&py * &pp.pow(2)))
            .shift_x(-self.e_u);
        let mut m = PolyMap::identity();
        m.set(Var::Y, py);
        m.set(Var::Z, iz);
        m.set(Var::U, iu);
        if let Some(ft) = f_t {
            m.set(Var::T, self.expand(ft));
        }
        m
    }

    /// Tuple composition `extend(f_abs) ∘ g` for an x-fixing `g`, computed by
    /// substituting `g(y)`, `g(v)`, `g(w)` into the small abstract formulas
    /// instead of into the expanded images.
    pub fn compose_extended(&self, f_abs: &PolyMap, g: &PolyMap) -> Result<PolyMap> {
        if !g.is_linear_over_x() {
            return self.extend_map(f_abs).compose(g);
        }
        let mut im = Images::new();
        im.insert(abstract_slot::Y, g.image(Var::Y));
        im.insert(abstract_slot::V, g.apply(&self.v)?);
        im.insert(abstract_slot::W, g.apply(&self.w)?);
        im.insert(abstract_slot::T, g.image(Var::T));
        im.insert(Var::C, g.image(Var::C));
        let mut acc = PolyMap::identity();
        for v in [abstract_slot::Y, abstract_slot::V, abstract_slot::W, abstract_slot::T, Var::C] {
            acc.set(v, f_abs.image(v).substitute(&im)?);
        }
        Ok(self.invert_images(acc))
    }

    /// Extension of the tuple composite `f1 ∘ … ∘ fk` of abstract maps,
    /// composed right to left onto the expansion so that every substitution
    /// goes into a small abstract formula.
    pub fn extend_chain(&self, chain: &[&PolyMap]) -> Result<PolyMap> {
        Ok(self.invert_images(self.expand_chain(chain)?))
    }

    /// Expanded images of `Y`, `V`, `W`, `T` under the composite of `chain`.
    pub fn expand_chain(&self, chain: &[&PolyMap]) -> Result<PolyMap> {
        let mut acc = PolyMap::from_images([
            (abstract_slot::V, self.v.clone()),
            (abstract_slot::W, self.w.clone()),
        ]);
        for f in chain.iter().rev() {
            acc = f.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Turns images of `Y`, `V`, `W` (and `T`, `c`) into images of `y`, `z`,
    /// `u` by the inversion formulas.
    pub fn invert_images(&self, acc: PolyMap) -> PolyMap {
        let py = acc.image(abstract_slot::Y);
        let pv = acc.image(abstract_slot::V);
        let pw = acc.image(abstract_slot::W);
        let pp = (&(&py * &pw) + &pv.pow(2)).shift_x(-self.e_p);
        let iz = (&pv - &(&py * &pp)).shift_x(-self.e_z);
        let iu = (&(&pw + &(&pv * &pp).scale(&Coeff::from_int(2))) - &(&py * &pp.pow(2)))
            .shift_x(-self.e_u);
        PolyMap::from_images([
            (Var::Y, py),
            (Var::Z, iz),
            (Var::U, iu),
            (Var::T, acc.image(abstract_slot::T)),
            (Var::C, acc.image(Var::C)),
        ])
    }

    /// Checks that two abstract maps extend to mutually inverse maps on
    /// `y`, `z`, `u`. Expansion is a ring isomorphism
    /// `Q[x^±1][Y, V, W, T] → Q[x^±1][y, z, u, t]` (its inverse is given by the
    /// inversion identities), so extension commutes with composition and the
    /// check can run on the abstract maps.
    pub fn verify_inverse_pair(&self, f_abs: &PolyMap, g_abs: &PolyMap) -> bool {
        let slots = [abstract_slot::Y, abstract_slot::V, abstract_slot::W, abstract_slot::T];
        crate::map::verify_inverse_pair(f_abs, g_abs, &slots)
    }

    /// Extension of an abstract-coordinate map (images of `Y`, `V`, `W`, `T`).
    pub fn extend_map(&self, abstract_map: &PolyMap) -> PolyMap {
        let t_image = abstract_map.get(abstract_slot::T);
        self.extend(
            &abstract_map.image(abstract_slot::Y),
            &abstract_map.image(abstract_slot::V),
            &abstract_map.image(abstract_slot::W),
            t_image,
        )
    }
}
