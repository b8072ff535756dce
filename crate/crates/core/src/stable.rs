//! The stable-coordinate construction: for `Q = Σ α_{a,b,r} v^a (−w)^b x^r`,
//! an automorphism of `R[y, z, u, t]` with `y ↦ y + x Q(v, w)`.
//!
//! Indices: `(a, b, r)` is a [`Key`]; second-order coefficients are indexed
//! by ordered pairs of keys, the first one playing the role of `(a, b, r)`
//! and the second of `(c, d, s)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::certificate::{chain_oracle_modp, point_oracle, CertBuilder, Certificate, VerifyOptions};
use crate::coeff::Coeff;
use crate::divide::exact_divide;
use crate::error::{Error, Result};
use crate::frame::{std_polys, Frame};
use crate::map::PolyMap;
use crate::modp::{self, Jet};
use crate::monomial::{abstract_slot, Monomial, Var};
use crate::poly::{vars::*, MultiPoly};
use crate::venereau::{abs_v, abs_w, abs_y, in_c_y_p, nagata_derivation};

/// `(a, b, r)`: the exponents of `v`, `−w` and `x`.
pub type Key = (u32, u32, u32);

const YZUT: [Var; 4] = [Var::Y, Var::Z, Var::U, Var::T];
const SLOTS: [Var; 4] = [abstract_slot::Y, abstract_slot::V, abstract_slot::W, abstract_slot::T];

fn ci(n: i64) -> Coeff {
    Coeff::from_int(n)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QSpec {
    alpha: BTreeMap<Key, Coeff>,
}

impl QSpec {
    /// Sums duplicate keys and drops zero coefficients. Keys `(0, 0, r)` are
    /// rejected: a pure x-polynomial summand of `Q` is an elementary shift of
    /// `y` and should be absorbed by the caller.
    pub fn new<I: IntoIterator<Item = (Key, Coeff)>>(terms: I) -> Result<QSpec> {
        let mut alpha: BTreeMap<Key, Coeff> = BTreeMap::new();
        for (k, c) in terms {
            *alpha.entry(k).or_default() += &c;
        }
        alpha.retain(|_, c| !c.is_zero());
        if let Some(&(_, _, r)) = alpha.keys().find(|(a, b, _)| *a == 0 && *b == 0) {
            return Err(Error::ConstantTermUnsupported { r });
        }
        Ok(QSpec { alpha })
    }

    /// Reads `Q` from an abstract polynomial in `x`, `V`, `W`.
    pub fn from_abstract(q: &MultiPoly) -> Result<QSpec> {
        let mut terms = Vec::new();
        for (m, c) in q.terms() {
            let r = m.exp(Var::X);
            if r < 0 || m.exp(Var::Y) != 0 || m.exp(Var::T) != 0 || m.exp(Var::C) != 0 {
                return Err(Error::Malformed(format!(
                    "Q must be a polynomial in x, v, w; found term {}",
                    m
                )));
            }
            let a = m.exp(abstract_slot::V) as u32;
            let b = m.exp(abstract_slot::W) as u32;
            let c = if b % 2 == 1 { -c } else { c.clone() };
            terms.push(((a, b, r as u32), c));
        }
        QSpec::new(terms)
    }

    pub fn alpha(&self) -> &BTreeMap<Key, Coeff> {
        &self.alpha
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `Σ α V^a (−W)^b x^r`.
    pub fn to_abstract(&self) -> MultiPoly {
        MultiPoly::from_terms(self.alpha.iter().map(|(&(a, b, r), c)| {
            let c = if b % 2 == 1 { -c } else { c.clone() };
            (Monomial::new(r as i32, 0, a, b, 0, 0), c)
        }))
    }
}

impl fmt::Display for QSpec {
    /// `{(1,1,2):3/2, (3,0,0):1}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, ((a, b, r), c)) in self.alpha.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({},{},{}):{}", a, b, r, c)?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub m: u32,
    pub delta: u32,
    pub epsilon: u32,
}

/// `m = min(a + b, ⌊(a + 2b + 1)/2⌋)`, the largest `m` with
/// `δ = a + b − m ≥ 0` and `ε = a + 2b + 1 − 2m ≥ 0`.
pub fn shape(a: u32, b: u32) -> Shape {
    let m = (a + b).min((a + 2 * b + 1) / 2);
    Shape {
        m,
        delta: a + b - m,
        epsilon: a + 2 * b + 1 - 2 * m,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct First {
    pub rho: Coeff,
    pub mu: Coeff,
    pub sigma: Coeff,
    pub tau: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Second {
    pub nu: Coeff,
    pub kappa: Coeff,
    pub lambda: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableCoeffTable {
    pub alpha: BTreeMap<Key, Coeff>,
    pub shapes: BTreeMap<(u32, u32), Shape>,
    pub first: BTreeMap<Key, First>,
    pub second: BTreeMap<(Key, Key), Second>,
    /// `ζ_{a,b,r,j}`; absent entries are zero.
    pub zeta: BTreeMap<(Key, u32), Coeff>,
    /// `η^{a,b,r}_{c,d,s,j}`; absent entries are zero.
    pub eta: BTreeMap<(Key, Key, u32), Coeff>,
}

pub fn build_coeff_table(q: &QSpec) -> Result<StableCoeffTable> {
    let mut shapes = BTreeMap::new();
    let mut first = BTreeMap::new();
    for (&(a, b, r), al) in &q.alpha {
        let sh = shape(a, b);
        if sh.m == 0 {
            return Err(Error::ConstantTermUnsupported { r });
        }
        shapes.insert((a, b), sh);
        let (m, e) = (sh.m as i64, sh.epsilon as i64);
        let n2 = (a + 2 * b + 2) as i64;
        let n1 = (a + 2 * b + 1) as i64;
        first.insert(
            (a, b, r),
            First {
                rho: al * &Coeff::new(n2 * (1 - e), 2 * (2 * m + 1)),
                mu: al * &Coeff::new(n1 * e, 2 * m + 1),
                sigma: al * &Coeff::new(-n2 * e, 4),
                tau: al * &Coeff::new(-n2 * m * e, 4),
            },
        );
    }
    let mut second = BTreeMap::new();
    for (&k1, a1) in &q.alpha {
        let f1 = &first[&k1];
        let d1 = shapes[&(k1.0, k1.1)].delta as i64;
        let ab = (k1.0 + k1.1) as i64;
        let n2 = (k1.0 + 2 * k1.1 + 2) as i64;
        for (&k2, a2) in &q.alpha {
            let f2 = &first[&k2];
            let cd2 = (k2.0 + 2 * k2.1) as i64;
            let nu = -(&f1.mu * &ci(ab) * a2) - (&f1.rho - a1) * (&f2.rho - a2);
            let kappa = -((&f1.sigma + &(ci(d1) * &f1.rho)) * a2);
            let lambda = Coeff::new(-1, 4)
                * (ci(cd2) * (&nu + &(ci(2) * &kappa))
                    + ci(4 * ab) * &f1.sigma * a2
                    + ci(n2) * &f1.rho * (&f2.rho - a2));
            second.insert((k1, k2), Second { nu, kappa, lambda });
        }
    }
    Ok(StableCoeffTable {
        alpha: q.alpha.clone(),
        shapes,
        first,
        second,
        zeta: BTreeMap::new(),
        eta: BTreeMap::new(),
    })
}

fn sign(m: u32, j: u32) -> Coeff {
    if (m - j) % 2 == 0 {
        ci(1)
    } else {
        ci(-1)
    }
}

impl StableCoeffTable {
    pub fn shape_of(&self, k: &Key) -> Shape {
        self.shapes[&(k.0, k.1)]
    }

    pub fn zeta(&self, k: &Key, j: u32) -> Coeff {
        self.zeta.get(&(*k, j)).cloned().unwrap_or_default()
    }

    pub fn eta(&self, k1: &Key, k2: &Key, j: u32) -> Coeff {
        self.eta.get(&(*k1, *k2, j)).cloned().unwrap_or_default()
    }

    /// Residuals of `2δ − ε = a − 1` and the four quick-check identities
    /// (`mρ − σ`, `mσ − τ`, `ερ + 2σ`, `εσ + 2τ` against their closed forms);
    /// all zero for a correct table.
    pub fn quick_check_residuals(&self) -> Vec<(String, Coeff)> {
        let mut out = Vec::new();
        for (k, al) in &self.alpha {
            let sh = self.shape_of(k);
            let f = &self.first[k];
            let (m, e) = (ci(sh.m as i64), ci(sh.epsilon as i64));
            let n2 = (k.0 + 2 * k.1 + 2) as i64;
            let binom = ci(n2 * (n2 - 1) / 2);
            let odd = ci(2 * sh.m as i64 + 1);
            let tag = format!("({},{},{})", k.0, k.1, k.2);
            out.push((
                format!("2delta - epsilon = a - 1 {}", tag),
                ci(2 * sh.delta as i64 - sh.epsilon as i64 - k.0 as i64 + 1),
            ));
            out.push((
                format!("m rho - sigma {}", tag),
                &m * &f.rho
                    - &f.sigma
                    - al * &ci(n2) * (&e + &(ci(2) * &m)) / (ci(4) * &odd),
            ));
            out.push((format!("m sigma - tau {}", tag), &m * &f.sigma - &f.tau));
            out.push((
                format!("epsilon rho + 2 sigma {}", tag),
                &e * &f.rho + ci(2) * &f.sigma + al * &binom * &e / odd.clone(),
            ));
            out.push((
                format!("epsilon sigma + 2 tau {}", tag),
                &e * &f.sigma + ci(2) * &f.tau + al * &binom * &e / ci(2),
            ));
        }
        out
    }

    /// Residuals of the alternating moment equations for `ζ` (against `ρ`,
    /// `σ`, `τ`) and `η` (against `κ`, `λ`).
    pub fn moment_residuals(&self) -> Vec<(String, Coeff)> {
        let mut out = Vec::new();
        for k in self.alpha.keys() {
            let m = self.shape_of(k).m;
            let f = &self.first[k];
            let mut mom = [Coeff::zero(), Coeff::zero(), Coeff::zero()];
            for j in 0..=m {
                let z = sign(m, j) * self.zeta(k, j);
                let jj = ci(j as i64);
                mom[0] += &z;
                mom[1] += &(&jj * &z);
                mom[2] += &(&jj * &jj * &z);
            }
            let tag = format!("({},{},{})", k.0, k.1, k.2);
            out.push((format!("zeta moment 0 {}", tag), &mom[0] - &f.rho));
            out.push((format!("zeta moment 1 {}", tag), &mom[1] - &f.sigma));
            out.push((format!("zeta moment 2 {}", tag), &mom[2] - &f.tau));
        }
        for ((k1, k2), s) in &self.second {
            let m = self.shape_of(k1).m;
            let mut mom = [Coeff::zero(), Coeff::zero()];
            for j in 0..=m {
                let e = sign(m, j) * self.eta(k1, k2, j);
                mom[0] += &e;
                mom[1] += &(ci(j as i64) * &e);
            }
            let tag = format!("({},{},{};{},{},{})", k1.0, k1.1, k1.2, k2.0, k2.1, k2.2);
            out.push((format!("eta moment 0 {}", tag), &mom[0] - &s.kappa));
            out.push((format!("eta moment 1 {}", tag), &mom[1] - &s.lambda));
        }
        out
    }
}

/// Fills `ζ` and `η` with the minimal-support solutions: `ζ` on
/// `{m−2, m−1, m}` (on `{0, 1}` when `m = 1`), `η` on `{m−1, m}`.
pub fn solve_moments(mut table: StableCoeffTable) -> Result<StableCoeffTable> {
    table.zeta.clear();
    table.eta.clear();
    let keys: Vec<Key> = table.alpha.keys().copied().collect();
    for k in &keys {
        let m = table.shape_of(k).m;
        let f = table.first[k].clone();
        if m == 1 {
            if f.sigma != f.tau {
                return Err(Error::InconsistentMoments { a: k.0, b: k.1 });
            }
            table.zeta.insert((*k, 1), f.sigma.clone());
            table.zeta.insert((*k, 0), &f.sigma - &f.rho);
        } else {
            // Moments about j = m − 1: s1 = C − A, s2 = A + C.
            let c = ci(m as i64 - 1);
            let s1 = &f.sigma - &(&c * &f.rho);
            let s2 = &f.tau - &(ci(2) * &c * &f.sigma) + &c * &c * &f.rho;
            let half = Coeff::new(1, 2);
            table.zeta.insert((*k, m - 2), (&s2 - &s1) * &half);
            table.zeta.insert((*k, m - 1), &s2 - &f.rho);
            table.zeta.insert((*k, m), (&s2 + &s1) * &half);
        }
    }
    for k1 in &keys {
        let m = table.shape_of(k1).m as i64;
        for k2 in &keys {
            let s = table.second[&(*k1, *k2)].clone();
            table
                .eta
                .insert((*k1, *k2, (m - 1) as u32), &s.lambda - &(ci(m) * &s.kappa));
            table
                .eta
                .insert((*k1, *k2, m as u32), &s.lambda - &(ci(m - 1) * &s.kappa));
        }
    }
    table.zeta.retain(|_, c| !c.is_zero());
    table.eta.retain(|_, c| !c.is_zero());
    if let Some((_, _)) = table.moment_residuals().iter().find(|(_, r)| !r.is_zero()) {
        let k = keys[0];
        return Err(Error::InconsistentMoments { a: k.0, b: k.1 });
    }
    Ok(table)
}

/// `c x^ex Y^ey V^ev W^ew T^et` as an abstract polynomial.
fn abs_term(c: &Coeff, ex: i32, ey: u32, ev: u32, ew: u32, et: u32) -> MultiPoly {
    MultiPoly::term(Monomial::new(ex, ey, ev, ew, et, 0), c.clone())
}

/// The abstract factors `A, E_W, E_V, E, C` (tuple order) and their
/// composite.
#[derive(Clone, Debug)]
pub struct StableFactors {
    pub a: PolyMap,
    pub e_w: PolyMap,
    pub e_v: PolyMap,
    pub e: PolyMap,
    pub c: PolyMap,
}

impl StableFactors {
    pub fn chain(&self) -> [&PolyMap; 5] {
        [&self.a, &self.e_w, &self.e_v, &self.e, &self.c]
    }

    /// `φ′ = E_W ∘ E_V`.
    pub fn phi_prime(&self) -> Result<PolyMap> {
        self.e_w.compose(&self.e_v)
    }

    pub fn composite(&self) -> Result<PolyMap> {
        PolyMap::compose_chain(&self.chain())
    }
}

/// The factors of the abstract map on `(Y, V, W, T)`, with
/// `A = (Y, V, W, T − (YW + V²)/x³)`, `C` its inverse and
/// `E = (Y + xQ, V, W, T)`.
pub fn build_factors(table: &StableCoeffTable) -> StableFactors {
    let mut dv = MultiPoly::zero();
    let mut dw = MultiPoly::zero();
    for (k, f) in &table.first {
        let (a, b, r) = *k;
        let sh = table.shape_of(k);
        let n2 = a + 2 * b + 2;
        dw = &dw + &abs_term(&f.mu, (1 + r + n2) as i32, a + b, 0, 0, n2);
        for j in 0..=sh.m {
            let z = table.zeta(k, j);
            if z.is_zero() {
                continue;
            }
            let et = 2 * j + sh.epsilon;
            dv = &dv + &abs_term(&z, (1 + r + et) as i32, j + sh.delta, 0, sh.m - j, et);
        }
    }
    for ((k1, k2), s) in &table.second {
        let (a, b, r) = *k1;
        let (c, d, s_) = *k2;
        let sh = table.shape_of(k1);
        let base = 2 + r + s_;
        let et = a + 2 * b + c + 2 * d + 2;
        dw = &dw + &abs_term(&s.nu, (base + et) as i32, a + b + c + d - 1, 0, 0, et);
        for j in 0..=sh.m {
            let e = table.eta(k1, k2, j);
            if e.is_zero() {
                continue;
            }
            let et = c + 2 * d + 2 * j + sh.epsilon;
            dv = &dv + &abs_term(&e, (base + et) as i32, c + d - 1 + j + sh.delta, 0, sh.m - j, et);
        }
    }
    let q = QSpec {
        alpha: table.alpha.clone(),
    }
    .to_abstract();
    let rel = (&(&abs_y() * &abs_w()) + &abs_v().pow(2)).shift_x(-3);
    let t_abs = MultiPoly::var(abstract_slot::T);
    StableFactors {
        a: PolyMap::from_images([(abstract_slot::T, &t_abs - &rel)]),
        e_w: PolyMap::from_images([(abstract_slot::W, &abs_w() + &dw)]),
        e_v: PolyMap::from_images([(abstract_slot::V, &abs_v() + &dv)]),
        e: PolyMap::from_images([(abstract_slot::Y, &abs_y() + &q.shift_x(1))]),
        c: PolyMap::from_images([(abstract_slot::T, &t_abs + &rel)]),
    }
}

/// Everything the certifier needs: the table, the abstract factors and
/// composite, and the expanded images of `y`, `v`, `w`, `t`.
#[derive(Clone, Debug)]
pub struct StablePhi {
    pub table: StableCoeffTable,
    pub factors: StableFactors,
    pub abstract_map: PolyMap,
    /// `Φ(y)`, `Φ(v)`, `Φ(w)`, `Φ(t)` in the `Y`, `V`, `W`, `T` slots.
    pub expanded: PolyMap,
}

impl StablePhi {
    /// The full map on `(y, z, u, t)`. `Φ(u)` involves `Φ(p)^2` and grows
    /// quickly with the degree of `Q`; the certifier works modulo powers of
    /// x instead.
    pub fn map(&self) -> PolyMap {
        Frame::standard().invert_images(self.expanded.clone())
    }

    pub fn image_y(&self) -> MultiPoly {
        self.expanded.image(abstract_slot::Y)
    }

    pub fn image_t(&self) -> MultiPoly {
        self.expanded.image(abstract_slot::T)
    }
}

pub fn build_stable(q: &QSpec) -> Result<StablePhi> {
    let table = solve_moments(build_coeff_table(q)?)?;
    let factors = build_factors(&table);
    let abstract_map = factors.composite()?;
    let expanded = Frame::standard().expand_chain(&factors.chain())?;
    Ok(StablePhi {
        table,
        factors,
        abstract_map,
        expanded,
    })
}

/// `Φ` on `(y, z, u, t)`.
pub fn build_phi(q: &QSpec) -> Result<PolyMap> {
    Ok(build_stable(q)?.map())
}

/// Low-order x-parts of `Φ(p)`, `Φ(z)`, `Φ(u)`, from truncated products of
/// the expanded images. With `N_p = Φ(y)Φ(w) + Φ(v)^2 = x^2 Φ(p)`,
/// `N_z = Φ(v) − Φ(y)Φ(p) = x Φ(z)` and
/// `N_u = Φ(w) + 2Φ(v)Φ(p) − Φ(y)Φ(p)^2 = x^2 Φ(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowOrder {
    /// `N_p mod x^5`.
    pub n_p: MultiPoly,
    /// `N_z mod x`, `N_u mod x^2`: zero iff `Φ(z)`, `Φ(u)` are integral.
    pub z_residue: MultiPoly,
    pub u_residue: MultiPoly,
    /// `Φ(z) mod x`, `Φ(u) mod x`.
    pub z_bar: MultiPoly,
    pub u_bar: MultiPoly,
}

/// Requires `Φ(y)`, `Φ(v)`, `Φ(w)` integral, which makes every truncation
/// exact.
pub fn low_order(phi: &StablePhi) -> Result<LowOrder> {
    let e = &phi.expanded;
    let (py, pv, pw) = (
        e.image(abstract_slot::Y),
        e.image(abstract_slot::V),
        e.image(abstract_slot::W),
    );
    if !(py.is_integral() && pv.is_integral() && pw.is_integral()) {
        return Err(Error::NotIntegral);
    }
    let below = |p: &MultiPoly, k: i32| p.filter_terms(|m, _| m.exp(Var::X) < k);
    let n_p = &py.mul_trunc_x(&pw, 5) + &pv.mul_trunc_x(&pv, 5);
    // Φ(p) mod x^3, valid once the x^0 and x^1 parts of N_p vanish.
    let pp = n_p.filter_terms(|m, _| m.exp(Var::X) >= 2).shift_x(-2);
    let n_z = &below(&pv, 2) - &py.mul_trunc_x(&pp, 2);
    let two = Coeff::from_int(2);
    let n_u = &(&below(&pw, 3) + &pv.mul_trunc_x(&pp, 3).scale(&two))
        - &py.mul_trunc_x(&pp.mul_trunc_x(&pp, 3), 3);
    Ok(LowOrder {
        z_residue: below(&n_z, 1),
        u_residue: below(&n_u, 2),
        z_bar: n_z.x_coefficient(1),
        u_bar: n_u.x_coefficient(2),
        n_p,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PSeries {
    pub p_minus1: MultiPoly,
    pub p0: MultiPoly,
    pub p1: MultiPoly,
    pub p_tilde: MultiPoly,
}

/// `x (Φ(p) − p) = N_p / x − x p = P₋₁ + x P₀ + x² P₁ + …`; a nonzero
/// `x^0` part of `N_p` (an `x^-1` term) is [`Error::NotIntegral`].
pub fn p_series_direct(phi: &StablePhi) -> Result<PSeries> {
    let lo = low_order(phi)?;
    if !lo.n_p.x_coefficient(0).is_zero() {
        return Err(Error::NotIntegral);
    }
    let p = &(&y() * &u()) + &z().pow(2);
    Ok(PSeries {
        p_minus1: lo.n_p.x_coefficient(1),
        p0: &lo.n_p.x_coefficient(2) - &p,
        p1: lo.n_p.x_coefficient(3),
        p_tilde: p_tilde_of(&lo.z_bar)?,
    })
}

/// `P̃ = (Φ(z) mod x − z) / y`.
pub fn p_tilde_of(z_bar: &MultiPoly) -> Result<MultiPoly> {
    exact_divide(&(z_bar - &z()), &y())?.ok_or(Error::ExactDivisionByYFailed)
}

/// The x-expansion pieces `Q_k`, `V_k`, `W_k` (`k = 0, 1, 2`) with
/// `Q = Σ x^k Q_k`, `Φ(v) − v = Σ x^{k+1} V_k`, `Φ(w) − w = Σ x^{k+1} W_k`.
pub struct Pieces {
    pub q: [MultiPoly; 3],
    pub v: [MultiPoly; 3],
    pub w: [MultiPoly; 3],
}

pub fn pieces(phi: &StablePhi) -> Result<Pieces> {
    let (_, v, w) = std_polys();
    let e = &phi.expanded;
    let qe = (&e.image(abstract_slot::Y) - &y()).shift_x(-1);
    let ve = (&e.image(abstract_slot::V) - &v).shift_x(-1);
    let we = (&e.image(abstract_slot::W) - &w).shift_x(-1);
    for e in [&qe, &ve, &we] {
        if !e.is_integral() {
            return Err(Error::NotIntegral);
        }
    }
    let take = |e: &MultiPoly| [0, 1, 2].map(|k| e.x_coefficient(k));
    Ok(Pieces {
        q: take(&qe),
        v: take(&ve),
        w: take(&we),
    })
}

/// `P₋₁`, `P₀`, `P₁` assembled from [`Pieces`] by the closed formulas
/// `P₋₁ = y(W₀ + 2pV₀ − p²Q₀)`,
/// `P₀ = y(W₁ + 2pV₁ − p²Q₁) + Q₀W₀ + V₀² + 2z(V₀ − pQ₀)`,
/// `P₁ = y(W₂ + 2pV₂ − p²Q₂) + Q₀u + Q₀W₁ + Q₁W₀ + 2zV₁ + 2V₀V₁ − 2zpQ₁`.
pub fn p_series_from_pieces(pc: &Pieces) -> [MultiPoly; 3] {
    let p = &(&y() * &u()) + &z().pow(2);
    let two = Coeff::from_int(2);
    let lead = |k: usize| {
        &y() * &(&(&pc.w[k] + &(&p * &pc.v[k]).scale(&two)) - &(&p.pow(2) * &pc.q[k]))
    };
    let (q0, q1) = (&pc.q[0], &pc.q[1]);
    let (v0, v1) = (&pc.v[0], &pc.v[1]);
    let (w0, w1) = (&pc.w[0], &pc.w[1]);
    let pm1 = lead(0);
    let p0 = &(&(&lead(1) + &(q0 * w0)) + &v0.pow(2)) + &(&z() * &(v0 - &(&p * q0))).scale(&two);
    let p1 = &(&(&(&(&lead(2) + &(q0 * &u())) + &(q0 * w1)) + &(q1 * w0))
        + &(&(&z() * v1) + &(v0 * v1)).scale(&two))
        - &(&(&z() * &p) * q1).scale(&two);
    [pm1, p0, p1]
}

pub fn extract_p_series(q: &QSpec) -> Result<PSeries> {
    p_series_direct(&build_stable(q)?)
}

/// `stable[q={(a,b,r):α, …}]`.
pub fn stable_claim_id(q: &QSpec) -> String {
    format!("stable[q={}]", q)
}

/// Evaluates `Φ` at a point mod the prime by running the abstract factors
/// on `(y, v, w, t)` and inverting the frame, with derivatives in
/// `y`, `z`, `u`, `t`. Returns the images of `y`, `z`, `u`, `t`.
pub fn eval_phi_jet(phi: &StablePhi, pt: &modp::ModPoint) -> Option<[Jet; 4]> {
    let (_, v, w) = std_polys();
    let mut start = [Jet::constant(0); 6];
    for var in Var::ALL {
        start[var.index()] = Jet::constant(pt[var.index()]);
    }
    for (i, var) in YZUT.iter().enumerate() {
        start[var.index()] = Jet::seed(pt[var.index()], i);
    }
    let mut s = start;
    s[abstract_slot::V.index()] = modp::eval_jet(&v, &start)?;
    s[abstract_slot::W.index()] = modp::eval_jet(&w, &start)?;
    for f in phi.factors.chain().iter().rev() {
        s = modp::eval_map_jet(f, &s)?;
    }
    let xi = modp::inv(pt[Var::X.index()])?;
    let (py, pv, pw) = (
        s[abstract_slot::Y.index()],
        s[abstract_slot::V.index()],
        s[abstract_slot::W.index()],
    );
    let pp = py.mul(&pw).add(&pv.mul(&pv)).scale(modp::mul(xi, xi));
    let pz = pv.sub(&py.mul(&pp)).scale(xi);
    let pu = pw
        .add(&pv.mul(&pp).scale(2))
        .sub(&py.mul(&pp).mul(&pp))
        .scale(modp::mul(xi, xi));
    Some([py, pz, pu, s[abstract_slot::T.index()]])
}

pub fn verify_stable(q: &QSpec, opts: &VerifyOptions) -> Certificate {
    let id = stable_claim_id(q);
    let mut b = CertBuilder::new(id.clone());
    let mut rng = opts.rng_for(&id);
    let Some(phi) = b.ok("construction", build_stable(q)) else {
        return b.finish();
    };
    let (p, std_v, std_w) = std_polys();

    let bad: Vec<_> = phi
        .table
        .quick_check_residuals()
        .into_iter()
        .chain(phi.table.moment_residuals())
        .filter(|(_, r)| !r.is_zero())
        .map(|(n, _)| n)
        .collect();
    b.check_with(
        "coefficient identities and moment equations",
        bad.is_empty(),
        if bad.is_empty() {
            "all hold".to_string()
        } else {
            bad.join("; ")
        },
    );

    let Some(lo) = b.ok("low-order parts", low_order(&phi)) else {
        return b.finish();
    };
    let Some(ps) = b.ok("P-series", p_series_direct(&phi)) else {
        return b.finish();
    };
    // (i)
    b.check_zero("(i) P_-1 = 0", &ps.p_minus1);
    b.check_zero("(i) P_0 = 0", &ps.p0);
    let ty = phi.image_t();
    // Φ(t) = t + p/x − Φ(p)/x, so x(Φ(p) − p) = x^2 (t − Φ(t)).
    let via_t = (&(&t() - &ty).shift_x(2)).filter_terms(|m, _| m.exp(Var::X) < 3);
    let series = &(&(&lo.n_p.x_coefficient(0).shift_x(-1) + &ps.p_minus1)
        + &ps.p0.shift_x(1))
        + &ps.p1.shift_x(2);
    b.check_eq("x (phi(p) - p) = x^2 (t - phi(t)) mod x^3", &series, &via_t);
    if let Some(pc) = b.ok("pieces", pieces(&phi)) {
        let [pm1, p0, p1] = p_series_from_pieces(&pc);
        b.check_eq("(i) P_-1 closed formula", &pm1, &ps.p_minus1);
        b.check_eq("(i) P_0 closed formula", &p0, &ps.p0);
        b.check_eq("P_1 closed formula", &p1, &ps.p1);
        let pt = exact_divide(&(&(&pc.v[0] - &(&p * &pc.q[0])) - &(&y() * &ps.p1)), &y());
        match pt {
            Ok(Some(pt)) => b.check_eq("P~ = (V_0 - p Q_0 - y P_1)/y", &pt, &ps.p_tilde),
            Ok(None) => b.error("P~ closed formula", &Error::ExactDivisionByYFailed),
            Err(e) => b.error("P~ closed formula", &e),
        }
        let ok = point_oracle(
            &mut rng,
            opts.oracle_points,
            |pt| {
                let mut acc = Coeff::zero();
                for f in [&pm1, &p0] {
                    let v = f.eval(pt)?;
                    acc += &(&v * &v);
                }
                Ok(acc)
            },
            |_| Ok(Coeff::zero()),
        );
        match ok {
            Ok(pass) => b.check("(i) P_-1, P_0 vanish at random points", pass),
            Err(e) => b.error("(i) oracle", &e),
        }
    }

    // (ii)
    let p1_text = b.render(&ps.p1);
    b.check_with("(ii) P_1 in C[y, p]", in_c_y_p(&ps.p1), format!("P_1 = {}", p1_text));

    // (iii)
    let integral = phi.image_y().is_integral()
        && lo.z_residue.is_zero()
        && lo.u_residue.is_zero()
        && ty.is_integral();
    b.check_with(
        "(iii) integral in x",
        integral,
        format!(
            "y: {}, z: {}, u: {}, t: {}",
            phi.image_y().is_integral(),
            lo.z_residue.is_zero(),
            lo.u_residue.is_zero(),
            ty.is_integral()
        ),
    );
    b.check("phi fixes x, so phi(x p) = x phi(p)", phi.abstract_map.fixes(&[Var::X]));

    // (iv)
    if integral {
        let pt = &ps.p_tilde;
        let two = Coeff::from_int(2);
        let bar = PolyMap::from_images([
            (Var::Y, phi.image_y().x_coefficient(0)),
            (Var::Z, lo.z_bar.clone()),
            (Var::U, lo.u_bar.clone()),
            (Var::T, ty.x_coefficient(0)),
        ]);
        let nagata_form = |tt: MultiPoly| {
            PolyMap::from_images([
                (Var::Y, y()),
                (Var::Z, &z() + &(&y() * pt)),
                (Var::U, &(&u() - &(&z() * pt).scale(&two)) - &(&y() * &pt.pow(2))),
                (Var::T, tt),
            ])
        };
        b.check_map_eq(
            "(iv) phi mod x = (y, z + y P~, u - 2 z P~ - y P~^2, t - P_1)",
            &bar,
            &nagata_form(&t() - &ps.p1),
            &YZUT,
        );
        b.check("(iv) P~ in C[y, p]", in_c_y_p(pt));
        // Composing symbolically would expand powers of P~, so the
        // factorisation through exp(P~ D) is checked at random points.
        let d = nagata_derivation();
        match (d.times(pt).exp(opts.max_iter), d.times(&-pt).exp(opts.max_iter)) {
            (Ok(n), Ok(n_inv)) => {
                b.check_map_eq(
                    "(iv) exp(P~ D) = (y, z + y P~, u - 2 z P~ - y P~^2, t)",
                    &n,
                    &nagata_form(t()),
                    &YZUT,
                );
                let target = PolyMap::from_images([(Var::T, &t() - &ps.p1)]);
                match chain_oracle_modp(&mut rng, opts.oracle_points.min(20), &[&bar, &n_inv], &target, &YZUT) {
                    Ok(pass) => b.check(
                        "(iv) exp(-P~ D) after phi mod x = (y, z, u, t - P_1) at random points",
                        pass,
                    ),
                    Err(e) => b.error("(iv) Nagata oracle", &e),
                }
            }
            (Err(e), _) | (_, Err(e)) => b.error("(iv) Nagata factor", &e),
        }
    } else {
        b.check("(iv) phi mod x (needs integrality)", false);
    }

    // (v) By the chain rule the abstract Jacobian is the product of the
    // factor Jacobians. The expansion (y, z, u, t) -> (y, v, w, t) has
    // constant Jacobian x^3, which φ fixes, so J φ is the expansion of the
    // abstract Jacobian.
    let factor_j: Vec<MultiPoly> =
        phi.factors.chain().iter().map(|f| f.jacobian_det(&SLOTS)).collect();
    b.check(
        "(v) every factor has J = 1 on (Y, V, W, T)",
        factor_j.iter().all(|j| *j == MultiPoly::one()),
    );
    let expansion = PolyMap::from_images([(Var::Z, std_v.clone()), (Var::U, std_w.clone())]);
    b.check_eq("(v) expansion Jacobian = x^3", &expansion.jacobian_det(&YZUT), &x().pow(3));
    let mut jac_ok = true;
    let mut agree = true;
    for _ in 0..opts.oracle_points.min(20) {
        let pt = modp::random_point(&mut rng);
        let Some(jets) = eval_phi_jet(&phi, &pt) else {
            jac_ok = false;
            break;
        };
        let m: Vec<Vec<u64>> = jets.iter().map(|j| j.d.to_vec()).collect();
        jac_ok &= modp::det(m) == 1;
        let e = &phi.expanded;
        for (i, slot) in [abstract_slot::Y, abstract_slot::T].into_iter().enumerate() {
            agree &= modp::eval(&e.image(slot), &pt) == Some(jets[3 * i].v);
        }
    }
    b.check("(v) J phi = 1 on (y, z, u, t) at random points", jac_ok);
    b.check("expanded images of y, t agree with the factor chain at random points", agree);

    // (vi)
    let names = ["T - p/x", "E_W", "E_V", "Y + xQ", "T + p/x"];
    let mut list = Vec::new();
    let mut all_elem = true;
    for (name, f) in names.iter().zip(phi.factors.chain()) {
        match f.elementary_var(&SLOTS) {
            Some(v) => list.push(format!("{} moves {}", name, slot_name(v))),
            None if f.is_identity() => list.push(format!("{} is the identity", name)),
            None => {
                all_elem = false;
                list.push(format!("{} is not elementary", name));
            }
        }
    }
    b.check_with("(vi) elementary factorisation", all_elem, list.join("; "));
    match PolyMap::compose_chain(&phi.factors.chain()) {
        Ok(c) => b.check_map_eq("(vi) factors compose to phi", &c, &phi.abstract_map, &SLOTS),
        Err(e) => b.error("(vi) composition", &e),
    }
    b.check_eq(
        "y-image = y + x Q(v, w)",
        &phi.image_y(),
        &(&y() + &Frame::standard().expand(&q.to_abstract().shift_x(1))),
    );
    b.finish()
}

fn slot_name(v: Var) -> &'static str {
    match v {
        Var::Y => "Y",
        Var::Z => "V",
        Var::U => "W",
        Var::T => "T",
        other => other.name(),
    }
}

/// The regression corpus: `v`, `−w`, `v(−w)`, `v³`, `x²v²` and a mixed
/// three-term `Q`.
pub fn corpus() -> Vec<QSpec> {
    let one = Coeff::one;
    [
        vec![((1, 0, 0), one())],
        vec![((0, 1, 0), one())],
        vec![((1, 1, 0), one())],
        vec![((3, 0, 0), one())],
        vec![((2, 0, 2), one())],
        vec![
            ((1, 0, 0), one()),
            ((0, 1, 1), Coeff::new(-2, 3)),
            ((1, 1, 2), Coeff::new(3, 2)),
        ],
    ]
    .into_iter()
    .map(|t| QSpec::new(t).expect("corpus keys have m >= 1"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::venereau::f;

    fn opts() -> VerifyOptions {
        VerifyOptions {
            oracle_points: 10,
            ..VerifyOptions::default()
        }
    }

    fn qv() -> QSpec {
        QSpec::new([((1, 0, 0), Coeff::one())]).unwrap()
    }

    #[test]
    fn shapes() {
        assert_eq!(shape(1, 0), Shape { m: 1, delta: 0, epsilon: 0 });
        assert_eq!(shape(0, 1), Shape { m: 1, delta: 0, epsilon: 1 });
        assert_eq!(shape(3, 0), Shape { m: 2, delta: 1, epsilon: 0 });
        assert_eq!(shape(0, 0).m, 0);
        for a in 0..6 {
            for b in 0..6 {
                let s = shape(a, b);
                assert_eq!(2 * s.delta as i64 - s.epsilon as i64, a as i64 - 1);
                assert!(s.epsilon <= 1);
            }
        }
    }

    #[test]
    fn table_for_v() {
        let t = solve_moments(build_coeff_table(&qv()).unwrap()).unwrap();
        let f = &t.first[&(1, 0, 0)];
        assert_eq!(f.rho, Coeff::new(1, 2));
        assert!(f.mu.is_zero() && f.sigma.is_zero() && f.tau.is_zero());
        assert!(t.zeta(&(1, 0, 0), 1).is_zero());
        assert_eq!(t.zeta(&(1, 0, 0), 0), Coeff::new(-1, 2));
    }

    #[test]
    fn constant_term_rejected() {
        assert_eq!(
            QSpec::new([((0, 0, 1), Coeff::one())]),
            Err(Error::ConstantTermUnsupported { r: 1 })
        );
    }

    #[test]
    fn m2_moments() {
        let q = QSpec::new([((3, 0, 0), Coeff::new(5, 7)), ((2, 1, 1), Coeff::new(-1, 3))]).unwrap();
        let t = solve_moments(build_coeff_table(&q).unwrap()).unwrap();
        assert!(t.moment_residuals().iter().all(|(_, r)| r.is_zero()));
        assert!(t.quick_check_residuals().iter().all(|(_, r)| r.is_zero()));
    }

    #[test]
    fn from_abstract_round_trip() {
        let q = QSpec::new([((1, 1, 2), Coeff::new(3, 2)), ((0, 1, 0), Coeff::one())]).unwrap();
        assert_eq!(QSpec::from_abstract(&q.to_abstract()).unwrap(), q);
        assert_eq!(q.to_string(), "{(0,1,0):1, (1,1,2):3/2}");
    }

    #[test]
    fn empty_q_gives_identity() {
        let phi = build_phi(&QSpec::default()).unwrap();
        assert!(phi.fixes(&YZUT));
    }

    #[test]
    fn v_gives_f1() {
        let s = build_stable(&qv()).unwrap();
        assert_eq!(s.image_y(), f(1));
        assert_eq!(s.map().jacobian_det(&YZUT), MultiPoly::one());
        assert_eq!(s.abstract_map.jacobian_det(&SLOTS), MultiPoly::one());
        let ps = p_series_direct(&s).unwrap();
        assert!(ps.p_minus1.is_zero() && ps.p0.is_zero());
    }

    #[test]
    fn minus_w_has_p0_zero() {
        let ps = extract_p_series(&QSpec::new([((0, 1, 0), Coeff::one())]).unwrap()).unwrap();
        assert!(ps.p0.is_zero());
    }

    #[test]
    fn certificates() {
        for q in [qv(), QSpec::new([((1, 1, 2), Coeff::new(3, 2))]).unwrap()] {
            let c = verify_stable(&q, &opts());
            assert!(c.is_verified(), "{:#?}", c);
        }
    }
}
