//! The named constructions (`f_n`, `g_m`, `ψ`, `θ_n`, `φ_n`, `α_n`, …) and
//! the certifiers that reproduce their identities.

use crate::certificate::{
    chain_oracle, eval_chain, point_oracle, random_point, CertBuilder, Certificate, VerifyOptions,
};
use crate::coeff::Coeff;
use crate::derivation::Derivation;
use crate::divide::exact_divide;
use crate::error::{Error, Result};
use crate::frame::{std_polys, Frame};
use crate::map::{verify_inverse_pair, PolyMap};
use crate::monomial::{abstract_slot, Monomial, Var};
use crate::poly::{vars::*, Images, MultiPoly};

const YZU: [Var; 3] = [Var::Y, Var::Z, Var::U];

fn q(n: i64, d: i64) -> Coeff {
    Coeff::new(n, d)
}

fn xp(e: i64) -> MultiPoly {
    MultiPoly::x_pow(e as i32)
}

pub fn abs_y() -> MultiPoly {
    MultiPoly::var(abstract_slot::Y)
}

pub fn abs_v() -> MultiPoly {
    MultiPoly::var(abstract_slot::V)
}

pub fn abs_w() -> MultiPoly {
    MultiPoly::var(abstract_slot::W)
}

/// `f_n = y + x^n v`.
pub fn f(n: u32) -> MultiPoly {
    let (_, v, _) = std_polys();
    &y() + &(&xp(n as i64) * &v)
}

/// `g_m = y + x^m w`.
pub fn g(m: u32) -> MultiPoly {
    let (_, _, w) = std_polys();
    &y() + &(&xp(m as i64) * &w)
}

/// `D = y ∂/∂z − 2z ∂/∂u`.
pub fn nagata_derivation() -> Derivation {
    Derivation::from_images([(Var::Z, y()), (Var::U, z().scale(&q(-2, 1)))])
}

/// `D0 = x y ∂/∂z − 2z ∂/∂u`.
pub fn nagata_derivation_zero() -> Derivation {
    Derivation::from_images([(Var::Z, &x() * &y()), (Var::U, z().scale(&q(-2, 1)))])
}

/// `(p/x) D`, whose exponential is `ψ`.
pub fn psi_derivation() -> Derivation {
    let (p, _, _) = std_polys();
    nagata_derivation().times(&p.shift_x(-1))
}

/// `ψ = exp((p/x) D) = (y, v/x, w/x^2)`.
pub fn psi() -> PolyMap {
    let (_, v, w) = std_polys();
    PolyMap::from_images([(Var::Z, v.shift_x(-1)), (Var::U, w.shift_x(-2))])
}

/// `ψ⁻¹ = exp(−(p/x) D)`.
pub fn psi_inv(max_iter: usize) -> Result<PolyMap> {
    psi_derivation().negate().exp(max_iter)
}

/// `d = J(v, w, ·)`.
pub fn d_vw() -> Derivation {
    let (_, v, w) = std_polys();
    Derivation::jacobian(&v, &w)
}

/// `e = J(p + ½ x^{n-2} v w, w, ·)`.
pub fn e_derivation(n: u32) -> Derivation {
    let (p, v, w) = std_polys();
    let first = &p + &(&(&v * &w) * &xp(n as i64 - 2)).scale(&q(1, 2));
    Derivation::jacobian(&first, &w)
}

/// `D' = x^{n+1} z ∂/∂y`.
pub fn d_prime(n: u32) -> Derivation {
    Derivation::from_images([(Var::Y, &xp(n as i64 + 1) * &z())])
}

/// `E' = x^{n+1}((z + ¼ x^{n+1} u) ∂/∂y − ½ u ∂/∂z)`.
pub fn e_prime(n: u32) -> Derivation {
    let k = n as i64 + 1;
    let y_img = &xp(k) * &(&z() + &(&xp(k) * &u()).scale(&q(1, 4)));
    let z_img = (&xp(k) * &u()).scale(&q(-1, 2));
    Derivation::from_images([(Var::Y, y_img), (Var::Z, z_img)])
}

/// `θ_n` in closed form:
/// `(f_n, Z, u + 2 x^{n-3} v w Z + (x^{n-3} v w)^2 f_n − x^{n-2} p^2 v)` with
/// `Z = z − x^{n-3} v w f_n − x^{n-1} p v`.
pub fn theta(n: u32) -> PolyMap {
    let (p, v, w) = std_polys();
    let n = n as i64;
    let fnp = f(n as u32);
    let a = &(&v * &w) * &xp(n - 3);
    let zz = &(&z() - &(&a * &fnp)) - &(&(&p * &v) * &xp(n - 1));
    let uu = &(&(&u() + &(&a * &zz).scale(&q(2, 1))) + &(&a.pow(2) * &fnp))
        - &(&(&p.pow(2) * &v) * &xp(n - 2));
    PolyMap::from_images([(Var::Y, fnp), (Var::Z, zz), (Var::U, uu)])
}

/// `φ_n` in closed form:
/// `(f_n, Z, u − x^{n-2} p (w + p v) + ½ x^{2n-3} w^2 Z + 1/16 x^{4n-6} w^4 f_n)`
/// with `Z = z − x^{n-1}(½ w + v p) − ¼ x^{2n-3} w^2 f_n`.
pub fn phi(n: u32) -> PolyMap {
    let (p, v, w) = std_polys();
    let n = n as i64;
    let fnp = f(n as u32);
    let w2 = w.pow(2);
    let zz = &(&z() - &(&(&w.scale(&q(1, 2)) + &(&v * &p)) * &xp(n - 1)))
        - &(&(&w2 * &fnp) * &xp(2 * n - 3)).scale(&q(1, 4));
    let uu = &(&(&u() - &(&(&p * &(&w + &(&p * &v))) * &xp(n - 2)))
        + &(&(&w2 * &zz) * &xp(2 * n - 3)).scale(&q(1, 2)))
        + &(&(&w2.pow(2) * &fnp) * &xp(4 * n - 6)).scale(&q(1, 16));
    PolyMap::from_images([(Var::Y, fnp), (Var::Z, zz), (Var::U, uu)])
}

/// `α_n` in closed form:
/// `(y − ¼ x^{2n} w, z + ¼ x^{2n-1} w (p − ¼ x^{2n-2} w^2) + ¼ x^{2n-3} w^2 y,
///   u + ¼ x^{2n-2} w (p − ¼ x^{2n-2} w^2)^2 − ½ x^{2n-3} w^2 z − 1/16 x^{4n-6} w^4 y)`.
pub fn alpha(n: u32) -> PolyMap {
    let (p, _, w) = std_polys();
    let n = n as i64;
    let w2 = w.pow(2);
    let inner = &p - &(&w2 * &xp(2 * n - 2)).scale(&q(1, 4));
    let yy = &y() - &(&w * &xp(2 * n)).scale(&q(1, 4));
    let zz = &(&z() + &(&(&w * &inner) * &xp(2 * n - 1)).scale(&q(1, 4)))
        + &(&(&w2 * &y()) * &xp(2 * n - 3)).scale(&q(1, 4));
    let uu = &(&(&u() + &(&(&w * &inner.pow(2)) * &xp(2 * n - 2)).scale(&q(1, 4)))
        - &(&(&w2 * &z()) * &xp(2 * n - 3)).scale(&q(1, 2)))
        - &(&(&w2.pow(2) * &y()) * &xp(4 * n - 6)).scale(&q(1, 16));
    PolyMap::from_images([(Var::Y, yy), (Var::Z, zz), (Var::U, uu)])
}

/// `exp(s · (w/4) x^{2n-3} d)`; `s = -1` gives `α_n`, `s = 1` its inverse.
pub fn alpha_exp(n: u32, sign: i64, max_iter: usize) -> Result<PolyMap> {
    let (_, _, w) = std_polys();
    let h = (&w * &xp(2 * n as i64 - 3)).scale(&q(sign, 4));
    d_vw().times(&h).exp(max_iter)
}

/// `(Y + s/4 · x^{2n} W, V, W)`; its frame extension is `α_n` for `s = -1`
/// and `α_n⁻¹` for `s = 1`.
pub fn alpha_abstract(n: u32, sign: i64) -> PolyMap {
    let shift = (&abs_w() * &xp(2 * n as i64)).scale(&q(sign, 4));
    PolyMap::from_images([(abstract_slot::Y, &abs_y() + &shift)])
}

/// `α_n ∘ φ_n` in closed form:
/// `(f_n − ¼ x^{2n} w, z − x^{n-1}(½ w + v p) + ¼ x^{2n-1} w p,
///   u − x^{n-2} p (w + p v) + ¼ x^{2n-2} p^2 w)`.
pub fn alpha_phi(n: u32) -> PolyMap {
    let (p, v, w) = std_polys();
    let n = n as i64;
    let yy = &f(n as u32) - &(&w * &xp(2 * n)).scale(&q(1, 4));
    let zz = &(&z() - &(&(&w.scale(&q(1, 2)) + &(&v * &p)) * &xp(n - 1)))
        + &(&(&w * &p) * &xp(2 * n - 1)).scale(&q(1, 4));
    let uu = &(&u() - &(&(&p * &(&w + &(&p * &v))) * &xp(n - 2)))
        + &(&(&p.pow(2) * &w) * &xp(2 * n - 2)).scale(&q(1, 4));
    PolyMap::from_images([(Var::Y, yy), (Var::Z, zz), (Var::U, uu)])
}

/// `λ = (c x, y, c z, c^2 u)`.
pub fn lambda() -> PolyMap {
    PolyMap::from_images([
        (Var::X, &c() * &x()),
        (Var::Z, &c() * &z()),
        (Var::U, &c().pow(2) * &u()),
    ])
}

/// Reduces every `c^e` modulo `c^k = value`.
pub fn reduce_c_power(p: &MultiPoly, k: u32, value: &Coeff) -> MultiPoly {
    MultiPoly::from_terms(p.terms().map(|(m, co)| {
        let e = m.exp(Var::C) as u32;
        let mut m2 = *m;
        m2.set_exp(Var::C, (e % k) as i32);
        (m2, co * &value.pow((e / k) as i32).expect("nonzero"))
    }))
}

fn integrality_check(b: &mut CertBuilder, name: &str, m: &PolyMap, expected: bool) {
    let integral = m.is_integral_map(&YZU, true);
    let vals: Vec<String> = YZU
        .iter()
        .map(|&v| {
            let val = m.image(v).x_valuation();
            format!("{}: {}", v, val.map_or("inf".to_string(), |e| e.to_string()))
        })
        .collect();
    b.check_with(
        name,
        integral == expected,
        format!("integral={} (x-valuations {})", integral, vals.join(", ")),
    );
}

fn jacobian_one(b: &mut CertBuilder, name: &str, m: &PolyMap, vars: &[Var]) {
    b.check_eq(name, &m.jacobian_det(vars), &MultiPoly::one());
}

/// The base identities: `yw + v^2 = x^2 p`, `p0 = y w0 + v0^2`,
/// `exp((p/x) D) = (y, v/x, w/x^2)` and `exp((p0/x) D0) = (y, v0, w0/x)`.
pub fn verify_identities(opts: &VerifyOptions) -> Certificate {
    let mut b = CertBuilder::new("identities");
    let std = Frame::standard();
    let zero = Frame::zero();
    b.check_eq("yw+v^2 = x^2 p", &std.p_from_vw(), &std.p);
    b.check_eq("p0 = y w0 + v0^2", &zero.p_from_vw(), &zero.p);
    for fr in [&std, &zero] {
        let [rz, ru, rp] = fr.inversion_residuals();
        b.check_zero(&format!("{} frame inversion z", fr.name), &rz);
        b.check_zero(&format!("{} frame inversion u", fr.name), &ru);
        b.check_zero(&format!("{} frame inversion p", fr.name), &rp);
    }
    if let Some(e) = b.ok("exp((p/x)D)", psi_derivation().exp(opts.max_iter)) {
        b.check_map_eq("exp((p/x)D) = (y, v/x, w/x^2)", &e, &psi(), &YZU);
        if let Some(inv) = b.ok("psi inverse", psi_inv(opts.max_iter)) {
            b.check("psi inverse pair", verify_inverse_pair(&e, &inv, &YZU));
        }
        jacobian_one(&mut b, "J psi = 1", &e, &YZU);
        b.check_eq("psi(p) = p", &psi().apply(&std.p).unwrap_or_default(), &std.p);
    }
    let d0 = nagata_derivation_zero().times(&zero.p.shift_x(-1));
    if let Some(e) = b.ok("exp((p0/x)D0)", d0.exp(opts.max_iter)) {
        let target = PolyMap::from_images([(Var::Z, zero.v.clone()), (Var::U, zero.w.shift_x(-1))]);
        b.check_map_eq("exp((p0/x)D0) = (y, v0, w0/x)", &e, &target, &YZU);
        jacobian_one(&mut b, "J psi0 = 1", &e, &YZU);
    }
    b.finish()
}

/// `θ_n = ψ⁻¹ ∘ (y + x^{n+1} z, z, u) ∘ ψ`: closed form, Jacobian, integrality
/// exactly when `n >= 3`, and `θ_n = exp(x^{n-3} v d)`.
pub fn verify_theta(n: u32, opts: &VerifyOptions) -> Certificate {
    let mut b = CertBuilder::new(format!("theta-{}", n));
    let mut rng = opts.rng_for(&format!("theta-{}", n));
    let closed = theta(n);
    let (_, v, _) = std_polys();
    let Some(pinv) = b.ok("psi inverse", psi_inv(opts.max_iter)) else {
        return b.finish();
    };
    let mid = PolyMap::from_images([(Var::Y, &y() + &(&xp(n as i64 + 1) * &z()))]);
    let ps = psi();
    if let Some(comp) = b.ok("composition", PolyMap::compose_chain(&[&pinv, &mid, &ps])) {
        b.check_map_eq("closed form = psi^-1 o (y+x^(n+1)z, z, u) o psi", &closed, &comp, &YZU);
    }
    if let Some(ok) = b.ok(
        "random-point oracle",
        chain_oracle(&mut rng, opts.oracle_points, &[&pinv, &mid, &ps], &closed, &YZU),
    ) {
        b.check("random-point oracle", ok);
    }
    let framed = Frame::standard().extend(&(&abs_y() + &(&xp(n as i64) * &abs_v())), &abs_v(), &abs_w(), None);
    b.check_map_eq("closed form = frame extension of (Y + x^n V, V, W)", &closed, &framed, &YZU);
    jacobian_one(&mut b, "J theta = 1", &closed, &YZU);
    integrality_check(&mut b, "integral iff n >= 3", &closed, n >= 3);
    let dd = d_vw().times(&(&v * &xp(n as i64 - 3)));
    if let Some(e) = b.ok("exp(x^(n-3) v d)", dd.exp(opts.max_iter)) {
        b.check_map_eq("theta = exp(x^(n-3) v d)", &closed, &e, &YZU);
    }
    if let Some(conj) = b.ok("conjugation", d_prime(n).conjugate(&ps, &pinv)) {
        b.check("psi D' psi^-1 = x^(n-3) v d", conj == dd);
    }
    b.finish()
}

/// `φ_n = ψ⁻¹ ∘ (y + x^{n+1} z, z − ½ x^{n+1} u, u) ∘ ψ`.
pub fn verify_phi(n: u32, opts: &VerifyOptions) -> Certificate {
    let mut b = CertBuilder::new(format!("phi-{}", n));
    let mut rng = opts.rng_for(&format!("phi-{}", n));
    let closed = phi(n);
    let (p, _, w) = std_polys();
    let Some(pinv) = b.ok("psi inverse", psi_inv(opts.max_iter)) else {
        return b.finish();
    };
    let k = n as i64 + 1;
    let mid = PolyMap::from_images([
        (Var::Y, &y() + &(&xp(k) * &z())),
        (Var::Z, &z() - &(&xp(k) * &u()).scale(&q(1, 2))),
    ]);
    let ps = psi();
    if let Some(comp) = b.ok("composition", PolyMap::compose_chain(&[&pinv, &mid, &ps])) {
        b.check_map_eq("closed form = psi^-1 o (y+x^(n+1)z, z-x^(n+1)u/2, u) o psi", &closed, &comp, &YZU);
    }
    if let Some(ok) = b.ok(
        "random-point oracle",
        chain_oracle(&mut rng, opts.oracle_points, &[&pinv, &mid, &ps], &closed, &YZU),
    ) {
        b.check("random-point oracle", ok);
    }
    if let Some(php) = b.ok("phi(p)", closed.apply(&p)) {
        let target = &p + &(&w.pow(2) * &xp(2 * n as i64 - 2)).scale(&q(1, 4));
        b.check_eq("phi(p) = p + x^(2n-2) w^2 / 4", &php, &target);
    }
    let framed = Frame::standard().extend(
        &(&abs_y() + &(&xp(n as i64) * &abs_v())),
        &(&abs_v() - &(&xp(n as i64) * &abs_w()).scale(&q(1, 2))),
        &abs_w(),
        None,
    );
    b.check_map_eq("closed form = frame extension of (Y + x^n V, V - x^n W/2, W)", &closed, &framed, &YZU);
    jacobian_one(&mut b, "J phi = 1", &closed, &YZU);
    integrality_check(&mut b, "integral iff n >= 2", &closed, n >= 2);
    let ee = e_derivation(n).times(&xp(n as i64 - 1).scale(&q(1, 2)));
    if let Some(e) = b.ok("exp(x^(n-1) e / 2)", ee.exp(opts.max_iter)) {
        b.check_map_eq("phi = exp(x^(n-1) e / 2)", &closed, &e, &YZU);
    }
    if let Some(conj) = b.ok("conjugation", e_prime(n).conjugate(&ps, &pinv)) {
        b.check("psi E' psi^-1 = x^(n-1) e / 2", conj == ee);
    }
    b.finish()
}

/// `α_n ∘ φ_n` closed form, integrality for every `n >= 1`, fixes `w`, and
/// has y-image `f_n − ¼ x^{2n} w`.
pub fn verify_alpha_phi(n: u32, opts: &VerifyOptions) -> Certificate {
    let mut b = CertBuilder::new(format!("alpha-phi-{}", n));
    let mut rng = opts.rng_for(&format!("alpha-phi-{}", n));
    let (p, v, w) = std_polys();
    let al = alpha(n);
    if let Some(e) = b.ok("exp(-(w/4) x^(2n-3) d)", alpha_exp(n, -1, opts.max_iter)) {
        b.check_map_eq("alpha closed form = exp(-(w/4) x^(2n-3) d)", &al, &e, &YZU);
    }
    let std = Frame::standard();
    let al_abs = alpha_abstract(n, -1);
    b.check_map_eq("alpha = frame extension of (Y - x^(2n) W/4, V, W)", &al, &std.extend_map(&al_abs), &YZU);
    b.check_eq("alpha fixes w", &al.apply(&w).unwrap_or_default(), &w);
    let ph = phi(n);
    let closed = alpha_phi(n);
    if let Some(comp) = b.ok("composition", std.compose_extended(&al_abs, &ph)) {
        b.check_map_eq("alpha o phi = closed form", &comp, &closed, &YZU);
    }
    if let Some(ok) = b.ok(
        "random-point oracle",
        chain_oracle(&mut rng, opts.oracle_points, &[&al, &ph], &closed, &YZU),
    ) {
        b.check("random-point oracle", ok);
    }
    b.check_zero("w + p v = 0 mod x", &(&w + &(&p * &v)).reduce_mod_x(1).unwrap_or_default());
    integrality_check(&mut b, "integral for all n >= 1", &closed, true);
    b.check_eq("alpha o phi fixes w", &closed.apply(&w).unwrap_or_default(), &w);
    b.check_eq(
        "y-image = f_n - x^(2n) w / 4",
        &closed.image(Var::Y),
        &(&f(n) - &(&w * &xp(2 * n as i64)).scale(&q(1, 4))),
    );
    jacobian_one(&mut b, "J (alpha o phi) = 1", &closed, &YZU);
    b.finish()
}

/// Commuting square `λ ∘ ν = μ ∘ λ` with symbolic `c`, where `μ = α_n⁻¹` has
/// y-image `y + ¼ x^{2n} w` and `ν` has y-image `y + c^{2n+4}/4 x^{2n} w`.
pub fn verify_fg_equivalence(n: u32, opts: &VerifyOptions) -> Certificate {
    let mut b = CertBuilder::new(format!("fg-{}", n));
    let mut rng = opts.rng_for(&format!("fg-{}", n));
    let (_, _, w) = std_polys();
    let two_n = 2 * n as i64;
    let Some(mu) = b.ok("mu = exp((w/4) x^(2n-3) d)", alpha_exp(n, 1, opts.max_iter)) else {
        return b.finish();
    };
    let std = Frame::standard();
    b.check("mu inverts alpha", std.verify_inverse_pair(&alpha_abstract(n, -1), &alpha_abstract(n, 1)));
    b.check_eq(
        "mu(y) = y + x^(2n) w / 4",
        &mu.image(Var::Y),
        &(&y() + &(&w * &xp(two_n)).scale(&q(1, 4))),
    );
    b.check_map_eq("mu = frame extension of (Y + x^(2n) W/4, V, W)", &mu, &std.extend_map(&alpha_abstract(n, 1)), &YZU);
    b.check_map_eq("alpha = frame extension of (Y - x^(2n) W/4, V, W)", &alpha(n), &std.extend_map(&alpha_abstract(n, -1)), &YZU);
    let cpow = 2 * n + 4;
    let nu_shift = (&(&abs_w() * &xp(two_n)) * &c().pow(cpow)).scale(&q(1, 4));
    let nu = std.extend(&(&abs_y() + &nu_shift), &abs_v(), &abs_w(), None);
    let lam = lambda();
    let xyzu = [Var::X, Var::Y, Var::Z, Var::U];
    match (lam.compose(&nu), mu.compose(&lam)) {
        (Ok(l_nu), Ok(mu_l)) => b.check_map_eq("lambda o nu = mu o lambda", &l_nu, &mu_l, &xyzu),
        (Err(e), _) | (_, Err(e)) => b.error("lambda o nu = mu o lambda", &e),
    }
    if let Some(ok) = b.ok(
        "random-point oracle",
        (|| {
            let l_nu = lam.compose(&nu)?;
            chain_oracle(&mut rng, opts.oracle_points, &[&mu, &lam], &l_nu, &xyzu)
        })(),
    ) {
        b.check("random-point oracle", ok);
    }
    let shift = &nu.image(Var::Y) - &y();
    match exact_divide(&shift, &(&w * &xp(two_n))) {
        Ok(Some(coef)) => {
            let expected = c().pow(cpow).scale(&q(1, 4));
            b.check_with(
                "nu y-coefficient = c^(2n+4)/4",
                coef == expected,
                format!("{} (c-degree {})", coef, coef.degree(Var::C)),
            );
        }
        Ok(None) => b.check("nu y-coefficient = c^(2n+4)/4", false),
        Err(e) => b.error("nu y-coefficient = c^(2n+4)/4", &e),
    }
    let specialized = reduce_c_power(&nu.image(Var::Y), cpow, &Coeff::from_int(4));
    b.check_eq("c^(2n+4) = 4 turns nu(y) into g_2n", &specialized, &g(2 * n));
    b.finish()
}

/// How the `V`-correction of the coordinate construction treats odd powers
/// of `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionSign {
    /// `Σ α_{a,b} (−Y)^a W^{a+b+1}`: cancels `V^{2a} W^b` modulo `YW + V^2`.
    Alternating,
    /// `Σ α_{a,b} Y^a W^{a+b+1}`: agrees with the alternating form for even `a` only.
    Plain,
}

/// Splits `Q2 ∈ Q[V^2, W]` into `(a, b, α)` with `Q2 = Σ α V^{2a} W^b`.
pub fn split_q2(q2: &MultiPoly) -> Result<Vec<(u32, u32, Coeff)>> {
    let mut out = Vec::new();
    for (m, co) in q2.terms() {
        let vexp = m.exp(abstract_slot::V);
        let others = [Var::X, Var::C, abstract_slot::Y, abstract_slot::T];
        if others.iter().any(|&v| m.exp(v) != 0) {
            return Err(Error::MalformedQ2(format!("term {} uses variables other than V, W", m)));
        }
        if vexp % 2 != 0 {
            return Err(Error::MalformedQ2(format!("term {} has an odd power of V", m)));
        }
        out.push(((vexp / 2) as u32, m.exp(abstract_slot::W) as u32, co.clone()));
    }
    Ok(out)
}

fn require_vw_over_r(q: &MultiPoly, what: &str) -> Result<()> {
    if !q.is_integral() {
        return Err(Error::Malformed(format!("{} has negative powers of x", what)));
    }
    if !(q.is_free_of(abstract_slot::Y) && q.is_free_of(abstract_slot::T) && q.is_free_of(Var::C)) {
        return Err(Error::Malformed(format!("{} must be a polynomial in x, V, W", what)));
    }
    Ok(())
}

/// The abstract `(Y, V, W)` map
/// `(Y, V − ½ x^2 Σ α_{a,b} (∓Y)^a W^{a+b+1}, W) ∘ (Y + x Q, V, W)` with
/// `Q = x^2 Q1 + x V Q2`, and its inverse.
pub fn coordinate_abstract(
    q1: &MultiPoly,
    q2: &MultiPoly,
    sign: CorrectionSign,
) -> Result<(PolyMap, PolyMap, MultiPoly)> {
    require_vw_over_r(q1, "Q1")?;
    let parts = split_q2(q2)?;
    let qq = &(&xp(2) * q1) + &(&(&x() * &abs_v()) * q2);
    let ybase = match sign {
        CorrectionSign::Alternating => -abs_y(),
        CorrectionSign::Plain => abs_y(),
    };
    let mut corr = MultiPoly::zero();
    for (a, bb, al) in &parts {
        corr = &corr + &(&ybase.pow(*a) * &abs_w().pow(a + bb + 1)).scale(al);
    }
    let corr = (&corr * &xp(2)).scale(&q(1, 2));
    let first = PolyMap::from_images([(abstract_slot::V, &abs_v() - &corr)]);
    let first_inv = PolyMap::from_images([(abstract_slot::V, &abs_v() + &corr)]);
    let xq = &x() * &qq;
    let second = PolyMap::from_images([(abstract_slot::Y, &abs_y() + &xq)]);
    let second_inv = PolyMap::from_images([(abstract_slot::Y, &abs_y() - &xq)]);
    let fwd = first.compose(&second)?;
    let inv = second_inv.compose(&first_inv)?;
    Ok((fwd, inv, qq))
}

/// Builds the coordinate automorphism for `y + xQ`, `Q = x^2 Q1 + x v Q2`,
/// and certifies integrality, `J = 1`, invertibility over `R`, and the
/// mod-x congruences with `P1 = w Q1`.
pub fn coordinate_from_q(
    q1: &MultiPoly,
    q2: &MultiPoly,
    opts: &VerifyOptions,
) -> Result<(PolyMap, Certificate)> {
    coordinate_from_q_with(q1, q2, CorrectionSign::Alternating, opts)
}

pub fn coordinate_from_q_with(
    q1: &MultiPoly,
    q2: &MultiPoly,
    sign: CorrectionSign,
    opts: &VerifyOptions,
) -> Result<(PolyMap, Certificate)> {
    let id = format!("coordinate[Q1={};Q2={}]", q1.render_abstract(), q2.render_abstract());
    let (fwd, inv, qq) = coordinate_abstract(q1, q2, sign)?;
    let std = Frame::standard();
    let phi_map = std.extend_map(&fwd);
    let phi_inv = std.extend_map(&inv);
    let (p, _, w) = std_polys();
    let mut b = CertBuilder::new(id.clone());
    let mut rng = opts.rng_for(&id);

    let f_poly = &y() + &(&x() * &std.expand(&qq));
    b.check_eq("phi(y) = y + xQ", &phi_map.image(Var::Y), &f_poly);
    integrality_check(&mut b, "integral", &phi_map, true);
    jacobian_one(&mut b, "J phi = 1", &phi_map, &YZU);
    b.check("inverse pair over R", std.verify_inverse_pair(&fwd, &inv) && phi_inv.is_integral_map(&YZU, false));

    let p1 = &w * &std.expand(q1);
    if let Some(php) = b.ok("phi(p)", phi_map.apply(&p)) {
        let r = &(&php - &p) - &(&x() * &p1);
        let p1_text = b.render(&p1);
        b.check_with(
            "phi(p) = p + x P1 mod x^2",
            r.x_valuation().map_or(true, |v| v >= 2),
            format!("P1 = {}", p1_text),
        );
    }
    let rz = &(&phi_map.image(Var::Z) - &z()) + &(&y() * &p1);
    b.check("phi(z) = z - y P1 mod x", rz.x_valuation().map_or(true, |v| v >= 1));
    let ru = &(&(&phi_map.image(Var::U) - &u()) - &(&z() * &p1).scale(&q(2, 1))) + &(&y() * &p1.pow(2));
    b.check("phi(u) = u + 2z P1 - y P1^2 mod x", ru.x_valuation().map_or(true, |v| v >= 1));

    // Pointwise: the frame inversion formulas evaluated on the abstract images.
    let oracle = point_oracle(
        &mut rng,
        opts.oracle_points,
        |pt| phi_map.image(Var::Z).eval(pt),
        |pt| {
            let xv = pt[&Var::X].clone();
            let abs_pt = abstract_point(&std, pt)?;
            let img = fwd.eval_at(&abs_pt)?;
            let (yy, vv, ww) = (&img[&abstract_slot::Y], &img[&abstract_slot::V], &img[&abstract_slot::W]);
            let x2 = &xv * &xv;
            let pp = &(&(yy * ww) + &(vv * vv)) / &x2;
            Ok(&(vv - &(yy * &pp)) / &xv)
        },
    );
    if let Some(ok) = b.ok("random-point oracle", oracle) {
        b.check("random-point oracle", ok);
    }
    Ok((phi_map, b.finish()))
}

/// Maps a concrete point `(x, y, z, u, t, c)` to the abstract point
/// `(x, Y = y, V = v, W = w, T = t, c)` of a frame.
pub fn abstract_point(fr: &Frame, pt: &crate::poly::Point) -> Result<crate::poly::Point> {
    let mut out = pt.clone();
    out.insert(abstract_slot::V, fr.v.eval(pt)?);
    out.insert(abstract_slot::W, fr.w.eval(pt)?);
    Ok(out)
}

/// Zero-frame check that `y + x Q0` is a coordinate for `Q0 ∈ R[v0, w0]`.
pub fn hyperplane_check(q0: &MultiPoly, opts: &VerifyOptions) -> Certificate {
    let id = format!("hyperplane[Q0={}]", q0.render_abstract());
    let mut b = CertBuilder::new(id);
    if let Err(e) = require_vw_over_r(q0, "Q0") {
        b.error("input", &e);
        return b.finish();
    }
    let fr = Frame::zero();
    b.check_eq("p0 = y w0 + v0^2", &fr.p_from_vw(), &fr.p);
    let d0 = nagata_derivation_zero().times(&fr.p.shift_x(-1));
    if let Some(e) = b.ok("exp((p0/x)D0)", d0.exp(opts.max_iter)) {
        let target = PolyMap::from_images([(Var::Z, fr.v.clone()), (Var::U, fr.w.shift_x(-1))]);
        b.check_map_eq("psi0 = (y, v0, w0/x)", &e, &target, &YZU);
        jacobian_one(&mut b, "J psi0 = 1", &e, &YZU);
    }
    let xq = &x() * q0;
    let fwd = PolyMap::from_images([(abstract_slot::Y, &abs_y() + &xq)]);
    let inv = PolyMap::from_images([(abstract_slot::Y, &abs_y() - &xq)]);
    let theta0 = fr.extend_map(&fwd);
    let theta0_inv = fr.extend_map(&inv);
    integrality_check(&mut b, "theta0 integral", &theta0, true);
    let q0e = fr.expand(q0);
    if let Some(tp) = b.ok("theta0(p0)", theta0.apply(&fr.p)) {
        b.check_eq("theta0(p0) = p0 + x w0 Q0", &tp, &(&fr.p + &(&(&x() * &fr.w) * &q0e)));
    }
    let rz = &theta0.image(Var::Z) - &z();
    let ru = &theta0.image(Var::U) - &u();
    b.check("theta0(z) = z mod x", rz.x_valuation().map_or(true, |v| v >= 1));
    // The stated congruence for u; the residue is Q0 (2 z w0 - p0^2) mod x.
    match ru.reduce_mod_x(1) {
        Ok(r) => {
            b.check_zero("theta0(u) = u mod x", &r);
            let corr = (&q0e * &(&(&z() * &fr.w).scale(&q(2, 1)) - &fr.p.pow(2))).reduce_mod_x(1);
            match corr {
                Ok(cr) => b.check_eq("theta0(u) = u + Q0 (2 z w0 - p0^2) mod x", &r, &cr),
                Err(e) => b.error("theta0(u) = u + Q0 (2 z w0 - p0^2) mod x", &e),
            }
        }
        Err(e) => b.error("theta0(u) = u mod x", &e),
    }
    jacobian_one(&mut b, "J theta0 = 1", &theta0, &YZU);
    b.check("inverse pair over R", fr.verify_inverse_pair(&fwd, &inv) && theta0_inv.is_integral_map(&YZU, false));
    b.finish()
}

/// `Q(xV, xW)` minus its `(V, W)`-constant part, divided by `x`, together
/// with that constant part.
pub fn zero_frame_transfer(q: &MultiPoly) -> Result<(MultiPoly, MultiPoly)> {
    let mut im = Images::new();
    im.insert(abstract_slot::V, &x() * &abs_v());
    im.insert(abstract_slot::W, &x() * &abs_w());
    let scaled = q.substitute(&im)?;
    let constant = q.filter_terms(|m, _| m.exp(abstract_slot::V) == 0 && m.exp(abstract_slot::W) == 0);
    let rest = &scaled - &constant;
    Ok((rest.shift_x(-1), constant))
}

/// Parts (1) and (2) of the hyperplane statement for `f − c` over
/// `R[c]/(x − x0)` and `R[c]/(c − c0)`, the latter with `c0` symbolic.
pub fn cusp_checks(qv: &MultiPoly, opts: &VerifyOptions) -> Certificate {
    let id = format!("cusp[Q={}]", qv.render_abstract());
    let mut rng = opts.rng_for(&id);
    let mut b = CertBuilder::new(id);
    if let Err(e) = require_vw_over_r(qv, "Q") {
        b.error("input", &e);
        return b.finish();
    }
    let std = Frame::standard();
    let fpoly = &y() + &(&x() * &std.expand(qv));

    // (1) x0 = 0: f - c reduces to y - c.
    match (&fpoly - &c()).reduce_mod_x(1) {
        Ok(r) => b.check_eq("(1) f - c = y - c mod x", &r, &(&y() - &c())),
        Err(e) => b.error("(1) f - c = y - c mod x", &e),
    }
    // (1) generic x0: S-coordinate witness, checked numerically on x = x0.
    let xq = &x() * qv;
    let fwd = PolyMap::from_images([(abstract_slot::Y, &abs_y() + &xq)]);
    let inv = PolyMap::from_images([(abstract_slot::Y, &abs_y() - &xq)]);
    let big = std.extend_map(&fwd);
    let big_inv = std.extend_map(&inv);
    b.check_eq("(1) S-automorphism has y-image f", &big.image(Var::Y), &fpoly);
    b.check("(1) S-automorphism inverse pair", std.verify_inverse_pair(&fwd, &inv));
    for x0 in [1i64, 2, -3] {
        let name = if x0 < 0 {
            format!("(1) coordinate mod (x + {})", -x0)
        } else {
            format!("(1) coordinate mod (x - {})", x0)
        };
        let mut ok = Ok(true);
        for _ in 0..opts.oracle_points.min(20) {
            let mut pt = random_point(&mut rng);
            pt.insert(Var::X, Coeff::from_int(x0));
            match eval_chain(&[&big, &big_inv], &pt) {
                Ok(img) if YZU.iter().all(|v| img.get(v) == pt.get(v)) => {}
                Ok(_) => {
                    ok = Ok(false);
                    break;
                }
                Err(e) => {
                    ok = Err(e);
                    break;
                }
            }
        }
        if let Some(pass) = b.ok(&name, ok) {
            b.check(&name, pass);
        }
    }

    // (2) conjugate the zero-frame automorphism by y -> y + c/x.
    let Some((q0, constant)) = b.ok("(2) transfer to zero frame", zero_frame_transfer(qv)) else {
        return b.finish();
    };
    let fr0 = Frame::zero();
    let xq0 = &x() * &q0;
    let fwd0 = PolyMap::from_images([(abstract_slot::Y, &abs_y() + &xq0)]);
    let inv0 = PolyMap::from_images([(abstract_slot::Y, &abs_y() - &xq0)]);
    let shift = &c() * &xp(-1);
    let tr = PolyMap::from_images([(Var::Y, &y() + &shift)]);
    let tr_inv = PolyMap::from_images([(Var::Y, &y() - &shift)]);
    b.check("(2) translation inverse pair", verify_inverse_pair(&tr, &tr_inv, &Var::ALL));
    b.check("(2) zero-frame inverse pair", fr0.verify_inverse_pair(&fwd0, &inv0));
    // T⁻¹ ∘ θ0 ∘ T, with θ0 ∘ T composed through the zero frame
    let conj = |abs: &PolyMap| fr0.compose_extended(abs, &tr).and_then(|m| tr_inv.compose(&m));
    match (conj(&fwd0), conj(&inv0)) {
        (Ok(h), Ok(hi)) => {
            integrality_check(&mut b, "(2) conjugate integral in x", &h, true);
            b.check("(2) inverse integral in x", hi.is_integral_map(&YZU, true));
            jacobian_one(&mut b, "(2) J = 1", &h, &YZU);
            if let Some(ok) = b.ok(
                "(2) conjugate inverse pair",
                chain_oracle(&mut rng, opts.oracle_points.min(20), &[&h, &hi], &PolyMap::identity(), &YZU),
            ) {
                b.check("(2) conjugate inverse pair", ok);
            }
            let mut im = Images::new();
            im.insert(Var::Y, &(&x() * &y()) + &c());
            match std.expand(qv).substitute(&im) {
                Ok(gq) => b.check_eq(
                    "(2) y-image = y + Q(v, w)|y->xy+c - Q(0, 0)",
                    &(&h.image(Var::Y) + &constant),
                    &(&y() + &gq),
                ),
                Err(e) => b.error("(2) y-image", &e),
            }
        }
        (Err(e), _) | (_, Err(e)) => b.error("(2) conjugation", &e),
    }
    b.finish()
}

/// The three membership tests for `h ∈ C[y, v, w]`: x-valuation ≥ 1 and ≥ 2
/// after expanding `v`, `w`, and divisibility by `YW + V^2`.
pub fn lemma_ideal_oracle(h: &MultiPoly) -> Result<((bool, bool, bool), Certificate)> {
    if !(h.is_free_of(Var::X) && h.is_free_of(Var::T) && h.is_free_of(Var::C)) {
        return Err(Error::Malformed("h must be a polynomial in Y, V, W over the constants".into()));
    }
    let e = Frame::standard().expand(h);
    let val = e.x_valuation();
    let b1 = val.map_or(true, |v| v >= 1);
    let b2 = val.map_or(true, |v| v >= 2);
    let rel = &(&abs_y() * &abs_w()) + &abs_v().pow(2);
    let b3 = exact_divide(h, &rel)?.is_some();
    let mut b = CertBuilder::new(format!("lemma-ideal[h={}]", h.render_abstract()));
    b.check_with(
        "membership tests agree",
        b1 == b2 && b2 == b3,
        format!("val>=1: {}, val>=2: {}, (YW+V^2) | h: {}", b1, b2, b3),
    );
    Ok(((b1, b2, b3), b.finish()))
}

/// `h ∈ C[y, p]`, decided by x-, t-, c-freeness and `D(h) = 0`.
pub fn in_c_y_p(h: &MultiPoly) -> bool {
    h.is_free_of(Var::X)
        && h.is_free_of(Var::T)
        && h.is_free_of(Var::C)
        && nagata_derivation().apply(h).is_zero()
}

/// `Y^a V^b W^c` as an abstract polynomial.
pub fn abstract_monomial(a: u32, b: u32, c: u32) -> MultiPoly {
    MultiPoly::term(Monomial::new(0, a, b, c, 0, 0), Coeff::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> VerifyOptions {
        VerifyOptions {
            oracle_points: 10,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn f_and_g_shapes() {
        let f1 = f(1);
        let expect = &(&(&y() + &(&x().pow(2) * &z())) + &(&(&x() * &y().pow(2)) * &u()))
            + &(&(&x() * &y()) * &z().pow(2));
        assert_eq!(f1, expect);
        assert_eq!(g(1).reduce_mod_x(1).unwrap(), y());
        assert_eq!((&f(2) - &y()).x_valuation(), Some(2));
    }

    #[test]
    fn psi_fixes_p_and_moves_z() {
        let (p, v, _) = std_polys();
        assert_eq!(psi().apply(&p).unwrap(), p);
        assert_eq!(psi().apply(&z()).unwrap(), v.shift_x(-1));
        assert_eq!(psi_derivation().exp(64).unwrap(), psi());
        assert_eq!(psi().jacobian_det(&YZU), MultiPoly::one());
    }

    #[test]
    fn compose_matches_display() {
        let (_, v, w) = std_polys();
        let mid = PolyMap::from_images([(Var::Y, &y() + &(&xp(4) * &z()))]);
        let got = mid.compose(&psi()).unwrap();
        let expect = PolyMap::from_images([
            (Var::Y, &y() + &(&xp(3) * &v)),
            (Var::Z, v.shift_x(-1)),
            (Var::U, w.shift_x(-2)),
        ]);
        assert_eq!(got, expect);
    }

    #[test]
    fn psi_inverse_pair() {
        let inv = psi_inv(64).unwrap();
        assert!(verify_inverse_pair(&psi(), &inv, &YZU));
        assert!(!verify_inverse_pair(&psi(), &psi(), &YZU));
        assert!(psi_inv(64).unwrap().compose(&psi()).unwrap().fixes(&YZU));
    }

    #[test]
    fn theta_integrality_threshold() {
        assert!(theta(3).is_integral_map(&YZU, false));
        assert!(!theta(2).is_integral_map(&YZU, false));
        let (p, _, _) = std_polys();
        let zbar = theta(3).reduce_mod_x().unwrap().image(Var::Z);
        assert_eq!(zbar, &z() + &(&y().pow(3) * &p.pow(3)));
        assert_eq!(theta(3).jacobian_det(&YZU), MultiPoly::one());
        // witness: v w f_2 mod x = -y^3 p^3
        let (p, v, w) = std_polys();
        let r = (&(&v * &w) * &f(1)).reduce_mod_x(1).unwrap();
        assert_eq!(r, -(&y().pow(3) * &p.pow(3)));
    }

    #[test]
    fn phi_integrality_threshold() {
        assert!(phi(2).is_integral_map(&YZU, false));
        assert!(!phi(1).is_integral_map(&YZU, false));
        let (p, _, w) = std_polys();
        let r = (&w.pow(2) * &f(1)).reduce_mod_x(1).unwrap();
        assert_eq!(r, &y().pow(3) * &p.pow(4));
    }

    #[test]
    fn alpha_fixes_w() {
        let (_, _, w) = std_polys();
        assert_eq!(alpha(2).apply(&w).unwrap(), w);
        assert_eq!(alpha_exp(2, -1, 64).unwrap(), alpha(2));
    }

    #[test]
    fn certifiers_small_n() {
        let o = opts();
        for n in 1..=3 {
            let c = verify_theta(n, &o);
            assert!(c.is_verified(), "{:?}", c);
            let c = verify_phi(n, &o);
            assert!(c.is_verified(), "{:?}", c);
        }
        for n in 1..=2 {
            let c = verify_alpha_phi(n, &o);
            assert!(c.is_verified(), "{:?}", c);
            let c = verify_fg_equivalence(n, &o);
            assert!(c.is_verified(), "{:?}", c);
        }
        assert!(verify_identities(&o).is_verified());
    }

    #[test]
    fn conjugations() {
        let inv = psi_inv(64).unwrap();
        let dp = d_prime(3).conjugate(&psi(), &inv).unwrap();
        let (_, v, _) = std_polys();
        assert_eq!(dp, d_vw().times(&v));
        let ep = e_prime(1).conjugate(&psi(), &inv).unwrap();
        assert_eq!(ep, e_derivation(1).scale_half());
        let id = PolyMap::identity();
        assert_eq!(nagata_derivation().conjugate(&id, &id).unwrap(), nagata_derivation());
        assert_eq!(nagata_derivation().conjugate(&psi(), &psi()), Err(Error::NotInversePair));
    }

    impl Derivation {
        fn scale_half(&self) -> Derivation {
            self.times(&MultiPoly::rational(1, 2))
        }
    }

    #[test]
    fn coordinate_construction() {
        let o = opts();
        let (m, c) = coordinate_from_q(&MultiPoly::zero(), &MultiPoly::one(), &o).unwrap();
        assert!(c.is_verified(), "{:?}", c);
        assert_eq!(m.image(Var::Y), f(2));
        // Q1 = 0 forces P1 = 0, so the map is the identity mod x.
        assert!(m.reduce_mod_x().unwrap().is_identity());
        let (m, c) = coordinate_from_q(&abs_w(), &MultiPoly::zero(), &o).unwrap();
        assert!(c.is_verified(), "{:?}", c);
        assert_eq!(m.image(Var::Y), g(3));
        let (m, _) = coordinate_from_q(&MultiPoly::zero(), &MultiPoly::zero(), &o).unwrap();
        assert!(m.is_identity());
        assert!(matches!(
            coordinate_from_q(&MultiPoly::zero(), &abs_v(), &o),
            Err(Error::MalformedQ2(_))
        ));
    }

    #[test]
    fn odd_y_power_needs_alternating_sign() {
        let o = opts();
        let q2 = abs_v().pow(2);
        let (_, c) = coordinate_from_q(&MultiPoly::zero(), &q2, &o).unwrap();
        assert!(c.is_verified(), "{:?}", c);
        let (_, c) = coordinate_from_q_with(&MultiPoly::zero(), &q2, CorrectionSign::Plain, &o).unwrap();
        assert!(!c.passed("integral"));
    }

    #[test]
    fn hyperplane_congruences() {
        let o = opts();
        assert!(hyperplane_check(&MultiPoly::zero(), &o).is_verified());
        for q0 in [abs_v(), abs_w().pow(2)] {
            let c = hyperplane_check(&q0, &o);
            let failing: Vec<_> = c.checks.iter().filter(|ch| !ch.pass).map(|ch| ch.name.as_str()).collect();
            assert_eq!(failing, ["theta0(u) = u mod x"], "{:?}", c);
            assert!(c.passed("theta0(u) = u + Q0 (2 z w0 - p0^2) mod x"));
            assert!(c.passed("theta0 integral"));
            assert!(c.passed("inverse pair over R"));
        }
    }

    #[test]
    fn cusp_parts() {
        let o = opts();
        assert!(cusp_checks(&MultiPoly::zero(), &o).is_verified());
        let c = cusp_checks(&abs_v(), &o);
        for ch in &c.checks {
            if ch.name.starts_with("(1)") {
                assert!(ch.pass, "{:?}", ch);
            }
        }
        assert!(c.passed("(2) y-image = y + Q(v, w)|y->xy+c - Q(0, 0)"));
        assert!(c.passed("(2) J = 1"));
        assert!(c.passed("(2) conjugate inverse pair"));
        assert!(!c.passed("(2) conjugate integral in x"));
    }

    #[test]
    fn lemma_oracle_examples() {
        let rel = &(&abs_y() * &abs_w()) + &abs_v().pow(2);
        assert_eq!(lemma_ideal_oracle(&rel).unwrap().0, (true, true, true));
        assert_eq!(lemma_ideal_oracle(&abs_v()).unwrap().0, (false, false, false));
        let h = &rel * &abs_y().pow(3);
        assert_eq!(lemma_ideal_oracle(&h).unwrap().0, (true, true, true));
    }

    #[test]
    fn c_y_p_membership() {
        let (p, _, _) = std_polys();
        assert!(in_c_y_p(&(&y().pow(3) * &p.pow(2))));
        assert!(!in_c_y_p(&z()));
        assert!(!in_c_y_p(&(&y() * &u())));
    }
}
