//! Verification certificates and the random-point oracle.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff::Coeff;
use crate::derivation::DEFAULT_MAX_ITER;
use crate::error::{Error, Result};
use crate::map::PolyMap;
use crate::modp;
use crate::monomial::Var;
use crate::poly::{MultiPoly, Point};

/// Witness polynomials are rendered with at most this many terms.
pub const WITNESS_TERMS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Failed,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub claim_id: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub terms_truncated: bool,
    pub ms: u64,
}

impl Certificate {
    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// True when the named check exists and passed.
    pub fn passed(&self, name: &str) -> bool {
        self.check(name).map_or(false, |c| c.pass)
    }
}

/// Knobs shared by every certifier.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub max_iter: usize,
    pub seed: u64,
    pub oracle_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_iter: DEFAULT_MAX_ITER,
            seed: 1,
            oracle_points: 100,
        }
    }
}

impl VerifyOptions {
    /// A generator seeded from the global seed and the claim id, so results
    /// do not depend on execution order.
    pub fn rng_for(&self, claim_id: &str) -> ChaCha8Rng {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in claim_id.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

pub struct CertBuilder {
    claim_id: String,
    checks: Vec<Check>,
    truncated: bool,
    errored: bool,
    start: Instant,
}

impl CertBuilder {
    pub fn new(claim_id: impl Into<String>) -> Self {
        CertBuilder {
            claim_id: claim_id.into(),
            checks: Vec::new(),
            truncated: false,
            errored: false,
            start: Instant::now(),
        }
    }

    fn push(&mut self, name: &str, pass: bool, witness: Option<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            witness,
        });
    }

    pub fn render(&mut self, p: &MultiPoly) -> String {
        let (s, t) = p.render_truncated(WITNESS_TERMS);
        self.truncated |= t;
        s
    }

    pub fn check(&mut self, name: &str, pass: bool) {
        self.push(name, pass, None);
    }

    pub fn check_with(&mut self, name: &str, pass: bool, witness: String) {
        self.push(name, pass, Some(witness));
    }

    /// Passes iff `p` is zero; a failing `p` is kept as the witness.
    pub fn check_zero(&mut self, name: &str, p: &MultiPoly) {
        if p.is_zero() {
            self.push(name, true, None);
        } else {
            let w = self.render(p);
            self.push(name, false, Some(w));
        }
    }

    pub fn check_eq(&mut self, name: &str, lhs: &MultiPoly, rhs: &MultiPoly) {
        self.check_zero(name, &(lhs - rhs));
    }

    /// Compares two maps on `vars`; the first differing image is the witness.
    pub fn check_map_eq(&mut self, name: &str, lhs: &PolyMap, rhs: &PolyMap, vars: &[Var]) {
        for &v in vars {
            let d = &lhs.image(v) - &rhs.image(v);
            if !d.is_zero() {
                let w = format!("{}: {}", v, self.render(&d));
                self.push(name, false, Some(w));
                return;
            }
        }
        self.push(name, true, None);
    }

    /// Informational entry (always passing) carrying a rendered polynomial.
    pub fn note(&mut self, name: &str, p: &MultiPoly) {
        let w = self.render(p);
        self.push(name, true, Some(w));
    }

    pub fn note_text(&mut self, name: &str, text: String) {
        self.push(name, true, Some(text));
    }

    /// Records a computation error; the certificate status becomes `error`.
    pub fn error(&mut self, name: &str, e: &Error) {
        self.errored = true;
        self.push(name, false, Some(e.to_string()));
    }

    /// Unwraps a result, recording the error under `name` on failure.
    pub fn ok<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(name, &e);
                None
            }
        }
    }

    pub fn finish(self) -> Certificate {
        let status = if self.errored {
            Status::Error
        } else if self.checks.iter().all(|c| c.pass) {
            Status::Verified
        } else {
            Status::Failed
        };
        Certificate {
            claim_id: self.claim_id,
            status,
            checks: self.checks,
            terms_truncated: self.truncated,
            ms: self.start.elapsed().as_millis() as u64,
        }
    }
}

/// Uniform rational with `|numerator| <= 7` and `1 <= denominator <= 7`.
pub fn small_rational<R: Rng>(rng: &mut R, nonzero: bool) -> Coeff {
    loop {
        let n: i64 = rng.gen_range(-7..=7);
        let d: i64 = rng.gen_range(1..=7);
        if !(nonzero && n == 0) {
            return Coeff::new(n, d);
        }
    }
}

/// A random point on every variable of the universe, with `x` and `c` nonzero.
pub fn random_point<R: Rng>(rng: &mut R) -> Point {
    Var::ALL
        .into_iter()
        .map(|v| (v, small_rational(rng, matches!(v, Var::X | Var::C))))
        .collect()
}

/// Evaluates a tuple composition `f1 ∘ f2 ∘ … ∘ fk` at a point without
/// expanding it: `fk` is evaluated first.
pub fn eval_chain(chain: &[&PolyMap], point: &Point) -> Result<Point> {
    let mut pt = point.clone();
    for m in chain.iter().rev() {
        pt = m.eval_at(&pt)?;
    }
    Ok(pt)
}

/// Random-point oracle: the expanded `closed` map agrees with the numerically
/// evaluated `chain` on `vars` at `n` random small rational points, exactly.
pub fn chain_oracle<R: Rng>(
    rng: &mut R,
    n: usize,
    chain: &[&PolyMap],
    closed: &PolyMap,
    vars: &[Var],
) -> Result<bool> {
    for _ in 0..n {
        let pt = random_point(rng);
        let a = eval_chain(chain, &pt)?;
        let b = closed.eval_at(&pt)?;
        if vars.iter().any(|v| a.get(v) != b.get(v)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// As [`chain_oracle`], but at uniform points modulo a 61-bit prime, for
/// chains whose exact evaluation is too costly.
pub fn chain_oracle_modp<R: Rng>(
    rng: &mut R,
    n: usize,
    chain: &[&PolyMap],
    closed: &PolyMap,
    vars: &[Var],
) -> Result<bool> {
    for _ in 0..n {
        let pt = modp::random_point(rng);
        let mut a = pt;
        for m in chain.iter().rev() {
            a = modp::eval_map(m, &a).ok_or(Error::ZeroAtPole)?;
        }
        let b = modp::eval_map(closed, &pt).ok_or(Error::ZeroAtPole)?;
        if vars.iter().any(|v| a[v.index()] != b[v.index()]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random-point oracle for a single identity `lhs = rhs` where the two sides
/// are given as evaluators.
pub fn point_oracle<R: Rng>(
    rng: &mut R,
    n: usize,
    mut lhs: impl FnMut(&Point) -> Result<Coeff>,
    mut rhs: impl FnMut(&Point) -> Result<Coeff>,
) -> Result<bool> {
    for _ in 0..n {
        let pt = random_point(rng);
        if lhs(&pt)? != rhs(&pt)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random-point oracle for `J(map) = expected` on `vars`: the partial
/// derivatives are formed symbolically and the determinant is evaluated
/// modulo a 61-bit prime.
pub fn jacobian_oracle<R: Rng>(
    rng: &mut R,
    n: usize,
    map: &PolyMap,
    vars: &[Var],
    expected: &Coeff,
) -> Result<bool> {
    let partials: Vec<Vec<MultiPoly>> = vars
        .iter()
        .map(|&vi| {
            let img = map.image(vi);
            vars.iter().map(|&vj| img.partial(vj)).collect()
        })
        .collect();
    let want = modp::coeff(expected).ok_or(Error::ZeroAtPole)?;
    for _ in 0..n {
        let pt = modp::random_point(rng);
        let mut m = Vec::with_capacity(vars.len());
        for row in &partials {
            let vals: Option<Vec<u64>> = row.iter().map(|e| modp::eval(e, &pt)).collect();
            m.push(vals.ok_or(Error::ZeroAtPole)?);
        }
        if modp::det(m) != want {
            return Ok(false);
        }
    }
    Ok(true)
}
