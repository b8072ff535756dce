//! The shipped corpus and `verify_all`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::certificate::{small_rational, CertBuilder, Certificate, VerifyOptions};
use crate::poly::MultiPoly;
use crate::stable::{self, QSpec};
use crate::venereau::{self, abs_v, abs_w, abs_y, abstract_monomial};

/// Random `h` in the lemma sweep.
pub const LEMMA_RANDOM: usize = 200;

/// `(Q1, Q2)` pairs for the coordinate construction.
pub fn coordinate_corpus() -> Vec<(MultiPoly, MultiPoly)> {
    let x = MultiPoly::var(crate::Var::X);
    vec![
        (MultiPoly::zero(), MultiPoly::one()),
        (abs_w(), MultiPoly::zero()),
        (&x * &abs_w(), MultiPoly::zero()),
        (MultiPoly::zero(), abs_w().pow(2)),
        (&abs_v() * &abs_w(), MultiPoly::zero()),
    ]
}

pub fn hyperplane_corpus() -> Vec<MultiPoly> {
    vec![
        MultiPoly::zero(),
        abs_v(),
        abs_w(),
        &abs_v().pow(2) * &abs_w(),
    ]
}

pub fn cusp_corpus() -> Vec<MultiPoly> {
    vec![MultiPoly::zero(), abs_v(), abs_w()]
}

/// Every `Y^a V^b W^c` with `a + b + c <= 4`.
pub fn lemma_monomials() -> Vec<MultiPoly> {
    monomials_up_to(4)
}

fn monomials_up_to(d: u32) -> Vec<MultiPoly> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                out.push(abstract_monomial(a, b, c));
            }
        }
    }
    out
}

/// Low-degree random `h`: sums of up to four monomials of total degree at
/// most 3, half of them multiplied by `YW + V^2` so that all three answers
/// occur.
pub fn random_lemma_h<R: Rng>(rng: &mut R) -> MultiPoly {
    let low = monomials_up_to(3);
    let mut h = MultiPoly::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let m = low.choose(rng).expect("nonempty");
        h = &h + &m.scale(&small_rational(rng, true));
    }
    if rng.gen_bool(0.5) {
        let rel = &(&abs_y() * &abs_w()) + &abs_v().pow(2);
        h = &h * &rel;
    }
    h
}

/// The sweep as one certificate: every monomial and [`LEMMA_RANDOM`] random
/// `h`, each giving three equal answers.
pub fn lemma_sweep(opts: &VerifyOptions) -> Certificate {
    let id = "lemma-ideal-sweep";
    let mut rng = opts.rng_for(id);
    let mut hs = lemma_monomials();
    hs.extend((0..LEMMA_RANDOM).map(|_| random_lemma_h(&mut rng)));
    let mut b = CertBuilder::new(id);
    let mut counts = [0usize; 2];
    let mut bad = Vec::new();
    for h in &hs {
        match venereau::lemma_ideal_oracle(h) {
            Ok(((b1, b2, b3), _)) => {
                counts[b3 as usize] += 1;
                if !(b1 == b2 && b2 == b3) {
                    bad.push(h.render_abstract());
                }
            }
            Err(e) => {
                b.error(&format!("h = {}", h.render_abstract()), &e);
            }
        }
    }
    let summary = format!("{} polynomials, {} in the ideal, {} outside", hs.len(), counts[1], counts[0]);
    if bad.is_empty() {
        b.check_with("membership tests agree", true, summary);
    } else {
        b.check_with("membership tests agree", false, format!("{}; disagree at {}", summary, bad.join(", ")));
    }
    b.finish()
}

type Job = Box<dyn Fn(&VerifyOptions) -> Certificate + Send + Sync>;

fn jobs() -> Vec<Job> {
    let mut jobs: Vec<Job> = vec![Box::new(venereau::verify_identities)];
    for n in 1..=5 {
        jobs.push(Box::new(move |o| venereau::verify_theta(n, o)));
    }
    for n in 1..=4 {
        jobs.push(Box::new(move |o| venereau::verify_phi(n, o)));
    }
    for n in 1..=3 {
        jobs.push(Box::new(move |o| venereau::verify_alpha_phi(n, o)));
        jobs.push(Box::new(move |o| venereau::verify_fg_equivalence(n, o)));
    }
    for (q1, q2) in coordinate_corpus() {
        jobs.push(Box::new(move |o| coordinate_certificate(&q1, &q2, o)));
    }
    for q0 in hyperplane_corpus() {
        jobs.push(Box::new(move |o| venereau::hyperplane_check(&q0, o)));
    }
    for q in cusp_corpus() {
        jobs.push(Box::new(move |o| venereau::cusp_checks(&q, o)));
    }
    jobs.push(Box::new(lemma_sweep));
    for q in stable::corpus() {
        jobs.push(Box::new(move |o| stable::verify_stable(&q, o)));
    }
    jobs
}

/// [`venereau::coordinate_from_q`] as a certificate, with construction
/// errors recorded rather than returned.
pub fn coordinate_certificate(q1: &MultiPoly, q2: &MultiPoly, opts: &VerifyOptions) -> Certificate {
    match venereau::coordinate_from_q(q1, q2, opts) {
        Ok((_, cert)) => cert,
        Err(e) => {
            let id = format!("coordinate[Q1={};Q2={}]", q1.render_abstract(), q2.render_abstract());
            let mut b = CertBuilder::new(id);
            b.error("construction", &e);
            b.finish()
        }
    }
}

/// [`stable::verify_stable`] from an abstract `Q(V, W)`.
pub fn stable_certificate(q: &MultiPoly, opts: &VerifyOptions) -> Certificate {
    match QSpec::from_abstract(q) {
        Ok(spec) => stable::verify_stable(&spec, opts),
        Err(e) => {
            let mut b = CertBuilder::new(format!("stable[q={}]", q.render_abstract()));
            b.error("input", &e);
            b.finish()
        }
    }
}

/// Runs every certifier over the shipped corpus, concurrently, and returns
/// the certificates sorted by claim id.
pub fn verify_all(opts: &VerifyOptions) -> Vec<Certificate> {
    let mut certs: Vec<Certificate> = jobs().par_iter().map(|j| j(opts)).collect();
    certs.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    certs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_sizes() {
        assert_eq!(lemma_monomials().len(), 35);
        assert_eq!(jobs().len(), 1 + 5 + 4 + 6 + 5 + 4 + 3 + 1 + 6);
    }

    #[test]
    fn sweep_hits_both_sides() {
        let c = lemma_sweep(&VerifyOptions::default());
        assert!(c.is_verified(), "{:?}", c.checks);
        let w = c.checks[0].witness.as_deref().unwrap();
        assert!(w.starts_with("235 polynomials"), "{w}");
        assert!(!w.contains(" 0 in the ideal"), "{w}");
    }
}
