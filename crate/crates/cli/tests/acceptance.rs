//! One line per acceptance criterion. Runs as a plain binary so the lines
//! reach the terminal; exits nonzero on any unexpected failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use venlab::poly::Images;
use venlab::stable;
use venlab::suite::{self, coordinate_certificate};
use venlab::venereau;
use venlab::{Certificate, Coeff, Derivation, Monomial, MultiPoly, PolyMap, Var, VerifyOptions};

const CASES: usize = 1000;
const IDENTITY_LIMIT: Duration = Duration::from_secs(1);
const THETA_LIMIT: Duration = Duration::from_secs(10);
const PHI_LIMIT: Duration = Duration::from_secs(10);
const ALPHA_LIMIT: Duration = Duration::from_secs(10);
const COORDINATE_LIMIT: Duration = Duration::from_secs(30);
const HYPERPLANE_LIMIT: Duration = Duration::from_secs(30);
const STABLE_LIMIT: Duration = Duration::from_secs(300);
const LEMMA_LIMIT: Duration = Duration::from_secs(60);

/// Criteria that cannot hold as stated, with the checks expected to fail.
const KNOWN_UNATTAINABLE: &[(u32, &[&str])] = &[(
    6,
    &[
        "theta0(u) = u mod x",
        "(2) conjugate integral in x",
        "(2) inverse integral in x",
    ],
)];

struct Outcome {
    pass: bool,
    detail: String,
    failed_checks: Vec<String>,
}

fn from_certs(certs: &[Certificate], elapsed: Duration, limit: Duration, extra: Option<String>) -> Outcome {
    let mut failed_checks = Vec::new();
    let mut bad = Vec::new();
    for c in certs {
        if !c.is_verified() {
            bad.push(c.claim_id.clone());
            failed_checks.extend(c.checks.iter().filter(|ch| !ch.pass).map(|ch| ch.name.clone()));
        }
    }
    let in_time = elapsed <= limit;
    let mut detail = format!(
        "{}/{} verified in {:.2} s (limit {} s)",
        certs.len() - bad.len(),
        certs.len(),
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    if !bad.is_empty() {
        detail.push_str(&format!("; not verified: {}", bad.join(", ")));
    }
    let mut pass = bad.is_empty() && in_time;
    if let Some(e) = extra {
        pass = false;
        detail.push_str(&format!("; {}", e));
    }
    Outcome {
        pass,
        detail,
        failed_checks,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn integral_witness(c: &Certificate, name: &str) -> Option<bool> {
    let w = c.check(name)?.witness.as_deref()?;
    Some(w.starts_with("integral=true"))
}

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn identities() -> Outcome {
    let (c, t) = timed(|| venereau::verify_identities(&opts()));
    from_certs(&[c], t, IDENTITY_LIMIT, None)
}

fn theta_suite() -> Outcome {
    let (certs, t) = timed(|| (1..=5).map(|n| venereau::verify_theta(n, &opts())).collect::<Vec<_>>());
    let wrong: Vec<String> = certs
        .iter()
        .zip(1..=5u32)
        .filter(|(c, n)| integral_witness(c, "integral iff n >= 3") != Some(*n >= 3))
        .map(|(c, _)| c.claim_id.clone())
        .collect();
    from_certs(&certs, t, THETA_LIMIT, (!wrong.is_empty()).then(|| format!("integrality wrong at {}", wrong.join(", "))))
}

fn phi_suite() -> Outcome {
    let (certs, t) = timed(|| (1..=4).map(|n| venereau::verify_phi(n, &opts())).collect::<Vec<_>>());
    let wrong: Vec<String> = certs
        .iter()
        .zip(1..=4u32)
        .filter(|(c, n)| integral_witness(c, "integral iff n >= 2") != Some(*n >= 2))
        .map(|(c, _)| c.claim_id.clone())
        .collect();
    from_certs(&certs, t, PHI_LIMIT, (!wrong.is_empty()).then(|| format!("integrality wrong at {}", wrong.join(", "))))
}

fn alpha_suite() -> Outcome {
    let (certs, t) = timed(|| {
        (1..=3)
            .flat_map(|n| [venereau::verify_alpha_phi(n, &opts()), venereau::verify_fg_equivalence(n, &opts())])
            .collect::<Vec<_>>()
    });
    from_certs(&certs, t, ALPHA_LIMIT, None)
}

fn coordinate_suite() -> Outcome {
    let (certs, t) = timed(|| {
        suite::coordinate_corpus()
            .iter()
            .map(|(q1, q2)| coordinate_certificate(q1, q2, &opts()))
            .collect::<Vec<_>>()
    });
    from_certs(&certs, t, COORDINATE_LIMIT, None)
}

fn hyperplane_suite() -> Outcome {
    let (certs, t) = timed(|| {
        let mut v: Vec<_> = suite::hyperplane_corpus().iter().map(|q| venereau::hyperplane_check(q, &opts())).collect();
        v.extend(suite::cusp_corpus().iter().map(|q| venereau::cusp_checks(q, &opts())));
        v
    });
    from_certs(&certs, t, HYPERPLANE_LIMIT, None)
}

fn stable_suite() -> Outcome {
    let (certs, t) = timed(|| stable::corpus().iter().map(|q| stable::verify_stable(q, &opts())).collect::<Vec<_>>());
    from_certs(&certs, t, STABLE_LIMIT, None)
}

fn lemma_suite() -> Outcome {
    let (c, t) = timed(|| suite::lemma_sweep(&opts()));
    let mut o = from_certs(std::slice::from_ref(&c), t, LEMMA_LIMIT, None);
    if let Some(w) = c.checks.first().and_then(|ch| ch.witness.clone()) {
        o.detail.push_str(&format!("; {}", w));
    }
    o
}

fn coeff(rng: &mut ChaCha8Rng) -> Coeff {
    Coeff::new(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn poly(rng: &mut ChaCha8Rng, laurent: bool, max_terms: usize) -> MultiPoly {
    let n = rng.gen_range(0..=max_terms);
    MultiPoly::from_terms((0..n).map(|_| {
        let xe = if laurent { rng.gen_range(-2..=2) } else { rng.gen_range(0..=2) };
        let m = Monomial::new(
            xe,
            rng.gen_range(0..=2),
            rng.gen_range(0..=2),
            rng.gen_range(0..=2),
            rng.gen_range(0..=1),
            rng.gen_range(0..=1),
        );
        (m, coeff(rng))
    }))
}

fn map3(rng: &mut ChaCha8Rng) -> PolyMap {
    PolyMap::from_images([
        (Var::Y, poly(rng, false, 3)),
        (Var::Z, poly(rng, false, 3)),
        (Var::U, poly(rng, false, 3)),
    ])
}

fn properties() -> Outcome {
    const YZU: [Var; 3] = [Var::Y, Var::Z, Var::U];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures: Vec<&str> = Vec::new();
    let t = Instant::now();
    let mut record = |name: &'static str, ok: bool| {
        if !ok && !failures.contains(&name) {
            failures.push(name);
        }
    };
    for _ in 0..CASES {
        let (f, g, h) = (poly(&mut rng, true, 5), poly(&mut rng, true, 5), poly(&mut rng, true, 5));
        record(
            "ring axioms",
            &f + &g == &g + &f
                && &f * &g == &g * &f
                && &(&f + &g) + &h == &f + &(&g + &h)
                && &(&f * &g) * &h == &f * &(&g * &h)
                && &f * &(&g + &h) == &(&f * &g) + &(&f * &h)
                && (&f + &(-f.clone())).is_zero(),
        );

        let d = Derivation::from_images([
            (Var::Y, poly(&mut rng, true, 3)),
            (Var::Z, poly(&mut rng, true, 3)),
            (Var::U, poly(&mut rng, true, 3)),
        ]);
        record("Leibniz", d.apply(&(&f * &g)) == &(&d.apply(&f) * &g) + &(&f * &d.apply(&g)));

        let mut im = Images::new();
        im.insert(Var::Y, poly(&mut rng, true, 3));
        im.insert(Var::Z, poly(&mut rng, true, 3));
        let s = |p: &MultiPoly| p.substitute(&im);
        record(
            "substitution homomorphy",
            matches!((s(&(&f * &g)), s(&f), s(&g)), (Ok(a), Ok(b), Ok(c)) if a == &b * &c)
                && matches!((s(&(&f + &g)), s(&f), s(&g)), (Ok(a), Ok(b), Ok(c)) if a == &b + &c),
        );

        if let (Some(vf), Some(vg)) = (f.x_valuation(), g.x_valuation()) {
            record("valuation additivity", (&f * &g).x_valuation() == Some(vf + vg));
        }

        let (a, b) = (map3(&mut rng), map3(&mut rng));
        let chain = match (a.compose(&b), b.apply(&a.jacobian_det(&YZU))) {
            (Ok(ab), Ok(ja)) => ab.jacobian_det(&YZU) == &ja * &b.jacobian_det(&YZU),
            _ => false,
        };
        record("Jacobian chain rule", chain);
    }
    let pass = failures.is_empty();
    let detail = if pass {
        format!("5 properties x {} cases, 0 failures in {:.2} s", CASES, t.elapsed().as_secs_f64())
    } else {
        format!("failing: {}", failures.join(", "))
    };
    Outcome {
        pass,
        detail,
        failed_checks: Vec::new(),
    }
}

fn strip_timing(text: &str) -> Result<String, String> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    for c in v.as_array_mut().ok_or("top level is not an array")? {
        c.as_object_mut().ok_or("entry is not an object")?.remove("ms");
    }
    serde_json::to_string(&v).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("venlab-acceptance-{}", std::process::id()));
    let _ = std::fs::create_dir_all(&dir);
    let mut runs = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("run{}.json", k));
        let status = Command::new(env!("CARGO_BIN_EXE_venlab"))
            .args(["verify-all", "--json"])
            .arg(&path)
            .output();
        match status {
            Ok(out) if out.status.code().is_some() => {}
            other => {
                return Outcome {
                    pass: false,
                    detail: format!("verify-all did not run: {:?}", other.map(|o| o.status)),
                    failed_checks: Vec::new(),
                }
            }
        }
        runs.push(std::fs::read_to_string(&path).map_err(|e| e.to_string()).and_then(|t| strip_timing(&t)));
    }
    let _ = std::fs::remove_dir_all(&dir);
    match (&runs[0], &runs[1]) {
        (Ok(a), Ok(b)) => Outcome {
            pass: a == b,
            detail: format!(
                "{} ({} bytes without timing)",
                if a == b { "identical" } else { "different" },
                a.len()
            ),
            failed_checks: Vec::new(),
        },
        (Err(e), _) | (_, Err(e)) => Outcome {
            pass: false,
            detail: e.clone(),
            failed_checks: Vec::new(),
        },
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "identity suite", identities),
        (2, "theta suite", theta_suite),
        (3, "phi suite", phi_suite),
        (4, "alpha and fg suite", alpha_suite),
        (5, "coordinate construction", coordinate_suite),
        (6, "hyperplane and cusp", hyperplane_suite),
        (7, "stable suite", stable_suite),
        (8, "lemma oracle sweep", lemma_suite),
        (9, "property suites", properties),
        (10, "verify-all determinism", determinism),
    ];
    let mut unexpected = 0;
    for (n, name, run) in criteria {
        let o = run();
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == n);
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = match known {
            Some((_, expected)) if !o.pass => {
                let mut got = o.failed_checks.clone();
                got.sort();
                got.dedup();
                let mut want: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
                want.sort();
                if got == want {
                    " [known unattainable: only the documented checks fail]"
                } else {
                    unexpected += 1;
                    " [unexpected: failing checks differ from the documented ones]"
                }
            }
            _ if !o.pass => {
                unexpected += 1;
                ""
            }
            _ => "",
        };
        println!("criterion {:>2} {:<26} {}  {}{}", n, name, status, o.detail, note);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed unexpectedly", unexpected);
        ExitCode::FAILURE
    }
}
