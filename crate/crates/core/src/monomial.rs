//! Variables and monomials of the fixed universe `{x, c, y, z, u, t}`.

use std::cmp::Ordering;
use std::fmt;

/// A variable of the universe. The discriminant is the rank in the monomial
/// order `x < c < y < z < u < t`.
///
/// Polynomials "in abstract `(Y, V, W, T)`" reuse the `y, z, u, t` slots:
/// `V` lives in the `z` slot and `W` in the `u` slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X = 0,
    C = 1,
    Y = 2,
    Z = 3,
    U = 4,
    T = 5,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::X, Var::C, Var::Y, Var::Z, Var::U, Var::T];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Var {
        Var::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::C => "c",
            Var::Y => "y",
            Var::Z => "z",
            Var::U => "u",
            Var::T => "t",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Abstract symbol slots used by `(Y, V, W, T)` presentations.
pub mod abstract_slot {
    use super::Var;
    pub const Y: Var = Var::Y;
    pub const V: Var = Var::Z;
    pub const W: Var = Var::U;
    pub const T: Var = Var::T;
}

/// Exponent vector indexed by [`Var::index`]. Only the `x` entry may be
/// negative in a stored polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub(crate) [i32; 6]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 6]);

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        let mut m = [0; 6];
        m[v.index()] = e;
        Monomial(m)
    }

    /// Builds from `(x, y, z, u, t, c)` exponents.
    pub fn new(x: i32, y: u32, z: u32, u: u32, t: u32, c: u32) -> Self {
        Monomial([x, c as i32, y as i32, z as i32, u as i32, t as i32])
    }

    pub fn exp(&self, v: Var) -> i32 {
        self.0[v.index()]
    }

    pub fn set_exp(&mut self, v: Var, e: i32) {
        self.0[v.index()] = e;
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        Monomial(m)
    }

    /// `self / other` if every exponent stays non-negative (x included).
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a -= b;
            if *a < 0 {
                return None;
            }
        }
        Some(Monomial(m))
    }

    /// True when no exponent other than x is negative.
    pub fn is_valid(&self) -> bool {
        self.0[1..].iter().all(|&e| e >= 0)
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 6]
    }
}

impl Ord for Monomial {
    /// Graded lexicographic, `x < c < y < z < u < t`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                for i in (0..6).rev() {
                    match self.0[i].cmp(&other.0[i]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Monomial {
    /// `x^-2*y*z^3` with each variable written as `name(v)`; the empty
    /// monomial renders as `1`.
    pub fn render_with(&self, name: impl Fn(Var) -> &'static str) -> String {
        let mut out = String::new();
        for v in [Var::X, Var::Y, Var::Z, Var::U, Var::T, Var::C] {
            let e = self.exp(v);
            if e == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push('*');
            }
            out.push_str(name(v));
            if e != 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(Var::name))
    }
}
