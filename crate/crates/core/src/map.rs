//! Ring endomorphisms given by generator images.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::monomial::Var;
use crate::poly::{Images, MultiPoly, Point};

/// A ring endomorphism of `Q[x^±1, c, y, z, u, t]`; unlisted variables are
/// fixed. Identity images are never stored, so equality is structural.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PolyMap {
    images: Images,
}

impl PolyMap {
    pub fn identity() -> Self {
        PolyMap::default()
    }

    pub fn from_images<I: IntoIterator<Item = (Var, MultiPoly)>>(it: I) -> Self {
        let mut m = PolyMap::identity();
        for (v, p) in it {
            m.set(v, p);
        }
        m
    }

    pub fn set(&mut self, v: Var, img: MultiPoly) {
        if img == MultiPoly::var(v) {
            self.images.remove(&v);
        } else {
            self.images.insert(v, img);
        }
    }

    /// The stored (non-identity) image of `v`.
    pub fn get(&self, v: Var) -> Option<&MultiPoly> {
        self.images.get(&v)
    }

    pub fn image(&self, v: Var) -> MultiPoly {
        self.images.get(&v).cloned().unwrap_or_else(|| MultiPoly::var(v))
    }

    pub fn images(&self) -> &Images {
        &self.images
    }

    pub fn moved_vars(&self) -> Vec<Var> {
        self.images.keys().copied().collect()
    }

    pub fn fixes(&self, vars: &[Var]) -> bool {
        vars.iter().all(|v| !self.images.contains_key(v))
    }

    pub fn is_identity(&self) -> bool {
        self.images.is_empty()
    }

    /// R-linear (or S-linear) maps fix x.
    pub fn is_linear_over_x(&self) -> bool {
        self.fixes(&[Var::X])
    }

    pub fn apply(&self, p: &MultiPoly) -> Result<MultiPoly> {
        p.substitute(&self.images)
    }

    /// Tuple composition: `f.compose(g)` substitutes `g`'s images into `f`'s
    /// formulas, so `(y + x^4 z, z, u) ∘ ψ = (y + x^3 v, v/x, w/x^2)`.
    /// As homomorphisms this applies `f` first and `g` second.
    pub fn compose(&self, g: &PolyMap) -> Result<PolyMap> {
        let mut out = PolyMap::identity();
        for v in Var::ALL {
            let img = match self.images.get(&v) {
                Some(f_img) => g.apply(f_img)?,
                None => g.image(v),
            };
            out.set(v, img);
        }
        Ok(out)
    }

    /// Composes a chain left to right under the tuple convention.
    pub fn compose_chain(maps: &[&PolyMap]) -> Result<PolyMap> {
        let mut acc = PolyMap::identity();
        for m in maps {
            acc = acc.compose(m)?;
        }
        Ok(acc)
    }

    /// Determinant of `(∂ image(vars[i]) / ∂ vars[j])`.
    pub fn jacobian_det(&self, vars: &[Var]) -> MultiPoly {
        let n = vars.len();
        let matrix: Vec<Vec<MultiPoly>> = vars
            .iter()
            .map(|&vi| {
                let img = self.image(vi);
                vars.iter().map(|&vj| img.partial(vj)).collect()
            })
            .collect();
        let mut memo = FxHashMap::default();
        minor(&matrix, 0, (1u32 << n) - 1, &mut memo)
    }

    /// Every listed image is integral in x, and c-free unless `allow_c`.
    pub fn is_integral_map(&self, vars: &[Var], allow_c: bool) -> bool {
        vars.iter().all(|&v| {
            let img = self.image(v);
            img.is_integral() && (allow_c || img.is_free_of(Var::C))
        })
    }

    /// Reduces every image mod x.
    pub fn reduce_mod_x(&self) -> Result<PolyMap> {
        let mut out = PolyMap::identity();
        for (v, img) in &self.images {
            if *v == Var::X {
                // x itself is sent to 0 in the residue ring; keep the tuple on the other generators.
                continue;
            }
            out.set(*v, img.reduce_mod_x(1)?);
        }
        Ok(out)
    }

    /// Evaluates every image at `point`; the result is the image point.
    pub fn eval_at(&self, point: &Point) -> Result<Point> {
        let mut out = Point::new();
        for v in Var::ALL {
            if let Some(val) = point.get(&v) {
                let nv = match self.images.get(&v) {
                    Some(img) => img.eval(point)?,
                    None => val.clone(),
                };
                out.insert(v, nv);
            }
        }
        Ok(out)
    }

    /// If the map moves exactly one of `vars`, by a summand free of it,
    /// returns that variable.
    pub fn elementary_var(&self, vars: &[Var]) -> Option<Var> {
        let moved: Vec<Var> = vars.iter().copied().filter(|v| !self.fixes(&[*v])).collect();
        if self.images.keys().any(|k| !vars.contains(k)) {
            return None;
        }
        match moved.as_slice() {
            [v] => {
                let shift = &self.image(*v) - &MultiPoly::var(*v);
                shift.is_free_of(*v).then_some(*v)
            }
            _ => None,
        }
    }
}

fn minor(
    m: &[Vec<MultiPoly>],
    row: usize,
    cols: u32,
    memo: &mut FxHashMap<(usize, u32), MultiPoly>,
) -> MultiPoly {
    if row == m.len() {
        return MultiPoly::one();
    }
    if let Some(r) = memo.get(&(row, cols)) {
        return r.clone();
    }
    let mut acc = MultiPoly::zero();
    let mut sign_pos = true;
    for j in 0..m.len() {
        if cols & (1 << j) == 0 {
            continue;
        }
        let entry = &m[row][j];
        if !entry.is_zero() {
            let sub = minor(m, row + 1, cols & !(1 << j), memo);
            let prod = entry * &sub;
            acc = if sign_pos { &acc + &prod } else { &acc - &prod };
        }
        sign_pos = !sign_pos;
    }
    memo.insert((row, cols), acc.clone());
    acc
}

/// True iff `f ∘ g` and `g ∘ f` both fix every listed variable.
pub fn verify_inverse_pair(f: &PolyMap, g: &PolyMap, vars: &[Var]) -> bool {
    let fg = f.compose(g);
    let gf = g.compose(f);
    matches!((fg, gf), (Ok(a), Ok(b)) if a.fixes(vars) && b.fixes(vars))
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.images.is_empty() {
            return f.write_str("(identity)");
        }
        let parts: Vec<String> = self
            .images
            .iter()
            .map(|(v, p)| format!("{} -> {}", v, p))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMap{}", self)
    }
}

/// Surfaces `NotIntegral` for maps whose listed images have negative x powers.
pub fn require_integral(m: &PolyMap, vars: &[Var]) -> Result<()> {
    if m.is_integral_map(vars, true) {
        Ok(())
    } else {
        Err(Error::NotIntegral)
    }
}
