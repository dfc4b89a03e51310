//! Exact continued fractions: Gauss-map orbits, convergents, and arithmetic
//! on angles modulo 1.

mod angle;
mod surd;

pub use angle::{Angle, RealAngle, MAX_EXACT_BITS};
pub use surd::QuadraticSurd;

use std::collections::HashMap;

use rug::{Integer, Rational};

use crate::{Error, Result};

/// Default number of partial quotients.
pub const DEFAULT_DEPTH: usize = 64;

/// Continued-fraction expansion `θ₀ = [0; a₁, a₂, …]` together with its
/// Gauss-map orbit `θ_{n+1} = frac(1/θ_n)`.
#[derive(Clone, Debug)]
pub struct CFExpansion {
    /// `a₁, a₂, …`
    pub partial_quotients: Vec<Integer>,
    /// `θ₀, θ₁, …` (one entry per partial quotient); real angles store the
    /// interval centers.
    pub gauss_orbit: Vec<Angle>,
    /// True iff the angle is rational and the expansion is complete.
    pub terminated: bool,
    /// For real angles: the stored precision ran out before `depth`.
    pub precision_exhausted: bool,
    /// For quadratic angles: `(start, length)` of the period of the orbit,
    /// when it was reached within the computed depth.
    pub period: Option<(usize, usize)>,
}

impl CFExpansion {
    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    /// Orbit values as `f64` (full relative precision, no cancellation).
    pub fn orbit_f64(&self) -> Vec<f64> {
        self.gauss_orbit.iter().map(Angle::to_f64).collect()
    }

    /// Largest partial quotient that can ever occur, if known: for a
    /// quadratic angle with detected period this is the maximum over the
    /// whole (infinite) expansion.
    pub fn quotient_sup(&self) -> Option<Integer> {
        let (start, len) = self.period?;
        self.partial_quotients[start..start + len].iter().max().cloned()
    }
}

/// Expands `frac(θ)` to `depth` partial quotients (or until termination).
///
/// Rationals use the Euclidean algorithm, quadratic irrationals use exact
/// surd arithmetic (and record the period once the orbit repeats), real
/// angles propagate their error interval and stop as soon as a partial
/// quotient is no longer determined, or an iterate drops below `2^{-bits/2}`.
pub fn cf_expand(theta: &Angle, depth: usize) -> Result<CFExpansion> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    let theta = theta.frac();
    if theta.is_zero_mod1() {
        return Err(Error::DegenerateAngle);
    }
    match theta {
        Angle::Rational(r) => Ok(expand_rational(r, depth)),
        Angle::Quadratic(s) => Ok(expand_quadratic(s, depth)),
        Angle::Real(x) => Ok(expand_real(x, depth)),
    }
}

fn expand_rational(mut x: Rational, depth: usize) -> CFExpansion {
    let mut quotients = Vec::new();
    let mut orbit = Vec::new();
    let mut terminated = false;
    while quotients.len() < depth {
        orbit.push(Angle::Rational(x.clone()));
        let (fract, a) = x.recip().fract_floor(Integer::new());
        quotients.push(a);
        if fract == 0 {
            terminated = true;
            break;
        }
        x = fract;
    }
    CFExpansion { partial_quotients: quotients, gauss_orbit: orbit, terminated, precision_exhausted: false, period: None }
}

fn expand_quadratic(mut x: QuadraticSurd, depth: usize) -> CFExpansion {
    let mut quotients = Vec::with_capacity(depth);
    let mut orbit = Vec::with_capacity(depth);
    let mut seen: HashMap<QuadraticSurd, usize> = HashMap::new();
    let mut period = None;
    while quotients.len() < depth {
        if period.is_none() {
            if let Some(&start) = seen.get(&x) {
                period = Some((start, quotients.len() - start));
            } else {
                seen.insert(x.clone(), quotients.len());
            }
        }
        let inv = x.recip();
        let a = inv.floor();
        let next = inv.sub_integer(&a);
        orbit.push(Angle::Quadratic(x));
        quotients.push(a);
        x = next;
    }
    if period.is_none() {
        // one more step may close the cycle exactly at the depth boundary
        if let Some(&start) = seen.get(&x) {
            period = Some((start, quotients.len() - start));
        }
    }
    CFExpansion { partial_quotients: quotients, gauss_orbit: orbit, terminated: false, precision_exhausted: false, period }
}

fn expand_real(x: RealAngle, depth: usize) -> CFExpansion {
    let eps = Rational::from((1, Integer::from(1) << x.bits));
    let mut lo = Rational::from(&x.center - &eps);
    let mut hi = Rational::from(&x.center + &eps);
    let mut center = x.center.clone();
    let floor_threshold = Rational::from((1, Integer::from(1) << (x.bits / 2)));
    let mut quotients = Vec::new();
    let mut orbit = Vec::new();
    let mut exhausted = false;
    while quotients.len() < depth {
        if lo <= 0 || hi >= 1 || center < floor_threshold {
            exhausted = true;
            break;
        }
        let (lo_f, a_hi) = lo.clone().recip().fract_floor(Integer::new());
        let (hi_f, a_lo) = hi.clone().recip().fract_floor(Integer::new());
        if a_hi != a_lo {
            exhausted = true;
            break;
        }
        let (c_f, _) = center.clone().recip().fract_floor(Integer::new());
        orbit.push(Angle::Real(RealAngle { center: center.clone(), bits: x.bits }));
        quotients.push(a_lo);
        // x ↦ 1/x − a reverses the order of the endpoints
        lo = hi_f;
        hi = lo_f;
        center = c_f;
    }
    CFExpansion { partial_quotients: quotients, gauss_orbit: orbit, terminated: false, precision_exhausted: exhausted, period: None }
}

/// Convergents `p_n/q_n`, `n = 0..=k`, with `p₀/q₀ = 0/1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Convergents {
    pub pairs: Vec<(Integer, Integer)>,
}

impl Convergents {
    pub fn p(&self, n: usize) -> &Integer {
        &self.pairs[n].0
    }
    pub fn q(&self, n: usize) -> &Integer {
        &self.pairs[n].1
    }
    pub fn len(&self) -> usize {
        self.pairs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
    pub fn as_rational(&self, n: usize) -> Rational {
        Rational::from((self.pairs[n].0.clone(), self.pairs[n].1.clone()))
    }
    pub fn contains(&self, r: &Rational) -> bool {
        self.pairs.iter().any(|(p, q)| r.numer() == p && r.denom() == q)
    }
}

/// `p_n = a_n p_{n−1} + p_{n−2}`, `q_n = a_n q_{n−1} + q_{n−2}` from
/// `(p_{−1}, q_{−1}) = (1, 0)` and `(p₀, q₀) = (0, 1)`.
pub fn convergents(cf: &CFExpansion) -> Convergents {
    let mut pairs = Vec::with_capacity(cf.len() + 1);
    let (mut pm, mut qm) = (Integer::from(1), Integer::new());
    let (mut p, mut q) = (Integer::new(), Integer::from(1));
    pairs.push((p.clone(), q.clone()));
    for a in &cf.partial_quotients {
        let pn = Integer::from(a * &p) + &pm;
        let qn = Integer::from(a * &q) + &qm;
        pm = std::mem::replace(&mut p, pn);
        qm = std::mem::replace(&mut q, qn);
        pairs.push((p.clone(), q.clone()));
    }
    Convergents { pairs }
}

/// `F₀ = 0, F₁ = 1, …` up to and including `F_n`.
pub fn fibonacci(n: usize) -> Vec<Integer> {
    let mut f = vec![Integer::new(), Integer::from(1)];
    while f.len() <= n {
        let next = Integer::from(&f[f.len() - 1] + &f[f.len() - 2]);
        f.push(next);
    }
    f.truncate(n + 1);
    f
}

/// `frac(nθ)` at `bits` bits of relative precision.
pub fn angle_reduce(theta: &Angle, n: u64, bits: u32) -> Result<rug::Float> {
    theta.reduce(n, bits)
}
