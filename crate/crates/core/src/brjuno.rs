//! The Yoccoz–Brjuno function `Y(θ) = Σ θ₀⋯θ_{n−1} log(1/θ_n)` and the
//! Brjuno sum `B(θ) = Σ log(q_{n+1})/q_n`, both with certified truncation
//! tails.

use rug::Integer;
use serde::Serialize;

use crate::cfrac::{cf_expand, convergents, Angle, CFExpansion, Convergents};
use crate::{Error, Result};

/// Whether a Brjuno-type sum converged, diverged, or could not be decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumStatus {
    Finite,
    /// Rational angle.
    Infinite,
    /// Real angle whose stored precision ran out before the requested depth.
    Undecidable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrjunoValue {
    /// Partial sum (`+∞` when `status` is `Infinite`).
    pub value: f64,
    /// The true value lies in `[value, value + tail_bound]`.
    pub tail_bound: f64,
    pub depth_used: usize,
    pub status: SumStatus,
    /// Upper bound assumed for all partial quotients beyond the computed
    /// depth (exact for quadratic angles).
    pub quotient_cap: f64,
}

impl BrjunoValue {
    fn infinite(depth_used: usize) -> Self {
        BrjunoValue { value: f64::INFINITY, tail_bound: 0.0, depth_used, status: SumStatus::Infinite, quotient_cap: f64::INFINITY }
    }

    pub fn is_finite(&self) -> bool {
        self.status == SumStatus::Finite
    }

    /// Midpoint of the certified interval.
    pub fn midpoint(&self) -> f64 {
        self.value + 0.5 * self.tail_bound
    }
}

/// `ln q` for arbitrarily large `q`.
pub(crate) fn ln_integer(q: &Integer) -> f64 {
    let (mantissa, exp) = q.to_f64_exp();
    mantissa.ln() + f64::from(exp) * std::f64::consts::LN_2
}

/// Cap on partial quotients beyond the computed depth.
fn quotient_cap(theta: &Angle, cf: &CFExpansion) -> Result<f64> {
    Ok(match theta {
        Angle::Quadratic(_) => match cf.quotient_sup() {
            Some(a) => a.to_f64(),
            None => full_period(theta)?.quotient_sup().expect("period found").to_f64(),
        },
        // accepted iterates stay above 2^{-bits/2}, hence a_{n+1} ≤ 2^{bits/2}
        Angle::Real(x) => 2f64.powf(f64::from(x.bits) / 2.0),
        Angle::Rational(_) => f64::INFINITY,
    })
}

/// Expansion of a quadratic angle deep enough to contain its period.
fn full_period(theta: &Angle) -> Result<CFExpansion> {
    let mut depth = 16;
    loop {
        let cf = cf_expand(theta, depth)?;
        if cf.period.is_some() {
            return Ok(cf);
        }
        depth *= 2;
        if depth > 1 << 20 {
            return Err(Error::PrecisionExhausted { required_bits: 0, detail: "period not found".into() });
        }
    }
}

/// `Σ_{n≥N} 1/q_n ≤ 2/q_N + 2/q_{N+1}`, from `q_{n+2} ≥ 2 q_n`.
fn reciprocal_tail(conv: &Convergents, n: usize) -> f64 {
    let q_n = conv.q(n).to_f64();
    let q_next = if n + 1 < conv.len() { conv.q(n + 1).to_f64() } else { q_n };
    2.0 / q_n + 2.0 / q_next
}

/// `Σ_{n≥N} log(q_n)/q_n` majorized through `q_{N+2k}, q_{N+2k+1} ≥ 2^k q_N`
/// and the smallest nonincreasing majorant of `x ↦ log(x)/x`.
fn log_over_q_tail(q_n: &Integer) -> f64 {
    let majorant = |x: f64| if x >= std::f64::consts::E { x.ln() / x } else { 1.0 / std::f64::consts::E };
    let (mantissa, exp) = q_n.to_f64_exp();
    let mut total = 0.0;
    for k in 0..2000u32 {
        // x = 2^k q_N evaluated in log space to avoid overflow
        let ln_x = mantissa.ln() + f64::from(exp + k) * std::f64::consts::LN_2;
        let term = if ln_x > 1.0 { ln_x * (-ln_x).exp() } else { majorant(ln_x.exp()) };
        total += 2.0 * term;
        if term < 1e-300 || (k > 64 && term < total * 1e-18) {
            break;
        }
    }
    total
}

fn expansion(theta: &Angle, depth: usize) -> Result<Option<CFExpansion>> {
    match cf_expand(theta, depth) {
        Ok(cf) => Ok(Some(cf)),
        Err(Error::DegenerateAngle) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `Y(θ)` truncated after `depth` terms, with the tail bound
/// `log(A+1)·Σ_{n≥N} 1/q_n` where `A` caps all later partial quotients.
pub fn yoccoz_y(theta: &Angle, depth: usize) -> Result<BrjunoValue> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    let theta = theta.frac();
    if theta.is_rational() {
        return Ok(BrjunoValue::infinite(0));
    }
    let Some(cf) = expansion(&theta, depth)? else {
        return Ok(BrjunoValue::infinite(0));
    };
    let orbit = cf.orbit_f64();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut beta = 1.0;
    for &t in &orbit {
        // Neumaier summation; terms shrink geometrically but the first few
        // dominate
        let term = beta * (-t.ln());
        let s = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - s) + term;
        } else {
            comp += (term - s) + sum;
        }
        sum = s;
        beta *= t;
    }
    let value = sum + comp;
    let n = cf.len();
    let conv = convergents(&cf);
    let cap = quotient_cap(&theta, &cf)?;
    let tail = (cap + 1.0).ln() * reciprocal_tail(&conv, n);
    let status = if cf.precision_exhausted && n < depth { SumStatus::Undecidable } else { SumStatus::Finite };
    Ok(BrjunoValue { value, tail_bound: tail, depth_used: n, status, quotient_cap: cap })
}

/// `B(θ) = Σ_{n<N} log(q_{n+1})/q_n` with tail
/// `Σ_{n≥N} (log q_n + log(A+1))/q_n`.
pub fn brjuno_b(theta: &Angle, depth: usize) -> Result<BrjunoValue> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    let theta = theta.frac();
    if theta.is_rational() {
        return Ok(BrjunoValue::infinite(0));
    }
    let Some(cf) = expansion(&theta, depth)? else {
        return Ok(BrjunoValue::infinite(0));
    };
    let conv = convergents(&cf);
    let n = cf.len();
    let value: f64 = (0..n).map(|i| ln_integer(conv.q(i + 1)) / conv.q(i).to_f64()).sum();
    let cap = quotient_cap(&theta, &cf)?;
    let tail = log_over_q_tail(conv.q(n)) + (cap + 1.0).ln() * reciprocal_tail(&conv, n);
    let status = if cf.precision_exhausted && n < depth { SumStatus::Undecidable } else { SumStatus::Finite };
    Ok(BrjunoValue { value, tail_bound: tail, depth_used: n, status, quotient_cap: cap })
}

/// Closed form of `Y` for a quadratic angle, summing the preperiod directly
/// and the periodic part as a geometric series.
pub fn yoccoz_y_periodic(theta: &Angle) -> Result<f64> {
    let theta = theta.frac();
    if !matches!(theta, Angle::Quadratic(_)) {
        return Err(Error::Precondition("closed form needs a quadratic angle".into()));
    }
    let cf = full_period(&theta)?;
    let (start, len) = cf.period.expect("checked");
    let orbit = cf.orbit_f64();
    let mut beta = 1.0;
    let mut pre = 0.0;
    for &t in &orbit[..start] {
        pre += beta * (-t.ln());
        beta *= t;
    }
    let mut cycle = 0.0;
    let mut cycle_beta = 1.0;
    for &t in &orbit[start..start + len] {
        cycle += cycle_beta * (-t.ln());
        cycle_beta *= t;
    }
    Ok(pre + beta * cycle / (1.0 - cycle_beta))
}

/// `Y(θ) − Y(mθ)`, the quantity bounded by `C log m` in the multiplication
/// lemma. The comparison constant is left to the caller.
pub fn lemma_gap(theta: &Angle, m: u64, depth: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Precondition("multiplier must be positive".into()));
    }
    let y = yoccoz_y(theta, depth)?;
    let ym = yoccoz_y(&theta.mul_mod1(m)?, depth)?;
    match (y.status, ym.status) {
        (SumStatus::Finite, SumStatus::Finite) => Ok(y.midpoint() - ym.midpoint()),
        (SumStatus::Infinite, _) | (_, SumStatus::Infinite) => {
            Err(Error::Precondition("lemma gap needs an irrational angle".into()))
        }
        _ => Err(Error::PrecisionExhausted {
            required_bits: 0,
            detail: "Brjuno sum undecidable at the stored precision".into(),
        }),
    }
}
