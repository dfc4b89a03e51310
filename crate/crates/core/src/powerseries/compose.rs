//! Truncated power-series arithmetic by direct expansion: products,
//! composition, reciprocal and reversion. Used as an oracle independent of
//! the linearizer, and to build conjugate germs `h∘R_θ∘h⁻¹`.

use num_complex::Complex64;
use rug::Complex;

use super::germ::{multiplier, GermSeries};
use crate::cfrac::Angle;
use crate::{Error, Result};

/// Field operations needed by the series routines.
pub trait SeriesScalar: Clone {
    /// Zero with the same precision as `self`.
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn div_u(&self, m: u32) -> Self;
    fn add_assign(&mut self, o: &Self);
    fn sub_assign(&mut self, o: &Self);
}

impl SeriesScalar for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn div_u(&self, m: u32) -> Self {
        self / f64::from(m)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
}

impl SeriesScalar for Complex {
    fn zero_like(&self) -> Self {
        Complex::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Complex::with_val(self.prec(), 1)
    }
    fn is_zero(&self) -> bool {
        Complex::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self / o)
    }
    fn div_u(&self, m: u32) -> Self {
        Complex::with_val(self.prec(), self / m)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
}

fn template<T: SeriesScalar>(a: &[T]) -> Result<T> {
    a.first().map(T::zero_like).ok_or_else(|| Error::Precondition("empty coefficient sequence".into()))
}

/// `a·b` truncated to degree `n`.
pub fn mul_trunc<T: SeriesScalar>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let zero = a.first().or(b.first()).map(T::zero_like);
    let Some(zero) = zero else { return Vec::new() };
    let mut out = vec![zero; n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j].add_assign(&x.mul(y));
            }
        }
    }
    out
}

/// Coefficients of `outer∘inner` through degree `n`, by accumulating the
/// powers `inner^k` one multiplication at a time.
pub fn compose_oracle<T: SeriesScalar>(outer: &[T], inner: &[T], n: usize) -> Result<Vec<T>> {
    let zero = template(inner)?;
    if !inner[0].is_zero() {
        return Err(Error::Precondition("inner series must vanish at 0".into()));
    }
    let mut out = vec![zero.clone(); n + 1];
    if let Some(a0) = outer.first() {
        out[0] = a0.clone();
    }
    let mut power = vec![zero.one_like()];
    for a in outer.iter().take(n + 1).skip(1) {
        power = mul_trunc(&power, inner, n);
        if a.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(&power) {
            o.add_assign(&a.mul(p));
        }
    }
    Ok(out)
}

/// `1/a` through degree `n`; `a[0] ≠ 0`.
pub fn series_inverse<T: SeriesScalar>(a: &[T], n: usize) -> Result<Vec<T>> {
    let zero = template(a)?;
    if a[0].is_zero() {
        return Err(Error::Precondition("series not invertible: zero constant term".into()));
    }
    let mut out = vec![zero; n + 1];
    out[0] = a[0].one_like().div(&a[0]);
    for k in 1..=n {
        let mut acc = a[0].zero_like();
        for j in 1..=k.min(a.len() - 1) {
            acc.add_assign(&a[j].mul(&out[k - j]));
        }
        let mut neg = acc.zero_like();
        neg.sub_assign(&acc.div(&a[0]));
        out[k] = neg;
    }
    Ok(out)
}

/// Compositional inverse `g` with `h(g(z)) = z` through degree `n`, via
/// Lagrange inversion `[z^m] g = (1/m)[w^{m−1}] (w/h(w))^m`.
pub fn revert<T: SeriesScalar>(h: &[T], n: usize) -> Result<Vec<T>> {
    let zero = template(h)?;
    if h.len() < 2 || !h[0].is_zero() || h[1].is_zero() {
        return Err(Error::Precondition("series must be z·(unit) to be reversible".into()));
    }
    // w/h(w) = 1/(h_1 + h_2 w + …)
    let shifted: Vec<T> = h[1..].to_vec();
    let phi = series_inverse(&shifted, n)?;
    let mut out = vec![zero.clone(); n + 1];
    let mut power = vec![zero.one_like()];
    for m in 1..=n {
        power = mul_trunc(&power, &phi, n - 1);
        out[m] = power[m - 1].div_u(m as u32);
    }
    Ok(out)
}

/// `f = h∘R_θ∘h⁻¹` through degree `n`, where `R_θ(z) = e^{2iπθ}z` and
/// `h = z + O(z²)` is given at the precision of its coefficients.
pub fn conjugate_germ(h: &[Complex], theta: &Angle, n: usize, source: impl Into<String>) -> Result<GermSeries> {
    let prec = template(h)?.prec().0;
    let lambda = multiplier(theta, prec)?;
    let g = revert(h, n)?;
    let rotated: Vec<Complex> = g.iter().map(|c| Complex::with_val(prec, c * &lambda)).collect();
    let mut f = compose_oracle(h, &rotated, n)?;
    f[1] = lambda;
    GermSeries::series(theta, f, prec, source)
}
