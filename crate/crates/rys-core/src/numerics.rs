//! Extended-precision scalar arithmetic and the special functions the rest of
//! the crate consumes.
//!
//! The scalar type [`XReal`] is a software big-float carrying a decimal-digit
//! precision tag `d` (default 50, minimum 30). Arithmetic between two values
//! propagates the larger precision. Conversion to `f64` is a single correct
//! rounding of the extended value.
//!
//! The special functions are implemented from scratch on top of the scalar
//! type: `log_gamma` uses the Spouge approximation with runtime-generated
//! coefficients, `kummer_1f1_neg` evaluates ₁F₁(a;b;−z) through the Kummer
//! transformation so that every summed term is positive, and
//! `gauss_2f1_trunc` is a plain ₂F₁ partial sum with a last-term error
//! estimate.

use crate::error::{Result, RysError};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use std::cmp::Ordering;
use std::f64::consts::LOG2_10;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Minimum supported decimal precision.
pub const MIN_DIGITS: u32 = 30;
/// Default decimal precision.
pub const DEFAULT_DIGITS: u32 = 50;

/// Guard bits added beyond the bits strictly needed for `d` decimal digits.
const GUARD_BITS: u32 = 16;

/// Binary precision backing a decimal-digit request.
fn bits_for(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
}

/// Extended-precision real number with a decimal-digit precision tag.
#[derive(Debug, Clone)]
pub struct XReal {
    f: Float,
    digits: u32,
}

impl XReal {
    /// Zero at `digits` decimal digits of precision.
    pub fn zero(digits: u32) -> Self {
        XReal {
            f: Float::with_val(bits_for(digits), 0),
            digits,
        }
    }

    /// Exact embedding of a double; `digits ≥ 30` always exceeds the 53 bits
    /// of the input, so no rounding occurs.
    pub fn from_f64(v: f64, digits: u32) -> Self {
        XReal {
            f: Float::with_val(bits_for(digits), v),
            digits,
        }
    }

    /// Exact embedding of an integer.
    pub fn from_i64(v: i64, digits: u32) -> Self {
        XReal {
            f: Float::with_val(bits_for(digits), v),
            digits,
        }
    }

    /// π at the requested precision.
    pub fn pi(digits: u32) -> Self {
        XReal {
            f: Float::with_val(bits_for(digits), Constant::Pi),
            digits,
        }
    }

    fn wrap(f: Float, digits: u32) -> Self {
        XReal { f, digits }
    }

    /// The decimal-digit precision tag.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Round the extended value to the nearest double.
    pub fn to_f64(&self) -> f64 {
        self.f.to_f64()
    }

    /// Re-round to a (typically lower) precision tag.
    pub fn to_digits(&self, digits: u32) -> Self {
        XReal {
            f: Float::with_val(bits_for(digits), &self.f),
            digits,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.f.is_finite()
    }

    /// Sign of the value: `Greater`, `Equal` or `Less` versus zero.
    pub fn sign(&self) -> Ordering {
        self.f.cmp0().unwrap_or(Ordering::Equal)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.abs_ref()), self.digits)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.sqrt_ref()), self.digits)
    }

    pub fn square(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.square_ref()), self.digits)
    }

    /// Pointwise maximum (total on finite values; NaN propagates).
    pub fn max(&self, other: &Self) -> Self {
        if self.f >= other.f {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn exp(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.exp_ref()), self.digits)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.ln_ref()), self.digits)
    }

    /// ln(1 + x), accurate near x = 0.
    pub fn ln_1p(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.ln_1p_ref()), self.digits)
    }

    pub fn cosh(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.cosh_ref()), self.digits)
    }

    pub fn sinh(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.sinh_ref()), self.digits)
    }

    pub fn tanh(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.tanh_ref()), self.digits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), self.f.recip_ref()), self.digits)
    }

    /// Integer power (exact exponent).
    pub fn powi(&self, e: i32) -> Self {
        Self::wrap(Float::with_val(self.f.prec(), (&self.f).pow(e)), self.digits)
    }

    /// 10^e at this value's precision tag — handy for tolerances.
    pub fn pow10(e: i32, digits: u32) -> Self {
        XReal::wrap(Float::with_val(bits_for(digits), Float::with_val(bits_for(digits), 10).pow(e)), digits)
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.*e}", self.digits as usize, self.f)
    }
}

impl PartialEq for XReal {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
    }
}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.f.partial_cmp(&other.f)
    }
}

macro_rules! impl_binop {
    ($Trait:ident, $method:ident) => {
        impl $Trait<&XReal> for &XReal {
            type Output = XReal;
            fn $method(self, rhs: &XReal) -> XReal {
                let digits = self.digits.max(rhs.digits);
                let prec = self.f.prec().max(rhs.f.prec());
                XReal::wrap(Float::with_val(prec, $Trait::$method(&self.f, &rhs.f)), digits)
            }
        }
        impl $Trait<XReal> for &XReal {
            type Output = XReal;
            fn $method(self, rhs: XReal) -> XReal {
                $Trait::$method(self, &rhs)
            }
        }
        impl $Trait<&XReal> for XReal {
            type Output = XReal;
            fn $method(self, rhs: &XReal) -> XReal {
                $Trait::$method(&self, rhs)
            }
        }
        impl $Trait<XReal> for XReal {
            type Output = XReal;
            fn $method(self, rhs: XReal) -> XReal {
                $Trait::$method(&self, &rhs)
            }
        }
        impl $Trait<f64> for &XReal {
            type Output = XReal;
            fn $method(self, rhs: f64) -> XReal {
                XReal::wrap(
                    Float::with_val(self.f.prec(), $Trait::$method(&self.f, rhs)),
                    self.digits,
                )
            }
        }
        impl $Trait<f64> for XReal {
            type Output = XReal;
            fn $method(self, rhs: f64) -> XReal {
                $Trait::$method(&self, rhs)
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl Neg for &XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        XReal::wrap(Float::with_val(self.f.prec(), -&self.f), self.digits)
    }
}

impl Neg for XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        -&self
    }
}

/// Precision context: a tiny factory for constants at a fixed digit count,
/// keeping formula code free of repeated precision plumbing.
#[derive(Debug, Clone, Copy)]
pub struct Prec(pub u32);

impl Prec {
    pub fn f(&self, v: f64) -> XReal {
        XReal::from_f64(v, self.0)
    }
    pub fn i(&self, v: i64) -> XReal {
        XReal::from_i64(v, self.0)
    }
    pub fn zero(&self) -> XReal {
        XReal::zero(self.0)
    }
    pub fn one(&self) -> XReal {
        XReal::from_i64(1, self.0)
    }
    pub fn pi(&self) -> XReal {
        XReal::pi(self.0)
    }
    /// 10^e, for tolerance thresholds.
    pub fn pow10(&self, e: i32) -> XReal {
        XReal::pow10(e, self.0)
    }
}

/// ln Γ(x) for x > 0 by the Spouge approximation.
///
/// The parameter `a` and the coefficients are generated at runtime from the
/// requested precision; the sum is evaluated with extra guard bits because
/// its terms are exponentially larger than the result for moderate x.
/// Relative error is below 10^(2−d) by a wide margin.
pub fn log_gamma(x: &XReal) -> Result<XReal> {
    if !x.is_positive() || !x.is_finite() {
        return Err(RysError::Domain(format!(
            "log_gamma requires x > 0, got {}",
            x.to_f64()
        )));
    }
    let d = x.digits();
    // Spouge error ~ (2π)^(−a−1/2); a = ceil(1.3 (d+6)) pushes it beyond d+5
    // decimal digits.
    let a = (1.3 * (d as f64 + 6.0)).ceil() as u32;
    // The alternating coefficient sum cancels roughly a·log10(e) decimal
    // digits; work with that many extra bits.
    let guard_bits = bits_for(d) + (1.5 * a as f64).ceil() as u32 + 32;
    let g = Prec(d + (guard_bits as f64 / LOG2_10) as u32 + 1);

    let xg = XReal::wrap(Float::with_val(guard_bits, &x.f), g.0);

    // Spouge for Γ(x+1):
    //   Γ(x+1) = (x+a)^(x+1/2) e^(−x−a) [√(2π) + Σ_{k=1}^{a−1} c_k/(x+k)]
    //   c_k = (−1)^(k−1) (a−k)^(k−1/2) e^(a−k) / (k−1)!
    // then ln Γ(x) = ln Γ(x+1) − ln x.
    let two_pi = g.f(2.0) * XReal::pi(g.0);
    let mut sum = two_pi.sqrt();
    let mut ln_fact = g.zero(); // ln (k−1)!
    for k in 1..a {
        if k >= 2 {
            ln_fact = ln_fact + g.i(k as i64 - 1).ln();
        }
        let amk = g.i(a as i64 - k as i64);
        // |c_k| = exp((k−1/2) ln(a−k) + (a−k) − ln (k−1)!)
        let ln_ck = (g.f(k as f64 - 0.5) * amk.ln()) + amk.clone() - &ln_fact;
        let ck = ln_ck.exp();
        let term = ck / (&xg + k as f64);
        if k % 2 == 1 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    let xa = &xg + a as f64;
    let ln_gamma_xp1 = (&xg + 0.5) * xa.ln() - xa + sum.ln();
    let r = ln_gamma_xp1 - xg.ln();
    Ok(r.to_digits(d))
}

/// ₁F₁(a; b; −z) for b > a > 0 and z ≥ 0, via the Kummer transformation
/// ₁F₁(a;b;−z) = e^(−z)·₁F₁(b−a;b;z), whose series has only non-negative
/// terms — no cancellation.
///
/// Truncation: a term below 10^(−d−5) relative to the partial sum stops the
/// series; a hard cap of 10·(z+|a|+|b|+50) terms guards against stalls.
pub fn kummer_1f1_neg(a: &XReal, b: &XReal, z: &XReal) -> Result<XReal> {
    if !(b > a) || !a.is_positive() {
        return Err(RysError::Domain(format!(
            "kummer_1f1_neg requires b > a > 0, got a={}, b={}",
            a.to_f64(),
            b.to_f64()
        )));
    }
    if z.is_negative() {
        return Err(RysError::Domain(format!(
            "kummer_1f1_neg requires z >= 0, got z={}",
            z.to_f64()
        )));
    }
    let d = a.digits().max(b.digits()).max(z.digits());
    let p = Prec(d);
    let threshold = p.pow10(-(d as i32) - 5);
    let cap = (10.0 * (z.to_f64() + a.to_f64().abs() + b.to_f64().abs() + 50.0)).ceil() as usize;

    let ba = b - a; // > 0
    let mut term = p.one();
    let mut sum = p.one();
    let mut converged = false;
    for k in 0..cap {
        let kf = k as f64;
        // t_{k+1} = t_k · (b−a+k)·z / ((b+k)(k+1))
        term = term * (&ba + kf) * z / ((b + kf) * (kf + 1.0));
        assert!(
            !term.is_negative(),
            "positive-term invariant violated in kummer_1f1_neg"
        );
        sum = sum + &term;
        if term < &threshold * &sum {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RysError::NonConvergence(format!(
            "kummer_1f1_neg series exceeded {} terms (a={}, b={}, z={})",
            cap,
            a.to_f64(),
            b.to_f64(),
            z.to_f64()
        )));
    }
    Ok((-z).exp() * sum)
}

/// N-term partial sum of ₂F₁(a,b;c;x) together with the magnitude of the last
/// included term as a truncation-error estimate.
#[derive(Debug, Clone)]
pub struct TwoF1Partial {
    pub value: XReal,
    /// |last included term|; an error estimate, not a bound.
    pub last_term: XReal,
}

/// Partial sum of the Gauss hypergeometric series, valid for |x| < 1, c > 0.
pub fn gauss_2f1_trunc(a: &XReal, b: &XReal, c: &XReal, x: &XReal, n: usize) -> Result<TwoF1Partial> {
    if x.abs() >= XReal::from_i64(1, x.digits()) {
        return Err(RysError::Domain(format!(
            "gauss_2f1_trunc requires |x| < 1, got x={}",
            x.to_f64()
        )));
    }
    if !c.is_positive() {
        return Err(RysError::Domain(format!(
            "gauss_2f1_trunc requires c > 0, got c={}",
            c.to_f64()
        )));
    }
    if n < 1 {
        return Err(RysError::Domain("gauss_2f1_trunc requires N >= 1".into()));
    }
    let d = a.digits().max(b.digits()).max(c.digits()).max(x.digits());
    let p = Prec(d);
    let mut term = p.one();
    let mut sum = p.one();
    for k in 0..(n - 1) {
        let kf = k as f64;
        term = term * (a + kf) * (b + kf) * x / ((c + kf) * (kf + 1.0));
        sum = sum + &term;
    }
    Ok(TwoF1Partial {
        last_term: term.abs(),
        value: sum,
    })
}

/// Tanh-sinh (double-exponential) quadrature of `f` over the finite interval
/// `(lo, hi)`, with level doubling until two successive levels agree to
/// 10^(−target_digits) relative. Used as an integration oracle for smooth
/// integrands; the moments module carries its own specialization for the
/// endpoint-singular weight.
pub fn tanh_sinh<F: Fn(&XReal) -> XReal>(
    f: F,
    lo: f64,
    hi: f64,
    digits: u32,
    target_digits: u32,
) -> Result<XReal> {
    let p = Prec(digits);
    let half_pi = p.pi() * 0.5;
    let lo_x = p.f(lo);
    let hi_x = p.f(hi);
    let center = (&lo_x + &hi_x) * 0.5;
    let halfwidth = (&hi_x - &lo_x) * 0.5;
    // nodes x = c + (w/2)·tanh((π/2)sinh u), jacobian
    // (w/2)·(π/2)cosh(u)/cosh²((π/2)sinh u). Each node is formed as an offset
    // from its endpoint through 1−tanh = 2/(1+e^{2w}), which carries full
    // relative precision; an integrable singularity at an endpoint that is
    // exactly zero therefore costs no digits.
    let pair = |u: &XReal| -> XReal {
        let w = &half_pi * u.sinh();
        let sech = w.cosh().recip();
        let tm = p.f(2.0) / ((&w * 2.0).exp() + 1.0);
        let jac = &halfwidth * &half_pi * u.cosh() * sech.square();
        let x_hi = &hi_x - &halfwidth * &tm;
        let x_lo = &lo_x + &halfwidth * &tm;
        (f(&x_hi) + f(&x_lo)) * jac
    };
    let cutoff = p.pow10(-(digits as i32) - 10);
    // trapezoid sum at spacing h over u, extending outward until the terms
    // underflow the cutoff relative to the running sum
    let mut h = 0.25f64;
    let mut level_sum = {
        let mut s = f(&center) * &halfwidth * &half_pi;
        let mut k = 1usize;
        loop {
            let u = p.f(h * k as f64);
            let t = pair(&u);
            // a non-finite term means the node rounded onto a singular
            // endpoint; the double-exponential tail is below the cutoff there
            if !t.is_finite() {
                break;
            }
            s = s + &t;
            if t.abs() < &cutoff * s.abs() && k as f64 * h > 3.0 {
                break;
            }
            if k > 20_000 {
                return Err(RysError::OracleDivergence(
                    "tanh-sinh level sum did not decay".into(),
                ));
            }
            k += 1;
        }
        s * p.f(h)
    };
    // halve h, reusing the previous sum: new nodes are odd multiples of h/2
    for _level in 0..14 {
        let h2 = h / 2.0;
        let mut odd = p.zero();
        let mut k = 0usize;
        loop {
            let u = p.f(h2 * (2 * k + 1) as f64);
            let t = pair(&u);
            if !t.is_finite() {
                break;
            }
            odd = odd + &t;
            if t.abs() < &cutoff * (odd.abs() + level_sum.abs()) && (2 * k + 1) as f64 * h2 > 3.0 {
                break;
            }
            if k > 40_000 {
                return Err(RysError::OracleDivergence(
                    "tanh-sinh refinement did not decay".into(),
                ));
            }
            k += 1;
        }
        let refined = level_sum.clone() * 0.5 + odd * p.f(h2);
        let agree = (&refined - &level_sum).abs();
        let tol = p.pow10(-(target_digits as i32)) * refined.abs();
        level_sum = refined;
        h = h2;
        if agree <= tol {
            return Ok(level_sum);
        }
    }
    Err(RysError::OracleDivergence(format!(
        "tanh-sinh did not reach {} digits under level doubling",
        target_digits
    )))
}
