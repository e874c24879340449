//! Moments of the generalized Gauss-Rys functional.
//!
//! The weight is (1−x²)^(λ−1/2)·e^(−zx²) on (−1,1) with λ > −1/2 and z ≥ 0.
//! Every even moment has the closed form
//!
//! ```text
//! s_{2n} = Γ(n+1/2)·Γ(λ+1/2)/Γ(λ+n+1) · ₁F₁(n+1/2; λ+n+1; −z),
//! ```
//!
//! odd moments vanish by symmetry. Moments are always computed from the
//! closed form — the three-term moment recurrence loses digits when run
//! forward and is therefore demoted to a residual check. An independent
//! tanh-sinh integration oracle cross-checks the closed form, handling the
//! endpoint singularity for λ < 1/2 by construction of the double-exponential
//! substitution.

use crate::error::{Result, RysError};
use crate::numerics::{kummer_1f1_neg, log_gamma, Prec, XReal, MIN_DIGITS};

/// Parameters of the weight (1−x²)^(λ−1/2)·e^(−zx²) plus working precision.
#[derive(Debug, Clone, Copy)]
pub struct WeightParams {
    /// Exponential rate z ≥ 0; z = 0 is the Gegenbauer limit.
    pub z: f64,
    /// Gegenbauer exponent parameter, λ > −1/2.
    pub lambda: f64,
    /// Working precision in decimal digits (≥ 30).
    pub digits: u32,
}

impl WeightParams {
    /// Validates λ > −1/2, z ≥ 0 and the minimum precision. Invalid λ is
    /// rejected here, at construction: the defining integral diverges.
    pub fn new(z: f64, lambda: f64, digits: u32) -> Result<Self> {
        if !(lambda > -0.5) || !lambda.is_finite() {
            return Err(RysError::Domain(format!(
                "lambda must be > -1/2, got {lambda}"
            )));
        }
        if !(z >= 0.0) || !z.is_finite() {
            return Err(RysError::Domain(format!("z must be >= 0, got {z}")));
        }
        if digits < MIN_DIGITS {
            return Err(RysError::Domain(format!(
                "precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        Ok(WeightParams { z, lambda, digits })
    }

    /// Precision context at this parameter set's digit count.
    pub fn prec(&self) -> Prec {
        Prec(self.digits)
    }

    pub fn z_x(&self) -> XReal {
        self.prec().f(self.z)
    }

    pub fn lambda_x(&self) -> XReal {
        self.prec().f(self.lambda)
    }

    /// True in the Gegenbauer limit z = 0.
    pub fn is_gegenbauer(&self) -> bool {
        self.z == 0.0
    }

    /// Pearson pair, first member: φ(x) = 1 − x².
    pub fn phi(&self, x: &XReal) -> XReal {
        self.prec().one() - x.square()
    }

    /// Pearson pair, second member: ψ(x) = (2z+2λ+1)x − 2zx³.
    /// Parameter combinations are formed in extended precision so that the
    /// exact binary values of z and λ are used, never a double-rounded sum.
    pub fn psi(&self, x: &XReal) -> XReal {
        let two_z = self.z_x() * 2.0;
        let coeff = self.lambda_x() * 2.0 + &two_z + 1.0;
        coeff * x - two_z * x.powi(3)
    }

    /// The weight function itself, evaluated without endpoint cancellation
    /// (used by diagnostics and tests; the oracle has its own node form).
    pub fn weight(&self, x: &XReal) -> XReal {
        let p = self.prec();
        let one_minus_x2 = p.one() - x.square();
        ((self.lambda_x() - 0.5) * one_minus_x2.ln() - self.z_x() * x.square()).exp()
    }
}

/// Even moments s₀, s₂, …, s_{2M} at extended precision.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub params: WeightParams,
    even: Vec<XReal>,
}

impl MomentTable {
    /// Largest stored index 2M.
    pub fn max_index(&self) -> usize {
        2 * (self.even.len() - 1)
    }

    /// Moment s_m for even m ≤ 2M. Odd indices are identically zero and never
    /// stored; asking for one is a caller bug.
    pub fn s(&self, m: usize) -> Result<&XReal> {
        if !m.is_multiple_of(2) {
            return Err(RysError::Domain(format!(
                "odd moment s_{m} is identically zero and not stored"
            )));
        }
        self.even.get(m / 2).ok_or_else(|| {
            RysError::IndexRange(format!("moment s_{m} beyond table (max {})", self.max_index()))
        })
    }

    pub fn s0(&self) -> &XReal {
        &self.even[0]
    }
}

/// Closed-form moment s_m for even m.
pub fn moment(params: &WeightParams, m: usize) -> Result<XReal> {
    if !m.is_multiple_of(2) {
        return Err(RysError::Domain(format!(
            "moment index must be even (odd moments vanish by parity), got {m}"
        )));
    }
    let n = (m / 2) as f64;
    let p = params.prec();
    let a = p.f(n + 0.5);
    let b = params.lambda_x() + p.f(n + 1.0);
    let ln_pref =
        log_gamma(&a)? + log_gamma(&(params.lambda_x() + 0.5))? - log_gamma(&b)?;
    let f11 = if params.is_gegenbauer() {
        p.one()
    } else {
        kummer_1f1_neg(&a, &b, &params.z_x())?
    };
    Ok(ln_pref.exp() * f11)
}

/// Table of s₀..s_{2M}, each entry computed independently from the closed
/// form. Verifies positivity and strict decrease (the support lies inside
/// (−1,1), so ∫x^{m+2}w < ∫x^m w).
pub fn moment_table(params: &WeightParams, m_count: usize) -> Result<MomentTable> {
    if m_count < 1 {
        return Err(RysError::Domain("moment table needs M >= 1".into()));
    }
    let mut even = Vec::with_capacity(m_count + 1);
    for k in 0..=m_count {
        let s = moment(params, 2 * k)?;
        if !s.is_positive() {
            return Err(RysError::PrecisionExhausted { index: k });
        }
        if let Some(prev) = even.last() {
            if !(&s < prev) {
                return Err(RysError::PrecisionExhausted { index: k });
            }
        }
        even.push(s);
    }
    Ok(MomentTable {
        params: *params,
        even,
    })
}

/// Residual of the moment recurrence 2z·s_{n+3} − (n+2z+2λ+1)·s_{n+1} +
/// n·s_{n−1} = 0 at odd n, normalized by s_{n+1}. Even n instances are the
/// trivial identity 0 = 0 and are rejected.
pub fn moment_recurrence_residual(table: &MomentTable, n: usize) -> Result<f64> {
    if n.is_multiple_of(2) {
        return Err(RysError::Domain(format!(
            "moment recurrence residual wants odd n (even instances are 0=0), got {n}"
        )));
    }
    let params = &table.params;
    let p = params.prec();
    let s_m1 = table.s(n - 1)?;
    let s_p1 = table.s(n + 1)?;
    let s_p3 = table.s(n + 3)?;
    let two_z = params.z_x() * 2.0;
    let mid = params.lambda_x() * 2.0 + &two_z + p.f(n as f64 + 1.0);
    let r = two_z * s_p3 - mid * s_p1 + p.f(n as f64) * s_m1;
    Ok((r.abs() / s_p1).to_f64())
}

/// Independent tanh-sinh oracle for a single even moment.
pub fn moment_oracle(params: &WeightParams, m: usize) -> Result<XReal> {
    if !m.is_multiple_of(2) {
        return Err(RysError::Domain(format!(
            "oracle integrates even powers only, got {m}"
        )));
    }
    Ok(moment_oracle_batch(params, m)?.pop().expect("batch nonempty"))
}

/// Tanh-sinh oracle for all even moments s₀, s₂, …, s_{2⌊mmax/2⌋} in one node
/// sweep. Each double-exponential node x = tanh((π/2)·sinh u) contributes to
/// every power simultaneously; 1−x² is evaluated as sech²((π/2)·sinh u), so
/// the λ−1/2 < 0 endpoint singularity costs no cancellation.
///
/// Levels are doubled until two successive levels agree componentwise to
/// 10^(−d/2) relative.
pub fn moment_oracle_batch(params: &WeightParams, mmax: usize) -> Result<Vec<XReal>> {
    let d = params.digits;
    let p = Prec(d);
    let n_powers = mmax / 2 + 1;
    let half_pi = p.pi() * 0.5;
    let two_lam_p1 = params.lambda_x() * 2.0 + 1.0;
    let zx = params.z_x();

    // contributions of the node pair ±x(u) to each even power
    let node = |u: &XReal, out: &mut [XReal]| {
        let w = &half_pi * u.sinh();
        let cw = w.cosh();
        let t = w.tanh();
        // base = (π/2)·cosh(u)·sech(w)^(2λ+1)·e^(−z·tanh²w); the x^0 term
        let ln_sech = -cw.ln();
        let base = (&two_lam_p1 * &ln_sech - &zx * t.square()).exp() * &half_pi * u.cosh();
        let t2 = t.square();
        let mut pw = base;
        for slot in out.iter_mut().take(n_powers) {
            *slot = pw.clone();
            pw = pw * &t2;
        }
    };

    let cutoff = p.pow10(-(d as i32) - 10);
    let target = p.pow10(-((d / 2) as i32));
    let mut scratch = vec![p.zero(); n_powers];

    // initial trapezoid level at h = 1/4; only u ≥ 0 is traversed (the even
    // integrand is symmetric in u), with the u = 0 node at half weight
    let mut h = 0.25f64;
    let mut sums: Vec<XReal> = {
        let mut acc = vec![p.zero(); n_powers];
        node(&p.zero(), &mut scratch);
        for (a, s) in acc.iter_mut().zip(&scratch) {
            *a = s.clone() * 0.5;
        }
        let mut k = 1usize;
        loop {
            node(&p.f(h * k as f64), &mut scratch);
            for (a, s) in acc.iter_mut().zip(&scratch) {
                *a = a.clone() + s;
            }
            // the m=0 integrand dominates every other component pointwise
            if scratch[0] < &cutoff * &acc[0] && k as f64 * h > 3.0 {
                break;
            }
            if k > 20_000 {
                return Err(RysError::OracleDivergence(
                    "moment oracle: level sum did not decay".into(),
                ));
            }
            k += 1;
        }
        acc.iter().map(|a| a.clone() * p.f(2.0 * h)).collect()
    };

    for _level in 0..13 {
        let h2 = h / 2.0;
        let mut odd = vec![p.zero(); n_powers];
        let mut k = 0usize;
        loop {
            node(&p.f(h2 * (2 * k + 1) as f64), &mut scratch);
            for (a, s) in odd.iter_mut().zip(&scratch) {
                *a = a.clone() + s;
            }
            if scratch[0] < &cutoff * (&odd[0] + &sums[0]) && (2 * k + 1) as f64 * h2 > 3.0 {
                break;
            }
            if k > 40_000 {
                return Err(RysError::OracleDivergence(
                    "moment oracle: refinement did not decay".into(),
                ));
            }
            k += 1;
        }
        let refined: Vec<XReal> = sums
            .iter()
            .zip(&odd)
            .map(|(s, o)| s.clone() * 0.5 + o * p.f(2.0 * h2))
            .collect();
        let all_agree = refined
            .iter()
            .zip(&sums)
            .all(|(r, s)| (r - s).abs() <= &target * r.abs());
        sums = refined;
        h = h2;
        if all_agree {
            return Ok(sums);
        }
    }
    Err(RysError::OracleDivergence(format!(
        "moment oracle did not reach {} digits under level doubling",
        d / 2
    )))
}
