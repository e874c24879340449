//! Evaluation of the monic polynomials and their differential structure.
//!
//! Values and derivatives come from the three-term recurrence
//! Pₙ₊₁ = x·Pₙ − γₙ·Pₙ₋₁ and its differentiated forms (exact in extended
//! precision — no finite differences). On top of evaluation, this module
//! verifies three layers of differential structure as residuals:
//!
//! * the structure relation φ·P′ₙ₊₁ = −(n+1)Pₙ₊₂ + bₙ₊₁Pₙ + aₙPₙ₋₂,
//! * the lowering ladder operator Lₙ = Aₙ∂ₓ − Bₙ with LₙPₙ₊₁ = Pₙ,
//! * the holonomic second-order equation A·P″ₙ₊₁ + B·P′ₙ₊₁ + C·Pₙ₊₁ = 0,
//!   whose coefficients are assembled from the ladder pair by eliminating
//!   Pₙ and Pₙ₋₁.

use crate::error::{Result, RysError};
use crate::moments::WeightParams;
use crate::numerics::XReal;
use crate::recurrence::RecurrenceTable;

/// Simultaneous values and first two derivatives of P₀..Pₙ at a point.
#[derive(Debug, Clone)]
pub struct PolyEval {
    pub x: XReal,
    values: Vec<XReal>,
    d1: Vec<XReal>,
    d2: Vec<XReal>,
}

impl PolyEval {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Pₖ(x).
    pub fn p(&self, k: usize) -> Result<&XReal> {
        self.values
            .get(k)
            .ok_or_else(|| RysError::IndexRange(format!("P_{k} beyond evaluation order")))
    }

    /// P′ₖ(x).
    pub fn dp(&self, k: usize) -> Result<&XReal> {
        self.d1
            .get(k)
            .ok_or_else(|| RysError::IndexRange(format!("P'_{k} beyond evaluation order")))
    }

    /// P″ₖ(x).
    pub fn ddp(&self, k: usize) -> Result<&XReal> {
        self.d2
            .get(k)
            .ok_or_else(|| RysError::IndexRange(format!("P''_{k} beyond evaluation order")))
    }
}

/// Structure-relation coefficients bₙ₊₁ and aₙ.
#[derive(Debug, Clone)]
pub struct StructureCoeffs {
    pub n: usize,
    /// bₙ₊₁ = [n+1+2λ+2z−2z(γₙ₊₂+γₙ₊₁+γₙ)]·γₙ₊₁.
    pub b_np1: XReal,
    /// aₙ = −2z·γₙ₊₁γₙγₙ₋₁ (≤ 0 for z ≥ 0).
    pub a_n: XReal,
}

/// Ladder-operator data for Lₙ = Aₙ(x)∂ₓ − Bₙ(x) with LₙPₙ₊₁ = Pₙ, where
/// Aₙ = φ/Cₙ, Bₙ = δₙ/Cₙ, Cₙ(x) = 2γₙ₊₁[n+1+λ+z−z(γₙ₊₂+γₙ₊₁)−zx²] and
/// δₙ(x) = (2zγₙ₊₁−n−1)x.
#[derive(Debug, Clone)]
pub struct LadderCoeffs {
    pub n: usize,
    params: WeightParams,
    gamma_np1: XReal,
    /// The x-free part of Cₙ/(2γₙ₊₁): n+1+λ+z−z(γₙ₊₂+γₙ₊₁).
    c_const: XReal,
}

impl LadderCoeffs {
    /// Cₙ(x).
    pub fn c(&self, x: &XReal) -> XReal {
        let z = self.params.z_x();
        (&self.c_const - z * x.square()) * &self.gamma_np1 * 2.0
    }

    /// δₙ(x).
    pub fn delta(&self, x: &XReal) -> XReal {
        let p = self.params.prec();
        (self.params.z_x() * &self.gamma_np1 * 2.0 - p.f(self.n as f64 + 1.0)) * x
    }

    /// Aₙ(x) = φ(x)/Cₙ(x); errors where Cₙ vanishes.
    pub fn a(&self, x: &XReal) -> Result<XReal> {
        let c = self.c(x);
        if c.is_zero() {
            return Err(RysError::Singular(format!(
                "ladder coefficient C_{}(x) vanishes at x={x}",
                self.n
            )));
        }
        Ok(self.params.phi(x) / c)
    }

    /// Bₙ(x) = δₙ(x)/Cₙ(x); errors where Cₙ vanishes.
    pub fn b(&self, x: &XReal) -> Result<XReal> {
        let c = self.c(x);
        if c.is_zero() {
            return Err(RysError::Singular(format!(
                "ladder coefficient C_{}(x) vanishes at x={x}",
                self.n
            )));
        }
        Ok(self.delta(x) / c)
    }
}

/// Values P₀..Pₙ and first two derivatives at x, from the recurrence
/// Pₖ₊₁ = x·Pₖ − γₖPₖ₋₁, P′ₖ₊₁ = Pₖ + x·P′ₖ − γₖP′ₖ₋₁,
/// P″ₖ₊₁ = 2P′ₖ + x·P″ₖ − γₖP″ₖ₋₁.
pub fn eval_all(rt: &RecurrenceTable, n: usize, x: &XReal) -> Result<PolyEval> {
    if n > rt.n_max() {
        return Err(RysError::IndexRange(format!(
            "evaluation to degree {n} exceeds table order {}",
            rt.n_max()
        )));
    }
    let p = rt.params.prec();
    let mut values = Vec::with_capacity(n + 1);
    let mut d1 = Vec::with_capacity(n + 1);
    let mut d2 = Vec::with_capacity(n + 1);
    values.push(p.one());
    d1.push(p.zero());
    d2.push(p.zero());
    if n >= 1 {
        values.push(x.clone());
        d1.push(p.one());
        d2.push(p.zero());
    }
    for k in 1..n {
        let g = rt.gamma(k)?;
        values.push(x * &values[k] - g * &values[k - 1]);
        d1.push(&values[k] + x * &d1[k] - g * &d1[k - 1]);
        d2.push(&d1[k] * 2.0 + x * &d2[k] - g * &d2[k - 1]);
    }
    Ok(PolyEval {
        x: x.clone(),
        values,
        d1,
        d2,
    })
}

/// Coefficients of the structure relation at index n (needs γₙ₋₁ and γₙ₊₂).
pub fn structure_coeffs(rt: &RecurrenceTable, n: usize) -> Result<StructureCoeffs> {
    if n < 1 || n + 2 > rt.n_max() {
        return Err(RysError::IndexRange(format!(
            "structure coefficients need 1 <= n <= N-2, got n={n}, N={}",
            rt.n_max()
        )));
    }
    let params = &rt.params;
    let p = params.prec();
    let z = params.z_x();
    let lam = params.lambda_x();
    let gsum = rt.gamma(n + 2)? + rt.gamma(n + 1)? + rt.gamma(n)?;
    let b_np1 = (p.f(n as f64 + 1.0) + &lam * 2.0 + &z * 2.0 - &z * gsum * 2.0)
        * rt.gamma(n + 1)?;
    let a_n = -(&z * 2.0) * rt.gamma(n + 1)? * rt.gamma(n)? * rt.gamma(n - 1)?;
    Ok(StructureCoeffs { n, b_np1, a_n })
}

/// Residual of φ·P′ₙ₊₁ + (n+1)Pₙ₊₂ − bₙ₊₁Pₙ − aₙPₙ₋₂ = 0, normalized by the
/// largest of the four term magnitudes. A point where every term vanishes by
/// parity (x = 0, odd n) reports 0.
pub fn structure_residual(rt: &RecurrenceTable, n: usize, x: &XReal) -> Result<f64> {
    if n < 2 || n + 2 > rt.n_max() {
        return Err(RysError::IndexRange(format!(
            "structure residual needs 2 <= n <= N-2, got n={n}, N={}",
            rt.n_max()
        )));
    }
    let params = &rt.params;
    let p = params.prec();
    let sc = structure_coeffs(rt, n)?;
    let ev = eval_all(rt, n + 2, x)?;
    let t1 = params.phi(x) * ev.dp(n + 1)?;
    let t2 = p.f(n as f64 + 1.0) * ev.p(n + 2)?;
    let t3 = &sc.b_np1 * ev.p(n)?;
    let t4 = &sc.a_n * ev.p(n - 2)?;
    let scale = t1.abs().max(&t2.abs()).max(&t3.abs()).max(&t4.abs());
    if scale.is_zero() {
        return Ok(0.0);
    }
    Ok(((t1 + t2 - t3 - t4).abs() / scale).to_f64())
}

/// Ladder data at index n (needs γₙ₊₂).
pub fn ladder_coeffs(rt: &RecurrenceTable, n: usize) -> Result<LadderCoeffs> {
    if n + 2 > rt.n_max() {
        return Err(RysError::IndexRange(format!(
            "ladder coefficients need n <= N-2, got n={n}, N={}",
            rt.n_max()
        )));
    }
    let params = rt.params;
    let p = params.prec();
    let z = params.z_x();
    let c_const = params.lambda_x() + p.f(n as f64 + 1.0) + &z
        - &z * (rt.gamma(n + 2)? + rt.gamma(n + 1)?);
    Ok(LadderCoeffs {
        n,
        params,
        gamma_np1: rt.gamma(n + 1)?.clone(),
        c_const,
    })
}

/// Residual of the lowering action |Aₙ·P′ₙ₊₁ − Bₙ·Pₙ₊₁ − Pₙ| / max(1, |Pₙ|).
pub fn ladder_residual(rt: &RecurrenceTable, n: usize, x: &XReal) -> Result<f64> {
    let lc = ladder_coeffs(rt, n)?;
    let p = rt.params.prec();
    let ev = eval_all(rt, n + 1, x)?;
    let lhs = lc.a(x)? * ev.dp(n + 1)? - lc.b(x)? * ev.p(n + 1)?;
    let pn = ev.p(n)?;
    let scale = pn.abs().max(&p.one());
    Ok(((lhs - pn).abs() / scale).to_f64())
}

/// Coefficients (A, B, C) of the holonomic equation
/// A·P″ₙ₊₁ + B·P′ₙ₊₁ + C·Pₙ₊₁ = 0 at the point x:
///
/// ```text
/// A = Cₙ·φ²
/// B = −2φ·[x(λ+z+1/2−zx²)·Cₙ − 2zγₙ₊₁·x·φ]
/// C = (2zx⁴+2zγₙ₊₁x²−(n+2λ+2z+1)x²+1)·(n+1−2zγₙ₊₁)·Cₙ
///     + Cₙ²·Cₙ₋₁/γₙ + 4zγₙ₊₁·(n+1−2zγₙ₊₁)·x²·φ
/// ```
///
/// The C coefficient is returned as its three addends so that residuals can
/// be normalized against the largest intermediate.
pub fn holonomic_coeffs(
    rt: &RecurrenceTable,
    n: usize,
    x: &XReal,
) -> Result<(XReal, XReal, [XReal; 3])> {
    if n < 1 || n + 3 > rt.n_max() {
        return Err(RysError::IndexRange(format!(
            "holonomic coefficients need 1 <= n <= N-3, got n={n}, N={}",
            rt.n_max()
        )));
    }
    let params = &rt.params;
    let p = params.prec();
    let z = params.z_x();
    let lam = params.lambda_x();
    let gamma_n = rt.gamma(n)?;
    if gamma_n.is_zero() {
        return Err(RysError::Singular(format!(
            "holonomic assembly divides by gamma_{n} = 0"
        )));
    }
    let gamma_np1 = rt.gamma(n + 1)?;
    let phi = params.phi(x);
    let x2 = x.square();
    let c_n = ladder_coeffs(rt, n)?.c(x);
    let c_nm1 = ladder_coeffs(rt, n - 1)?.c(x);
    let two_z_gam = &z * gamma_np1 * 2.0;

    let a = &c_n * phi.square();
    let b = (&z * &x2 - &lam - &z - 0.5) * x * &c_n * &phi * 2.0
        + &two_z_gam * x * phi.square() * 2.0;
    let quartic = &z * x2.square() * 2.0 + &two_z_gam * &x2
        - (p.f(n as f64 + 1.0) + &lam * 2.0 + &z * 2.0) * &x2
        + 1.0;
    let lead = p.f(n as f64 + 1.0) - &two_z_gam;
    let c1 = quartic * &lead * &c_n;
    let c2 = c_n.square() * &c_nm1 / gamma_n;
    let c3 = &two_z_gam * lead * &x2 * &phi * 2.0;
    Ok((a, b, [c1, c2, c3]))
}

/// Residual of the holonomic equation on (Pₙ₊₁, P′ₙ₊₁, P″ₙ₊₁), normalized by
/// the largest intermediate term magnitude (the cancellations inside the C
/// coefficient are intrinsic, hence the looser tolerance tier it gets in the
/// verification suites).
pub fn holonomic_residual(rt: &RecurrenceTable, n: usize, x: &XReal) -> Result<f64> {
    let (a, b, [c1, c2, c3]) = holonomic_coeffs(rt, n, x)?;
    let ev = eval_all(rt, n + 1, x)?;
    let pv = ev.p(n + 1)?;
    let t_a = a * ev.ddp(n + 1)?;
    let t_b = b * ev.dp(n + 1)?;
    let t1 = c1 * pv;
    let t2 = c2 * pv;
    let t3 = c3 * pv;
    let scale = t_a
        .abs()
        .max(&t_b.abs())
        .max(&t1.abs())
        .max(&t2.abs())
        .max(&t3.abs());
    if scale.is_zero() {
        return Ok(0.0);
    }
    Ok(((t_a + t_b + t1 + t2 + t3).abs() / scale).to_f64())
}
