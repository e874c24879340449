//! Zeros of Pₙ, their electrostatic equilibrium certificate, and the
//! zero-dynamics ODE in z.
//!
//! Zeros are eigenvalues of the order-n Jacobi matrix, polished by one Newton
//! step at extended precision and certified against `eval_all`. The zeros of
//! Pₙ are the equilibrium configuration of n unit charges on (−1,1) in the
//! external field of the weight plus two *negative* unit charges at ±βₙ;
//! the gradient of that energy, evaluated at the zero set, is the
//! equilibrium residual. The velocity law dx/dz closes the circle with an
//! independent finite-difference oracle.

use crate::error::{Result, RysError};
use crate::moments::WeightParams;
use crate::numerics::{Prec, XReal};
use crate::polynomials::eval_all;
use crate::quadrature::{jacobi_matrix, ql_first_row};
use crate::recurrence::{ladder_data, RecurrenceTable};

/// The zeros of Pₙ, ascending, at machine-double precision.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub n: usize,
    pub params: WeightParams,
    pub zeros: Vec<f64>,
}

/// Electrostatic context for the zeros of Pₙ: the auxiliary charge location
/// βₙ with βₙ² = (n+λ)/z + 1 − (γₙ+γₙ₊₁), and the external potential
/// v(x) = −(λ−1/2)·ln(1−x²) + z·x².
///
/// βₙ ≥ 1 holds for λ ≥ 1/2 (all n); for λ < 1/2 the smallest few indices
/// can have βₙ < 1 — the identities below hold either way, so only βₙ² > 0
/// is enforced.
#[derive(Debug, Clone)]
pub struct ZeroContext {
    pub n: usize,
    pub params: WeightParams,
    /// βₙ rounded to double.
    pub beta_n: f64,
    beta_x: XReal,
}

impl ZeroContext {
    /// β at extended precision.
    pub fn beta(&self) -> &XReal {
        &self.beta_x
    }

    /// External potential v(x) = −(λ−1/2)ln(1−x²) + zx².
    pub fn potential(&self, x: &XReal) -> XReal {
        let params = &self.params;
        let p = params.prec();
        let one_minus_x2 = p.one() - x.square();
        -(params.lambda_x() - 0.5) * one_minus_x2.ln() + params.z_x() * x.square()
    }

    /// v′(x) = 2zx + (2λ−1)·x/(1−x²).
    pub fn potential_gradient(&self, x: &XReal) -> XReal {
        let params = &self.params;
        let p = params.prec();
        let one_minus_x2 = p.one() - x.square();
        params.z_x() * x * 2.0 + (params.lambda_x() * 2.0 - 1.0) * x / one_minus_x2
    }
}

/// Zeros of Pₙ: order-n Jacobi eigenvalues, one extended-precision Newton
/// polish each, exact symmetrization, and a residual certificate
/// |Pₙ(xₖ)| ≤ 10⁻¹⁰·max(1, |P′ₙ(xₖ)|).
pub fn zeros(rt: &RecurrenceTable, n: usize) -> Result<ZeroSet> {
    if n < 1 || n > rt.n_max() {
        return Err(RysError::IndexRange(format!(
            "zero set needs 1 <= n <= N, got n={n}, N={}",
            rt.n_max()
        )));
    }
    let p = rt.params.prec();
    let jm = jacobi_matrix(rt, n)?;
    let mut d = vec![0.0f64; n];
    let mut e: Vec<f64> = jm.off_diagonal().iter().map(|x| x.to_f64()).collect();
    e.push(0.0);
    let mut q = vec![0.0f64; n];
    q[0] = 1.0;
    ql_first_row(&mut d, &mut e, &mut q)?;
    d.sort_by(f64::total_cmp);
    // one Newton step per eigenvalue at extended precision
    let mut polished = Vec::with_capacity(n);
    for &x0 in &d {
        let x = p.f(x0);
        let ev = eval_all(rt, n, &x)?;
        let dp = ev.dp(n)?;
        if dp.is_zero() {
            return Err(RysError::NonConvergence(format!(
                "flat Newton step at eigenvalue {x0}"
            )));
        }
        polished.push((&x - ev.p(n)? / dp).to_f64());
    }
    for k in 0..n / 2 {
        let m = n - 1 - k;
        let x = 0.5 * (polished[m] - polished[k]);
        polished[k] = -x;
        polished[m] = x;
    }
    if n % 2 == 1 {
        polished[n / 2] = 0.0;
    }
    for k in 0..n {
        if polished[k].abs() >= 1.0 {
            return Err(RysError::NonConvergence(format!(
                "zero {k} escaped (-1,1): {}",
                polished[k]
            )));
        }
        if k > 0 && polished[k] <= polished[k - 1] {
            return Err(RysError::NonConvergence(format!(
                "zeros not strictly increasing at index {k}"
            )));
        }
        let ev = eval_all(rt, n, &p.f(polished[k]))?;
        let scale = ev.dp(n)?.abs().max(&p.one());
        if ev.p(n)?.abs() > p.f(1e-10) * scale {
            return Err(RysError::NonConvergence(format!(
                "zero {k} fails the residual certificate: |P_n| = {}",
                ev.p(n)?.abs()
            )));
        }
    }
    Ok(ZeroSet {
        n,
        params: rt.params,
        zeros: polished,
    })
}

/// Electrostatic context for index n (needs γₙ₊₁ and z > 0).
pub fn zero_context(rt: &RecurrenceTable, n: usize) -> Result<ZeroContext> {
    if n + 1 > rt.n_max() {
        return Err(RysError::IndexRange(format!(
            "zero context at n={n} needs gamma_{}, table stops at gamma_{}",
            n + 1,
            rt.n_max()
        )));
    }
    let params = rt.params;
    if params.z <= 0.0 {
        return Err(RysError::Domain(
            "the auxiliary charge location beta_n needs z > 0".into(),
        ));
    }
    let p = params.prec();
    let beta_sq = (params.lambda_x() + p.f(n as f64)) / params.z_x() + 1.0
        - (rt.gamma(n)? + rt.gamma(n + 1)?);
    if !beta_sq.is_positive() {
        return Err(RysError::Singular(format!(
            "beta_{n}^2 = {beta_sq} is not positive"
        )));
    }
    let beta_x = beta_sq.sqrt();
    Ok(ZeroContext {
        n,
        params,
        beta_n: beta_x.to_f64(),
        beta_x,
    })
}

/// β²ₙ in extended precision (uniform index convention β²ₘ =
/// (m+λ)/z + 1 − (γₘ+γₘ₊₁)); exposed for the identity z(βₙ²−1) = Rₙ.
pub fn beta_squared(rt: &RecurrenceTable, n: usize) -> Result<XReal> {
    let params = &rt.params;
    if params.z <= 0.0 {
        return Err(RysError::Domain("beta_n^2 needs z > 0".into()));
    }
    let p = params.prec();
    Ok((params.lambda_x() + p.f(n as f64)) / params.z_x() + 1.0
        - (rt.gamma(n)? + rt.gamma(n + 1)?))
}

/// Residual |z·(βₙ²−1) − Rₙ| tying the charge location to the ladder data.
pub fn beta_ladder_residual(rt: &RecurrenceTable, n: usize) -> Result<f64> {
    let b2 = beta_squared(rt, n)?;
    let r_n = ladder_data(rt, n)?.r_n;
    Ok((rt.params.z_x() * (b2 - 1.0) - r_n).abs().to_f64())
}

fn check_configuration(points: &[f64], ctx: &ZeroContext) -> Result<()> {
    let beta = ctx.beta_n;
    for (k, &x) in points.iter().enumerate() {
        if !(x > -1.0 && x < 1.0) {
            return Err(RysError::Domain(format!(
                "configuration point {k} = {x} outside (-1,1)"
            )));
        }
        if (x.abs() - beta).abs() <= 10.0 * f64::EPSILON {
            return Err(RysError::Singular(format!(
                "configuration point {k} coincides with an auxiliary charge at ±{beta}"
            )));
        }
        if (x.abs() - 1.0).abs() <= 10.0 * f64::EPSILON {
            return Err(RysError::Singular(format!(
                "configuration point {k} coincides with an endpoint charge"
            )));
        }
    }
    for k in 1..points.len() {
        if points[k] == points[k - 1] {
            return Err(RysError::Singular(format!(
                "coincident configuration points at index {k} (infinite energy)"
            )));
        }
    }
    Ok(())
}

/// Max |∂E/∂xₖ| over the configuration, in extended precision:
/// ∂E/∂xₖ = Σ_{j≠k} 2/(xⱼ−xₖ) − 1/(xₖ−1) − 1/(xₖ+1)
///          + 1/(xₖ−β) + 1/(xₖ+β) + v′(xₖ).
/// The ±β charges are attractive (negative): their gradient terms enter with
/// the opposite sign to the endpoint charges. At the true zero set of Pₙ
/// (with ctx at the same index n) this vanishes identically.
pub fn electrostatic_residual(zs: &ZeroSet, ctx: &ZeroContext) -> Result<f64> {
    if zs.n != ctx.n {
        return Err(RysError::Domain(format!(
            "zero set of order {} paired with context of index {}",
            zs.n, ctx.n
        )));
    }
    check_configuration(&zs.zeros, ctx)?;
    let p = ctx.params.prec();
    let beta = &ctx.beta_x;
    let xs: Vec<XReal> = zs.zeros.iter().map(|&x| p.f(x)).collect();
    let mut worst = p.zero();
    for (k, xk) in xs.iter().enumerate() {
        let mut grad = self_interaction(&xs, k, p);
        grad = grad - (xk - 1.0).recip() - (xk + 1.0).recip();
        grad = grad + (xk - beta).recip() + (xk + beta).recip();
        grad = grad + ctx.potential_gradient(xk);
        worst = worst.max(&grad.abs());
    }
    Ok(worst.to_f64())
}

fn self_interaction(xs: &[XReal], k: usize, p: Prec) -> XReal {
    let mut acc = p.zero();
    for (j, xj) in xs.iter().enumerate() {
        if j != k {
            acc = acc + p.f(2.0) / (xj - &xs[k]);
        }
    }
    acc
}

/// Energy of an arbitrary admissible configuration:
/// E = 2·Σ_{j<k} ln 1/|xⱼ−xₖ|
///     + Σₖ [ln 1/|xₖ−1| + ln 1/|xₖ+1| − ln 1/|xₖ−β| − ln 1/|xₖ+β| + v(xₖ)].
pub fn electrostatic_energy(points: &[f64], ctx: &ZeroContext) -> Result<f64> {
    check_configuration(points, ctx)?;
    let p = ctx.params.prec();
    let beta = &ctx.beta_x;
    let xs: Vec<XReal> = points.iter().map(|&x| p.f(x)).collect();
    let mut energy = p.zero();
    for j in 0..xs.len() {
        for k in (j + 1)..xs.len() {
            energy = energy - (&xs[j] - &xs[k]).abs().ln() * 2.0;
        }
    }
    for xk in &xs {
        energy = energy - (xk - 1.0).abs().ln() - (xk + 1.0).abs().ln();
        energy = energy + (xk - beta).abs().ln() + (xk + beta).abs().ln();
        energy = energy + ctx.potential(xk);
    }
    Ok(energy.to_f64())
}

/// Velocity of the k-th zero (1-based) of Pₙ under the z-flow:
/// dxₙ,ₖ/dz = −(xₙ,ₖ/2z)·(1−x²ₙ,ₖ)/(βₙ²−x²ₙ,ₖ).
pub fn zero_velocity(rt: &RecurrenceTable, n: usize, k: usize) -> Result<f64> {
    let v = zero_velocities(rt, n)?;
    if k < 1 || k > n {
        return Err(RysError::IndexRange(format!(
            "zero index must satisfy 1 <= k <= n = {n}, got {k}"
        )));
    }
    Ok(v[k - 1])
}

/// All n zero velocities of Pₙ at once (shares one eigensolve).
pub fn zero_velocities(rt: &RecurrenceTable, n: usize) -> Result<Vec<f64>> {
    if rt.params.z <= 0.0 {
        return Err(RysError::Domain("the zero-dynamics ODE needs z > 0".into()));
    }
    let zs = zeros(rt, n)?;
    let b2 = beta_squared(rt, n)?.to_f64();
    let two_z = 2.0 * rt.params.z;
    zs.zeros
        .iter()
        .map(|&x| {
            let denom = b2 - x * x;
            if denom == 0.0 {
                return Err(RysError::Singular(format!(
                    "zero at x={x} coincides with the auxiliary charge"
                )));
            }
            Ok(-(x / two_z) * (1.0 - x * x) / denom)
        })
        .collect()
}

/// ∂Pₙ/∂z at fixed x: γₙγₙ₋₁·Pₙ₋₂(x) for n ≥ 2, identically 0 for n < 2.
pub fn dz_poly(rt: &RecurrenceTable, n: usize, x: &XReal) -> Result<XReal> {
    let p = rt.params.prec();
    if n < 2 {
        return Ok(p.zero());
    }
    let ev = eval_all(rt, n - 2, x)?;
    Ok(rt.gamma(n)? * rt.gamma(n - 1)? * ev.p(n - 2)?)
}
