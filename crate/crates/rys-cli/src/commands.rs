//! The six subcommands: table builders for moments, recurrence, quadrature,
//! zeros and flow, plus the verification suite.

use crate::table::{ParamsEcho, TableDoc};
use rys_core::error::{Result, RysError};
use rys_core::flows::{
    chazy_residual, h_flow_residual, stieltjes_ode_residual_z_detail, stieltjes_ode_variants,
    toda_integrate, FlowState,
};
use rys_core::moments::{moment_oracle_batch, moment_recurrence_residual, moment_table};
use rys_core::polynomials::{holonomic_residual, ladder_residual, structure_residual};
use rys_core::quadrature::{exactness_report, gauss_rule};
use rys_core::recurrence::{
    g_table, gammas_laguerre_freud, gegenbauer_gamma, laguerre_freud_residual, painleve_residual,
    recurrence_table,
};
use rys_core::zeros::{
    beta_ladder_residual, electrostatic_residual, zero_context, zero_velocities, zeros,
};
use rys_core::{Prec, WeightParams};

/// Even moments table: m, s_m, and the residual of the three-term moment
/// recurrence centered between this row and the next two.
pub fn cmd_moments(z: f64, lambda: f64, digits: u32, n: usize) -> Result<TableDoc> {
    if n < 1 {
        return Err(RysError::Domain("N must be at least 1".into()));
    }
    let params = WeightParams::new(z, lambda, digits)?;
    // Two spare entries so every emitted row has a defined residual.
    let mt = moment_table(&params, n + 2)?;
    let mut doc = TableDoc::new(
        ParamsEcho::point("moments", z, lambda, n, digits),
        &["m", "s_m", "residual"],
    );
    let mut max_res = 0.0f64;
    for k in 0..=n {
        let m = 2 * k;
        let res = moment_recurrence_residual(&mt, m + 1)?;
        max_res = max_res.max(res.abs());
        doc.push_row(vec![
            Some(m as f64),
            Some(mt.s(m)?.to_f64()),
            Some(res),
        ]);
    }
    doc.set_summary("max_moment_recurrence_residual", Some(max_res));
    Ok(doc)
}

/// Recurrence table: n, gamma_n, h_n, string-equation (Laguerre-Freud)
/// residual and discrete-Painleve residual. Identity columns are null where
/// an identity needs neighbors the row does not have (n = 0).
pub fn cmd_recurrence(z: f64, lambda: f64, digits: u32, n: usize) -> Result<TableDoc> {
    if n < 1 {
        return Err(RysError::Domain("N must be at least 1".into()));
    }
    let params = WeightParams::new(z, lambda, digits)?;
    let rt = recurrence_table(&params, n + 2)?;
    let gt = g_table(&rt);
    let mut doc = TableDoc::new(
        ParamsEcho::point("recurrence", z, lambda, n, digits),
        &["n", "gamma_n", "h_n", "lf_residual", "painleve_residual"],
    );
    let mut max_lf = 0.0f64;
    let mut max_pain = 0.0f64;
    for k in 0..=n {
        let (lf, pain) = if k >= 1 {
            let lf = laguerre_freud_residual(&rt, k)?;
            let pain = painleve_residual(&gt, k)?;
            max_lf = max_lf.max(lf.abs());
            max_pain = max_pain.max(pain.abs());
            (Some(lf), Some(pain))
        } else {
            (None, None)
        };
        doc.push_row(vec![
            Some(k as f64),
            Some(rt.gamma(k)?.to_f64()),
            Some(rt.h(k)?.to_f64()),
            lf,
            pain,
        ]);
    }
    doc.set_summary("max_lf_residual", Some(max_lf));
    doc.set_summary("max_painleve_residual", Some(max_pain));
    // In the z = 0 limit the coefficients have a closed form; report the
    // worst deviation from it as an extra cross-check.
    let gegenbauer_dev = if params.is_gegenbauer() {
        let p = Prec(digits);
        let mut worst = 0.0f64;
        for k in 1..=n {
            let closed = gegenbauer_gamma(lambda, k, p);
            let dev = ((rt.gamma(k)? - &closed).abs() / closed.abs()).to_f64();
            worst = worst.max(dev);
        }
        Some(worst)
    } else {
        None
    };
    doc.set_summary("gegenbauer_closed_form_deviation", gegenbauer_dev);
    Ok(doc)
}

/// Gauss rule: node/weight pairs plus the exactness report against
/// independently computed moments.
pub fn cmd_quadrature(z: f64, lambda: f64, digits: u32, n: usize) -> Result<TableDoc> {
    if n < 1 {
        return Err(RysError::Domain("N must be at least 1".into()));
    }
    let params = WeightParams::new(z, lambda, digits)?;
    let rule = gauss_rule(&params, n)?;
    let mt = moment_table(&params, n.max(1))?;
    let exactness = exactness_report(&rule, &mt)?;
    let mut doc = TableDoc::new(
        ParamsEcho::point("quadrature", z, lambda, n, digits),
        &["k", "node", "weight"],
    );
    let mut weight_sum = 0.0f64;
    for (k, (x, w)) in rule.nodes.iter().zip(rule.weights.iter()).enumerate() {
        weight_sum += w;
        doc.push_row(vec![Some(k as f64), Some(*x), Some(*w)]);
    }
    doc.set_summary("max_exactness_error", Some(exactness));
    doc.set_summary(
        "weight_sum_minus_s0",
        Some(weight_sum - mt.s0().to_f64()),
    );
    Ok(doc)
}

/// Zeros of P_N with their z-velocities; the auxiliary charge beta_N and the
/// electrostatic-equilibrium residual go into the summary. Velocity and
/// electrostatics are z > 0 concepts and come out null at z = 0.
pub fn cmd_zeros(z: f64, lambda: f64, digits: u32, n: usize) -> Result<TableDoc> {
    if n < 1 {
        return Err(RysError::Domain("N must be at least 1".into()));
    }
    let params = WeightParams::new(z, lambda, digits)?;
    let rt = recurrence_table(&params, n + 2)?;
    let zs = zeros(&rt, n)?;
    let (velocities, beta, grad, blr) = if z > 0.0 {
        let ctx = zero_context(&rt, n)?;
        let vel = zero_velocities(&rt, n)?;
        let grad = electrostatic_residual(&zs, &ctx)?;
        let blr = beta_ladder_residual(&rt, n)?;
        (Some(vel), Some(ctx.beta_n), Some(grad), Some(blr))
    } else {
        (None, None, None, None)
    };
    let mut doc = TableDoc::new(
        ParamsEcho::point("zeros", z, lambda, n, digits),
        &["k", "x_k", "velocity"],
    );
    for (k, x) in zs.zeros.iter().enumerate() {
        let v = velocities.as_ref().map(|vs| vs[k]);
        doc.push_row(vec![Some(k as f64), Some(*x), v]);
    }
    doc.set_summary("beta_n", beta);
    doc.set_summary("electrostatic_gradient_residual", grad);
    doc.set_summary("beta_ladder_residual", blr);
    Ok(doc)
}

/// Trajectory of the lattice over [z0, z1]: the first checkpoint comes from
/// the moments pipeline, later ones from RK4 integration; every checkpoint
/// carries the worst relative deviation from a fresh pipeline run, and
/// optionally the zeros of P_n.
pub fn cmd_flow(
    lambda: f64,
    digits: u32,
    n: usize,
    z0: f64,
    z1: f64,
    steps: usize,
    with_zeros: bool,
) -> Result<TableDoc> {
    if n < 1 {
        return Err(RysError::Domain("N must be at least 1".into()));
    }
    let params0 = WeightParams::new(z0, lambda, digits)?;
    WeightParams::new(z1, lambda, digits)?;
    let checkpoints = if z0 == z1 {
        1
    } else {
        if steps < 1 {
            return Err(RysError::Domain(
                "a z-range of positive length needs at least 1 step".into(),
            ));
        }
        steps + 1
    };

    let mut columns: Vec<String> = vec!["z".to_string()];
    for k in 1..=n {
        columns.push(format!("gamma_{k}"));
    }
    columns.push("fresh_deviation".to_string());
    if with_zeros {
        for k in 0..n {
            columns.push(format!("x_{k}"));
        }
    }
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut doc = TableDoc::new(
        ParamsEcho {
            command: "flow".to_string(),
            z: None,
            lambda: Some(lambda),
            n: Some(n as u64),
            digits,
            z0: Some(z0),
            z1: Some(z1),
            steps: Some(steps as u64),
        },
        &column_refs,
    );

    let mut state = FlowState::from_params(&params0, n)?;
    let mut max_dev = 0.0f64;
    for i in 0..checkpoints {
        let zi = if checkpoints == 1 {
            z0
        } else {
            z0 + (z1 - z0) * (i as f64 / steps as f64)
        };
        if i > 0 {
            let seg = zi - state.z();
            // Twice the mandatory step floor keeps the integrator error
            // comfortably inside the deviation tolerance.
            let substeps = 2 * ((seg.abs() / 0.01).ceil() as usize).max(1);
            state = toda_integrate(&state, seg, substeps)?;
        }
        let fresh_params = WeightParams::new(zi, lambda, digits)?;
        let fresh = FlowState::from_params(&fresh_params, n)?;
        let mut dev = 0.0f64;
        for k in 1..=n {
            let rel = ((state.gamma(k)? - fresh.gamma(k)?).abs() / fresh.gamma(k)?.abs()).to_f64();
            dev = dev.max(rel);
        }
        max_dev = max_dev.max(dev);
        let mut row: Vec<Option<f64>> = Vec::with_capacity(columns.len());
        row.push(Some(zi));
        for k in 1..=n {
            row.push(Some(state.gamma(k)?.to_f64()));
        }
        row.push(Some(dev));
        if with_zeros {
            let rt = recurrence_table(&fresh_params, n + 2)?;
            let zset = zeros(&rt, n)?;
            for x in &zset.zeros {
                row.push(Some(*x));
            }
        }
        doc.push_row(row);
    }
    doc.set_summary("max_fresh_deviation", Some(max_dev));
    Ok(doc)
}

struct Check {
    name: String,
    z: f64,
    lambda: f64,
    value: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value.is_finite() && self.value.abs() <= self.tol
    }
}

/// Runs the residual suite at one (z, lambda) point and appends the results.
fn verify_point(
    z: f64,
    lambda: f64,
    digits: u32,
    n: usize,
    perturb_gamma: Option<usize>,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let params = WeightParams::new(z, lambda, digits)?;
    let d = digits as i32;
    let p = Prec(digits);
    let mut push = |name: &str, value: f64, tol: f64| {
        checks.push(Check {
            name: name.to_string(),
            z,
            lambda,
            value,
            tol,
        });
    };

    // Moments: closed form against the integration oracle, plus the
    // recurrence residual.
    let mt = moment_table(&params, n + 2)?;
    let oracle = moment_oracle_batch(&params, 2 * (n + 2))?;
    let mut worst_oracle = 0.0f64;
    for (k, o) in oracle.iter().enumerate() {
        let dev = ((mt.s(2 * k)? - o).abs() / o.abs()).to_f64();
        worst_oracle = worst_oracle.max(dev);
    }
    push("moment_closed_vs_oracle", worst_oracle, 1e-25);
    let mut worst_rec = 0.0f64;
    for k in 0..=n {
        worst_rec = worst_rec.max(moment_recurrence_residual(&mt, 2 * k + 1)?.abs());
    }
    push("moment_recurrence", worst_rec, 10f64.powi(8 - d));

    // Recurrence coefficients and their nonlinear identities. The hidden
    // perturbation hook corrupts one coefficient here; the residuals below
    // are expected to expose it.
    let mut rt = recurrence_table(&params, n + 2)?;
    if let Some(idx) = perturb_gamma {
        rt = rt.with_perturbed_gamma(idx, &p.f(1e-6))?;
    }
    let gt = g_table(&rt);
    let mut worst_lf = 0.0f64;
    let mut worst_pain = 0.0f64;
    for k in 1..=n {
        worst_lf = worst_lf.max(laguerre_freud_residual(&rt, k)?.abs());
        worst_pain = worst_pain.max(painleve_residual(&gt, k)?.abs());
    }
    push("laguerre_freud", worst_lf, 10f64.powi(10 - d));
    push("discrete_painleve", worst_pain, 10f64.powi(10 - d));

    if params.is_gegenbauer() {
        let mut worst = 0.0f64;
        for k in 1..=n {
            let closed = gegenbauer_gamma(lambda, k, p);
            worst = worst.max(((rt.gamma(k)? - &closed).abs() / closed.abs()).to_f64());
        }
        push("gegenbauer_closed_form", worst, 10f64.powi(10 - d));
    } else {
        // Independent route: propagate the string equation from the moment
        // seed and compare against the Cholesky pipeline. Propagation loses
        // roughly two digits per step at small z, so it runs with extra
        // internal precision; the comparison is still double-blind.
        let lf_params = WeightParams::new(z, lambda, digits + 50)?;
        let seed_mt = moment_table(&lf_params, 1)?;
        let gamma1 = seed_mt.s(2)? / seed_mt.s0();
        let lf_route = gammas_laguerre_freud(&lf_params, &gamma1, n)?;
        let mut worst = 0.0f64;
        for k in 1..=n {
            let rel =
                ((lf_route.gamma(k)? - rt.gamma(k)?).abs() / rt.gamma(k)?.abs()).to_f64();
            worst = worst.max(rel);
        }
        push("cross_pipeline_gammas", worst, 1e-15);
    }

    // Differential structure at a few interior points.
    let xs = [-0.9, -0.4, 0.1, 0.6, 0.85];
    let mut worst_struct = 0.0f64;
    let mut worst_ladder = 0.0f64;
    let mut worst_holo = 0.0f64;
    for deg in [2usize, 5, 8] {
        if deg + 3 > n + 2 {
            continue;
        }
        for xv in xs {
            let x = p.f(xv);
            worst_struct = worst_struct.max(structure_residual(&rt, deg, &x)?.abs());
            worst_ladder = worst_ladder.max(ladder_residual(&rt, deg, &x)?.abs());
            worst_holo = worst_holo.max(holonomic_residual(&rt, deg, &x)?.abs());
        }
    }
    push("structure_relation", worst_struct, 10f64.powi(8 - d));
    push("ladder_relation", worst_ladder, 10f64.powi(8 - d));
    push("holonomic_ode", worst_holo, 10f64.powi(6 - d));

    // Quadrature exactness against the moment table.
    let rule = gauss_rule(&params, n)?;
    let ex = exactness_report(&rule, &moment_table(&params, n.max(1))?)?;
    push("quadrature_exactness", ex, 1e-12);

    // Zeros: electrostatic equilibrium, charge ladder, velocity law.
    if z > 0.0 {
        let zs = zeros(&rt, n)?;
        let ctx = zero_context(&rt, n)?;
        push(
            "electrostatic_gradient",
            electrostatic_residual(&zs, &ctx)?,
            1e-8,
        );
        push("beta_ladder", beta_ladder_residual(&rt, n)?, 1e-12);
        let h = 1e-4;
        if z > h {
            let vel = zero_velocities(&rt, n)?;
            let mk = |zv: f64| -> Result<Vec<f64>> {
                let pz = WeightParams::new(zv, lambda, digits)?;
                Ok(zeros(&recurrence_table(&pz, n + 2)?, n)?.zeros)
            };
            let above = mk(z + h)?;
            let below = mk(z - h)?;
            let mut worst = 0.0f64;
            for k in 0..n {
                let fd = (above[k] - below[k]) / (2.0 * h);
                worst = worst.max((vel[k] - fd).abs());
            }
            push("zero_velocity_vs_fd", worst, 1e-6);
        }
    }

    // Flows: RK4 lattice against a fresh pipeline, the Chazy-type identity,
    // the norm-flow identity, and both Stieltjes ODE residuals.
    let window = n.min(8);
    let start = FlowState::from_params(&params, window)?;
    let flowed = toda_integrate(&start, 0.1, 20)?;
    let fresh = FlowState::from_params(&WeightParams::new(z + 0.1, lambda, digits)?, window)?;
    let mut worst_flow = 0.0f64;
    for k in 1..=window {
        let rel =
            ((flowed.gamma(k)? - fresh.gamma(k)?).abs() / fresh.gamma(k)?.abs()).to_f64();
        worst_flow = worst_flow.max(rel);
    }
    push("toda_vs_fresh_pipeline", worst_flow, 1e-8);

    if z > 0.0 {
        let chazy_state = FlowState::from_params(&params, 3)?;
        push("chazy_identity", chazy_residual(&chazy_state, 3)?, 10f64.powi(8 - d));
        let h = 1e-4;
        if z > h {
            let mk = |zv: f64| recurrence_table(&WeightParams::new(zv, lambda, digits)?, n + 2);
            let below = mk(z - h)?;
            let above = mk(z + h)?;
            let mut worst = 0.0f64;
            for k in 1..=n {
                worst = worst.max(h_flow_residual(&below, &rt, &above, k)?.analytic);
            }
            push("norm_flow_identity", worst, 10f64.powi(10 - d));
        }
    }

    let stim = moment_table(&params, 17)?;
    let variants = stieltjes_ode_variants(&stim, 3.0, 15)?;
    push(
        "stieltjes_t_ode_vs_tail",
        (variants.consistent - variants.exact_tail).abs() / variants.scale,
        10f64.powi(20 - d),
    );
    let zode = stieltjes_ode_residual_z_detail(&stim, 3.0, 15)?;
    push(
        "stieltjes_z_ode_vs_tail",
        (zode.absolute - zode.exact_tail).abs(),
        10f64.powi(20 - d),
    );
    Ok(())
}

/// Full verification: standard grid (or a single restricted point), printed
/// as a pass/fail table. Returns the process exit code.
pub fn cmd_verify(
    digits: u32,
    z: Option<f64>,
    lambda: Option<f64>,
    n: usize,
    perturb_gamma: Option<usize>,
) -> Result<i32> {
    if n < 2 {
        return Err(RysError::Domain(
            "the verification suite needs N >= 2".into(),
        ));
    }
    let zs = z.map(|v| vec![v]).unwrap_or_else(|| vec![0.0, 1.0]);
    let lams = lambda
        .map(|v| vec![v])
        .unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.5]);
    // Surface parameter-domain problems before any work is attempted.
    for &zv in &zs {
        for &lv in &lams {
            WeightParams::new(zv, lv, digits)?;
        }
    }
    let mut checks = Vec::new();
    for &zv in &zs {
        for &lv in &lams {
            verify_point(zv, lv, digits, n, perturb_gamma, &mut checks)?;
        }
    }
    let mut failures = 0usize;
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        if !c.passed() {
            failures += 1;
        }
        println!(
            "{status} {name} (lambda={lam}, z={z}): {value:.3e} (tol {tol:.1e})",
            name = c.name,
            lam = c.lambda,
            z = c.z,
            value = c.value,
            tol = c.tol,
        );
    }
    println!(
        "verify: {} checks, {} failed",
        checks.len(),
        failures
    );
    Ok(if failures == 0 { 0 } else { 1 })
}
