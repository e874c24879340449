//! Grid tests for the moment pipeline: closed form against the integration
//! oracle, the three-term moment recurrence, and order/convexity properties
//! that follow from positivity of the weight.

use rys_core::moments::{moment_oracle_batch, moment_recurrence_residual, moment_table};
use rys_core::WeightParams;

const LAMBDAS: [f64; 5] = [-0.4, 0.0, 0.5, 1.0, 2.5];
const ZS: [f64; 4] = [0.0, 0.1, 1.0, 10.0];
const DIGITS: u32 = 50;

#[test]
fn closed_form_agrees_with_integration_oracle_on_the_grid() {
    for lam in LAMBDAS {
        for z in ZS {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let mt = moment_table(&params, 12).unwrap();
            let oracle = moment_oracle_batch(&params, 24).unwrap();
            for (k, o) in oracle.iter().enumerate() {
                let rel = ((mt.s(2 * k).unwrap() - o).abs() / o.abs()).to_f64();
                assert!(
                    rel <= 1e-25,
                    "lambda={lam} z={z} m={}: closed form and oracle split by {rel:e}",
                    2 * k
                );
            }
        }
    }
}

#[test]
fn moment_recurrence_residual_is_tiny_on_the_grid() {
    for lam in LAMBDAS {
        for z in ZS {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let mt = moment_table(&params, 14).unwrap();
            for k in 0..=12 {
                let r = moment_recurrence_residual(&mt, 2 * k + 1).unwrap();
                assert!(
                    r.abs() <= 1e-42,
                    "lambda={lam} z={z} odd index {}: residual {r:e}",
                    2 * k + 1
                );
            }
        }
    }
}

#[test]
fn moments_are_positive_and_decreasing_in_the_index() {
    for lam in LAMBDAS {
        for z in ZS {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let mt = moment_table(&params, 10).unwrap();
            for k in 0..=9 {
                let cur = mt.s(2 * k).unwrap();
                let next = mt.s(2 * k + 2).unwrap();
                assert!(cur.is_positive(), "s_{} must be positive", 2 * k);
                // x^{2k+2} < x^{2k} on (-1,1) minus endpoints.
                assert!(
                    (next - cur).is_negative(),
                    "lambda={lam} z={z}: s must decrease with the power"
                );
            }
        }
    }
}

#[test]
fn moments_are_log_convex_in_the_index() {
    // Cauchy-Schwarz on x^{2k-2} and x^{2k+2}: s_{2k}^2 <= s_{2k-2} s_{2k+2}.
    for lam in LAMBDAS {
        for z in ZS {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let mt = moment_table(&params, 10).unwrap();
            for k in 1..=9 {
                let mid = mt.s(2 * k).unwrap().square();
                let prod = mt.s(2 * k - 2).unwrap() * mt.s(2 * k + 2).unwrap();
                assert!(
                    !(prod - mid).is_negative(),
                    "lambda={lam} z={z} k={k}: log-convexity violated"
                );
            }
        }
    }
}

#[test]
fn moments_decrease_strictly_in_z() {
    for lam in LAMBDAS {
        for m in [0usize, 4, 12] {
            let mut prev: Option<rys_core::XReal> = None;
            for z in ZS {
                let params = WeightParams::new(z, lam, DIGITS).unwrap();
                let cur = mt_entry(&params, m);
                if let Some(p) = prev {
                    assert!(
                        (&cur - &p).is_negative(),
                        "lambda={lam} m={m}: s must decay as z grows"
                    );
                }
                prev = Some(cur);
            }
        }
    }
}

fn mt_entry(params: &WeightParams, m: usize) -> rys_core::XReal {
    moment_table(params, m / 2 + 1).unwrap().s(m).unwrap().clone()
}

#[test]
fn gegenbauer_limit_matches_beta_function_values() {
    // At z = 0 the even moments are the Beta integrals
    // s_{2n} = B(n + 1/2, lambda + 1/2); spot values at Legendre
    // (lambda = 1/2): s_{2n} = 2/(2n+1).
    let params = WeightParams::new(0.0, 0.5, DIGITS).unwrap();
    let p = params.prec();
    let mt = moment_table(&params, 10).unwrap();
    for n in 0..=10 {
        // 2n+1 is exact as a double; the division happens at full precision.
        let exact = p.f(2.0) / (2.0 * n as f64 + 1.0);
        let rel = ((mt.s(2 * n).unwrap() - &exact).abs() / exact).to_f64();
        assert!(rel <= 1e-45, "Legendre moment 2/{}: off by {rel:e}", 2 * n + 1);
    }
}
