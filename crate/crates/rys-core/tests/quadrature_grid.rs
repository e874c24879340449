//! Grid tests for Gauss rules: exactness against independent moments,
//! positivity, symmetry, interlacing, and a cross-check of the rule against
//! the integration oracle on a non-polynomial integrand.

use rys_core::moments::{moment_oracle_batch, moment_table};
use rys_core::quadrature::{exactness_report, gauss_rule, integrate};
use rys_core::WeightParams;

const LAMBDAS: [f64; 5] = [-0.4, 0.0, 0.5, 1.0, 2.5];
const ZS: [f64; 4] = [0.0, 0.1, 1.0, 10.0];
const DIGITS: u32 = 50;

#[test]
fn rules_are_exact_positive_and_symmetric_on_the_grid() {
    for lam in LAMBDAS {
        for z in ZS {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            for n in [1usize, 4, 9, 16] {
                let rule = gauss_rule(&params, n).unwrap();
                let mt = moment_table(&params, n.max(1)).unwrap();
                let err = exactness_report(&rule, &mt).unwrap();
                assert!(
                    err <= 1e-12,
                    "lambda={lam} z={z} N={n}: exactness error {err:e}"
                );
                let mut wsum = 0.0;
                for k in 0..n {
                    assert!(rule.weights[k] > 0.0, "weights must be positive");
                    assert!(rule.nodes[k].abs() < 1.0, "nodes live inside (-1,1)");
                    let mirror = rule.nodes[n - 1 - k];
                    assert!(
                        (rule.nodes[k] + mirror).abs() <= 1e-14,
                        "node symmetry broken at k={k}"
                    );
                    assert!(
                        (rule.weights[k] - rule.weights[n - 1 - k]).abs()
                            <= 1e-14 * rule.weights[k].abs(),
                        "weight symmetry broken at k={k}"
                    );
                    wsum += rule.weights[k];
                }
                let s0 = mt.s0().to_f64();
                assert!((wsum - s0).abs() <= 1e-12 * s0, "weights must sum to s_0");
            }
        }
    }
}

#[test]
fn consecutive_rules_interlace() {
    for lam in [-0.4, 0.5, 2.5] {
        for z in [0.0, 1.0, 10.0] {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            for n in 2..=12usize {
                let big = gauss_rule(&params, n).unwrap();
                let small = gauss_rule(&params, n - 1).unwrap();
                for k in 0..n - 1 {
                    assert!(
                        big.nodes[k] < small.nodes[k] && small.nodes[k] < big.nodes[k + 1],
                        "lambda={lam} z={z}: interlacing broken between N={n} and N={}",
                        n - 1
                    );
                }
            }
        }
    }
}

#[test]
fn rule_integrates_a_transcendental_function_like_the_oracle() {
    // Two fully independent routes to a non-polynomial integral: the Gauss
    // rule against even-moment resummation of cos(x) = sum (-1)^k x^(2k)/(2k)!.
    // With moments for x^(2k) up to k = 20 the series tail is ~1/40! and the
    // comparison is limited only by the double-precision rule.
    for lam in [-0.4, 1.0] {
        for z in [0.0, 1.0] {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let rule = gauss_rule(&params, 24).unwrap();
            let via_rule = integrate(&rule, f64::cos);
            let oracle = moment_oracle_batch(&params, 40).unwrap();
            let p = params.prec();
            let mut series = p.zero();
            let mut sign = 1.0f64;
            let mut fact = p.one();
            for (k, m) in oracle.iter().enumerate() {
                if k > 0 {
                    fact = fact * ((2 * k - 1) as f64) * ((2 * k) as f64);
                }
                series = series + m * sign / &fact;
                sign = -sign;
            }
            let dev = (via_rule - series.to_f64()).abs();
            assert!(
                dev <= 1e-13,
                "lambda={lam} z={z}: rule {via_rule} vs oracle series {series}, dev {dev:e}"
            );
        }
    }
}

#[test]
fn degenerate_and_invalid_orders_are_rejected() {
    let params = WeightParams::new(1.0, 0.5, DIGITS).unwrap();
    assert!(gauss_rule(&params, 0).is_err(), "N=0 has no rule");
    let rule = gauss_rule(&params, 1).unwrap();
    assert_eq!(rule.nodes.len(), 1);
    assert_eq!(rule.nodes[0], 0.0, "symmetric weight: single node at 0");
}
