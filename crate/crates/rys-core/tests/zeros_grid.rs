//! Grid tests for zeros: bracketing/symmetry/interlacing, electrostatic
//! equilibrium with the auxiliary boundary charge, energy minimality, the
//! charge-ladder identity, and zero dynamics in z.

use rys_core::recurrence::{ladder_data, recurrence_table};
use rys_core::zeros::{
    beta_ladder_residual, beta_squared, electrostatic_energy, electrostatic_residual,
    zero_context, zero_velocities, zeros,
};
use rys_core::WeightParams;

const LAMBDAS: [f64; 5] = [-0.4, 0.0, 0.5, 1.0, 2.5];
const DIGITS: u32 = 50;

#[test]
fn zeros_are_symmetric_bracketed_and_interlacing() {
    for lam in LAMBDAS {
        for z in [0.0, 1.0, 10.0] {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let rt = recurrence_table(&params, 14).unwrap();
            for n in 2..=12usize {
                let cur = zeros(&rt, n).unwrap().zeros;
                assert_eq!(cur.len(), n);
                for k in 0..n {
                    assert!(cur[k].abs() < 1.0);
                    assert!(
                        (cur[k] + cur[n - 1 - k]).abs() <= 1e-14,
                        "lambda={lam} z={z} N={n}: symmetry broken"
                    );
                    if k > 0 {
                        assert!(cur[k] > cur[k - 1], "zeros must be sorted and simple");
                    }
                }
                if n % 2 == 1 {
                    assert_eq!(cur[n / 2], 0.0, "odd degree has an exact zero at 0");
                }
                let prev = zeros(&rt, n - 1).unwrap().zeros;
                for k in 0..n - 1 {
                    assert!(
                        cur[k] < prev[k] && prev[k] < cur[k + 1],
                        "lambda={lam} z={z}: interlacing broken at N={n}"
                    );
                }
            }
        }
    }
}

#[test]
fn zeros_satisfy_the_electrostatic_equilibrium() {
    for lam in LAMBDAS {
        for z in [0.1, 1.0, 10.0] {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let rt = recurrence_table(&params, 17).unwrap();
            for n in [3usize, 8, 15] {
                let zs = zeros(&rt, n).unwrap();
                let ctx = zero_context(&rt, n).unwrap();
                let grad = electrostatic_residual(&zs, &ctx).unwrap();
                assert!(
                    grad <= 1e-8,
                    "lambda={lam} z={z} N={n}: gradient residual {grad:e}"
                );
            }
        }
    }
}

#[test]
fn equilibrium_is_an_energy_minimum() {
    // Jiggling the charges in a fixed deterministic pattern must raise the
    // total energy: the zero configuration minimizes it.
    let params = WeightParams::new(1.0, 1.0, DIGITS).unwrap();
    let rt = recurrence_table(&params, 10).unwrap();
    let n = 8;
    let zs = zeros(&rt, n).unwrap();
    let ctx = zero_context(&rt, n).unwrap();
    let e0 = electrostatic_energy(&zs.zeros, &ctx).unwrap();
    for (pass, amp) in [(1usize, 1e-4f64), (2, 1e-3), (3, 3e-3)] {
        let jiggled: Vec<f64> = zs
            .zeros
            .iter()
            .enumerate()
            .map(|(k, x)| x + amp * ((k * pass + 1) as f64).sin())
            .collect();
        let e1 = electrostatic_energy(&jiggled, &ctx).unwrap();
        assert!(
            e1 > e0,
            "pattern {pass}: energy fell from {e0} to {e1} under a perturbation"
        );
    }
}

#[test]
fn charge_ladder_identity_links_beta_to_r() {
    // z(beta_n^2 - 1) = R_n holds for every lambda; the bound beta_n >= 1
    // additionally requires R_n >= 0 and is asserted on lambda >= 1/2 only.
    for lam in LAMBDAS {
        for z in [0.1, 1.0, 10.0] {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let rt = recurrence_table(&params, 17).unwrap();
            for n in [2usize, 8, 15] {
                let blr = beta_ladder_residual(&rt, n).unwrap();
                assert!(
                    blr <= 1e-12,
                    "lambda={lam} z={z} N={n}: ladder residual {blr:e}"
                );
                let b2 = beta_squared(&rt, n).unwrap();
                assert!(b2.is_positive());
                if lam >= 0.5 {
                    assert!(
                        !(b2 - 1.0).is_negative(),
                        "lambda={lam} z={z} N={n}: beta dropped below 1"
                    );
                    let r = ladder_data(&rt, n).unwrap().r_n;
                    assert!(!r.is_negative());
                }
            }
        }
    }
}

#[test]
fn velocities_match_finite_differences_of_the_zero_curves() {
    let h = 1e-4;
    for lam in [-0.4, 0.5, 2.5] {
        for z in [0.5, 2.0] {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let rt = recurrence_table(&params, 12).unwrap();
            let n = 9;
            let vel = zero_velocities(&rt, n).unwrap();
            let at = |zv: f64| {
                let p = WeightParams::new(zv, lam, DIGITS).unwrap();
                zeros(&recurrence_table(&p, 12).unwrap(), n).unwrap().zeros
            };
            let above = at(z + h);
            let below = at(z - h);
            for k in 0..n {
                let fd = (above[k] - below[k]) / (2.0 * h);
                assert!(
                    (vel[k] - fd).abs() <= 1e-6,
                    "lambda={lam} z={z} k={k}: velocity {} vs FD {fd}",
                    vel[k]
                );
            }
        }
    }
}

#[test]
fn zeros_contract_monotonically_as_z_grows() {
    // Squared zeros decrease strictly along z; velocities always point
    // toward the origin.
    for lam in [-0.4, 1.0] {
        let n = 7;
        let mut prev: Option<Vec<f64>> = None;
        let mut z = 0.1;
        while z <= 2.0 + 1e-9 {
            let params = WeightParams::new(z, lam, DIGITS).unwrap();
            let rt = recurrence_table(&params, n + 2).unwrap();
            let cur = zeros(&rt, n).unwrap().zeros;
            let vel = zero_velocities(&rt, n).unwrap();
            for k in 0..n {
                if cur[k] != 0.0 {
                    assert!(
                        cur[k] * vel[k] < 0.0,
                        "lambda={lam} z={z} k={k}: velocity points outward"
                    );
                }
            }
            if let Some(p) = prev {
                for k in 0..n {
                    assert!(
                        cur[k] * cur[k] < p[k] * p[k] || (cur[k] == 0.0 && p[k] == 0.0),
                        "lambda={lam} z={z} k={k}: |zero| failed to shrink"
                    );
                }
            }
            prev = Some(cur);
            z += 0.1;
        }
    }
}
