//! Gauss quadrature via the Jacobi matrix and a Golub-Welsch eigensolve.
//!
//! The symmetric weight gives a zero-diagonal Jacobi matrix whose
//! symmetrized off-diagonals are √γₖ. Nodes are its eigenvalues; weights are
//! s₀ times the squared first eigenvector components. The off-diagonals are
//! generated in extended precision (the numerically sensitive step) and the
//! eigensolve runs at machine double, which is the precision at which rules
//! are consumed.

use crate::error::{Result, RysError};
use crate::moments::{moment, MomentTable, WeightParams};
use crate::numerics::XReal;
use crate::recurrence::{recurrence_table, RecurrenceTable};

/// Symmetrized Jacobi matrix of order N: zero diagonal, off-diagonals
/// √γ₁ … √γ_{N−1}.
#[derive(Debug, Clone)]
pub struct JacobiMatrix {
    pub params: WeightParams,
    off: Vec<XReal>,
}

impl JacobiMatrix {
    pub fn order(&self) -> usize {
        self.off.len() + 1
    }

    /// Off-diagonal entries √γ₁ … √γ_{N−1}.
    pub fn off_diagonal(&self) -> &[XReal] {
        &self.off
    }
}

/// A Gauss rule at machine-double precision.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub params: WeightParams,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Builds the order-N symmetrized Jacobi matrix from a recurrence table.
pub fn jacobi_matrix(rt: &RecurrenceTable, n: usize) -> Result<JacobiMatrix> {
    if n < 1 {
        return Err(RysError::Domain("Jacobi matrix needs N >= 1".into()));
    }
    if n > rt.n_max() + 1 {
        return Err(RysError::IndexRange(format!(
            "Jacobi matrix of order {n} needs gamma_{}, table stops at gamma_{}",
            n - 1,
            rt.n_max()
        )));
    }
    let mut off = Vec::with_capacity(n - 1);
    for k in 1..n {
        let g = rt.gamma(k)?;
        if !g.is_positive() {
            return Err(RysError::Domain(format!(
                "gamma_{k} = {g} is not positive; cannot symmetrize"
            )));
        }
        off.push(g.sqrt());
    }
    Ok(JacobiMatrix {
        params: rt.params,
        off,
    })
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating only the
/// first row of the eigenvector matrix. On return `d` holds eigenvalues
/// (unsorted) and `q` the first components. Fails after `30·n` sweeps on any
/// single eigenvalue.
pub(crate) fn ql_first_row(d: &mut [f64], e: &mut [f64], q: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let max_iter = 30 * n;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // locate a split point with a negligible subdiagonal
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(RysError::NonConvergence(format!(
                    "tridiagonal QL did not converge for eigenvalue {l} after {max_iter} sweeps"
                )));
            }
            // Wilkinson-style shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // rotate the first-row components of columns i, i+1
                f = q[i + 1];
                q[i + 1] = s * q[i] + c * f;
                q[i] = c * q[i] - s * f;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weight_k is
/// s₀·(first eigenvector component)². Nodes are sorted ascending and the
/// ±pair symmetry of the even weight is enforced by pairwise averaging
/// (cleaning eigensolver roundoff; exactness is verified independently).
pub fn golub_welsch(jm: &JacobiMatrix, s0: &XReal) -> Result<QuadratureRule> {
    let n = jm.order();
    let mut d = vec![0.0f64; n];
    let mut e: Vec<f64> = jm.off.iter().map(|x| x.to_f64()).collect();
    e.push(0.0);
    let mut q = vec![0.0f64; n];
    q[0] = 1.0;
    ql_first_row(&mut d, &mut e, &mut q)?;
    let s0_f = s0.to_f64();
    let mut pairs: Vec<(f64, f64)> = d
        .iter()
        .zip(&q)
        .map(|(&x, &c)| (x, s0_f * c * c))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for k in 0..n / 2 {
        let m = n - 1 - k;
        let x = 0.5 * (nodes[m] - nodes[k]);
        nodes[k] = -x;
        nodes[m] = x;
        let w = 0.5 * (weights[k] + weights[m]);
        weights[k] = w;
        weights[m] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    for k in 0..n {
        if !(weights[k] > 0.0) {
            return Err(RysError::NonConvergence(format!(
                "nonpositive weight at node {k}: {}",
                weights[k]
            )));
        }
        if k > 0 && !(nodes[k] > nodes[k - 1]) {
            return Err(RysError::NonConvergence(format!(
                "nodes not strictly increasing at index {k}"
            )));
        }
    }
    Ok(QuadratureRule {
        params: jm.params,
        nodes,
        weights,
    })
}

/// Convenience pipeline: recurrence table (internally precision-boosted),
/// Jacobi matrix, Golub-Welsch.
pub fn gauss_rule(params: &WeightParams, n: usize) -> Result<QuadratureRule> {
    let rt = recurrence_table(params, n.max(1))?;
    let jm = jacobi_matrix(&rt, n)?;
    let s0 = moment(params, 0)?;
    golub_welsch(&jm, &s0)
}

/// Applies the rule: Σ wₖ f(xₖ).
pub fn integrate<F: Fn(f64) -> f64>(rule: &QuadratureRule, f: F) -> f64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * f(x))
        .sum()
}

/// Max relative moment-matching error over even m ≤ 2N−2 (odd m are exactly
/// 0 = 0 by the enforced node symmetry).
pub fn exactness_report(rule: &QuadratureRule, mt: &MomentTable) -> Result<f64> {
    let n = rule.order();
    if mt.max_index() + 2 < 2 * n {
        return Err(RysError::IndexRange(format!(
            "exactness to degree {} needs moments through s_{}, table stops at s_{}",
            2 * n - 1,
            2 * n - 2,
            mt.max_index()
        )));
    }
    let mut worst = 0.0f64;
    for m in (0..=2 * n - 2).step_by(2) {
        let qsum = integrate(rule, |x| x.powi(m as i32));
        let sm = mt.s(m)?.to_f64();
        let rel = ((qsum - sm) / sm).abs();
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moment_table;

    fn params(z: f64, lambda: f64) -> WeightParams {
        WeightParams::new(z, lambda, 50).unwrap()
    }

    #[test]
    fn jacobi_matrix_orders() {
        let rt = recurrence_table(&params(1.0, 1.0), 6).unwrap();
        assert_eq!(jacobi_matrix(&rt, 1).unwrap().off_diagonal().len(), 0);
        let jm2 = jacobi_matrix(&rt, 2).unwrap();
        assert_eq!(jm2.off_diagonal().len(), 1);
        let expect = rt.gamma(1).unwrap().sqrt();
        assert!((&jm2.off_diagonal()[0] - &expect).abs().is_zero());
    }

    #[test]
    fn jacobi_matrix_legendre_off_diagonals() {
        let pm = params(0.0, 0.5);
        let p = pm.prec();
        let rt = recurrence_table(&pm, 5).unwrap();
        let jm = jacobi_matrix(&rt, 5).unwrap();
        for (k, off) in jm.off_diagonal().iter().enumerate() {
            let kf = (k + 1) as f64;
            let expect = (p.f(kf * kf) / p.f(4.0 * kf * kf - 1.0)).sqrt();
            assert!((off - &expect).abs() < p.pow10(-40), "k={}", k + 1);
        }
    }

    #[test]
    fn one_point_rule() {
        let pm = params(1.0, 1.0);
        let rule = gauss_rule(&pm, 1).unwrap();
        assert_eq!(rule.nodes, vec![0.0]);
        let s0 = moment(&pm, 0).unwrap().to_f64();
        assert!((rule.weights[0] - s0).abs() < 1e-15 * s0);
    }

    #[test]
    fn two_point_rule_closed_form() {
        let pm = params(1.0, 1.0);
        let rt = recurrence_table(&pm, 2).unwrap();
        let rule = gauss_rule(&pm, 2).unwrap();
        let s0 = moment(&pm, 0).unwrap().to_f64();
        let g1 = rt.gamma(1).unwrap().to_f64();
        assert!((rule.nodes[1] - g1.sqrt()).abs() < 1e-14);
        assert!((rule.nodes[0] + g1.sqrt()).abs() < 1e-14);
        for w in &rule.weights {
            assert!((w - s0 / 2.0).abs() < 1e-14 * s0);
        }
    }

    #[test]
    fn ten_point_rule_is_gauss_legendre_at_unit_weight() {
        // classical 10-point Gauss-Legendre abscissas/weights on (−1,1)
        let nodes = [
            0.148_874_338_981_631_2,
            0.433_395_394_129_247_2,
            0.679_409_568_299_024_4,
            0.865_063_366_688_984_5,
            0.973_906_528_517_171_7,
        ];
        let weights = [
            0.295_524_224_714_752_9,
            0.269_266_719_309_996_3,
            0.219_086_362_515_982,
            0.149_451_349_150_580_6,
            0.066_671_344_308_688_14,
        ];
        let rule = gauss_rule(&params(0.0, 0.5), 10).unwrap();
        for k in 0..5 {
            assert!((rule.nodes[5 + k] - nodes[k]).abs() < 1e-12, "node {k}");
            assert!((rule.nodes[4 - k] + nodes[k]).abs() < 1e-12, "node -{k}");
            assert!((rule.weights[5 + k] - weights[k]).abs() < 1e-12, "weight {k}");
        }
    }

    #[test]
    fn rule_invariants_on_grid() {
        for (z, lam) in [(0.0, 1.0), (1.0, -0.4), (10.0, 2.5), (0.1, 0.0)] {
            let pm = params(z, lam);
            let rule = gauss_rule(&pm, 12).unwrap();
            let s0 = moment(&pm, 0).unwrap().to_f64();
            let sum: f64 = rule.weights.iter().sum();
            assert!(((sum - s0) / s0).abs() < 1e-12, "weight sum z={z} lam={lam}");
            for k in 0..12 {
                assert!(rule.weights[k] > 0.0);
                assert!(rule.nodes[k].abs() < 1.0);
                assert_eq!(rule.nodes[k], -rule.nodes[11 - k], "symmetry k={k}");
            }
        }
    }

    #[test]
    fn integrate_polynomials_within_exactness_degree() {
        let pm = params(1.0, 1.0);
        let n = 8;
        let rule = gauss_rule(&pm, n).unwrap();
        let s0 = moment(&pm, 0).unwrap().to_f64();
        assert!((integrate(&rule, |_| 1.0) - s0).abs() < 1e-13 * s0);
        // odd power at top exactness degree integrates to 0 by symmetry
        let odd = integrate(&rule, |x| x.powi(2 * n as i32 - 1));
        assert!(odd.abs() < 1e-16);
        let top = integrate(&rule, |x| x.powi(2 * n as i32 - 2));
        let s_top = moment(&pm, 2 * n - 2).unwrap().to_f64();
        assert!(((top - s_top) / s_top).abs() < 1e-12);
    }

    #[test]
    fn exactness_reports_small_errors() {
        let pm = params(1.0, 1.0);
        let rule = gauss_rule(&pm, 10).unwrap();
        let mt = moment_table(&pm, 9).unwrap();
        assert!(exactness_report(&rule, &mt).unwrap() <= 1e-12);
        let rule = gauss_rule(&pm, 25).unwrap();
        let mt = moment_table(&pm, 24).unwrap();
        assert!(exactness_report(&rule, &mt).unwrap() <= 1e-11);
    }

    #[test]
    fn exactness_rejects_short_table() {
        let pm = params(1.0, 1.0);
        let rule = gauss_rule(&pm, 10).unwrap();
        let mt = moment_table(&pm, 5).unwrap();
        assert!(matches!(
            exactness_report(&rule, &mt),
            Err(RysError::IndexRange(_))
        ));
    }

    #[test]
    fn nodes_interlace_between_consecutive_orders() {
        let pm = params(1.0, 0.5);
        let r7 = gauss_rule(&pm, 7).unwrap();
        let r8 = gauss_rule(&pm, 8).unwrap();
        for k in 0..7 {
            assert!(
                r8.nodes[k] < r7.nodes[k] && r7.nodes[k] < r8.nodes[k + 1],
                "interlacing fails at k={k}"
            );
        }
    }
}
