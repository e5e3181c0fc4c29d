//! Gauss-Hermite machinery for the harmonic oscillator
//! `h = c_d (-Delta + x^2)` with `c_d = e^e / d`, normalized so the
//! bottom of the spectrum is exactly `e^e`.

use crate::error::{Error, Result};
use crate::spectra;

/// `e^e`, the bottom of the oscillator spectrum under the `c_d` scaling.
pub const E_POW_E: f64 = 15.154262241479262;

/// Tabulated 1-d oscillator eigenfunctions at Gauss-Hermite nodes, with
/// plain-measure quadrature weights and the mapped eigenvalue ladder.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    d: usize,
    order: usize,
    nodes: Vec<f64>,
    /// Christoffel weights for integrating against `dx` (not `e^{-x^2} dx`).
    weights: Vec<f64>,
    /// `table[alpha * Q + i] = psi_alpha(nodes[i])`, `alpha <= order`.
    table: Vec<f64>,
    gram_deviation: f64,
}

impl HermiteBasis {
    /// Build the basis for 1-d levels `0..=order` (in d = 2 the order is
    /// the maximal total degree; axis factors reuse the same 1-d table).
    pub fn new(d: usize, order: usize) -> Result<Self> {
        assert!(d == 1 || d == 2);
        assert!(order >= 1);
        let q = 2 * (order + 1);
        let nodes = gauss_hermite_nodes(q);
        let weights = christoffel_plain_weights(&nodes, q);
        let mut table = vec![0.0; (order + 1) * q];
        for (i, &x) in nodes.iter().enumerate() {
            let col = oscillator_values(x, order);
            for (alpha, &v) in col.iter().enumerate() {
                table[alpha * q + i] = v;
            }
        }
        let mut dev = 0.0f64;
        for a in 0..=order {
            for b in a..=order {
                let g: f64 = (0..q)
                    .map(|i| weights[i] * table[a * q + i] * table[b * q + i])
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                dev = dev.max((g - want).abs());
            }
        }
        if dev > 1e-6 {
            return Err(Error::OverflowOrder { order, deviation: dev });
        }
        Ok(HermiteBasis {
            d,
            order,
            nodes,
            weights,
            table,
            gram_deviation: dev,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gram_deviation(&self) -> f64 {
        self.gram_deviation
    }

    /// `c_d = e^e / d`.
    pub fn c_d(&self) -> f64 {
        E_POW_E / self.d as f64
    }

    /// Oscillator eigenvalue of total level `|alpha|`: `c_d (2|alpha| + d)`.
    pub fn eigenvalue(&self, total_level: usize) -> f64 {
        self.c_d() * (2.0 * total_level as f64 + self.d as f64)
    }

    /// `psi_alpha` at tabulated node `i`.
    pub fn value(&self, alpha: usize, i: usize) -> f64 {
        self.table[alpha * self.nodes.len() + i]
    }

    /// Evaluate `psi_alpha(x)` anywhere by the normalized recurrence.
    pub fn eval(&self, alpha: usize, x: f64) -> f64 {
        oscillator_values(x, alpha)[alpha]
    }
}

/// Normalized oscillator eigenfunction values `psi_0(x) ..= psi_max(x)`.
///
/// The three-term recurrence runs on rescaled values with an explicit
/// log-scale so the Gaussian seed can start arbitrarily deep in the
/// underflow range and still recover near the classical turning point.
pub fn oscillator_values(x: f64, max_level: usize) -> Vec<f64> {
    let log_seed = -0.25 * std::f64::consts::PI.ln() - 0.5 * x * x;
    // stored value = true value * e^{-sigma}
    let mut sigma = log_seed;
    let mut prev = 1.0f64; // psi_0 scaled
    let mut cur = std::f64::consts::SQRT_2 * x; // psi_1 scaled
    let mut out = Vec::with_capacity(max_level + 1);
    let unscale = |v: f64, sigma: f64| {
        if v == 0.0 {
            0.0
        } else {
            v.signum() * (v.abs().ln() + sigma).exp()
        }
    };
    out.push(unscale(prev, sigma));
    if max_level >= 1 {
        out.push(unscale(cur, sigma));
    }
    for k in 1..max_level {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = prev.abs().max(cur.abs());
        if mag > 1e250 {
            prev *= 1e-250;
            cur *= 1e-250;
            sigma += 250.0 * std::f64::consts::LN_10;
        }
        out.push(unscale(cur, sigma));
    }
    out
}

/// Gauss-Hermite nodes (physicists' weight) via the Jacobi matrix.
pub fn gauss_hermite_nodes(q: usize) -> Vec<f64> {
    let off: Vec<f64> = (1..q).map(|k| (k as f64 / 2.0).sqrt()).collect();
    spectra::sym_tridiagonal_eigenvalues(&vec![0.0; q], &off)
}

/// Weights for integrating `int f(x) dx` at the Gauss-Hermite nodes:
/// `w_i = 1 / sum_{k<q} psi_k(x_i)^2` (Christoffel function of the
/// oscillator functions), exact for `f = e^{-x^2} * poly(deg < 2q)`.
pub fn christoffel_plain_weights(nodes: &[f64], q: usize) -> Vec<f64> {
    nodes
        .iter()
        .map(|&x| {
            let vals = oscillator_values(x, q - 1);
            1.0 / vals.iter().map(|v| v * v).sum::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numgrid::grid::{apply_multiplier_real, SpaceGrid};
    use approx::assert_relative_eq;

    #[test]
    fn ground_state_normalized() {
        let b = HermiteBasis::new(1, 1).unwrap();
        let q = b.nodes().len();
        let norm: f64 = (0..q).map(|i| b.weights()[i] * b.value(0, i).powi(2)).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
        // point value psi_0(0) = pi^{-1/4}
        assert_relative_eq!(
            b.eval(0, 0.0),
            std::f64::consts::PI.powf(-0.25),
            epsilon = 1e-14
        );
    }

    #[test]
    fn gram_identity_at_large_order() {
        let b = HermiteBasis::new(1, 200).unwrap();
        assert!(b.gram_deviation() < 1e-8, "deviation {}", b.gram_deviation());
        // very large order still stable thanks to the scaled recurrence
        let b = HermiteBasis::new(1, 400).unwrap();
        assert!(b.gram_deviation() < 1e-8, "deviation {}", b.gram_deviation());
    }

    #[test]
    fn smallest_eigenvalue_is_e_to_e_exactly() {
        for d in [1usize, 2] {
            let b = HermiteBasis::new(d, 4).unwrap();
            assert_eq!(b.eigenvalue(0), E_POW_E);
        }
    }

    #[test]
    fn ground_state_oscillator_identity_spectral() {
        // (-Delta + x^2) psi_0 = psi_0, applying -Delta as a Fourier
        // multiplier on a grid and x^2 pointwise
        let g = SpaceGrid::new(1, 12.0, 256).unwrap();
        let psi0: Vec<f64> = g.sample(|x, _| std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp());
        let sym: Vec<f64> = g.sample_symbol(|r| r * r);
        let lap = apply_multiplier_real(&g, &sym, &psi0).unwrap();
        let mut resid2 = 0.0;
        for (i, z) in lap.iter().enumerate() {
            let x = g.node(i)[0];
            let hv = z.re + x * x * psi0[i];
            resid2 += (hv - psi0[i]).powi(2);
        }
        assert!((g.cell_weight() * resid2).sqrt() < 1e-8);
    }

    #[test]
    fn quadratic_form_symbol_returns_ladder() {
        // c_d(-Delta + x^2) psi_alpha = c_d (2 alpha + d) psi_alpha, d = 1
        let g = SpaceGrid::new(1, 14.0, 512).unwrap();
        let b = HermiteBasis::new(1, 8).unwrap();
        let sym: Vec<f64> = g.sample_symbol(|r| r * r);
        for alpha in [0usize, 1, 3, 8] {
            let psi: Vec<f64> = g.sample(|x, _| b.eval(alpha, x));
            let lap = apply_multiplier_real(&g, &sym, &psi).unwrap();
            let cd = b.c_d();
            let want = b.eigenvalue(alpha);
            let mut resid2 = 0.0;
            for (i, z) in lap.iter().enumerate() {
                let x = g.node(i)[0];
                let hv = cd * (z.re + x * x * psi[i]);
                resid2 += (hv - want * psi[i]).powi(2);
            }
            assert!(
                (g.cell_weight() * resid2).sqrt() < 1e-6,
                "alpha = {alpha}, resid = {}",
                (g.cell_weight() * resid2).sqrt()
            );
        }
    }

    #[test]
    fn ladder_d2_tensor() {
        let b = HermiteBasis::new(2, 3).unwrap();
        assert_relative_eq!(b.eigenvalue(1), E_POW_E / 2.0 * 4.0);
    }

    #[test]
    fn scaled_recurrence_handles_deep_underflow() {
        // at x = 40 the seed e^{-800} underflows f64, but the level-800
        // neighborhood recovers to O(1); values must be finite and the
        // small-level entries exactly representable zeros
        let vals = oscillator_values(40.0, 900);
        assert!(vals.iter().all(|v| v.is_finite()));
        assert_eq!(vals[0], 0.0);
        assert!(vals[850].abs() > 1e-8);
    }
}
