//! Annular quadrature of the region `sigma_K < |xi| < 1` with radii
//! `sigma_k = e^{-k}`, for integrands singular at the origin.
//!
//! Each annulus carries a Gauss-Legendre radial rule; in d = 2 a uniform
//! angular rule is attached (trapezoid on the circle, spectrally accurate
//! for smooth angular dependence).

use crate::error::Result;
use crate::spectra;

/// One quadrature node of the annular rule: a frequency vector and weight.
#[derive(Debug, Clone, Copy)]
pub struct AnnularNode {
    pub xi: [f64; 2],
    pub weight: f64,
}

/// Quadrature over `{sigma_K < |xi| < 1}` in `R^d`, partitioned into
/// annuli `[sigma_{k+1}, sigma_k)`.
#[derive(Debug, Clone)]
pub struct RadialAnnuli {
    d: usize,
    count: usize,
    nodes_per_annulus: usize,
    angular_nodes: usize,
    nodes: Vec<AnnularNode>,
}

impl RadialAnnuli {
    pub fn new(k_ann: usize, nodes_per_annulus: usize, d: usize) -> Result<Self> {
        Self::with_angular(k_ann, nodes_per_annulus, d, 32)
    }

    pub fn with_angular(
        k_ann: usize,
        nodes_per_annulus: usize,
        d: usize,
        angular_nodes: usize,
    ) -> Result<Self> {
        assert!(k_ann >= 1, "need at least one annulus");
        assert!(d == 1 || d == 2);
        let (gx, gw) = gauss_legendre(nodes_per_annulus);
        let mut nodes = Vec::new();
        for k in 0..k_ann {
            let r0 = (-(k as f64)).exp();
            let r1 = (-(k as f64 + 1.0)).exp();
            let mid = 0.5 * (r0 + r1);
            let half = 0.5 * (r0 - r1);
            for (&t, &w) in gx.iter().zip(&gw) {
                let r = mid + half * t;
                let rw = half * w;
                if d == 1 {
                    nodes.push(AnnularNode { xi: [r, 0.0], weight: rw });
                    nodes.push(AnnularNode { xi: [-r, 0.0], weight: rw });
                } else {
                    let dth = 2.0 * std::f64::consts::PI / angular_nodes as f64;
                    for a in 0..angular_nodes {
                        let th = dth * a as f64;
                        nodes.push(AnnularNode {
                            xi: [r * th.cos(), r * th.sin()],
                            weight: rw * r * dth,
                        });
                    }
                }
            }
        }
        Ok(RadialAnnuli {
            d,
            count: k_ann,
            nodes_per_annulus,
            angular_nodes,
            nodes,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn annulus_count(&self) -> usize {
        self.count
    }

    pub fn nodes(&self) -> &[AnnularNode] {
        &self.nodes
    }

    /// Innermost radius `sigma_K = e^{-K}`.
    pub fn inner_radius(&self) -> f64 {
        (-(self.count as f64)).exp()
    }

    /// Integrate a function of the frequency vector over the covered region.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.xi[0], n.xi[1])).sum()
    }

    /// A refined rule over the same region (more annuli, doubled radial order).
    pub fn refined(&self) -> RadialAnnuli {
        RadialAnnuli::with_angular(
            self.count + 10,
            2 * self.nodes_per_annulus,
            self.d,
            2 * self.angular_nodes,
        )
        .expect("refinement parameters are valid")
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch nodes,
/// Christoffel weights).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let off: Vec<f64> = (1..order)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let nodes = spectra::sym_tridiagonal_eigenvalues(&vec![0.0; order], &off);
    let weights = nodes
        .iter()
        .map(|&x| {
            // w_i = 2 / sum_k p_k(x_i)^2 with orthonormal Legendre values
            let mut p_prev = (0.5f64).sqrt();
            let mut sum = p_prev * p_prev;
            let mut p_cur = x * (1.5f64).sqrt();
            for k in 1..order {
                sum += p_cur * p_cur;
                let kf = k as f64;
                let a = ((2.0 * kf + 1.0) * (2.0 * kf + 3.0)).sqrt() / (kf + 1.0);
                let b = kf / (kf + 1.0) * ((2.0 * kf + 3.0) / (2.0 * kf - 1.0)).sqrt();
                let p_next = a * x * p_cur - b * p_prev;
                p_prev = p_cur;
                p_cur = p_next;
            }
            1.0 / sum
        })
        .collect();
    (nodes, weights)
}
