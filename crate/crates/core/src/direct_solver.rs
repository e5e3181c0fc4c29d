//! Fourier-Galerkin discretization of `H_s = (-Delta)^s - V` and direct
//! counting of its negative eigenvalues. This is the independent
//! cross-check for the Birman-Schwinger counter.
//!
//! The matrix is assembled in the orthonormalized nodal basis, where the
//! kinetic part is the circulant `F^-1 diag(|xi|^{2s}) F` and the
//! potential is diagonal; this is DFT-conjugate to the plane-wave form
//! `diag(|xi_k|^{2s}) - Conv(V^)` and has the same spectrum, while
//! staying real symmetric for arbitrary sampled potentials.

use faer::Mat;

use crate::error::{Error, Result};
use crate::numgrid::{circulant_entry, circulant_kernel, SpaceGrid};
use crate::potentials::Potential;
use crate::spectra::{self, Spectrum};

/// Assembled Galerkin matrix with its metadata.
#[derive(Debug, Clone)]
pub struct GalerkinHs {
    mat: Mat<f64>,
    s: f64,
    /// `|xi_k|^{2s}` over the dual grid (flat, DFT order).
    kinetic_symbol: Vec<f64>,
}

impl GalerkinHs {
    pub fn matrix(&self) -> &Mat<f64> {
        &self.mat
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn kinetic_symbol(&self) -> &[f64] {
        &self.kinetic_symbol
    }

    /// Default threshold `1e-6 * max(1, max_k |xi_k|^{2s})`: the
    /// discretization noise floor scales with the kinetic range.
    pub fn default_threshold(&self) -> f64 {
        let m = self.kinetic_symbol.iter().cloned().fold(0.0, f64::max);
        1e-6 * m.max(1.0)
    }
}

/// Assemble `H_s` for a potential on its grid.
pub fn assemble_direct(grid: &SpaceGrid, p: &Potential, s: f64) -> Result<GalerkinHs> {
    if !(s >= 0.5) {
        return Err(Error::UnsupportedExponent(s));
    }
    let n = grid.len();
    let kinetic_symbol: Vec<f64> = grid.sample_symbol(|r| r.powf(2.0 * s));
    let kernel = circulant_kernel(grid, &kinetic_symbol);
    let values = p.values();
    let mat = Mat::from_fn(n, n, |i, j| {
        let t = if i >= j {
            circulant_entry(&kernel, grid, i, j)
        } else {
            circulant_entry(&kernel, grid, j, i)
        };
        t - if i == j { values[i] } else { 0.0 }
    });
    Ok(GalerkinHs { mat, s, kinetic_symbol })
}

/// Result of a negative-eigenvalue count at threshold `tau`.
#[derive(Debug, Clone)]
pub struct NegativeCount {
    /// Number of eigenvalues `< -tau`.
    pub count: usize,
    /// Eigenvalues in `(-tau, 0)`, reported so callers can flag
    /// near-threshold ambiguity rather than silently counting them.
    pub near_threshold: Vec<f64>,
    pub tau: f64,
}

/// Count eigenvalues of `H` below `-tau` (`tau > 0`).
pub fn count_negative(h: &GalerkinHs, tau: f64) -> NegativeCount {
    assert!(tau > 0.0);
    let spec = spectra::eigh_descending(h.mat.as_ref()).expect("assembled matrix is symmetric");
    count_from_spectrum(&spec, tau)
}

pub fn count_from_spectrum(spec: &Spectrum, tau: f64) -> NegativeCount {
    let count = spec.values().iter().filter(|&&v| v < -tau).count();
    let near_threshold = spec
        .values()
        .iter()
        .cloned()
        .filter(|&v| -tau < v && v < 0.0)
        .collect();
    NegativeCount { count, near_threshold, tau }
}

/// Bound-state count of the 1-d square well `V0 * 1_{|x| <= a}` at s = 1,
/// by the even/odd transcendental matching conditions: one root per
/// monotone branch, located by bisection, cross-checked against
/// `1 + floor(2 z0 / pi)`.
pub fn square_well_oracle(v0: f64, a: f64) -> usize {
    assert!(v0 > 0.0 && a > 0.0);
    let z0 = a * v0.sqrt();
    // even states: z tan z = sqrt(z0^2 - z^2), one root per branch
    //   [j pi, j pi + pi/2) that starts below z0;
    // odd states: -z cot z = sqrt(z0^2 - z^2), one root per branch
    //   [j pi + pi/2, (j+1) pi) likewise.
    let mut count = 0usize;
    let even = |z: f64| z * z.tan() - (z0 * z0 - z * z).max(0.0).sqrt();
    let odd = |z: f64| -z / z.tan() - (z0 * z0 - z * z).max(0.0).sqrt();
    let mut j = 0usize;
    loop {
        let lo = j as f64 * std::f64::consts::PI;
        if lo >= z0 {
            break;
        }
        debug_assert!(bisect_root(even, lo + 1e-12, (lo + std::f64::consts::FRAC_PI_2).min(z0)).is_some());
        count += 1;
        j += 1;
    }
    let mut j = 0usize;
    loop {
        let lo = j as f64 * std::f64::consts::PI + std::f64::consts::FRAC_PI_2;
        if lo >= z0 {
            break;
        }
        debug_assert!(bisect_root(odd, lo + 1e-12, ((j + 1) as f64 * std::f64::consts::PI).min(z0)).is_some());
        count += 1;
        j += 1;
    }
    debug_assert_eq!(count, 1 + (2.0 * z0 / std::f64::consts::PI).floor() as usize);
    count
}

/// Bisection on a bracket where `f` changes sign; `None` if it does not.
fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi - 1e-12));
    let mut hi_v = fhi;
    if flo == 0.0 {
        return Some(lo);
    }
    if flo.signum() == hi_v.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            hi_v = fm;
        }
    }
    let _ = hi_v;
    Some(0.5 * (lo + hi))
}
