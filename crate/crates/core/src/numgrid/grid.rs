//! Uniform periodic grids on `[-L, L)^d` and their dual frequency grids.
//!
//! The domain is a truncated torus so Fourier multipliers are diagonal in
//! the plane-wave basis and exactly representable on the grid. Grid
//! functions are stored as flat arrays in row-major axis order (axis 0
//! slowest).

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform spatial grid over `[-L, L)^d` with its paired frequency grid.
#[derive(Debug, Clone)]
pub struct SpaceGrid {
    d: usize,
    l: f64,
    n: usize,
    axis: Vec<f64>,
    freq: FreqGrid,
}

/// Dual nodes `xi_k = (pi/L) k` per axis, `k in {-N/2, ..., N/2-1}`,
/// stored in DFT index order (`0, 1, ..., N/2-1, -N/2, ..., -1`).
#[derive(Debug, Clone)]
pub struct FreqGrid {
    axis: Vec<f64>,
    nyquist: f64,
}

impl FreqGrid {
    /// Frequency of axis index `j` in DFT order.
    pub fn axis_nodes(&self) -> &[f64] {
        &self.axis
    }

    /// `Xi_max = pi N / (2 L)`.
    pub fn nyquist(&self) -> f64 {
        self.nyquist
    }
}

impl SpaceGrid {
    pub fn new(d: usize, l: f64, n: usize) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::BadDimension(d));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::NonpositiveL(l));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::OddN(n));
        }
        let dx = 2.0 * l / n as f64;
        let axis = (0..n).map(|i| -l + dx * i as f64).collect();
        let dxi = std::f64::consts::PI / l;
        let freq_axis = (0..n)
            .map(|j| {
                let k = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                dxi * k as f64
            })
            .collect();
        let freq = FreqGrid {
            axis: freq_axis,
            nyquist: std::f64::consts::PI * n as f64 / (2.0 * l),
        };
        Ok(SpaceGrid { d, l, n, axis, freq })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of nodes, `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one cell, `(2L/N)^d`.
    pub fn cell_weight(&self) -> f64 {
        (2.0 * self.l / self.n as f64).powi(self.d as i32)
    }

    pub fn axis_nodes(&self) -> &[f64] {
        &self.axis
    }

    pub fn freq(&self) -> &FreqGrid {
        &self.freq
    }

    /// Coordinates of the flat node index (row-major; `y = 0` in d = 1).
    pub fn node(&self, idx: usize) -> [f64; 2] {
        match self.d {
            1 => [self.axis[idx], 0.0],
            _ => [self.axis[idx / self.n], self.axis[idx % self.n]],
        }
    }

    /// Frequency vector of the flat dual index (row-major, DFT order).
    pub fn freq_node(&self, idx: usize) -> [f64; 2] {
        match self.d {
            1 => [self.freq.axis[idx], 0.0],
            _ => [self.freq.axis[idx / self.n], self.freq.axis[idx % self.n]],
        }
    }

    /// |xi| at the flat dual index.
    pub fn freq_abs(&self, idx: usize) -> f64 {
        let p = self.freq_node(idx);
        p[0].hypot(p[1])
    }

    /// Sample a scalar field over all nodes.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let p = self.node(i);
                f(p[0], p[1])
            })
            .collect()
    }

    /// Sample a radial frequency symbol over all dual nodes (DFT order).
    pub fn sample_symbol(&self, m: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| m(self.freq_abs(i))).collect()
    }

    /// Grid L2 inner product `w * sum u_i v_i`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.cell_weight() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm_l2(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }
}

/// Forward/inverse DFT on flattened row-major arrays, applied axis by axis.
/// The transform pair is unnormalized forward, `1/N^d` inverse, so a
/// round trip is the identity.
pub struct Dft {
    n: usize,
    d: usize,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    inv: Arc<dyn rustfft::Fft<f64>>,
}

impl Dft {
    pub fn new(grid: &SpaceGrid) -> Self {
        let mut planner = FftPlanner::new();
        Dft {
            n: grid.points_per_axis(),
            d: grid.dim(),
            fwd: planner.plan_fft_forward(grid.points_per_axis()),
            inv: planner.plan_fft_inverse(grid.points_per_axis()),
        }
    }

    fn apply(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let fft = if inverse { &self.inv } else { &self.fwd };
        match self.d {
            1 => fft.process(data),
            _ => {
                // rows (contiguous), then columns via transpose
                for row in data.chunks_exact_mut(n) {
                    fft.process(row);
                }
                transpose_square(data, n);
                for row in data.chunks_exact_mut(n) {
                    fft.process(row);
                }
                transpose_square(data, n);
            }
        }
        if inverse {
            let scale = 1.0 / (n.pow(self.d as u32) as f64);
            for z in data.iter_mut() {
                *z *= scale;
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, false);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, true);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Apply the Fourier multiplier with symbol values `m` (flat, DFT order)
/// to the complex grid function `u`: inverse-DFT(m . DFT(u)).
pub fn apply_multiplier(grid: &SpaceGrid, symbol: &[f64], u: &[Complex64]) -> Result<Vec<Complex64>> {
    assert_eq!(symbol.len(), grid.len());
    assert_eq!(u.len(), grid.len());
    for (i, &s) in symbol.iter().enumerate() {
        if !s.is_finite() {
            return Err(Error::NonfiniteSymbol(grid.freq_abs(i)));
        }
    }
    let dft = Dft::new(grid);
    let mut buf = u.to_vec();
    dft.forward(&mut buf);
    for (z, &s) in buf.iter_mut().zip(symbol) {
        *z *= s;
    }
    dft.inverse(&mut buf);
    Ok(buf)
}

/// Real-input convenience wrapper around [`apply_multiplier`].
pub fn apply_multiplier_real(grid: &SpaceGrid, symbol: &[f64], u: &[f64]) -> Result<Vec<Complex64>> {
    let cu: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    apply_multiplier(grid, symbol, &cu)
}

/// First column of the circulant `F^-1 diag(r) F` (real part; the
/// imaginary part vanishes for symbols even under `xi -> -xi`).
/// Entry `(i, j)` of the circulant is `col[(i - j) mod N]` per axis.
pub fn circulant_kernel(grid: &SpaceGrid, symbol: &[f64]) -> Vec<f64> {
    let dft = Dft::new(grid);
    let mut buf: Vec<Complex64> = symbol.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    dft.inverse(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Circulant entry lookup for flat row-major indices on `grid`.
#[inline]
pub fn circulant_entry(kernel: &[f64], grid: &SpaceGrid, i: usize, j: usize) -> f64 {
    let n = grid.points_per_axis();
    match grid.dim() {
        1 => kernel[(i + n - j) % n],
        _ => {
            let (ix, iy) = (i / n, i % n);
            let (jx, jy) = (j / n, j % n);
            let dx = (ix + n - jx) % n;
            let dy = (iy + n - jy) % n;
            kernel[dx * n + dy]
        }
    }
}
