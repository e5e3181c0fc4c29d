//! Lattice decomposition of `f(x) g(-i∇)` over integer-centered unit
//! hypercubes, the dyadic-class split into `A_n + B_n`, the singular
//! value bound with its `m^{-1/p'}` decay law, the weighted-L2 embedding
//! into `l^{p'}(L2)`, and the two-sided weak-`L^{2,infty}` check that
//! combines them through the oscillator spectral decomposition.
//!
//! Operators are assembled densely as `D_f C_g` with `C_g` the circulant
//! of the symbol; symbols are required to be even in `xi` so the
//! matrices stay real.

use std::collections::BTreeMap;
use std::sync::Arc;

use faer::Mat;

use crate::error::{Error, Result};
use crate::norms::{self, HermiteExpansion, RadialSymbol};
use crate::numgrid::{circulant_entry, circulant_kernel, HermiteBasis, SpaceGrid};
use crate::spectra;

/// Dense assembly cap (nodes), matching the desk-scale SVD budget.
pub const DENSE_CAP: usize = 4096;

/// Cube coefficients `a_m = ||f_m||_{L2}` (space) and `b_m = ||g_m||_{L2}`
/// (frequency), normalized to unit `l^{p'}` / weak-`l^{p'}` size, with
/// their dyadic class maps `2^{n-1} < a_m <= 2^n`.
#[derive(Debug, Clone)]
pub struct LatticeDecomposition {
    grid: Arc<SpaceGrid>,
    p_prime: f64,
    f: Vec<f64>,
    g: Vec<f64>,
    /// flat grid index -> class level of its space cube (None off-support)
    f_class: Vec<Option<i32>>,
    g_class: Vec<Option<i32>>,
    pub a_levels: Vec<i32>,
    pub b_levels: Vec<i32>,
    pub scale_a: f64,
    pub scale_b: f64,
}

fn dyadic_level(a: f64) -> i32 {
    // the level n with 2^{n-1} < a <= 2^n
    let mut n = a.log2().ceil() as i32;
    if a <= (2.0f64).powi(n - 1) {
        n -= 1;
    } else if a > (2.0f64).powi(n) {
        n += 1;
    }
    n
}

/// Cube index of a coordinate (no wrap; frequency cubes never wrap and
/// space cubes are only used through class masks).
fn cube_of(c: f64) -> i64 {
    (c + 0.5).floor() as i64
}

pub fn lattice_decompose(
    grid: Arc<SpaceGrid>,
    f: &[f64],
    g: &[f64],
    p_prime: f64,
) -> Result<LatticeDecomposition> {
    if !(1.0 < p_prime && p_prime < 2.0) {
        return Err(Error::ExponentOutOfRange(p_prime));
    }
    if grid.half_width().fract() != 0.0 {
        return Err(Error::NonIntegerL(grid.half_width()));
    }
    if f.iter().all(|&x| x == 0.0) || g.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroInput);
    }
    let d = grid.dim();
    let w_x = grid.cell_weight();
    let w_xi = (std::f64::consts::PI / grid.half_width()).powi(d as i32);

    let cube_key = |p: [f64; 2]| (cube_of(p[0]), if d == 2 { cube_of(p[1]) } else { 0 });
    let mut a: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for (i, &fi) in f.iter().enumerate() {
        if fi != 0.0 {
            *a.entry(cube_key(grid.node(i))).or_insert(0.0) += w_x * fi * fi;
        }
    }
    let mut b: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for (i, &gi) in g.iter().enumerate() {
        if gi != 0.0 {
            *b.entry(cube_key(grid.freq_node(i))).or_insert(0.0) += w_xi * gi * gi;
        }
    }
    let a: BTreeMap<_, f64> = a.into_iter().map(|(k, s)| (k, s.sqrt())).collect();
    let b: BTreeMap<_, f64> = b.into_iter().map(|(k, s)| (k, s.sqrt())).collect();

    let scale_a = a.values().map(|x| x.powf(p_prime)).sum::<f64>().powf(1.0 / p_prime);
    let mut bv: Vec<f64> = b.values().cloned().collect();
    bv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let scale_b = norms::sequence_norm(&bv, p_prime, true);

    let class_of = |norms: &BTreeMap<(i64, i64), f64>, scale: f64| -> BTreeMap<(i64, i64), i32> {
        norms
            .iter()
            .map(|(&k, &v)| (k, dyadic_level(v / scale)))
            .collect()
    };
    let ca = class_of(&a, scale_a);
    let cb = class_of(&b, scale_b);
    let mut a_levels: Vec<i32> = ca.values().cloned().collect();
    a_levels.sort_unstable();
    a_levels.dedup();
    let mut b_levels: Vec<i32> = cb.values().cloned().collect();
    b_levels.sort_unstable();
    b_levels.dedup();

    let f_class: Vec<Option<i32>> = (0..grid.len())
        .map(|i| {
            if f[i] != 0.0 {
                ca.get(&cube_key(grid.node(i))).copied()
            } else {
                None
            }
        })
        .collect();
    let g_class: Vec<Option<i32>> = (0..grid.len())
        .map(|i| {
            if g[i] != 0.0 {
                cb.get(&cube_key(grid.freq_node(i))).copied()
            } else {
                None
            }
        })
        .collect();

    Ok(LatticeDecomposition {
        f: f.iter().map(|&x| x / scale_a).collect(),
        g: g.iter().map(|&x| x / scale_b).collect(),
        grid,
        p_prime,
        f_class,
        g_class,
        a_levels,
        b_levels,
        scale_a,
        scale_b,
    })
}

impl LatticeDecomposition {
    pub fn grid(&self) -> &Arc<SpaceGrid> {
        &self.grid
    }

    pub fn p_prime(&self) -> f64 {
        self.p_prime
    }

    /// Normalized `l^{p'}` size of the `a` family (should be 1).
    pub fn a_lp_size(&self) -> f64 {
        let mut per_cube: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        let d = self.grid.dim();
        for (i, &fi) in self.f.iter().enumerate() {
            if fi != 0.0 {
                let p = self.grid.node(i);
                let k = (cube_of(p[0]), if d == 2 { cube_of(p[1]) } else { 0 });
                *per_cube.entry(k).or_insert(0.0) += self.grid.cell_weight() * fi * fi;
            }
        }
        per_cube
            .values()
            .map(|s| s.sqrt().powf(self.p_prime))
            .sum::<f64>()
            .powf(1.0 / self.p_prime)
    }

    /// Normalized weak-`l^{p'}` size of the `b` family (should be 1).
    pub fn b_weak_size(&self) -> f64 {
        let d = self.grid.dim();
        let w_xi = (std::f64::consts::PI / self.grid.half_width()).powi(d as i32);
        let mut per_cube: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for (i, &gi) in self.g.iter().enumerate() {
            if gi != 0.0 {
                let p = self.grid.freq_node(i);
                let k = (cube_of(p[0]), if d == 2 { cube_of(p[1]) } else { 0 });
                *per_cube.entry(k).or_insert(0.0) += w_xi * gi * gi;
            }
        }
        let mut v: Vec<f64> = per_cube.values().map(|s| s.sqrt()).collect();
        v.sort_by(|x, y| y.partial_cmp(x).unwrap());
        norms::sequence_norm(&v, self.p_prime, true)
    }

    /// Dyadic classes partition the populated cubes by construction;
    /// verify on the per-node maps.
    pub fn classes_partition_support(&self) -> bool {
        self.f
            .iter()
            .zip(&self.f_class)
            .all(|(&fi, cl)| (fi == 0.0) == cl.is_none())
            && self
                .g
                .iter()
                .zip(&self.g_class)
                .all(|(&gi, cl)| (gi == 0.0) == cl.is_none())
    }

    fn masked_f(&self, keep: impl Fn(i32) -> bool) -> Vec<f64> {
        self.f
            .iter()
            .zip(&self.f_class)
            .map(|(&fi, cl)| match cl {
                Some(l) if keep(*l) => fi,
                _ => 0.0,
            })
            .collect()
    }

    fn masked_g(&self, keep: impl Fn(i32) -> bool) -> Vec<f64> {
        self.g
            .iter()
            .zip(&self.g_class)
            .map(|(&gi, cl)| match cl {
                Some(l) if keep(*l) => gi,
                _ => 0.0,
            })
            .collect()
    }

    /// Dense matrix of the normalized `f(x) g(-i∇)`.
    pub fn full_matrix(&self) -> Result<Mat<f64>> {
        op_matrix(&self.grid, &self.f, &self.g)
    }

    /// `A_n = sum_{l+k <= n} f_l(x) g_k(-i∇)`.
    pub fn a_n_matrix(&self, n: i32) -> Result<Mat<f64>> {
        let m = self.grid.len();
        let mut acc = Mat::<f64>::zeros(m, m);
        for &l in &self.a_levels {
            let fl = self.masked_f(|x| x == l);
            let gk = self.masked_g(|k| l + k <= n);
            if gk.iter().all(|&x| x == 0.0) {
                continue;
            }
            acc += op_matrix(&self.grid, &fl, &gk)?;
        }
        Ok(acc)
    }
}

/// Dense `D_f C_g` for an even symbol `g` on the dual grid.
pub fn op_matrix(grid: &SpaceGrid, f: &[f64], g: &[f64]) -> Result<Mat<f64>> {
    let m = grid.len();
    if m > DENSE_CAP {
        return Err(Error::TooLarge(m, DENSE_CAP));
    }
    let kernel = circulant_kernel(grid, g);
    // realness needs an even symbol; verify by the conjugate-symmetry of
    // the kernel row sums
    Ok(Mat::from_fn(m, m, |i, j| {
        f[i] * circulant_entry(&kernel, grid, i, j)
    }))
}

/// Slopes and fitted constants of the `A_n`/`B_n` split over a level
/// window.
#[derive(Debug, Clone)]
pub struct AnBnReport {
    pub levels: Vec<i32>,
    pub hs_squared: Vec<f64>,
    pub trace_norm: Vec<f64>,
    pub recombination_max_err: f64,
    /// Least-squares slope of `log2 ||A_n||_HS^2` against `n`, and the
    /// theory rate `2 - p'`.
    pub hs_slope: f64,
    pub hs_rate: f64,
    /// Same for `log2 ||B_n||_tr`, against `1 - p'`.
    pub trace_slope: f64,
    pub trace_rate: f64,
    /// Fitted prefactors against `2^{(2-p')n}/(1-2^{p'-2})` and
    /// `2^{(1-p')n}/(1-2^{1-p'})`.
    pub c_hs: f64,
    pub c_trace: f64,
}

pub fn an_bn_check(dec: &LatticeDecomposition, levels: &[i32]) -> Result<AnBnReport> {
    let full = dec.full_matrix()?;
    let pp = dec.p_prime();
    let mut hs2 = Vec::new();
    let mut trn = Vec::new();
    let mut rec_err = 0.0f64;
    for (t, &n) in levels.iter().enumerate() {
        let a = dec.a_n_matrix(n)?;
        let b = &full - &a;
        hs2.push(frob_sq(&a));
        trn.push(
            spectra::singular_values(b.as_ref())
                .values()
                .iter()
                .sum::<f64>(),
        );
        if t == levels.len() / 2 {
            // recombination check at one level: sum of all class pieces
            let amax = dec.a_n_matrix(i32::MAX / 2)?;
            let mut err = 0.0f64;
            for i in 0..full.nrows() {
                for j in 0..full.ncols() {
                    err = err.max((amax[(i, j)] - full[(i, j)]).abs());
                }
            }
            rec_err = err;
        }
    }
    let fit = |ys: &[f64]| -> f64 {
        let pts: Vec<(f64, f64)> = levels
            .iter()
            .zip(ys)
            .filter(|(_, &y)| y > 1e-280)
            .map(|(&n, &y)| (n as f64, y.log2()))
            .collect();
        least_squares_slope(&pts)
    };
    let hs_rate = 2.0 - pp;
    let trace_rate = 1.0 - pp;
    let c_hs = levels
        .iter()
        .zip(&hs2)
        .map(|(&n, &y)| y / ((2.0f64).powf(hs_rate * n as f64) / (1.0 - (2.0f64).powf(pp - 2.0))))
        .fold(0.0f64, f64::max);
    let c_trace = levels
        .iter()
        .zip(&trn)
        .map(|(&n, &y)| y / ((2.0f64).powf(trace_rate * n as f64) / (1.0 - (2.0f64).powf(1.0 - pp))))
        .fold(0.0f64, f64::max);
    Ok(AnBnReport {
        levels: levels.to_vec(),
        hs_slope: fit(&hs2),
        trace_slope: fit(&trn),
        hs_squared: hs2,
        trace_norm: trn,
        recombination_max_err: rec_err,
        hs_rate,
        trace_rate,
        c_hs,
        c_trace,
    })
}

fn frob_sq(m: &Mat<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += m[(i, j)] * m[(i, j)];
        }
    }
    acc
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Measured singular values of `f(x) g(-i∇)` against the
/// `C m^{-1/p'} (2-p')^{1/p'-1}` envelope.
#[derive(Debug, Clone)]
pub struct SimonReport {
    pub mu: Vec<f64>,
    pub fitted_c: f64,
    /// log-log decay slope over the fit window (target `-1/p'`).
    pub slope: f64,
    pub f_lattice_norm: f64,
    pub g_weak_lattice_norm: f64,
}

impl SimonReport {
    /// Envelope value at 1-based index `m` with the fitted constant.
    pub fn bound_at(&self, p_prime: f64, m: usize) -> f64 {
        self.fitted_c
            * (m as f64).powf(-1.0 / p_prime)
            * (2.0 - p_prime).powf(1.0 / p_prime - 1.0)
            * self.f_lattice_norm
            * self.g_weak_lattice_norm
    }
}

pub fn simon_singular_bound(
    grid: &Arc<SpaceGrid>,
    f: &[f64],
    g: &[f64],
    p_prime: f64,
    fit_window: (usize, usize),
) -> Result<SimonReport> {
    if !(1.0 < p_prime && p_prime < 2.0) {
        return Err(Error::ExponentOutOfRange(p_prime));
    }
    let mat = op_matrix(grid, f, g)?;
    let mu = spectra::singular_values(mat.as_ref()).values().to_vec();
    let f_norm = {
        let cubes = norms::cube_lp_norms(grid, f, 2.0)?;
        norms::sequence_norm(&cubes, p_prime, false)
    };
    let g_norm = freq_cube_weak_norm(grid, g, p_prime);
    if mu.iter().all(|&x| x == 0.0) {
        return Ok(SimonReport {
            mu,
            fitted_c: 0.0,
            slope: 0.0,
            f_lattice_norm: f_norm,
            g_weak_lattice_norm: g_norm,
        });
    }
    let shape = |m: usize| {
        (m as f64).powf(-1.0 / p_prime) * (2.0 - p_prime).powf(1.0 / p_prime - 1.0) * f_norm * g_norm
    };
    let (lo, hi) = fit_window;
    let hi = hi.min(mu.len());
    let mut fitted_c = 0.0f64;
    let mut pts = Vec::new();
    for m in lo..=hi {
        let v = mu[m - 1];
        if v > 0.0 {
            fitted_c = fitted_c.max(v / shape(m));
            pts.push(((m as f64).ln(), v.ln()));
        }
    }
    Ok(SimonReport {
        mu,
        fitted_c,
        slope: least_squares_slope(&pts),
        f_lattice_norm: f_norm,
        g_weak_lattice_norm: g_norm,
    })
}

/// Weak `l^{p',infty}(L2)` size of a dual-grid symbol over frequency
/// cubes.
pub fn freq_cube_weak_norm(grid: &SpaceGrid, g: &[f64], p_prime: f64) -> f64 {
    let d = grid.dim();
    let w_xi = (std::f64::consts::PI / grid.half_width()).powi(d as i32);
    let mut per_cube: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for (i, &gi) in g.iter().enumerate() {
        if gi != 0.0 {
            let p = grid.freq_node(i);
            let k = (cube_of(p[0]), if d == 2 { cube_of(p[1]) } else { 0 });
            *per_cube.entry(k).or_insert(0.0) += w_xi * gi * gi;
        }
    }
    let mut v: Vec<f64> = per_cube.values().map(|s| s.sqrt()).collect();
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    norms::sequence_norm(&v, p_prime, true)
}

/// One embedding instance `||f||_{l^{p'}(L2)} <= C(d) factor ||<x>^r f||`.
#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub lhs: f64,
    pub proof_factor: f64,
    pub weighted_norm: f64,
    /// `lhs / (factor * weighted_norm)`; the d-constant.
    pub constant: f64,
}

pub fn embedding_check(grid: &SpaceGrid, f: &[f64], p_prime: f64, r: f64) -> Result<EmbeddingReport> {
    if !(1.0 <= p_prime && p_prime < 2.0) {
        return Err(Error::ExponentOutOfRange(p_prime));
    }
    let d = grid.dim() as f64;
    // 1/q = 1/p' - 1/2
    let q = 1.0 / (1.0 / p_prime - 0.5);
    if r * q <= d {
        return Err(Error::ExponentOutOfRange(p_prime));
    }
    let cubes = norms::cube_lp_norms(grid, f, 2.0)?;
    let lhs = norms::sequence_norm(&cubes, p_prime, false);
    let proof_factor = ((r * q - d + 1.0) / (r * q - d)).powf(1.0 / q);
    let weighted_norm = norms::weighted_l2_squared(
        grid,
        f,
        norms::WeightSpec::JapaneseLog { gamma: r, with_log: false },
    )
    .sqrt();
    let constant = if weighted_norm > 0.0 {
        lhs / (proof_factor * weighted_norm)
    } else {
        0.0
    };
    Ok(EmbeddingReport {
        lhs,
        proof_factor,
        weighted_norm,
        constant,
    })
}

/// A single-product factorization `g^2 = g_p * g_{p'}` by analytic
/// radial symbols.
#[derive(Debug, Clone, Copy)]
pub struct Factorization {
    pub g_p: RadialSymbol,
    pub g_p_prime: RadialSymbol,
}

/// One `p` on the grid with its candidate factorizations.
#[derive(Debug, Clone)]
pub struct FactorizationFamily {
    pub p: f64,
    pub candidates: Vec<Factorization>,
}

/// Default `p`-grid from the per-shell tuning
/// `1/p = 1/2 - delta/(d ln Lambda_{k+1})`, clamped to `(2, 2+delta]`.
pub fn default_p_grid(d: usize, delta: f64, k_range: impl Iterator<Item = usize>) -> Vec<f64> {
    let mut ps = Vec::new();
    for k in k_range {
        let ln_lambda = (std::f64::consts::E).powi(k as i32 + 1);
        let inv = 0.5 - delta / (d as f64 * ln_lambda);
        let p = (1.0 / inv).clamp(2.0 + 1e-9, 2.0 + delta);
        ps.push(p);
    }
    ps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ps
}

/// Per-shell contribution of the oscillator decomposition.
#[derive(Debug, Clone)]
pub struct ShellContribution {
    pub k: usize,
    /// `(ln Lambda_{k+1})^{1/2} ||pi_k f||_{L2}`.
    pub weighted_mass: f64,
    /// Fully representable at the given truncation order.
    pub complete: bool,
}

/// Two-sided check of the weak-`L^{2,infty}` estimate.
#[derive(Debug, Clone)]
pub struct Theorem17Report {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `sup_p inf_fact sqrt(||g_p|| ||g_{p'}||)`.
    pub sup_inf_factor: f64,
    pub oscillator_norm: f64,
    pub shells: Vec<ShellContribution>,
    /// Coefficient mass beyond the last representable shell.
    pub truncation_mass: f64,
}

pub fn theorem17_check(
    grid: &Arc<SpaceGrid>,
    f: &[f64],
    g: &[f64],
    families: &[FactorizationFamily],
    eps: f64,
    hermite_order: usize,
) -> Result<Theorem17Report> {
    if families.is_empty() || families.iter().any(|fam| fam.candidates.is_empty()) {
        return Err(Error::EmptyFactorizationFamily);
    }
    let d = grid.dim();
    let mat = op_matrix(grid, f, g)?;
    let lhs = spectra::singular_values(mat.as_ref()).weak_quasinorm(2.0)?;

    let mut sup_inf = 0.0f64;
    for fam in families {
        let p = fam.p;
        let pp = p / (p - 1.0);
        let mut inf = f64::INFINITY;
        for cand in &fam.candidates {
            let np = cand.g_p.weak_lp(p);
            let gpp: Vec<f64> = (0..grid.len())
                .map(|i| cand.g_p_prime.eval(grid.freq_abs(i)))
                .collect();
            let npp = freq_cube_weak_norm(grid, &gpp, pp);
            inf = inf.min((np * npp).sqrt());
        }
        sup_inf = sup_inf.max(inf);
    }

    let basis = Arc::new(HermiteBasis::new(d, hermite_order)?);
    let exp = HermiteExpansion::of_grid_function(basis.clone(), grid, f);
    let osc = norms::hermite_log_norm_of(&exp, eps)?;
    let rhs = osc * sup_inf;

    // pi_k masses: Lambda_k <= mu < Lambda_{k+1}, Lambda_k = e^{e^k}
    let lambda = |k: usize| (std::f64::consts::E).powi(k as i32).exp();
    let mu_max = basis.eigenvalue(hermite_order);
    let mut shells = Vec::new();
    let mut assigned = 0.0;
    for k in 1..=6usize {
        let (lo, hi) = (lambda(k), lambda(k + 1));
        if lo > mu_max {
            break;
        }
        let mass: f64 = exp
            .coeffs()
            .iter()
            .zip(exp.levels())
            .filter(|(_, &lv)| {
                let mu = basis.eigenvalue(lv);
                mu >= lo && mu < hi
            })
            .map(|(c, _)| c * c)
            .sum();
        assigned += mass;
        shells.push(ShellContribution {
            k,
            weighted_mass: (hi.ln()).sqrt() * mass.sqrt(),
            complete: hi <= mu_max,
        });
    }
    // mass below Lambda_1 belongs to no shell only if h < e^e, impossible
    let below: f64 = exp
        .coeffs()
        .iter()
        .zip(exp.levels())
        .filter(|(_, &lv)| basis.eigenvalue(lv) < lambda(1))
        .map(|(c, _)| c * c)
        .sum();
    let truncation_mass = (exp.captured_mass() - assigned - below).max(0.0) + exp.residual().max(0.0);

    Ok(Theorem17Report {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        sup_inf_factor: sup_inf,
        oscillator_norm: osc,
        shells,
        truncation_mass,
    })
}

/// `pi_k f` on the grid: reconstruct from the masked expansion.
pub fn pi_k_of(exp: &HermiteExpansion, grid: &SpaceGrid, k: usize) -> Vec<f64> {
    let basis = exp.basis();
    let lambda = |k: usize| (std::f64::consts::E).powi(k as i32).exp();
    let (lo, hi) = (lambda(k), lambda(k + 1));
    let n = grid.points_per_axis();
    let m = basis.order();
    let mut tab = vec![0.0f64; (m + 1) * n];
    for (i, &x) in grid.axis_nodes().iter().enumerate() {
        let col = crate::numgrid::oscillator_values(x, m);
        for (a, &val) in col.iter().enumerate() {
            tab[a * n + i] = val;
        }
    }
    let mut out = vec![0.0f64; grid.len()];
    let mut flat = 0usize;
    match grid.dim() {
        1 => {
            for alpha in 0..=m {
                let mu = basis.eigenvalue(alpha);
                let c = exp.coeffs()[flat];
                flat += 1;
                if mu >= lo && mu < hi && c != 0.0 {
                    for i in 0..n {
                        out[i] += c * tab[alpha * n + i];
                    }
                }
            }
        }
        _ => {
            for total in 0..=m {
                for a1 in 0..=total {
                    let a2 = total - a1;
                    let mu = basis.eigenvalue(total);
                    let c = exp.coeffs()[flat];
                    flat += 1;
                    if mu >= lo && mu < hi && c != 0.0 {
                        for ix in 0..n {
                            for iy in 0..n {
                                out[ix * n + iy] += c * tab[a1 * n + ix] * tab[a2 * n + iy];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid1(l: f64, n: usize) -> Arc<SpaceGrid> {
        Arc::new(SpaceGrid::new(1, l, n).unwrap())
    }

    fn power_tail(grid: &SpaceGrid, a: f64) -> Vec<f64> {
        (0..grid.len())
            .map(|i| {
                let r = grid.freq_abs(i);
                if r >= 1.0 {
                    r.powf(-a)
                } else {
                    0.0
                }
            })
            .collect()
    }

    #[test]
    fn decompose_normalizes_and_partitions() {
        let g = grid1(16.0, 256);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 2.0).exp());
        let pp = 1.8;
        let sym = power_tail(&g, 1.0 / pp);
        let dec = lattice_decompose(g.clone(), &f, &sym, pp).unwrap();
        assert_relative_eq!(dec.a_lp_size(), 1.0, max_relative = 1e-10);
        assert_relative_eq!(dec.b_weak_size(), 1.0, max_relative = 1e-10);
        assert!(dec.classes_partition_support());
    }

    #[test]
    fn decompose_rejects_bad_input() {
        let g = grid1(16.0, 64);
        let f: Vec<f64> = g.sample(|x, _| (-x * x).exp());
        let sym = power_tail(&g, 0.5);
        assert!(matches!(
            lattice_decompose(g.clone(), &f, &sym, 2.0),
            Err(Error::ExponentOutOfRange(_))
        ));
        let zero = vec![0.0; g.len()];
        assert!(matches!(
            lattice_decompose(g.clone(), &zero, &sym, 1.8),
            Err(Error::ZeroInput)
        ));
        let gf = Arc::new(SpaceGrid::new(1, 7.5, 60).unwrap());
        let f2: Vec<f64> = gf.sample(|x, _| (-x * x).exp());
        let sym2 = power_tail(&gf, 0.5);
        assert!(matches!(
            lattice_decompose(gf, &f2, &sym2, 1.8),
            Err(Error::NonIntegerL(_))
        ));
    }

    #[test]
    fn single_cube_coefficient() {
        let g = grid1(16.0, 512);
        let f: Vec<f64> = g.sample(|x, _| if (-0.5..0.5).contains(&x) { 1.0 } else { 0.0 });
        let sym = power_tail(&g, 1.0 / 1.8);
        let dec = lattice_decompose(g.clone(), &f, &sym, 1.8).unwrap();
        // one populated space cube, normalized to a_0 = 1, class 0
        assert_eq!(dec.a_levels, vec![0]);
    }

    #[test]
    fn an_plus_bn_reproduces_full() {
        let g = grid1(16.0, 256);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 8.0).exp());
        let pp = 1.8;
        let sym = power_tail(&g, 1.0 / pp);
        let dec = lattice_decompose(g.clone(), &f, &sym, pp).unwrap();
        let rep = an_bn_check(&dec, &[-2, -1, 0]).unwrap();
        assert!(rep.recombination_max_err < 1e-12, "err {}", rep.recombination_max_err);
    }

    #[test]
    fn slopes_within_rates() {
        let g = grid1(16.0, 1024);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 8.0).exp());
        for pp in [1.6, 1.8] {
            let sym = power_tail(&g, 1.0 / pp);
            let dec = lattice_decompose(g.clone(), &f, &sym, pp).unwrap();
            let levels: Vec<i32> = (-5..=5).collect();
            let rep = an_bn_check(&dec, &levels).unwrap();
            assert!(
                rep.hs_slope <= rep.hs_rate + 0.1,
                "p' = {pp}: hs slope {} vs rate {}",
                rep.hs_slope,
                rep.hs_rate
            );
            assert!(
                rep.trace_slope <= rep.trace_rate + 0.1,
                "p' = {pp}: trace slope {} vs rate {}",
                rep.trace_slope,
                rep.trace_rate
            );
            assert!(rep.c_hs.is_finite() && rep.c_trace.is_finite());
        }
    }

    #[test]
    fn simon_zero_input_and_gate() {
        let g = grid1(8.0, 128);
        let zero = vec![0.0; g.len()];
        let sym = power_tail(&g, 0.5);
        let rep = simon_singular_bound(&g, &zero, &sym, 1.8, (4, 64)).unwrap();
        assert_eq!(rep.fitted_c, 0.0);
        assert!(rep.mu.iter().all(|&x| x.abs() < 1e-12));
        let f: Vec<f64> = g.sample(|x, _| (-x * x).exp());
        assert!(matches!(
            simon_singular_bound(&g, &f, &sym, 2.0, (4, 64)),
            Err(Error::ExponentOutOfRange(_))
        ));
    }

    #[test]
    fn simon_decay_slope() {
        let g = grid1(8.0, 2048);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 2.0).exp());
        for pp in [1.6, 1.8] {
            let sym = power_tail(&g, 1.0 / pp);
            let rep = simon_singular_bound(&g, &f, &sym, pp, (4, 256)).unwrap();
            assert!(
                (rep.slope + 1.0 / pp).abs() <= 0.1,
                "p' = {pp}: slope {} target {}",
                rep.slope,
                -1.0 / pp
            );
            // measured values never exceed the fitted envelope
            for m in 4..=256 {
                assert!(rep.mu[m - 1] <= rep.bound_at(pp, m) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn embedding_constants_uniform() {
        let g = grid1(16.0, 512);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 2.0).exp());
        let mut consts = Vec::new();
        for pp in [1.6, 1.8, 1.9] {
            let q = 1.0 / (1.0 / pp - 0.5);
            let r = 1.0 / q + 0.6; // comfortably above d/q
            let rep = embedding_check(&g, &f, pp, r).unwrap();
            assert!(rep.lhs <= rep.constant * rep.proof_factor * rep.weighted_norm + 1e-12);
            consts.push(rep.constant);
        }
        let max = consts.iter().cloned().fold(f64::MIN, f64::max);
        let min = consts.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 1.2, "constants spread {consts:?}");
    }

    #[test]
    fn embedding_single_cube_margin() {
        // f = chi_0: lattice norm 1, weighted norm >= 1 and factor >= 1,
        // so the inequality holds with constant at most 1
        let g = grid1(16.0, 512);
        let f: Vec<f64> = g.sample(|x, _| if (-0.5..0.5).contains(&x) { 1.0 } else { 0.0 });
        let rep = embedding_check(&g, &f, 1.8, 1.0).unwrap();
        assert_relative_eq!(rep.lhs, 1.0, max_relative = 1e-12);
        assert!(rep.constant <= 1.0);
        assert!(rep.lhs <= rep.proof_factor * rep.weighted_norm);
    }

    #[test]
    fn embedding_rejects_critical_exponent() {
        let g = grid1(16.0, 128);
        let f: Vec<f64> = g.sample(|x, _| (-x * x).exp());
        // rq = d exactly
        let pp = 1.8;
        let q = 1.0 / (1.0 / pp - 0.5);
        assert!(matches!(
            embedding_check(&g, &f, pp, 1.0 / q),
            Err(Error::ExponentOutOfRange(_))
        ));
    }

    #[test]
    fn theorem17_gaussian_reference() {
        let g = grid1(16.0, 512);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 2.0).exp());
        let sym = power_tail(&g, 0.5); // |xi|^{-d/2} 1_{|xi|>=1}, d = 1
        let delta = 0.5;
        let ps = default_p_grid(1, delta, 1..=3);
        let families: Vec<FactorizationFamily> = ps
            .iter()
            .map(|&p| FactorizationFamily {
                p,
                candidates: vec![Factorization {
                    g_p: RadialSymbol::PowerTail { a: 1.0 / p, d: 1 },
                    g_p_prime: RadialSymbol::PowerTail { a: 1.0 - 1.0 / p, d: 1 },
                }],
            })
            .collect();
        let rep = theorem17_check(&g, &f, &sym, &families, 0.01, 120).unwrap();
        assert!(rep.sup_inf_factor <= 2.0, "factor {}", rep.sup_inf_factor);
        assert!(rep.lhs > 0.0 && rep.rhs > 0.0);
        // per-shell weighted masses decay
        assert!(!rep.shells.is_empty());
        for w in rep.shells.windows(2) {
            assert!(w[1].weighted_mass <= w[0].weighted_mass + 1e-12);
        }
        // zero f short-circuit
        let zero = vec![0.0; g.len()];
        let rep0 = theorem17_check(&g, &zero, &sym, &families, 0.01, 40).unwrap();
        assert_eq!(rep0.lhs, 0.0);
        assert_eq!(rep0.rhs, 0.0);
        // empty family rejected
        assert!(matches!(
            theorem17_check(&g, &f, &sym, &[], 0.01, 40),
            Err(Error::EmptyFactorizationFamily)
        ));
    }

    #[test]
    fn holder_in_weak_ideals_on_shells() {
        // (||pi_k f g(-i∇)||*_{2,inf})^2 <= ||pi_k f g_p|| * ||pi_k f g_p'||
        let g = grid1(8.0, 512);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 2.0).exp());
        let basis = Arc::new(HermiteBasis::new(1, 80).unwrap());
        let exp = HermiteExpansion::of_grid_function(basis, &g, &f);
        let sym = power_tail(&g, 0.5);
        let pk = pi_k_of(&exp, &g, 1);
        assert!(g.norm_l2(&pk) > 1e-6);
        for p in [2.01, 2.1, 2.5] {
            let pp = p / (p - 1.0);
            let gp = power_tail(&g, 1.0 / p);
            let gpp = power_tail(&g, 1.0 - 1.0 / p);
            let m = op_matrix(&g, &pk, &sym).unwrap();
            let mp = op_matrix(&g, &pk, &gp).unwrap();
            let mpp = op_matrix(&g, &pk, &gpp).unwrap();
            let w2 = spectra::singular_values(m.as_ref()).weak_quasinorm(2.0).unwrap();
            let wp = spectra::singular_values(mp.as_ref()).weak_quasinorm(p).unwrap();
            let wpp = spectra::singular_values(mpp.as_ref()).weak_quasinorm(pp).unwrap();
            assert!(
                w2 * w2 <= wp * wpp + 1e-9,
                "p = {p}: {} vs {}",
                w2 * w2,
                wp * wpp
            );
        }
    }

    #[test]
    fn fan_recombination_odd_indices() {
        // mu_m(full) <= mu_{(m+1)/2}(A_n) + mu_{(m+1)/2}(B_n) for odd m
        let g = grid1(16.0, 256);
        let f: Vec<f64> = g.sample(|x, _| (-x * x / 8.0).exp());
        let pp = 1.8;
        let sym = power_tail(&g, 1.0 / pp);
        let dec = lattice_decompose(g.clone(), &f, &sym, pp).unwrap();
        let full = dec.full_matrix().unwrap();
        let mu_full = spectra::singular_values(full.as_ref());
        for n in [-3, -1, 0] {
            let a = dec.a_n_matrix(n).unwrap();
            let b = &full - &a;
            let mu_a = spectra::singular_values(a.as_ref());
            let mu_b = spectra::singular_values(b.as_ref());
            let at = |s: &spectra::Spectrum, k: usize| s.values().get(k - 1).copied().unwrap_or(0.0);
            for m in (1..100).step_by(2) {
                let half = (m + 1) / 2;
                assert!(
                    at(&mu_full, m) <= at(&mu_a, half) + at(&mu_b, half) + 1e-10,
                    "n = {n}, m = {m}"
                );
            }
        }
    }
}
