//! Configuration-driven experiment runner: declarative configs (TOML,
//! with JSON accepted), deterministic artifacts (`summary.json`,
//! `reports.csv`, `curves/*.tsv`), and the self-test property suites.
//!
//! Outputs are byte-identical for identical config and seed: maps are
//! key-sorted, nothing is timestamped, and all randomness flows from the
//! seeded generator recorded in the summary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::birman_schwinger::{self as bs, BsOptions, Route, Window};
use crate::bounds::{self, BoundReport, BoundsOptions, TheoremId};
use crate::cwikel;
use crate::direct_solver;
use crate::error::{Error, Result};
use crate::norms::{self, RadialSymbol, WeightSpec};
use crate::numgrid::SpaceGrid;
use crate::potentials::{Potential, Shape};
use crate::spectra;

pub const SUMMARY_SCHEMA: &str = "fracbound.summary/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Count,
    Verify,
    Sweep,
    Quasinorm,
    Cwikel,
    Selftest,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub d: usize,
    pub l: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { d: 1, l: 20.0, n: 256 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum PotentialConfig {
    Well { v0: f64, a: f64 },
    Gaussian { v0: f64, w: f64 },
    Power { v0: f64, beta: f64, core: f64 },
    Bump { v0: f64, a: f64 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    pub s: f64,
    pub eps: f64,
    pub delta: f64,
    pub coupling: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { s: 1.0, eps: 0.01, delta: 0.5, coupling: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    /// Energies `-2^{-j}`, `j = 0..=j_max`.
    pub j_max: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { j_max: 20 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub seed: u64,
    pub grid: GridConfig,
    pub potential: Option<PotentialConfig>,
    pub params: Params,
    pub sweep: SweepConfig,
    pub lambdas: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: None,
            seed: 0,
            grid: GridConfig::default(),
            potential: None,
            params: Params::default(),
            sweep: SweepConfig::default(),
            lambdas: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    /// Parse a config file: TOML, with JSON accepted as an alternative.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().map(|e| e == "json").unwrap_or(false)
            || text.trim_start().starts_with('{');
        let cfg: ExperimentConfig = if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.d != 1 && self.grid.d != 2 {
            return Err(Error::Config(format!("d must be 1 or 2, got {}", self.grid.d)));
        }
        if self.params.s < 0.5 {
            return Err(Error::Config(format!("s must be >= 1/2, got {}", self.params.s)));
        }
        if self.grid.l.fract() != 0.0 || self.grid.l < 1.0 {
            return Err(Error::Config(format!(
                "half-width L must be a positive integer, got {}",
                self.grid.l
            )));
        }
        if self.grid.n < 4 || self.grid.n % 2 != 0 {
            return Err(Error::Config(format!("N must be even and >= 4, got {}", self.grid.n)));
        }
        if self.lambdas.iter().any(|&l| l < 0.0) {
            return Err(Error::Config("lambda grid must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..=self.sweep.j_max).map(|j| -(2.0f64).powi(-(j as i32))).collect()
    }

    fn build_grid(&self) -> Result<Arc<SpaceGrid>> {
        Ok(Arc::new(SpaceGrid::new(self.grid.d, self.grid.l, self.grid.n)?))
    }

    fn build_potential(&self, grid: Arc<SpaceGrid>) -> Result<Potential> {
        let p = match &self.potential {
            None => Potential::zero(grid),
            Some(PotentialConfig::Well { v0, a }) => {
                Potential::build(Shape::Well { v0: *v0, a: *a }, grid)?
            }
            Some(PotentialConfig::Gaussian { v0, w }) => {
                Potential::build(Shape::Gaussian { v0: *v0, w: *w }, grid)?
            }
            Some(PotentialConfig::Power { v0, beta, core }) => {
                Potential::build(Shape::Power { v0: *v0, beta: *beta, core: *core }, grid)?
            }
            Some(PotentialConfig::Bump { v0, a }) => {
                Potential::build(Shape::Bump { v0: *v0, a: *a }, grid)?
            }
            Some(PotentialConfig::File { path }) => Potential::load_samples(path, grid)?,
        };
        p.scale_coupling(self.params.coupling)
    }

    fn bounds_options(&self) -> BoundsOptions {
        BoundsOptions {
            bs: BsOptions::default(),
            energies: self.energies(),
            hermite_m: 0,
            eps: self.params.eps,
        }
    }
}

/// Everything `run_config` reports back, serialized as `summary.json`.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub schema: &'static str,
    pub mode: Mode,
    pub seed: u64,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_count: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

/// Run one experiment; artifacts land under `out_dir`.
pub fn run_config(config: &ExperimentConfig, mode: Mode, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let grid = config.build_grid()?;
    let potential = config.build_potential(grid.clone())?;
    let opts = config.bounds_options();

    let mut summary = RunSummary {
        schema: SUMMARY_SCHEMA,
        mode,
        seed: config.seed,
        config: config.clone(),
        count: None,
        direct_count: None,
        violations: Vec::new(),
        detail: None,
    };
    let mut reports: Vec<BoundReport> = Vec::new();

    match mode {
        Mode::Count => {
            let sweep = bs::count_ge_one_sweep(&potential, config.params.s, &config.energies(), &opts.bs)?;
            let plateau = sweep.plateau.unwrap_or(*sweep.counts.last().unwrap());
            let h = direct_solver::assemble_direct(&grid, &potential, config.params.s)?;
            let tau = (2.0f64).powi(-(config.sweep.j_max as i32));
            let direct = direct_solver::count_negative(&h, tau);
            summary.count = Some(plateau);
            summary.direct_count = Some(direct.count);
            summary.detail = Some(serde_json::json!({
                "plateau_converged": sweep.plateau.is_some(),
                "near_one_energies": sweep.near_one.iter().filter(|&&b| b).count(),
                "near_threshold_eigenvalues": direct.near_threshold,
                "tau": tau,
            }));
            write_curve(out_dir, "energy_sweep", "energy\tcount", sweep.energies.iter().zip(&sweep.counts))?;
        }
        Mode::Sweep => {
            let sweep = bs::count_ge_one_sweep(&potential, config.params.s, &config.energies(), &opts.bs)?;
            summary.count = sweep.plateau;
            write_curve(out_dir, "energy_sweep", "energy\tcount", sweep.energies.iter().zip(&sweep.counts))?;
            if !config.lambdas.is_empty() {
                let mut lam_counts = Vec::new();
                for &lam in &config.lambdas {
                    let pl = potential.scale_coupling(lam)?;
                    let s = bs::count_ge_one_sweep(&pl, config.params.s, &config.energies(), &opts.bs)?;
                    lam_counts.push(s.plateau.unwrap_or(*s.counts.last().unwrap()));
                }
                write_curve(out_dir, "lambda_counts", "lambda\tcount", config.lambdas.iter().zip(&lam_counts))?;
                summary.detail = Some(serde_json::json!({ "lambda_counts": lam_counts }));
            }
        }
        Mode::Verify => {
            run_verify(config, &grid, &potential, &opts, &mut summary, &mut reports)?;
        }
        Mode::Quasinorm => {
            let d = grid.dim();
            let gap = config.params.s - d as f64 / 2.0;
            let v_norm2 = grid.inner(potential.v(), potential.v());
            let weights = serde_json::json!({
                "l2_squared_v": v_norm2,
                "pure_radial": norms::weighted_l2_squared(&grid, potential.v(), WeightSpec::PureRadial { gamma: gap.max(0.0) }),
                "japanese_log": norms::weighted_l2_squared(&grid, potential.v(), WeightSpec::JapaneseLog { gamma: gap.max(0.0), with_log: true }),
                "hermite_log": norms::hermite_log_norm(&potential, config.params.eps, opts.hermite_order(d)).ok(),
                "orlicz_V": norms::orlicz_norm(&grid, potential.values()),
                "weak_l1_V": norms::weak_lp(&grid, potential.values(), 1.0),
                "weak_l2_V": norms::weak_lp(&grid, potential.values(), 2.0),
                "rearrangement_l1": norms::decreasing_rearrangement(&grid, potential.values()).integral(),
            });
            summary.detail = Some(weights);
        }
        Mode::Cwikel => {
            run_cwikel(config, &grid, &potential, &mut summary, out_dir)?;
        }
        Mode::Selftest => {
            let report = selftest(config.seed);
            summary.violations = report.failures.clone();
            summary.detail = Some(serde_json::to_value(&report).expect("serializable"));
        }
    }

    if !reports.is_empty() {
        let mut csv = String::from(bounds::REPORT_CSV_HEADER);
        csv.push('\n');
        for r in &reports {
            csv.push_str(&bounds::report_csv_row(r));
            csv.push('\n');
        }
        std::fs::write(out_dir.join("reports.csv"), csv)?;
        summary.detail = Some(serde_json::json!({ "reports": reports }));
    }

    let json = serde_json::to_string_pretty(&summary).expect("serializable summary");
    std::fs::write(out_dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

fn run_verify(
    config: &ExperimentConfig,
    grid: &Arc<SpaceGrid>,
    potential: &Potential,
    opts: &BoundsOptions,
    summary: &mut RunSummary,
    reports: &mut Vec<BoundReport>,
) -> Result<()> {
    let d = grid.dim();
    let s = config.params.s;
    let gap = s - d as f64 / 2.0;
    let mut violations = Vec::new();

    // counting bound for the regime of (d, s)
    let theorem = if gap.abs() < 1e-9 {
        Some(TheoremId::T12)
    } else if gap > 0.0 && (gap - gap.round()).abs() < 1e-9 {
        Some(TheoremId::T11Int)
    } else if gap > 0.0 {
        Some(TheoremId::T11NonInt)
    } else {
        None
    };
    if let Some(th) = theorem {
        let rep = bounds::evaluate_bound(th, potential, s, opts)?;
        if rep.ratio.is_infinite() {
            violations.push(format!("{th:?}: positive excess over zero right-hand side"));
        }
        reports.push(rep);
    }
    if gap >= -1e-9 {
        reports.push(bounds::evaluate_bound(TheoremId::T15, potential, s, opts)?);
        reports.push(bounds::evaluate_bound(TheoremId::T16, potential, s, opts)?);
    }
    if d == 1 && (s - 1.0).abs() < 1e-9 {
        let rep = bounds::bargmann_check(potential, opts)?;
        if rep.flags.iter().any(|f| f == "violated") {
            violations.push("Bargmann: N - 1 exceeded the first moment".into());
        }
        reports.push(rep);
    }

    // chain consistency along the sweep (s > d/2 only: the high window
    // is untruncated there)
    if gap > 1e-9 && !potential.is_zero() {
        let sub = bs::build_subspace(potential, s);
        for &e in &config.energies() {
            let low = bs::assemble_k(potential, s, e, Window::Low, false, Route::XKernel, &opts.bs)?;
            let high = bs::assemble_k(potential, s, e, Window::High, false, Route::XKernel, &opts.bs)?;
            let ke = low.add(&high);
            let count = ke.spectrum().count_ge(1.0) as f64;
            let trace = bs::trace_low_projected(potential, s, e, &opts.bs)?;
            let weak = bs::weak_norm_high(potential, s, e, &opts.bs)?;
            let rhs = sub.dim() as f64 + 2.0 * trace.quadrature + 2.0 * weak.value;
            if count > rhs + 1e-9 {
                violations.push(format!("chain at E = {e}: count {count} > {rhs}"));
            }
        }
    }

    // eigenvalue monotonicity along the sweep
    let sweep = bs::count_ge_one_sweep(potential, s, &config.energies(), &opts.bs)?;
    if sweep.monotonicity_violations > 0 {
        violations.push(format!(
            "{} eigenvalue monotonicity violations along the sweep",
            sweep.monotonicity_violations
        ));
    }
    summary.count = sweep.plateau;
    summary.violations = violations;
    Ok(())
}

fn run_cwikel(
    _config: &ExperimentConfig,
    grid: &Arc<SpaceGrid>,
    potential: &Potential,
    summary: &mut RunSummary,
    out_dir: &Path,
) -> Result<()> {
    let d = grid.dim();
    let p_prime = 1.8f64;
    let symbol: Vec<f64> = (0..grid.len())
        .map(|i| {
            let r = grid.freq_abs(i);
            if r >= 1.0 {
                r.powf(-(d as f64) / p_prime)
            } else {
                0.0
            }
        })
        .collect();
    let f = if potential.is_zero() {
        grid.sample(|x, y| (-(x * x + y * y) / 8.0).exp())
    } else {
        potential.v().to_vec()
    };
    let dec = cwikel::lattice_decompose(grid.clone(), &f, &symbol, p_prime)?;
    let levels: Vec<i32> = (-5..=5).collect();
    let anbn = cwikel::an_bn_check(&dec, &levels)?;
    let simon = cwikel::simon_singular_bound(grid, &f, &symbol, p_prime, (4, 256))?;
    write_curve(
        out_dir,
        "an_hs",
        "n\ths_squared",
        anbn.levels.iter().zip(&anbn.hs_squared),
    )?;
    write_curve(
        out_dir,
        "bn_trace",
        "n\ttrace_norm",
        anbn.levels.iter().zip(&anbn.trace_norm),
    )?;
    let ms: Vec<usize> = (1..=simon.mu.len().min(512)).collect();
    write_curve(out_dir, "simon_mu", "m\tmu", ms.iter().zip(simon.mu.iter()))?;
    summary.detail = Some(serde_json::json!({
        "p_prime": p_prime,
        "hs_slope": anbn.hs_slope,
        "hs_rate": anbn.hs_rate,
        "trace_slope": anbn.trace_slope,
        "trace_rate": anbn.trace_rate,
        "recombination_max_err": anbn.recombination_max_err,
        "simon_slope": simon.slope,
        "simon_fitted_c": simon.fitted_c,
    }));
    Ok(())
}

/// Outcome of the seeded property suites.
#[derive(Debug, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<(String, usize)>,
    pub failures: Vec<String>,
}

/// Randomized property suites: the variational principle and Fan's
/// inequality on random PSD/general matrices, counting-by-quasinorm,
/// the quasi-triangle inequality, and the weak-norm closed forms.
pub fn selftest(seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut failures = Vec::new();

    // variational principle + interlacing on random PSD matrices
    let mut ran = 0usize;
    for _ in 0..200 {
        let n = rng.random_range(3..=24);
        let a = faer::Mat::from_fn(n, n, |_, _| rng.random::<f64>() - 0.4);
        let k = &a * a.transpose();
        let dim_f = rng.random_range(0..=n.min(5));
        let basis: Vec<Vec<f64>> = (0..dim_f)
            .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
            .collect();
        ran += 1;
        match spectra::variational_check(k.as_ref(), &basis) {
            Ok(rep) => {
                if !rep.holds || rep.interlacing_defect > 1e-9 {
                    failures.push(format!("variational: defect {}", rep.interlacing_defect));
                }
            }
            Err(e) => failures.push(format!("variational: {e}")),
        }
    }
    checks.push(("variational".into(), ran));

    // Fan's inequality on random pairs, all indices
    let mut ran = 0usize;
    for _ in 0..100 {
        let n = rng.random_range(2..=12);
        let a = faer::Mat::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
        let b = faer::Mat::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
        for m in 1..=n {
            ran += 1;
            match spectra::fan_check(a.as_ref(), b.as_ref(), m) {
                Ok(rep) if !rep.holds => {
                    failures.push(format!("fan: {} > {}", rep.lhs, rep.rhs))
                }
                Err(e) => failures.push(format!("fan: {e}")),
                _ => {}
            }
        }
    }
    checks.push(("fan".into(), ran));

    // counting by quasinorm and the quasi-triangle inequality
    let mut ran = 0usize;
    for _ in 0..100 {
        let n = rng.random_range(2..=16);
        let mk = |rng: &mut ChaCha8Rng| {
            let a = faer::Mat::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
            &a * a.transpose()
        };
        let ka = mk(&mut rng);
        let kb = mk(&mut rng);
        let sum = &ka + &kb;
        let sa = spectra::eigh_descending(ka.as_ref()).unwrap();
        let sb = spectra::eigh_descending(kb.as_ref()).unwrap();
        let ss = spectra::eigh_descending(sum.as_ref()).unwrap();
        let (wa, wb, ws) = (
            sa.weak_quasinorm(1.0).unwrap(),
            sb.weak_quasinorm(1.0).unwrap(),
            ss.weak_quasinorm(1.0).unwrap(),
        );
        ran += 1;
        if (sa.count_ge(1.0) as f64) > wa + 1e-9 {
            failures.push("count exceeded weak quasinorm".into());
        }
        if ws > 2.0 * wa + 2.0 * wb + 1e-9 {
            failures.push("quasi-triangle inequality failed".into());
        }
    }
    checks.push(("quasinorm".into(), ran));

    // weak-norm closed forms for the proof's symbols
    let mut ran = 0usize;
    for p in [2.01, 2.1, 2.5] {
        ran += 1;
        let sym = RadialSymbol::PowerTail { a: 1.0 / p, d: 1 };
        if (sym.weak_lp(p) - (2.0f64).powf(1.0 / p)).abs() > 1e-6 {
            failures.push(format!("symbol weak norm at p = {p}"));
        }
    }
    checks.push(("symbols".into(), ran));

    SelftestReport { checks, failures }
}

fn write_curve<'a, X, Y>(
    out_dir: &Path,
    name: &str,
    header: &str,
    rows: impl Iterator<Item = (X, Y)>,
) -> Result<()>
where
    X: std::fmt::Display,
    Y: std::fmt::Display + 'a,
{
    let dir = out_dir.join("curves");
    std::fs::create_dir_all(&dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{name}.tsv")))?);
    writeln!(f, "{header}")?;
    for (x, y) in rows {
        writeln!(f, "{x}\t{y}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_dir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("fracbound-runner-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn count_mode_square_well() {
        let cfg = ExperimentConfig {
            grid: GridConfig { d: 1, l: 40.0, n: 512 },
            potential: Some(PotentialConfig::Well { v0: 10.0, a: 1.0 }),
            ..Default::default()
        };
        let out = tmp_dir("count");
        let summary = run_config(&cfg, Mode::Count, &out).unwrap();
        assert_eq!(summary.count, Some(3));
        assert_eq!(summary.direct_count, Some(3));
        let json = std::fs::read_to_string(out.join("summary.json")).unwrap();
        assert!(json.contains("\"count\": 3"));
        assert!(out.join("curves/energy_sweep.tsv").exists());
        std::fs::remove_dir_all(&out).ok();
    }

    #[test]
    fn byte_identical_reruns() {
        let cfg = ExperimentConfig {
            grid: GridConfig { d: 1, l: 16.0, n: 128 },
            potential: Some(PotentialConfig::Gaussian { v0: 2.0, w: 1.0 }),
            seed: 42,
            ..Default::default()
        };
        let out1 = tmp_dir("rerun1");
        let out2 = tmp_dir("rerun2");
        run_config(&cfg, Mode::Verify, &out1).unwrap();
        run_config(&cfg, Mode::Verify, &out2).unwrap();
        for name in ["summary.json", "reports.csv"] {
            let a = std::fs::read(out1.join(name)).unwrap();
            let b = std::fs::read(out2.join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between reruns");
        }
        std::fs::remove_dir_all(&out1).ok();
        std::fs::remove_dir_all(&out2).ok();
    }

    #[test]
    fn malformed_config_rejected() {
        let dir = tmp_dir("badcfg");
        let path = dir.join("bad.toml");
        std::fs::write(&path, "mode = \"count\"\ngrid = { d = 7 }").unwrap();
        assert!(matches!(ExperimentConfig::from_path(&path), Err(Error::Config(_))));
        let path2 = dir.join("junk.toml");
        std::fs::write(&path2, "this is not toml [[").unwrap();
        assert!(matches!(ExperimentConfig::from_path(&path2), Err(Error::Config(_))));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn toml_and_json_configs_parse() {
        let dir = tmp_dir("cfg");
        let t = dir.join("a.toml");
        std::fs::write(
            &t,
            "mode = \"count\"\nseed = 7\n[grid]\nd = 1\nl = 20.0\nn = 64\n[potential]\nkind = \"well\"\nv0 = 4.0\na = 1.0\n[params]\ns = 1.0\n",
        )
        .unwrap();
        let cfg = ExperimentConfig::from_path(&t).unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(matches!(cfg.potential, Some(PotentialConfig::Well { .. })));
        let j = dir.join("b.json");
        std::fs::write(
            &j,
            "{\"mode\":\"sweep\",\"grid\":{\"d\":1,\"l\":16.0,\"n\":64},\"params\":{\"s\":0.6}}",
        )
        .unwrap();
        let cfg = ExperimentConfig::from_path(&j).unwrap();
        assert_eq!(cfg.mode, Some(Mode::Sweep));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn selftest_clean_at_default_seed() {
        let rep = selftest(0);
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert!(rep.checks.iter().map(|c| c.1).sum::<usize>() > 500);
    }

    #[test]
    fn verify_mode_flags_no_violations_on_sane_input() {
        let cfg = ExperimentConfig {
            grid: GridConfig { d: 1, l: 20.0, n: 256 },
            potential: Some(PotentialConfig::Gaussian { v0: 2.0, w: 1.2 }),
            ..Default::default()
        };
        let out = tmp_dir("verify");
        let summary = run_config(&cfg, Mode::Verify, &out).unwrap();
        assert!(summary.violations.is_empty(), "{:?}", summary.violations);
        assert!(out.join("reports.csv").exists());
        std::fs::remove_dir_all(&out).ok();
    }
}
