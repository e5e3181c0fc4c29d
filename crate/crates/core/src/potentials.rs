//! Nonnegative potentials `V` sampled on a grid, with their square roots
//! `v = V^{1/2}` and analytic descriptors where available.
//!
//! `v` is the primary stored field and `V = v^2` is derived from it, so
//! the pair is consistent bit-for-bit at every node.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numgrid::SpaceGrid;

/// Analytic shape of a built-in potential. All shapes are radial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `V0 * 1_{|x| <= a}`
    Well { v0: f64, a: f64 },
    /// `V0 * exp(-|x|^2 / w^2)`
    Gaussian { v0: f64, w: f64 },
    /// `V0 * (core^2 + |x|^2)^{-beta/2}`
    Power { v0: f64, beta: f64, core: f64 },
    /// `V0 * exp(1 - 1/(1 - (|x|/a)^2))` on `|x| < a`, else 0
    Bump { v0: f64, a: f64 },
}

impl Shape {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        match *self {
            Shape::Well { v0, a } => {
                if r2 <= a * a {
                    v0
                } else {
                    0.0
                }
            }
            Shape::Gaussian { v0, w } => v0 * (-r2 / (w * w)).exp(),
            Shape::Power { v0, beta, core } => v0 * (core * core + r2).powf(-beta / 2.0),
            Shape::Bump { v0, a } => {
                let t = r2 / (a * a);
                if t < 1.0 {
                    v0 * (1.0 - 1.0 / (1.0 - t)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    fn amplitude(&self) -> f64 {
        match *self {
            Shape::Well { v0, .. }
            | Shape::Gaussian { v0, .. }
            | Shape::Power { v0, .. }
            | Shape::Bump { v0, .. } => v0,
        }
    }

    fn decay(&self) -> DecayTag {
        match *self {
            Shape::Well { .. } | Shape::Bump { .. } => DecayTag::Compact,
            Shape::Gaussian { .. } => DecayTag::Gaussian,
            Shape::Power { beta, .. } => DecayTag::Power(beta),
        }
    }

    /// Descriptor of `x -> R^{-2s} V(x/R)`.
    fn rescaled(&self, r: f64, s: f64) -> Shape {
        let amp = r.powf(-2.0 * s);
        match *self {
            Shape::Well { v0, a } => Shape::Well { v0: amp * v0, a: r * a },
            Shape::Gaussian { v0, w } => Shape::Gaussian { v0: amp * v0, w: r * w },
            Shape::Bump { v0, a } => Shape::Bump { v0: amp * v0, a: r * a },
            Shape::Power { v0, beta, core } => Shape::Power {
                v0: v0 * r.powf(beta - 2.0 * s),
                beta,
                core: r * core,
            },
        }
    }
}

/// Coarse decay class, used by downstream preconditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayTag {
    Compact,
    Gaussian,
    Power(f64),
    Sampled,
}

/// A nonnegative potential sampled on a grid.
#[derive(Debug, Clone)]
pub struct Potential {
    grid: Arc<SpaceGrid>,
    /// `v = V^{1/2}` at the nodes; the primary field.
    v: Vec<f64>,
    /// `V = v^2` at the nodes.
    values: Vec<f64>,
    coupling: f64,
    decay: DecayTag,
    shape: Option<Shape>,
}

impl Potential {
    pub fn build(shape: Shape, grid: Arc<SpaceGrid>) -> Result<Self> {
        if shape.amplitude() < 0.0 {
            return Err(Error::NegativeAmplitude(shape.amplitude()));
        }
        let v: Vec<f64> = (0..grid.len())
            .map(|i| {
                let p = grid.node(i);
                shape.eval(p[0], p[1]).sqrt()
            })
            .collect();
        let values = v.iter().map(|x| x * x).collect();
        Ok(Potential {
            grid,
            v,
            values,
            coupling: 1.0,
            decay: shape.decay(),
            shape: Some(shape),
        })
    }

    pub fn zero(grid: Arc<SpaceGrid>) -> Self {
        let n = grid.len();
        Potential {
            grid,
            v: vec![0.0; n],
            values: vec![0.0; n],
            coupling: 1.0,
            decay: DecayTag::Compact,
            shape: None,
        }
    }

    pub fn from_v_samples(grid: Arc<SpaceGrid>, v: Vec<f64>, decay: DecayTag) -> Self {
        assert_eq!(v.len(), grid.len());
        let values = v.iter().map(|x| x * x).collect();
        Potential {
            grid,
            v,
            values,
            coupling: 1.0,
            decay,
            shape: None,
        }
    }

    pub fn grid(&self) -> &Arc<SpaceGrid> {
        &self.grid
    }

    /// Samples of `V`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Samples of `v = V^{1/2}`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn decay(&self) -> DecayTag {
        self.decay
    }

    pub fn shape(&self) -> Option<Shape> {
        self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&x| x == 0.0)
    }

    /// Multiply the potential by `lambda >= 0`.
    pub fn scale_coupling(&self, lambda: f64) -> Result<Potential> {
        if lambda < 0.0 {
            return Err(Error::NegativeCoupling(lambda));
        }
        let root = lambda.sqrt();
        let v: Vec<f64> = self.v.iter().map(|x| root * x).collect();
        let values = v.iter().map(|x| x * x).collect();
        let shape = self.shape.map(|sh| match sh {
            Shape::Well { v0, a } => Shape::Well { v0: lambda * v0, a },
            Shape::Gaussian { v0, w } => Shape::Gaussian { v0: lambda * v0, w },
            Shape::Power { v0, beta, core } => Shape::Power { v0: lambda * v0, beta, core },
            Shape::Bump { v0, a } => Shape::Bump { v0: lambda * v0, a },
        });
        Ok(Potential {
            grid: self.grid.clone(),
            v,
            values,
            coupling: self.coupling * lambda,
            decay: self.decay,
            shape,
        })
    }

    /// Unitary-scaling image `x -> R^{-2s} V(x/R)` resampled on `target`.
    /// Returns the rescaled potential and whether the dilated domain was
    /// truncated (`target` narrower than `R * L`).
    pub fn rescale_r(
        &self,
        r: f64,
        s: f64,
        target: Arc<SpaceGrid>,
    ) -> Result<(Potential, bool)> {
        if !(r > 0.0) {
            return Err(Error::NonpositiveR(r));
        }
        let truncated = target.half_width() < r * self.grid.half_width() - 1e-12;
        if let Some(sh) = self.shape {
            let out = Potential::build(sh.rescaled(r, s), target)?;
            return Ok((out, truncated));
        }
        // sampled data: nearest-node lookup of V(x/R)
        let amp = r.powf(-2.0 * s);
        let src = &self.grid;
        let n = src.points_per_axis();
        let dx = 2.0 * src.half_width() / n as f64;
        let nearest = |c: f64| -> Option<usize> {
            let idx = ((c + src.half_width()) / dx).round() as i64;
            if idx < 0 || idx >= n as i64 {
                None
            } else {
                Some(idx as usize)
            }
        };
        let v: Vec<f64> = (0..target.len())
            .map(|i| {
                let p = target.node(i);
                let (cx, cy) = (p[0] / r, p[1] / r);
                match (nearest(cx), if src.dim() == 2 { nearest(cy) } else { Some(0) }) {
                    (Some(ix), Some(iy)) => {
                        let j = if src.dim() == 1 { ix } else { ix * n + iy };
                        amp.sqrt() * self.v[j]
                    }
                    _ => 0.0,
                }
            })
            .collect();
        Ok((
            Potential::from_v_samples(target, v, self.decay),
            truncated,
        ))
    }

    /// Write samples as plain text, one value per line, after a
    /// `# d L N` header. The format round-trips bit-exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            f,
            "# {} {} {}",
            self.grid.dim(),
            self.grid.half_width(),
            self.grid.points_per_axis()
        )?;
        for x in &self.values {
            writeln!(f, "{x}")?;
        }
        Ok(())
    }

    /// Load a sample file written by [`Potential::save`] onto `grid`.
    pub fn load_samples(path: &Path, grid: Arc<SpaceGrid>) -> Result<Potential> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut values = Vec::with_capacity(grid.len());
        for (lineno, line) in f.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let x: f64 = t.parse().map_err(|e| Error::ParseError {
                line: lineno + 1,
                msg: format!("{e}"),
            })?;
            if !x.is_finite() {
                return Err(Error::ParseError {
                    line: lineno + 1,
                    msg: "non-finite value".into(),
                });
            }
            if x < 0.0 {
                return Err(Error::NegativeValue { value: x, line: lineno + 1 });
            }
            values.push(x);
        }
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch { got: values.len(), want: grid.len() });
        }
        let v: Vec<f64> = values.iter().map(|x| x.sqrt()).collect();
        let mut p = Potential::from_v_samples(grid, v, DecayTag::Sampled);
        // keep the file's exact samples as V; v stays consistent to 1 ulp
        p.values = values;
        Ok(p)
    }
}
