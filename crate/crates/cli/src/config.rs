//! Run configuration read from a TOML file.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use slag_core::export::fields_from_csv;
use slag_core::{Boundary, Grid, Params, Solver};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSection,
    pub domain: Option<DomainSection>,
    pub boundary: Option<BoundarySection>,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
    #[serde(default)]
    pub verify: VerifyBudgets,
    pub example: Option<ExampleSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub a: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundarySection {
    /// Potential of `u = αx + β, v = αy + γ`: `αxy + γx + βy`.
    Affine { coefficients: [f64; 3] },
    /// `c0 + c1 x + c2 y + c3 xy`
    Bilinear { coefficients: [f64; 4] },
    /// Rows `x,y,value` covering every boundary node.
    Csv { path: PathBuf },
    /// Values in boundary order: counterclockwise from `(x0, y0)`.
    Values { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Field,
    Embedding,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Vtk,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub kind: OutputKind,
    pub format: OutputFormat,
    pub path: PathBuf,
}

/// Largest residuals `verify` accepts.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBudgets {
    pub first_order: f64,
    pub omega: f64,
    pub im_omega: f64,
    pub gamma_fit: f64,
}

impl Default for VerifyBudgets {
    fn default() -> Self {
        Self {
            first_order: 1e-6,
            omega: 1e-6,
            im_omega: 1e-6,
            gamma_fit: 1e-6,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExampleSection {
    Affine { coefficients: [f64; 3] },
    Hl { b: f64 },
    Joyce {
        a: f64,
        #[serde(default = "default_s_max")]
        s_max: f64,
        #[serde(default = "default_s_points")]
        points: usize,
    },
}

fn default_s_max() -> f64 {
    100.0
}

fn default_s_points() -> usize {
    1000
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        for out in &cfg.outputs {
            let ok = match out.kind {
                OutputKind::Report => out.format == OutputFormat::Json,
                OutputKind::Field | OutputKind::Embedding => out.format != OutputFormat::Json,
            };
            if !ok {
                bail!("{}: output {:?} cannot be written as {:?}", path.display(), out.kind, out.format);
            }
        }
        Ok(cfg)
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.params.a.clone()).context("[params]")
    }

    pub fn grid(&self) -> Result<Grid> {
        let d = self.domain.as_ref().ok_or_else(|| anyhow!("missing [domain] section"))?;
        Grid::new(d.x[0], d.x[1], d.y[0], d.y[1], d.nx, d.ny.unwrap_or(d.nx)).context("[domain]")
    }

    /// Boundary data on `grid`; relative paths resolve against `base`.
    pub fn boundary(&self, grid: &Grid, base: &Path) -> Result<Boundary> {
        let section = self.boundary.as_ref().ok_or_else(|| anyhow!("missing [boundary] section"))?;
        let data = match section {
            BoundarySection::Affine { coefficients: [al, be, ga] } => {
                Boundary::from_fn(grid, |x, y| al * x * y + ga * x + be * y)
            }
            BoundarySection::Bilinear { coefficients: [c0, c1, c2, c3] } => {
                Boundary::from_fn(grid, |x, y| c0 + c1 * x + c2 * y + c3 * x * y)
            }
            BoundarySection::Values { values } => Boundary::new(grid, values.clone()).context("[boundary] values")?,
            BoundarySection::Csv { path } => boundary_from_csv(grid, &base.join(path))?,
        };
        Ok(data)
    }
}

fn boundary_from_csv(grid: &Grid, path: &Path) -> Result<Boundary> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut by_node: HashMap<(usize, usize), f64> = HashMap::new();
    let snap = |t: f64, lo: f64, h: f64, n: usize| -> Option<usize> {
        let k = ((t - lo) / h).round();
        (k >= 0.0 && (k as usize) < n && ((t - lo) / h - k).abs() < 1e-6).then_some(k as usize)
    };
    for (k, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("{}: line {}", path.display(), k + 1))?;
        let [x, y, value] = toks[..] else {
            bail!("{}: line {}: expected x,y,value", path.display(), k + 1);
        };
        let node = snap(x, grid.x0(), grid.hx(), grid.nx()).zip(snap(y, grid.y0(), grid.hy(), grid.ny()));
        match node {
            Some(n) if grid.is_boundary(n.0, n.1) => {
                by_node.insert(n, value);
            }
            _ => bail!("{}: line {}: ({x}, {y}) is not a boundary node", path.display(), k + 1),
        }
    }
    let values = grid
        .boundary_nodes()
        .into_iter()
        .map(|n| {
            by_node
                .get(&n)
                .copied()
                .ok_or_else(|| anyhow!("{}: no value for boundary node {:?}", path.display(), n))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Boundary::new(grid, values)?)
}

/// Reads `u` and `v` columns from a field CSV.
pub fn load_uv(path: &Path) -> Result<(slag_core::Field, slag_core::Field)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let table = fields_from_csv(&text).with_context(|| path.display().to_string())?;
    let get = |name: &str| {
        table
            .get(name)
            .cloned()
            .ok_or_else(|| anyhow!("{}: no '{name}' column", path.display()))
    };
    Ok((get("u")?, get("v")?))
}
