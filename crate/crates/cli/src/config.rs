//! Experiment configuration, as written to and read from TOML.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use glparab_core::corpus;
use glparab_core::field::Grid1D;
use glparab_core::potential::{MatrixPotential, VectorSpec};

use crate::io::read_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    P,
    Q,
}

/// Where a matrix potential comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSource {
    Corpus { corpus: String, side: Side },
    File { file: PathBuf },
    Inline { p11: String, p12: String, p22: String },
}

/// Where an initial value comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSource {
    Corpus { corpus: String },
    File { file: PathBuf },
    Inline { a1: String, a2: String },
}

/// Layout of a potential file: closed-form entries or a sampled CSV.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialFile {
    p11: Option<String>,
    p12: Option<String>,
    p21: Option<String>,
    p22: Option<String>,
    csv: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialFile {
    a1: Option<String>,
    a2: Option<String>,
    csv: Option<PathBuf>,
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn relative_to(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn uniform_grid(xs: &[f64], path: &Path) -> Result<Grid1D> {
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let grid = Grid1D::new(lo, hi, xs.len())?;
    let h = grid.spacing();
    for (a, b) in xs.iter().zip(grid.points()) {
        if (a - b).abs() > 1e-9 * h.max(1.0) {
            bail!("{}: x column is not uniform (node {a} expected {b})", path.display());
        }
    }
    Ok(grid)
}

fn column(rows: &[Vec<f64>], c: usize) -> Vec<f64> {
    rows.iter().map(|r| r[c]).collect()
}

impl PotentialSource {
    pub fn load(&self) -> Result<MatrixPotential> {
        match self {
            PotentialSource::Corpus { corpus: name, side } => {
                let e = corpus::lookup(name)?;
                Ok(if *side == Side::P { e.p } else { e.q })
            }
            PotentialSource::Inline { p11, p12, p22 } => Ok(MatrixPotential::parse(p11, p12, None, p22)?),
            PotentialSource::File { file } => {
                let spec: PotentialFile = read_toml(file)?;
                if let Some(csv) = spec.csv {
                    let path = relative_to(file, &csv);
                    let (header, rows) = read_csv(&path)?;
                    expect_header(&path, &header, &["x", "f11", "f12", "f22"])?;
                    let grid = uniform_grid(&column(&rows, 0), &path)?;
                    return MatrixPotential::sampled(grid, column(&rows, 1), column(&rows, 2), column(&rows, 3))
                        .with_context(|| format!("sampled potential {}", path.display()));
                }
                match (spec.p11, spec.p12, spec.p22) {
                    (Some(a), Some(b), Some(d)) => MatrixPotential::parse(&a, &b, spec.p21.as_deref(), &d)
                        .with_context(|| format!("potential entries in {}", file.display())),
                    _ => bail!("{}: needs p11, p12, p22 or csv", file.display()),
                }
            }
        }
    }
}

impl InitialSource {
    pub fn load(&self) -> Result<VectorSpec> {
        match self {
            InitialSource::Corpus { corpus: name } => Ok(corpus::lookup(name)?.a),
            InitialSource::Inline { a1, a2 } => Ok(VectorSpec::parse(a1, a2)?),
            InitialSource::File { file } => {
                let spec: InitialFile = read_toml(file)?;
                if let Some(csv) = spec.csv {
                    let path = relative_to(file, &csv);
                    let (header, rows) = read_csv(&path)?;
                    expect_header(&path, &header, &["x", "f1", "f2"])?;
                    let grid = uniform_grid(&column(&rows, 0), &path)?;
                    let field = glparab_core::field::VectorValuedField::from_components(grid, &column(&rows, 1), &column(&rows, 2))?;
                    return Ok(VectorSpec::Sampled(field));
                }
                match (spec.a1, spec.a2) {
                    (Some(a), Some(b)) => VectorSpec::parse(&a, &b)
                        .with_context(|| format!("initial value entries in {}", file.display())),
                    _ => bail!("{}: needs a1, a2 or csv", file.display()),
                }
            }
        }
    }
}

pub fn expect_header(path: &Path, header: &[String], want: &[&str]) -> Result<()> {
    let got: Vec<&str> = header.iter().map(|s| s.trim()).collect();
    if got != want {
        bail!("{}: expected columns {:?}, found {:?}", path.display(), want, got);
    }
    Ok(())
}

/// One experiment. Serialized next to its outputs as the effective config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Spectrum {
        potential: PotentialSource,
        count: usize,
        grid_points: usize,
        out: PathBuf,
    },
    Forward {
        potential: PotentialSource,
        initial: InitialSource,
        times: String,
        modes: usize,
        out: PathBuf,
    },
    Goursat {
        layout: String,
        /// Built-in problem name, or `None` to read `rhs`, `f`, `g`.
        problem: Option<String>,
        resolution: usize,
        rhs: Option<PathBuf>,
        f: Option<PathBuf>,
        g: Option<PathBuf>,
        tolerance: f64,
        max_iterations: usize,
        out: PathBuf,
        report: PathBuf,
    },
    Kernel {
        p: PotentialSource,
        q: PotentialSource,
        resolution: usize,
        out: PathBuf,
        checks: PathBuf,
    },
    Transform {
        p: PotentialSource,
        q: PotentialSource,
        resolution: usize,
        lambda: f64,
        xi: [f64; 2],
        out: PathBuf,
    },
    Verify {
        p: PotentialSource,
        q: PotentialSource,
        initial: InitialSource,
        window: String,
        samples: usize,
        modes: usize,
        expansion_modes: usize,
        trace_tolerance: f64,
        kernel_tolerance: f64,
        resolution: usize,
        out: PathBuf,
    },
    Corpus {
        out: Option<PathBuf>,
    },
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                bail!("{name} must be positive, got {v}")
            }
        };
        let at_least = |name: &str, v: usize, min: usize| {
            if v >= min {
                Ok(())
            } else {
                bail!("{name} must be at least {min}, got {v}")
            }
        };
        match self {
            ExperimentConfig::Spectrum { count, grid_points, .. } => {
                at_least("count", *count, 1)?;
                at_least("grid_points", *grid_points, 5)
            }
            ExperimentConfig::Forward { modes, .. } => at_least("modes", *modes, 1),
            ExperimentConfig::Goursat { tolerance, resolution, max_iterations, problem, rhs, f, g, .. } => {
                positive("tolerance", *tolerance)?;
                at_least("max_iterations", *max_iterations, 1)?;
                if problem.is_some() {
                    at_least("resolution", *resolution, 4)
                } else if rhs.is_none() || f.is_none() || g.is_none() {
                    bail!("goursat needs either a built-in problem or all of rhs, f, g")
                } else {
                    Ok(())
                }
            }
            ExperimentConfig::Kernel { resolution, .. } | ExperimentConfig::Transform { resolution, .. } => {
                at_least("resolution", *resolution, 4)
            }
            ExperimentConfig::Verify {
                samples,
                modes,
                expansion_modes,
                trace_tolerance,
                kernel_tolerance,
                resolution,
                ..
            } => {
                at_least("samples", *samples, 10)?;
                at_least("modes", *modes, 1)?;
                at_least("expansion_modes", *expansion_modes, *modes)?;
                positive("trace_tolerance", *trace_tolerance)?;
                positive("kernel_tolerance", *kernel_tolerance)?;
                at_least("resolution", *resolution, 4)?;
                if resolution % 2 != 0 {
                    bail!("resolution must be even for the propagation replay, got {resolution}");
                }
                Ok(())
            }
            ExperimentConfig::Corpus { .. } => Ok(()),
        }
    }

    /// The main output path, if any.
    pub fn primary_output(&self) -> Option<&Path> {
        match self {
            ExperimentConfig::Spectrum { out, .. }
            | ExperimentConfig::Forward { out, .. }
            | ExperimentConfig::Goursat { out, .. }
            | ExperimentConfig::Kernel { out, .. }
            | ExperimentConfig::Transform { out, .. }
            | ExperimentConfig::Verify { out, .. } => Some(out),
            ExperimentConfig::Corpus { out } => out.as_deref(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing effective config")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }
}

/// `<dir>/<stem>.effective.toml` next to `out`.
pub fn effective_config_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}.effective.toml"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig::Verify {
            p: PotentialSource::Corpus {
                corpus: "smooth".into(),
                side: Side::P,
            },
            q: PotentialSource::Inline {
                p11: "1".into(),
                p12: "0".into(),
                p22: "2".into(),
            },
            initial: InitialSource::File { file: "a.toml".into() },
            window: "0.01:3".into(),
            samples: 600,
            modes: 4,
            expansion_modes: 12,
            trace_tolerance: 1e-6,
            kernel_tolerance: 1e-6,
            resolution: 400,
            out: "verdict.json".into(),
        };
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn bad_field_reports_location() {
        let err = ExperimentConfig::from_toml("[spectrum]\ncount = \"six\"\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn effective_path() {
        assert_eq!(effective_config_path(Path::new("out/k.csv")), PathBuf::from("out/k.effective.toml"));
    }
}
