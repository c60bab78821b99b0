//! Command-line arguments and their translation into an [`ExperimentConfig`].

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, InitialSource, PotentialSource, Side};

#[derive(Debug, Parser)]
#[command(name = "glparab", version, about = "Gel'fand-Levitan experiments for 2x2 Neumann parabolic systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Pair {
    /// Potential P (TOML file).
    #[arg(long, value_name = "FILE")]
    pub p: Option<PathBuf>,
    /// Potential Q (TOML file).
    #[arg(long, value_name = "FILE")]
    pub q: Option<PathBuf>,
    /// Take P and Q from a built-in corpus entry.
    #[arg(long, value_name = "NAME")]
    pub corpus: Option<String>,
}

impl Pair {
    fn sources(&self) -> Result<(PotentialSource, PotentialSource)> {
        let side = |file: &Option<PathBuf>, s: Side| match (file, &self.corpus) {
            (Some(f), _) => Ok(PotentialSource::File { file: f.clone() }),
            (None, Some(name)) => Ok(PotentialSource::Corpus {
                corpus: name.clone(),
                side: s,
            }),
            (None, None) => bail!("give --p/--q or --corpus"),
        };
        Ok((side(&self.p, Side::P)?, side(&self.q, Side::Q)?))
    }
}

#[derive(Debug, Args)]
pub struct Single {
    /// Potential (TOML file).
    #[arg(long, value_name = "FILE")]
    pub potential: Option<PathBuf>,
    /// Take the potential from a built-in corpus entry.
    #[arg(long, value_name = "NAME")]
    pub corpus: Option<String>,
    /// Which potential of the corpus entry.
    #[arg(long, value_enum, default_value = "p")]
    pub side: SideArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum SideArg {
    P,
    Q,
}

impl Single {
    fn source(&self) -> Result<PotentialSource> {
        match (&self.potential, &self.corpus) {
            (Some(f), _) => Ok(PotentialSource::File { file: f.clone() }),
            (None, Some(name)) => Ok(PotentialSource::Corpus {
                corpus: name.clone(),
                side: match self.side {
                    SideArg::P => Side::P,
                    SideArg::Q => Side::Q,
                },
            }),
            (None, None) => bail!("give --potential or --corpus"),
        }
    }
}

fn initial_source(file: &Option<PathBuf>, corpus: &Option<String>) -> Result<InitialSource> {
    match (file, corpus) {
        (Some(f), _) => Ok(InitialSource::File { file: f.clone() }),
        (None, Some(name)) => Ok(InitialSource::Corpus { corpus: name.clone() }),
        (None, None) => bail!("give --initial or --corpus"),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First eigenpairs of a Neumann problem.
    Spectrum {
        #[command(flatten)]
        source: Single,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long, default_value_t = 401)]
        grid_points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Boundary traces of the eigenfunction expansion.
    Forward {
        #[command(flatten)]
        source: Single,
        #[arg(long, value_name = "FILE")]
        initial: Option<PathBuf>,
        #[arg(long, default_value = "0.01:3:600log")]
        times: String,
        #[arg(long, default_value_t = 12)]
        modes: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Characteristic Goursat problem by successive approximation.
    Goursat {
        /// Boundary layout: prop1, prop2 or prop3.
        #[arg(long = "config", default_value = "prop1")]
        layout: String,
        /// Built-in problem (bessel, constant-diagonal, coupled, smooth, polynomial).
        #[arg(long)]
        problem: Option<String>,
        /// Lattice intervals for built-in problems.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        rhs: Option<PathBuf>,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long, default_value_t = 60)]
        max_iterations: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Transformation kernel K(x, y) for a pair (P, Q).
    Kernel {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        checks: PathBuf,
    },
    /// Maps the P-solution with initial vector xi to a Q-solution.
    Transform {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Initial vector `ψ(0)` as `xi1,xi2`.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.0], allow_hyphen_values = true)]
        xi: Vec<f64>,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Uniqueness pipeline for (P, Q, a).
    Verify {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_name = "FILE")]
        initial: Option<PathBuf>,
        #[arg(long, default_value = "0.01:3")]
        window: String,
        #[arg(long, default_value_t = 600)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        modes: usize,
        #[arg(long, default_value_t = 12)]
        expansion_modes: usize,
        #[arg(long, default_value_t = 1e-6)]
        trace_tolerance: f64,
        #[arg(long, default_value_t = 1e-6)]
        kernel_tolerance: f64,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lists the built-in (P, Q, a) triples.
    Corpus {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-runs a saved (effective) config.
    Run {
        #[arg(long = "config-file")]
        config_file: PathBuf,
    },
}

impl Command {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let cfg = match self {
            Command::Spectrum { source, count, grid_points, out } => ExperimentConfig::Spectrum {
                potential: source.source()?,
                count,
                grid_points,
                out,
            },
            Command::Forward { source, initial, times, modes, out } => ExperimentConfig::Forward {
                initial: initial_source(&initial, &source.corpus)?,
                potential: source.source()?,
                times,
                modes,
                out,
            },
            Command::Goursat {
                layout,
                problem,
                n,
                rhs,
                f,
                g,
                tolerance,
                max_iterations,
                out,
                report,
            } => ExperimentConfig::Goursat {
                layout,
                problem,
                resolution: n,
                rhs,
                f,
                g,
                tolerance,
                max_iterations,
                out,
                report,
            },
            Command::Kernel { pair, resolution, out, checks } => {
                let (p, q) = pair.sources()?;
                ExperimentConfig::Kernel { p, q, resolution, out, checks }
            }
            Command::Transform { pair, lambda, xi, resolution, out } => {
                let (p, q) = pair.sources()?;
                if xi.len() != 2 {
                    bail!("--xi takes two comma-separated values, got {}", xi.len());
                }
                ExperimentConfig::Transform {
                    p,
                    q,
                    resolution,
                    lambda,
                    xi: [xi[0], xi[1]],
                    out,
                }
            }
            Command::Verify {
                pair,
                initial,
                window,
                samples,
                modes,
                expansion_modes,
                trace_tolerance,
                kernel_tolerance,
                resolution,
                out,
            } => {
                let (p, q) = pair.sources()?;
                ExperimentConfig::Verify {
                    initial: initial_source(&initial, &pair.corpus)?,
                    p,
                    q,
                    window,
                    samples,
                    modes,
                    expansion_modes,
                    trace_tolerance,
                    kernel_tolerance,
                    resolution,
                    out,
                }
            }
            Command::Corpus { out } => ExperimentConfig::Corpus { out },
            Command::Run { config_file } => ExperimentConfig::load(&config_file)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
