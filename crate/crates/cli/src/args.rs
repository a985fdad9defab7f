//! Command-line flags and how they override the run config.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{invalid, ConfigError, Format, Lambda, PotentialConfig, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "shallowdirac", version, about = "Bound states of a 1D Dirac particle in shallow and deep wells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potential functionals F₁, F₂,₁, F₂,₂, F₃,₁, F₃,₂ and 𝓕(k).
    Functionals(CommonArgs),
    /// Perturbative energies over a coupling list.
    Energy {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = EnergyMethod::Pt4)]
        method: EnergyMethod,
    },
    /// Padé approximant energies and decay constants (CSV rows λ, E, Γ or NaN).
    Pade {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = PadeKindArg::Rel)]
        kind: PadeKindArg,
    },
    /// Pole-free region of the relativistic Padé for Gaussian wells, per α over γ ∈ [−1, 1].
    Region(RegionArgs),
    /// Shooting ground state at one coupling, optionally with the wavefunction.
    Shoot {
        #[command(flatten)]
        common: CommonArgs,
        /// CSV file for (x, psi1, psi2, rho).
        #[arg(long, value_name = "PATH")]
        wavefunction: Option<PathBuf>,
    },
    /// m − E against λ from shooting, Padé models and the non-relativistic solver.
    Scan(CommonArgs),
    /// Fitted decay constant against λ, next to √(m² − E²) and the Padé model.
    Fit(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnergyMethod {
    /// Fourth-order one-dimensional series.
    Pt4,
    /// Second-order quasi-bound energy at transverse momentum q.
    #[value(name = "pt2-2d")]
    Pt2TwoD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PadeKindArg {
    Rel,
    Nr21,
    Nr22,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Gaussian,
    Square,
    Delta,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct IoArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, short = 'c', value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; `-` for stdout. Relative paths resolve against SHALLOWDIRAC_OUTPUT_DIR.
    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Worker threads for scans.
    #[arg(long, short = 'j')]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub depth: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub half_width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// A single coupling or a range start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<Lambda>,
    /// Transverse momentum for pt2-2d.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub scan_points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_step: Option<f64>,
    /// Fit window x_min:x_max.
    #[arg(long, value_parser = parse_window)]
    pub fit_window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Comma-separated α values.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long)]
    pub gamma_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub m_max: Option<f64>,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected x_min:x_max, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn base_config(io: &IoArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &io.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = io.format {
        cfg.output.format = Some(f);
    }
    if let Some(p) = &io.output {
        cfg.output.path = Some(p.clone());
    }
    Ok(cfg)
}

impl IoArgs {
    pub fn jobs(&self) -> Result<Option<usize>, ConfigError> {
        match self.jobs {
            Some(0) => Err(invalid("jobs", "need at least one worker")),
            j => Ok(j),
        }
    }
}

impl CommonArgs {
    /// The config file with every given flag applied on top.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = base_config(&self.io)?;
        cfg.potential = self.potential(cfg.potential.take())?;
        if let Some(m) = self.m {
            cfg.model.m = Some(m);
        }
        if let Some(l) = self.lambda {
            cfg.model.lambda = Some(l);
        }
        if let Some(q) = self.q {
            cfg.model.q = Some(q);
        }
        let s = &mut cfg.solver;
        if let Some(v) = self.rel_tol {
            s.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            s.abs_tol = v;
        }
        if let Some(v) = self.scan_points {
            s.scan_points = v;
        }
        if let Some(v) = self.grid_step {
            s.grid_step = v;
        }
        if let Some(v) = self.fit_window {
            s.fit_window = v;
        }
        Ok(cfg)
    }

    fn potential(&self, file: Option<PotentialConfig>) -> Result<Option<PotentialConfig>, ConfigError> {
        use PotentialConfig as P;
        let family = match (self.family, &file) {
            (Some(f), _) => Some(f),
            (None, Some(P::Gaussian { .. })) => Some(FamilyName::Gaussian),
            (None, Some(P::Square { .. })) => Some(FamilyName::Square),
            (None, Some(P::Delta { .. })) => Some(FamilyName::Delta),
            (None, None) => None,
        };
        // parameters from the file count only when the family is unchanged
        let (mut alpha, mut gamma, mut depth, mut half_width) = (None, None, None, None);
        match file {
            Some(P::Gaussian { alpha: a, gamma: g }) if family == Some(FamilyName::Gaussian) => {
                alpha = Some(a);
                gamma = Some(g);
            }
            Some(P::Square {
                depth: d,
                half_width: w,
            }) if family == Some(FamilyName::Square) => {
                depth = Some(d);
                half_width = Some(w);
            }
            Some(P::Delta { gamma: g }) if family == Some(FamilyName::Delta) => gamma = Some(g),
            _ => {}
        }
        alpha = self.alpha.or(alpha);
        gamma = self.gamma.or(gamma);
        depth = self.depth.or(depth);
        half_width = self.half_width.or(half_width);

        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| invalid(format!("potential.{name}"), "required for this family"))
        };
        let reject = |given: bool, name: &str, fam: &str| {
            if given {
                Err(invalid(
                    format!("potential.{name}"),
                    format!("not a parameter of the {fam} family"),
                ))
            } else {
                Ok(())
            }
        };
        let Some(family) = family else {
            for (given, name) in [
                (self.alpha.is_some(), "alpha"),
                (self.gamma.is_some(), "gamma"),
                (self.depth.is_some(), "depth"),
                (self.half_width.is_some(), "half_width"),
            ] {
                if given {
                    return Err(invalid(
                        format!("potential.{name}"),
                        "given without a family; add --family",
                    ));
                }
            }
            return Ok(None);
        };
        Ok(Some(match family {
            FamilyName::Gaussian => {
                reject(self.depth.is_some(), "depth", "gaussian")?;
                reject(self.half_width.is_some(), "half_width", "gaussian")?;
                P::Gaussian {
                    alpha: need(alpha, "alpha")?,
                    gamma: need(gamma, "gamma")?,
                }
            }
            FamilyName::Square => {
                reject(self.alpha.is_some(), "alpha", "square")?;
                reject(self.gamma.is_some(), "gamma", "square")?;
                P::Square {
                    depth: need(depth, "depth")?,
                    half_width: need(half_width, "half_width")?,
                }
            }
            FamilyName::Delta => {
                reject(self.alpha.is_some(), "alpha", "delta")?;
                reject(self.depth.is_some(), "depth", "delta")?;
                reject(self.half_width.is_some(), "half_width", "delta")?;
                P::Delta {
                    gamma: gamma.unwrap_or(1.0),
                }
            }
        }))
    }
}

impl RegionArgs {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = base_config(&self.io)?;
        if !self.alpha.is_empty() {
            cfg.region.alpha = self.alpha.clone();
        }
        if let Some(n) = self.gamma_steps {
            cfg.region.gamma_steps = n;
        }
        if let Some(m) = self.m_max {
            cfg.region.m_max = m;
        }
        Ok(cfg)
    }
}
