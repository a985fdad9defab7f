//! Ground state of the non-relativistic problem −ψ''/(2m) + λVψ = Eψ.
//!
//! Uses the same parity shooting as the Dirac solver: integrate inward from x = L with
//! ψ ∝ e^{−κx}, κ = √(−2mE), and bisect on ψ'(0). U plays no role here.

use serde::Serialize;

use crate::dirac_solver::{potential_stops, SolverConfig};
use crate::error::{Error, Result};
use crate::ode::{propagate, stops_between};
use crate::potentials::PotentialSpec;
use crate::shooting::{bisect, scan_brackets, sign_changes};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NrSolution {
    pub m: f64,
    pub lambda: f64,
    /// B = −E > 0.
    pub binding: f64,
    pub energy: f64,
    /// Uniform grid over [0, L]; ψ is even.
    pub grid: Vec<f64>,
    /// Normalized so that ∫ψ² over the whole line is 1.
    pub psi: Vec<f64>,
    /// |ψ'(0)| / |(ψ, ψ')(0)| at the returned energy.
    pub residual: f64,
    pub nodes: usize,
}

struct Problem<'a> {
    spec: &'a PotentialSpec,
    m: f64,
    lambda: f64,
    cfg: &'a SolverConfig,
}

impl Problem<'_> {
    fn kappa(&self, e: f64) -> f64 {
        (-2.0 * self.m * e).max(0.0).sqrt()
    }

    fn half_length(&self, e: f64) -> f64 {
        self.cfg.half_length.unwrap_or_else(|| {
            self.spec.support_radius()
                + self
                    .cfg
                    .min_tail
                    .max(self.cfg.tail_decay_lengths / self.kappa(e))
        })
    }

    /// States (ψ, ψ', ∫ψ²) at the positions `xs` (all in [0, L)).
    fn inward(&self, e: f64, l: f64, xs: &[f64]) -> Result<Vec<[f64; 3]>> {
        let (m, lam, spec) = (self.m, self.lambda, self.spec);
        let kappa = self.kappa(e);
        let rhs = move |s: f64, y: &[f64; 3]| {
            let x = l - s;
            [-y[1], -2.0 * m * (lam * spec.v(x) - e) * y[0], y[0] * y[0]]
        };
        let extra = potential_stops(spec)
            .into_iter()
            .map(|b| l - b)
            .chain(xs.iter().map(|x| l - x));
        let stops = stops_between(0.0, l, extra);
        let states = propagate(&rhs, 0.0, [1.0, -kappa, 0.0], &stops, self.cfg.ode_tolerance())
            .map_err(|f| Error::Integration {
                at: l - f.at,
                reason: f.reason,
            })?;
        Ok(xs
            .iter()
            .map(|x| {
                let s = l - x;
                let i = stops.partition_point(|t| *t < s - 1e-12 * (1.0 + s.abs()));
                states[i]
            })
            .collect())
    }

    fn matching_at(&self, e: f64, l: f64) -> Result<f64> {
        let y = self.inward(e, l, &[0.0])?[0];
        Ok(y[1] / y[0].hypot(y[1]))
    }

    fn grid(&self, l: f64) -> Vec<f64> {
        let h = self.cfg.grid_step;
        let n = (l / h).ceil() as usize;
        (0..=n).map(|j| j as f64 * h).collect()
    }
}

pub fn solve_schrodinger_ground(
    spec: &PotentialSpec,
    m: f64,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<NrSolution> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid("m", format!("mass must be positive, got {m}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(
            "lambda",
            format!("coupling must be positive, got {lambda}"),
        ));
    }
    if spec.has_atoms() {
        return Err(Error::Unsupported(
            "point atoms are handled perturbatively only".into(),
        ));
    }
    if !spec.profile(crate::potentials::Component::V).is_even() {
        return Err(Error::Unsupported("parity shooting needs an even V".into()));
    }
    cfg.validate(spec)?;
    let p = Problem {
        spec,
        m,
        lambda,
        cfg,
    };
    let floor = lambda * spec.profile(crate::potentials::Component::V).min_value();
    let lo = floor * (1.0 - cfg.edge);
    let hi = floor * cfg.edge;
    let f = |e: f64| p.matching_at(e, p.half_length(e));
    let brackets = scan_brackets(&f, lo, hi, cfg.scan_points)?;
    // the nodeless even state is the deepest parity root
    let first = brackets.first().ok_or(Error::NoBoundState {
        lower: lo,
        upper: hi,
    })?;
    let energy = bisect(&f, *first, cfg.energy_tol * (hi - lo).abs())?;

    let l = p.half_length(energy);
    let mut grid = p.grid(l);
    let l = *grid.last().expect("non-empty grid");
    let states = p.inward(energy, l, &grid[..grid.len() - 1])?;
    let kappa = p.kappa(energy);
    // ∫ψ² over the whole line: twice the half-line integral plus the tail beyond L
    let norm = 2.0 * (states[0][2] + 1.0 / (2.0 * kappa));
    let scale = states[0][0].signum() / norm.sqrt();
    let mut psi: Vec<f64> = states.iter().map(|y| y[0] * scale).collect();
    psi.push(scale);
    let residual = p.matching_at(energy, l)?.abs();
    let nodes = sign_changes(psi.iter().copied());
    grid.truncate(psi.len());
    Ok(NrSolution {
        m,
        lambda,
        binding: -energy,
        energy,
        grid,
        psi,
        residual,
        nodes,
    })
}
