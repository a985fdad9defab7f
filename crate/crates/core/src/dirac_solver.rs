//! Shooting solver for the ground state of the one-dimensional Dirac equation at q = 0.
//!
//! With ψ₂ = iψ̃₂ the component equations become the real first-order system
//!
//! ```text
//! ψ₁' = (E + m + λU) ψ̃₂
//! ψ̃₂' = −(E − m − λV) ψ₁
//! ```
//!
//! which is regular everywhere. Where E + m + λU(x) vanishes it forces ψ₁' = 0; the
//! solver reports those points as a diagnostic. Beyond the support of the potentials
//! the bound solution is (ψ₁, ψ̃₂) ∝ (E + m, ∓Γ) e^{−Γ|x|} with Γ = √(m² − E²), which
//! fixes the initial data at x = ±L. For even potentials the ground state has ψ̃₂(0) = 0.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{FunctionalSet, QuadratureSettings};
use crate::ode::{propagate, stops_between, OdeFailure, OdeTolerance};
use crate::potentials::PotentialSpec;
use crate::resummation::{decay_constant_model, pade_relativistic};
use crate::shooting::{bisect, scan_brackets, sign_changes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of trial energies in the bracket scan.
    pub scan_points: usize,
    /// Scan range is (−m + edge·m, m − edge·m).
    pub edge: f64,
    /// Bisection stops once the bracket is narrower than energy_tol·m.
    pub energy_tol: f64,
    pub fit_window: (f64, f64),
    pub grid_step: f64,
    /// Fixed half-length of the domain; derived from Γ when absent.
    pub half_length: Option<f64>,
    /// Tail beyond the support is max(min_tail, tail_decay_lengths / Γ).
    pub min_tail: f64,
    pub tail_decay_lengths: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            scan_points: 200,
            edge: 1e-6,
            energy_tol: 1e-12,
            fit_window: (5.0, 50.0),
            grid_step: 0.01,
            half_length: None,
            min_tail: 10.0,
            tail_decay_lengths: 8.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, spec: &PotentialSpec) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be positive, got {v}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("edge", self.edge)?;
        positive("energy_tol", self.energy_tol)?;
        positive("grid_step", self.grid_step)?;
        positive("min_tail", self.min_tail)?;
        positive("tail_decay_lengths", self.tail_decay_lengths)?;
        if self.edge >= 1.0 {
            return Err(Error::invalid("edge", "must be below 1"));
        }
        if self.scan_points < 2 {
            return Err(Error::invalid("scan_points", "need at least 2"));
        }
        let (lo, hi) = self.fit_window;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid(
                "fit_window",
                format!("need 0 <= x_min < x_max, got ({lo}, {hi})"),
            ));
        }
        if let Some(l) = self.half_length {
            if !(l > spec.support_radius() && l.is_finite()) {
                return Err(Error::invalid(
                    "half_length",
                    format!(
                        "must exceed the support radius {:.6}, got {l}",
                        spec.support_radius()
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn ode_tolerance(&self) -> OdeTolerance {
        OdeTolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
        }
    }

    /// Same settings with both step tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            ..*self
        }
    }

    fn half_length_for(&self, spec: &PotentialSpec, gamma: f64) -> f64 {
        self.half_length.unwrap_or_else(|| {
            spec.support_radius() + self.min_tail.max(self.tail_decay_lengths / gamma)
        })
    }
}

/// A zero of E + m + λU(x), where ψ₁ must be stationary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularPoint {
    pub x: f64,
    /// Finite-difference ψ₁'(x) from the normalized samples.
    pub dpsi1: f64,
    /// max |ψ₁'| over the grid, for scale.
    pub dpsi1_scale: f64,
}

/// Normalized real spinor on a uniform grid over [−L, L].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spinor {
    pub grid: Vec<f64>,
    pub psi1: Vec<f64>,
    /// ψ̃₂, the real lower component (ψ₂ = iψ̃₂).
    pub psi2: Vec<f64>,
    pub rho: Vec<f64>,
    /// Trapezoidal ∫ρ on the grid plus the analytic exponential tails.
    pub norm_trapezoid: f64,
    /// Largest deviation of ψ₁ from even and ψ̃₂ from odd, relative to max |ψ|.
    pub parity_asymmetry: f64,
    pub singular_points: Vec<SingularPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStateSolution {
    pub m: f64,
    pub lambda: f64,
    pub energy: f64,
    /// √(m² − E²).
    pub gamma: f64,
    pub half_length: f64,
    #[serde(flatten)]
    pub spinor: Spinor,
    pub amplitude_fit: Option<f64>,
    pub gamma_fit: Option<f64>,
    /// Window actually used by the fit (the requested one clipped to the grid).
    pub fit_window: (f64, f64),
    pub fit_error: Option<String>,
    /// |ψ̃₂(0)| / |ψ(0)| at the returned energy.
    pub residual: f64,
    /// Nodes of ψ₁ on x ≥ 0.
    pub nodes: usize,
    pub bisection_tol: f64,
    /// Every parity root found in the scan, ascending.
    pub candidate_energies: Vec<f64>,
}

struct Problem<'a> {
    spec: &'a PotentialSpec,
    m: f64,
    lambda: f64,
    cfg: &'a SolverConfig,
}

impl Problem<'_> {
    fn decay(&self, e: f64) -> f64 {
        (self.m * self.m - e * e).max(0.0).sqrt()
    }

    fn map_failure(&self, f: OdeFailure, to_x: impl Fn(f64) -> f64) -> Error {
        Error::Integration {
            at: to_x(f.at),
            reason: f.reason,
        }
    }

    /// Integrates x = L → 0 with the norm accumulated in the third component,
    /// returning the state at each requested position (descending).
    fn right_half(&self, e: f64, l: f64, xs: &[f64]) -> Result<Vec<[f64; 3]>> {
        let (m, lam, spec) = (self.m, self.lambda, self.spec);
        let gamma = self.decay(e);
        let rhs = move |s: f64, y: &[f64; 3]| {
            let x = l - s;
            [
                -(e + m + lam * spec.u(x)) * y[1],
                (e - m - lam * spec.v(x)) * y[0],
                y[0] * y[0] + y[1] * y[1],
            ]
        };
        let extra = potential_stops(spec)
            .into_iter()
            .map(|b| l - b)
            .chain(xs.iter().map(|x| l - x));
        let stops = stops_between(0.0, l, extra);
        let states = propagate(&rhs, 0.0, [e + m, -gamma, 0.0], &stops, self.cfg.ode_tolerance())
            .map_err(|f| self.map_failure(f, |s| l - s))?;
        Ok(xs
            .iter()
            .map(|x| pick(&stops, &states, l - x))
            .collect())
    }

    fn left_half(&self, e: f64, l: f64, xs: &[f64]) -> Result<Vec<[f64; 3]>> {
        let (m, lam, spec) = (self.m, self.lambda, self.spec);
        let gamma = self.decay(e);
        let rhs = move |s: f64, y: &[f64; 3]| {
            let x = s - l;
            [
                (e + m + lam * spec.u(x)) * y[1],
                -(e - m - lam * spec.v(x)) * y[0],
                y[0] * y[0] + y[1] * y[1],
            ]
        };
        let extra = potential_stops(spec)
            .into_iter()
            .map(|b| b + l)
            .chain(xs.iter().map(|x| l - x));
        let stops = stops_between(0.0, l, extra);
        let states = propagate(&rhs, 0.0, [e + m, gamma, 0.0], &stops, self.cfg.ode_tolerance())
            .map_err(|f| self.map_failure(f, |s| s - l))?;
        // xs are distances from the origin: position −x sits at s = L − x
        Ok(xs
            .iter()
            .map(|x| pick(&stops, &states, l - x))
            .collect())
    }

    /// Parity matching function ψ̃₂(0)/|ψ(0)| with L adapted to Γ(E).
    fn matching(&self, e: f64) -> Result<f64> {
        let l = self.cfg.half_length_for(self.spec, self.decay(e));
        self.matching_at(e, l)
    }

    fn matching_at(&self, e: f64, l: f64) -> Result<f64> {
        let y = self.right_half(e, l, &[0.0])?[0];
        Ok(y[1] / y[0].hypot(y[1]))
    }

    fn grid(&self, l: f64) -> (f64, Vec<f64>) {
        let h = self.cfg.grid_step;
        let n = (l / h).ceil() as usize;
        let l = n as f64 * h;
        (l, (0..=n).map(|j| j as f64 * h).collect())
    }

    fn nodes(&self, e: f64) -> Result<usize> {
        let l = self.cfg.half_length_for(self.spec, self.decay(e));
        let (l, xs) = self.grid(l);
        let states = self.right_half(e, l, &xs[..xs.len() - 1])?;
        Ok(sign_changes(states.iter().map(|y| y[0])))
    }
}

/// Positions where the integrator must restart: breakpoints and the edges of the support.
///
/// A support edge that nearly coincides with a breakpoint is dropped so that the
/// discontinuity is never straddled by a sliver of a step.
pub(crate) fn potential_stops(spec: &PotentialSpec) -> Vec<f64> {
    let r = spec.support_radius();
    let mut stops = spec.breakpoints();
    for edge in [r, -r] {
        if !stops.iter().any(|b| (b - edge).abs() <= 1e-9 * (1.0 + r)) {
            stops.push(edge);
        }
    }
    stops
}

fn pick(stops: &[f64], states: &[[f64; 3]], s: f64) -> [f64; 3] {
    let tol = 1e-12 * (1.0 + s.abs());
    let i = stops.partition_point(|t| *t < s - tol);
    debug_assert!((stops[i] - s).abs() <= tol, "every sample position is a stop");
    states[i]
}

fn check_inputs(spec: &PotentialSpec, m: f64, lambda: f64, cfg: &SolverConfig) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid("m", format!("mass must be positive, got {m}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(
            "lambda",
            format!("coupling must be non-negative, got {lambda}"),
        ));
    }
    if spec.has_atoms() {
        return Err(Error::Unsupported(
            "point atoms are handled perturbatively only".into(),
        ));
    }
    if !spec.is_even() {
        return Err(Error::Unsupported(
            "parity shooting needs even V and U".into(),
        ));
    }
    cfg.validate(spec)
}

/// Normalized spinor at a converged energy.
pub fn reconstruct_spinor(
    spec: &PotentialSpec,
    m: f64,
    lambda: f64,
    energy: f64,
    half_length: f64,
    cfg: &SolverConfig,
) -> Result<Spinor> {
    let p = Problem {
        spec,
        m,
        lambda,
        cfg,
    };
    let gamma = p.decay(energy);
    if gamma == 0.0 {
        return Err(Error::invalid("energy", "must lie strictly inside (−m, m)"));
    }
    let (l, xs) = p.grid(half_length);
    let (right, left) = rayon::join(
        || p.right_half(energy, l, &xs[..xs.len() - 1]),
        || p.left_half(energy, l, &xs[..xs.len() - 1]),
    );
    let (right, left) = (right?, left?);
    let n = xs.len() - 1;
    let start_r = [energy + m, -gamma];
    let start_l = [energy + m, gamma];
    // match ψ₁ at the origin
    let c = right[0][0] / left[0][0];

    let mut grid = Vec::with_capacity(2 * n + 1);
    let mut psi1 = Vec::with_capacity(2 * n + 1);
    let mut psi2 = Vec::with_capacity(2 * n + 1);
    grid.push(-l);
    psi1.push(c * start_l[0]);
    psi2.push(c * start_l[1]);
    for j in (1..n).rev() {
        grid.push(-xs[j]);
        psi1.push(c * left[j][0]);
        psi2.push(c * left[j][1]);
    }
    for j in 0..n {
        grid.push(xs[j]);
        psi1.push(right[j][0]);
        psi2.push(right[j][1]);
    }
    grid.push(l);
    psi1.push(start_r[0]);
    psi2.push(start_r[1]);

    let rho_edge_r = start_r[0].powi(2) + start_r[1].powi(2);
    let rho_edge_l = c * c * (start_l[0].powi(2) + start_l[1].powi(2));
    let norm = right[0][2]
        + c * c * left[0][2]
        + (rho_edge_r + rho_edge_l) / (2.0 * gamma);
    let scale = psi1[n].signum() / norm.sqrt();
    for v in psi1.iter_mut().chain(psi2.iter_mut()) {
        *v *= scale;
    }
    let rho: Vec<f64> = psi1
        .iter()
        .zip(&psi2)
        .map(|(a, b)| a * a + b * b)
        .collect();

    let h = cfg.grid_step;
    let inner: f64 = rho.iter().sum::<f64>() - 0.5 * (rho[0] + rho[2 * n]);
    let norm_trapezoid = h * inner + (rho[0] + rho[2 * n]) / (2.0 * gamma);

    let peak = psi1
        .iter()
        .chain(&psi2)
        .fold(0.0_f64, |a, v| a.max(v.abs()));
    let parity_asymmetry = (0..=n)
        .map(|j| {
            let (a, b) = (n - j, n + j);
            (psi1[a] - psi1[b]).abs().max((psi2[a] + psi2[b]).abs())
        })
        .fold(0.0_f64, f64::max)
        / peak;

    let singular_points = singular_points(spec, m, lambda, energy, &grid, &psi1);
    Ok(Spinor {
        grid,
        psi1,
        psi2,
        rho,
        norm_trapezoid,
        parity_asymmetry,
        singular_points,
    })
}

fn singular_points(
    spec: &PotentialSpec,
    m: f64,
    lambda: f64,
    energy: f64,
    grid: &[f64],
    psi1: &[f64],
) -> Vec<SingularPoint> {
    let g = |x: f64| energy + m + lambda * spec.u(x);
    let n = grid.len();
    if n < 3 {
        return Vec::new();
    }
    let h = grid[1] - grid[0];
    let deriv: Vec<f64> = (0..n)
        .map(|j| {
            let (a, b) = (j.saturating_sub(1), (j + 1).min(n - 1));
            (psi1[b] - psi1[a]) / (grid[b] - grid[a])
        })
        .collect();
    let scale = deriv.iter().fold(0.0_f64, |a, d| a.max(d.abs()));
    let mut out = Vec::new();
    for j in 0..n - 1 {
        let (ga, gb) = (g(grid[j]), g(grid[j + 1]));
        if ga * gb > 0.0 || (ga == 0.0 && j > 0) {
            continue;
        }
        let (mut lo, mut hi) = (grid[j], grid[j + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) < 0.0) == (ga < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        let t = (x - grid[j]) / h;
        out.push(SingularPoint {
            x,
            dpsi1: (1.0 - t) * deriv[j] + t * deriv[j + 1],
            dpsi1_scale: scale,
        });
    }
    out
}

/// Least-squares fit of ln ψ₁ = ln A − Γx over samples with x in `window`.
pub fn fit_decay(grid: &[f64], psi1: &[f64], window: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = window;
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(psi1)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(x, p)| (*x, *p))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit(format!(
            "fewer than two samples in window ({lo}, {hi})"
        )));
    }
    if let Some((x, p)) = pts.iter().find(|(_, p)| !(*p > 1e-300)) {
        return Err(Error::Fit(format!(
            "psi1 = {p:e} at x = {x} is not usable; shrink the window"
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = pts.iter().map(|(_, p)| p.ln()).sum::<f64>() / n;
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(sxy, sxx), (x, p)| {
        let dx = x - mx;
        (sxy + dx * (p.ln() - my), sxx + dx * dx)
    });
    if sxx == 0.0 {
        return Err(Error::Fit("all samples at the same position".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok((intercept.exp(), -slope))
}

/// Ground state of the Dirac problem for an even, atom-free potential pair.
pub fn solve_dirac_ground(
    spec: &PotentialSpec,
    m: f64,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<BoundStateSolution> {
    check_inputs(spec, m, lambda, cfg)?;
    let p = Problem {
        spec,
        m,
        lambda,
        cfg,
    };
    let lo = -m + cfg.edge * m;
    let hi = m - cfg.edge * m;
    let f = |e: f64| p.matching(e);
    let brackets = scan_brackets(&f, lo, hi, cfg.scan_points)?;
    if brackets.is_empty() {
        return Err(Error::NoBoundState {
            lower: lo,
            upper: hi,
        });
    }
    let tol = cfg.energy_tol * m;
    let roots: Vec<f64> = brackets
        .par_iter()
        .map(|b| bisect(&f, *b, tol))
        .collect::<Result<_>>()?;
    let nodes: Vec<usize> = roots
        .par_iter()
        .map(|&e| p.nodes(e))
        .collect::<Result<_>>()?;
    // fewest nodes of ψ₁; among equals the highest energy
    let (energy, nodes) = roots
        .iter()
        .zip(&nodes)
        .min_by(|a, b| a.1.cmp(b.1).then(b.0.total_cmp(a.0)))
        .map(|(e, n)| (*e, *n))
        .expect("at least one root");

    let gamma = p.decay(energy);
    let l = cfg
        .half_length_for(spec, gamma)
        .max(if cfg.half_length.is_some() { 0.0 } else { cfg.fit_window.1 });
    let spinor = reconstruct_spinor(spec, m, lambda, energy, l, cfg)?;
    let half_length = *spinor.grid.last().expect("non-empty grid");
    let residual = p.matching_at(energy, half_length)?.abs();

    let window = (cfg.fit_window.0, cfg.fit_window.1.min(half_length));
    let (amplitude_fit, gamma_fit, fit_error) = match fit_decay(&spinor.grid, &spinor.psi1, window) {
        Ok((a, g)) => (Some(a), Some(g), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok(BoundStateSolution {
        m,
        lambda,
        energy,
        gamma,
        half_length,
        spinor,
        amplitude_fit,
        gamma_fit,
        fit_window: window,
        fit_error,
        residual,
        nodes,
        bisection_tol: tol,
        candidate_energies: roots,
    })
}

/// One row of a decay-constant scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRow {
    pub lambda: f64,
    pub energy: Option<f64>,
    /// Γ from the exponential fit of ψ₁.
    pub gamma_fit: Option<f64>,
    /// Γ from the relativistic [2,2] Padé energy, undefined once it leaves [−m, m].
    pub gamma_model: Option<f64>,
    pub error: Option<String>,
}

/// Fitted and Padé-model decay constants over a list of couplings; rows keep input order.
pub fn scan_gamma(
    spec: &PotentialSpec,
    m: f64,
    lambdas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<GammaRow>> {
    let fs = FunctionalSet::compute(spec, &QuadratureSettings::default())?;
    let pade = pade_relativistic(&fs, m).ok();
    Ok(lambdas
        .par_iter()
        .map(|&lambda| {
            let gamma_model = pade.as_ref().and_then(|p| decay_constant_model(p, lambda));
            match solve_dirac_ground(spec, m, lambda, cfg) {
                Ok(sol) => GammaRow {
                    lambda,
                    energy: Some(sol.energy),
                    gamma_fit: sol.gamma_fit,
                    gamma_model,
                    error: sol.fit_error,
                },
                Err(e) => GammaRow {
                    lambda,
                    energy: None,
                    gamma_fit: None,
                    gamma_model,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}
