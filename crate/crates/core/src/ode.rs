//! Thin wrapper over the DOP853 integrator.
//!
//! Integration always runs forward in its own variable `s`; callers map `s` to
//! position. The integrator is restarted at every stop so that states land exactly
//! on sample points and potential breakpoints.
//!
//! The system handed to DOP853 is made autonomous by carrying `s` as an extra state
//! component. The upstream tableau evaluates its twelfth stage at the start of the
//! step instead of the end, which only matters when the right-hand side depends on
//! `s` explicitly.

use ode_solvers::{DVector, Dop853, OutputType, System};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeTolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

/// Failure inside the integrator, located in the integration variable.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeFailure {
    pub at: f64,
    pub reason: String,
}

struct Rhs<'a, F, const N: usize> {
    f: &'a F,
    // evaluation window, a few ulps inside the segment so that rounding of a mapped
    // position never lands across a discontinuity at either end
    lo: f64,
    hi: f64,
}

impl<F, const N: usize> System<f64, DVector<f64>> for Rhs<'_, F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn system(&self, _s: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let state: [f64; N] = std::array::from_fn(|i| y[i]);
        let out = (self.f)(y[N].clamp(self.lo, self.hi), &state);
        dy.as_mut_slice()[..N].copy_from_slice(&out);
        dy[N] = 1.0;
    }
}

const MAX_STEPS: u32 = 1_000_000;

fn advance<F, const N: usize>(
    f: &F,
    s0: f64,
    s1: f64,
    y0: [f64; N],
    tol: OdeTolerance,
) -> Result<[f64; N], OdeFailure>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let margin = 8.0 * f64::EPSILON * s0.abs().max(s1.abs()).max(1.0);
    let (lo, hi) = if s1 - s0 > 2.0 * margin {
        (s0 + margin, s1 - margin)
    } else {
        let mid = 0.5 * (s0 + s1);
        (mid, mid)
    };
    let mut solver = Dop853::from_param(
        Rhs { f, lo, hi },
        s0,
        s1,
        s1 - s0,
        DVector::from_iterator(N + 1, y0.into_iter().chain([s0])),
        tol.rel,
        tol.abs,
        0.9,
        0.0,
        0.333,
        6.0,
        s1 - s0,
        0.0,
        MAX_STEPS,
        // long exponential tails trip the stiffness heuristic spuriously
        u32::MAX,
        OutputType::Sparse,
    );
    solver.integrate().map_err(|e| OdeFailure {
        at: solver.x_out().last().copied().unwrap_or(s0),
        reason: e.to_string(),
    })?;
    let last = solver.y_out().last().ok_or_else(|| OdeFailure {
        at: s0,
        reason: "integrator produced no output".into(),
    })?;
    let out: [f64; N] = std::array::from_fn(|i| last[i]);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(OdeFailure {
            at: s1,
            reason: "state overflowed".into(),
        });
    }
    Ok(out)
}

/// Integrates from `s0` through the increasing `stops`, returning the state at each stop.
pub fn propagate<F, const N: usize>(
    f: &F,
    s0: f64,
    y0: [f64; N],
    stops: &[f64],
    tol: OdeTolerance,
) -> Result<Vec<[f64; N]>, OdeFailure>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(stops.len());
    let mut s = s0;
    let mut y = y0;
    for &next in stops {
        if next > s {
            y = advance(f, s, next, y, tol)?;
            s = next;
        }
        out.push(y);
    }
    Ok(out)
}

/// Sorted, deduplicated stops inside (s0, s1] with `s1` always last.
pub fn stops_between(s0: f64, s1: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = extra
        .into_iter()
        .filter(|s| *s > s0 && *s < s1)
        .collect();
    v.push(s1);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    v
}
