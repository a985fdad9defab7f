//! Padé resummation of the fourth-order series.
//!
//! The relativistic [2,2] approximant
//!
//! ```text
//! E = m + m²λ²F₁⁴ / [−2mF₁² + 4m²λF₁F₂,₁ + 2λ²(−2δE + m³(η₄ − 4F₂,₁²))]
//! ```
//!
//! tends to a constant as λ → ∞. Setting δE = 0 gives its non-relativistic [2,2]
//! counterpart; the non-relativistic [2,1] approximant grows linearly instead.
//! Every model stores numerator and denominator as polynomials in λ for the energy
//! shift E − m, so re-expansion and pole analysis work uniformly across kinds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::FunctionalSet;
use crate::perturbation::{eta4, relativistic_correction};
use crate::series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PadeKind {
    Relativistic22,
    Nonrelativistic22,
    Nonrelativistic21,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NrOrder {
    Order21,
    Order22,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadeModel {
    pub kind: PadeKind,
    pub m: f64,
    /// Coefficients in λ of the numerator of E − m.
    pub numerator: Vec<f64>,
    /// Coefficients in λ of the denominator.
    pub denominator: Vec<f64>,
    /// lim E(λ) for λ → ∞ when finite.
    pub asymptote: Option<f64>,
    /// Real positive roots of the denominator, ascending.
    pub poles: Vec<f64>,
}

impl PadeModel {
    fn new(kind: PadeKind, m: f64, numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        if numerator.iter().chain(&denominator).any(|c| !c.is_finite()) {
            return Err(Error::DegeneratePade("non-finite coefficient".into()));
        }
        let scale = denominator.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        if scale == 0.0 || denominator[0] == 0.0 {
            return Err(Error::DegeneratePade(
                "denominator vanishes at λ = 0 (F₁ = 0?)".into(),
            ));
        }
        let asymptote = match (numerator.len(), denominator.len()) {
            (n, d) if n == d && denominator[d - 1].abs() > 1e-14 * scale => {
                Some(m + numerator[n - 1] / denominator[d - 1])
            }
            _ => None,
        };
        let poles = positive_real_roots(&denominator);
        Ok(Self {
            kind,
            m,
            numerator,
            denominator,
            asymptote,
            poles,
        })
    }

    /// E(λ) − m.
    pub fn shift(&self, lambda: f64) -> f64 {
        series::eval(&self.numerator, lambda) / series::eval(&self.denominator, lambda)
    }

    pub fn energy(&self, lambda: f64) -> f64 {
        self.m + self.shift(lambda)
    }

    /// m − E(λ), the quantity plotted against λ in scans.
    pub fn binding(&self, lambda: f64) -> f64 {
        -self.shift(lambda)
    }

    /// Taylor coefficients λ⁰ … λ^order of E(λ).
    pub fn taylor(&self, order: usize) -> Vec<f64> {
        let mut t = series::div(&self.numerator, &self.denominator, order)
            .expect("denominator is non-zero at the origin");
        t[0] += self.m;
        t
    }

    /// √(m² − E²) when the energy lies in [−m, m], `None` otherwise.
    pub fn decay_constant(&self, lambda: f64) -> Option<f64> {
        let e = self.energy(lambda);
        if e.abs() <= self.m {
            Some((self.m * self.m - e * e).max(0.0).sqrt())
        } else {
            None
        }
    }
}

/// Real λ > 0 roots of a polynomial of degree ≤ 2.
fn positive_real_roots(coeffs: &[f64]) -> Vec<f64> {
    let c = coeffs.first().copied().unwrap_or(0.0);
    let b = coeffs.get(1).copied().unwrap_or(0.0);
    let a = coeffs.get(2).copied().unwrap_or(0.0);
    let scale = c.abs().max(b.abs()).max(a.abs());
    let mut roots = Vec::new();
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            // cancellation-free form
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q != 0.0 {
                roots.push(q / a);
                roots.push(c / q);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots.retain(|r| *r > 0.0 && r.is_finite());
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

fn check_inputs(fs: &FunctionalSet, m: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid("m", format!("mass must be positive, got {m}")));
    }
    if fs.f1.value == 0.0 {
        return Err(Error::DegeneratePade("F₁ = 0".into()));
    }
    Ok(())
}

fn diagonal(fs: &FunctionalSet, m: f64, delta_e: f64, kind: PadeKind) -> Result<PadeModel> {
    let f1 = fs.f1.value;
    let f21 = fs.f21.value;
    let eta = eta4(fs);
    let numerator = vec![0.0, 0.0, m * m * f1.powi(4)];
    let denominator = vec![
        -2.0 * m * f1 * f1,
        4.0 * m * m * f1 * f21,
        2.0 * (-2.0 * delta_e + m.powi(3) * (eta - 4.0 * f21 * f21)),
    ];
    PadeModel::new(kind, m, numerator, denominator)
}

/// Relativistic [2,2] approximant, bounded as λ → ∞.
pub fn pade_relativistic(fs: &FunctionalSet, m: f64) -> Result<PadeModel> {
    check_inputs(fs, m)?;
    diagonal(fs, m, relativistic_correction(fs, m), PadeKind::Relativistic22)
}

/// Non-relativistic approximants: [2,2] with δE = 0, or [2,1].
///
/// The [2,1] form is `m − E = −mλ²F₁³ / (4mλF₂,₁ − 2F₁)`, stored with the sign that
/// makes E − m start at −(m/2)F₁²λ².
pub fn pade_nonrelativistic(fs: &FunctionalSet, m: f64, order: NrOrder) -> Result<PadeModel> {
    check_inputs(fs, m)?;
    match order {
        NrOrder::Order22 => diagonal(fs, m, 0.0, PadeKind::Nonrelativistic22),
        NrOrder::Order21 => {
            let f1 = fs.f1.value;
            let f21 = fs.f21.value;
            PadeModel::new(
                PadeKind::Nonrelativistic21,
                m,
                vec![0.0, 0.0, m * f1.powi(3)],
                vec![-2.0 * f1, 4.0 * m * f21],
            )
        }
    }
}

/// True when the relativistic [2,2] denominator has no real root:
/// δE > (m³/2)(η₄ − 3F₂,₁²), strict.
pub fn pole_free_condition(fs: &FunctionalSet, delta_e: f64, m: f64) -> bool {
    let f21 = fs.f21.value;
    delta_e > 0.5 * m.powi(3) * (eta4(fs) - 3.0 * f21 * f21)
}

const REGION_CONSTANT: f64 = 8.0 * (-6.0 + 3.0 * 1.732_050_807_568_877_2 + 2.0 * std::f64::consts::PI);

/// Pole-free condition specialised to the Gaussian pair:
/// πα(γ + 5) > 8(−6 + 3√3 + 2π)(γ + 1)m².
pub fn gaussian_region(alpha: f64, gamma: f64, m: f64) -> bool {
    std::f64::consts::PI * alpha * (gamma + 5.0) > REGION_CONSTANT * (gamma + 1.0) * m * m
}

/// Mass at which [`gaussian_region`] turns false (infinite for γ = −1).
pub fn gaussian_region_boundary(alpha: f64, gamma: f64) -> f64 {
    let denom = REGION_CONSTANT * (gamma + 1.0);
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        (std::f64::consts::PI * alpha * (gamma + 5.0) / denom).sqrt()
    }
}

/// Γ = √(m² − E²) from a Padé energy; `None` once E leaves [−m, m].
pub fn decay_constant_model(pade: &PadeModel, lambda: f64) -> Option<f64> {
    pade.decay_constant(lambda)
}
