//! Weak-coupling expansion of the bound-state energy.
//!
//! In one dimension
//!
//! ```text
//! E = m − (m/2)F₁²λ² − m²F₁F₂,₁λ³ + [−(m³/2)η₄ + δE]λ⁴ + O(λ⁵)
//! η₄ = F₁²F₂,₂ + 2F₁F₃,₁ + F₂,₁²
//! κ₄ = ½(F₁F₃,₂ + F₁⁴)
//! δE = (m/2)(κ₄ − F₁⁴/4)
//! ```
//!
//! The λ² and λ³ terms and the η₄ part depend on V only; δE is the first term that sees U.
//! Everything is assembled from a [`FunctionalSet`], never by integrating again.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{FunctionalSet, QuadratureSettings};
use crate::potentials::PotentialSpec;
use crate::series;

/// How an energy was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pt4,
    Pt2TwoD,
    PadeRelativistic,
    PadeNr22,
    PadeNr21,
    Shooting,
    NrShooting,
    ExactOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub method: Method,
    pub lambda: f64,
    pub energy: f64,
    /// Absolute error estimate when the method provides one.
    pub error: Option<f64>,
}

/// Coefficients of E(λ) = m + c₂λ² + c₃λ³ + (c₄ⁿʳ + c₄ʳᵉˡ)λ⁴.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySeries {
    pub m: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4_nr: f64,
    pub c4_rel: f64,
    pub delta_e: f64,
    pub eta4: f64,
    pub kappa4: f64,
}

impl EnergySeries {
    pub fn eval(&self, lambda: f64) -> f64 {
        series::eval(&self.coefficients(), lambda)
    }

    /// Coefficients of λ⁰ … λ⁴.
    pub fn coefficients(&self) -> [f64; 5] {
        [self.m, 0.0, self.c2, self.c3, self.c4_nr + self.c4_rel]
    }

    /// Non-relativistic part Ẽ(λ) (the shift from m without δE).
    pub fn nonrelativistic_shift(&self, lambda: f64) -> f64 {
        series::eval(&[0.0, 0.0, self.c2, self.c3, self.c4_nr], lambda)
    }
}

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("m", format!("mass must be positive, got {m}")))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "lambda",
            format!("coupling must be non-negative, got {lambda}"),
        ))
    }
}

pub(crate) fn eta4(fs: &FunctionalSet) -> f64 {
    let [f1, f21, f22, f31, _] = fs.values();
    f1 * f1 * f22 + 2.0 * f1 * f31 + f21 * f21
}

pub(crate) fn kappa4(fs: &FunctionalSet) -> f64 {
    let [f1, _, _, _, f32] = fs.values();
    0.5 * (f1 * f32 + f1.powi(4))
}

/// δE = (m/2)(κ₄ − F₁⁴/4).
pub fn relativistic_correction(fs: &FunctionalSet, m: f64) -> f64 {
    0.5 * m * (kappa4(fs) - 0.25 * fs.f1.value.powi(4))
}

pub fn energy_series_1d(fs: &FunctionalSet, m: f64) -> Result<EnergySeries> {
    check_mass(m)?;
    let f1 = fs.f1.value;
    let f21 = fs.f21.value;
    let eta4 = eta4(fs);
    let kappa4 = kappa4(fs);
    let delta_e = relativistic_correction(fs, m);
    Ok(EnergySeries {
        m,
        c2: -0.5 * m * f1 * f1,
        c3: -m * m * f1 * f21,
        c4_nr: -0.5 * m.powi(3) * eta4,
        c4_rel: delta_e,
        delta_e,
        eta4,
        kappa4,
    })
}

/// Fourth-order energy at coupling λ ≥ 0.
pub fn eval_pt4(series: &EnergySeries, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(series.eval(lambda))
}

/// Second-order energy of the quasi-bound state with transverse momentum q:
/// k − (λ²/2k)𝓕(k)², k = √(q² + m²).
pub fn energy_2d_pt2(
    spec: &PotentialSpec,
    m: f64,
    q: f64,
    lambda: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    check_mass(m)?;
    let k = q.hypot(m);
    let fk = crate::functionals::f_of_k(spec, m, k, settings)?;
    energy_2d_from_fk(k, fk, lambda)
}

/// Same as [`energy_2d_pt2`] with 𝓕(k) taken from a precomputed set.
pub fn energy_2d_pt2_from(fs: &FunctionalSet, m: f64, q: f64, lambda: f64) -> Result<f64> {
    check_mass(m)?;
    let k = q.hypot(m);
    energy_2d_from_fk(k, fs.f_of_k(m, k)?, lambda)
}

fn energy_2d_from_fk(k: f64, fk: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(k - lambda * lambda / (2.0 * k) * fk * fk)
}

/// Leading (β → 0) coefficients of Δ in E = √(k² − Δ), Δ = Σ δₙλⁿ, at q = 0.
///
/// δ₀ and δ₁ vanish in the limit; δ₂ = 𝓕(m)², δ₃ = 2m³F₁F₂,₁, δ₄ = m⁴η₄ − m²κ₄.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaCoefficients {
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

impl DeltaCoefficients {
    /// Taylor coefficients λ⁰…λ⁴ of √(m² − δ₂λ² − δ₃λ³ − δ₄λ⁴).
    pub fn reexpand(&self, m: f64) -> Vec<f64> {
        let radicand = [m * m, 0.0, -self.d2, -self.d3, -self.d4];
        series::sqrt(&radicand, 4).expect("m² > 0")
    }
}

pub fn delta_coefficients(fs: &FunctionalSet, m: f64) -> Result<DeltaCoefficients> {
    check_mass(m)?;
    let fm = fs.f_of_k(m, m)?;
    Ok(DeltaCoefficients {
        d2: fm * fm,
        d3: 2.0 * m.powi(3) * fs.f1.value * fs.f21.value,
        d4: m.powi(4) * eta4(fs) - m * m * kappa4(fs),
    })
}

/// Closed-form energy of the γ = 1 delta pair: m(1 − λ²)/(1 + λ²).
pub fn delta_well_exact(m: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    m * (1.0 - l2) / (1.0 + l2)
}
