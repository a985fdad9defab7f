//! Potential functionals entering the energy coefficients.
//!
//! ```text
//! F₁   = ∫ V
//! F₂,₁ = ∫∫ V(y)|x−y|V(x)
//! F₂,₂ = ∫∫ V(y)(x−y)²V(x)
//! F₃,₁ = ∫∫∫ |x−y||y−z| V(x)V(y)V(z)
//! F₃,₂ = ∫∫∫ sign(x−y)sign(x−z) U(x)V(y)V(z)
//! 𝓕(k) = ½ ∫ [(m+k)V + (m−k)U]
//! ```
//!
//! The double and triple integrals are reduced to nested one-dimensional ones through
//! the transforms `T(y) = ∫|x−y|V(x)dx` and `S(x) = ∫sign(x−y)V(y)dy`:
//! F₂,₁ = ∫V·T, F₃,₁ = ∫V·T², F₃,₂ = ∫U·S², while F₂,₂ = 2(M₀M₂ − M₁²) in terms of the
//! moments Mₙ = ∫xⁿV. Point atoms enter T and S in closed form with sign(0) = 0.

use std::cell::{Cell, RefCell};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::{Atom, Component, PotentialSpec};
use crate::quadrature::{integrate, Estimate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSettings {
    /// Plain one-dimensional integrals (F₁, moments).
    pub tol_1d: Tolerance,
    /// Outer integral of the nested reductions; inner integrals run 100× tighter.
    pub tol_nested: Tolerance,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            tol_1d: Tolerance::new(1e-12, 1e-13),
            tol_nested: Tolerance::new(1e-9, 1e-11),
        }
    }
}

impl QuadratureSettings {
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            tol_1d: self.tol_1d.scaled(1.0 / factor),
            tol_nested: self.tol_nested.scaled(1.0 / factor),
        }
    }
}

/// A functional value with its achieved absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub error: f64,
}

impl FunctionalValue {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FkEntry {
    pub m: f64,
    pub k: f64,
    pub value: f64,
}

/// F₁ … F₃,₂ for one potential pair, plus ∫U for evaluating 𝓕(k).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalSet {
    pub f1: FunctionalValue,
    pub f21: FunctionalValue,
    pub f22: FunctionalValue,
    pub f31: FunctionalValue,
    pub f32: FunctionalValue,
    pub u_integral: FunctionalValue,
    /// 𝓕(k) values requested so far, one entry per k rounded to 12 significant digits.
    pub fk: Vec<FkEntry>,
}

impl FunctionalSet {
    pub fn compute(spec: &PotentialSpec, settings: &QuadratureSettings) -> Result<Self> {
        Ok(Self {
            f1: f1(spec, settings)?,
            f21: f21(spec, settings)?,
            f22: f22(spec, settings)?,
            f31: f31(spec, settings)?,
            f32: f32(spec, settings)?,
            u_integral: moment(spec, Component::U, 0, settings.tol_1d)?,
            fk: Vec::new(),
        })
    }

    /// Builds a set from known values (closed forms, synthetic checks).
    pub fn from_values(f1: f64, f21: f64, f22: f64, f31: f64, f32: f64, u_integral: f64) -> Self {
        Self {
            f1: FunctionalValue::exact(f1),
            f21: FunctionalValue::exact(f21),
            f22: FunctionalValue::exact(f22),
            f31: FunctionalValue::exact(f31),
            f32: FunctionalValue::exact(f32),
            u_integral: FunctionalValue::exact(u_integral),
            fk: Vec::new(),
        }
    }

    /// 𝓕(k) from the cached integrals of V and U (it is linear in both).
    pub fn f_of_k(&self, m: f64, k: f64) -> Result<f64> {
        check_k(m, k)?;
        Ok(0.5 * ((m + k) * self.f1.value + (m - k) * self.u_integral.value))
    }

    /// Like [`f_of_k`](Self::f_of_k) but also records the value in `fk`.
    pub fn record_fk(&mut self, m: f64, k: f64) -> Result<f64> {
        let value = self.f_of_k(m, k)?;
        let key = round_sig(k, 12);
        if !self
            .fk
            .iter()
            .any(|e| e.m == m && round_sig(e.k, 12) == key)
        {
            self.fk.push(FkEntry { m, k, value });
        }
        Ok(value)
    }

    pub fn values(&self) -> [f64; 5] {
        [
            self.f1.value,
            self.f21.value,
            self.f22.value,
            self.f31.value,
            self.f32.value,
        ]
    }
}

fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn check_k(m: f64, k: f64) -> Result<()> {
    if !(m > 0.0) {
        return Err(Error::invalid("m", format!("must be positive, got {m}")));
    }
    if !(k >= m) {
        return Err(Error::invalid("k", format!("need k >= m, got k = {k}, m = {m}")));
    }
    Ok(())
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn atom_weight_sum(atoms: &[Atom]) -> f64 {
    atoms.iter().map(|a| a.weight.abs()).sum()
}

fn outer_breakpoints(spec: &PotentialSpec) -> Vec<f64> {
    let mut points = spec.breakpoints();
    points.extend(
        spec.atoms(Component::V)
            .iter()
            .chain(spec.atoms(Component::U))
            .map(|a| a.position),
    );
    points
}

fn with_context(err: Error, what: &str) -> Error {
    match err {
        Error::QuadratureNonConvergence {
            achieved,
            requested,
            ..
        } => Error::QuadratureNonConvergence {
            what: what.to_string(),
            achieved,
            requested,
        },
        other => other,
    }
}

/// ∫ xⁿ W(x) dx for W = V or U, atoms included.
pub fn moment(
    spec: &PotentialSpec,
    which: Component,
    power: i32,
    tol: Tolerance,
) -> Result<FunctionalValue> {
    let r = spec.support_radius();
    let profile = spec.profile(which);
    let smooth = if profile.is_zero() {
        Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        }
    } else {
        integrate(
            |x| x.powi(power) * profile.value(x),
            -r,
            r,
            &spec.breakpoints(),
            tol,
        )
        .map_err(|e| with_context(e, "moment"))?
    };
    let atoms: f64 = spec
        .atoms(which)
        .iter()
        .map(|a| a.position.powi(power) * a.weight)
        .sum();
    Ok(FunctionalValue {
        value: smooth.value + atoms,
        error: smooth.error,
    })
}

/// F₁ = ∫V.
pub fn f1(spec: &PotentialSpec, settings: &QuadratureSettings) -> Result<FunctionalValue> {
    moment(spec, Component::V, 0, settings.tol_1d).map_err(|e| with_context(e, "F1"))
}

/// 𝓕(k) = ½∫[(m+k)V + (m−k)U], requiring k ≥ m > 0.
pub fn f_of_k(spec: &PotentialSpec, m: f64, k: f64, settings: &QuadratureSettings) -> Result<f64> {
    check_k(m, k)?;
    let v = moment(spec, Component::V, 0, settings.tol_1d)?;
    let u = moment(spec, Component::U, 0, settings.tol_1d)?;
    Ok(0.5 * ((m + k) * v.value + (m - k) * u.value))
}

/// T(y) = ∫|x − y| V(x) dx, atoms included.
pub fn distance_transform(spec: &PotentialSpec, y: f64, tol: Tolerance) -> Result<Estimate> {
    let r = spec.support_radius();
    let v = spec.profile(Component::V);
    let breaks = spec.breakpoints();
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    if v.is_zero() {
        // atoms only
    } else if y.abs() >= r {
        // whole support on one side of y: T is linear there
        let m0 = integrate(|x| v.value(x), -r, r, &breaks, tol)?;
        let m1 = integrate(|x| x * v.value(x), -r, r, &breaks, tol)?;
        total.value = sign(y) * (y * m0.value - m1.value);
        total.error = m0.error * y.abs() + m1.error;
        total.evaluations = m0.evaluations + m1.evaluations;
    } else {
        let left = integrate(|x| (y - x) * v.value(x), -r, y, &breaks, tol)?;
        let right = integrate(|x| (x - y) * v.value(x), y, r, &breaks, tol)?;
        total.value = left.value + right.value;
        total.error = left.error + right.error;
        total.evaluations = left.evaluations + right.evaluations;
    }
    total.value += spec
        .atoms(Component::V)
        .iter()
        .map(|a| a.weight * (a.position - y).abs())
        .sum::<f64>();
    Ok(total)
}

/// S(x) = ∫sign(x − y) V(y) dy with sign(0) = 0, atoms included.
pub fn sign_transform(spec: &PotentialSpec, x: f64, tol: Tolerance) -> Result<Estimate> {
    let r = spec.support_radius();
    let v = spec.profile(Component::V);
    let breaks = spec.breakpoints();
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    if !v.is_zero() {
        let c = x.clamp(-r, r);
        if c > -r {
            let left = integrate(|y| v.value(y), -r, c, &breaks, tol)?;
            total.value += left.value;
            total.error += left.error;
            total.evaluations += left.evaluations;
        }
        if c < r {
            let right = integrate(|y| v.value(y), c, r, &breaks, tol)?;
            total.value -= right.value;
            total.error += right.error;
            total.evaluations += right.evaluations;
        }
    }
    total.value += spec
        .atoms(Component::V)
        .iter()
        .map(|a| a.weight * sign(x - a.position))
        .sum::<f64>();
    Ok(total)
}

/// Outer integral `∫ W(t) g(transform(t)) dt + Σ w g(transform(x_atom))` over the atoms of W.
///
/// Returns the value and an error bound combining the outer estimate with the worst
/// inner error propagated through `g` (whose derivative bound is `dg`).
fn nested<Tr, G>(
    spec: &PotentialSpec,
    which: Component,
    transform: Tr,
    g: G,
    dg: impl Fn(f64) -> f64,
    settings: &QuadratureSettings,
    what: &str,
) -> Result<FunctionalValue>
where
    Tr: Fn(f64, Tolerance) -> Result<Estimate>,
    G: Fn(f64) -> f64,
{
    let r = spec.support_radius();
    let profile = spec.profile(which);
    let inner_tol = settings.tol_nested.scaled(1e-2);
    let max_inner = Cell::new(0.0_f64);
    let max_slope = Cell::new(0.0_f64);
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let eval_transform = |t: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match transform(t, inner_tol) {
            Ok(est) => {
                max_inner.set(max_inner.get().max(est.error));
                max_slope.set(max_slope.get().max(dg(est.value).abs()));
                est.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };

    let smooth = if profile.is_zero() {
        FunctionalValue::exact(0.0)
    } else {
        let est = integrate(
            |t| {
                let w = profile.value(t);
                if w == 0.0 {
                    0.0
                } else {
                    w * g(eval_transform(t))
                }
            },
            -r,
            r,
            &outer_breakpoints(spec),
            settings.tol_nested,
        )
        .map_err(|e| with_context(e, what))?;
        FunctionalValue {
            value: est.value,
            error: est.error,
        }
    };
    let atoms: f64 = spec
        .atoms(which)
        .iter()
        .map(|a| a.weight * g(eval_transform(a.position)))
        .sum();
    if let Some(e) = failure.into_inner() {
        return Err(with_context(e, what));
    }
    let weight = moment_abs(spec, which, settings)?;
    Ok(FunctionalValue {
        value: smooth.value + atoms,
        error: smooth.error + max_inner.get() * max_slope.get() * weight,
    })
}

/// ∫|W| + Σ|w|, used to propagate inner errors.
fn moment_abs(spec: &PotentialSpec, which: Component, settings: &QuadratureSettings) -> Result<f64> {
    let r = spec.support_radius();
    let profile = spec.profile(which);
    let smooth = if profile.is_zero() {
        0.0
    } else {
        integrate(
            |x| profile.value(x).abs(),
            -r,
            r,
            &spec.breakpoints(),
            Tolerance::new(settings.tol_1d.abs.max(1e-8), 1e-6),
        )?
        .value
    };
    Ok(smooth + atom_weight_sum(spec.atoms(which)))
}

/// F₂,₁ = ∫ V(y) T(y) dy.
pub fn f21(spec: &PotentialSpec, settings: &QuadratureSettings) -> Result<FunctionalValue> {
    nested(
        spec,
        Component::V,
        |y, tol| distance_transform(spec, y, tol),
        |t| t,
        |_| 1.0,
        settings,
        "F21",
    )
}

/// F₂,₂ = 2(M₀M₂ − M₁²).
pub fn f22(spec: &PotentialSpec, settings: &QuadratureSettings) -> Result<FunctionalValue> {
    let tol = settings.tol_1d;
    let m0 = moment(spec, Component::V, 0, tol).map_err(|e| with_context(e, "F22"))?;
    let m1 = moment(spec, Component::V, 1, tol).map_err(|e| with_context(e, "F22"))?;
    let m2 = moment(spec, Component::V, 2, tol).map_err(|e| with_context(e, "F22"))?;
    let value = 2.0 * (m0.value * m2.value - m1.value * m1.value);
    let error = 2.0
        * (m0.error * m2.value.abs() + m2.error * m0.value.abs() + 2.0 * m1.error * m1.value.abs());
    Ok(FunctionalValue { value, error })
}

/// F₃,₁ = ∫ V(y) T(y)² dy.
pub fn f31(spec: &PotentialSpec, settings: &QuadratureSettings) -> Result<FunctionalValue> {
    nested(
        spec,
        Component::V,
        |y, tol| distance_transform(spec, y, tol),
        |t| t * t,
        |t| 2.0 * t,
        settings,
        "F31",
    )
}

/// F₃,₂ = ∫ U(x) S(x)² dx.
pub fn f32(spec: &PotentialSpec, settings: &QuadratureSettings) -> Result<FunctionalValue> {
    nested(
        spec,
        Component::U,
        |x, tol| sign_transform(spec, x, tol),
        |s| s * s,
        |s| 2.0 * s,
        settings,
        "F32",
    )
}
