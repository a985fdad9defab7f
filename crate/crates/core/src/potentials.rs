//! Potential pairs (V, U) entering the component equations
//!
//! ```text
//! (m - E + λV) ψ₁ - i (q + ∂ₓ) ψ₂ = 0
//! (E + m + λU) ψ₂ - i (q - ∂ₓ) ψ₁ = 0
//! ```
//!
//! A [`PotentialSpec`] is a smooth profile for each of V and U plus optional point atoms
//! `w·δ(x - x₀)`. Atoms are kept symbolic; [`PotentialSpec::eval`] never includes them and
//! consumers (the functionals) add their contribution analytically.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tail threshold defining the support radius.
pub const SUPPORT_EPSILON: f64 = 1e-16;

/// Which member of the pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    V,
    U,
}

/// A point interaction `weight · δ(x - position)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(position: f64, weight: f64) -> Self {
        Self { position, weight }
    }
}

/// Closure-backed profile for potentials outside the built-in families.
#[derive(Clone)]
pub struct CustomProfile {
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    even: bool,
    breakpoints: Vec<f64>,
    peak_abs: f64,
    min_value: f64,
}

impl CustomProfile {
    /// `breakpoints` lists positions where the function or its derivative jumps.
    /// The function must decay for |x| → ∞ and be negligible beyond |x| = 50.
    pub fn new<F>(func: F, even: bool, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let samples = 8001;
        let (mut peak_abs, mut min_value) = (0.0_f64, f64::INFINITY);
        for i in 0..samples {
            let x = -50.0 + 100.0 * i as f64 / (samples - 1) as f64;
            let v = func(x);
            peak_abs = peak_abs.max(v.abs());
            min_value = min_value.min(v);
        }
        for &b in &breakpoints {
            let v = func(b);
            peak_abs = peak_abs.max(v.abs());
            min_value = min_value.min(v);
        }
        Self {
            func: Arc::new(func),
            even,
            breakpoints,
            peak_abs,
            min_value,
        }
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("even", &self.even)
            .field("breakpoints", &self.breakpoints)
            .field("peak_abs", &self.peak_abs)
            .finish_non_exhaustive()
    }
}

/// Smooth (or piecewise smooth) part of one member of the pair.
#[derive(Debug, Clone)]
pub enum Profile {
    Zero,
    /// `amplitude · exp(-alpha x²)`
    Gaussian { amplitude: f64, alpha: f64 },
    /// `amplitude` for |x| ≤ half_width, zero outside.
    Square { amplitude: f64, half_width: f64 },
    Custom(CustomProfile),
}

impl Profile {
    pub fn custom<F>(func: F, even: bool, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Profile::Custom(CustomProfile::new(func, even, breakpoints))
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Gaussian { amplitude, alpha } => amplitude * (-alpha * x * x).exp(),
            Profile::Square {
                amplitude,
                half_width,
            } => {
                if x.abs() <= *half_width {
                    *amplitude
                } else {
                    0.0
                }
            }
            Profile::Custom(c) => (c.func)(x),
        }
    }

    pub fn scaled(&self, factor: f64) -> Profile {
        match self {
            Profile::Zero => Profile::Zero,
            Profile::Gaussian { amplitude, alpha } => Profile::Gaussian {
                amplitude: amplitude * factor,
                alpha: *alpha,
            },
            Profile::Square {
                amplitude,
                half_width,
            } => Profile::Square {
                amplitude: amplitude * factor,
                half_width: *half_width,
            },
            Profile::Custom(c) => {
                let inner = c.func.clone();
                Profile::Custom(CustomProfile {
                    func: Arc::new(move |x| factor * inner(x)),
                    even: c.even,
                    breakpoints: c.breakpoints.clone(),
                    peak_abs: c.peak_abs * factor.abs(),
                    min_value: if factor >= 0.0 {
                        c.min_value * factor
                    } else {
                        -c.peak_abs * factor.abs()
                    },
                })
            }
        }
    }

    /// Positions where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Square { half_width, .. } => vec![-half_width, *half_width],
            Profile::Custom(c) => c.breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    pub fn is_even(&self) -> bool {
        match self {
            Profile::Custom(c) => c.even,
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Gaussian { amplitude, .. } | Profile::Square { amplitude, .. } => {
                *amplitude == 0.0
            }
            Profile::Custom(c) => c.peak_abs == 0.0,
        }
    }

    pub fn peak_abs(&self) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Gaussian { amplitude, .. } | Profile::Square { amplitude, .. } => {
                amplitude.abs()
            }
            Profile::Custom(c) => c.peak_abs,
        }
    }

    /// Smallest value taken by the profile.
    pub fn min_value(&self) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Gaussian { amplitude, .. } | Profile::Square { amplitude, .. } => {
                amplitude.min(0.0)
            }
            Profile::Custom(c) => c.min_value,
        }
    }
}

/// How a spec was built; echoed into run metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Gaussian { alpha: f64, gamma: f64 },
    /// U = V on the box (pure vector coupling).
    Square { depth: f64, half_width: f64 },
    Delta { gamma: f64 },
    Custom { label: String },
}

/// Physical parameters m, λ, q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub m: f64,
    pub lambda: f64,
    pub q: f64,
}

impl ModelParams {
    pub fn new(m: f64, lambda: f64, q: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::invalid("m", format!("mass must be positive, got {m}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(
                "lambda",
                format!("coupling must be non-negative, got {lambda}"),
            ));
        }
        if !q.is_finite() {
            return Err(Error::invalid("q", "transverse momentum must be finite"));
        }
        Ok(Self { m, lambda, q })
    }

    /// k(q) = √(q² + m²)
    pub fn k(&self) -> f64 {
        self.q.hypot(self.m)
    }
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    family: Family,
    v: Profile,
    u: Profile,
    v_atoms: Vec<Atom>,
    u_atoms: Vec<Atom>,
    support_radius: f64,
}

impl PotentialSpec {
    pub fn new(
        family: Family,
        v: Profile,
        u: Profile,
        v_atoms: Vec<Atom>,
        u_atoms: Vec<Atom>,
    ) -> Result<Self> {
        for atom in v_atoms.iter().chain(&u_atoms) {
            if !(atom.position.is_finite() && atom.weight.is_finite()) {
                return Err(Error::invalid("atoms", "atom position and weight must be finite"));
            }
        }
        let has_well =
            v.min_value() < 0.0 || v_atoms.iter().any(|a| a.weight < 0.0);
        if !has_well {
            return Err(Error::invalid(
                "v",
                "V must be negative somewhere for a bound state to exist",
            ));
        }
        let support_radius = support_radius(&v, &u, &v_atoms, &u_atoms);
        Ok(Self {
            family,
            v,
            u,
            v_atoms,
            u_atoms,
            support_radius,
        })
    }

    /// V(x) = -(1+γ) e^{-αx²}, U(x) = -(1-γ) e^{-αx²}.
    pub fn gaussian_pair(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
        }
        if !(-1.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(
                "gamma",
                format!("must lie in [-1, 1], got {gamma}; rescale lambda for |gamma| > 1"),
            ));
        }
        let v = Profile::Gaussian {
            amplitude: -(1.0 + gamma),
            alpha,
        };
        let u = if gamma == 1.0 {
            Profile::Zero
        } else {
            Profile::Gaussian {
                amplitude: -(1.0 - gamma),
                alpha,
            }
        };
        Self::new(Family::Gaussian { alpha, gamma }, v, u, vec![], vec![])
    }

    /// V = -(1+γ)δ(x), U = -(1-γ)δ(x); only γ = 1 is admitted.
    pub fn delta_pair(gamma: f64) -> Result<Self> {
        if gamma != 1.0 {
            return Err(Error::DeltaContinuity { gamma });
        }
        Self::new(
            Family::Delta { gamma },
            Profile::Zero,
            Profile::Zero,
            vec![Atom::new(0.0, -(1.0 + gamma))],
            vec![],
        )
    }

    /// Square well of the given depth with U = V.
    pub fn square_well(depth: f64, half_width: f64) -> Result<Self> {
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::invalid("depth", format!("must be positive, got {depth}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid(
                "half_width",
                format!("must be positive, got {half_width}"),
            ));
        }
        let profile = Profile::Square {
            amplitude: -depth,
            half_width,
        };
        Self::new(
            Family::Square { depth, half_width },
            profile.clone(),
            profile,
            vec![],
            vec![],
        )
    }

    /// Smooth part of V or U at `x`; atoms are never included.
    #[inline]
    pub fn eval(&self, which: Component, x: f64) -> f64 {
        self.profile(which).value(x)
    }

    #[inline]
    pub fn v(&self, x: f64) -> f64 {
        self.v.value(x)
    }

    #[inline]
    pub fn u(&self, x: f64) -> f64 {
        self.u.value(x)
    }

    pub fn profile(&self, which: Component) -> &Profile {
        match which {
            Component::V => &self.v,
            Component::U => &self.u,
        }
    }

    pub fn atoms(&self, which: Component) -> &[Atom] {
        match which {
            Component::V => &self.v_atoms,
            Component::U => &self.u_atoms,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn has_atoms(&self) -> bool {
        !(self.v_atoms.is_empty() && self.u_atoms.is_empty())
    }

    /// Sorted, deduplicated non-smooth points of the smooth parts inside (-R, R).
    pub fn breakpoints(&self) -> Vec<f64> {
        let r = self.support_radius;
        let mut points: Vec<f64> = self
            .v
            .breakpoints()
            .into_iter()
            .chain(self.u.breakpoints())
            .filter(|b| b.abs() < r)
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
    }

    pub fn is_even(&self) -> bool {
        let atoms_even = |atoms: &[Atom]| {
            atoms.iter().all(|a| {
                a.position == 0.0
                    || atoms
                        .iter()
                        .any(|b| b.position == -a.position && b.weight == a.weight)
            })
        };
        self.v.is_even()
            && self.u.is_even()
            && atoms_even(&self.v_atoms)
            && atoms_even(&self.u_atoms)
    }

    /// Multiplies V by `cv` and U by `cu`, atoms included.
    pub fn scaled(&self, cv: f64, cu: f64) -> Result<Self> {
        let scale = |atoms: &[Atom], c: f64| {
            atoms
                .iter()
                .map(|a| Atom::new(a.position, a.weight * c))
                .collect::<Vec<_>>()
        };
        Self::new(
            Family::Custom {
                label: format!("scaled({cv}, {cu})"),
            },
            self.v.scaled(cv),
            self.u.scaled(cu),
            scale(&self.v_atoms, cv),
            scale(&self.u_atoms, cu),
        )
    }

    /// Same V and atoms, different smooth U.
    pub fn with_u(&self, u: Profile) -> Result<Self> {
        Self::new(
            Family::Custom {
                label: "modified U".into(),
            },
            self.v.clone(),
            u,
            self.v_atoms.clone(),
            self.u_atoms.clone(),
        )
    }
}

/// Bisection on the tail of max(|V|, |U|) against `SUPPORT_EPSILON` times the peak.
fn support_radius(v: &Profile, u: &Profile, v_atoms: &[Atom], u_atoms: &[Atom]) -> f64 {
    let atom_extent = v_atoms
        .iter()
        .chain(u_atoms)
        .map(|a| a.position.abs())
        .fold(0.0_f64, f64::max);
    let peak = v.peak_abs().max(u.peak_abs());
    if peak == 0.0 {
        return if atom_extent > 0.0 { atom_extent * 1.5 } else { 1.0 };
    }
    let threshold = SUPPORT_EPSILON * peak;
    let tail = |r: f64| {
        v.value(r)
            .abs()
            .max(v.value(-r).abs())
            .max(u.value(r).abs())
            .max(u.value(-r).abs())
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while tail(hi) >= threshold {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tail(mid) >= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.max(atom_extent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_pair_values() {
        let s = PotentialSpec::gaussian_pair(1.0, 1.0).unwrap();
        assert_eq!(s.eval(Component::V, 0.0), -2.0);
        assert_eq!(s.eval(Component::U, 0.3), 0.0);

        let s = PotentialSpec::gaussian_pair(1.0, 0.0).unwrap();
        assert_eq!(s.v(0.0), -1.0);
        assert_eq!(s.u(0.0), -1.0);
        assert!((s.eval(Component::U, 1.0) + (-1.0f64).exp()).abs() < 1e-15);
        assert!((s.eval(Component::U, 1.0) + 0.367879).abs() < 1e-6);
    }

    #[test]
    fn gaussian_support_radius() {
        let s = PotentialSpec::gaussian_pair(1.0, 1.0).unwrap();
        let r = s.support_radius();
        // 2 e^{-R²} = 2e-16
        assert!((r - (1e16f64).ln().sqrt()).abs() < 1e-9, "R = {r}");
        assert!((r - 6.1).abs() < 0.1);
        assert!(s.v(r).abs() <= SUPPORT_EPSILON * 2.0);
        assert!(s.v(-r * 1.01).abs() < SUPPORT_EPSILON * 2.0);
    }

    #[test]
    fn gaussian_pair_rejects_bad_parameters() {
        assert!(PotentialSpec::gaussian_pair(0.0, 0.5).is_err());
        assert!(PotentialSpec::gaussian_pair(-1.0, 0.5).is_err());
        assert!(PotentialSpec::gaussian_pair(1.0, 1.5).is_err());
        assert!(PotentialSpec::gaussian_pair(1.0, -1.01).is_err());
        assert!(PotentialSpec::gaussian_pair(1.0, -1.0).is_err()); // V ≡ 0: no well
    }

    #[test]
    fn delta_pair_atoms() {
        let s = PotentialSpec::delta_pair(1.0).unwrap();
        assert_eq!(s.atoms(Component::V), &[Atom::new(0.0, -2.0)]);
        assert!(s.atoms(Component::U).is_empty());
        assert_eq!(s.eval(Component::V, 0.0), 0.0);
        assert!(s.support_radius() > 0.0 && s.support_radius().is_finite());
        let sum: f64 = s.atoms(Component::V).iter().map(|a| a.weight).sum();
        assert_eq!(sum, -2.0);
    }

    #[test]
    fn delta_pair_rejects_other_gamma() {
        let err = PotentialSpec::delta_pair(0.0).unwrap_err();
        assert!(matches!(err, Error::DeltaContinuity { .. }));
        assert!(err.to_string().contains("continuous"));
    }

    #[test]
    fn square_well_profile() {
        let s = PotentialSpec::square_well(0.5, 2.0).unwrap();
        assert_eq!(s.v(3.0), 0.0);
        assert_eq!(s.v(1.9), -0.5);
        assert_eq!(s.u(-1.9), -0.5);
        assert_eq!(s.breakpoints(), vec![-2.0, 2.0]);
        assert!((s.support_radius() - 2.0).abs() < 1e-9);
        assert!(PotentialSpec::square_well(0.0, 1.0).is_err());
        assert!(PotentialSpec::square_well(1.0, -1.0).is_err());
    }

    #[test]
    fn vector_sum_independent_of_gamma() {
        for &gamma in &[-0.7, 0.0, 0.3, 1.0] {
            let s = PotentialSpec::gaussian_pair(1.3, gamma).unwrap();
            for i in 0..50 {
                let x = -4.0 + 0.17 * i as f64;
                let sum = s.v(x) + s.u(x);
                assert!((sum + 2.0 * (-1.3 * x * x).exp()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn built_in_families_are_even() {
        let specs = [
            PotentialSpec::gaussian_pair(0.5, 0.25).unwrap(),
            PotentialSpec::square_well(1.0, 1.0).unwrap(),
            PotentialSpec::delta_pair(1.0).unwrap(),
        ];
        for s in &specs {
            assert!(s.is_even());
            for i in 0..40 {
                let x = 0.13 * i as f64;
                assert_eq!(s.v(x), s.v(-x));
                assert_eq!(s.u(x), s.u(-x));
            }
        }
    }

    #[test]
    fn model_params() {
        let p = ModelParams::new(1.0, 0.5, 0.0).unwrap();
        assert_eq!(p.k(), 1.0);
        let p = ModelParams::new(3.0, 0.5, 4.0).unwrap();
        assert_eq!(p.k(), 5.0);
        assert!(ModelParams::new(0.0, 0.5, 0.0).is_err());
        assert!(ModelParams::new(1.0, -0.5, 0.0).is_err());
    }

    #[test]
    fn custom_profile_scaling() {
        let p = Profile::custom(|x| -1.0 / (1.0 + x.powi(4)).powi(8), true, vec![]);
        let s = PotentialSpec::new(
            Family::Custom { label: "t".into() },
            p,
            Profile::Zero,
            vec![],
            vec![],
        )
        .unwrap();
        let scaled = s.scaled(2.5, 1.0).unwrap();
        assert!((scaled.v(0.7) - 2.5 * s.v(0.7)).abs() < 1e-15);
        assert!(s.support_radius() > 3.0 && s.support_radius() < 3.5);
    }
}
