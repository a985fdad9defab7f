//! Oracles shared by the integration tests. None of them call into the library's
//! quadrature, series or solver code.

#![allow(dead_code)]

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use shallowdirac::{Family, PotentialSpec, Profile};

pub fn gaussian(alpha: f64, gamma: f64) -> PotentialSpec {
    PotentialSpec::gaussian_pair(alpha, gamma).unwrap()
}

/// V = −sech²(x), U = −½sech²(x): smooth, even, not Gaussian.
pub fn sech2() -> PotentialSpec {
    let sech2 = |x: f64| 1.0 / x.cosh().powi(2);
    PotentialSpec::new(
        Family::Custom {
            label: "sech2".into(),
        },
        Profile::custom(move |x| -sech2(x), true, vec![]),
        Profile::custom(move |x| -0.5 * sech2(x), true, vec![]),
        vec![],
        vec![],
    )
    .unwrap()
}

pub fn gaussian_grid() -> Vec<(String, PotentialSpec)> {
    let mut out = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        for gamma in [0.0, 0.5, 1.0] {
            out.push((format!("gaussian({alpha}, {gamma})"), gaussian(alpha, gamma)));
        }
    }
    out
}

/// Every spec the corpus-wide properties run over.
pub fn corpus() -> Vec<(String, PotentialSpec)> {
    let mut out = gaussian_grid();
    out.push(("gaussian(1, -0.5)".into(), gaussian(1.0, -0.5)));
    out.push(("delta(1)".into(), PotentialSpec::delta_pair(1.0).unwrap()));
    out.push((
        "square(1, 1)".into(),
        PotentialSpec::square_well(1.0, 1.0).unwrap(),
    ));
    out.push((
        "square(0.5, 2)".into(),
        PotentialSpec::square_well(0.5, 2.0).unwrap(),
    ));
    out.push(("sech2".into(), sech2()));
    out
}

/// Closed forms for V = −(1+γ)e^{−αx²}, U = −(1−γ)e^{−αx²}:
/// [F₁, F₂,₁, F₂,₂, F₃,₁, F₃,₂].
pub fn gaussian_closed_form(alpha: f64, gamma: f64) -> [f64; 5] {
    let a = 1.0 + gamma;
    let f1 = -a * (PI / alpha).sqrt();
    let f21 = a * a * (2.0 * PI).sqrt() / alpha.powf(1.5);
    let f22 = a * a * PI / (alpha * alpha);
    let f31 =
        -a.powi(3) * (PI / alpha).powf(1.5) * (3f64.sqrt() / (PI * alpha) + 1.0 / (6.0 * alpha));
    let f32 = -(1.0 - gamma) * a * a * (PI / alpha).powf(1.5) / 3.0;
    [f1, f21, f22, f31, f32]
}

/// Composite Gauss–Legendre nodes and weights on [a, b].
pub fn composite(a: f64, b: f64, panels: usize, degree: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(degree.try_into().unwrap());
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * degree);
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
        for (x, w) in rule.as_node_weight_pairs() {
            out.push((0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w));
        }
    }
    out
}

/// ∫∫ |x−y|^p V(x)V(y) in rotated coordinates u = x−y, v = x+y, using the x↔y symmetry.
pub fn double_integral_rotated(spec: &PotentialSpec, power: i32) -> f64 {
    let r = spec.support_radius();
    let mut total = 0.0;
    for (u, wu) in composite(0.0, 2.0 * r, 48, 16) {
        let half = 2.0 * r - u;
        for (v, wv) in composite(-half, half, 48, 16) {
            let x = 0.5 * (v + u);
            let y = 0.5 * (v - u);
            total += wu * wv * u.powi(power) * spec.v(x) * spec.v(y);
        }
    }
    // dx dy = du dv / 2, and the u < 0 half doubles it back
    total
}

/// Product-rule triple integrals with the y and z ranges split at x:
/// (∫∫∫ |x−y||x−z| V V V, ∫∫∫ sign(x−y)sign(x−z) U V V).
pub fn triple_integrals(spec: &PotentialSpec, panels: usize) -> (f64, f64) {
    let r = spec.support_radius();
    let mut f31 = 0.0;
    let mut f32 = 0.0;
    for (x, wx) in composite(-r, r, panels, 12) {
        let mut t = 0.0;
        let mut s = 0.0;
        for (lo, hi, sign) in [(-r, x, 1.0), (x, r, -1.0)] {
            if hi > lo {
                for (y, wy) in composite(lo, hi, panels, 12) {
                    let vy = spec.v(y);
                    t += wy * (x - y).abs() * vy;
                    s += wy * sign * vy;
                }
            }
        }
        f31 += wx * spec.v(x) * t * t;
        f32 += wx * spec.u(x) * s * s;
    }
    (f31, f32)
}

/// Monte-Carlo estimate of ∫∫∫ sign(x−y)sign(x−z) U(x)V(y)V(z) for a Gaussian pair,
/// importance-sampled from the Gaussian itself. Returns (mean, standard error).
pub fn f32_monte_carlo(alpha: f64, gamma: f64, samples: usize, seed: u64) -> (f64, f64) {
    let sigma = (0.5 / alpha).sqrt();
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    // U V V / p³ is constant for this family
    let weight = -(1.0 - gamma) * (1.0 + gamma).powi(2) * (PI / alpha).powf(1.5);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let x: f64 = normal.sample(&mut rng);
        let y: f64 = normal.sample(&mut rng);
        let z: f64 = normal.sample(&mut rng);
        let v = weight * ((x - y).signum() * (x - z).signum());
        sum += v;
        sum2 += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Bisection on a continuous function with a sign change in [lo, hi].
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change in [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Even-parity matching condition of the Dirac square well U = V = −d on |x| ≤ a:
/// p sin(pa)(E+m) − Γ(E+m−λd)cos(pa), continued to imaginary p.
pub fn square_well_condition(e: f64, m: f64, lambda: f64, d: f64, a: f64) -> f64 {
    let gamma = (m * m - e * e).sqrt();
    let b = e + m - lambda * d;
    let p2 = b * (e - m + lambda * d);
    if p2 >= 0.0 {
        let p = p2.sqrt();
        p * (p * a).sin() * (e + m) - gamma * b * (p * a).cos()
    } else {
        let k = (-p2).sqrt();
        -k * (k * a).sinh() * (e + m) - gamma * b * (k * a).cosh()
    }
}

/// Ground-state energy of the Dirac square well, by scanning down from m for the first
/// sign change of the matching condition.
pub fn square_well_exact(m: f64, lambda: f64, d: f64, a: f64) -> f64 {
    let f = |e: f64| square_well_condition(e, m, lambda, d, a);
    let n = 20_000;
    let mut hi = m * (1.0 - 1e-15);
    let mut fhi = f(hi);
    for i in 1..=n {
        let lo = m - 2.0 * m * i as f64 / n as f64;
        let flo = f(lo);
        if flo * fhi < 0.0 {
            return bisect(f, lo, hi);
        }
        hi = lo;
        fhi = flo;
    }
    panic!("no square-well bound state for λ = {lambda}");
}

/// Least-squares slope of ln|y| against ln x.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|(_, y)| y.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `n` log-spaced points in [lo, hi].
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// ψ̃₂(0)/|ψ(0)| for the Dirac system, integrated inward from x = L with classical RK4.
pub fn dirac_matching_rk4(spec: &PotentialSpec, m: f64, lambda: f64, e: f64, l: f64, h: f64) -> f64 {
    let gamma = (m * m - e * e).sqrt();
    let rhs = |x: f64, y: [f64; 2]| {
        [
            (e + m + lambda * spec.u(x)) * y[1],
            -(e - m - lambda * spec.v(x)) * y[0],
        ]
    };
    let n = (l / h).ceil() as usize;
    let h = l / n as f64;
    let mut y = [e + m, -gamma];
    let mut x = l;
    for _ in 0..n {
        let k1 = rhs(x, y);
        let k2 = rhs(x - 0.5 * h, [y[0] - 0.5 * h * k1[0], y[1] - 0.5 * h * k1[1]]);
        let k3 = rhs(x - 0.5 * h, [y[0] - 0.5 * h * k2[0], y[1] - 0.5 * h * k2[1]]);
        let k4 = rhs(x - h, [y[0] - h * k3[0], y[1] - h * k3[1]]);
        for i in 0..2 {
            y[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        x -= h;
    }
    y[1] / y[0].hypot(y[1])
}

/// Root of the RK4 matching function inside [lo, hi].
pub fn dirac_energy_rk4(spec: &PotentialSpec, m: f64, lambda: f64, lo: f64, hi: f64, l: f64, h: f64) -> f64 {
    bisect(|e| dirac_matching_rk4(spec, m, lambda, e, l, h), lo, hi)
}
