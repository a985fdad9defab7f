use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use shallowdirac::perturbation::energy_2d_pt2_from;
use shallowdirac::{
    energy_series_1d, gaussian_region, gaussian_region_boundary, pade_nonrelativistic,
    pade_relativistic, pole_free_condition, scan_gamma, solve_dirac_ground,
    solve_schrodinger_ground, BoundStateSolution, Family, FunctionalSet, NrOrder, PadeModel,
    PotentialSpec, QuadratureSettings,
};

use crate::args::{Command, CommonArgs, EnergyMethod, PadeKindArg};
use crate::config::{Format, RunConfig};
use crate::report::{self, Cell, Destination, Metadata, Table};

/// How a run ended once its config was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Some points failed; they are recorded in the output.
    Partial { failed: usize, total: usize },
}

pub fn run(command: Command) -> Result<Status> {
    let jobs = match &command {
        Command::Functionals(c) | Command::Scan(c) | Command::Fit(c) => c.io.jobs()?,
        Command::Energy { common, .. } | Command::Pade { common, .. } | Command::Shoot { common, .. } => {
            common.io.jobs()?
        }
        Command::Region(r) => r.io.jobs()?,
    };
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match command {
        Command::Functionals(c) => functionals(&c),
        Command::Energy { common, method } => energy(&common, method),
        Command::Pade { common, kind } => pade(&common, kind),
        Command::Region(r) => region(&r.resolve()?),
        Command::Shoot {
            common,
            wavefunction,
        } => shoot(&common, wavefunction),
        Command::Scan(c) => scan(&c),
        Command::Fit(c) => fit(&c),
    }
}

fn quadrature() -> QuadratureSettings {
    QuadratureSettings::default()
}

fn format_of(cfg: &RunConfig, default: Format) -> Format {
    cfg.output.format.unwrap_or(default)
}

fn destination(cfg: &RunConfig, command: &str, format: Format) -> Result<Destination> {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    Ok(Destination::resolve(
        cfg.output.path.as_deref(),
        &format!("{command}.{ext}"),
        "output.path",
    )?)
}

fn metadata(command: &str, cfg: &RunConfig, spec: Option<&PotentialSpec>) -> Metadata {
    let mut meta = Metadata::new(command, cfg);
    meta.tolerances = json!({ "quadrature": quadrature() });
    if let Some(Family::Square { .. }) = spec.map(PotentialSpec::family) {
        meta.note("square well uses U = V (pure vector coupling)");
    }
    meta
}

fn record_functionals(meta: &mut Metadata, fs: &FunctionalSet) {
    for (name, v) in [
        ("f1", fs.f1),
        ("f21", fs.f21),
        ("f22", fs.f22),
        ("f31", fs.f31),
        ("f32", fs.f32),
    ] {
        meta.achieved(&format!("{name}_error"), v.error);
    }
}

fn finish(failed: usize, total: usize) -> Status {
    if failed == 0 {
        Status::Complete
    } else {
        Status::Partial { failed, total }
    }
}

fn functionals(args: &CommonArgs) -> Result<Status> {
    let cfg = args.resolve()?;
    let spec = cfg.potential()?;
    let mut fs = FunctionalSet::compute(&spec, &quadrature())?;
    let mut meta = metadata("functionals", &cfg, Some(&spec));
    record_functionals(&mut meta, &fs);
    let mut table = Table::new(&["functional", "value", "error_estimate"]);
    for (name, v) in [
        ("F1", fs.f1),
        ("F2_1", fs.f21),
        ("F2_2", fs.f22),
        ("F3_1", fs.f31),
        ("F3_2", fs.f32),
        ("U_integral", fs.u_integral),
    ] {
        table.push(vec![Cell::Text(name.into()), Cell::Num(v.value), Cell::Num(v.error)]);
    }
    if cfg.model.m.is_some() {
        let m = cfg.mass()?;
        let k = cfg.q()?.hypot(m);
        let value = fs.record_fk(m, k)?;
        table.push(vec![Cell::Text(format!("F(k={k})")), Cell::Num(value), Cell::Opt(None)]);
    }
    let format = format_of(&cfg, Format::Csv);
    report::write(
        &destination(&cfg, "functionals", format)?,
        format,
        &meta,
        &table,
        serde_json::to_value(&fs)?,
    )?;
    Ok(Status::Complete)
}

fn energy(args: &CommonArgs, method: EnergyMethod) -> Result<Status> {
    let cfg = args.resolve()?;
    let spec = cfg.potential()?;
    let m = cfg.mass()?;
    let lambdas = cfg.couplings()?;
    let fs = FunctionalSet::compute(&spec, &quadrature())?;
    let mut meta = metadata("energy", &cfg, Some(&spec));
    record_functionals(&mut meta, &fs);
    let (table, data) = match method {
        EnergyMethod::Pt4 => {
            meta.option("method", "pt4");
            let series = energy_series_1d(&fs, m)?;
            let mut table = Table::new(&["lambda", "energy", "m_minus_E"]);
            let mut rows = Vec::new();
            for &l in &lambdas {
                let e = series.eval(l);
                table.push(vec![Cell::Num(l), Cell::Num(e), Cell::Num(m - e)]);
                rows.push(json!({ "lambda": l, "energy": e }));
            }
            (table, json!({ "series": series, "rows": rows }))
        }
        EnergyMethod::Pt2TwoD => {
            meta.option("method", "pt2-2d");
            let q = cfg.q()?;
            let k = q.hypot(m);
            let mut table = Table::new(&["lambda", "q", "k", "energy"]);
            let mut rows = Vec::new();
            for &l in &lambdas {
                let e = energy_2d_pt2_from(&fs, m, q, l)?;
                table.push(vec![Cell::Num(l), Cell::Num(q), Cell::Num(k), Cell::Num(e)]);
                rows.push(json!({ "lambda": l, "energy": e }));
            }
            (table, json!({ "q": q, "k": k, "rows": rows }))
        }
    };
    let format = format_of(&cfg, Format::Csv);
    report::write(&destination(&cfg, "energy", format)?, format, &meta, &table, data)?;
    Ok(Status::Complete)
}

fn pade(args: &CommonArgs, kind: PadeKindArg) -> Result<Status> {
    let cfg = args.resolve()?;
    let spec = cfg.potential()?;
    let m = cfg.mass()?;
    let lambdas = cfg.couplings()?;
    let fs = FunctionalSet::compute(&spec, &quadrature())?;
    let mut meta = metadata("pade", &cfg, Some(&spec));
    record_functionals(&mut meta, &fs);
    let (model, name) = match kind {
        PadeKindArg::Rel => (pade_relativistic(&fs, m)?, "rel"),
        PadeKindArg::Nr21 => (pade_nonrelativistic(&fs, m, NrOrder::Order21)?, "nr21"),
        PadeKindArg::Nr22 => (pade_nonrelativistic(&fs, m, NrOrder::Order22)?, "nr22"),
    };
    meta.option("kind", name);
    let delta_e = energy_series_1d(&fs, m)?.delta_e;
    let pole_free = pole_free_condition(&fs, delta_e, m);
    if !model.poles.is_empty() {
        meta.note(format!("denominator vanishes at λ = {:?}", model.poles));
    }
    let mut table = Table::new(&["lambda", "energy", "gamma"]);
    let mut rows = Vec::new();
    for &l in &lambdas {
        let e = model.energy(l);
        let g = model.decay_constant(l);
        table.push(vec![Cell::Num(l), Cell::Num(e), Cell::Num(g.unwrap_or(f64::NAN))]);
        rows.push(json!({ "lambda": l, "energy": e, "gamma": g }));
    }
    let data = json!({ "model": model, "relativistic_pole_free": pole_free, "rows": rows });
    let format = format_of(&cfg, Format::Csv);
    report::write(&destination(&cfg, "pade", format)?, format, &meta, &table, data)?;
    Ok(Status::Complete)
}

#[derive(Debug, Serialize)]
struct RegionRow {
    alpha: f64,
    gamma: f64,
    m_boundary: Option<f64>,
    m_upper: f64,
    /// Numerical functionals give the same verdict on both sides of the boundary.
    numeric_agrees: Option<bool>,
}

fn region(cfg: &RunConfig) -> Result<Status> {
    let r = cfg.region()?;
    let n = r.gamma_steps;
    let points: Vec<(f64, f64)> = r
        .alpha
        .iter()
        .flat_map(|&a| (0..n).map(move |i| (a, -1.0 + 2.0 * i as f64 / (n - 1) as f64)))
        .collect();
    let m_max = r.m_max;
    let rows: Vec<RegionRow> = points
        .par_iter()
        .map(|&(alpha, gamma)| {
            let mb = gaussian_region_boundary(alpha, gamma);
            RegionRow {
                alpha,
                gamma,
                m_boundary: mb.is_finite().then_some(mb),
                m_upper: mb.min(m_max),
                numeric_agrees: numeric_check(alpha, gamma, mb, m_max),
            }
        })
        .collect();
    let mut meta = metadata("region", cfg, None);
    meta.note("pole-free for m < m_boundary; m_upper clips the boundary to the plotted range");
    let checked = rows.iter().filter(|r| r.numeric_agrees.is_some()).count();
    let disagreements = rows.iter().filter(|r| r.numeric_agrees == Some(false)).count();
    meta.achieved("numeric_checks", checked as f64);
    meta.achieved("numeric_disagreements", disagreements as f64);
    let mut table = Table::new(&["alpha", "gamma", "m_boundary", "m_upper", "numeric_agrees"]);
    for row in &rows {
        table.push(vec![
            Cell::Num(row.alpha),
            Cell::Num(row.gamma),
            Cell::Num(row.m_boundary.unwrap_or(f64::INFINITY)),
            Cell::Num(row.m_upper),
            row.numeric_agrees.map_or(Cell::Opt(None), Cell::Bool),
        ]);
    }
    let format = format_of(cfg, Format::Csv);
    report::write(
        &destination(cfg, "region", format)?,
        format,
        &meta,
        &table,
        serde_json::to_value(&rows)?,
    )?;
    Ok(finish(disagreements, rows.len()))
}

/// Compares the closed-form region with the pole test on numerically integrated
/// functionals just inside and just outside the boundary.
fn numeric_check(alpha: f64, gamma: f64, mb: f64, m_max: f64) -> Option<bool> {
    let spec = PotentialSpec::gaussian_pair(alpha, gamma).ok()?;
    let fs = FunctionalSet::compute(&spec, &quadrature()).ok()?;
    let verdict = |m: f64| {
        let de = energy_series_1d(&fs, m).ok()?.delta_e;
        Some(pole_free_condition(&fs, de, m) == gaussian_region(alpha, gamma, m))
    };
    if mb.is_finite() {
        Some(verdict(0.999 * mb)? && verdict(1.001 * mb)?)
    } else {
        verdict(m_max)
    }
}

#[derive(Debug, Serialize)]
struct ShootSummary<'a> {
    energy: f64,
    m_minus_e: f64,
    gamma: f64,
    gamma_fit: Option<f64>,
    amplitude_fit: Option<f64>,
    fit_window: (f64, f64),
    fit_error: Option<&'a str>,
    residual: f64,
    nodes: usize,
    half_length: f64,
    norm_trapezoid: f64,
    parity_asymmetry: f64,
    singular_points: &'a [shallowdirac::dirac_solver::SingularPoint],
    candidate_energies: &'a [f64],
    bisection_tol: f64,
}

impl<'a> From<&'a BoundStateSolution> for ShootSummary<'a> {
    fn from(s: &'a BoundStateSolution) -> Self {
        Self {
            energy: s.energy,
            m_minus_e: s.m - s.energy,
            gamma: s.gamma,
            gamma_fit: s.gamma_fit,
            amplitude_fit: s.amplitude_fit,
            fit_window: s.fit_window,
            fit_error: s.fit_error.as_deref(),
            residual: s.residual,
            nodes: s.nodes,
            half_length: s.half_length,
            norm_trapezoid: s.spinor.norm_trapezoid,
            parity_asymmetry: s.spinor.parity_asymmetry,
            singular_points: &s.spinor.singular_points,
            candidate_energies: &s.candidate_energies,
            bisection_tol: s.bisection_tol,
        }
    }
}

fn solver_metadata(meta: &mut Metadata, solver: &shallowdirac::SolverConfig) {
    meta.tolerances = json!({ "quadrature": quadrature(), "solver": solver });
    meta.note("ground state: the parity root with the fewest ψ₁ nodes, highest energy among ties");
}

fn shoot(args: &CommonArgs, wavefunction: Option<std::path::PathBuf>) -> Result<Status> {
    let mut cfg = args.resolve()?;
    if wavefunction.is_some() {
        cfg.output.wavefunction = wavefunction;
    }
    let spec = cfg.potential()?;
    let m = cfg.mass()?;
    let lambda = cfg.single_coupling()?;
    let solver = cfg.solver(&spec)?;
    let format = format_of(&cfg, Format::Json);
    let dest = destination(&cfg, "shoot", format)?;
    let wf_dest = match &cfg.output.wavefunction {
        Some(p) => Some(Destination::resolve(Some(p), "wavefunction.csv", "output.wavefunction")?),
        None => None,
    };
    let sol = solve_dirac_ground(&spec, m, lambda, &solver)?;
    let mut meta = metadata("shoot", &cfg, Some(&spec));
    solver_metadata(&mut meta, &solver);
    meta.achieved("residual", sol.residual);
    meta.achieved("bisection_tol", sol.bisection_tol);
    meta.achieved("norm_trapezoid", sol.spinor.norm_trapezoid);
    meta.achieved("parity_asymmetry", sol.spinor.parity_asymmetry);
    let summary = ShootSummary::from(&sol);
    let mut table = Table::new(&[
        "lambda", "energy", "m_minus_E", "gamma", "gamma_fit", "amplitude_fit", "residual", "nodes",
    ]);
    table.push(vec![
        Cell::Num(lambda),
        Cell::Num(sol.energy),
        Cell::Num(m - sol.energy),
        Cell::Num(sol.gamma),
        Cell::Opt(sol.gamma_fit),
        Cell::Opt(sol.amplitude_fit),
        Cell::Num(sol.residual),
        Cell::Int(sol.nodes),
    ]);
    report::write(&dest, format, &meta, &table, serde_json::to_value(&summary)?)?;
    if let Some(wf) = wf_dest {
        let sp = &sol.spinor;
        let mut t = Table::new(&["x", "psi1", "psi2", "rho"]);
        for i in 0..sp.grid.len() {
            t.push(vec![
                Cell::Num(sp.grid[i]),
                Cell::Num(sp.psi1[i]),
                Cell::Num(sp.psi2[i]),
                Cell::Num(sp.rho[i]),
            ]);
        }
        let mut wmeta = metadata("shoot", &cfg, Some(&spec));
        solver_metadata(&mut wmeta, &solver);
        wmeta.note("psi2 is the real lower component; the spinor is (psi1, i·psi2)");
        report::write_csv(&wf, &wmeta, &t)?;
    }
    Ok(Status::Complete)
}

#[derive(Debug, Serialize)]
struct ScanRow {
    lambda: f64,
    m_minus_e_shoot: Option<f64>,
    m_minus_e_pade: Option<f64>,
    m_minus_e_nr22: Option<f64>,
    m_minus_e_nr21: Option<f64>,
    m_minus_e_nr: Option<f64>,
    error: Option<String>,
}

fn scan(args: &CommonArgs) -> Result<Status> {
    let cfg = args.resolve()?;
    let spec = cfg.potential()?;
    let m = cfg.mass()?;
    let lambdas = cfg.couplings()?;
    let solver = cfg.solver(&spec)?;
    let format = format_of(&cfg, Format::Csv);
    let dest = destination(&cfg, "scan", format)?;
    let fs = FunctionalSet::compute(&spec, &quadrature())?;
    let mut meta = metadata("scan", &cfg, Some(&spec));
    solver_metadata(&mut meta, &solver);
    record_functionals(&mut meta, &fs);
    let model = |r: shallowdirac::Result<PadeModel>, name: &str, meta: &mut Metadata| match r {
        Ok(p) => Some(p),
        Err(e) => {
            meta.note(format!("{name} Padé unavailable: {e}"));
            None
        }
    };
    let rel = model(pade_relativistic(&fs, m), "relativistic", &mut meta);
    let nr22 = model(pade_nonrelativistic(&fs, m, NrOrder::Order22), "[2,2] non-relativistic", &mut meta);
    let nr21 = model(pade_nonrelativistic(&fs, m, NrOrder::Order21), "[2,1] non-relativistic", &mut meta);
    let binding = |p: &Option<PadeModel>, l: f64| p.as_ref().map(|p| p.binding(l));

    let results: Vec<(ScanRow, Option<f64>)> = lambdas
        .par_iter()
        .map(|&l| {
            let mut errors = Vec::new();
            let dirac = solve_dirac_ground(&spec, m, l, &solver)
                .map_err(|e| errors.push(format!("shooting: {e}")))
                .ok();
            let nr = solve_schrodinger_ground(&spec, m, l, &solver)
                .map_err(|e| errors.push(format!("non-relativistic: {e}")))
                .ok();
            let row = ScanRow {
                lambda: l,
                m_minus_e_shoot: dirac.as_ref().map(|s| m - s.energy),
                m_minus_e_pade: binding(&rel, l),
                m_minus_e_nr22: binding(&nr22, l),
                m_minus_e_nr21: binding(&nr21, l),
                m_minus_e_nr: nr.map(|s| s.binding),
                error: (!errors.is_empty()).then(|| errors.join("; ")),
            };
            (row, dirac.map(|s| s.residual))
        })
        .collect();
    let max_residual = results.iter().filter_map(|r| r.1).fold(0.0, f64::max);
    meta.achieved("max_residual", max_residual);
    let rows: Vec<ScanRow> = results.into_iter().map(|r| r.0).collect();
    let failed = rows.iter().filter(|r| r.error.is_some()).count();

    let mut table = Table::new(&[
        "lambda",
        "m_minus_E_shoot",
        "m_minus_E_pade",
        "m_minus_E_nr22",
        "m_minus_E_nr21",
        "m_minus_E_nr",
        "error",
    ]);
    for r in &rows {
        table.push(vec![
            Cell::Num(r.lambda),
            Cell::Opt(r.m_minus_e_shoot),
            Cell::Opt(r.m_minus_e_pade),
            Cell::Opt(r.m_minus_e_nr22),
            Cell::Opt(r.m_minus_e_nr21),
            Cell::Opt(r.m_minus_e_nr),
            Cell::Text(r.error.clone().unwrap_or_default()),
        ]);
    }
    report::write(&dest, format, &meta, &table, serde_json::to_value(&rows)?)?;
    Ok(finish(failed, rows.len()))
}

fn fit(args: &CommonArgs) -> Result<Status> {
    let cfg = args.resolve()?;
    let spec = cfg.potential()?;
    let m = cfg.mass()?;
    let lambdas = cfg.couplings()?;
    let solver = cfg.solver(&spec)?;
    let format = format_of(&cfg, Format::Csv);
    let dest = destination(&cfg, "fit", format)?;
    let rows = scan_gamma(&spec, m, &lambdas, &solver)?;
    let mut meta = metadata("fit", &cfg, Some(&spec));
    solver_metadata(&mut meta, &solver);
    meta.note("gamma_model is empty where the relativistic Padé energy leaves [−m, m]");
    let exact = |e: Option<f64>| e.map(|e| (m * m - e * e).max(0.0).sqrt());
    let mut table = Table::new(&[
        "lambda",
        "energy",
        "gamma_fit",
        "gamma_exact",
        "gamma_model",
        "error",
    ]);
    let mut data: Vec<Value> = Vec::new();
    for r in &rows {
        table.push(vec![
            Cell::Num(r.lambda),
            Cell::Opt(r.energy),
            Cell::Opt(r.gamma_fit),
            Cell::Opt(exact(r.energy)),
            Cell::Opt(r.gamma_model),
            Cell::Text(r.error.clone().unwrap_or_default()),
        ]);
        let mut v = serde_json::to_value(r)?;
        v["gamma_exact"] = json!(exact(r.energy));
        data.push(v);
    }
    let failed = rows.iter().filter(|r| r.gamma_fit.is_none()).count();
    report::write(&dest, format, &meta, &table, Value::Array(data))?;
    Ok(finish(failed, rows.len()))
}
