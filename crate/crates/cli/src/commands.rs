use hybrid_cooling::amplitudes::{self, DriveParams, Thresholds};
use hybrid_cooling::cooling::{self, Limit};
use hybrid_cooling::fock::{self, FockConfig};
use hybrid_cooling::moments::{self, Moment};
use hybrid_cooling::presets::{self, Figure};
use hybrid_cooling::sweep::{self, Axis, CellRule, Scale, SweepSpec};
use hybrid_cooling::{detunings, spectrum, Error, ModelParams};

use crate::setup::{solved, Setup};
use crate::table::{Cell, Table};
use crate::{CliError, Command, Method, Rule};

/// A complete table, plus a failure to report once it has been written.
pub struct Output {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Self { table, failure: None }
    }
}

pub fn dispatch(cmd: &Command, setup: &Setup) -> Result<Output, CliError> {
    let mut out: Output = match cmd {
        Command::Spectrum { omega_min, omega_max, points } => {
            spectrum_table(&setup.point()?, *omega_min, *omega_max, *points)?.into()
        }
        Command::Solve => solve_table(&setup.base)?.into(),
        Command::Coeffs => coeffs_table(&setup.point()?)?.into(),
        Command::Evolve { t_end, samples, method, dt, force, moments } => {
            if *method == Method::Rk4 && setup.preset == Some(Figure::Fig5b) && !force {
                return Err(CliError::Usage("rk4 on fig5b is very slow; pass --force to run it".into()));
            }
            evolve_table(&setup.point()?, *t_end, *samples, *method, *dt, *moments)?.into()
        }
        Command::Steady => steady_table(&setup.point()?)?.into(),
        Command::Sweep { axis1, axis2, rule, numeric } => {
            sweep_table(setup, axis1.as_deref(), axis2.as_deref(), *rule, *numeric)?.into()
        }
        Command::Feasibility { omega_p, lambda0, g0, n_atoms, delta_c_prime, excitation, margin } => {
            let p = setup.base;
            let d = DriveParams {
                omega_p: *omega_p,
                lambda0: *lambda0,
                g0: *g0,
                n_atoms: *n_atoms,
                delta_c_prime: *delta_c_prime,
                kappa: p.kappa,
                gamma: p.gamma,
                delta_g: p.delta_g,
                delta_gr: p.delta_gr,
                omega_r: p.omega_r,
            };
            feasibility_table(&d, Thresholds { excitation: *excitation, margin: *margin })?.into()
        }
        Command::OracleCheck { dims, dt, t_end, stride, tol } => {
            let cfg = FockConfig { dims: parse_dims(dims)?, dt: *dt, t_end: *t_end, stride: *stride };
            oracle_table(&setup.base, &cfg, *tol)?
        }
    };
    let mut head = Table::default();
    setup.annotate(&mut head);
    head.append(out.table);
    out.table = head;
    Ok(out)
}

fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|k| min + (max - min) * k as f64 / last).collect()
}

/// NaN where the model has a pole, any other error propagates.
fn or_nan(r: Result<f64, Error>) -> Result<f64, Error> {
    match r {
        Err(Error::Pole { .. }) => Ok(f64::NAN),
        r => r,
    }
}

pub fn spectrum_table(p: &ModelParams, min: f64, max: f64, points: usize) -> Result<Table, CliError> {
    if points < 2 || !(min < max) {
        return Err(CliError::Usage("spectrum needs omega_min < omega_max and at least 2 points".into()));
    }
    let mut t = Table::new(&["omega", "s", "s_gamma0", "s_upper"]);
    for w in linspace(min, max, points) {
        let s = spectrum::noise_spectrum(w, p).map(Some).or_else(|e| match e {
            Error::Pole { .. } => Ok(None),
            e => Err(e),
        })?;
        let (s, up) = s.map_or((f64::NAN, f64::NAN), |s| (s.s, s.s_upper));
        let g0 = or_nan(spectrum::spectrum_gamma0(w, p))?;
        t.push(vec![w.into(), s.into(), g0.into(), up.into()]);
    }
    Ok(t)
}

pub fn solve_table(p: &ModelParams) -> Result<Table, CliError> {
    let eta = p.eta.ok_or_else(|| CliError::Usage("solve needs eta".into()))?;
    let sols = detunings::solve(p, eta)?;
    let mut t = Table::new(&["branch", "default", "delta_g", "delta_gr", "delta_c", "eta_prime", "r24", "r28", "r_m"]);
    for (i, s) in sols.iter().enumerate() {
        t.push(vec![
            s.branch.to_string().into(),
            (i == 0).into(),
            s.delta_g.into(),
            s.delta_gr.into(),
            s.delta_c.into(),
            s.eta_prime.into(),
            s.residuals.r24.into(),
            s.residuals.r28.into(),
            s.residuals.r_m.into(),
        ]);
    }
    Ok(t)
}

fn limit(l: Limit) -> Cell {
    l.value().unwrap_or(f64::INFINITY).into()
}

pub fn coeffs_table(p: &ModelParams) -> Result<Table, CliError> {
    let r = cooling::report(p)?;
    let (n_th_max, gamma_m_max) = match cooling::ground_state_requirements(p) {
        Ok(b) => (limit(b.n_th_max), limit(b.gamma_m_max)),
        Err(Error::Regime(_)) => (f64::NAN.into(), f64::NAN.into()),
        Err(e) => return Err(e.into()),
    };
    let mut t =
        Table::new(&["a_plus", "a_minus", "w", "n_ss", "cooperativity", "limit", "stable", "n_th_max", "gamma_m_max"]);
    t.push(vec![
        r.a_plus.into(),
        r.a_minus.into(),
        r.w.into(),
        r.n_ss.into(),
        p.cooperativity().into(),
        r.limit.unwrap_or(f64::NAN).into(),
        r.stable.into(),
        n_th_max,
        gamma_m_max,
    ]);
    Ok(t)
}

pub fn evolve_table(
    p: &ModelParams,
    t_end: Option<f64>,
    samples: usize,
    method: Method,
    dt: Option<f64>,
    with_moments: bool,
) -> Result<Table, CliError> {
    if samples < 2 {
        return Err(CliError::Usage("evolve needs at least 2 samples".into()));
    }
    let report = cooling::report(p)?;
    let t_end = match t_end {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(_) => return Err(CliError::Usage("t_end must be positive".into())),
        None if report.stable => 10.0 / report.w,
        None => return Err(Error::Instability(format!("W = {:e} <= 0", report.w)).into()),
    };
    let gen = moments::build_generator(p);
    let s0 = moments::thermal_initial(p);
    let traj = match method {
        Method::Exact => moments::evolve_exact(&gen, &s0, &linspace(0.0, t_end, samples))?,
        Method::Rk4 => {
            let dt = dt.ok_or_else(|| CliError::Usage("rk4 needs --dt".into()))?;
            let steps = (t_end / dt).round().max(1.0) as usize;
            moments::evolve_rk4(&gen, &s0, dt, t_end, (steps / (samples - 1)).max(1))?
        }
    };
    let times = traj.times();
    let theory = cooling::evolution(p, &times)?;
    let steady = or_nan(moments::steady_state(&gen).map(|s| s.phonon())).unwrap_or(f64::NAN);

    let mut header: Vec<String> = ["t", "n_numeric", "n_theory", "n_steady"].map(String::from).to_vec();
    if with_moments {
        for m in Moment::ALL {
            header.push(format!("re_{}", m.name()));
            header.push(format!("im_{}", m.name()));
        }
    }
    let mut t = Table::new(&header);
    t.comment(format!("w = {}", crate::table::fmt_f64(report.w)));
    t.comment(format!("n_ss = {}", crate::table::fmt_f64(report.n_ss)));
    for w in &traj.warnings {
        t.comment(format!("warning: {w}"));
    }
    for ((s, n), th) in traj.states.iter().zip(&traj.phonon).zip(theory) {
        let mut row: Vec<Cell> = vec![s.time.into(), (*n).into(), th.into(), steady.into()];
        if with_moments {
            for v in s.values {
                row.push(v.re.into());
                row.push(v.im.into());
            }
        }
        t.push(row);
    }
    Ok(t)
}

pub fn steady_table(p: &ModelParams) -> Result<Table, CliError> {
    let s = moments::steady_state(&moments::build_generator(p))?;
    let r = cooling::report(p)?;
    let mut t = Table::new(&["n_numeric", "n_theory", "w", "ada", "ede", "rdr"]);
    t.push(vec![
        s.phonon().into(),
        r.n_ss.into(),
        r.w.into(),
        s.get(Moment::AdA).re.into(),
        s.get(Moment::EdE).re.into(),
        s.get(Moment::RdR).re.into(),
    ]);
    Ok(t)
}

fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let bad = || CliError::Usage(format!("expected name:min:max:count[:log|:linear], got `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(bad());
    }
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let scale = match parts.get(4) {
        None | Some(&"linear") => Scale::Linear,
        Some(&"log") => Scale::Log,
        Some(_) => return Err(bad()),
    };
    let count = parts[3].parse::<usize>().map_err(|_| bad())?;
    Ok(Axis::new(parts[0], num(parts[1])?, num(parts[2])?, count, scale))
}

fn parse_dims(s: &str) -> Result<[usize; 4], CliError> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad dims `{s}`")))?;
    v.try_into().map_err(|_| CliError::Usage(format!("dims needs four entries, got `{s}`")))
}

pub fn sweep_table(
    setup: &Setup,
    axis1: Option<&str>,
    axis2: Option<&str>,
    rule: Rule,
    numeric: bool,
) -> Result<Table, CliError> {
    let custom = axis1.is_some();
    match setup.preset {
        Some(Figure::Fig2a) if !custom => return fig2a_table(&setup.base),
        Some(Figure::Fig2b) if !custom => return fig2b_table(&setup.base),
        _ => {}
    }
    let spec = match (axis1, setup.preset.and_then(presets::sweep)) {
        (Some(a1), _) => SweepSpec {
            axis1: parse_axis(a1)?,
            axis2: axis2.map(parse_axis).transpose()?,
            rule: match rule {
                Rule::Fixed => CellRule::Fixed,
                Rule::Solve => CellRule::Solve,
                Rule::Fraction => CellRule::CoolingFraction,
            },
            numeric,
        },
        (None, Some(spec)) => SweepSpec { numeric: spec.numeric || numeric, ..spec },
        (None, None) => return Err(CliError::Usage("sweep needs --axis1 or a swept preset".into())),
    };
    let base = if spec.rule == CellRule::Fixed { setup.point()? } else { setup.base };
    spec.validate(&base)?;

    let on_axis = |k: &str| spec.axis1.name == k || spec.axis2.as_ref().is_some_and(|a| a.name == k);
    let gammas: Vec<f64> = match setup.preset {
        Some(f) if !setup.overridden("gamma_m") && !on_axis("gamma_m") => presets::gamma_m_values(f).to_vec(),
        _ => vec![base.gamma_m],
    };
    let multi = gammas.len() > 1;

    let mut header = Vec::new();
    if multi {
        header.push("gamma_m".to_string());
    }
    header.push(spec.axis1.name.clone());
    if let Some(a) = &spec.axis2 {
        header.push(a.name.clone());
    }
    header.push("n_ss_theory".into());
    if spec.numeric {
        header.push("n_ss_numeric".into());
    }
    let mut t = Table::new(&header);
    if spec.rule == CellRule::CoolingFraction {
        let eta = base.eta.unwrap_or(f64::NAN);
        let loci = sweep::fraction_loci(&base, eta)?;
        t.comment(format!("locus delta_c = {}", crate::table::fmt_f64(loci.delta_c)));
        t.comment(format!(
            "locus delta_gr = {} {}",
            crate::table::fmt_f64(loci.delta_gr[0]),
            crate::table::fmt_f64(loci.delta_gr[1])
        ));
    }
    for g in gammas {
        let rows = sweep::run(&ModelParams { gamma_m: g, ..base }, &spec)?;
        for r in rows {
            let mut row: Vec<Cell> = Vec::new();
            if multi {
                row.push(g.into());
            }
            row.push(r.x.into());
            if let Some(y) = r.y {
                row.push(y.into());
            }
            row.push(r.n_theory.into());
            if let Some(n) = r.n_numeric {
                row.push(n.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn tag(x: f64) -> String {
    let s = format!("{x}");
    s.replace('.', "p")
}

/// Heating bound against Im χ₁(−ω_m) for the preset's three couplings.
fn fig2a_table(base: &ModelParams) -> Result<Table, CliError> {
    let mut header = vec!["im_chi1".to_string()];
    header.extend(presets::FIG2A_G_N.iter().map(|g| format!("a_plus_up_g_n_{}", tag(*g))));
    let mut t = Table::new(&header);
    for x in linspace(-2e4, 2e4, 401) {
        let mut row: Vec<Cell> = vec![x.into()];
        for g in presets::FIG2A_G_N {
            row.push(spectrum::a_plus_upper_of_im(x, &ModelParams { g_n: g, ..*base }).into());
        }
        t.push(row);
    }
    Ok(t)
}

/// Cooling coefficient against δ_c − δ_c^cri for the preset's three η.
fn fig2b_table(base: &ModelParams) -> Result<Table, CliError> {
    let mut header = vec!["delta_c_offset".to_string()];
    header.extend(presets::FIG2B_ETA.iter().map(|e| format!("a_minus_eta_{}", tag(*e))));
    let mut t = Table::new(&header);
    let points: Vec<ModelParams> = presets::FIG2B_ETA
        .iter()
        .map(|&eta| solved(&ModelParams { eta: Some(eta), ..*base }))
        .collect::<Result<_, _>>()?;
    for off in linspace(-400.0, 400.0, 401) {
        let mut row: Vec<Cell> = vec![off.into()];
        for p in &points {
            let q = ModelParams { delta_c: p.delta_c + off, ..*p };
            row.push(or_nan(cooling::coefficients(&q).map(|c| c.1))?.into());
        }
        t.push(row);
    }
    Ok(t)
}

pub fn feasibility_table(d: &DriveParams, th: Thresholds) -> Result<Table, CliError> {
    let r = amplitudes::feasibility_with(d, th)?;
    let mut t = Table::new(&[
        "excitation_ratio",
        "ratio_a_e",
        "ratio_a_e_estimate",
        "ratio_a_r",
        "ratio_a_r_estimate",
        "n_bound_photons",
        "n_bound_cooperativity",
        "weak_excitation",
        "atoms_vs_photons",
        "atoms_vs_cooperativity",
        "feasible",
    ]);
    t.push(vec![
        r.excitation_ratio.into(),
        r.ratio_a_e.into(),
        r.ratio_a_e_estimate.into(),
        r.ratio_a_r.into(),
        r.ratio_a_r_estimate.into(),
        r.n_bound_photons.into(),
        r.n_bound_cooperativity.into(),
        r.weak_excitation.into(),
        r.atoms_vs_photons.into(),
        r.atoms_vs_cooperativity.into(),
        r.feasible().into(),
    ]);
    Ok(t)
}

pub fn oracle_table(p: &ModelParams, cfg: &FockConfig, tol: f64) -> Result<Output, CliError> {
    let c = fock::compare_with_moments(p, cfg, 1e-8)?;
    let f = crate::table::fmt_f64;
    let mut t = Table::new(&["moment", "relative_error"]);
    t.comment(format!("max_relative_error = {}", f(c.max_relative_error)));
    t.comment(format!("truncation_indicator = {}", f(c.indicator)));
    t.comment(format!("trace_error = {}", f(c.trace_error)));
    t.comment(format!("hermiticity_error = {}", f(c.hermiticity_error)));
    t.comment(format!("min_eigenvalue = {}", f(c.min_eigenvalue)));
    for m in Moment::ALL {
        t.push(vec![m.name().into(), c.relative_error[m.index()].into()]);
    }
    let failure = (!(c.max_relative_error < tol))
        .then(|| CliError::Check(format!("max relative error {:e} exceeds {tol:e}", c.max_relative_error)));
    Ok(Output { table: t, failure })
}
