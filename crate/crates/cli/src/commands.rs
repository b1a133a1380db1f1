//! The three batch commands: `run`, `convergence` and `ap-study`.
//!
//! Every command resolves its configuration, dispatches the runs (sweep
//! members concurrently, each job owning its state) and writes CSV
//! artifacts. Exit codes: 0 success, 2 configuration error, 3 run truncated
//! by instability, 4 solver failure.

use crate::config::{describe, load_tableau, Settings};
use crate::csv;
use epqn_core::diagnostics::{l2_error, observed_orders};
use epqn_core::error::{Error, Result};
use epqn_core::integrator::{run, RunConfig, SchemeKind};
use epqn_core::physics::EosParams;
use epqn_core::scenarios::Scenario;
use epqn_core::{RunReport64, Scenario64, Tableau64};
use std::fmt::Write as _;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INSTABILITY: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::UnknownTableau(_)
        | Error::InvalidTableau(_)
        | Error::InvalidMesh(_)
        | Error::Unsupported(_)
        | Error::DirectionOutOfRange { .. }
        | Error::MeshMismatch(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

fn build_scheme(name: &str, tableau: &Tableau64) -> Result<SchemeKind<f64>> {
    let scheme = match name {
        "penalized" => SchemeKind::Penalized(tableau.clone()),
        "first-order" => SchemeKind::FirstOrderPenalized,
        "classical" => SchemeKind::Classical(tableau.clone()),
        "limit" => SchemeKind::QuasiNeutralLimit(tableau.clone()),
        other => {
            return Err(Error::config(format!(
                "scheme must be penalized|first-order|classical|limit, got '{other}'"
            )))
        }
    };
    scheme.validate()?;
    Ok(scheme)
}

fn run_config(
    scenario: &Scenario64,
    scheme: SchemeKind<f64>,
    settings: &Settings,
) -> Result<RunConfig<f64>> {
    let eos = EosParams::new(scenario.gamma)?;
    let mut cfg = RunConfig::new(scheme, eos, scenario.t_final, scenario.cfl);
    cfg.fixed_dt = scenario.fixed_dt;
    cfg.bc = scenario.bc_phi;
    cfg.record_every = settings.record_every.max(1);
    cfg.dt_max = settings
        .dt_max
        .unwrap_or_else(|| 1e-2 * scenario.length.iter().cloned().fold(f64::MIN, f64::max));
    Ok(cfg)
}

/// Execute one scenario with the configured scheme and emit the field
/// snapshot and metrics time series.
pub fn cmd_run(settings: &Settings) -> Result<i32> {
    let scenario = settings.scenario()?;
    let tableau = settings.tableau()?;
    let mesh = scenario.build_mesh(settings.n.as_deref())?;
    let n: Vec<usize> = (0..mesh.dim()).map(|m| mesh.extent(m)).collect();
    let initial = scenario.initial_state(&mesh)?;
    let cfg = run_config(
        &scenario,
        build_scheme(&settings.scheme, &tableau)?,
        settings,
    )?;

    let report = run(&initial, &cfg)?;

    let config_line = describe(settings, &scenario, &n);
    csv::write_file(
        &settings.out.join("metrics.csv"),
        &csv::metrics_csv(&config_line, &report.metrics),
    )?;
    csv::write_file(
        &settings.out.join("fields.csv"),
        &csv::fields_csv(&config_line, &report.final_state)?,
    )?;

    if report.blown_up {
        eprintln!(
            "run truncated at t = {:.6e} after {} steps ({})",
            report.final_state.time,
            report.steps,
            report
                .instability
                .as_deref()
                .unwrap_or("blow-up detector tripped")
        );
        Ok(EXIT_INSTABILITY)
    } else {
        Ok(EXIT_OK)
    }
}

/// Run jobs concurrently, preserving input order in the results.
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|item| s.spawn(|| f(item))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep job panicked"))
            .collect()
    })
}

/// Results of the convergence study: one row list per Debye length.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub lambdas: Vec<f64>,
    pub resolutions: Vec<usize>,
    pub rows: Vec<Vec<epqn_core::diagnostics::ConvergenceRow<f64>>>,
}

/// Asymptotic convergence study: for every resolution run the full system
/// and the quasi-neutral limit scheme as the reference on the same mesh,
/// measure the L2 potential error at the final time, and report observed
/// orders per Debye length.
pub fn convergence_study(settings: &Settings) -> Result<ConvergenceStudy> {
    let lambdas = settings
        .lambda_list
        .clone()
        .unwrap_or_else(|| vec![1e-4, 1e-5, 1e-6]);
    let resolutions = settings
        .n_list
        .clone()
        .unwrap_or_else(Scenario::<f64>::aoc_resolutions);
    if resolutions.len() < 2 {
        return Err(Error::config(
            "convergence study needs at least two resolutions",
        ));
    }
    for w in resolutions.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::config(format!(
                "resolutions must double: {} then {}",
                w[0], w[1]
            )));
        }
    }
    let tableau = settings.tableau()?;

    // reference runs are independent of lambda (the limit scheme forces
    // lambda = 0), one per resolution
    let ref_scenario = settings.scenario()?;
    let ref_jobs: Vec<usize> = resolutions.clone();
    let references: Vec<Result<RunReport64>> = par_map(&ref_jobs, |&n| {
        let mesh = ref_scenario.build_mesh(Some(&[n]))?;
        let initial = ref_scenario.initial_state(&mesh)?;
        let cfg = run_config(&ref_scenario, build_scheme("limit", &tableau)?, settings)?;
        run(&initial, &cfg)
    });

    let mut jobs = Vec::new();
    for &lambda in &lambdas {
        for &n in &resolutions {
            jobs.push((lambda, n));
        }
    }
    let runs: Vec<Result<RunReport64>> = par_map(&jobs, |&(lambda, n)| {
        let mut s = settings.clone();
        s.lambda = Some(lambda);
        let scenario = s.scenario()?;
        let mesh = scenario.build_mesh(Some(&[n]))?;
        let initial = scenario.initial_state(&mesh)?;
        let cfg = run_config(&scenario, build_scheme(&s.scheme, &tableau)?, &s)?;
        run(&initial, &cfg)
    });

    let mut refs = Vec::with_capacity(resolutions.len());
    for r in references {
        refs.push(r?);
    }

    // errors per lambda per resolution
    let mut table: Vec<Vec<f64>> = Vec::new();
    for (li, _) in lambdas.iter().enumerate() {
        let mut errs = Vec::new();
        for (ni, _) in resolutions.iter().enumerate() {
            let report = runs[li * resolutions.len() + ni]
                .as_ref()
                .map_err(|e| e.clone())?;
            if report.blown_up {
                return Err(Error::config(format!(
                    "convergence run blew up (lambda {}, n {})",
                    lambdas[li], resolutions[ni]
                )));
            }
            let e = l2_error(&report.final_state.phi, &refs[ni].final_state.phi)?;
            errs.push(e);
        }
        table.push(errs);
    }

    let mut orders_per_lambda = Vec::new();
    for (li, _) in lambdas.iter().enumerate() {
        let rows: Vec<(usize, f64)> = resolutions
            .iter()
            .cloned()
            .zip(table[li].iter().cloned())
            .collect();
        orders_per_lambda.push(observed_orders(&rows)?);
    }
    Ok(ConvergenceStudy {
        lambdas,
        resolutions,
        rows: orders_per_lambda,
    })
}

/// Run the convergence study and emit the table as CSV.
pub fn cmd_convergence(settings: &Settings) -> Result<i32> {
    let study = convergence_study(settings)?;
    let scenario = settings.scenario()?;
    let config_line = describe(settings, &scenario, &[study.resolutions[0]]);
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_line}");
    let _ = write!(out, "n");
    for &l in &study.lambdas {
        let _ = write!(out, ",l2_err[lambda={l:e}],aoc[lambda={l:e}]");
    }
    let _ = writeln!(out);
    for (ni, &n) in study.resolutions.iter().enumerate() {
        let _ = write!(out, "{n}");
        for (li, _) in study.lambdas.iter().enumerate() {
            let row = &study.rows[li][ni];
            match row.order {
                Some(o) => {
                    let _ = write!(out, ",{},{}", csv::fmt(row.error), csv::fmt(o));
                }
                None => {
                    let _ = write!(out, ",{},", csv::fmt(row.error));
                }
            }
        }
        let _ = writeln!(out);
    }
    csv::write_file(&settings.out.join("convergence.csv"), &out)?;
    Ok(EXIT_OK)
}

/// One probe result of the scaling study.
#[derive(Debug, Clone)]
pub struct ApProbe {
    pub dataset: String,
    pub tableau: String,
    pub lambda: f64,
    /// `max|rho - 1|` after steps 1, 2, 3.
    pub dev_rho: [f64; 3],
    /// `max|div u|` after steps 1, 2, 3.
    pub div_u: [f64; 3],
    /// Max norm of the first-stage potential of the first step.
    pub phi1_linf: f64,
    /// Stability leg: did the full run trip the blow-up detector, and when
    /// did it stop.
    pub blown_up: Option<bool>,
    pub t_end: Option<f64>,
}

/// Run the scaling probes; shared by the CSV command and the acceptance
/// suite.
pub fn ap_study_probes(settings: &Settings) -> Result<Vec<ApProbe>> {
    let lambdas = settings
        .lambda_list
        .clone()
        .unwrap_or_else(|| vec![1e-3, 1e-4]);
    let tableaux = settings
        .tableau_list
        .clone()
        .unwrap_or_else(|| vec!["DP1A242".into(), "DP2A242".into(), "ARS222".into()]);
    let datasets: Vec<&str> = if settings.well_prepared {
        vec!["case1"]
    } else {
        vec!["case2", "general"]
    };

    let mut jobs = Vec::new();
    for dataset in &datasets {
        for tab_name in &tableaux {
            for &lambda in &lambdas {
                jobs.push((dataset.to_string(), tab_name.clone(), lambda));
            }
        }
    }

    let probes: Vec<Result<ApProbe>> = par_map(&jobs, |(dataset, tab_name, lambda)| {
        let tableau = load_tableau(tab_name)?;
        let scenario = Scenario::by_name(dataset, *lambda)?;
        let mesh = scenario.build_mesh(settings.n.as_deref())?;
        let initial = scenario.initial_state(&mesh)?;

        // short probe: three recorded steps with stage traces
        let mut cfg = run_config(&scenario, SchemeKind::Penalized(tableau.clone()), settings)?;
        cfg.max_steps = Some(3);
        cfg.t_final = f64::INFINITY;
        cfg.trace_steps = 1;
        let probe = run(&initial, &cfg)?;
        let nan3 = [f64::NAN; 3];
        let mut dev_rho = nan3;
        let mut div_u = nan3;
        for step in 1..=3 {
            if let Some(m) = probe.metrics.get(step) {
                dev_rho[step - 1] = m.dev_rho_linf;
                div_u[step - 1] = m.div_u_linf;
            }
        }
        let phi1_linf = probe
            .step_traces
            .first()
            .and_then(|t| t.first())
            .copied()
            .unwrap_or(f64::NAN);

        // stability leg on the velocity-perturbed data
        let (blown_up, t_end) = if dataset == "case2" {
            let mut cfg = run_config(&scenario, SchemeKind::Penalized(tableau), settings)?;
            cfg.t_final = 0.025;
            cfg.record_every = 1;
            let stab = run(&initial, &cfg)?;
            (Some(stab.blown_up), Some(stab.final_state.time))
        } else {
            (None, None)
        };

        Ok(ApProbe {
            dataset: dataset.clone(),
            tableau: tab_name.clone(),
            lambda: *lambda,
            dev_rho,
            div_u,
            phi1_linf,
            blown_up,
            t_end,
        })
    });
    probes.into_iter().collect()
}

/// Scaling study: record the projection quantities after the first steps
/// for every (dataset, tableau, lambda), emit the raw table and the
/// decade-ratio table the acceptance checks read.
pub fn cmd_ap_study(settings: &Settings) -> Result<i32> {
    let probes = ap_study_probes(settings)?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "# config: scheme=penalized steps=1..3 n={}",
        settings
            .n
            .as_ref()
            .map(|n| n
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("x"))
            .unwrap_or_else(|| "scenario-default".into())
    );
    let _ = writeln!(
        out,
        "dataset,tableau,lambda,dev_rho_1,dev_rho_2,dev_rho_3,div_u_1,div_u_2,div_u_3,phi1_linf,blown_up,t_end"
    );
    for p in &probes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.dataset,
            p.tableau,
            csv::fmt(p.lambda),
            csv::fmt(p.dev_rho[0]),
            csv::fmt(p.dev_rho[1]),
            csv::fmt(p.dev_rho[2]),
            csv::fmt(p.div_u[0]),
            csv::fmt(p.div_u[1]),
            csv::fmt(p.div_u[2]),
            csv::fmt(p.phi1_linf),
            p.blown_up.map(|b| b.to_string()).unwrap_or_default(),
            p.t_end.map(csv::fmt).unwrap_or_default()
        );
    }
    csv::write_file(&settings.out.join("ap_study.csv"), &out)?;

    let mut ratios = String::new();
    let _ = writeln!(
        ratios,
        "# decade ratios: value(lambda_hi) / value(lambda_lo) for rho and div, inverse for phi1"
    );
    let _ = writeln!(ratios, "dataset,tableau,metric,lambda_hi,lambda_lo,ratio");
    let mut groups: Vec<(String, String)> = Vec::new();
    for p in &probes {
        let key = (p.dataset.clone(), p.tableau.clone());
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (dataset, tab) in &groups {
        let members: Vec<&ApProbe> = probes
            .iter()
            .filter(|p| &p.dataset == dataset && &p.tableau == tab)
            .collect();
        for pair in members.windows(2) {
            let (hi, lo) = (pair[0], pair[1]);
            for (metric, a, b) in [
                ("dev_rho_2", hi.dev_rho[1], lo.dev_rho[1]),
                ("div_u_2", hi.div_u[1], lo.div_u[1]),
                ("div_u_3", hi.div_u[2], lo.div_u[2]),
                ("phi1_inverse", lo.phi1_linf, hi.phi1_linf),
            ] {
                let _ = writeln!(
                    ratios,
                    "{},{},{},{},{},{}",
                    dataset,
                    tab,
                    metric,
                    csv::fmt(hi.lambda),
                    csv::fmt(lo.lambda),
                    csv::fmt(a / b)
                );
            }
        }
    }
    csv::write_file(&settings.out.join("ap_ratios.csv"), &ratios)?;
    Ok(EXIT_OK)
}
