//! Time steppers: the penalized IMEX Runge-Kutta scheme, its first-order
//! specialization, an unpenalized classical baseline, and the quasi-neutral
//! limit scheme, plus the batch `run` driver.
//!
//! One stage of the penalized scheme, with `a` the implicit and `a~` the
//! explicit tableau, is a sequence of explicit evaluations and exactly one
//! linear elliptic solve:
//!
//! 1. hat variables from stored stage values
//!    `rho_hat = rho_n - dt sum_j a[i][j] div q_j`
//!    `q_hat   = q_n - dt sum_j (a~[i][j] (div F - (rho-1) grad phi)_j - a[i][j] grad phi_j)`
//! 2. density projection
//!    `rho_i = 1 + lambda^2 / (lambda^2 + (dt a[i][i])^2) (rho_hat - 1 - dt a[i][i] div q_hat)`
//! 3. elliptic solve `lambda^2 lap phi_i = rho_i - 1`, formed in the divided
//!    shape `lap phi_i = (rho_hat - 1 - dt a[i][i] div q_hat) / (lambda^2 + (dt a[i][i])^2)`
//!    so tiny `lambda` never forces a tiny-by-tiny division; at `lambda = 0`
//!    the same expression *is* the limit-model elliptic relation
//! 4. momentum correction `q_i = q_hat + dt a[i][i] grad phi_i`
//!
//! A vanishing implicit diagonal (the CK first stage) passes the old state
//! through and keeps the old potential. All supported tableaux are globally
//! stiffly accurate, so the step result is the last stage.

use crate::diagnostics::{ap_metrics, ApMetrics};
use crate::error::{Error, Result};
use crate::mesh::{central_diff, central_divergence, gradient, ScalarField, VectorField};
use crate::physics::{velocity, EosParams, PlasmaState};
use crate::poisson::{solve_limit, PhiBc};
use crate::scalar::Scalar;
use crate::spatial::{cfl_dt, explicit_momentum_rhs, SlopeLimiter};
use crate::tableaux::{DoubleButcherTableau, TableauClass};

/// Scheme selector for the run driver.
#[derive(Debug, Clone)]
pub enum SchemeKind<T> {
    /// Penalized IMEX with the given (GSA, type-A or type-CK) tableau.
    Penalized(DoubleButcherTableau<T>),
    /// The direct first-order update; algebraically the penalized scheme
    /// with the `FirstOrder` tableau.
    FirstOrderPenalized,
    /// Unpenalized baseline: the full electric source stays explicit. Only
    /// stable for `dt` of the order of `lambda`.
    Classical(DoubleButcherTableau<T>),
    /// Quasi-neutral limit dynamics (`lambda = 0`, `rho = 1`).
    QuasiNeutralLimit(DoubleButcherTableau<T>),
}

impl<T: Scalar> SchemeKind<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            SchemeKind::Penalized(t)
            | SchemeKind::Classical(t)
            | SchemeKind::QuasiNeutralLimit(t) => require_gsa(t),
            SchemeKind::FirstOrderPenalized => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SchemeKind::Penalized(t) => format!("penalized({})", t.name),
            SchemeKind::FirstOrderPenalized => "first-order".into(),
            SchemeKind::Classical(t) => format!("classical({})", t.name),
            SchemeKind::QuasiNeutralLimit(t) => format!("limit({})", t.name),
        }
    }
}

fn require_gsa<T: Scalar>(t: &DoubleButcherTableau<T>) -> Result<()> {
    t.validate()?;
    if !t.is_gsa() {
        return Err(Error::config(format!(
            "tableau '{}' is not globally stiffly accurate",
            t.name
        )));
    }
    if t.classify() == TableauClass::Other {
        return Err(Error::config(format!(
            "tableau '{}' is neither type A nor type CK",
            t.name
        )));
    }
    Ok(())
}

/// Shared per-step parameters.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<T> {
    pub eos: EosParams<T>,
    pub limiter: SlopeLimiter,
    pub bc: PhiBc,
    pub poisson_tol: T,
}

impl<T: Scalar> StepContext<T> {
    pub fn new(eos: EosParams<T>) -> Self {
        StepContext {
            eos,
            limiter: SlopeLimiter::Minmod,
            bc: PhiBc::Periodic,
            poisson_tol: T::of(crate::poisson::DEFAULT_TOL),
        }
    }
}

/// Per-step diagnostics: the max-norm of the stage potentials.
#[derive(Debug, Clone)]
pub struct StepOutcome<T> {
    pub state: PlasmaState<T>,
    pub phi_stage_linf: Vec<T>,
}

/// Elliptic solve for a right-hand side that is mean-free by construction
/// (flux differences telescope); the accumulated round-off mean is removed
/// before the solvability gate sees it.
fn solve_internal<T: Scalar>(rhs: &ScalarField<T>, bc: PhiBc, tol: T) -> Result<ScalarField<T>> {
    if bc == PhiBc::Periodic {
        let mut r = rhs.clone();
        crate::physics::remove_mean(&mut r);
        solve_limit(&r, bc, tol)
    } else {
        solve_limit(rhs, bc, tol)
    }
}

/// Initial potential: one Poisson solve from the density, never
/// user-supplied. At `lambda = 0` the density carries no information and the
/// limit-model relation `lap phi = div div (u x u)` is used instead.
pub fn init_phi<T: Scalar>(state: &PlasmaState<T>, ctx: &StepContext<T>) -> Result<ScalarField<T>> {
    if state.lambda > T::zero() {
        let inv_l2 = T::one() / (state.lambda * state.lambda);
        let rhs = state.rho.map(|r| (r - T::one()) * inv_l2);
        solve_limit(&rhs, ctx.bc, ctx.poisson_tol)
    } else {
        let rhs = div_div_uu(state)?;
        solve_internal(&rhs, ctx.bc, ctx.poisson_tol)
    }
}

/// `sum_{m,n} D_m D_n (u_m u_n)` with the centered composite stencils.
fn div_div_uu<T: Scalar>(state: &PlasmaState<T>) -> Result<ScalarField<T>> {
    let u = velocity(state)?;
    let d = u.dim();
    let mut out = ScalarField::zeros(state.mesh());
    for m in 0..d {
        for n in 0..d {
            let prod = u.comp(m).zip_with(u.comp(n), |a, b| a * b);
            let dd = central_diff(&central_diff(&prod, n), m);
            out.add_scaled(T::one(), &dd);
        }
    }
    Ok(out)
}

/// Remove the discrete-gradient part of a momentum field:
/// `q - grad(lap^-1 div q)`.
pub fn leray_project<T: Scalar>(q: &VectorField<T>, tol: T) -> Result<VectorField<T>> {
    let div = central_divergence(q);
    let psi = solve_internal(&div, PhiBc::Periodic, tol)?;
    let g = gradient(&psi);
    let mut out = q.clone();
    out.add_scaled(-T::one(), &g);
    Ok(out)
}

fn instability<T: Scalar>(time: T, stage: usize, err: Error) -> Error {
    match err {
        e @ (Error::Config(_) | Error::Unsupported(_) | Error::InvalidTableau(_)) => e,
        other => Error::Instability {
            time: time.to_f64().unwrap_or(f64::NAN),
            stage,
            cause: other.to_string(),
        },
    }
}

/// One step of the penalized IMEX scheme; `lambda` is taken from the state
/// (zero selects the limit dynamics).
pub fn step_penalized<T: Scalar>(
    state: &PlasmaState<T>,
    tab: &DoubleButcherTableau<T>,
    ctx: &StepContext<T>,
    dt: T,
) -> Result<StepOutcome<T>> {
    require_gsa(tab)?;
    advance_stages(state, tab, ctx, dt, state.lambda, None)
}

/// One step of the quasi-neutral limit scheme. The density must already sit
/// on the constraint manifold (`rho = 1`); the per-stage elliptic relation
/// then drives the discrete divergence toward zero by itself, so no hard
/// divergence precondition is imposed on the incoming velocity.
pub fn step_limit<T: Scalar>(
    state: &PlasmaState<T>,
    tab: &DoubleButcherTableau<T>,
    ctx: &StepContext<T>,
    dt: T,
) -> Result<StepOutcome<T>> {
    require_gsa(tab)?;
    let dev = state.rho.map(|r| r - T::one()).linf();
    if dev > T::of(1e-12) {
        return Err(Error::config(format!(
            "limit scheme requires rho = 1, found deviation {dev:e}"
        )));
    }
    advance_stages(state, tab, ctx, dt, T::zero(), None)
}

/// Stage loop shared by the penalized scheme and its `lambda = 0` limit.
/// When `snapshots` is given, every stage state is stored there.
pub fn advance_stages<T: Scalar>(
    state: &PlasmaState<T>,
    tab: &DoubleButcherTableau<T>,
    ctx: &StepContext<T>,
    dt: T,
    lambda: T,
    mut snapshots: Option<&mut Vec<PlasmaState<T>>>,
) -> Result<StepOutcome<T>> {
    let s = tab.s;
    let one = T::one();
    let time = state.time;

    let mut rho_st: Vec<ScalarField<T>> = Vec::with_capacity(s);
    let mut q_st: Vec<VectorField<T>> = Vec::with_capacity(s);
    let mut phi_st: Vec<ScalarField<T>> = Vec::with_capacity(s);
    let mut divq_st: Vec<ScalarField<T>> = Vec::with_capacity(s);
    let mut gex_st: Vec<VectorField<T>> = Vec::with_capacity(s);
    let mut gphi_st: Vec<VectorField<T>> = Vec::with_capacity(s);
    let mut phi_linf = Vec::with_capacity(s);

    for i in 0..s {
        let fail = |e: Error| instability(time, i + 1, e);

        // hat variables
        let mut dev_hat = state.rho.map(|r| r - one);
        for (j, divq) in divq_st.iter().enumerate() {
            dev_hat.add_scaled(-dt * tab.a_im[i][j], divq);
        }
        let mut q_hat = state.q.clone();
        for j in 0..i {
            q_hat.add_scaled(-dt * tab.a_ex[i][j], &gex_st[j]);
            q_hat.add_scaled(dt * tab.a_im[i][j], &gphi_st[j]);
        }

        let aii = tab.a_im[i][i];
        let (rho_i, phi_i, q_i) = if aii == T::zero() {
            // pass-through stage: prefactor lambda^2/lambda^2 = 1, no
            // implicit terms enter
            let rho_i = dev_hat.map(|d| one + d);
            let phi_i = if lambda > T::zero() {
                if i == 0 {
                    state.phi.clone()
                } else {
                    let inv_l2 = one / (lambda * lambda);
                    solve_internal(&dev_hat.map(|d| d * inv_l2), ctx.bc, ctx.poisson_tol)
                        .map_err(fail)?
                }
            } else if i == 0 {
                state.phi.clone()
            } else {
                return Err(Error::Unsupported(
                    "zero implicit diagonal past the first stage is not defined at lambda = 0"
                        .into(),
                ));
            };
            (rho_i, phi_i, q_hat)
        } else {
            let divq_hat = central_divergence(&q_hat);
            let mut target = dev_hat;
            target.add_scaled(-dt * aii, &divq_hat);
            let denom = lambda * lambda + (dt * aii) * (dt * aii);
            let proj = lambda * lambda / denom;
            let rho_i = target.map(|d| one + proj * d);
            let phi_rhs = target.map(|d| d / denom);
            let phi_i = solve_internal(&phi_rhs, ctx.bc, ctx.poisson_tol).map_err(fail)?;
            let mut q_i = q_hat;
            q_i.add_scaled(dt * aii, &gradient(&phi_i));
            (rho_i, phi_i, q_i)
        };

        rho_i.check_finite("rho", "stage").map_err(fail)?;
        phi_i.check_finite("phi", "stage").map_err(fail)?;
        for c in q_i.components() {
            c.check_finite("q", "stage").map_err(fail)?;
        }
        phi_linf.push(phi_i.linf());

        let stage_state = PlasmaState {
            rho: rho_i,
            q: q_i,
            phi: phi_i,
            lambda,
            time,
        };
        if let Some(snaps) = snapshots.as_deref_mut() {
            snaps.push(stage_state.clone());
        }

        // stage caches feeding later hats; the last stage feeds nothing
        if i + 1 < s {
            divq_st.push(central_divergence(&stage_state.q));
            gphi_st.push(gradient(&stage_state.phi));
            gex_st.push(explicit_momentum_rhs(&stage_state, &ctx.eos, ctx.limiter).map_err(fail)?);
        }
        rho_st.push(stage_state.rho);
        q_st.push(stage_state.q);
        phi_st.push(stage_state.phi);
    }

    // globally stiffly accurate: the update is the last stage
    let new_state = PlasmaState {
        rho: rho_st.pop().expect("s >= 1"),
        q: q_st.pop().expect("s >= 1"),
        phi: phi_st.pop().expect("s >= 1"),
        lambda: state.lambda,
        time: state.time + dt,
    };
    new_state
        .check_admissible("step end")
        .map_err(|e| instability(time, s, e))?;
    Ok(StepOutcome {
        state: new_state,
        phi_stage_linf: phi_linf,
    })
}

/// Direct transcription of the first-order update: one explicit forcing
/// evaluation, the closed-form density update, one Poisson solve, and the
/// explicit momentum update. Agrees with `step_penalized` under the
/// `FirstOrder` tableau to round-off.
pub fn step_first_order<T: Scalar>(
    state: &PlasmaState<T>,
    ctx: &StepContext<T>,
    dt: T,
) -> Result<StepOutcome<T>> {
    let one = T::one();
    let time = state.time;
    let fail = |e: Error| instability(time, 1, e);
    let lambda = state.lambda;
    if !(lambda > T::zero()) {
        return Err(Error::config("first-order update requires lambda > 0"));
    }

    // w = div F - (rho - 1) grad phi at time n
    let w = explicit_momentum_rhs(state, &ctx.eos, ctx.limiter).map_err(fail)?;
    let div_q = central_divergence(&state.q);
    let div_w = central_divergence(&w);

    // rho_new = 1 + lambda^2/(lambda^2 + dt^2) (rho - 1 - dt div q + dt^2 div w)
    let mut bracket = state.rho.map(|r| r - one);
    bracket.add_scaled(-dt, &div_q);
    bracket.add_scaled(dt * dt, &div_w);
    let denom = lambda * lambda + dt * dt;
    let proj = lambda * lambda / denom;
    let rho_new = bracket.map(|d| one + proj * d);

    // lambda^2 lap phi_new = rho_new - 1, in divided form
    let phi_rhs = bracket.map(|d| d / denom);
    let phi_new = solve_internal(&phi_rhs, ctx.bc, ctx.poisson_tol).map_err(fail)?;

    // q_new = q - dt w + dt grad phi_new
    let mut q_new = state.q.clone();
    q_new.add_scaled(-dt, &w);
    q_new.add_scaled(dt, &gradient(&phi_new));

    let phi_linf = phi_new.linf();
    let new_state = PlasmaState {
        rho: rho_new,
        q: q_new,
        phi: phi_new,
        lambda,
        time: state.time + dt,
    };
    new_state.check_admissible("step end").map_err(fail)?;
    new_state.check_finite("step end").map_err(fail)?;
    Ok(StepOutcome {
        state: new_state,
        phi_stage_linf: vec![phi_linf],
    })
}

/// One step of the unpenalized classical baseline: the same stage loop but
/// the full source `rho grad phi` sits in the explicit part and the Poisson
/// equation closes each stage on the explicitly updated density, with no
/// projection prefactor. Unstable unless `dt` resolves `lambda`.
pub fn step_classical<T: Scalar>(
    state: &PlasmaState<T>,
    tab: &DoubleButcherTableau<T>,
    ctx: &StepContext<T>,
    dt: T,
) -> Result<StepOutcome<T>> {
    require_gsa(tab)?;
    let lambda = state.lambda;
    if !(lambda > T::zero()) {
        return Err(Error::config("classical scheme requires lambda > 0"));
    }
    let s = tab.s;
    let one = T::one();
    let time = state.time;
    let inv_l2 = one / (lambda * lambda);

    let mut rho_st: Vec<ScalarField<T>> = Vec::with_capacity(s);
    let mut q_st: Vec<VectorField<T>> = Vec::with_capacity(s);
    let mut phi_st: Vec<ScalarField<T>> = Vec::with_capacity(s);
    let mut divq_st: Vec<ScalarField<T>> = Vec::with_capacity(s);
    let mut gex_st: Vec<VectorField<T>> = Vec::with_capacity(s);
    let mut phi_linf = Vec::with_capacity(s);

    for i in 0..s {
        let fail = |e: Error| instability(time, i + 1, e);

        let mut q_i = state.q.clone();
        for j in 0..i {
            q_i.add_scaled(-dt * tab.a_ex[i][j], &gex_st[j]);
        }

        let mut dev_i = state.rho.map(|r| r - one);
        for (j, divq) in divq_st.iter().enumerate() {
            dev_i.add_scaled(-dt * tab.a_im[i][j], divq);
        }
        let divq_i = central_divergence(&q_i);
        dev_i.add_scaled(-dt * tab.a_im[i][i], &divq_i);
        let rho_i = dev_i.map(|d| one + d);

        rho_i.check_finite("rho", "stage").map_err(fail)?;
        for c in q_i.components() {
            c.check_finite("q", "stage").map_err(fail)?;
        }
        let phi_i =
            solve_internal(&dev_i.map(|d| d * inv_l2), ctx.bc, ctx.poisson_tol).map_err(fail)?;
        phi_linf.push(phi_i.linf());

        let stage_state = PlasmaState {
            rho: rho_i,
            q: q_i,
            phi: phi_i,
            lambda,
            time,
        };
        if i + 1 < s {
            // full explicit source: div F - rho grad phi
            let mut gex =
                explicit_momentum_rhs(&stage_state, &ctx.eos, ctx.limiter).map_err(fail)?;
            gex.add_scaled(-one, &gradient(&stage_state.phi));
            gex_st.push(gex);
            divq_st.push(divq_i);
        }
        rho_st.push(stage_state.rho);
        q_st.push(stage_state.q);
        phi_st.push(stage_state.phi);
    }

    let new_state = PlasmaState {
        rho: rho_st.pop().expect("s >= 1"),
        q: q_st.pop().expect("s >= 1"),
        phi: phi_st.pop().expect("s >= 1"),
        lambda,
        time: state.time + dt,
    };
    new_state
        .check_admissible("step end")
        .map_err(|e| instability(time, s, e))?;
    Ok(StepOutcome {
        state: new_state,
        phi_stage_linf: phi_linf,
    })
}

/// Batch driver configuration.
#[derive(Debug, Clone)]
pub struct RunConfig<T> {
    pub scheme: SchemeKind<T>,
    pub eos: EosParams<T>,
    pub t_final: T,
    pub cfl: T,
    /// Overrides the CFL step when set.
    pub fixed_dt: Option<T>,
    /// Cap used by the CFL rule; also the step of a fluid at rest.
    pub dt_max: T,
    pub limiter: SlopeLimiter,
    pub bc: PhiBc,
    pub poisson_tol: T,
    pub blowup_phi: T,
    /// Record metrics every this many steps (the initial and final states
    /// are always recorded).
    pub record_every: usize,
    pub max_steps: Option<usize>,
    /// Keep per-stage potential norms for the first few steps.
    pub trace_steps: usize,
}

impl<T: Scalar> RunConfig<T> {
    pub fn new(scheme: SchemeKind<T>, eos: EosParams<T>, t_final: T, cfl: T) -> Self {
        RunConfig {
            scheme,
            eos,
            t_final,
            cfl,
            fixed_dt: None,
            dt_max: T::of(1e-2),
            limiter: SlopeLimiter::Minmod,
            bc: PhiBc::Periodic,
            poisson_tol: T::of(crate::poisson::DEFAULT_TOL),
            blowup_phi: T::of(crate::diagnostics::DEFAULT_BLOWUP_PHI),
            record_every: 1,
            max_steps: None,
            trace_steps: 0,
        }
    }

    fn context(&self) -> StepContext<T> {
        StepContext {
            eos: self.eos,
            limiter: self.limiter,
            bc: self.bc,
            poisson_tol: self.poisson_tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport<T> {
    pub metrics: Vec<ApMetrics<T>>,
    pub final_state: PlasmaState<T>,
    pub steps: usize,
    pub blown_up: bool,
    /// Populated when a step raised an instability error.
    pub instability: Option<String>,
    /// Per-stage potential norms of the first `trace_steps` steps.
    pub step_traces: Vec<Vec<T>>,
}

/// Advance an initial state to `t_final`, recording diagnostics. The
/// potential is always re-initialized from the density (or, at
/// `lambda = 0`, from the limit-model relation); for the limit scheme the
/// state is first moved onto the constraint manifold (`rho = 1`, velocity
/// projected).
pub fn run<T: Scalar>(initial: &PlasmaState<T>, cfg: &RunConfig<T>) -> Result<RunReport<T>> {
    cfg.scheme.validate()?;
    let ctx = cfg.context();

    let mut state = initial.clone();
    if let SchemeKind::QuasiNeutralLimit(_) = cfg.scheme {
        state.lambda = T::zero();
        state.rho = ScalarField::constant(state.rho.mesh(), T::one());
        state.q = leray_project(&state.q, ctx.poisson_tol)?;
    }
    state.check_admissible("initial state")?;
    state.phi = init_phi(&state, &ctx)?;

    let mut report = RunReport {
        metrics: Vec::new(),
        final_state: state.clone(),
        steps: 0,
        blown_up: false,
        instability: None,
        step_traces: Vec::new(),
    };

    let m0 = ap_metrics(&state, T::zero(), cfg.blowup_phi);
    let initially_blown = m0.blown_up;
    report.metrics.push(m0);
    if initially_blown {
        report.blown_up = true;
        return Ok(report);
    }

    let t_end = cfg.t_final;
    while state.time < t_end {
        if let Some(max) = cfg.max_steps {
            if report.steps >= max {
                break;
            }
        }
        let dt_raw = match cfg.fixed_dt {
            Some(dt) => dt,
            None => cfl_dt(&state, cfg.cfl, cfg.dt_max)?,
        };
        let remaining = t_end - state.time;
        let (dt, is_last) = if dt_raw >= remaining {
            (remaining, true)
        } else {
            (dt_raw, false)
        };
        if !(dt > T::zero()) {
            break;
        }

        let outcome = match &cfg.scheme {
            SchemeKind::Penalized(tab) => step_penalized(&state, tab, &ctx, dt),
            SchemeKind::FirstOrderPenalized => step_first_order(&state, &ctx, dt),
            SchemeKind::Classical(tab) => step_classical(&state, tab, &ctx, dt),
            SchemeKind::QuasiNeutralLimit(tab) => step_limit(&state, tab, &ctx, dt),
        };
        match outcome {
            Ok(out) => {
                state = out.state;
                if is_last {
                    state.time = t_end;
                }
                report.steps += 1;
                if report.steps <= cfg.trace_steps {
                    report.step_traces.push(out.phi_stage_linf);
                }
                let m = ap_metrics(&state, dt, cfg.blowup_phi);
                let blown = m.blown_up;
                if report.steps % cfg.record_every.max(1) == 0 || is_last || blown {
                    report.metrics.push(m);
                }
                if blown {
                    report.blown_up = true;
                    break;
                }
            }
            Err(e @ Error::Instability { .. }) => {
                report.blown_up = true;
                report.instability = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }

    report.final_state = state;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Mesh, ScalarField, VectorField};
    use crate::tableaux::DoubleButcherTableau;

    fn ctx() -> StepContext<f64> {
        StepContext::new(EosParams::new(2.0).unwrap())
    }

    fn qn_uniform(n: usize, u: f64, lambda: f64) -> PlasmaState<f64> {
        let mesh = Mesh::periodic_1d(n, 1.0).unwrap();
        PlasmaState {
            rho: ScalarField::constant(&mesh, 1.0),
            q: VectorField::from_components(vec![ScalarField::constant(&mesh, u)]),
            phi: ScalarField::zeros(&mesh),
            lambda,
            time: 0.0,
        }
    }

    fn max_state_diff(a: &PlasmaState<f64>, b: &PlasmaState<f64>) -> f64 {
        let mut worst = a.rho.zip_with(&b.rho, |x, y| x - y).linf();
        worst = worst.max(a.phi.zip_with(&b.phi, |x, y| x - y).linf());
        for m in 0..a.q.dim() {
            worst = worst.max(a.q.comp(m).zip_with(b.q.comp(m), |x, y| x - y).linf());
        }
        worst
    }

    #[test]
    fn uniform_qn_state_is_fixed_point_of_all_schemes() {
        let state = qn_uniform(16, 0.8, 1e-4);
        let dt = 1e-3;
        for name in ["DP1A242", "DP2A242", "ARS222", "FirstOrder"] {
            let tab = DoubleButcherTableau::builtin(name).unwrap();
            let out = step_penalized(&state, &tab, &ctx(), dt).unwrap();
            assert!(
                max_state_diff(&out.state, &state) <= 1e-13,
                "penalized {name} moved a uniform state"
            );
            let out = step_classical(&state, &tab, &ctx(), dt).unwrap();
            assert!(
                max_state_diff(&out.state, &state) <= 1e-13,
                "classical {name} moved a uniform state"
            );
        }
        let out = step_first_order(&state, &ctx(), dt).unwrap();
        assert!(max_state_diff(&out.state, &state) <= 1e-13);

        let mut limit_state = state.clone();
        limit_state.lambda = 0.0;
        let tab = DoubleButcherTableau::builtin("DP2A242").unwrap();
        let out = step_limit(&limit_state, &tab, &ctx(), dt).unwrap();
        assert!(max_state_diff(&out.state, &limit_state) <= 1e-13);
    }

    #[test]
    fn first_order_matches_tableau_path() {
        // random-ish admissible smooth state
        let n = 16;
        let mesh = Mesh::periodic_1d(n, 1.0).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let rho = ScalarField::from_coords(&mesh, |x| 1.0 + 0.2 * (tau * x[0]).sin());
        let q = ScalarField::from_coords(&mesh, |x| 0.7 + 0.1 * (tau * x[0]).cos());
        let lambda = 1e-2;
        let mut state = PlasmaState {
            rho,
            q: VectorField::from_components(vec![q]),
            phi: ScalarField::zeros(&mesh),
            lambda,
            time: 0.0,
        };
        state.phi = init_phi(&state, &ctx()).unwrap();

        let dt = 1e-3;
        let tab = DoubleButcherTableau::builtin("FirstOrder").unwrap();
        let a = step_penalized(&state, &tab, &ctx(), dt).unwrap();
        let b = step_first_order(&state, &ctx(), dt).unwrap();
        let scale = 1.0 + state.rho.linf() + state.q.linf();
        assert!(
            max_state_diff(&a.state, &b.state) <= 1e-12 * scale,
            "paths differ by {}",
            max_state_diff(&a.state, &b.state)
        );
    }

    #[test]
    fn first_order_tends_to_plain_explicit_update_for_huge_lambda() {
        let n = 16;
        let mesh = Mesh::periodic_1d(n, 1.0).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let state = PlasmaState {
            rho: ScalarField::from_coords(&mesh, |x| 1.0 + 0.1 * (tau * x[0]).sin()),
            q: VectorField::from_components(vec![ScalarField::constant(&mesh, 0.4)]),
            phi: ScalarField::zeros(&mesh),
            lambda: 1e6,
            time: 0.0,
        };
        let dt = 1e-3;
        let out = step_first_order(&state, &ctx(), dt).unwrap();

        // plain explicit density update rho - dt div q + dt^2 div w
        let w = explicit_momentum_rhs(&state, &ctx().eos, SlopeLimiter::Minmod).unwrap();
        let mut expect = state.rho.clone();
        expect.add_scaled(-dt, &central_divergence(&state.q));
        expect.add_scaled(dt * dt, &central_divergence(&w));
        let diff = out.state.rho.zip_with(&expect, |a, b| a - b).linf();
        assert!(diff <= 2.0 * dt * dt / (1e6 * 1e6) + 1e-15, "diff {diff:e}");
    }

    #[test]
    fn limit_scheme_rejects_rho_away_from_one() {
        let mut state = qn_uniform(16, 1.0, 0.0);
        state.rho[2] = 1.1;
        let tab = DoubleButcherTableau::builtin("DP2A242").unwrap();
        assert!(step_limit(&state, &tab, &ctx(), 1e-3).is_err());
    }

    #[test]
    fn limit_first_stage_of_type_a_has_zero_phi() {
        // phi^(1) solves the limit relation with rho_hat = rho_n = 1 and
        // q_hat = q_n; divergence-free input makes it vanish
        let n = 32;
        let mesh = Mesh::periodic_1d(n, 1.0).unwrap();
        let state = PlasmaState {
            rho: ScalarField::constant(&mesh, 1.0),
            q: VectorField::from_components(vec![ScalarField::constant(&mesh, 1.3)]),
            phi: ScalarField::zeros(&mesh),
            lambda: 0.0,
            time: 0.0,
        };
        let tab = DoubleButcherTableau::builtin("DP2A242").unwrap();
        let mut snaps = Vec::new();
        let _ = advance_stages(&state, &tab, &ctx(), 1e-3, 0.0, Some(&mut snaps)).unwrap();
        assert!(snaps[0].phi.linf() <= 1e-13);
    }

    #[test]
    fn run_with_zero_t_final_reports_initial_only() {
        let state = qn_uniform(16, 1.0, 1e-4);
        let tab = DoubleButcherTableau::builtin("DP2A242").unwrap();
        let cfg = RunConfig::new(
            SchemeKind::Penalized(tab),
            EosParams::new(2.0).unwrap(),
            0.0,
            0.45,
        );
        let report = run(&state, &cfg).unwrap();
        assert_eq!(report.steps, 0);
        assert_eq!(report.metrics.len(), 1);
        assert!(!report.blown_up);
    }

    #[test]
    fn run_truncates_final_step_to_t_final() {
        let state = qn_uniform(16, 1.0, 1e-4);
        let tab = DoubleButcherTableau::builtin("DP2A242").unwrap();
        let mut cfg = RunConfig::new(
            SchemeKind::Penalized(tab),
            EosParams::new(2.0).unwrap(),
            0.01,
            0.45,
        );
        cfg.fixed_dt = Some(0.004);
        let report = run(&state, &cfg).unwrap();
        assert_eq!(report.steps, 3);
        assert_eq!(report.final_state.time, 0.01);
    }

    #[test]
    fn gsa_requirement_enforced() {
        let mut tab = DoubleButcherTableau::<f64>::builtin("DP2A242").unwrap();
        tab.w_ex[1] += 0.25;
        tab.w_ex[2] -= 0.25;
        let state = qn_uniform(16, 1.0, 1e-4);
        assert!(step_penalized(&state, &tab, &ctx(), 1e-3).is_err());
    }

    #[test]
    fn leray_projection_reduces_divergence() {
        let n = 64;
        let mesh = Mesh::periodic_1d(n, 1.0).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let q = VectorField::from_components(vec![ScalarField::from_coords(&mesh, |x| {
            1.0 + 0.01 * (tau * x[0]).cos()
        })]);
        let before = central_divergence(&q).linf();
        let proj = leray_project(&q, 1e-12).unwrap();
        let after = central_divergence(&proj).linf();
        assert!(after < 0.1 * before, "divergence {before:e} -> {after:e}");
    }
}
