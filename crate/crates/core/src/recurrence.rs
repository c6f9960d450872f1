//! Order-by-order construction of the time-Taylor coefficients.
//!
//! Given velocity orders `0..n-1`, one step forms the Poisson source
//! `phi_{n-1}` from pairwise velocity-gradient products and the forcing
//! divergence, solves `laplacian(p_{n-1}) = -phi_{n-1}` in the mean-zero
//! gauge, and then evaluates the momentum bracket divided by `n` to obtain
//! the next velocity coefficient. Every appended order is checked against
//! the per-order divergence constraint.

use std::time::Instant;

use rayon::prelude::*;

use crate::backend::{advect, divergence, gradient, Axis, ScalarField, VectorField};
use crate::error::RecurrenceError;
use crate::num::Real;

/// Finite polynomial-in-time forcing: `terms[i]` multiplies `t^i`.
/// Orders past the end of the list are zero; an empty list is unforced.
#[derive(Clone, Debug)]
pub struct ForcingSeries<F> {
    terms: Vec<VectorField<F>>,
}

impl<F> ForcingSeries<F> {
    pub fn unforced() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn new(terms: Vec<VectorField<F>>) -> Self {
        Self { terms }
    }

    pub fn term(&self, order: usize) -> Option<&VectorField<F>> {
        self.terms.get(order)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A problem instance: viscosity, divergence-free initial velocity,
/// polynomial forcing, and the truncation order.
#[derive(Clone, Debug)]
pub struct Problem<S: Real, F: ScalarField<S>> {
    pub nu: S,
    pub initial_velocity: VectorField<F>,
    pub forcing: ForcingSeries<F>,
    pub n_max: usize,
    pub tol_div: S,
}

impl<S: Real, F: ScalarField<S>> Problem<S, F> {
    pub fn new(
        nu: S,
        initial_velocity: VectorField<F>,
        forcing: ForcingSeries<F>,
        n_max: usize,
    ) -> Result<Self, RecurrenceError> {
        if !(nu >= S::zero()) {
            return Err(RecurrenceError::InvalidProblem(format!(
                "viscosity must be nonnegative, got {nu}"
            )));
        }
        if n_max == 0 {
            return Err(RecurrenceError::InvalidProblem(
                "truncation order must be at least 1".into(),
            ));
        }
        let norm = initial_velocity.max_norm();
        if !norm.is_finite() {
            return Err(RecurrenceError::InvalidProblem(
                "initial velocity is not finite".into(),
            ));
        }
        let tol_div = F::default_tol_div();
        let div = divergence(&initial_velocity).max_norm();
        if div > tol_div {
            return Err(RecurrenceError::InitialNotDivergenceFree {
                div: div.to_f64().unwrap_or(f64::NAN),
                tol: tol_div.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            nu,
            initial_velocity,
            forcing,
            n_max,
            tol_div,
        })
    }

    pub fn with_tol_div(mut self, tol_div: S) -> Self {
        self.tol_div = tol_div;
        self
    }
}

/// The computed coefficient lists: velocity orders `0..=N`, pressure orders
/// `0..N` (each pressure entry is mean-zero by construction).
#[derive(Clone, Debug)]
pub struct TaylorCoefficients<S: Real, F: ScalarField<S>> {
    velocity: Vec<VectorField<F>>,
    pressure: Vec<F>,
    nu: S,
}

impl<S: Real, F: ScalarField<S>> TaylorCoefficients<S, F> {
    pub fn from_initial(nu: S, initial_velocity: VectorField<F>) -> Self {
        Self {
            velocity: vec![initial_velocity],
            pressure: Vec::new(),
            nu,
        }
    }

    pub fn nu(&self) -> S {
        self.nu
    }

    /// Number of velocity orders present (truncation order plus one).
    pub fn order_count(&self) -> usize {
        self.velocity.len()
    }

    pub fn truncation_order(&self) -> usize {
        self.velocity.len() - 1
    }

    pub fn velocity(&self, n: usize) -> &VectorField<F> {
        &self.velocity[n]
    }

    pub fn pressure(&self, n: usize) -> &F {
        &self.pressure[n]
    }

    pub fn velocities(&self) -> &[VectorField<F>] {
        &self.velocity
    }

    pub fn pressures(&self) -> &[F] {
        &self.pressure
    }

    /// Test hook: overwrite one velocity order (used for fault injection).
    pub fn corrupt_velocity(&mut self, n: usize, field: VectorField<F>) {
        self.velocity[n] = field;
    }
}

/// Max norm of the per-order divergence constraint at order `n`.
pub fn check_divergence<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    n: usize,
) -> S {
    divergence(coeffs.velocity(n)).max_norm()
}

/// Velocity-gradient tensor of one coefficient: `grad[a][b] = d u_b / d x_a`.
fn gradient_tensor<S: Real, F: ScalarField<S>>(v: &VectorField<F>) -> [[F; 3]; 3] {
    Axis::ALL.map(|a| {
        [
            v.x.derivative(a),
            v.y.derivative(a),
            v.z.derivative(a),
        ]
    })
}

/// Poisson source for the pressure at order `n-1`.
///
/// `phi_{n-1}` is defined so that `laplacian(p_{n-1}) = -phi_{n-1}`:
/// the sum over `i` of `d_a u_b^(i) * d_b u_a^(n-1-i)` over all axis pairs,
/// minus the divergence of the forcing term of order `n-1`.
pub fn compute_phi<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    forcing: &ForcingSeries<F>,
    n: usize,
) -> Result<F, RecurrenceError> {
    if n == 0 || coeffs.order_count() < n {
        return Err(RecurrenceError::MissingLowerOrders {
            requested: n,
            available: coeffs.order_count(),
        });
    }
    let grads: Vec<[[F; 3]; 3]> = (0..n)
        .into_par_iter()
        .map(|i| gradient_tensor(coeffs.velocity(i)))
        .collect();

    let pair_terms: Vec<F> = (0..n)
        .into_par_iter()
        .map(|i| {
            let j = n - 1 - i;
            let mut acc: Option<F> = None;
            for a in 0..3 {
                for b in 0..3 {
                    let prod = grads[i][a][b].mul(&grads[j][b][a]);
                    acc = Some(match acc {
                        Some(s) => s.add(&prod),
                        None => prod,
                    });
                }
            }
            acc.expect("at least one product")
        })
        .collect();

    // Fixed summation order keeps runs bit-reproducible.
    let mut phi = pair_terms[0].clone();
    for term in &pair_terms[1..] {
        phi = phi.add(term);
    }
    if let Some(f) = forcing.term(n - 1) {
        phi = phi.sub(&divergence(f));
    }
    Ok(phi)
}

/// Solve `laplacian(p) = -phi`, mean-zero gauge.
pub fn solve_pressure<S: Real, F: ScalarField<S>>(phi: &F) -> Result<F, RecurrenceError> {
    Ok(phi.scale(-S::one()).poisson_inverse()?)
}

/// The bracketed momentum right-hand side at order `n` (before the `1/n`
/// prefactor): viscous term, forcing, advection convolution, pressure
/// gradient.
fn momentum_bracket<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    forcing: &ForcingSeries<F>,
    n: usize,
    pressure: &F,
) -> VectorField<F> {
    let prev = coeffs.velocity(n - 1);
    let nu = coeffs.nu();

    let advection_terms: Vec<VectorField<F>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let carrier = coeffs.velocity(i);
            let carried = coeffs.velocity(n - 1 - i);
            VectorField::new(
                advect(carrier, &carried.x),
                advect(carrier, &carried.y),
                advect(carrier, &carried.z),
            )
        })
        .collect();
    let mut advection = advection_terms[0].clone();
    for term in &advection_terms[1..] {
        advection = advection.add(term);
    }

    let mut bracket = prev
        .map(|c| c.laplacian().scale(nu))
        .sub(&advection)
        .sub(&gradient(pressure));
    if let Some(f) = forcing.term(n - 1) {
        bracket = bracket.add(f);
    }
    bracket
}

/// Spectral support bound shared by the whole series: the widest band among
/// the initial velocity components and every forcing term.
fn band_base<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    forcing: &ForcingSeries<F>,
) -> usize {
    let init = coeffs.velocity(0);
    let mut k = init
        .x
        .band_limit()
        .max(init.y.band_limit())
        .max(init.z.band_limit());
    for i in 0..forcing.len() {
        let f = forcing.term(i).unwrap();
        k = k
            .max(f.x.band_limit())
            .max(f.y.band_limit())
            .max(f.z.band_limit());
    }
    k
}

/// Per-order diagnostic record.
#[derive(Clone, Debug)]
pub struct OrderDiagnostics {
    pub order: usize,
    pub max_norm_u: f64,
    /// NaN for the final order, whose pressure coefficient is not computed.
    pub max_norm_p: f64,
    pub max_divergence: f64,
    /// Divergence of the momentum bracket before the `1/n` prefactor; an
    /// independent check that the pressure solved the right Poisson problem.
    pub bracket_divergence: f64,
    pub dofs: usize,
    pub wall_time_ms: f64,
}

/// Compute `p_{n-1}` and `(u_n, v_n, w_n)` and append them to `coeffs`.
///
/// `n` must equal the current number of computed orders.
pub fn advance_order<S: Real, F: ScalarField<S>>(
    coeffs: &mut TaylorCoefficients<S, F>,
    forcing: &ForcingSeries<F>,
    n: usize,
    tol_div: S,
) -> Result<OrderDiagnostics, RecurrenceError> {
    if n == 0 || n != coeffs.order_count() {
        return Err(RecurrenceError::MissingLowerOrders {
            requested: n,
            available: coeffs.order_count(),
        });
    }
    let start = Instant::now();
    let phi = compute_phi(coeffs, forcing, n)?;
    let pressure = solve_pressure(&phi)?;
    let bracket = momentum_bracket(coeffs, forcing, n, &pressure);
    let bracket_div = divergence(&bracket).max_norm();
    let velocity = bracket.scale(S::one() / S::from_usize(n).unwrap());

    // For band-limited data, order n lives inside |k_i| <= k_base*(n+1);
    // content outside is roundoff and must go, or the Taylor growth of
    // strongly damped modes (~(nu k^2)^n / n!) corrupts later orders.
    let k_base = band_base(coeffs, forcing);
    let band = k_base * (n + 1);
    let pressure = pressure.truncate_band(band);
    let velocity = velocity.map(|c| c.truncate_band(band));

    let div = divergence(&velocity).max_norm();
    if div > tol_div {
        return Err(RecurrenceError::DivergenceExceeded {
            order: n,
            value: div.to_f64().unwrap_or(f64::NAN),
            tol: tol_div.to_f64().unwrap_or(f64::NAN),
        });
    }

    let diag = OrderDiagnostics {
        order: n,
        max_norm_u: velocity.max_norm().to_f64().unwrap_or(f64::NAN),
        max_norm_p: pressure.max_norm().to_f64().unwrap_or(f64::NAN),
        max_divergence: div.to_f64().unwrap_or(f64::NAN),
        bracket_divergence: bracket_div.to_f64().unwrap_or(f64::NAN),
        dofs: velocity.x.dof_count(),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    coeffs.pressure.push(pressure);
    coeffs.velocity.push(velocity);
    Ok(diag)
}

/// Full run output: coefficients and per-order diagnostics
/// (row `n` holds the norms of `u_n` and `p_n`).
#[derive(Clone, Debug)]
pub struct RunOutput<S: Real, F: ScalarField<S>> {
    pub coefficients: TaylorCoefficients<S, F>,
    pub diagnostics: Vec<OrderDiagnostics>,
}

/// Run the recurrence from order 1 through `n_max`.
pub fn run<S: Real, F: ScalarField<S>>(
    problem: &Problem<S, F>,
) -> Result<RunOutput<S, F>, RecurrenceError> {
    let mut coeffs =
        TaylorCoefficients::from_initial(problem.nu, problem.initial_velocity.clone());
    let mut step_diags = Vec::with_capacity(problem.n_max);
    for n in 1..=problem.n_max {
        step_diags.push(advance_order(
            &mut coeffs,
            &problem.forcing,
            n,
            problem.tol_div,
        )?);
    }

    // Reindex so row n reports u_n and p_n together.
    let mut diagnostics = Vec::with_capacity(problem.n_max + 1);
    diagnostics.push(OrderDiagnostics {
        order: 0,
        max_norm_u: coeffs.velocity(0).max_norm().to_f64().unwrap_or(f64::NAN),
        max_norm_p: step_diags
            .first()
            .map(|d| d.max_norm_p)
            .unwrap_or(f64::NAN),
        max_divergence: check_divergence(&coeffs, 0).to_f64().unwrap_or(f64::NAN),
        bracket_divergence: 0.0,
        dofs: coeffs.velocity(0).x.dof_count(),
        wall_time_ms: 0.0,
    });
    for (idx, step) in step_diags.iter().enumerate() {
        let n = idx + 1;
        diagnostics.push(OrderDiagnostics {
            order: n,
            max_norm_p: step_diags.get(n).map(|d| d.max_norm_p).unwrap_or(f64::NAN),
            ..step.clone()
        });
    }
    Ok(RunOutput {
        coefficients: coeffs,
        diagnostics,
    })
}

/// Render diagnostics as the documented CSV table.
pub fn diagnostics_csv(rows: &[OrderDiagnostics]) -> String {
    let mut out =
        String::from("order,max_norm_u,max_norm_p,max_divergence,term_count_or_grid,wall_time_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{},{:.3}\n",
            r.order, r.max_norm_u, r.max_norm_p, r.max_divergence, r.dofs, r.wall_time_ms
        ));
    }
    out
}

/// Parse the table written by [`diagnostics_csv`]; returns
/// `(order, max_norm_u, max_norm_p)` triples.
pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<(usize, f64, f64)>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty csv")?;
    if !header.starts_with("order,max_norm_u,max_norm_p") {
        return Err(format!("unexpected csv header {header:?}"));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 3 {
            return Err(format!("short csv row {line:?}"));
        }
        let order = cols[0].parse::<usize>().map_err(|e| e.to_string())?;
        let nu = cols[1].parse::<f64>().map_err(|e| e.to_string())?;
        let np = cols[2].parse::<f64>().map_err(|e| e.to_string())?;
        rows.push((order, nu, np));
    }
    Ok(rows)
}
