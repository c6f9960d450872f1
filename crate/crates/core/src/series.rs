//! Turning coefficient lists into answers: partial-sum evaluation,
//! coefficient-norm trajectories, empirical radius-of-convergence
//! estimation, and residual checks of the truncated series against the
//! momentum and continuity equations.

use serde::Serialize;

use crate::backend::{advect, divergence, gradient, ScalarField, VectorField};
use crate::error::SeriesError;
use crate::num::Real;
use crate::recurrence::{ForcingSeries, TaylorCoefficients};

/// Truncated series evaluated at one time.
#[derive(Clone, Debug)]
pub struct PartialSum<S: Real, F: ScalarField<S>> {
    pub t: S,
    /// Number of velocity orders included (`0..=order`).
    pub order: usize,
    pub velocity: VectorField<F>,
    /// Pressure sum over the available orders `0..=min(order, N-1)`.
    pub pressure: F,
}

fn horner<S: Real, F: ScalarField<S>>(fields: &[F], t: S) -> F {
    let mut acc = fields[fields.len() - 1].clone();
    for f in fields.iter().rev().skip(1) {
        acc = acc.scale(t).add(f);
    }
    acc
}

/// Evaluate the `order`-term partial sums of velocity and pressure at `t`.
pub fn evaluate_partial_sum<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    t: S,
    order: usize,
) -> Result<PartialSum<S, F>, SeriesError> {
    if order > coeffs.truncation_order() {
        return Err(SeriesError::OrderOutOfRange {
            requested: order,
            available: coeffs.truncation_order(),
        });
    }
    let velocity = VectorField::new(
        horner(
            &coeffs.velocities()[..=order]
                .iter()
                .map(|v| v.x.clone())
                .collect::<Vec<_>>(),
            t,
        ),
        horner(
            &coeffs.velocities()[..=order]
                .iter()
                .map(|v| v.y.clone())
                .collect::<Vec<_>>(),
            t,
        ),
        horner(
            &coeffs.velocities()[..=order]
                .iter()
                .map(|v| v.z.clone())
                .collect::<Vec<_>>(),
            t,
        ),
    );
    let p_hi = order.min(coeffs.pressures().len().saturating_sub(1));
    let pressure = if coeffs.pressures().is_empty() {
        coeffs.velocity(0).x.zero_like()
    } else {
        horner(&coeffs.pressures()[..=p_hi], t)
    };
    Ok(PartialSum {
        t,
        order,
        velocity,
        pressure,
    })
}

/// Kinetic energy `integral of |v|^2` over the domain.
pub fn energy<S: Real, F: ScalarField<S>>(v: &VectorField<F>) -> S {
    let mean_sq = v.x.mean_square() + v.y.mean_square() + v.z.mean_square();
    mean_sq * v.x.domain_volume()
}

/// Which norm the coefficient trajectory uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Max,
    Energy,
}

/// Empirical lower hint for the radius of convergence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum RadiusHint {
    Finite(f64),
    /// Ratio estimates trend to zero; no finite radius is indicated.
    Unbounded,
}

/// Coefficient-norm trajectory with ratio and root estimates.
///
/// The hint never claims convergence: the series' convergence is an open
/// question, and every report carries the `empirical hint` note.
#[derive(Clone, Debug, Serialize)]
pub struct RadiusEstimate {
    /// `(order, velocity max norm, pressure max norm)`; the pressure norm is
    /// NaN where no pressure coefficient exists.
    pub per_order_norms: Vec<(usize, f64, f64)>,
    /// `r_n = |u_{n+1}| / |u_n|` over consecutive usable orders.
    pub ratio_estimates: Vec<(usize, f64)>,
    /// `|u_n|^(1/n)` for usable orders `n >= 1`.
    pub root_estimates: Vec<(usize, f64)>,
    pub radius_lower_hint: RadiusHint,
    /// Method backing the hint (ratio test; root estimates are reported
    /// alongside for comparison).
    pub method: &'static str,
    pub norm: NormKind,
    /// True when every coefficient beyond order zero is numerically zero.
    pub degenerate: bool,
    pub note: &'static str,
}

pub const RADIUS_NOTE: &str = "empirical hint only; convergence of the series is not established";

/// Ratio/root analysis of a norm trajectory `(order, |u_n|, |p_n|)`.
pub fn estimate_radius_from_norms(
    norms: &[(usize, f64, f64)],
    norm_kind: NormKind,
) -> Result<RadiusEstimate, SeriesError> {
    let norm0 = norms.first().map(|r| r.1).unwrap_or(0.0);
    let cutoff = 1e-13 * norm0.max(f64::MIN_POSITIVE);

    let usable: Vec<(usize, f64)> = norms
        .iter()
        .filter(|(_, u, _)| *u > cutoff)
        .map(|(n, u, _)| (*n, *u))
        .collect();

    let degenerate = norms.iter().all(|(n, u, _)| *n == 0 || *u <= cutoff);
    if degenerate {
        return Ok(RadiusEstimate {
            per_order_norms: norms.to_vec(),
            ratio_estimates: Vec::new(),
            root_estimates: Vec::new(),
            radius_lower_hint: RadiusHint::Unbounded,
            method: "ratio",
            norm: norm_kind,
            degenerate: true,
            note: RADIUS_NOTE,
        });
    }
    if usable.len() < 4 {
        return Err(SeriesError::InsufficientData {
            needed: 4,
            found: usable.len(),
        });
    }

    let mut ratios = Vec::new();
    for pair in usable.windows(2) {
        if pair[1].0 == pair[0].0 + 1 {
            ratios.push((pair[0].0, pair[1].1 / pair[0].1));
        }
    }
    let roots: Vec<(usize, f64)> = usable
        .iter()
        .filter(|(n, _)| *n >= 1)
        .map(|(n, u)| (*n, u.powf(1.0 / *n as f64)))
        .collect();

    // Domb-Sykes extrapolation of the tail ratios against 1/(n+1): an
    // intercept at zero indicates ratios trending to zero (entire series).
    let tail_len = (ratios.len() / 2).max(3).min(ratios.len());
    let tail = &ratios[ratios.len() - tail_len..];
    let tail_max = tail.iter().map(|(_, r)| *r).fold(0.0f64, f64::max);
    let hint = if tail_max == 0.0 {
        RadiusHint::Unbounded
    } else {
        let xs: Vec<f64> = tail.iter().map(|(n, _)| 1.0 / (*n as f64 + 1.0)).collect();
        let ys: Vec<f64> = tail.iter().map(|(_, r)| *r).collect();
        let m = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let denom = m * sxx - sx * sx;
        let intercept = if denom.abs() < 1e-300 {
            sy / m
        } else {
            (sy * sxx - sx * sxy) / denom
        };
        let mean_ratio = sy / m;
        if intercept < 0.1 * mean_ratio {
            RadiusHint::Unbounded
        } else {
            RadiusHint::Finite(1.0 / tail_max)
        }
    };

    Ok(RadiusEstimate {
        per_order_norms: norms.to_vec(),
        ratio_estimates: ratios,
        root_estimates: roots,
        radius_lower_hint: hint,
        method: "ratio",
        norm: norm_kind,
        degenerate: false,
        note: RADIUS_NOTE,
    })
}

/// Norm trajectory of computed coefficients plus ratio/root estimates.
pub fn estimate_radius<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    norm_kind: NormKind,
) -> Result<RadiusEstimate, SeriesError> {
    let norms: Vec<(usize, f64, f64)> = (0..coeffs.order_count())
        .map(|n| {
            let v = coeffs.velocity(n);
            let u_norm = match norm_kind {
                NormKind::Max => v.max_norm(),
                NormKind::Energy => energy(v).sqrt(),
            };
            let p_norm = if n < coeffs.pressures().len() {
                let p = coeffs.pressure(n);
                match norm_kind {
                    NormKind::Max => p.max_norm(),
                    NormKind::Energy => (p.mean_square() * p.domain_volume()).sqrt(),
                }
            } else {
                S::nan()
            };
            (
                n,
                u_norm.to_f64().unwrap_or(f64::NAN),
                p_norm.to_f64().unwrap_or(f64::NAN),
            )
        })
        .collect();
    estimate_radius_from_norms(&norms, norm_kind)
}

/// CSV table of the trajectory: `order,norm,ratio,root`.
pub fn radius_csv(estimate: &RadiusEstimate) -> String {
    let mut out = String::from("order,norm,ratio,root\n");
    for (n, u, _) in &estimate.per_order_norms {
        let ratio = estimate
            .ratio_estimates
            .iter()
            .find(|(rn, _)| rn == n)
            .map(|(_, r)| format!("{r:e}"))
            .unwrap_or_default();
        let root = estimate
            .root_estimates
            .iter()
            .find(|(rn, _)| rn == n)
            .map(|(_, r)| format!("{r:e}"))
            .unwrap_or_default();
        out.push_str(&format!("{n},{u:e},{ratio},{root}\n"));
    }
    out
}

/// Residual of the truncated series in the momentum and continuity
/// equations at time `t`.
#[derive(Clone, Copy, Debug)]
pub struct ResidualReport<S> {
    pub momentum_max: S,
    pub continuity_max: S,
}

/// Evaluate the equations on the `order`-term partial sum, with exact
/// term-wise time differentiation of the velocity series.
pub fn residual_check<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    forcing: &ForcingSeries<F>,
    t: S,
    order: usize,
) -> Result<ResidualReport<S>, SeriesError> {
    if order == 0 || order > coeffs.truncation_order() {
        return Err(SeriesError::OrderOutOfRange {
            requested: order,
            available: coeffs.truncation_order(),
        });
    }
    let sum = evaluate_partial_sum(coeffs, t, order)?;
    let velocity = &sum.velocity;

    // d/dt of the truncated series: sum of i * u_i * t^(i-1).
    let dt_terms: Vec<VectorField<F>> = (1..=order)
        .map(|i| coeffs.velocity(i).scale(S::from_usize(i).unwrap()))
        .collect();
    let du_dt = VectorField::new(
        horner(
            &dt_terms.iter().map(|v| v.x.clone()).collect::<Vec<_>>(),
            t,
        ),
        horner(
            &dt_terms.iter().map(|v| v.y.clone()).collect::<Vec<_>>(),
            t,
        ),
        horner(
            &dt_terms.iter().map(|v| v.z.clone()).collect::<Vec<_>>(),
            t,
        ),
    );

    // Pressure partial sum over orders 0..order-1, matching the recurrence
    // pairing of p_{n-1} with u_n.
    let p_hi = (order - 1).min(coeffs.pressures().len().saturating_sub(1));
    let pressure = horner(&coeffs.pressures()[..=p_hi], t);

    let advection = VectorField::new(
        advect(velocity, &velocity.x),
        advect(velocity, &velocity.y),
        advect(velocity, &velocity.z),
    );
    let viscous = velocity.map(|c| c.laplacian().scale(coeffs.nu()));
    let mut residual = du_dt
        .add(&advection)
        .sub(&viscous)
        .add(&gradient(&pressure));
    if !forcing.is_empty() {
        let f_terms: Vec<VectorField<F>> = (0..forcing.len())
            .map(|i| forcing.term(i).unwrap().clone())
            .collect();
        let f_t = VectorField::new(
            horner(&f_terms.iter().map(|v| v.x.clone()).collect::<Vec<_>>(), t),
            horner(&f_terms.iter().map(|v| v.y.clone()).collect::<Vec<_>>(), t),
            horner(&f_terms.iter().map(|v| v.z.clone()).collect::<Vec<_>>(), t),
        );
        residual = residual.sub(&f_t);
    }

    Ok(ResidualReport {
        momentum_max: residual.max_norm(),
        continuity_max: divergence(velocity).max_norm(),
    })
}

/// Least-squares slope of `log10(residual)` against `log10(t)`.
pub fn residual_order_fit<S: Real, F: ScalarField<S>>(
    coeffs: &TaylorCoefficients<S, F>,
    forcing: &ForcingSeries<F>,
    order: usize,
    times: &[S],
) -> Result<f64, SeriesError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &t in times {
        let r = residual_check(coeffs, forcing, t, order)?;
        let m = r.momentum_max.to_f64().unwrap_or(f64::NAN);
        if m > 0.0 {
            xs.push(t.to_f64().unwrap().log10());
            ys.push(m.log10());
        }
    }
    if xs.len() < 2 {
        return Err(SeriesError::InsufficientData {
            needed: 2,
            found: xs.len(),
        });
    }
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    Ok((m * sxy - sx * sy) / (m * sxx - sx * sx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ExactFlow;
    use crate::recurrence::{run, Problem};
    use crate::trigpoly::TrigPoly;

    fn tg_run(nu: f64, n_max: usize) -> TaylorCoefficients<f64, TrigPoly<f64>> {
        let flow = ExactFlow::taylor_green(nu);
        let problem =
            Problem::new(nu, flow.initial_velocity(), ForcingSeries::unforced(), n_max).unwrap();
        run(&problem).unwrap().coefficients
    }

    #[test]
    fn partial_sum_at_zero_is_initial_data() {
        let coeffs = tg_run(0.1, 6);
        let sum = evaluate_partial_sum(&coeffs, 0.0, 6).unwrap();
        assert!(sum.velocity.sub(coeffs.velocity(0)).max_norm() == 0.0);
        assert!(sum.pressure.sub(coeffs.pressure(0)).max_norm() == 0.0);
    }

    #[test]
    fn partial_sum_order_out_of_range() {
        let coeffs = tg_run(0.1, 3);
        assert!(matches!(
            evaluate_partial_sum(&coeffs, 0.5, 4),
            Err(SeriesError::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn taylor_green_sum_converges_to_exact() {
        let nu = 0.1;
        let flow = ExactFlow::taylor_green(nu);
        let coeffs = tg_run(nu, 12);
        let t = 1.0;
        let exact = flow.exact_velocity(t);
        let mut last = f64::INFINITY;
        for order in [4, 8, 12] {
            let sum = evaluate_partial_sum(&coeffs, t, order).unwrap();
            let err = sum.velocity.sub(&exact).max_norm();
            assert!(err < last, "order {order}: {err} >= {last}");
            last = err;
        }
        assert!(last < 1e-9, "error at order 12: {last}");

        let p_exact = flow.exact_pressure(t);
        let sum = evaluate_partial_sum(&coeffs, t, 12).unwrap();
        assert!(sum.pressure.sub(&p_exact).max_norm() < 1e-8);
    }

    #[test]
    fn energy_of_reference_flows() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let volume = two_pi.powi(3);
        let tg = ExactFlow::taylor_green(0.0).initial_velocity();
        // Mean of |u|^2 is 1/2 for the vortex.
        assert!((energy(&tg) - 0.5 * volume).abs() < 1e-10);
        let abc = ExactFlow::abc(1.0, 1.0, 1.0, 0.0).initial_velocity();
        // Each component has mean square 1.
        assert!((energy(&abc) - 3.0 * volume).abs() < 1e-10);
    }

    #[test]
    fn geometric_norms_give_exact_radius() {
        let norms: Vec<(usize, f64, f64)> =
            (0..14).map(|n| (n, 3.0 * 0.5f64.powi(n as i32), f64::NAN)).collect();
        let est = estimate_radius_from_norms(&norms, NormKind::Max).unwrap();
        match est.radius_lower_hint {
            RadiusHint::Finite(r) => assert!((r - 2.0).abs() < 1e-9, "r = {r}"),
            RadiusHint::Unbounded => panic!("expected finite hint"),
        }
        assert!(!est.degenerate);
        assert_eq!(est.note, RADIUS_NOTE);
    }

    #[test]
    fn entire_series_reports_unbounded() {
        // Taylor-Green norms (2 nu)^n / n!: ratios trend to zero.
        let nu: f64 = 0.4;
        let norms: Vec<(usize, f64, f64)> = (0..14)
            .map(|n| {
                let fact: f64 = (1..=n).map(|i| i as f64).product();
                (n, (2.0 * nu).powi(n as i32) / fact, f64::NAN)
            })
            .collect();
        let est = estimate_radius_from_norms(&norms, NormKind::Max).unwrap();
        assert_eq!(est.radius_lower_hint, RadiusHint::Unbounded);
    }

    #[test]
    fn steady_flow_is_degenerate() {
        let norms = vec![(0, 1.0, f64::NAN), (1, 0.0, f64::NAN), (2, 1e-17, f64::NAN)];
        let est = estimate_radius_from_norms(&norms, NormKind::Max).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.radius_lower_hint, RadiusHint::Unbounded);
    }

    #[test]
    fn too_few_usable_orders() {
        let norms = vec![(0, 1.0, f64::NAN), (1, 0.5, f64::NAN), (2, 0.25, f64::NAN)];
        assert!(matches!(
            estimate_radius_from_norms(&norms, NormKind::Max),
            Err(SeriesError::InsufficientData { .. })
        ));
    }

    #[test]
    fn estimate_radius_from_run() {
        let coeffs = tg_run(0.3, 10);
        let est = estimate_radius(&coeffs, NormKind::Max).unwrap();
        assert_eq!(est.radius_lower_hint, RadiusHint::Unbounded);
        assert_eq!(est.per_order_norms.len(), 11);
        let csv = radius_csv(&est);
        assert!(csv.starts_with("order,norm,ratio,root\n"));
        assert_eq!(csv.lines().count(), 12);
    }

    #[test]
    fn radius_estimate_serializes() {
        let coeffs = tg_run(0.3, 10);
        let est = estimate_radius(&coeffs, NormKind::Max).unwrap();
        let json = serde_json::to_string(&est).unwrap();
        assert!(json.contains("\"radius_lower_hint\""));
        assert!(json.contains("empirical hint"));
    }

    #[test]
    fn residual_vanishes_at_zero_time() {
        let coeffs = tg_run(0.1, 4);
        let r = residual_check(&coeffs, &ForcingSeries::unforced(), 0.0, 4).unwrap();
        assert!(r.momentum_max < 1e-12);
        assert!(r.continuity_max < 1e-12);
    }

    #[test]
    fn residual_order_matches_truncation() {
        let coeffs = tg_run(0.1, 6);
        let forcing = ForcingSeries::unforced();
        let times: Vec<f64> = (0..8).map(|i| 0.05 * 1.35f64.powi(i)).collect();
        for order in [2usize, 3, 4] {
            let slope = residual_order_fit(&coeffs, &forcing, order, &times).unwrap();
            assert!(
                (slope - order as f64).abs() < 0.3,
                "order {order}: slope {slope}"
            );
        }
    }
}
