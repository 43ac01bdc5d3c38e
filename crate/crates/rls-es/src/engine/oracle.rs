//! Independent ground-truth extremum via brute-force search.
//!
//! Deliberately reimplements nothing from the closed loop: plain grid
//! search refined by golden-section, evaluating the plant map directly.
//! A second well-separated near-optimal grid maximum is reported as
//! non-concavity instead of being silently resolved.

use serde::Serialize;

use super::scenario::PlantConfig;
use crate::Error;

/// Ground-truth maximizer and maximum value of a plant map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub theta_star: Vec<f64>,
    pub y_star: f64,
}

const GRID_RESOLUTION: f64 = 1e-4;
const COARSE_2D: f64 = 2e-3;
const GOLDEN_TOL: f64 = 1e-10;
/// Near-optimal values within this relative band, farther than a few grid
/// cells from the argmax, count as rival maxima.
const RIVAL_REL_TOL: f64 = 1e-9;

/// Brute-force extremum of the plant's performance map.
///
/// Static maps are searched on `[0, 1]` per axis; the braking plant's
/// friction curve is searched over slip magnitude in `[0, 1]`, so the
/// result is the (positive) peak location and peak friction.
pub fn oracle_extremum(plant: &PlantConfig) -> Result<Extremum, Error> {
    match plant {
        PlantConfig::ScalarMap { .. } => {
            let map = plant.scalar_map().expect("scalar variant");
            let f = |u: f64| map.eval(u);
            let (theta, y) = search_1d(&f, 0.0, 1.0, GRID_RESOLUTION)?;
            Ok(Extremum { theta_star: vec![theta], y_star: y })
        }
        PlantConfig::VectorMap { .. } => {
            let map = plant.vector_map().expect("vector variant");
            search_2d(&|u: &[f64; 2]| map.eval(u), [0.01, 0.01], [1.0, 1.0])
        }
        PlantConfig::AbsBraking { .. } => {
            let wheel = plant.wheel_plant().expect("braking variant");
            let f = |lam: f64| wheel.friction(lam);
            let (lam, mu) = search_1d(&f, 0.0, 1.0, GRID_RESOLUTION)?;
            Ok(Extremum { theta_star: vec![lam], y_star: mu })
        }
    }
}

/// The target the closed loop should reach, in loop coordinates.
///
/// For static maps this is the oracle extremum itself. For braking, the
/// loop tunes a (negative) slip reference to minimize `v̇`, so the target
/// is `−λ*` with objective value `−(N/m)·μ_max`.
pub fn es_target(plant: &PlantConfig) -> Result<Extremum, Error> {
    let peak = oracle_extremum(plant)?;
    match plant {
        PlantConfig::AbsBraking { .. } => {
            let wheel = plant.wheel_plant().expect("braking variant");
            Ok(Extremum {
                theta_star: peak.theta_star.iter().map(|l| -l).collect(),
                y_star: -wheel.weight / wheel.mass * peak.y_star,
            })
        }
        _ => Ok(peak),
    }
}

/// Grid search on `[lo, hi]` at `resolution`, golden-section refinement,
/// rival-maximum detection.
fn search_1d(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    resolution: f64,
) -> Result<(f64, f64), Error> {
    let steps = ((hi - lo) / resolution).ceil() as usize;
    let mut values = Vec::with_capacity(steps + 1);
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=steps {
        let u = lo + (hi - lo) * i as f64 / steps as f64;
        let y = f(u);
        values.push(y);
        if y > best.1 {
            best = (i, y);
        }
    }

    let rivals = count_rival_maxima(&values, best.0, best.1);
    if rivals > 0 {
        return Err(Error::NonConcave { candidates: rivals + 1 });
    }

    let cell = (hi - lo) / steps as f64;
    let a = (lo + (best.0 as f64 - 1.0) * cell).max(lo);
    let b = (lo + (best.0 as f64 + 1.0) * cell).min(hi);
    let theta = golden_section(f, a, b);
    Ok((theta, f(theta)))
}

fn count_rival_maxima(values: &[f64], best_idx: usize, best: f64) -> usize {
    let scale = best.abs().max(1.0);
    let mut rivals = 0;
    for i in 1..values.len().saturating_sub(1) {
        if i.abs_diff(best_idx) <= 3 {
            continue;
        }
        let local_max = values[i] >= values[i - 1] && values[i] >= values[i + 1];
        if local_max && best - values[i] <= RIVAL_REL_TOL * scale {
            rivals += 1;
        }
    }
    rivals
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > GOLDEN_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Coarse 2-D grid to locate the basin, then alternating per-axis
/// golden-section refinement, then a fine verification scan per axis
/// through the refined point.
fn search_2d(
    f: &dyn Fn(&[f64; 2]) -> f64,
    lo: [f64; 2],
    hi: [f64; 2],
) -> Result<Extremum, Error> {
    let steps = ((hi[0] - lo[0]) / COARSE_2D).ceil() as usize;
    let mut best = ([lo[0], lo[1]], f64::NEG_INFINITY);
    for i in 0..=steps {
        for j in 0..=steps {
            let u = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
            ];
            let y = f(&u);
            if y > best.1 {
                best = (u, y);
            }
        }
    }

    let mut point = best.0;
    for _ in 0..8 {
        let frozen_1 = point[1];
        let g0 = move |u: f64| [u, frozen_1];
        point[0] = golden_section(
            &|u| f(&g0(u)),
            (point[0] - 4.0 * COARSE_2D).max(lo[0]),
            (point[0] + 4.0 * COARSE_2D).min(hi[0]),
        );
        let frozen_0 = point[0];
        let g1 = move |u: f64| [frozen_0, u];
        point[1] = golden_section(
            &|u| f(&g1(u)),
            (point[1] - 4.0 * COARSE_2D).max(lo[1]),
            (point[1] + 4.0 * COARSE_2D).min(hi[1]),
        );
    }

    // fine per-axis verification scans through the refined point, with
    // rival detection on each line
    let y_star = f(&point);
    for axis in 0..2 {
        let (theta_line, _) = search_1d(
            &|u| {
                let mut p = point;
                p[axis] = u;
                f(&p)
            },
            lo[axis],
            hi[axis],
            GRID_RESOLUTION,
        )?;
        if (theta_line - point[axis]).abs() > 10.0 * GRID_RESOLUTION {
            return Err(Error::NonConcave { candidates: 2 });
        }
    }

    Ok(Extremum { theta_star: point.to_vec(), y_star })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn scalar_plant() -> PlantConfig {
        PlantConfig::ScalarMap { k1: 1.05, k2: 23.0, k3: 0.52, gain: 10.0 }
    }

    fn vector_plant() -> PlantConfig {
        PlantConfig::VectorMap { peak_inputs: [0.2, 0.3], peak_outputs: [5.0, 9.0] }
    }

    fn braking_plant() -> PlantConfig {
        PlantConfig::AbsBraking {
            mass: 400.0,
            radius: 0.3,
            inertia: 1.7,
            bearing: 0.01,
            weight: None,
            mu_max: 0.4,
            lambda_star: 0.25,
            v0: 33.3,
            omega0: None,
            v_stop: 0.5,
            tau_max: 4000.0,
            slip_gain: 50.0,
        }
    }

    #[test]
    fn scalar_extremum_matches_closed_form() {
        let ext = oracle_extremum(&scalar_plant()).unwrap();
        let closed_form = (1.05f64 * 23.0 / 0.52).ln() / 23.0;
        assert_abs_diff_eq!(ext.theta_star[0], closed_form, epsilon = 1e-6);
        assert_abs_diff_eq!(ext.theta_star[0], 0.16688, epsilon = 1e-3);
        assert_abs_diff_eq!(ext.y_star, 9.4059, epsilon = 1e-3);
    }

    #[test]
    fn vector_extremum_is_at_the_peaks() {
        let ext = oracle_extremum(&vector_plant()).unwrap();
        assert_abs_diff_eq!(ext.theta_star[0], 0.2, epsilon = 1e-6);
        assert_abs_diff_eq!(ext.theta_star[1], 0.3, epsilon = 1e-6);
        assert_abs_diff_eq!(ext.y_star, 14.0, epsilon = 1e-9);
    }

    #[test]
    fn friction_peak_is_by_construction() {
        let ext = oracle_extremum(&braking_plant()).unwrap();
        assert_abs_diff_eq!(ext.theta_star[0], 0.25, epsilon = 1e-6);
        assert_abs_diff_eq!(ext.y_star, 0.4, epsilon = 1e-9);

        let target = es_target(&braking_plant()).unwrap();
        assert_abs_diff_eq!(target.theta_star[0], -0.25, epsilon = 1e-6);
        assert_abs_diff_eq!(target.y_star, -9.81 * 0.4, epsilon = 1e-6);
    }

    #[test]
    fn rival_maxima_are_detected() {
        // two equal peaks well apart
        let f = |u: f64| -((u - 0.25) * (u - 0.75)).powi(2);
        let err = search_1d(&f, 0.0, 1.0, 1e-4).unwrap_err();
        assert!(matches!(err, Error::NonConcave { .. }), "{err}");
    }

    #[test]
    fn single_peak_is_not_flagged() {
        let f = |u: f64| -(u - 0.3).powi(2);
        let (theta, y) = search_1d(&f, 0.0, 1.0, 1e-4).unwrap();
        assert_abs_diff_eq!(theta, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-12);
    }
}
