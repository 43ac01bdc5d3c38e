//! Dev scratchpad: runs preset variants and prints convergence summaries.

use rls_es::engine::{convergence_report, es_target, run_scenario, Scheme};
use rls_es::presets::preset;

fn main() {
    let which: Vec<String> = std::env::args().skip(1).collect();
    let all = which.is_empty();

    if which.iter().any(|w| w == "absscan") {
        abs_scan();
        return;
    }
    if which.iter().any(|w| w == "absdiag") {
        abs_diag();
        return;
    }
    if which.iter().any(|w| w == "abs0") {
        abs_theta0_scan();
        return;
    }
    if which.iter().any(|w| w == "absseeds") {
        abs_seeds();
        return;
    }

    if all || which.iter().any(|w| w == "scalar") {
        println!("=== scalar, noise-free ===");
        let mut s = preset("scalar_6_1_rls").unwrap();
        s.noise.sigma = 0.0;
        let target = es_target(&s.plant).unwrap();
        let rec = run_scenario(&s).unwrap();
        let rep = convergence_report(&rec, &target.theta_star, target.y_star, 0.02);
        let last = rec.theta.last().unwrap()[0];
        println!(
            "rls: t_conv={:?} sse={:.5} theta_end={:.5} p_max_seen={:.3e}",
            rep.t_conv,
            rep.steady_state_error,
            last,
            rec.p_trace.iter().cloned().fold(0.0, f64::max)
        );

        let mut c = preset("scalar_6_1_classic").unwrap();
        c.noise.sigma = 0.0;
        let rec = run_scenario(&c).unwrap();
        let rep = convergence_report(&rec, &target.theta_star, target.y_star, 0.02);
        println!(
            "classic: t_conv={:?} sse={:.5} theta_end={:.5}",
            rep.t_conv,
            rep.steady_state_error,
            rec.theta.last().unwrap()[0]
        );
    }

    if all || which.iter().any(|w| w == "noisy") {
        println!("=== scalar, sigma=0.05, 5 seeds ===");
        for seed in [1u64, 2, 3, 4, 5] {
            let mut r = preset("scalar_6_1_rls").unwrap();
            r.seed = seed;
            let mut c = preset("scalar_6_1_classic").unwrap();
            c.seed = seed;
            let target = es_target(&r.plant).unwrap();
            let ra = run_scenario(&r).unwrap();
            let rb = run_scenario(&c).unwrap();
            let rep_a = convergence_report(&ra, &target.theta_star, target.y_star, 0.02);
            let rep_b = convergence_report(&rb, &target.theta_star, target.y_star, 0.02);
            println!(
                "seed {seed}: rls sse={:.5} classic sse={:.5} rls_wins={}",
                rep_a.steady_state_error,
                rep_b.steady_state_error,
                rep_a.steady_state_error < rep_b.steady_state_error
            );
        }
    }

    if all || which.iter().any(|w| w == "vector") {
        println!("=== vector, noise-free ===");
        let mut s = preset("vector_6_2_rls").unwrap();
        s.noise.sigma = 0.0;
        let target = es_target(&s.plant).unwrap();
        let rec = run_scenario(&s).unwrap();
        let last = rec.theta.last().unwrap();
        let y_last = *rec.y_clean.last().unwrap();
        println!(
            "rls: theta_end=[{:.4},{:.4}] errs=[{:.4},{:.4}] y_end={:.4} p_max_seen={:.3e}",
            last[0],
            last[1],
            (last[0] - target.theta_star[0]).abs(),
            (last[1] - target.theta_star[1]).abs(),
            y_last,
            rec.p_trace.iter().cloned().fold(0.0, f64::max)
        );
    }

    if all || which.iter().any(|w| w == "abs") {
        for sigma in [0.0, 0.1] {
            println!("=== abs, sigma={sigma} ===");
            let mut r = preset("abs_6_3_rls").unwrap();
            r.noise.sigma = sigma;
            let mut c = preset("abs_6_3_classic").unwrap();
            c.noise.sigma = sigma;
            let target = es_target(&r.plant).unwrap();
            for (name, s) in [("rls", &r), ("classic", &c)] {
                match run_scenario(s) {
                    Ok(rec) => {
                        let wheel = rec.wheel.as_ref().unwrap();
                        // time-average |lambda - (-lambda*)| over final braking second
                        let t_stop = rec.stopped_at.unwrap_or(*rec.t.last().unwrap());
                        let from = rec
                            .t
                            .iter()
                            .position(|t| *t >= t_stop - 1.0)
                            .unwrap_or(0);
                        let lam_err: f64 = wheel.slip[from..]
                            .iter()
                            .map(|l| (l - target.theta_star[0]).abs())
                            .sum::<f64>()
                            / (wheel.slip.len() - from) as f64;
                        println!(
                            "{name}: stopped_at={:?} lam_err_final_s={:.4} theta_end={:.4} p_max_seen={:.3e}",
                            rec.stopped_at,
                            lam_err,
                            rec.theta.last().unwrap()[0],
                            rec.p_trace.iter().cloned().fold(0.0, f64::max)
                        );
                    }
                    Err(e) => println!("{name}: FAILED {e}"),
                }
            }
        }
    }

    if all || which.iter().any(|w| w == "lyap") {
        println!("=== scalar lyapunov check, noise-free ===");
        let mut s = preset("scalar_6_1_rls").unwrap();
        s.noise.sigma = 0.0;
        let target = es_target(&s.plant).unwrap();
        let rec = run_scenario(&s).unwrap();
        let th_star = target.theta_star[0];
        let mut worst = 0.0f64;
        let mut worst_t = 0.0;
        let mut violations = 0usize;
        let mut prev_v: Option<f64> = None;
        for i in 0..rec.len() {
            if rec.t[i] <= 1.0 {
                continue;
            }
            let err = rec.theta[i][0] - th_star;
            let v = 0.5 * err * err;
            if let Some(pv) = prev_v {
                let dv = v - pv;
                if dv > 1e-12 {
                    violations += 1;
                    if dv > worst {
                        worst = dv;
                        worst_t = rec.t[i];
                    }
                }
            }
            prev_v = Some(v);
        }
        println!("violations={violations} worst_dV={worst:.3e} at t={worst_t:.3}");
        assert_eq!(rec.scheme, Scheme::Rls);
    }
}

#[allow(dead_code)]
fn abs_scan() {
    use rls_es::DitherSpec;
    for theta0 in [-0.05, -0.1] {
        for pole in [5.0, 15.0] {
            for (da, dw) in [(0.01, 3.0), (0.008, 30.0)] {
                let mut r = preset("abs_6_3_rls").unwrap();
                r.theta0 = rls_es::ParamVec::new(vec![theta0]).unwrap();
                r.gains.omega_l = vec![pole];
                r.dither = DitherSpec::new(vec![da], vec![dw]).unwrap();
                let mut c = preset("abs_6_3_classic").unwrap();
                c.theta0 = rls_es::ParamVec::new(vec![theta0]).unwrap();
                let target = es_target(&r.plant).unwrap();
                let mut line = format!("th0={theta0} wl={pole} d=({da},{dw}): ");
                let mut stops = [None, None];
                for (i, s) in [&r, &c].iter().enumerate() {
                    match run_scenario(s) {
                        Ok(rec) => {
                            let wheel = rec.wheel.as_ref().unwrap();
                            let t_stop = rec.stopped_at.unwrap_or(*rec.t.last().unwrap());
                            let from = rec.t.iter().position(|t| *t >= t_stop - 1.0).unwrap_or(0);
                            let lam_err: f64 = wheel.slip[from..]
                                .iter()
                                .map(|l| (l - target.theta_star[0]).abs())
                                .sum::<f64>() / (wheel.slip.len() - from) as f64;
                            stops[i] = rec.stopped_at;
                            line += &format!(
                                "{} stop={:?} lamerr={:.4} th_end={:.3} | ",
                                if i == 0 { "rls" } else { "cls" },
                                rec.stopped_at.map(|t| (t * 1000.0).round() / 1000.0),
                                lam_err,
                                rec.theta.last().unwrap()[0]
                            );
                        }
                        Err(e) => line += &format!("FAIL {e} | "),
                    }
                }
                if let (Some(a), Some(b)) = (stops[0], stops[1]) {
                    line += &format!("rls<=cls={}", a <= b);
                }
                println!("{line}");
            }
        }
    }
}

#[allow(dead_code)]
fn abs_diag() {
    let mut c = preset("abs_6_3_classic").unwrap();
    c.noise.sigma = 0.0;
    let rec = run_scenario(&c).unwrap();
    let wheel = rec.wheel.as_ref().unwrap();
    println!("t      theta_hat   Ghat       eta_proxy  lambda     vdot       v");
    for i in (0..rec.len()).step_by(500) {
        // eta is not recorded directly; z = y_noisy - eta so eta = y - z
        let eta = rec.y_noisy[i] - rec.z[i];
        println!(
            "{:6.2} {:+.5} {:+.5} {:+.4} {:+.4} {:+.4} {:7.3}",
            rec.t[i],
            rec.theta_hat[i][0],
            rec.grad[i][0],
            eta,
            wheel.slip[i],
            rec.y_clean[i],
            wheel.v[i]
        );
    }
}

#[allow(dead_code)]
fn abs_theta0_scan() {
    for theta0 in [-0.1, -0.15, -0.2, -0.25] {
        let mut r = preset("abs_6_3_rls").unwrap();
        let mut c = preset("abs_6_3_classic").unwrap();
        let plant = r.plant.wheel_plant_for_tuning();
        let y0 = plant.weight / plant.mass * plant.friction(theta0);
        r.theta0 = rls_es::ParamVec::new(vec![theta0]).unwrap();
        r.init.washout0 = Some(y0 / r.gains.omega_l[0]);
        c.theta0 = rls_es::ParamVec::new(vec![theta0]).unwrap();
        c.init.eta0 = Some(y0);
        let target = es_target(&r.plant).unwrap();
        let mut line = format!("th0={theta0}: ");
        let mut stops = [None, None];
        for (i, s) in [&r, &c].iter().enumerate() {
            match run_scenario(s) {
                Ok(rec) => {
                    let wheel = rec.wheel.as_ref().unwrap();
                    let t_stop = rec.stopped_at.unwrap_or(*rec.t.last().unwrap());
                    let from = rec.t.iter().position(|t| *t >= t_stop - 1.0).unwrap_or(0);
                    let lam_err: f64 = wheel.slip[from..]
                        .iter()
                        .map(|l| (l - target.theta_star[0]).abs())
                        .sum::<f64>() / (wheel.slip.len() - from) as f64;
                    stops[i] = rec.stopped_at;
                    line += &format!(
                        "{} stop={:?} lamerr={:.4} th_end={:+.3} | ",
                        if i == 0 { "rls" } else { "cls" },
                        rec.stopped_at.map(|t| (t * 1000.0).round() / 1000.0),
                        lam_err,
                        rec.theta.last().unwrap()[0]
                    );
                }
                Err(e) => line += &format!("FAIL {e} | "),
            }
        }
        if let (Some(a), Some(b)) = (stops[0], stops[1]) {
            line += &format!("rls<=cls={}", a <= b);
        }
        println!("{line}");
    }
}

#[allow(dead_code)]
fn abs_seeds() {
    for seed in [42u64, 1, 2, 3, 4, 5] {
        let mut r = preset("abs_6_3_rls").unwrap();
        r.seed = seed;
        let mut c = preset("abs_6_3_classic").unwrap();
        c.seed = seed;
        let target = es_target(&r.plant).unwrap();
        let mut line = format!("seed={seed}: ");
        let mut stops = [None, None];
        for (i, s) in [&r, &c].iter().enumerate() {
            let rec = match run_scenario(s) {
                Ok(rec) => rec,
                Err(e) => {
                    line += &format!("FAIL {e} | ");
                    continue;
                }
            };
            let wheel = rec.wheel.as_ref().unwrap();
            let t_stop = rec.stopped_at.unwrap_or(*rec.t.last().unwrap());
            let from = rec.t.iter().position(|t| *t >= t_stop - 1.0).unwrap_or(0);
            let lam_err: f64 = wheel.slip[from..]
                .iter()
                .map(|l| (l - target.theta_star[0]).abs())
                .sum::<f64>() / (wheel.slip.len() - from) as f64;
            stops[i] = rec.stopped_at;
            line += &format!(
                "{} stop={:?} lamerr={:.4} | ",
                if i == 0 { "rls" } else { "cls" },
                rec.stopped_at.map(|t| (t * 1000.0).round() / 1000.0),
                lam_err,
            );
        }
        if let (Some(a), Some(b)) = (stops[0], stops[1]) {
            line += &format!("rls<=cls={}", a <= b);
        }
        println!("{line}");
    }
}
