use centraldeg::centralpath::{trace_lp, trace_qp, PathSample, ScheduleConfig};
use centraldeg::instances::{lift_duals, random_lp, random_qp, ClearedKkt};
use centraldeg::Complex64;

fn schedule() -> ScheduleConfig {
    ScheduleConfig {
        steps: 20,
        ..ScheduleConfig::default()
    }
}

fn duals_match<P: ClearedKkt>(prog: &P, samples: &[PathSample]) {
    for s in samples {
        let x: Vec<Complex64> = s.primal.coords().iter().map(|v| Complex64::new(*v, 0.0)).collect();
        let lift = lift_duals(&x, prog, None).unwrap();
        let rel = |a: Complex64, b: f64| (a - b).norm() / b.abs().max(1e-300);
        assert!(rel(lift.lambda, s.lambda) < 1e-6, "lambda {} vs {}", lift.lambda, s.lambda);
        let ynorm = s.dual.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = lift.y.iter().zip(&s.dual).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-6 * ynorm.max(1.0), "y off by {err}");
    }
}

#[test]
fn samples_lie_on_the_algebraic_curve() {
    for seed in 1..=3 {
        let lp = random_lp(6, 2, seed).unwrap();
        duals_match(&lp, &trace_lp(&lp, &schedule()).unwrap().into_result().unwrap());
        let qp = random_qp(5, 2, seed).unwrap();
        duals_match(&qp, &trace_qp(&qp, &schedule()).unwrap().into_result().unwrap());
    }
}

#[test]
fn lambda_decreases_and_lp_objective_does_not_increase() {
    for seed in 1..=3 {
        let lp = random_lp(6, 2, seed).unwrap();
        let samples = trace_lp(&lp, &schedule()).unwrap().into_result().unwrap();
        let obj: Vec<f64> = samples
            .iter()
            .map(|s| s.primal.coords().iter().zip(&lp.c).map(|(x, c)| x * c).sum())
            .collect();
        let scale = 1.0 + obj.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (w, o) in samples.windows(2).zip(obj.windows(2)) {
            assert!(w[1].lambda < w[0].lambda);
            assert!(o[1] <= o[0] + 1e-8 * scale, "{} then {}", o[0], o[1]);
        }
    }
}

#[test]
fn default_schedule_reports_where_it_stopped() {
    let lp = random_lp(6, 2, 1).unwrap();
    let t = trace_lp(&lp, &ScheduleConfig::default()).unwrap();
    match t.failure {
        None => assert_eq!(t.samples.len(), 30),
        Some(lambda) => {
            assert!(t.samples.len() < 30);
            assert!(t.samples.iter().all(|s| s.lambda > lambda));
        }
    }
}
