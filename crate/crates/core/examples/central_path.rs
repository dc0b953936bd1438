//! Follows the central path of a random SDP and writes the samples as CSV.
//!
//! cargo run --release --example central_path -- /tmp/path.csv

use centraldeg::centralpath::{dual_slack, emit_csv, trace_sdp, Primal, ScheduleConfig};
use centraldeg::instances::random_sdp;

fn main() -> centraldeg::Result<()> {
    let sdp = random_sdp(4, 3, 1)?;
    let sched = ScheduleConfig {
        steps: 20,
        ..ScheduleConfig::default()
    };
    let samples = trace_sdp(&sdp, &sched)?.into_result()?;
    for s in samples.iter().step_by(4) {
        let Primal::Matrix(x) = &s.primal else { unreachable!() };
        let gap = x.inner(&dual_slack(&sdp, &s.dual));
        println!("lambda {:.3e}  gap/lambda {:.9}  residual {:.1e}", s.lambda, gap / s.lambda, s.kkt_residual);
    }
    if let Some(path) = std::env::args().nth(1) {
        emit_csv(&samples, path.as_ref())?;
        println!("wrote {} samples to {path}", samples.len());
    }
    Ok(())
}
