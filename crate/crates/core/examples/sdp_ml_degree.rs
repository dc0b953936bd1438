//! SDP central curve degrees at m = 3 via the likelihood equations of the
//! associated concentration model. The row is symmetric under
//! d <-> N - d - 1.

use centraldeg::homotopy::TrackerConfig;
use centraldeg::instances::{build_ml_system, ml_degree, ml_path_counts, random_sdp};

fn main() -> centraldeg::Result<()> {
    let m = 3;
    for d in 1..=4 {
        let ml = build_ml_system(&random_sdp(m, d, 1)?, 1)?;
        let (conc, cov) = ml_path_counts(&ml);
        let report = ml_degree(&ml, &TrackerConfig::default())?;
        println!(
            "d={d}: degree {} (paths: {conc} in concentration, {cov} in covariance coordinates)",
            report.count
        );
    }
    Ok(())
}
