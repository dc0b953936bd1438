//! QP central curves for a diagonal quadratic: the degree table for small
//! `m`, each entry confirmed by homotopy.

use centraldeg::commands::homotopy_degree;
use centraldeg::commands::Target;
use centraldeg::formulas::psi_qp;
use centraldeg::homotopy::TrackerConfig;

fn main() -> centraldeg::Result<()> {
    let tracker = TrackerConfig::default();
    for m in 2..=5 {
        let mut row = Vec::new();
        for d in 1..m {
            let counted = homotopy_degree(&Target::Qp { m, d }, 1, &tracker)?.count;
            row.push(format!("{:>3}/{:<3}", psi_qp(m, d)?, counted));
        }
        println!("m={m}: {}", row.join(" "));
    }
    println!("(formula/count)");
    Ok(())
}
