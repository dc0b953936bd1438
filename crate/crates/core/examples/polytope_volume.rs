//! Normalized volume of the Newton polytope of the reduced LP system and
//! its staircase decomposition.

use centraldeg::polytope::{lp_support_polytope, normalized_volume, placing_triangulation, staircase_counts};

fn main() -> centraldeg::Result<()> {
    for (m, d) in [(4, 1), (5, 2), (6, 3)] {
        let poly = lp_support_polytope(m, d)?;
        let cells = placing_triangulation(&poly)?.len();
        let stairs = staircase_counts(m, d)?;
        println!(
            "m={m} d={d}: {} lattice points, {cells} cells, volume {}, staircase {:?}",
            poly.points().len(),
            normalized_volume(&poly)?,
            stairs.counts_by_k
        );
    }
    Ok(())
}
