//! Genus of central curves: the LP formula and the SDP cases fixed by the
//! shape of the Hilbert series.

use centraldeg::formulas::{genus_lp, genus_sdp_special, GENUS_TABLE};

fn main() -> centraldeg::Result<()> {
    for m in 3..=7 {
        let row: Result<Vec<i64>, _> = (1..m).map(|d| genus_lp(m, d)).collect();
        println!("lp m={m}: {:?}", row?);
    }
    for (m, d, g) in GENUS_TABLE {
        let derived = genus_sdp_special(m, d).map_or("-".to_string(), |v| v.to_string());
        println!("sdp m={m} d={d:>2}: {g:>2} (closed form {derived})");
    }
    Ok(())
}
