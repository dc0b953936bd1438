//! Degree of the LP central curve by formula, polytope volume and
//! homotopy continuation.
//!
//! cargo run --release --example lp_degree -- 6 2

use centraldeg::commands::{cmd_degree, MethodChoice, RunConfig, Target};

fn main() -> centraldeg::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (m, d) = match args[..] {
        [m, d, ..] => (m, d),
        _ => (5, 2),
    };
    let out = cmd_degree(&Target::Lp { m, d }, MethodChoice::All, &RunConfig::default())?;
    print!("{}", out.to_text());
    Ok(())
}
