//! Gram programs of binary forms. Sextics are counted; octics and ternary
//! quartics exceed the path budget and fall back to the shipped values.

use centraldeg::homotopy::TrackerConfig;
use centraldeg::sos::{gram_constraints, sos_degree, sos_dims};
use centraldeg::Error;

fn main() -> centraldeg::Result<()> {
    let tracker = TrackerConfig::default();
    for (n, degree) in [(2, 3), (2, 4), (3, 2)] {
        let (m, _) = sos_dims(n, degree)?;
        let constraints = gram_constraints(n, degree)?.len();
        print!("n={n} 2D={}: Gram matrix {m}x{m}, {constraints} constraints, ", 2 * degree);
        match sos_degree(n, degree, 1, &tracker) {
            Ok(r) => println!("degree {} (seeds {:?})", r.count, r.per_seed_counts),
            Err(Error::BudgetExceeded { paths, reference, .. }) => {
                println!("{paths} paths, refused; reference degree {reference:?}")
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
