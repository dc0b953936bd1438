//! Seeded random instances and their JSON form.

use centraldeg::instances::{random_lp, Instance};

fn main() -> centraldeg::Result<()> {
    let lp = random_lp(4, 2, 7)?;
    let doc = Instance::Lp(lp).to_json()?;
    println!("{doc}");
    assert_eq!(Instance::from_json(&doc)?.to_json()?, doc);
    Ok(())
}
