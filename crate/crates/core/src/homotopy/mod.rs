//! Counting isolated solutions of square polynomial systems by total-degree
//! homotopy continuation with a random complex `gamma`.

mod count;
mod start;
mod system;
mod tracker;

pub use count::{count_torus_solutions, dedup, CountReport, Filters};
pub use start::{total_degree_start, StartSystem};
pub use system::SquareSystem;
pub use tracker::{track_path, PathOutcome, PathStatus, TrackerConfig};
