//! End-to-end checks with pinned tolerances and runtime budgets. Prints one
//! PASS/FAIL line per criterion and exits nonzero if any line failed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use centraldeg::commands::{
    claim_central_path, claim_genus, claim_lp_degrees, claim_polynomiality, claim_polytope, claim_qp_degrees,
    claim_sdp_m3, claim_sos, reproduce_paper, to_json, Claim, Reproduction,
};
use centraldeg::homotopy::TrackerConfig;

const SEED: u64 = 1;

type Run<'a> = (usize, Duration, Box<dyn FnOnce() -> Claim + 'a>);

struct Line {
    id: usize,
    pass: bool,
    detail: String,
}

fn timed(id: usize, budget: Duration, run: impl FnOnce() -> Claim) -> (Line, Claim) {
    let start = Instant::now();
    let claim = run();
    let took = start.elapsed();
    let failed: Vec<String> = claim
        .cases
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} (expected {}, got {:?})", c.label, c.expected, c.observed))
        .collect();
    let in_time = took <= budget;
    let mut detail = format!(
        "{}: {}/{} cases in {:.1}s (budget {}s)",
        claim.claim,
        claim.cases.len() - failed.len(),
        claim.cases.len(),
        took.as_secs_f64(),
        budget.as_secs()
    );
    if !failed.is_empty() {
        detail += &format!("; failing: {}", failed.join("; "));
    }
    if !in_time {
        detail += "; over budget";
    }
    let line = Line {
        id,
        pass: claim.pass && in_time,
        detail,
    };
    (line, claim)
}

fn main() -> ExitCode {
    let tracker = TrackerConfig::default();
    let secs = Duration::from_secs;
    let mut lines = Vec::new();
    let mut claims = Vec::new();
    let runs: Vec<Run> = vec![
        (1, secs(120), Box::new(|| claim_lp_degrees(SEED, &tracker))),
        (2, secs(120), Box::new(|| claim_qp_degrees(SEED, &tracker))),
        (3, secs(60), Box::new(|| claim_sdp_m3(SEED, &tracker))),
        (4, secs(600), Box::new(|| claim_polynomiality(SEED, &tracker))),
        (5, secs(1800), Box::new(|| claim_sos(SEED, &tracker))),
        (6, secs(600), Box::new(claim_polytope)),
        (7, secs(60), Box::new(claim_genus)),
        (8, secs(10), Box::new(|| claim_central_path(SEED))),
    ];
    for (id, budget, run) in runs {
        let (line, claim) = timed(id, budget, run);
        lines.push(line);
        claims.push(claim);
    }

    // the claims above are the first run; reproduce_paper is the second
    let first = to_json(&Reproduction::from_claims(SEED, &tracker, claims), false).unwrap();
    let second = to_json(&reproduce_paper(SEED, &tracker), false).unwrap();
    lines.push(Line {
        id: 9,
        pass: first == second,
        detail: format!("reproduce-paper --seed {SEED} twice gives identical JSON ({} bytes)", first.len()),
    });

    for l in &lines {
        println!("criterion {}: {} {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", lines.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
