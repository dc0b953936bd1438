use centraldeg::commands::{cmd_degree, formula_degree, homotopy_degree, MethodChoice, RunConfig, Target};
use centraldeg::formulas::{psi_qp, psi_sdp_reference, Method};
use centraldeg::homotopy::TrackerConfig;
use centraldeg::Error;

#[test]
fn small_qp_values() {
    assert_eq!(psi_qp(3, 1).unwrap(), 3);
    assert_eq!(psi_qp(4, 1).unwrap(), 7);
    let cfg = TrackerConfig::default();
    assert_eq!(homotopy_degree(&Target::Qp { m: 3, d: 1 }, 5, &cfg).unwrap().count, 3);
    assert_eq!(homotopy_degree(&Target::Qp { m: 4, d: 1 }, 5, &cfg).unwrap().count, 7);
}

#[test]
fn qp_methods_agree_on_other_instances() {
    for seed in [11, 12] {
        let run = RunConfig {
            seed,
            ..RunConfig::default()
        };
        let o = cmd_degree(&Target::Qp { m: 5, d: 2 }, MethodChoice::All, &run).unwrap();
        assert_eq!(o.reports.len(), 3);
        assert!(o.reports.iter().all(|r| r.value == 11), "{:?}", o.reports);
    }
}

#[test]
fn sdp_partners_share_the_degree() {
    let cfg = TrackerConfig::default();
    let want = psi_sdp_reference(4, 7).unwrap();
    assert_eq!(psi_sdp_reference(4, 2), Some(want));
    for d in [2, 7] {
        let r = homotopy_degree(&Target::Sdp { m: 4, d }, 2, &cfg).unwrap();
        assert_eq!(r.count as u64, want, "d={d}");
        assert!(r.consensus);
    }
    // table value, not derived from a closed form
    assert_eq!(formula_degree(&Target::Sdp { m: 4, d: 2 }).unwrap().method, Method::Reference);
    assert_eq!(formula_degree(&Target::Sdp { m: 4, d: 9 }).unwrap().method, Method::Formula);
}

#[test]
fn invalid_dimensions_are_rejected() {
    let run = RunConfig::default();
    for t in [Target::Lp { m: 3, d: 3 }, Target::Qp { m: 2, d: 0 }, Target::Sdp { m: 3, d: 6 }] {
        assert!(cmd_degree(&t, MethodChoice::All, &run).is_err(), "{t:?}");
    }
}

#[test]
fn large_lp_is_refused_with_its_formula_value() {
    match homotopy_degree(&Target::Lp { m: 20, d: 9 }, 1, &TrackerConfig::default()) {
        Err(Error::BudgetExceeded { reference, .. }) => assert_eq!(reference, Some(92378)),
        other => panic!("{other:?}"),
    }
    // the formula and staircase routes still answer
    let o = cmd_degree(&Target::Lp { m: 20, d: 9 }, MethodChoice::Polytope, &RunConfig::default()).unwrap();
    assert_eq!(o.reports[0].value, 92378);
}
