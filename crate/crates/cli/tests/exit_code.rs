use std::time::Duration;

use mjv_cli::exit_code;
use mjv_core::driver::{FeasibilityKind, FeasibilityWarning, Status, VerificationOutcome};
use mjv_core::Span;
use proptest::prelude::*;

fn outcome(status: Status, warned: bool) -> VerificationOutcome {
    VerificationOutcome {
        method: "m".into(),
        status,
        violations: Vec::new(),
        feasibility: if warned {
            vec![FeasibilityWarning {
                kind: FeasibilityKind::InfeasibleExit,
                span: Span::default(),
                assertion: None,
            }]
        } else {
            Vec::new()
        },
        unchecked: Vec::new(),
        partial: false,
        time: Duration::from_millis(5),
        solver: "z3".into(),
        message: None,
    }
}

fn status() -> impl Strategy<Value = Status> {
    prop_oneof![
        Just(Status::Valid),
        Just(Status::Violations),
        Just(Status::Unknown),
        Just(Status::Timeout),
        Just(Status::SolverError),
    ]
}

#[test]
fn table_of_codes() {
    assert_eq!(exit_code(&[]), 0);
    assert_eq!(exit_code(&[outcome(Status::Valid, false)]), 0);
    assert_eq!(exit_code(&[outcome(Status::Valid, true)]), 1);
    assert_eq!(exit_code(&[outcome(Status::Violations, false)]), 1);
    assert_eq!(
        exit_code(&[outcome(Status::Violations, false), outcome(Status::Timeout, false)]),
        3
    );
    let mut undecided = outcome(Status::Valid, false);
    undecided.unchecked.push(Span::default());
    assert_eq!(exit_code(&[undecided]), 3);
}

proptest! {
    #[test]
    fn code_depends_only_on_the_multiset_of_statuses(
        xs in prop::collection::vec((status(), any::<bool>(), 0u64..500), 0..8),
        seed in any::<u64>(),
    ) {
        let outs: Vec<_> = xs.iter().map(|(s, w, ms)| {
            let mut o = outcome(*s, *w);
            o.time = Duration::from_millis(*ms);
            o.method = format!("m{ms}");
            o
        }).collect();
        let mut shuffled = outs.clone();
        let n = shuffled.len();
        if n > 1 {
            shuffled.rotate_left((seed as usize) % n);
            shuffled.swap(0, (seed as usize / 7) % n);
        }
        prop_assert_eq!(exit_code(&outs), exit_code(&shuffled));
        let stripped: Vec<_> = outs.iter().map(|o| outcome(o.status, !o.feasibility.is_empty())).collect();
        prop_assert_eq!(exit_code(&outs), exit_code(&stripped));
        let worst = outs.iter().map(|o| exit_code(std::slice::from_ref(o))).max().unwrap_or(0);
        prop_assert_eq!(exit_code(&outs), worst);
    }
}
