//! Reference networks used throughout the tests and the CLI examples.

use crate::distribution::DurationDistribution::Normal;
use crate::network::{Activity, ProjectNetwork};

/// Five-activity case study: A1 feeds two branches (A2 then A4, and A3)
/// that join at A5. All durations normal.
pub fn case_study() -> ProjectNetwork {
    let acts = vec![
        Activity::new("A1", Normal { mean: 5.0, sd: 0.4 }, &[]),
        Activity::new("A2", Normal { mean: 5.0, sd: 0.7 }, &["A1"]),
        Activity::new(
            "A3",
            Normal {
                mean: 10.0,
                sd: 1.4,
            },
            &["A1"],
        ),
        Activity::new("A4", Normal { mean: 5.0, sd: 1.2 }, &["A2"]),
        Activity::new("A5", Normal { mean: 5.0, sd: 0.4 }, &["A3", "A4"]),
    ];
    ProjectNetwork::new("case study", "weeks", acts).expect("fixture is well formed")
}

/// Two identical activities in series, each normal with mean 5 and
/// variance 0.64.
pub fn serial_pair() -> ProjectNetwork {
    let acts = vec![
        Activity::new("A1", Normal { mean: 5.0, sd: 0.8 }, &[]),
        Activity::new("A2", Normal { mean: 5.0, sd: 0.8 }, &["A1"]),
    ];
    ProjectNetwork::new("serial pair", "time units", acts).expect("fixture is well formed")
}
