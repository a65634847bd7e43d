//! Runs the seven acceptance criteria and prints one line per criterion.
//! Custom harness so the lines show up in a plain `cargo test` run.

use std::process::ExitCode;

use hamcap::acceptance::{self, AcceptanceOptions};
use hamcap::numeric::rng_seed_from_env;

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let opts = AcceptanceOptions {
        seeds: 1000,
        rng_seed: rng_seed_from_env(),
    };
    let criteria: [(&str, &dyn Fn() -> acceptance::CriterionOutcome); 7] = [
        ("criterion_1", &|| acceptance::criterion_1(&opts)),
        ("criterion_2", &|| acceptance::criterion_2(&opts)),
        ("criterion_3", &|| acceptance::criterion_3(&opts)),
        ("criterion_4", &acceptance::criterion_4),
        ("criterion_5", &acceptance::criterion_5),
        ("criterion_6", &|| acceptance::criterion_6(&opts)),
        ("criterion_7", &acceptance::criterion_7),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let outcome = run();
        println!("{}", outcome.line());
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
