use std::process::ExitCode;

use hypfill::acceptance::run_all;

/// Criteria whose threshold the computed values do not reach.
const KNOWN_FAILURES: &[&str] = &["1b"];

fn main() -> ExitCode {
    let mut ok = true;

    let results = run_all();
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    if failed != KNOWN_FAILURES {
        eprintln!("unexpected acceptance outcome: failed {failed:?}, expected {KNOWN_FAILURES:?}");
        ok = false;
    }

    let ell = hypfill::families::tall_profile(0.999f64).unwrap().ell;
    if (ell - 9.682265).abs() >= 1e-5 {
        eprintln!("ell(0.999) = {ell}, expected 9.682265");
        ok = false;
    }

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
