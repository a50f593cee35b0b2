//! Acceptance criteria 1 to 8 at their stated tolerances and budgets, run in
//! order. Prints one pass/fail line per criterion followed by its checks and
//! exits nonzero if any criterion fails.

use lamtrans::verify::{run_suite, SuiteSettings};

fn main() {
    let outcomes = run_suite(&SuiteSettings::with_seed(20240611));
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", outcomes.len());
    } else {
        println!("acceptance: criteria {failed:?} fail");
        std::process::exit(1);
    }
}
