//! One PASS/FAIL line per acceptance criterion.

use knotstrata::selftest::run_all;

fn main() {
    knotstrata::init_threads();
    let results = run_all();
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
