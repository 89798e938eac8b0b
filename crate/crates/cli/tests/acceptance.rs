//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

fn main() {
    let start = std::time::Instant::now();
    let results = largest_eig_cli::validate::run_suite(1.0, &[], |r| println!("{}", r.line()));
    let failed: Vec<usize> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!(
        "acceptance: {} passed, {} failed {:?} in {:.1} s",
        results.len() - failed.len(),
        failed.len(),
        failed,
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
