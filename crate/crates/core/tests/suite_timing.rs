// Timing smoke: each suite must stay within its runtime budget.
use modscale::checks::{run_suite, CheckConfig, SUITES};

#[test]
#[ignore]
fn suite_timings() {
    let cfg = CheckConfig::default();
    for name in SUITES {
        let t0 = std::time::Instant::now();
        let r = run_suite(name, &cfg).unwrap();
        println!("{name:>10}: {:>8.2?}  pass={}", t0.elapsed(), r.passed());
    }
}
