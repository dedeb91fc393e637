//! Acceptance: runtime envelope of the full verification matrix. The other
//! criteria live in the core crate's acceptance suite.

use std::process::Command;
use std::time::Instant;

#[test]
fn accept_10_verify_all_runtime_envelope() {
    let start = Instant::now();
    let res = Command::new(env!("CARGO_BIN_EXE_jetcurv"))
        .args(["verify-all", "--dim", "3", "--seed", "42"])
        .output()
        .expect("spawn jetcurv");
    let elapsed = start.elapsed().as_secs_f64();
    let pass = res.status.success() && elapsed < 60.0;
    println!(
        "ACCEPT-10 verify-all-runtime ... {} (dim 3 in {elapsed:.1}s, limit 60s, exit {:?})",
        if pass { "PASS" } else { "FAIL" },
        res.status.code()
    );
    assert!(
        pass,
        "verify-all dim 3: exit {:?} in {elapsed:.1}s; stderr: {}",
        res.status.code(),
        String::from_utf8_lossy(&res.stderr)
    );
}
