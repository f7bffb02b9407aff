use lowcross::checks::{run_check, CheckParams, CHECKS};
use std::process::ExitCode;

fn main() -> ExitCode {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, name) in CHECKS.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        match run_check(name, &CheckParams::default()) {
            Ok(r) => {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                failed += !r.passed as usize;
                println!("{tag} criterion {} {name}: {} [{:.1}s]", i + 1, r.summary, r.seconds);
            }
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {} {name}: {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
