//! Acceptance suite: one PASS/FAIL line per criterion, each backed by the
//! `reproduce` scenario of the same name. Every scenario runs with 1 and with 4
//! workers; the first run supplies the checks and the timing, the pair supplies
//! the determinism criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dirset_core::scenarios::{run_scenario, ScenarioOptions, ScenarioOutcome, DEFAULT_SEED};

struct Criterion {
    id: u32,
    scenario: &'static str,
    time_limit: Option<Duration>,
}

const CRITERIA: [Criterion; 8] = [
    Criterion { id: 1, scenario: "oracle-equivalence", time_limit: Some(Duration::from_secs(60)) },
    Criterion { id: 2, scenario: "phi-constant", time_limit: Some(Duration::from_secs(30)) },
    Criterion { id: 3, scenario: "omega-trend", time_limit: Some(Duration::from_secs(120)) },
    Criterion { id: 4, scenario: "partition-gap", time_limit: None },
    Criterion { id: 5, scenario: "two-partition-ratios", time_limit: None },
    Criterion { id: 6, scenario: "ap-free", time_limit: None },
    Criterion { id: 7, scenario: "denseness", time_limit: Some(Duration::from_secs(300)) },
    Criterion { id: 8, scenario: "closure", time_limit: None },
];

fn line(id: u32, name: &str, passed: bool, detail: &str) {
    println!("criterion {id} {name}: {} ({detail})", if passed { "PASS" } else { "FAIL" });
}

fn main() -> ExitCode {
    let mut all_passed = true;
    let mut determinism = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let one = run_scenario(c.scenario, &ScenarioOptions { workers: 1, seed: DEFAULT_SEED });
        let elapsed = start.elapsed();
        let four = run_scenario(c.scenario, &ScenarioOptions { workers: 4, seed: DEFAULT_SEED });
        let (one, four): (ScenarioOutcome, ScenarioOutcome) = match (one, four) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                line(c.id, c.scenario, false, &format!("error: {e}"));
                all_passed = false;
                continue;
            }
        };
        let in_time = c.time_limit.is_none_or(|limit| elapsed < limit);
        let passed = one.passed() && in_time;
        let timing = match c.time_limit {
            Some(limit) => format!("{:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()),
            None => format!("{:.1}s", elapsed.as_secs_f64()),
        };
        let failed: Vec<&str> = one.checks.iter().filter(|k| !k.passed).map(|k| k.name.as_str()).collect();
        let detail = if failed.is_empty() {
            format!("{} checks, {timing}", one.checks.len())
        } else {
            format!("failed checks: {}; {timing}", failed.join(", "))
        };
        line(c.id, c.scenario, passed, &detail);
        for k in &one.checks {
            println!("    {} {}: {}", if k.passed { "ok  " } else { "FAIL" }, k.name, k.detail);
        }
        all_passed &= passed;
        determinism.push((c.scenario, one.artifacts.len(), one.artifacts == four.artifacts));
    }
    let identical = determinism.iter().all(|d| d.2);
    let differing: Vec<&str> = determinism.iter().filter(|d| !d.2).map(|d| d.0).collect();
    line(
        9,
        "determinism",
        identical && determinism.len() == CRITERIA.len(),
        &if differing.is_empty() {
            format!("{} scenarios byte-identical with 1 and 4 workers", determinism.len())
        } else {
            format!("artifacts differ for: {}", differing.join(", "))
        },
    );
    all_passed &= identical;
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
