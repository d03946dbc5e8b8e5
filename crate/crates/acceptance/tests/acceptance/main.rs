//! Runs every acceptance criterion and prints one PASS/FAIL line each.

mod formats;
mod session;
mod sim;

use taskforge_acceptance::report::Report;

fn main() {
    let mut report = Report::default();
    report.run("determinism: 10 scripted case-study runs share one digest in under 10 s", sim::determinism);
    report.run("oracle: 81 single-tower scenarios agree with the 1 ms scalar model", sim::oracle_grid);
    report.run("economy: 1000 random command sequences conserve gold at every tick", sim::economy_fuzz);
    report.run("format: planning excerpt parses and reserializes exactly", formats::excerpt);
    report
        .run("shape: case-study gives 9 results, growing spawn points, attack edits refused, q10 text", session::shape);
    report.run("effects: slow, fear, support and discount hold over 200 scenarios each", sim::effects);
    report.run("protocol: 4 bots over sockets, replayed digest, one winner of a cell race", session::protocol);
    report.run("telemetry: offline file and dead letter agree, online batches arrive in order", formats::telemetry);
    report.run("analysis: unspent gold and heatmap mass match 5 generated sessions", session::analysis_replay);
    let failed = report.failures();
    println!("{} passed, {failed} failed", report.lines.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
