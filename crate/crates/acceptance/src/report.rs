use std::time::Instant;

/// Collects one PASS/FAIL line per criterion.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<(String, Result<(), String>)>,
}

impl Report {
    /// Runs `check`, prints its line at once and keeps it for the summary.
    pub fn run(&mut self, name: &str, check: impl FnOnce() -> Result<(), String>) {
        let started = Instant::now();
        let outcome = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(panic) => Err(panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = started.elapsed().as_secs_f64();
        match &outcome {
            Ok(()) => println!("PASS {name} ({secs:.2}s)"),
            Err(why) => println!("FAIL {name}: {why}"),
        }
        self.lines.push((name.to_string(), outcome));
    }

    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|(_, r)| r.is_err()).count()
    }
}

/// `Err(msg)` unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
