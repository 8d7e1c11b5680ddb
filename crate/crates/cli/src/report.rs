use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    library_version: &'a str,
    config: &'a C,
    /// The only field that differs between identical runs.
    wall_time_s: f64,
    passed: bool,
    results: &'a R,
}

/// Writes `<out>/<command>.json` and prints a one-line verdict.
pub fn write<C: Serialize, R: Serialize>(
    out: &Path,
    command: &str,
    config: &C,
    started: Instant,
    passed: bool,
    results: &R,
) -> anyhow::Result<()> {
    let report = Report {
        command,
        version: env!("CARGO_PKG_VERSION"),
        library_version: kraus_landscape::VERSION,
        config,
        wall_time_s: started.elapsed().as_secs_f64(),
        passed,
        results,
    };
    let path = out.join(format!("{command}.json"));
    write_json(&path, &report)?;
    println!(
        "{command}: {} (report: {})",
        if passed { "PASS" } else { "FAIL" },
        path.display()
    );
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
