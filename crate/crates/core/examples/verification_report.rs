//! Running a suite programmatically and rendering the report.

use hrep::harness::{run_suite, Format, Suite, SuiteConfig};

fn main() -> hrep::Result<()> {
    let cfg =
        SuiteConfig { suite: Suite::MainTheorem, g: 1, h: 1, t: Some(vec![vec![4]]), seed: 5, ..Default::default() };
    let report = run_suite(&cfg)?;
    print!("{}", report.render(Format::Text));

    let skipped = run_suite(&SuiteConfig { t: Some(vec![vec![3]]), ..cfg })?;
    println!("\nT = [[3]]: {} passed, {} skipped", skipped.summary.passed, skipped.summary.skipped);
    Ok(())
}
