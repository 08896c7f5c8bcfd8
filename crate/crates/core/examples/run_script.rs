//! Running a script from the bundled corpus, or a file given on the command line.

use tangentia::corpus;
use tangentia::script::{run_source, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let src = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => corpus::source("drensky-exp").unwrap().to_string(),
    };
    let report = run_source(&src, &RunOptions::default())?;
    print!("{}", report.render_text());
    println!();
    print!("{}", report.render_json());
    Ok(())
}
