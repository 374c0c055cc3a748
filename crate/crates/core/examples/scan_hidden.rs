//! Scans a file for places data could be hiding: unaccounted bytes,
//! superseded streams nothing references, and objects outside every
//! cross-reference section. Entropy is printed to help judge each one.
//!
//! ```text
//! cargo run --example scan_hidden [FILE.pdf]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
use pdfresidue::stego::{detect_hidden_in_bytes, hide_in_slack, hide_superseded};

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let (v0, _) = write_pdf(&[PageSpec::text(&["cover letter"])], &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["cover letter, signed"]));
    let (v1, _) = incremental_save(&v0, &script)?;
    let planted = hide_in_slack(&v1, b"slack: account 0042-7781, pin in the usual place", None)?;
    Ok(hide_superseded(&planted.bytes, b"stream: second half of the message")?.bytes)
}

pub fn run(input: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let report = detect_hidden_in_bytes(&bytes);
    if report.candidates.is_empty() {
        println!("nothing found");
    }
    for c in &report.candidates {
        println!("{:?} {} ({:.2} bits/byte)", c.reason, c.locator, c.entropy);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(std::env::args_os().nth(1).map(PathBuf::from).as_deref())
}
