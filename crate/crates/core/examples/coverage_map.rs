//! Classifies every byte of a file and prints the regions no structure
//! accounts for. Works on damaged files too, by carving objects.
//!
//! ```text
//! cargo run --example coverage_map [FILE.pdf]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
use pdfresidue::residual::{coverage_map_of_bytes, SpanKind};
use pdfresidue::stego::hide_in_slack;

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let (v0, _) = write_pdf(&[PageSpec::text(&["a"]), PageSpec::text(&["b"])], &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["A"]));
    let (v1, _) = incremental_save(&v0, &script)?;
    Ok(hide_in_slack(&v1, b"these bytes are not referenced by anything", None)?.bytes)
}

pub fn run(input: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let map = coverage_map_of_bytes(&bytes);
    let mut totals = std::collections::BTreeMap::new();
    for s in &map.spans {
        *totals.entry(format!("{:?}", s.class)).or_insert(0usize) += s.span.len;
    }
    for (class, n) in &totals {
        println!("{class:>14}: {n} bytes");
    }
    for s in map.spans.iter().filter(|s| s.class == SpanKind::Unaccounted) {
        let preview: String = bytes[s.span.range()].iter().take(48).map(|&b| if b.is_ascii_graphic() || b == b' ' { b as char } else { '.' }).collect();
        println!("unaccounted {}..{}: {preview}", s.span.start, s.span.end());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(std::env::args_os().nth(1).map(PathBuf::from).as_deref())
}
