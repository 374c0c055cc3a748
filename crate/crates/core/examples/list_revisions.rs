//! Enumerates the revisions of a file: where each block lives, what its
//! cross-reference section lists and its document information.
//!
//! ```text
//! cargo run --example list_revisions [FILE.pdf]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
use pdfresidue::revisions::extract_info;
use pdfresidue::build_revision_chain;

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let (v0, _) = write_pdf(&[PageSpec::text(&["draft"])], &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.info_updates.insert("Title".into(), "Quarterly report".into());
    script.page_edits.insert(0, PageSpec::text(&["final"]));
    Ok(incremental_save(&v0, &script)?.0)
}

pub fn run(input: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let doc = build_revision_chain(bytes)?;
    println!("{} bytes, PDF {}, {} revision(s)", doc.len(), doc.header_version(), doc.revision_count());
    for rev in doc.revisions() {
        let listed = rev.xref.entries().count();
        let kind = if rev.is_xref_stream() { "xref stream" } else { "xref table" };
        println!(
            "revision {}: bytes {}..{}, {kind} at {} listing {listed} object(s)",
            rev.index,
            rev.block_span.start,
            rev.block_span.end(),
            rev.xref.offset
        );
        for (key, value) in extract_info(&doc, rev.index).entries {
            println!("    {key}: {value}");
        }
    }
    for a in doc.anomalies() {
        println!("anomaly: {a}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(std::env::args_os().nth(1).map(PathBuf::from).as_deref())
}
