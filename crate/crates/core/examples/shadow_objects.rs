//! Lists the object versions that later saves superseded but left in the
//! file, then compares the first and last revision.
//!
//! ```text
//! cargo run --example shadow_objects [FILE.pdf]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
use pdfresidue::residual::{diff_revisions, shadow_objects};
use pdfresidue::build_revision_chain;

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let pages: Vec<PageSpec> = ["one", "two", "three"].iter().map(|t| PageSpec::text(&[t])).collect();
    let (v0, _) = write_pdf(&pages, &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["ONE"]));
    script.page_edits.insert(1, PageSpec::text(&["TWO"]));
    Ok(incremental_save(&v0, &script)?.0)
}

pub fn run(input: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let doc = build_revision_chain(bytes)?;
    let shadows = shadow_objects(&doc);
    println!("{} shadow object(s)", shadows.len());
    for s in &shadows {
        println!(
            "  object {} ({:?}): revision {} at {}..{} replaced in revision {}",
            s.object_number,
            s.kind,
            s.superseded_revision,
            s.old_span.start,
            s.old_span.end(),
            s.superseding_revision
        );
    }
    if doc.revision_count() > 1 {
        let diff = diff_revisions(&doc, 0, doc.last_revision())?;
        for change in &diff.changes {
            println!(
                "page {}: {:?} -> {:?}",
                change.page_index,
                change.text_before.as_deref().unwrap_or(""),
                change.text_after.as_deref().unwrap_or("")
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(std::env::args_os().nth(1).map(PathBuf::from).as_deref())
}
