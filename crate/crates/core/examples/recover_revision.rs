//! Recovers the first revision of a modified file both ways: by cutting
//! the file after that revision, and by rewriting the last cross-reference
//! table in place so the file keeps its size but shows the old content.
//!
//! ```text
//! cargo run --example recover_revision [FILE.pdf [REV]]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::extract::extract_text;
use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
use pdfresidue::recover::{recover, RecoveryMethod};
use pdfresidue::build_revision_chain;

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let pages: Vec<PageSpec> = ["one", "two", "three"].iter().map(|t| PageSpec::text(&[t])).collect();
    let (v0, _) = write_pdf(&pages, &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["ONE"]));
    script.page_edits.insert(1, PageSpec::text(&["TWO"]));
    Ok(incremental_save(&v0, &script)?.0)
}

pub fn run(input: Option<&Path>, rev: usize) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let doc = build_revision_chain(bytes)?;
    println!("input: {} bytes, {} revisions", doc.len(), doc.revision_count());

    for method in [RecoveryMethod::Truncate, RecoveryMethod::OffsetRewrite] {
        match recover(&doc, rev, method) {
            Ok(r) => {
                let recovered = build_revision_chain(r.bytes.clone())?;
                let pages: Vec<String> =
                    extract_text(&recovered, recovered.last_revision())?.into_iter().map(|p| p.joined).collect();
                println!(
                    "{}: {} bytes, {} line(s) rewritten, pages {:?}",
                    method.label(),
                    r.bytes.len(),
                    r.rewritten.len(),
                    pages
                );
                for a in r.anomalies {
                    println!("    note: {a}");
                }
            }
            Err(e) => println!("{}: {e}", method.label()),
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args_os().skip(1);
    let input = args.next().map(PathBuf::from);
    let rev = args.next().and_then(|s| s.to_str()?.parse().ok()).unwrap_or(0);
    run(input.as_deref(), rev)
}
