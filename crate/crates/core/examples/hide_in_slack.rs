//! Splices a payload into the first revision block, between two objects,
//! and shifts every recorded offset so all revisions still read the same.
//!
//! ```text
//! cargo run --example hide_in_slack [FILE.pdf [PAYLOAD]]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::extract::extract_text;
use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
use pdfresidue::stego::{extract_payload, hide_in_slack};
use pdfresidue::build_revision_chain;

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let (v0, _) = write_pdf(&[PageSpec::text(&["v1 text"])], &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["v2 text"]));
    Ok(incremental_save(&v0, &script)?.0)
}

fn texts(bytes: &[u8]) -> Result<Vec<Vec<String>>, Box<dyn Error>> {
    let doc = build_revision_chain(bytes.to_vec())?;
    let mut out = Vec::new();
    for rev in 0..doc.revision_count() {
        out.push(extract_text(&doc, rev)?.into_iter().map(|p| p.joined).collect());
    }
    Ok(out)
}

pub fn run(input: Option<&Path>, payload: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let secret = match payload {
        Some(p) => std::fs::read(p)?,
        None => (0..4096u32).map(|i| (i.wrapping_mul(2_654_435_761) >> 24) as u8).collect(),
    };
    let hidden = hide_in_slack(&bytes, &secret, None)?;
    println!("{} -> {} bytes, locator {}", bytes.len(), hidden.bytes.len(), hidden.locator);
    println!("every revision reads the same: {}", texts(&bytes)? == texts(&hidden.bytes)?);
    let back = extract_payload(&hidden.bytes, &hidden.locator)?;
    println!("recovered {} bytes, identical: {}", back.len(), back == secret);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args_os().skip(1).map(PathBuf::from);
    let input = args.next();
    let payload = args.next();
    run(input.as_deref(), payload.as_deref())
}
