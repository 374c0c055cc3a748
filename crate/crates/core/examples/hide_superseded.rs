//! Hides a payload in a compressed stream that a second update immediately
//! replaces, then reads it back. The final revision shows nothing new and
//! the payload never appears in the file as plain text.
//!
//! ```text
//! cargo run --example hide_superseded [FILE.pdf [PAYLOAD]]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::extract::extract_text;
use pdfresidue::fixture::{write_pdf, PageSpec, WriteOptions};
use pdfresidue::stego::{extract_payload, hide_superseded};
use pdfresidue::build_revision_chain;

pub fn run(input: Option<&Path>, payload: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => write_pdf(&[PageSpec::text(&["An ordinary page"])], &WriteOptions::default())?.0,
    };
    let secret = match payload {
        Some(p) => std::fs::read(p)?,
        None => b"the meeting moved to the north entrance".repeat(4),
    };
    let hidden = hide_superseded(&bytes, &secret)?;
    println!("{} -> {} bytes, locator {}", bytes.len(), hidden.bytes.len(), hidden.locator);

    let doc = build_revision_chain(hidden.bytes.clone())?;
    let text: Vec<String> = extract_text(&doc, doc.last_revision())?.into_iter().map(|p| p.joined).collect();
    println!("final revision still reads {text:?}");
    let plain = memchr::memmem::find(&hidden.bytes, &secret[..secret.len().min(16)]).is_some();
    println!("payload visible as plain bytes: {plain}");

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
