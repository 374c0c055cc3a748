//! Prints the text of every page as of every revision, so earlier wording
//! can be read from the modified file alone.
//!
//! ```text
//! cargo run --example revision_text [FILE.pdf]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::extract::extract_text;
use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, TextSpec, WriteOptions};
use pdfresidue::build_revision_chain;

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let pages = vec![
        PageSpec::text(&["Meeting at 10:00", "Room 4"]),
        PageSpec { texts: vec![TextSpec::unicode("회의는 취소되었습니다")], images: vec![] },
    ];
    let (v0, _) = write_pdf(&pages, &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["Meeting at 11:30", "Room 7"]));
    script.page_edits.insert(1, PageSpec { texts: vec![TextSpec::unicode("회의는 예정대로 진행됩니다")], images: vec![] });
    Ok(incremental_save(&v0, &script)?.0)
}

pub fn run(input: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let doc = build_revision_chain(bytes)?;
    for rev in 0..doc.revision_count() {
        println!("== revision {rev}");
        for page in extract_text(&doc, rev)? {
            println!("-- page {}", page.page_index);
            println!("{}", page.joined);
            if let Some(e) = page.error {
                println!("   (unreadable: {e})");
            }
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(std::env::args_os().nth(1).map(PathBuf::from).as_deref())
}
