//! Builds the three-page document, edits its first two pages with an
//! incremental save, and writes both files plus the manifest.
//!
//! ```text
//! cargo run --example write_fixture [OUT_DIR]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};

pub fn run(out_dir: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| std::env::temp_dir().join("pdfresidue-examples"));
    std::fs::create_dir_all(&dir)?;

    let pages: Vec<PageSpec> =
        ["First page", "Second page", "Third page"].iter().map(|t| PageSpec::text(&[t])).collect();
    let (original, m0) = write_pdf(&pages, &WriteOptions::default())?;

    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["First page, revised"]));
    script.page_edits.insert(1, PageSpec::text(&["Second page, revised"]));
    let (modified, m1) = incremental_save(&original, &script)?;

    std::fs::write(dir.join("original.pdf"), &original)?;
    std::fs::write(dir.join("modified.pdf"), &modified)?;
    std::fs::write(dir.join("modified.manifest.json"), serde_json::to_string_pretty(&[&m0, &m1])?)?;

    println!("original: {} bytes, {} objects", original.len(), m0.objects.len());
    println!("modified: {} bytes, {} objects in the added block", modified.len(), m1.objects.len());
    for obj in &m1.objects {
        println!("  {} {:?} at {}..{}", obj.id, obj.role, obj.span.start, obj.span.end());
    }
    println!("written to {}", dir.display());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(std::env::args_os().nth(1).map(PathBuf::from).as_deref())
}
