//! Extracts the images of every revision. JPEG data comes out exactly as it
//! was embedded, including pictures a later save replaced.
//!
//! ```text
//! cargo run --example revision_images [FILE.pdf [OUT_DIR]]
//! ```

use std::error::Error;
use std::path::{Path, PathBuf};

use pdfresidue::extract::extract_images;
use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, ImageKind, ImageSpec, PageSpec, WriteOptions};
use pdfresidue::build_revision_chain;

/// The smallest byte sequence the writer accepts as a JPEG.
fn jpeg(tag: u8) -> Vec<u8> {
    vec![0xFF, 0xD8, 0xFF, 0xE0, 0x00, 0x10, b'J', b'F', b'I', b'F', 0x00, 0x01, 0x01, tag, 0xFF, 0xD9]
}

fn sample() -> Result<Vec<u8>, Box<dyn Error>> {
    let photo = |tag| PageSpec {
        texts: vec![],
        images: vec![ImageSpec { format: ImageKind::Jpeg, payload: jpeg(tag), width: 1, height: 1 }],
    };
    let (v0, _) = write_pdf(&[photo(1)], &WriteOptions::default())?;
    let mut script = EditScript::default();
    script.page_edits.insert(0, photo(2));
    Ok(incremental_save(&v0, &script)?.0)
}

pub fn run(input: Option<&Path>, out_dir: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let bytes = match input {
        Some(p) => std::fs::read(p)?,
        None => sample()?,
    };
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| std::env::temp_dir().join("pdfresidue-examples"));
    std::fs::create_dir_all(&dir)?;
    let doc = build_revision_chain(bytes)?;
    for rev in 0..doc.revision_count() {
        let found = extract_images(&doc, rev)?;
        for img in &found.images {
            let name = format!("rev{rev}_page{}_obj{}.{}", img.page_index, img.object_id.number, img.format.extension());
            std::fs::write(dir.join(&name), &img.payload)?;
            println!("revision {rev}: {name} {}x{} ({} bytes)", img.width, img.height, img.payload.len());
        }
        for e in &found.errors {
            println!("revision {rev}: page {} object {}: {}", e.page_index, e.object_id, e.message);
        }
    }
    println!("written to {}", dir.display());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args_os().skip(1).map(PathBuf::from);
    let input = args.next();
    let out = args.next();
    run(input.as_deref(), out.as_deref())
}
