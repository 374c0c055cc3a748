//! Hand-assembled documents for unit tests. Offsets are computed here, not
//! by the fixture writer, so the writer can be tested against them.

use crate::revisions::{build_revision_chain, Document};

/// Serializes numbered objects (1-based, object 1 the catalog) into a
/// single-revision file.
pub fn assemble(objects: &[String]) -> Vec<u8> {
    let mut out = b"%PDF-1.7\n".to_vec();
    let mut offsets = Vec::new();
    for (i, body) in objects.iter().enumerate() {
        offsets.push(out.len());
        out.extend_from_slice(format!("{} 0 obj\n", i + 1).as_bytes());
        out.extend_from_slice(body.as_bytes());
        out.extend_from_slice(b"\nendobj\n");
    }
    let xref = out.len();
    out.extend_from_slice(format!("xref\n0 {}\n0000000000 65535 f\r\n", objects.len() + 1).as_bytes());
    for off in offsets {
        out.extend_from_slice(format!("{off:010} 00000 n\r\n").as_bytes());
    }
    out.extend_from_slice(
        format!("trailer\n<</Size {} /Root 1 0 R>>\nstartxref\n{xref}\n%%EOF\n", objects.len() + 1).as_bytes(),
    );
    out
}

pub fn stream(dict_extra: &str, data: &[u8]) -> String {
    format!(
        "<<{dict_extra} /Length {}>>\nstream\n{}\nendstream",
        data.len(),
        String::from_utf8_lossy(data)
    )
}

/// One page with the given content and inline resource dictionary.
pub fn one_page(content: &str, resources: &str) -> Document {
    let objects = vec![
        "<</Type /Catalog /Pages 2 0 R>>".to_string(),
        "<</Type /Pages /Kids [3 0 R] /Count 1>>".to_string(),
        format!("<</Type /Page /Parent 2 0 R /Contents 4 0 R /Resources {resources}>>"),
        stream("", content.as_bytes()),
    ];
    build_revision_chain(assemble(&objects)).unwrap()
}

/// One page whose font /F2 is an Identity-H composite font with the given
/// ToUnicode CMap body.
pub fn one_page_with_cmap(content: &str, cmap: &str) -> Document {
    let objects = vec![
        "<</Type /Catalog /Pages 2 0 R>>".to_string(),
        "<</Type /Pages /Kids [3 0 R] /Count 1>>".to_string(),
        "<</Type /Page /Parent 2 0 R /Contents 4 0 R /Resources <</Font <</F2 5 0 R>>>>>>".to_string(),
        stream("", content.as_bytes()),
        "<</Type /Font /Subtype /Type0 /BaseFont /X /Encoding /Identity-H /ToUnicode 6 0 R>>".to_string(),
        stream("", cmap.as_bytes()),
    ];
    build_revision_chain(assemble(&objects)).unwrap()
}
