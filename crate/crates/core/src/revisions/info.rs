use std::collections::BTreeMap;

use serde::Serialize;

use super::Document;
use crate::cos::CosValue;
use crate::extract::decode_text_string;

/// The document-information keys reported per revision.
pub const INFO_KEYS: [&str; 7] = [
    "Title",
    "Author",
    "Subject",
    "Creator",
    "Producer",
    "CreationDate",
    "ModDate",
];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InfoMetadata {
    pub entries: BTreeMap<String, String>,
    /// Why `/Info` could not be read, when it could not.
    pub notes: Vec<String>,
}

/// Reads the `/Info` dictionary as of revision `rev`.
pub fn extract_info(doc: &Document, rev: usize) -> InfoMetadata {
    let mut out = InfoMetadata::default();
    if let Err(e) = doc.check_rev(rev) {
        out.notes.push(e.to_string());
        return out;
    }
    let Some(info) = doc.trailer_entry(rev, "Info") else {
        return out;
    };
    let dict = match doc.deref(rev, info) {
        CosValue::Dict(d) => d,
        CosValue::Null => {
            out.notes.push(format!("/Info {} does not resolve", DisplayValue(info)));
            return out;
        }
        _ => {
            out.notes.push("/Info is not a dictionary".into());
            return out;
        }
    };
    for key in INFO_KEYS {
        let Some(value) = dict.get(key) else { continue };
        match doc.deref(rev, value) {
            CosValue::String(s) => {
                out.entries.insert(key.to_string(), decode_text_string(&s.bytes));
            }
            CosValue::Name(n) => {
                out.entries.insert(key.to_string(), n.to_string_lossy());
            }
            _ => out.notes.push(format!("/{key} is not a string")),
        }
    }
    out
}

struct DisplayValue<'a>(&'a CosValue);

impl std::fmt::Display for DisplayValue<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0.to_bytes()))
    }
}
