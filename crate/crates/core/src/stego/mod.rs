//! Planting and finding data that the normal reading of a file never shows.
//!
//! Two carriers are supported. A *superseded stream* is an object written
//! by one update and replaced by the next, so only the revision history
//! still refers to it. *Slack* is a run of bytes spliced between two
//! structures of an older revision block, with every offset after it
//! relocated so that all revisions still resolve exactly as before.

mod detect;
mod slack;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::cos::{parse_indirect_object, ByteSpan, CosValue, Dict, ObjectId};
use crate::error::{Error, Result};
use crate::filters::{decode_stream, FilterName};
use crate::fixture::writer::{BlockWriter, Body};
use crate::fixture::{next_free_number, ObjectRole};
use crate::revisions::{build_revision_chain, Document};

pub use detect::{detect_hidden, detect_hidden_in_bytes, shannon_entropy, CandidateReason, HiddenCandidate, HiddenRegionReport};
pub use slack::{default_insertion_point, hide_in_slack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    SupersededStream,
    Slack,
}

impl Technique {
    pub fn label(self) -> &'static str {
        match self {
            Technique::SupersededStream => "superseded",
            Technique::Slack => "slack",
        }
    }
}

/// Where a payload lives. The text form is `superseded:OFFSET:LENGTH:N.G`
/// or `slack:OFFSET:LENGTH`; for a superseded stream the span is the whole
/// carrier object, for slack it is exactly the payload bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HiddenLocator {
    pub technique: Technique,
    pub span: ByteSpan,
    pub object_id: Option<ObjectId>,
}

impl fmt::Display for HiddenLocator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.technique.label(), self.span.start, self.span.len)?;
        if let Some(id) = self.object_id {
            write!(f, ":{}.{}", id.number, id.generation)?;
        }
        Ok(())
    }
}

impl FromStr for HiddenLocator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLocator(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let technique = match parts.first() {
            Some(&"superseded") => Technique::SupersededStream,
            Some(&"slack") => Technique::Slack,
            _ => return Err(bad()),
        };
        let number = |p: Option<&&str>| p.and_then(|v| v.parse::<usize>().ok()).ok_or_else(bad);
        let span = ByteSpan::new(number(parts.get(1))?, number(parts.get(2))?);
        let object_id = match (technique, parts.get(3)) {
            (_, None) => None,
            (Technique::SupersededStream, Some(id)) => {
                let (n, g) = id.split_once('.').ok_or_else(bad)?;
                Some(ObjectId::new(n.parse().map_err(|_| bad())?, g.parse().map_err(|_| bad())?))
            }
            (Technique::Slack, Some(_)) => return Err(bad()),
        };
        if parts.len() > 4 {
            return Err(bad());
        }
        Ok(HiddenLocator { technique, span, object_id })
    }
}

impl Serialize for HiddenLocator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone)]
pub struct HideResult {
    pub bytes: Vec<u8>,
    pub locator: HiddenLocator,
}

const CARRIER_FILTERS: &[FilterName] = &[FilterName::FlateDecode, FilterName::Ascii85Decode];

fn carrier_dict() -> Dict {
    let mut d = Dict::new();
    d.insert("Type", CosValue::name("Metadata"));
    d.insert("Subtype", CosValue::name("XML"));
    d
}

/// Appends two updates: the first adds a compressed stream holding
/// `payload`, the second replaces that object with an empty stream. The
/// final revision never reaches the payload; only the history does.
///
/// The payload goes through ASCII85 before Flate. Deflate falls back to
/// stored blocks for short or incompressible input, which would leave the
/// plain bytes readable; the 85-symbol alphabet always Huffman-codes.
pub fn hide_superseded(bytes: &[u8], payload: &[u8]) -> Result<HideResult> {
    let doc = build_revision_chain(bytes.to_vec())?;
    let last = doc.last_revision();
    let xref_stream = doc.revisions()[last].is_xref_stream();
    let trailer_base = || {
        let mut t = Dict::new();
        for key in ["Root", "Info"] {
            if let Some(v) = doc.trailer_entry(last, key) {
                t.insert(key, v.clone());
            }
        }
        t
    };

    let mut w = BlockWriter::new(bytes.to_vec(), doc.revision_count(), next_free_number(&doc, last));
    let id = w.allocate();
    w.object(id, ObjectRole::Carrier, Body::stream(carrier_dict(), CARRIER_FILTERS, payload.to_vec())?);
    let mut trailer = trailer_base();
    trailer.insert("Prev", CosValue::Integer(doc.revisions()[last].trailer.startxref_value as i64));
    let (with_payload, m1) = w.finish(trailer, xref_stream, false)?;
    let span = m1.objects[0].span;

    let mut w = BlockWriter::new(with_payload, doc.revision_count() + 1, id.number + 1);
    w.object(id, ObjectRole::Carrier, Body::RawStream { dict: carrier_dict(), raw: Vec::new(), payload: Some(Vec::new()) });
    let mut trailer = trailer_base();
    trailer.insert("Prev", CosValue::Integer(m1.xref_offset as i64));
    let (out, _) = w.finish(trailer, xref_stream, false)?;

    Ok(HideResult {
        bytes: out,
        locator: HiddenLocator { technique: Technique::SupersededStream, span, object_id: Some(id) },
    })
}

/// Reads back the payload a locator points at.
pub fn extract_payload(bytes: &[u8], locator: &HiddenLocator) -> Result<Vec<u8>> {
    let span = locator.span;
    if span.end() > bytes.len() {
        return Err(Error::LocatorOutOfRange(format!("{locator} ends past the file length {}", bytes.len())));
    }
    match locator.technique {
        Technique::Slack => Ok(bytes[span.range()].to_vec()),
        Technique::SupersededStream => {
            let obj = parse_indirect_object(bytes, span.start, None)
                .map_err(|e| Error::LocatorOutOfRange(format!("no object at {}: {e}", span.start)))?;
            if obj.span != span {
                return Err(Error::LocatorOutOfRange(format!(
                    "object at {} spans {} bytes, locator says {}",
                    span.start, obj.span.len, span.len
                )));
            }
            if let Some(id) = locator.object_id {
                if id != obj.id {
                    return Err(Error::LocatorOutOfRange(format!("object at {} is {}, not {id}", span.start, obj.id)));
                }
            }
            let CosValue::Stream(stream) = &obj.value else {
                return Err(Error::LocatorOutOfRange(format!("object {} is not a stream", obj.id)));
            };
            Ok(decode_stream(bytes, stream, &|_| None)?.data)
        }
    }
}

/// Checks that `after` presents every revision exactly as `before` does.
/// Cross-reference streams are skipped since relocation rewrites them.
pub(crate) fn audit_equivalent(before: &Document, after_bytes: &[u8]) -> Result<Document> {
    let after = build_revision_chain(after_bytes.to_vec())
        .map_err(|e| Error::AuditFailed(format!("output does not parse: {e}")))?;
    if after.revision_count() != before.revision_count() {
        return Err(Error::AuditFailed(format!(
            "revision count changed from {} to {}",
            before.revision_count(),
            after.revision_count()
        )));
    }
    for rev in 0..before.revision_count() {
        let (va, vb) = (before.view(rev)?, after.view(rev)?);
        if va.len() != vb.len() || va.keys().ne(vb.keys()) {
            return Err(Error::AuditFailed(format!("revision {rev}: object numbers differ")));
        }
        for (num, ve) in va {
            let other = &vb[num];
            if ve.entry.in_use != other.entry.in_use || ve.entry.generation != other.entry.generation {
                return Err(Error::AuditFailed(format!("revision {rev}: entry for object {num} differs")));
            }
            if !ve.entry.in_use {
                continue;
            }
            let a = before.resolve_object(rev, ve.entry.id());
            let b = after.resolve_object(rev, other.entry.id());
            let same = match (&a, &b) {
                (Ok(a), Ok(b)) => same_value(before.bytes(), &a.value, after.bytes(), &b.value),
                (Err(_), Err(_)) => true,
                _ => false,
            };
            if !same {
                return Err(Error::AuditFailed(format!("revision {rev}: object {num} resolves differently")));
            }
        }
    }
    Ok(after)
}

fn same_value(fa: &[u8], a: &CosValue, fb: &[u8], b: &CosValue) -> bool {
    match (a, b) {
        (CosValue::Stream(x), CosValue::Stream(y)) => {
            if x.dict.has_type("XRef") && y.dict.has_type("XRef") {
                return true;
            }
            x.dict == y.dict && x.raw.slice(fa) == y.raw.slice(fb)
        }
        _ => a == b,
    }
}
