use serde::Serialize;

use crate::cos::{is_whitespace, scan_all_objects, ByteSpan, ObjectId};
use crate::revisions::{build_revision_chain, Document, XrefKind};

/// Longest run of whitespace between structures that is not suspicious.
pub const DEFAULT_WHITESPACE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpanKind {
    Header,
    ObjectBody,
    XrefTable,
    Trailer,
    StartxrefBlock,
    EofMarker,
    Whitespace,
    Unaccounted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanOwner {
    Object(ObjectId),
    Revision(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpanClass {
    pub span: ByteSpan,
    pub class: SpanKind,
    pub owner: Option<SpanOwner>,
}

/// Disjoint, sorted spans covering the whole file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoverageMap {
    pub spans: Vec<SpanClass>,
    pub unaccounted_bytes: usize,
}

impl CoverageMap {
    pub fn unaccounted(&self) -> impl Iterator<Item = &SpanClass> {
        self.spans.iter().filter(|s| s.class == SpanKind::Unaccounted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageOptions {
    pub whitespace_limit: usize,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions { whitespace_limit: DEFAULT_WHITESPACE_LIMIT }
    }
}

pub fn coverage_map(doc: &Document) -> CoverageMap {
    coverage_map_with(doc, CoverageOptions::default())
}

/// Classifies every byte of the file. Object bodies count only when some
/// revision's own cross-reference section points at them.
pub fn coverage_map_with(doc: &Document, options: CoverageOptions) -> CoverageMap {
    let bytes = doc.bytes();
    let mut known = Vec::new();
    if let Some(h) = doc.header_offset() {
        known.push(SpanClass { span: header_span(bytes, h), class: SpanKind::Header, owner: None });
    }
    for rev in doc.revisions() {
        let owner = Some(SpanOwner::Revision(rev.index));
        match rev.xref.kind {
            XrefKind::Table => {
                known.push(SpanClass { span: rev.xref.span, class: SpanKind::XrefTable, owner });
                known.push(SpanClass { span: rev.trailer.span, class: SpanKind::Trailer, owner });
            }
            XrefKind::Stream(_) => known.push(SpanClass { span: rev.xref.span, class: SpanKind::XrefTable, owner }),
        }
        if let Some(h) = &rev.hybrid {
            known.push(SpanClass { span: h.span, class: SpanKind::XrefTable, owner });
        }
        if let Some(m) = rev.startxref {
            let span = ByteSpan::from_range(m.keyword.start, m.value_span.end());
            known.push(SpanClass { span, class: SpanKind::StartxrefBlock, owner });
        }
        if let Some(eof) = rev.eof {
            known.push(SpanClass { span: eof, class: SpanKind::EofMarker, owner });
        }
        for entry in rev.entries.values() {
            if !entry.in_use || entry.compressed.is_some() {
                continue;
            }
            if let Ok(obj) = doc.parse_at(rev.index, entry.offset, entry.id()) {
                known.push(SpanClass {
                    span: obj.span,
                    class: SpanKind::ObjectBody,
                    owner: Some(SpanOwner::Object(obj.id)),
                });
            }
        }
    }
    assemble(bytes, known, options)
}

/// Like [`coverage_map`], but also works when no revision chain can be
/// built: carved objects are then the only known structures.
pub fn coverage_map_of_bytes(bytes: &[u8]) -> CoverageMap {
    if let Ok(doc) = build_revision_chain(bytes.to_vec()) {
        return coverage_map(&doc);
    }
    let mut known = Vec::new();
    if let Some(h) = memchr::memmem::find(&bytes[..bytes.len().min(1024)], b"%PDF-") {
        known.push(SpanClass { span: header_span(bytes, h), class: SpanKind::Header, owner: None });
    }
    for (id, span) in scan_all_objects(bytes).objects {
        known.push(SpanClass { span, class: SpanKind::ObjectBody, owner: Some(SpanOwner::Object(id)) });
    }
    assemble(bytes, known, CoverageOptions::default())
}

/// The `%PDF-x.y` line plus the binary-marker comment line that usually
/// follows it, without the final EOL.
fn header_span(bytes: &[u8], start: usize) -> ByteSpan {
    let line_end = |from: usize| {
        bytes[from..].iter().position(|&b| b == b'\n' || b == b'\r').map_or(bytes.len(), |p| from + p)
    };
    let skip_eol = |mut p: usize| {
        if bytes.get(p) == Some(&b'\r') {
            p += 1;
        }
        if bytes.get(p) == Some(&b'\n') {
            p += 1;
        }
        p
    };
    let mut end = line_end(start);
    let next = skip_eol(end);
    if bytes.get(next) == Some(&b'%') && !bytes[next..].starts_with(b"%%EOF") {
        end = line_end(next);
    }
    ByteSpan::from_range(start, end)
}

fn assemble(bytes: &[u8], mut known: Vec<SpanClass>, options: CoverageOptions) -> CoverageMap {
    known.retain(|s| s.span.len > 0 && s.span.end() <= bytes.len());
    known.sort_by_key(|s| (s.span.start, std::cmp::Reverse(s.span.len)));
    let mut out = CoverageMap::default();
    let mut cursor = 0;
    for mut s in known {
        if s.span.end() <= cursor {
            continue;
        }
        if s.span.start < cursor {
            s.span = ByteSpan::from_range(cursor, s.span.end());
        }
        gap(bytes, cursor, s.span.start, options, &mut out);
        cursor = s.span.end();
        out.spans.push(s);
    }
    gap(bytes, cursor, bytes.len(), options, &mut out);
    out.unaccounted_bytes = out.unaccounted().map(|s| s.span.len).sum();
    out
}

/// Classifies the bytes between two known structures. A short run of pure
/// whitespace is benign; otherwise the line ending right after the
/// preceding structure is split off and the rest is unaccounted.
fn gap(bytes: &[u8], start: usize, end: usize, options: CoverageOptions, out: &mut CoverageMap) {
    if start >= end {
        return;
    }
    let region = &bytes[start..end];
    let push = |out: &mut CoverageMap, a: usize, b: usize, class| {
        if a < b {
            out.spans.push(SpanClass { span: ByteSpan::from_range(a, b), class, owner: None });
        }
    };
    if region.len() <= options.whitespace_limit && region.iter().all(|&b| is_whitespace(b)) {
        push(out, start, end, SpanKind::Whitespace);
        return;
    }
    let eol = match region {
        [b'\r', b'\n', ..] => 2,
        [b'\n' | b'\r', ..] => 1,
        _ => 0,
    };
    push(out, start, start + eol, SpanKind::Whitespace);
    push(out, start + eol, end, SpanKind::Unaccounted);
}
