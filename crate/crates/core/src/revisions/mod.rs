//! The revision chain of an incrementally updated file.
//!
//! Every `Save` appends a block holding the changed objects, a new
//! cross-reference section and a trailer whose `/Prev` points at the
//! previous section. [`build_revision_chain`] walks that chain back from
//! the final `startxref` and turns each link into a [`Revision`]; a
//! revision's *resolution view* is the union of the sections up to it, with
//! later sections shadowing earlier ones.

mod info;
mod xref;

use std::collections::{BTreeMap, HashSet};

use memchr::memmem;
use serde::Serialize;

pub use info::{extract_info, InfoMetadata, INFO_KEYS};
pub use xref::{parse_startxref, parse_xref_at, STARTXREF_WINDOW};

use crate::cos::{
    lex_value, parse_indirect_object, ByteSpan, CosValue, Dict, IndirectObject, Lexer, ObjectId,
    Stream,
};
use crate::error::{Error, Result};
use crate::filters::{self, DecodedStream};

/// Where an object stored inside an object stream lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompressedLocation {
    pub stream_object: u32,
    pub index: u32,
}

/// One cross-reference entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XrefEntry {
    pub object_number: u32,
    /// Byte offset of `N G obj`; meaningful for in-use, uncompressed entries.
    pub offset: usize,
    pub generation: u16,
    pub in_use: bool,
    /// Set for objects stored in an object stream.
    pub compressed: Option<CompressedLocation>,
    /// The `oooooooooo ggggg n` text of a classic entry, without its EOL.
    pub line: Option<ByteSpan>,
}

impl XrefEntry {
    pub fn id(&self) -> ObjectId {
        ObjectId::new(self.object_number, self.generation)
    }

    /// Whether two entries send a reader to the same object instance.
    pub fn same_target(&self, other: &XrefEntry) -> bool {
        self.in_use == other.in_use
            && self.generation == other.generation
            && match (self.compressed, other.compressed) {
                (None, None) => !self.in_use || self.offset == other.offset,
                (a, b) => a == b,
            }
    }
}

/// Formats the 18 visible bytes of a classic entry line.
pub fn format_entry_line(offset: usize, generation: u16, in_use: bool) -> String {
    format!("{offset:010} {generation:05} {}", if in_use { 'n' } else { 'f' })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XrefKind {
    Table,
    /// A cross-reference stream; the id is the stream object's.
    Stream(ObjectId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XrefSubsection {
    pub first: u32,
    pub entries: Vec<XrefEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XrefSection {
    pub kind: XrefKind,
    /// The offset `startxref` or `/Prev` pointed at.
    pub offset: usize,
    pub subsections: Vec<XrefSubsection>,
    /// For tables, the `xref` keyword through the last entry line; for
    /// streams, the whole object.
    pub span: ByteSpan,
}

impl XrefSection {
    pub fn entries(&self) -> impl Iterator<Item = &XrefEntry> {
        self.subsections.iter().flat_map(|s| s.entries.iter())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trailer {
    pub dict: Dict,
    /// Offset of the section this trailer closes.
    pub startxref_value: usize,
    /// `trailer` keyword through `>>`; the whole object for xref streams.
    pub span: ByteSpan,
}

/// The `startxref` keyword and the number after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StartxrefMarker {
    pub keyword: ByteSpan,
    pub value_span: ByteSpan,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Revision {
    /// 0 is the original save.
    pub index: usize,
    pub xref: XrefSection,
    /// The cross-reference stream named by `/XRefStm` in a hybrid file.
    pub hybrid: Option<XrefSection>,
    pub trailer: Trailer,
    pub startxref: Option<StartxrefMarker>,
    /// The `%%EOF` marker closing this revision, without its EOL.
    pub eof: Option<ByteSpan>,
    /// The bytes this save appended.
    pub block_span: ByteSpan,
    /// File length as of this revision.
    pub cumulative_end: usize,
    /// Entries from this revision's own sections; the classic table wins
    /// over a hybrid stream.
    pub entries: BTreeMap<u32, XrefEntry>,
}

impl Revision {
    pub fn prev(&self) -> Option<i64> {
        self.trailer.dict.get_int("Prev")
    }

    pub fn is_xref_stream(&self) -> bool {
        matches!(self.xref.kind, XrefKind::Stream(_))
    }
}

/// An entry in a resolution view together with the revision that
/// contributed it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ViewEntry {
    pub revision: usize,
    pub entry: XrefEntry,
}

pub type ResolutionView = BTreeMap<u32, ViewEntry>;

#[derive(Debug, Clone, Copy, Default)]
pub struct ChainOptions {
    /// Build the chain even when a trailer carries `/Encrypt`. Strings and
    /// streams stay encrypted; only structure is usable.
    pub allow_encrypted: bool,
}

/// A parsed file: the byte image plus its revisions, oldest first.
#[derive(Debug, Clone)]
pub struct Document {
    bytes: Vec<u8>,
    header_version: String,
    header_offset: Option<usize>,
    revisions: Vec<Revision>,
    views: Vec<ResolutionView>,
    anomalies: Vec<String>,
    encrypted: bool,
}

/// Parses the file's revision chain. Refuses encrypted files.
pub fn build_revision_chain(bytes: impl Into<Vec<u8>>) -> Result<Document> {
    build_revision_chain_with(bytes, ChainOptions::default())
}

pub fn build_revision_chain_with(bytes: impl Into<Vec<u8>>, options: ChainOptions) -> Result<Document> {
    let bytes = bytes.into();
    let mut anomalies = Vec::new();
    let (header_offset, header_version) = find_header(&bytes);
    if header_offset.is_none() {
        anomalies.push("no %PDF- header in the first 1024 bytes".to_string());
    }

    let mut visited = HashSet::new();
    let mut chain = Vec::new();
    let mut encrypted = false;
    let mut next = Some(parse_startxref(&bytes)?);
    while let Some(offset) = next.take() {
        if !visited.insert(offset) {
            return Err(Error::PrevCycle { offset });
        }
        let (section, trailer) = parse_xref_at(&bytes, offset)?;
        let hybrid = match trailer.dict.get_int("XRefStm") {
            Some(at) => match usize::try_from(at).map(|at| parse_xref_at(&bytes, at)) {
                Ok(Ok((s, _))) if matches!(s.kind, XrefKind::Stream(_)) => Some(s),
                _ => {
                    anomalies.push(format!("/XRefStm {at} in trailer at byte {offset} is unreadable"));
                    None
                }
            },
            None => None,
        };
        encrypted |= trailer.dict.contains_key("Encrypt");
        if let Some(prev) = trailer.dict.get_int("Prev") {
            match usize::try_from(prev) {
                Ok(p) => {
                    if p >= offset {
                        anomalies.push(format!(
                            "/Prev {p} of the section at byte {offset} points forward"
                        ));
                    }
                    next = Some(p);
                }
                Err(_) => anomalies.push(format!("negative /Prev {prev} ignored")),
            }
        }
        chain.push((section, hybrid, trailer));
    }
    if encrypted && !options.allow_encrypted {
        return Err(Error::EncryptedDocument);
    }
    chain.reverse();

    let mut revisions: Vec<Revision> = chain
        .into_iter()
        .enumerate()
        .map(|(index, (xref, hybrid, trailer))| {
            let mut entries = BTreeMap::new();
            for e in hybrid.iter().flat_map(|h| h.entries()).chain(xref.entries()) {
                entries.insert(e.object_number, *e);
            }
            let after = match xref.kind {
                XrefKind::Table => trailer.span.end(),
                XrefKind::Stream(_) => xref.span.end(),
            };
            let startxref = find_startxref_marker(&bytes, after);
            Revision {
                index,
                xref,
                hybrid,
                trailer,
                startxref,
                eof: None,
                block_span: ByteSpan::default(),
                cumulative_end: 0,
                entries,
            }
        })
        .collect();

    split_blocks(&bytes, header_offset, &mut revisions, &mut anomalies);

    let mut views: Vec<ResolutionView> = Vec::with_capacity(revisions.len());
    for rev in &revisions {
        let mut view = views.last().cloned().unwrap_or_default();
        for (num, entry) in &rev.entries {
            view.insert(*num, ViewEntry { revision: rev.index, entry: *entry });
        }
        views.push(view);
    }

    let mut doc = Document {
        bytes,
        header_version,
        header_offset,
        revisions,
        views,
        anomalies,
        encrypted,
    };
    if !doc.encrypted {
        let found = doc.audit();
        doc.anomalies.extend(found);
    }
    Ok(doc)
}

fn find_header(bytes: &[u8]) -> (Option<usize>, String) {
    let window = &bytes[..bytes.len().min(1024)];
    match memmem::find(window, b"%PDF-") {
        Some(at) => {
            let version: String = bytes[at + 5..]
                .iter()
                .take_while(|b| b.is_ascii_digit() || **b == b'.')
                .take(8)
                .map(|&b| b as char)
                .collect();
            (Some(at), version)
        }
        None => (None, String::new()),
    }
}

fn find_startxref_marker(bytes: &[u8], after: usize) -> Option<StartxrefMarker> {
    let mut lx = Lexer::new(bytes, after);
    lx.skip_whitespace_only();
    if lx.peek_keyword() != b"startxref" {
        return None;
    }
    let keyword = ByteSpan::new(lx.pos, 9);
    lx.pos += 9;
    lx.skip_whitespace_only();
    let start = lx.pos;
    let value = lx.read_unsigned().and_then(|v| usize::try_from(v).ok())?;
    Some(StartxrefMarker {
        keyword,
        value_span: ByteSpan::from_range(start, lx.pos),
        value,
    })
}

/// Assigns each revision its `%%EOF` and block span.
fn split_blocks(
    bytes: &[u8],
    header_offset: Option<usize>,
    revisions: &mut [Revision],
    anomalies: &mut Vec<String>,
) {
    let count = revisions.len();
    // First byte each revision wrote: its lowest own object or its xref.
    let first_bytes: Vec<usize> = revisions
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let floor = if i == 0 { 0 } else { revisions[i - 1].trailer.span.end() };
            r.entries
                .values()
                .filter(|e| e.in_use && e.compressed.is_none() && e.offset >= floor)
                .map(|e| e.offset)
                .chain([r.xref.offset])
                .min()
                .unwrap_or(r.xref.offset)
        })
        .collect();

    let mut start = header_offset.unwrap_or(0);
    for i in 0..count {
        let rev = &revisions[i];
        let search_from = rev
            .startxref
            .map(|m| m.value_span.end())
            .unwrap_or(match rev.xref.kind {
                XrefKind::Table => rev.trailer.span.end(),
                XrefKind::Stream(_) => rev.xref.span.end(),
            });
        if rev.startxref.is_none() {
            anomalies.push(format!("revision {i} has no startxref after its trailer"));
        }
        let limit = if i + 1 < count {
            first_bytes[i + 1].max(search_from).min(bytes.len())
        } else {
            bytes.len()
        };
        let eof = bytes
            .get(search_from.min(limit)..limit)
            .and_then(|window| memmem::find(window, b"%%EOF"))
            .map(|at| ByteSpan::new(search_from + at, 5));
        let mut end = match eof {
            Some(marker) => {
                let mut lx = Lexer::new(bytes, marker.end());
                lx.skip_eol();
                lx.pos
            }
            None => {
                anomalies.push(format!("revision {i} has no %%EOF marker"));
                limit
            }
        };
        if i + 1 == count {
            end = bytes.len();
        }
        if end < start {
            anomalies.push(format!("revision {i} ends before revision {} does", i.saturating_sub(1)));
        }
        let rev = &mut revisions[i];
        rev.eof = eof;
        rev.block_span = ByteSpan::from_range(start.min(end), end);
        rev.cumulative_end = end;
        start = end;
    }
}

impl Document {
    /// Same as [`build_revision_chain`].
    pub fn parse(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        build_revision_chain(bytes)
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// The version from the `%PDF-x.y` header, or empty when missing.
    pub fn header_version(&self) -> &str {
        &self.header_version
    }

    /// Offset of the `%PDF-` header, when present.
    pub fn header_offset(&self) -> Option<usize> {
        self.header_offset
    }

    pub fn revisions(&self) -> &[Revision] {
        &self.revisions
    }

    pub fn revision(&self, rev: usize) -> Result<&Revision> {
        self.check_rev(rev)?;
        Ok(&self.revisions[rev])
    }

    pub fn revision_count(&self) -> usize {
        self.revisions.len()
    }

    pub fn last_revision(&self) -> usize {
        self.revisions.len() - 1
    }

    pub fn anomalies(&self) -> &[String] {
        &self.anomalies
    }

    pub fn is_encrypted(&self) -> bool {
        self.encrypted
    }

    pub fn check_rev(&self, rev: usize) -> Result<()> {
        if rev < self.revisions.len() {
            Ok(())
        } else {
            Err(Error::RevisionOutOfRange { rev, count: self.revisions.len() })
        }
    }

    /// The effective object table as of `rev`.
    pub fn view(&self, rev: usize) -> Result<&ResolutionView> {
        self.check_rev(rev)?;
        Ok(&self.views[rev])
    }

    /// Looks up a trailer key, falling back to earlier trailers when the
    /// revision's own trailer omits it.
    pub fn trailer_entry(&self, rev: usize, key: &str) -> Option<&CosValue> {
        let upto = rev.min(self.revisions.len().checked_sub(1)?);
        self.revisions[..=upto].iter().rev().find_map(|r| r.trailer.dict.get(key))
    }

    pub fn root(&self, rev: usize) -> Option<ObjectId> {
        self.trailer_entry(rev, "Root").and_then(CosValue::as_reference)
    }

    /// The catalog dictionary as of `rev`.
    pub fn catalog(&self, rev: usize) -> Result<Dict> {
        let root = self
            .root(rev)
            .ok_or_else(|| Error::BrokenPageTree("trailer has no /Root".into()))?;
        match self.resolve(rev, root)?.0 {
            CosValue::Dict(d) => Ok(d),
            _ => Err(Error::BrokenPageTree(format!("/Root {root} is not a dictionary"))),
        }
    }

    /// Resolves `id` the way a reader of revision `rev` would.
    pub fn resolve(&self, rev: usize, id: ObjectId) -> Result<(CosValue, ByteSpan)> {
        let obj = self.resolve_object(rev, id)?;
        Ok((obj.value, obj.span))
    }

    /// Like [`Document::resolve`] but keeps the parse warnings. For objects
    /// inside an object stream the span is the containing stream's.
    pub fn resolve_object(&self, rev: usize, id: ObjectId) -> Result<IndirectObject> {
        let ve = self.lookup(rev, id)?;
        match ve.entry.compressed {
            Some(loc) => self.resolve_compressed(rev, id, loc),
            None => self.parse_at(rev, ve.entry.offset, ve.entry.id()),
        }
    }

    fn lookup(&self, rev: usize, id: ObjectId) -> Result<&ViewEntry> {
        let ve = self.view(rev)?.get(&id.number).ok_or(Error::UnknownObject(id))?;
        if !ve.entry.in_use {
            return Err(Error::FreeObject(id));
        }
        Ok(ve)
    }

    /// Parses the object at `offset`, checking its number against
    /// `expected`. Indirect `/Length`s resolve in revision `rev`.
    pub fn parse_at(&self, rev: usize, offset: usize, expected: ObjectId) -> Result<IndirectObject> {
        let lengths = |lid: ObjectId| self.length_of(rev, lid);
        let obj = parse_indirect_object(&self.bytes, offset, Some(&lengths)).map_err(|e| match e {
            Error::IdMismatch { .. } => Error::OffsetMismatch { expected, found: None, offset },
            other => other,
        })?;
        if obj.id.number != expected.number {
            return Err(Error::OffsetMismatch { expected, found: Some(obj.id), offset });
        }
        Ok(obj)
    }

    fn length_of(&self, rev: usize, id: ObjectId) -> Option<usize> {
        let ve = self.views.get(rev)?.get(&id.number)?;
        if !ve.entry.in_use || ve.entry.compressed.is_some() {
            return None;
        }
        let obj = parse_indirect_object(&self.bytes, ve.entry.offset, Some(&|_| None)).ok()?;
        (obj.id.number == id.number)
            .then(|| obj.value.as_int().and_then(|n| usize::try_from(n).ok()))
            .flatten()
    }

    fn resolve_compressed(&self, rev: usize, id: ObjectId, loc: CompressedLocation) -> Result<IndirectObject> {
        let stream_id = ObjectId::new(loc.stream_object, 0);
        let holder = self.lookup(rev, stream_id)?;
        if holder.entry.compressed.is_some() {
            return Err(Error::CorruptStream(format!("object stream {stream_id} is itself compressed")));
        }
        let container = self.parse_at(rev, holder.entry.offset, holder.entry.id())?;
        let stream = match &container.value {
            CosValue::Stream(s) if s.dict.has_type("ObjStm") => s,
            _ => return Err(Error::CorruptStream(format!("{stream_id} is not an object stream"))),
        };
        let direct = |rid: ObjectId| -> Option<CosValue> {
            let ve = self.views.get(rev)?.get(&rid.number)?;
            if !ve.entry.in_use || ve.entry.compressed.is_some() {
                return None;
            }
            self.parse_at(rev, ve.entry.offset, ve.entry.id()).ok().map(|o| o.value)
        };
        let decoded = filters::decode_stream(&self.bytes, stream, &direct)?;
        let data = decoded.data;
        let count = stream.dict.get_int("N").unwrap_or(0).max(0) as usize;
        let first = stream.dict.get_int("First").unwrap_or(0).max(0) as usize;
        let bad = |why: &str| Error::CorruptStream(format!("object stream {stream_id}: {why}"));
        let mut lx = Lexer::new(&data, 0);
        let mut found = None;
        for i in 0..count.min(data.len()) {
            lx.skip_ws();
            let num = lx.read_unsigned().ok_or_else(|| bad("bad header"))?;
            lx.skip_ws();
            let off = lx.read_unsigned().ok_or_else(|| bad("bad header"))?;
            if i == loc.index as usize {
                found = Some((num, off as usize));
                break;
            }
        }
        let (num, off) = found.ok_or_else(|| bad("index out of range"))?;
        if num != u64::from(id.number) {
            return Err(Error::OffsetMismatch {
                expected: id,
                found: u32::try_from(num).ok().map(|n| ObjectId::new(n, 0)),
                offset: container.span.start,
            });
        }
        let at = first.checked_add(off).filter(|&a| a < data.len()).ok_or_else(|| bad("offset out of range"))?;
        let (value, _) = lex_value(&data, at)?;
        Ok(IndirectObject {
            id: ObjectId::new(id.number, 0),
            value,
            span: container.span,
            warnings: container.warnings,
        })
    }

    /// A resolver closure for revision `rev`, as filters and extraction
    /// expect it.
    pub fn resolver(&self, rev: usize) -> impl Fn(ObjectId) -> Option<CosValue> + '_ {
        move |id| self.resolve(rev, id).ok().map(|(v, _)| v)
    }

    /// Follows references (a few levels deep) until a direct value remains.
    /// Unresolvable references become `Null`.
    pub fn deref(&self, rev: usize, value: &CosValue) -> CosValue {
        let mut current = value.clone();
        for _ in 0..8 {
            match current {
                CosValue::Reference(id) => {
                    current = self.resolve(rev, id).map(|(v, _)| v).unwrap_or(CosValue::Null)
                }
                other => return other,
            }
        }
        CosValue::Null
    }

    /// Decodes a stream's filter chain, resolving indirect parameters in
    /// revision `rev`.
    pub fn decode_stream(&self, rev: usize, stream: &Stream) -> Result<DecodedStream> {
        filters::decode_stream(&self.bytes, stream, &self.resolver(rev))
    }

    /// Reasons why cutting the file at a revision's end would not give a
    /// self-contained file, or `None` when every block is appended.
    pub fn append_only_violation(&self) -> Option<String> {
        let mut expected = self.revisions.first()?.block_span.start;
        for rev in &self.revisions {
            if rev.block_span.start != expected {
                return Some(format!(
                    "revision {} starts at byte {} instead of {expected}",
                    rev.index, rev.block_span.start
                ));
            }
            expected = rev.block_span.end();
            if rev.xref.offset < rev.block_span.start || rev.xref.offset >= rev.cumulative_end {
                return Some(format!("revision {}'s cross-reference section lies outside its block", rev.index));
            }
            for ve in self.views[rev.index].values() {
                let e = &ve.entry;
                if e.in_use && e.compressed.is_none() && e.offset >= rev.cumulative_end {
                    return Some(format!(
                        "revision {} resolves object {} to byte {} past its end {}",
                        rev.index, e.object_number, e.offset, rev.cumulative_end
                    ));
                }
            }
        }
        if expected != self.bytes.len() {
            return Some(format!("blocks end at byte {expected}, file has {}", self.bytes.len()));
        }
        None
    }

    pub fn is_append_only(&self) -> bool {
        self.append_only_violation().is_none()
    }

    /// Checks that every in-use entry of every view lands on a matching
    /// object header and that references agree on generations.
    fn audit(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut gen_reported = HashSet::new();
        for (rev, view) in self.views.iter().enumerate() {
            for (num, ve) in view {
                let e = &ve.entry;
                if !e.in_use || e.compressed.is_some() || !seen.insert((e.offset, *num)) {
                    continue;
                }
                match self.parse_at(rev, e.offset, e.id()) {
                    Ok(obj) => {
                        for r in obj.value.references() {
                            if let Some(target) = view.get(&r.number) {
                                let t = &target.entry;
                                if t.in_use
                                    && t.compressed.is_none()
                                    && t.generation != r.generation
                                    && gen_reported.insert((r.number, r.generation))
                                {
                                    out.push(format!(
                                        "revision {rev}: reference {r} R has generation {} in the cross-reference view",
                                        t.generation
                                    ));
                                }
                            }
                        }
                    }
                    Err(err) => out.push(format!(
                        "revision {rev}: entry for object {num} at byte {}: {err}",
                        e.offset
                    )),
                }
            }
        }
        let has_catalog = (0..self.revisions.len()).any(|rev| {
            self.catalog(rev).map(|d| d.has_type("Catalog")).unwrap_or(false)
        });
        if !has_catalog {
            out.push("no revision's /Root resolves to a /Catalog dictionary".into());
        }
        out
    }
}

/// Resolves `id` in revision `rev` of `doc`.
pub fn resolve(doc: &Document, rev: usize, id: ObjectId) -> Result<(CosValue, ByteSpan)> {
    doc.resolve(rev, id)
}
