use std::io::Write;

use crate::cos::{lex_dict_entries, ByteSpan, CosValue, Dict, ObjectId};
use crate::error::{Error, Result};
use crate::fixture::encode::flate;
use crate::residual::{coverage_map, shadow_objects, SpanKind};
use crate::revisions::{build_revision_chain, Document, XrefKind, XrefSection};

use super::{audit_equivalent, HiddenLocator, HideResult, Technique};

/// Splices `payload` into the slack of an older revision block and shifts
/// every byte offset the file records so that each revision still resolves
/// identically. With `at == None` the payload goes right after the newest
/// superseded object of the first block.
pub fn hide_in_slack(bytes: &[u8], payload: &[u8], at: Option<usize>) -> Result<HideResult> {
    let doc = build_revision_chain(bytes.to_vec())?;
    let point = match at {
        Some(p) => {
            check_insertion_point(&doc, p)?;
            p
        }
        None => default_insertion_point(&doc)?,
    };
    let locator = HiddenLocator { technique: Technique::Slack, span: ByteSpan::new(point, payload.len()), object_id: None };
    if payload.is_empty() {
        return Ok(HideResult { bytes: bytes.to_vec(), locator });
    }
    let out = relocate(&doc, point, payload)?;
    audit_equivalent(&doc, &out)?;
    Ok(HideResult { bytes: out, locator })
}

/// The end of the line after the last superseded object in the first
/// revision block, or after its last object if nothing there is superseded.
pub fn default_insertion_point(doc: &Document) -> Result<usize> {
    if doc.revision_count() < 2 {
        return Err(Error::NoSafeInsertionPoint("a single-revision file has no older block".into()));
    }
    let block = doc.revisions()[0].block_span;
    let after_shadow = shadow_objects(doc)
        .iter()
        .filter(|s| s.superseded_revision == 0 && !s.old_span.is_empty() && block.encloses(&s.old_span))
        .map(|s| s.old_span.end())
        .max();
    let end = match after_shadow {
        Some(e) => e,
        None => coverage_map(doc)
            .spans
            .iter()
            .filter(|s| s.class == SpanKind::ObjectBody && block.encloses(&s.span))
            .map(|s| s.span.end())
            .max()
            .ok_or_else(|| Error::NoSafeInsertionPoint("the first block holds no objects".into()))?,
    };
    let point = skip_eol(doc.bytes(), end);
    check_insertion_point(doc, point)?;
    Ok(point)
}

fn skip_eol(bytes: &[u8], p: usize) -> usize {
    match &bytes[p.min(bytes.len())..] {
        [b'\r', b'\n', ..] => p + 2,
        [b'\n' | b'\r', ..] => p + 1,
        _ => p,
    }
}

/// The point must fall inside a block other than the last and must not
/// split any structure the coverage map knows about.
fn check_insertion_point(doc: &Document, p: usize) -> Result<()> {
    let last = &doc.revisions()[doc.last_revision()];
    if p >= last.block_span.start {
        return Err(Error::NoSafeInsertionPoint(format!(
            "offset {p} is not before the final revision block at {}",
            last.block_span.start
        )));
    }
    for s in coverage_map(doc).spans {
        let structural = !matches!(s.class, SpanKind::Whitespace | SpanKind::Unaccounted);
        if structural && s.span.start < p && p < s.span.end() {
            return Err(Error::NoSafeInsertionPoint(format!(
                "offset {p} falls inside a {:?} at {}..{}",
                s.class,
                s.span.start,
                s.span.end()
            )));
        }
        if s.class == SpanKind::Header && p < s.span.end() {
            return Err(Error::NoSafeInsertionPoint(format!("offset {p} precedes the end of the header")));
        }
    }
    Ok(())
}

/// One edit of the original file: the bytes in `span` are replaced by a
/// rendering that may depend on where everything ends up.
enum Patch {
    Insert(Vec<u8>),
    /// The 10-digit offset field of a classic xref line.
    EntryOffset(usize),
    /// A free-width integer that holds a file offset.
    Offset(usize),
    /// A whole cross-reference stream object, re-encoded.
    XrefStream { id: ObjectId, dict: Dict, section: XrefSection },
}

fn collect_patches(doc: &Document, point: usize, payload: &[u8]) -> Result<Vec<(ByteSpan, Patch)>> {
    let bytes = doc.bytes();
    let mut patches = vec![(ByteSpan::new(point, 0), Patch::Insert(payload.to_vec()))];
    for rev in doc.revisions() {
        if let Some(m) = rev.startxref {
            patches.push((m.value_span, Patch::Offset(m.value)));
        }
        match &rev.xref.kind {
            XrefKind::Table => {
                for e in rev.xref.entries() {
                    if let (true, None, Some(line)) = (e.in_use, e.compressed, e.line) {
                        patches.push((ByteSpan::new(line.start, 10), Patch::EntryOffset(e.offset)));
                    }
                }
                let dict_at = rev.trailer.span.start + b"trailer".len();
                for (key, value, span) in lex_dict_entries(bytes, dict_at)? {
                    if matches!(key.as_bytes(), b"Prev" | b"XRefStm") {
                        if let Some(v) = value.as_int().and_then(|v| usize::try_from(v).ok()) {
                            patches.push((span, Patch::Offset(v)));
                        }
                    }
                }
            }
            XrefKind::Stream(id) => patches.push(stream_patch(doc, rev.index, *id, &rev.xref)?),
        }
        if let Some(h) = &rev.hybrid {
            if let XrefKind::Stream(id) = h.kind {
                patches.push(stream_patch(doc, rev.index, id, h)?);
            }
        }
    }
    patches.sort_by_key(|(span, _)| (span.start, span.len));
    let mut cursor = 0;
    for (span, _) in &patches {
        if span.start < cursor {
            return Err(Error::AuditFailed(format!("overlapping edits at offset {}", span.start)));
        }
        cursor = span.end();
    }
    Ok(patches)
}

fn stream_patch(doc: &Document, rev: usize, id: ObjectId, section: &XrefSection) -> Result<(ByteSpan, Patch)> {
    let obj = doc.parse_at(rev, section.offset, id)?;
    let CosValue::Stream(s) = obj.value else {
        return Err(Error::NotAnXref { offset: section.offset });
    };
    Ok((section.span, Patch::XrefStream { id, dict: s.dict, section: section.clone() }))
}

fn render(patch: &Patch, map: &dyn Fn(usize) -> usize) -> Vec<u8> {
    match patch {
        Patch::Insert(data) => data.clone(),
        Patch::EntryOffset(v) => format!("{:010}", map(*v)).into_bytes(),
        Patch::Offset(v) => map(*v).to_string().into_bytes(),
        Patch::XrefStream { id, dict, section } => render_xref_stream(*id, dict, section, map),
    }
}

fn width(max: u64) -> usize {
    (1..=8).find(|&w| w == 8 || max < 1u64 << (8 * w)).unwrap_or(8)
}

/// Regenerates the rows from the parsed entries, runs of consecutive object
/// numbers becoming `/Index` pairs, and stores them Flate-compressed
/// without a predictor.
fn render_xref_stream(id: ObjectId, dict: &Dict, section: &XrefSection, map: &dyn Fn(usize) -> usize) -> Vec<u8> {
    let mut entries: Vec<_> = section.entries().collect();
    entries.sort_by_key(|e| e.object_number);
    entries.dedup_by_key(|e| e.object_number);
    let rows: Vec<[u64; 3]> = entries
        .iter()
        .map(|e| match (e.in_use, e.compressed) {
            (false, _) => [0, e.offset as u64, u64::from(e.generation)],
            (true, Some(c)) => [2, u64::from(c.stream_object), u64::from(c.index)],
            (true, None) => [1, map(e.offset) as u64, u64::from(e.generation)],
        })
        .collect();
    let w = [1, width(rows.iter().map(|r| r[1]).max().unwrap_or(0)), width(rows.iter().map(|r| r[2]).max().unwrap_or(0))];
    let mut data = Vec::with_capacity(rows.len() * (w[0] + w[1] + w[2]));
    for row in &rows {
        for (value, width) in row.iter().zip(w) {
            data.extend_from_slice(&value.to_be_bytes()[8 - width..]);
        }
    }
    let mut index: Vec<(u32, u32)> = Vec::new();
    for e in &entries {
        match index.last_mut() {
            Some((first, count)) if *first + *count == e.object_number => *count += 1,
            _ => index.push((e.object_number, 1)),
        }
    }

    let mut d = dict.clone();
    for key in ["Filter", "DecodeParms", "Length", "W", "Index"] {
        d.remove(key);
    }
    d.insert("W", CosValue::Array(w.iter().map(|&x| CosValue::Integer(x as i64)).collect()));
    d.insert(
        "Index",
        CosValue::Array(index.iter().flat_map(|&(f, c)| [CosValue::Integer(f.into()), CosValue::Integer(c.into())]).collect()),
    );
    if let Some(prev) = d.get_int("Prev").and_then(|p| usize::try_from(p).ok()) {
        d.insert("Prev", CosValue::Integer(map(prev) as i64));
    }
    let raw = flate(&data);
    d.insert("Filter", CosValue::name("FlateDecode"));
    d.insert("Length", CosValue::Integer(raw.len() as i64));

    let mut out = Vec::new();
    let _ = write!(out, "{} {} obj\n", id.number, id.generation);
    d.write_to(&mut out);
    out.extend_from_slice(b"\nstream\n");
    out.extend_from_slice(&raw);
    out.extend_from_slice(b"\nendstream\nendobj");
    out
}

/// Applies all patches. Rendered lengths feed back into the offset map, so
/// this repeats until the lengths stop changing.
fn relocate(doc: &Document, point: usize, payload: &[u8]) -> Result<Vec<u8>> {
    let bytes = doc.bytes();
    let patches = collect_patches(doc, point, payload)?;
    let mut lens: Vec<usize> = patches
        .iter()
        .map(|(span, p)| match p {
            Patch::Insert(d) => d.len(),
            _ => span.len,
        })
        .collect();
    for _ in 0..16 {
        // Sorted by end; prefix sums of the growth of every patch ending at
        // or before a position.
        let mut shifts: Vec<(usize, i64)> =
            patches.iter().zip(&lens).map(|((span, _), &l)| (span.end(), l as i64 - span.len as i64)).collect();
        shifts.sort_by_key(|s| s.0);
        let mut acc = 0;
        for s in &mut shifts {
            acc += s.1;
            s.1 = acc;
        }
        let map = |x: usize| -> usize {
            let k = shifts.partition_point(|s| s.0 <= x);
            let delta = if k == 0 { 0 } else { shifts[k - 1].1 };
            (x as i64 + delta) as usize
        };
        let rendered: Vec<Vec<u8>> = patches.iter().map(|(_, p)| render(p, &map)).collect();
        let new_lens: Vec<usize> = rendered.iter().map(Vec::len).collect();
        if new_lens == lens {
            let mut out = Vec::with_capacity(bytes.len() + payload.len() + 64);
            let mut cursor = 0;
            for ((span, _), r) in patches.iter().zip(rendered) {
                out.extend_from_slice(&bytes[cursor..span.start]);
                out.extend_from_slice(&r);
                cursor = span.end();
            }
            out.extend_from_slice(&bytes[cursor..]);
            return Ok(out);
        }
        lens = new_lens;
    }
    Err(Error::AuditFailed("offset relocation did not settle".into()))
}
