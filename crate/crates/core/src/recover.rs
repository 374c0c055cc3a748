//! Rebuilding an earlier revision as a file a viewer will open.
//!
//! Truncation cuts the file where the revision ended and is byte-exact.
//! Offset rewriting keeps the file whole and edits the newest
//! cross-reference lines in place so they point back at the older object
//! bodies, which are still physically present.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cos::{lex_dict_entries, CosValue, ObjectId};
use crate::error::{Error, Result};
use crate::revisions::{format_entry_line, Document, XrefEntry, XrefKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMethod {
    Truncate,
    OffsetRewrite,
}

impl RecoveryMethod {
    /// Short name used in output file names.
    pub fn label(self) -> &'static str {
        match self {
            RecoveryMethod::Truncate => "truncate",
            RecoveryMethod::OffsetRewrite => "rewrite",
        }
    }
}

impl fmt::Display for RecoveryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RecoveryMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncate" => Ok(RecoveryMethod::Truncate),
            "rewrite" | "offset-rewrite" => Ok(RecoveryMethod::OffsetRewrite),
            other => Err(Error::Precondition(format!("unknown recovery method `{other}`"))),
        }
    }
}

/// One cross-reference line changed by an offset rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RewrittenEntry {
    pub object_number: u32,
    /// Byte offset of the line in the file.
    pub line_offset: usize,
    pub old_line: String,
    pub new_line: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub method: RecoveryMethod,
    pub revision: usize,
    #[serde(skip)]
    pub bytes: Vec<u8>,
    pub rewritten: Vec<RewrittenEntry>,
    /// Non-fatal problems, such as a `/Root` that did not fit in place.
    pub anomalies: Vec<String>,
}

pub fn recover(doc: &Document, rev: usize, method: RecoveryMethod) -> Result<Recovery> {
    match method {
        RecoveryMethod::Truncate => Ok(Recovery {
            method,
            revision: rev,
            bytes: recover_by_truncation(doc, rev)?,
            rewritten: Vec::new(),
            anomalies: Vec::new(),
        }),
        RecoveryMethod::OffsetRewrite => offset_rewrite(doc, rev),
    }
}

/// The file as it was when revision `rev` was saved.
pub fn recover_by_truncation(doc: &Document, rev: usize) -> Result<Vec<u8>> {
    doc.check_rev(rev)?;
    if let Some(reason) = doc.append_only_violation() {
        return Err(Error::NotAppendOnly(reason));
    }
    Ok(doc.bytes()[..doc.revisions()[rev].cumulative_end].to_vec())
}

/// A same-size copy of the file whose newest cross-reference view shows
/// revision `rev`.
pub fn recover_by_offset_rewrite(doc: &Document, rev: usize) -> Result<Vec<u8>> {
    Ok(offset_rewrite(doc, rev)?.bytes)
}

fn offset_rewrite(doc: &Document, rev: usize) -> Result<Recovery> {
    doc.check_rev(rev)?;
    let last = doc.last_revision();
    let mut out = Recovery {
        method: RecoveryMethod::OffsetRewrite,
        revision: rev,
        bytes: doc.bytes().to_vec(),
        rewritten: Vec::new(),
        anomalies: Vec::new(),
    };
    if rev == last {
        return Ok(out);
    }
    if let XrefKind::Stream(id) = doc.revisions()[last].xref.kind {
        return Err(Error::EntryNotRewritable(format!(
            "the newest cross-reference section is stream object {id}; use truncation instead"
        )));
    }

    let target = doc.view(rev)?;
    let current = doc.view(last)?;
    for (&number, now) in current {
        let wanted: Option<&XrefEntry> = target.get(&number).map(|ve| &ve.entry);
        if wanted.is_some_and(|w| w.same_target(&now.entry)) {
            continue;
        }
        let Some(line) = now.entry.line else {
            return Err(Error::EntryNotRewritable(format!(
                "object {number} is listed by cross-reference stream of revision {}",
                now.revision
            )));
        };
        let new_line = match wanted {
            Some(w) if w.compressed.is_some() => {
                return Err(Error::EntryNotRewritable(format!(
                    "object {number} lived in an object stream in revision {rev}; a table line cannot say that"
                )))
            }
            Some(w) if w.in_use => format_entry_line(w.offset, w.generation, true),
            // Absent from the target revision, or free there.
            _ => format_entry_line(0, 65535, false),
        };
        let range = line.range();
        let old_line = String::from_utf8_lossy(&out.bytes[range.clone()]).into_owned();
        if new_line.len() != range.len() {
            return Err(Error::EntryNotRewritable(format!(
                "entry for object {number} at byte {} is not 18 bytes wide",
                line.start
            )));
        }
        out.bytes[range].copy_from_slice(new_line.as_bytes());
        out.rewritten.push(RewrittenEntry { object_number: number, line_offset: line.start, old_line, new_line });
    }

    let (want_root, have_root) = (doc.root(rev), doc.root(last));
    if want_root != have_root {
        if let Some(want) = want_root {
            if let Err(reason) = rewrite_root(doc, &mut out.bytes, want) {
                out.anomalies.push(reason);
            }
        }
    }
    Ok(out)
}

/// Overwrites the newest trailer's `/Root` value in place, padding with
/// spaces when the new reference is shorter.
fn rewrite_root(doc: &Document, bytes: &mut [u8], root: ObjectId) -> std::result::Result<(), String> {
    let supplier = doc
        .revisions()
        .iter()
        .rev()
        .find(|r| r.trailer.dict.contains_key("Root"))
        .ok_or("no trailer has /Root")?;
    let dict_start = match supplier.xref.kind {
        XrefKind::Table => supplier.trailer.span.start + b"trailer".len(),
        XrefKind::Stream(_) => return Err("/Root lives in a cross-reference stream dictionary".into()),
    };
    let entries = lex_dict_entries(doc.bytes(), dict_start).map_err(|e| e.to_string())?;
    let (_, _, span) = entries
        .iter()
        .find(|(k, v, _)| k.as_bytes() == b"Root" && matches!(v, CosValue::Reference(_)))
        .ok_or("trailer /Root is not a reference")?;
    let text = format!("{} {} R", root.number, root.generation);
    if text.len() > span.len {
        return Err(format!(
            "/Root {root} R needs {} bytes but the trailer field has {}; /Root left unchanged",
            text.len(),
            span.len
        ));
    }
    let field = &mut bytes[span.range()];
    field.fill(b' ');
    field[..text.len()].copy_from_slice(text.as_bytes());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::extract_text;
    use crate::fixture::{full_save, incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
    use crate::revisions::build_revision_chain;

    fn texts(doc: &Document, rev: usize) -> Vec<String> {
        extract_text(doc, rev).unwrap().into_iter().map(|p| p.joined).collect()
    }

    fn edit(pages: &[(usize, &str)]) -> EditScript {
        let mut s = EditScript::default();
        for (i, t) in pages {
            s.page_edits.insert(*i, PageSpec::text(&[t]));
        }
        s
    }

    fn three_revisions() -> (Vec<Vec<u8>>, Document) {
        let pages: Vec<PageSpec> = ["one", "two", "three"].iter().map(|t| PageSpec::text(&[t])).collect();
        let (v0, _) = write_pdf(&pages, &WriteOptions::default()).unwrap();
        let (v1, _) = incremental_save(&v0, &edit(&[(0, "ONE"), (1, "TWO")])).unwrap();
        let mut append = EditScript::default();
        append.pages_appended.push(PageSpec::text(&["four"]));
        append.page_edits.insert(0, PageSpec::text(&["uno"]));
        let (v2, _) = incremental_save(&v1, &append).unwrap();
        let doc = build_revision_chain(v2.clone()).unwrap();
        (vec![v0, v1, v2], doc)
    }

    #[test]
    fn truncation_returns_each_saved_file() {
        let (files, doc) = three_revisions();
        for (rev, file) in files.iter().enumerate() {
            assert_eq!(&recover_by_truncation(&doc, rev).unwrap(), file);
        }
        let mid = build_revision_chain(recover_by_truncation(&doc, 1).unwrap()).unwrap();
        assert_eq!(mid.revision_count(), 2);
        // Truncating a truncation to the same revision changes nothing.
        assert_eq!(recover_by_truncation(&mid, 1).unwrap(), files[1]);
    }

    #[test]
    fn rewrite_keeps_size_and_shows_old_text() {
        let (files, doc) = three_revisions();
        for rev in 0..3 {
            let out = recover_by_offset_rewrite(&doc, rev).unwrap();
            assert_eq!(out.len(), files[2].len());
            let recovered = build_revision_chain(out).unwrap();
            assert_eq!(texts(&recovered, recovered.last_revision()), texts(&doc, rev), "revision {rev}");
        }
    }

    #[test]
    fn rewrite_of_last_revision_is_identity() {
        let (files, doc) = three_revisions();
        let r = recover(&doc, 2, RecoveryMethod::OffsetRewrite).unwrap();
        assert!(r.rewritten.is_empty());
        assert_eq!(r.bytes, files[2]);
    }

    #[test]
    fn rewrite_frees_objects_added_later() {
        let (_, doc) = three_revisions();
        let r = recover(&doc, 1, RecoveryMethod::OffsetRewrite).unwrap();
        let added_in_2: Vec<u32> = doc.revisions()[2]
            .entries
            .keys()
            .copied()
            .filter(|n| !doc.view(1).unwrap().contains_key(n))
            .collect();
        assert!(!added_in_2.is_empty());
        for n in added_in_2 {
            let e = r.rewritten.iter().find(|e| e.object_number == n).unwrap();
            assert_eq!(e.new_line, "0000000000 65535 f");
        }
        // Every rewritten line is still exactly where it was.
        for e in &r.rewritten {
            assert_eq!(&r.bytes[e.line_offset..e.line_offset + 18], e.new_line.as_bytes());
        }
    }

    #[test]
    fn truncation_refuses_rewritten_files() {
        let (files, doc) = three_revisions();
        // A single block is trivially append-only.
        let flat = build_revision_chain(full_save(&files[2]).unwrap()).unwrap();
        assert_eq!(recover_by_truncation(&flat, 0).unwrap(), flat.bytes());

        // A tool that rewrote history in place: revision 0's entry for a
        // changed object now points into revision 1's block.
        let changed = *doc.revisions()[1].entries.keys().next().unwrap();
        let old = doc.revisions()[0].entries[&changed].line.unwrap();
        let newer = doc.revisions()[1].entries[&changed].offset;
        let mut bytes = files[1].clone();
        bytes[old.range()].copy_from_slice(format_entry_line(newer, 0, true).as_bytes());
        let doc = build_revision_chain(bytes).unwrap();
        assert!(matches!(recover_by_truncation(&doc, 0), Err(Error::NotAppendOnly(_))));
    }

    #[test]
    fn xref_stream_files_refuse_rewrite() {
        let options = WriteOptions { xref_stream: true, ..WriteOptions::default() };
        let (v0, _) = write_pdf(&[PageSpec::text(&["a"])], &options).unwrap();
        let (v1, _) = incremental_save(&v0, &edit(&[(0, "b")])).unwrap();
        let doc = build_revision_chain(v1).unwrap();
        assert!(matches!(recover_by_offset_rewrite(&doc, 0), Err(Error::EntryNotRewritable(_))));
        assert_eq!(recover_by_truncation(&doc, 0).unwrap(), v0);
    }

    #[test]
    fn root_is_redirected_when_it_changed() {
        // Hand-built update that swaps in a new catalog object.
        let (v0, _) = write_pdf(&[PageSpec::text(&["root test"])], &WriteOptions::default()).unwrap();
        let doc0 = build_revision_chain(v0.clone()).unwrap();
        let prev = doc0.revisions()[0].trailer.startxref_value;
        let mut v1 = v0.clone();
        let obj_at = v1.len();
        v1.extend_from_slice(b"9 0 obj\n<</Type /Catalog /Pages 2 0 R /Lang (en)>>\nendobj\n");
        let xref_at = v1.len();
        v1.extend_from_slice(
            format!(
                "xref\n9 1\n{}\r\ntrailer\n<</Size 10 /Root 9 0 R /Prev {prev}>>\nstartxref\n{xref_at}\n%%EOF\n",
                format_entry_line(obj_at, 0, true)
            )
            .as_bytes(),
        );
        let doc = build_revision_chain(v1).unwrap();
        let r = recover(&doc, 0, RecoveryMethod::OffsetRewrite).unwrap();
        assert!(r.anomalies.is_empty(), "{:?}", r.anomalies);
        let back = build_revision_chain(r.bytes).unwrap();
        assert_eq!(back.root(back.last_revision()), Some(ObjectId::new(1, 0)));
    }

    #[test]
    fn method_names() {
        assert_eq!("truncate".parse::<RecoveryMethod>().unwrap(), RecoveryMethod::Truncate);
        assert_eq!("rewrite".parse::<RecoveryMethod>().unwrap(), RecoveryMethod::OffsetRewrite);
        assert!("other".parse::<RecoveryMethod>().is_err());
    }
}
