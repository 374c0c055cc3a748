//! Residual information: object versions that later saves superseded but
//! left in the file, a byte-level map of what every region of the file is,
//! and revision-to-revision comparisons.

mod coverage;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

pub use coverage::{
    coverage_map, coverage_map_of_bytes, coverage_map_with, CoverageMap, CoverageOptions, SpanClass, SpanKind,
    SpanOwner, DEFAULT_WHITESPACE_LIMIT,
};

use crate::cos::{ByteSpan, CosValue, ObjectId};
use crate::error::{Error, Result};
use crate::extract::extract_text;
use crate::pagetree::{content_program, walk_pages};
use crate::revisions::{Document, XrefEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ShadowKind {
    ContentStream,
    Page,
    Resource,
    Catalog,
    Other,
}

/// An object version replaced by a later save.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShadowObject {
    pub object_number: u32,
    pub superseded_revision: usize,
    pub superseding_revision: usize,
    pub old_span: ByteSpan,
    /// For a freed object this is the free entry's xref line.
    pub new_span: ByteSpan,
    pub kind: ShadowKind,
}

/// Every supersession edge: for each object number listed by two or more
/// revisions, each later listing that changes where it points produces one
/// entry. Old versions that the final revision still uses are left out,
/// since nothing about them is residual.
pub fn shadow_objects(doc: &Document) -> Vec<ShadowObject> {
    let mut listings: BTreeMap<u32, Vec<(usize, &XrefEntry)>> = BTreeMap::new();
    for rev in doc.revisions() {
        for (num, entry) in &rev.entries {
            listings.entry(*num).or_default().push((rev.index, entry));
        }
    }
    let Ok(final_view) = doc.view(doc.last_revision()) else {
        return Vec::new();
    };
    let mut content_sets: HashMap<usize, HashSet<u32>> = HashMap::new();
    let mut out = Vec::new();
    for (num, list) in listings {
        let live = final_view.get(&num).map(|ve| ve.entry);
        for pair in list.windows(2) {
            let ((old_rev, old), (new_rev, new)) = (pair[0], pair[1]);
            if !old.in_use || old.same_target(new) {
                continue;
            }
            if live.is_some_and(|l| l.same_target(old)) {
                continue;
            }
            let old_obj = doc.resolve_object(old_rev, old.id());
            let old_span = match &old_obj {
                Ok(o) => o.span,
                Err(_) => ByteSpan::new(old.offset, 0),
            };
            let new_span = if new.in_use {
                doc.resolve_object(new_rev, new.id()).map(|o| o.span).unwrap_or(ByteSpan::new(new.offset, 0))
            } else {
                new.line.unwrap_or_default()
            };
            let contents = content_sets.entry(old_rev).or_insert_with(|| content_numbers(doc, old_rev));
            let kind = match &old_obj {
                Ok(o) => classify(&o.value, contents.contains(&num)),
                Err(_) => ShadowKind::Other,
            };
            out.push(ShadowObject {
                object_number: num,
                superseded_revision: old_rev,
                superseding_revision: new_rev,
                old_span,
                new_span,
                kind,
            });
        }
    }
    out
}

fn content_numbers(doc: &Document, rev: usize) -> HashSet<u32> {
    walk_pages(doc, rev)
        .map(|w| w.pages.iter().flat_map(|p| p.contents.iter().map(|c| c.number)).collect())
        .unwrap_or_default()
}

fn classify(value: &CosValue, is_content: bool) -> ShadowKind {
    if is_content {
        return ShadowKind::ContentStream;
    }
    let dict = match value {
        CosValue::Dict(d) => d,
        CosValue::Stream(s) => &s.dict,
        _ => return ShadowKind::Other,
    };
    match dict.get_name("Type") {
        Some(b"Page") => return ShadowKind::Page,
        Some(b"Catalog") => return ShadowKind::Catalog,
        Some(b"Font" | b"XObject" | b"FontDescriptor" | b"ExtGState" | b"Pattern" | b"Shading") => {
            return ShadowKind::Resource
        }
        _ => {}
    }
    if matches!(dict.get_name("Subtype"), Some(b"Image" | b"Form")) {
        return ShadowKind::Resource;
    }
    ShadowKind::Other
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageChange {
    pub page_index: usize,
    /// `None` when the page does not exist on that side.
    pub text_before: Option<String>,
    pub text_after: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RevisionDiff {
    pub from_rev: usize,
    pub to_rev: usize,
    pub page_count_before: usize,
    pub page_count_after: usize,
    /// Pages whose decoded content differs, matched by index.
    pub pages_changed: Vec<usize>,
    pub changes: Vec<PageChange>,
    pub objects_added: Vec<ObjectId>,
    pub objects_superseded: Vec<ObjectId>,
    pub objects_freed: Vec<ObjectId>,
    /// Per-page read failures; they do not stop the comparison.
    pub errors: Vec<String>,
}

/// Compares revision `i` with a later revision `j`.
pub fn diff_revisions(doc: &Document, i: usize, j: usize) -> Result<RevisionDiff> {
    doc.check_rev(j)?;
    if i >= j {
        return Err(Error::Precondition(format!("diff needs from < to, got {i} and {j}")));
    }
    let before = walk_pages(doc, i)?.pages;
    let after = walk_pages(doc, j)?.pages;
    let mut errors = Vec::new();
    let mut program = |rev: usize, page| match content_program(doc, rev, page) {
        Ok(p) => Some(p),
        Err(e) => {
            errors.push(format!("revision {rev}: {e}"));
            None
        }
    };
    let mut pages_changed = Vec::new();
    for k in 0..before.len().max(after.len()) {
        let changed = match (before.get(k), after.get(k)) {
            (Some(a), Some(b)) => program(i, a) != program(j, b),
            _ => true,
        };
        if changed {
            pages_changed.push(k);
        }
    }

    let text_of = |rev: usize| -> Vec<String> {
        extract_text(doc, rev).map(|pages| pages.into_iter().map(|p| p.joined).collect()).unwrap_or_default()
    };
    let (text_i, text_j) = (text_of(i), text_of(j));
    let changes = pages_changed
        .iter()
        .map(|&k| PageChange {
            page_index: k,
            text_before: text_i.get(k).cloned(),
            text_after: text_j.get(k).cloned(),
        })
        .collect();

    let (view_i, view_j) = (doc.view(i)?, doc.view(j)?);
    let touched: BTreeSet<u32> = doc.revisions()[i + 1..=j].iter().flat_map(|r| r.entries.keys().copied()).collect();
    let (mut objects_added, mut objects_superseded, mut objects_freed) = (Vec::new(), Vec::new(), Vec::new());
    for num in touched {
        let old = view_i.get(&num).map(|ve| ve.entry).filter(|e| e.in_use);
        let new = view_j.get(&num).map(|ve| ve.entry).filter(|e| e.in_use);
        match (old, new) {
            (None, Some(n)) => objects_added.push(n.id()),
            (Some(o), None) => objects_freed.push(o.id()),
            (Some(o), Some(n)) if !o.same_target(&n) => objects_superseded.push(n.id()),
            _ => {}
        }
    }

    Ok(RevisionDiff {
        from_rev: i,
        to_rev: j,
        page_count_before: before.len(),
        page_count_after: after.len(),
        pages_changed,
        changes,
        objects_added,
        objects_superseded,
        objects_freed,
        errors,
    })
}
