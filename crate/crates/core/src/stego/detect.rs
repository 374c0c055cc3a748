use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::cos::{scan_all_objects, ByteSpan, CosValue, ObjectId};
use crate::residual::{coverage_map, coverage_map_of_bytes, CoverageMap, DEFAULT_WHITESPACE_LIMIT};
use crate::revisions::{build_revision_chain, Document, XrefEntry};

use super::{HiddenLocator, Technique};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateReason {
    /// Bytes between structures that nothing accounts for.
    UnaccountedSpan,
    /// A stream some revision lists but no revision reaches from its
    /// trailer, and that the final revision no longer uses.
    UnreferencedStream,
    /// An object body that no cross-reference section points at.
    OrphanObject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HiddenCandidate {
    pub locator: HiddenLocator,
    pub reason: CandidateReason,
    /// Shannon entropy of the span in bits per byte.
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct HiddenRegionReport {
    pub candidates: Vec<HiddenCandidate>,
}

impl HiddenRegionReport {
    pub fn contains_span(&self, span: ByteSpan) -> bool {
        self.candidates.iter().any(|c| c.locator.span.encloses(&span))
    }
}

pub fn shannon_entropy(data: &[u8]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let mut counts = [0usize; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    let n = data.len() as f64;
    counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n).map(|p| -p * p.log2()).sum()
}

fn candidate(bytes: &[u8], locator: HiddenLocator, reason: CandidateReason) -> HiddenCandidate {
    let entropy = locator.span.slice(bytes).map(shannon_entropy).unwrap_or(0.0);
    HiddenCandidate { locator, reason, entropy }
}

fn slack_candidates(bytes: &[u8], map: &CoverageMap, out: &mut Vec<HiddenCandidate>) {
    for s in map.unaccounted().filter(|s| s.span.len >= DEFAULT_WHITESPACE_LIMIT) {
        let locator = HiddenLocator { technique: Technique::Slack, span: s.span, object_id: None };
        out.push(candidate(bytes, locator, CandidateReason::UnaccountedSpan));
    }
}

/// Looks for the traces both hiding techniques leave: unaccounted runs of
/// at least 16 bytes, superseded streams nothing references, and object
/// bodies outside every cross-reference section.
pub fn detect_hidden(doc: &Document) -> HiddenRegionReport {
    let bytes = doc.bytes();
    let mut candidates = Vec::new();
    slack_candidates(bytes, &coverage_map(doc), &mut candidates);

    let reachable = reachable_targets(doc);
    let final_view = doc.view(doc.last_revision()).ok();
    let mut seen = HashSet::new();
    for rev in doc.revisions() {
        for entry in rev.entries.values().filter(|e| e.in_use) {
            let key = target_key(entry);
            if reachable.contains(&key) || !seen.insert(key) {
                continue;
            }
            let live = final_view.and_then(|v| v.get(&entry.object_number)).is_some_and(|ve| ve.entry.same_target(entry));
            if live {
                continue;
            }
            let Ok(obj) = doc.resolve_object(rev.index, entry.id()) else {
                continue;
            };
            let CosValue::Stream(s) = &obj.value else {
                continue;
            };
            if s.dict.has_type("XRef") || s.dict.has_type("ObjStm") {
                continue;
            }
            let locator =
                HiddenLocator { technique: Technique::SupersededStream, span: obj.span, object_id: Some(obj.id) };
            candidates.push(candidate(bytes, locator, CandidateReason::UnreferencedStream));
        }
    }

    let listed: HashSet<usize> = doc
        .revisions()
        .iter()
        .flat_map(|r| r.entries.values().filter(|e| e.in_use && e.compressed.is_none()).map(|e| e.offset))
        .collect();
    let sections: Vec<ByteSpan> =
        doc.revisions().iter().flat_map(|r| std::iter::once(r.xref.span).chain(r.hybrid.as_ref().map(|h| h.span))).collect();
    for (_, span) in scan_all_objects(bytes).objects {
        if listed.contains(&span.start) || sections.iter().any(|s| s.start == span.start) {
            continue;
        }
        let locator = HiddenLocator { technique: Technique::Slack, span, object_id: None };
        candidates.push(candidate(bytes, locator, CandidateReason::OrphanObject));
    }
    candidates.sort_by_key(|c| (c.locator.span.start, c.locator.span.len));
    HiddenRegionReport { candidates }
}

/// Works on files no revision chain can be built for, falling back to
/// carving; only unaccounted spans are reported then.
pub fn detect_hidden_in_bytes(bytes: &[u8]) -> HiddenRegionReport {
    if let Ok(doc) = build_revision_chain(bytes.to_vec()) {
        return detect_hidden(&doc);
    }
    let mut candidates = Vec::new();
    slack_candidates(bytes, &coverage_map_of_bytes(bytes), &mut candidates);
    HiddenRegionReport { candidates }
}

type TargetKey = (u32, usize, Option<(u32, u32)>);

fn target_key(e: &XrefEntry) -> TargetKey {
    let offset = if e.compressed.is_some() { 0 } else { e.offset };
    (e.object_number, offset, e.compressed.map(|c| (c.stream_object, c.index)))
}

/// Every object instance some revision reaches from its trailer.
fn reachable_targets(doc: &Document) -> HashSet<TargetKey> {
    let mut out = HashSet::new();
    for rev in 0..doc.revision_count() {
        let Ok(view) = doc.view(rev) else { continue };
        let mut queue: Vec<ObjectId> = ["Root", "Info", "Encrypt"]
            .iter()
            .filter_map(|k| doc.trailer_entry(rev, k))
            .flat_map(CosValue::references)
            .collect();
        let mut visited = BTreeSet::new();
        while let Some(id) = queue.pop() {
            if !visited.insert(id.number) {
                continue;
            }
            let Some(ve) = view.get(&id.number).filter(|ve| ve.entry.in_use) else { continue };
            out.insert(target_key(&ve.entry));
            if let Ok(obj) = doc.resolve_object(rev, ve.entry.id()) {
                queue.extend(obj.value.references());
            }
        }
    }
    out
}
