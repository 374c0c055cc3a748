//! The logical page tree of one revision: `/Root → /Pages → /Kids → /Page`.

use std::collections::HashSet;

use crate::cos::{CosValue, Dict, ObjectId};
use crate::error::{Error, Result};
use crate::revisions::Document;

/// Deepest `/Pages` nesting accepted.
pub const MAX_TREE_DEPTH: usize = 64;

/// A page's resource dictionary, as written (possibly inherited).
#[derive(Debug, Clone, PartialEq)]
pub enum ResourceRef {
    Indirect(ObjectId),
    Inline(Dict),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRef {
    pub revision: usize,
    pub page_index: usize,
    pub page_object: ObjectId,
    /// Content streams in painting order; empty for a blank page.
    pub contents: Vec<ObjectId>,
    pub resources: Option<ResourceRef>,
}

impl PageRef {
    /// The effective resource dictionary, or an empty one.
    pub fn resources_dict(&self, doc: &Document) -> Dict {
        match &self.resources {
            Some(ResourceRef::Inline(d)) => d.clone(),
            Some(ResourceRef::Indirect(id)) => match doc.deref(self.revision, &CosValue::Reference(*id)) {
                CosValue::Dict(d) => d,
                _ => Dict::new(),
            },
            None => Dict::new(),
        }
    }
}

/// Pages plus the non-fatal oddities met on the way.
#[derive(Debug, Clone, Default)]
pub struct PageWalk {
    pub pages: Vec<PageRef>,
    pub anomalies: Vec<String>,
}

struct Walker<'a> {
    doc: &'a Document,
    rev: usize,
    visited: HashSet<u32>,
    out: PageWalk,
}

/// Walks the page tree of revision `rev` depth-first.
pub fn walk_pages(doc: &Document, rev: usize) -> Result<PageWalk> {
    doc.check_rev(rev)?;
    let catalog = doc.catalog(rev)?;
    let root = catalog
        .get_ref("Pages")
        .ok_or_else(|| Error::BrokenPageTree("catalog has no /Pages reference".into()))?;
    let mut walker = Walker {
        doc,
        rev,
        visited: HashSet::new(),
        out: PageWalk::default(),
    };
    let declared = walker.visit(root, None, 0)?;
    let found = walker.out.pages.len();
    if let Some(count) = declared {
        if count != found as i64 {
            walker
                .out
                .anomalies
                .push(format!("revision {rev}: /Count {count} but {found} pages found"));
        }
    }
    Ok(walker.out)
}

impl Walker<'_> {
    /// Visits one node and returns its declared `/Count`.
    fn visit(&mut self, id: ObjectId, inherited: Option<&ResourceRef>, depth: usize) -> Result<Option<i64>> {
        if depth > MAX_TREE_DEPTH {
            return Err(Error::BrokenPageTree(format!("tree deeper than {MAX_TREE_DEPTH}")));
        }
        if !self.visited.insert(id.number) {
            return Err(Error::BrokenPageTree(format!("node {id} is reached twice")));
        }
        let node = match self.doc.resolve(self.rev, id) {
            Ok((CosValue::Dict(d), _)) => d,
            Ok(_) => return Err(Error::BrokenPageTree(format!("node {id} is not a dictionary"))),
            Err(e) => return Err(Error::BrokenPageTree(format!("node {id} does not resolve: {e}"))),
        };
        let resources = match node.get("Resources") {
            Some(CosValue::Reference(r)) => Some(ResourceRef::Indirect(*r)),
            Some(CosValue::Dict(d)) => Some(ResourceRef::Inline(d.clone())),
            _ => inherited.cloned(),
        };
        let is_leaf = node.has_type("Page") || (!node.has_type("Pages") && !node.contains_key("Kids"));
        if is_leaf {
            let contents = self.contents_of(id, &node);
            let page_index = self.out.pages.len();
            self.out.pages.push(PageRef {
                revision: self.rev,
                page_index,
                page_object: id,
                contents,
                resources,
            });
            return Ok(None);
        }
        let kids = match node.get("Kids").map(|k| self.doc.deref(self.rev, k)) {
            Some(CosValue::Array(items)) => items,
            _ => return Err(Error::BrokenPageTree(format!("/Pages node {id} has no /Kids array"))),
        };
        for kid in kids {
            match kid {
                CosValue::Reference(kid_id) => {
                    self.visit(kid_id, resources.as_ref(), depth + 1)?;
                }
                other => {
                    return Err(Error::BrokenPageTree(format!(
                        "/Kids entry of {id} is not a reference: {}",
                        String::from_utf8_lossy(&other.to_bytes())
                    )))
                }
            }
        }
        Ok(node.get_int("Count"))
    }

    fn contents_of(&mut self, page: ObjectId, node: &Dict) -> Vec<ObjectId> {
        let items = match node.get("Contents") {
            None | Some(CosValue::Null) => return Vec::new(),
            Some(CosValue::Reference(r)) => match self.doc.deref(self.rev, &CosValue::Reference(*r)) {
                // A reference to an array of streams.
                CosValue::Array(items) => items,
                _ => return vec![*r],
            },
            Some(CosValue::Array(items)) => items.clone(),
            Some(_) => {
                self.out.anomalies.push(format!("page {page}: /Contents is neither a stream nor an array"));
                return Vec::new();
            }
        };
        items
            .iter()
            .filter_map(|v| {
                let r = v.as_reference();
                if r.is_none() {
                    self.out.anomalies.push(format!("page {page}: direct /Contents entry skipped"));
                }
                r
            })
            .collect()
    }
}

pub fn pages(doc: &Document, rev: usize) -> Result<Vec<PageRef>> {
    Ok(walk_pages(doc, rev)?.pages)
}

pub fn page_count(doc: &Document, rev: usize) -> Result<usize> {
    Ok(walk_pages(doc, rev)?.pages.len())
}

/// The page's content streams decoded and joined with single spaces.
pub fn content_program(doc: &Document, rev: usize, page: &PageRef) -> Result<Vec<u8>> {
    let mut program = Vec::new();
    for (i, id) in page.contents.iter().enumerate() {
        let decoded = (|| {
            let (value, _) = doc.resolve(rev, *id)?;
            let stream = value
                .as_stream()
                .ok_or_else(|| Error::CorruptStream(format!("content {id} is not a stream")))?;
            doc.decode_stream(rev, stream)
        })()
        .map_err(|e| e.on_page(page.page_index))?;
        if i > 0 {
            program.push(b' ');
        }
        program.extend_from_slice(&decoded.data);
    }
    Ok(program)
}
