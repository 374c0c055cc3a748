use std::collections::BTreeMap;

use serde::Serialize;

use crate::cos::ByteSpan;
use crate::revisions::{extract_info, Document};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct RevisionSummary {
    pub index: usize,
    /// The bytes this revision added, `[start, end)`.
    pub byte_range: [usize; 2],
    /// Size of the file as of this revision.
    pub cumulative_size: usize,
    pub xref_kind: &'static str,
    /// In-use entries listed by this revision's own section.
    pub object_count: usize,
    pub info_metadata: BTreeMap<String, String>,
}

/// Every command prints one of these on stdout. Field order is fixed by
/// declaration order; nothing in it depends on the clock.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub input_path: String,
    pub file_size: usize,
    pub header_version: Option<String>,
    pub revision_count: usize,
    pub revisions: Vec<RevisionSummary>,
    pub anomalies: Vec<String>,
    pub result: T,
}

#[derive(Debug, Clone, Default)]
pub struct FileSummary {
    pub input_path: String,
    pub file_size: usize,
    pub header_version: Option<String>,
    pub revisions: Vec<RevisionSummary>,
    pub anomalies: Vec<String>,
}

impl FileSummary {
    pub fn of_document(path: &str, doc: &Document) -> Self {
        let revisions = doc
            .revisions()
            .iter()
            .map(|r| RevisionSummary {
                index: r.index,
                byte_range: span_pair(r.block_span),
                cumulative_size: r.cumulative_end,
                xref_kind: if r.is_xref_stream() { "stream" } else { "table" },
                object_count: r.xref.entries().filter(|e| e.in_use).count(),
                info_metadata: extract_info(doc, r.index).entries,
            })
            .collect();
        FileSummary {
            input_path: path.to_string(),
            file_size: doc.len(),
            header_version: Some(doc.header_version().to_string()),
            revisions,
            anomalies: doc.anomalies().to_vec(),
        }
    }

    /// For inputs no revision chain could be built for.
    pub fn of_unparsed(path: &str, len: usize, why: String) -> Self {
        FileSummary { input_path: path.to_string(), file_size: len, anomalies: vec![why], ..Default::default() }
    }

    pub fn report<T: Serialize>(self, command: &'static str, result: T) -> Report<T> {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            input_path: self.input_path,
            file_size: self.file_size,
            header_version: self.header_version,
            revision_count: self.revisions.len(),
            revisions: self.revisions,
            anomalies: self.anomalies,
            result,
        }
    }
}

pub fn span_pair(span: ByteSpan) -> [usize; 2] {
    [span.start, span.end()]
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}
