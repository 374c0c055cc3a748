use crate::cos::ObjectId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed token at byte {offset}: {reason}")]
    MalformedToken { offset: usize, reason: String },

    #[error("no `N G obj` header at byte {offset}")]
    IdMismatch { offset: usize },

    #[error("stream {id} has an indirect /Length and no resolver was supplied")]
    StreamLengthUnresolvable { id: ObjectId },

    #[error("no startxref found near the end of the file")]
    NoStartxref,

    #[error("no cross-reference section at byte {offset}")]
    NotAnXref { offset: usize },

    #[error("cross-reference table at byte {offset} is truncated")]
    TruncatedTable { offset: usize },

    #[error("unsupported cross-reference stream field: {0}")]
    UnsupportedXrefStreamField(String),

    #[error("/Prev chain revisits byte offset {offset}")]
    PrevCycle { offset: usize },

    #[error("document is encrypted (/Encrypt present); decryption is not supported")]
    EncryptedDocument,

    #[error("revision {rev} does not exist (document has {count})")]
    RevisionOutOfRange { rev: usize, count: usize },

    #[error("object {0} is free")]
    FreeObject(ObjectId),

    #[error("object {0} is not in the cross-reference view")]
    UnknownObject(ObjectId),

    #[error("expected object {expected} at byte {offset}, found {}", found.map(|f| f.to_string()).unwrap_or_else(|| "no object".into()))]
    OffsetMismatch {
        expected: ObjectId,
        found: Option<ObjectId>,
        offset: usize,
    },

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error("broken page tree: {0}")]
    BrokenPageTree(String),

    #[error("page {page_index}: {source}")]
    Page {
        page_index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("file is not append-only: {0}")]
    NotAppendOnly(String),

    #[error("cross-reference entry cannot be rewritten in place: {0}")]
    EntryNotRewritable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no safe insertion point: {0}")]
    NoSafeInsertionPoint(String),

    #[error("locator out of range: {0}")]
    LocatorOutOfRange(String),

    #[error("invalid locator `{0}`")]
    InvalidLocator(String),

    #[error("bad edit script: {0}")]
    BadEditScript(String),

    #[error("unsupported image: {0}")]
    UnsupportedImageFormat(String),

    #[error("relocation audit failed: {0}")]
    AuditFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The variant name, used as a stable error code in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedToken { .. } => "MalformedToken",
            Error::IdMismatch { .. } => "IdMismatch",
            Error::StreamLengthUnresolvable { .. } => "StreamLengthUnresolvable",
            Error::NoStartxref => "NoStartxref",
            Error::NotAnXref { .. } => "NotAnXref",
            Error::TruncatedTable { .. } => "TruncatedTable",
            Error::UnsupportedXrefStreamField(_) => "UnsupportedXrefStreamField",
            Error::PrevCycle { .. } => "PrevCycle",
            Error::EncryptedDocument => "EncryptedDocument",
            Error::RevisionOutOfRange { .. } => "RevisionOutOfRange",
            Error::FreeObject(_) => "FreeObject",
            Error::UnknownObject(_) => "UnknownObject",
            Error::OffsetMismatch { .. } => "OffsetMismatch",
            Error::CorruptStream(_) => "CorruptStream",
            Error::BrokenPageTree(_) => "BrokenPageTree",
            Error::Page { source, .. } => source.kind(),
            Error::NotAppendOnly(_) => "NotAppendOnly",
            Error::EntryNotRewritable(_) => "EntryNotRewritable",
            Error::Precondition(_) => "Precondition",
            Error::NoSafeInsertionPoint(_) => "NoSafeInsertionPoint",
            Error::LocatorOutOfRange(_) => "LocatorOutOfRange",
            Error::InvalidLocator(_) => "InvalidLocator",
            Error::BadEditScript(_) => "BadEditScript",
            Error::UnsupportedImageFormat(_) => "UnsupportedImageFormat",
            Error::AuditFailed(_) => "AuditFailed",
            Error::Io(_) => "Io",
        }
    }

    pub(crate) fn malformed(offset: usize, reason: impl Into<String>) -> Self {
        Error::MalformedToken {
            offset,
            reason: reason.into(),
        }
    }

    pub(crate) fn on_page(self, page_index: usize) -> Self {
        Error::Page {
            page_index,
            source: Box::new(self),
        }
    }
}
