//! Forensics for incrementally updated PDF files: enumerate revisions,
//! recover earlier versions, read per-revision text, images and `/Info`,
//! list superseded objects, map every byte, and plant or detect hidden
//! payloads.
//!
//! ```
//! use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};
//!
//! let (original, _) = write_pdf(&[PageSpec::text(&["draft"])], &WriteOptions::default())?;
//! let mut edit = EditScript::default();
//! edit.page_edits.insert(0, PageSpec::text(&["final"]));
//! let (edited, _) = incremental_save(&original, &edit)?;
//!
//! let doc = pdfresidue::build_revision_chain(edited)?;
//! assert_eq!(doc.revision_count(), 2);
//! assert_eq!(pdfresidue::extract::extract_text(&doc, 0)?[0].joined, "draft");
//! assert_eq!(pdfresidue::recover::recover_by_truncation(&doc, 0)?, original);
//! # Ok::<(), pdfresidue::Error>(())
//! ```

pub mod cli;
pub mod cos;
pub mod error;
pub mod extract;
pub mod filters;
pub mod fixture;
pub mod pagetree;
pub mod recover;
pub mod residual;
pub mod revisions;
pub mod stego;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use revisions::{build_revision_chain, Document};
