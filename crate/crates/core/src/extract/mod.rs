//! Text and image extraction from a revision's pages.

mod cmap;
mod content;
mod encoding;
mod images;
mod text;

pub use cmap::{parse_to_unicode, ToUnicodeMap};
pub use content::{tokenize_content, Operation, Tokenized};
pub use encoding::{decode_text_string, encode_text_string, pdf_doc_char, BaseEncoding};
pub use images::{extract_images, ExtractedImage, ImageError, ImageExtraction, ImageFormat};
pub use text::{extract_text, extract_text_with, FontMap, PageText, TextOptions, TextRun};
