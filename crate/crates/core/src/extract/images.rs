use std::collections::HashSet;

use serde::Serialize;

use crate::cos::{CosValue, Dict, Name, ObjectId, Stream};
use crate::error::Result;
use crate::filters::FilterName;
use crate::pagetree::walk_pages;
use crate::revisions::Document;

const MAX_FORM_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImageFormat {
    Jpeg,
    Jpeg2000,
    RawPixmap,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Jpeg => "jpg",
            ImageFormat::Jpeg2000 => "jp2",
            ImageFormat::RawPixmap => "raw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractedImage {
    pub page_index: usize,
    pub object_id: ObjectId,
    pub format: ImageFormat,
    pub width: u32,
    pub height: u32,
    pub bits_per_component: u32,
    pub color_space: Name,
    /// Set when this image is another image's soft mask.
    pub soft_mask_of: Option<ObjectId>,
    #[serde(skip)]
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageError {
    pub page_index: usize,
    pub object_id: ObjectId,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImageExtraction {
    pub images: Vec<ExtractedImage>,
    pub errors: Vec<ImageError>,
}

/// Extracts the image XObjects used by each page of revision `rev`.
/// JPEG and JPEG 2000 data is passed through untouched; other images are
/// returned as decoded samples.
pub fn extract_images(doc: &Document, rev: usize) -> Result<ImageExtraction> {
    let walk = walk_pages(doc, rev)?;
    let mut out = ImageExtraction::default();
    for page in &walk.pages {
        let mut seen = HashSet::new();
        let resources = page.resources_dict(doc);
        collect(doc, rev, page.page_index, &resources, 0, &mut seen, &mut out);
    }
    Ok(out)
}

fn collect(
    doc: &Document,
    rev: usize,
    page_index: usize,
    resources: &Dict,
    depth: usize,
    seen: &mut HashSet<ObjectId>,
    out: &mut ImageExtraction,
) {
    let xobjects = match resources.get("XObject").map(|x| doc.deref(rev, x)) {
        Some(CosValue::Dict(d)) => d,
        _ => return,
    };
    for (_, value) in xobjects.iter() {
        let Some(id) = value.as_reference() else { continue };
        if !seen.insert(id) {
            continue;
        }
        let stream = match doc.resolve(rev, id) {
            Ok((CosValue::Stream(s), _)) => s,
            Ok(_) => continue,
            Err(e) => {
                out.errors.push(ImageError { page_index, object_id: id, message: e.to_string() });
                continue;
            }
        };
        match stream.dict.get_name("Subtype") {
            Some(b"Image") => {
                push_image(doc, rev, page_index, id, &stream, None, out);
                if let Some(mask) = stream.dict.get_ref("SMask") {
                    if seen.insert(mask) {
                        match doc.resolve(rev, mask) {
                            Ok((CosValue::Stream(m), _)) => {
                                push_image(doc, rev, page_index, mask, &m, Some(id), out)
                            }
                            Ok(_) => {}
                            Err(e) => out.errors.push(ImageError {
                                page_index,
                                object_id: mask,
                                message: e.to_string(),
                            }),
                        }
                    }
                }
            }
            Some(b"Form") if depth < MAX_FORM_DEPTH => {
                if let Some(CosValue::Dict(inner)) = stream.dict.get("Resources").map(|r| doc.deref(rev, r)) {
                    collect(doc, rev, page_index, &inner, depth + 1, seen, out);
                }
            }
            _ => {}
        }
    }
}

fn push_image(
    doc: &Document,
    rev: usize,
    page_index: usize,
    id: ObjectId,
    stream: &Stream,
    soft_mask_of: Option<ObjectId>,
    out: &mut ImageExtraction,
) {
    let decoded = match doc.decode_stream(rev, stream) {
        Ok(d) => d,
        Err(e) => {
            out.errors.push(ImageError { page_index, object_id: id, message: e.to_string() });
            return;
        }
    };
    let format = match decoded.terminal.as_ref().map(|t| &t.name) {
        Some(FilterName::DctDecode) => ImageFormat::Jpeg,
        Some(FilterName::JpxDecode) => ImageFormat::Jpeg2000,
        Some(other) => {
            out.errors.push(ImageError {
                page_index,
                object_id: id,
                message: format!("{} images are not extracted", String::from_utf8_lossy(other.as_pdf_name())),
            });
            return;
        }
        None if decoded.unknown_filter.is_some() => {
            out.errors.push(ImageError {
                page_index,
                object_id: id,
                message: format!("unknown filter {}", decoded.unknown_filter.unwrap()),
            });
            return;
        }
        None => ImageFormat::RawPixmap,
    };
    let dim = |key: &str| {
        stream
            .dict
            .get(key)
            .map(|v| doc.deref(rev, v))
            .and_then(|v| v.as_int())
            .and_then(|n| u32::try_from(n).ok())
            .unwrap_or(0)
    };
    let color_space = match stream.dict.get("ColorSpace").map(|c| doc.deref(rev, c)) {
        Some(CosValue::Name(n)) => n,
        Some(CosValue::Array(items)) => items
            .first()
            .and_then(CosValue::as_name)
            .map(Name::new)
            .unwrap_or_else(|| Name::new("Unknown")),
        _ if stream.dict.get("ImageMask").is_some() => Name::new("ImageMask"),
        _ => Name::new(if format == ImageFormat::RawPixmap { "DeviceGray" } else { "Unknown" }),
    };
    out.images.push(ExtractedImage {
        page_index,
        object_id: id,
        format,
        width: dim("Width"),
        height: dim("Height"),
        bits_per_component: if stream.dict.get("ImageMask").is_some() { 1 } else { dim("BitsPerComponent") },
        color_space,
        soft_mask_of,
        payload: decoded.data,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revisions::build_revision_chain;
    use crate::test_support::{assemble, stream};

    fn flate(data: &[u8]) -> Vec<u8> {
        use std::io::Write;
        let mut enc = flate2::write::ZlibEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(data).unwrap();
        enc.finish().unwrap()
    }

    fn with_images(images: Vec<String>) -> Document {
        let names: String = (0..images.len()).map(|i| format!("/Im{i} {} 0 R ", 5 + i)).collect();
        let mut objects = vec![
            "<</Type /Catalog /Pages 2 0 R>>".to_string(),
            "<</Type /Pages /Kids [3 0 R] /Count 1>>".to_string(),
            format!("<</Type /Page /Parent 2 0 R /Contents 4 0 R /Resources <</XObject <<{names}>>>>>>"),
            stream("", b"q /Im0 Do Q"),
        ];
        objects.extend(images);
        build_revision_chain(assemble(&objects)).unwrap()
    }

    /// A one-image page whose image payload is arbitrary bytes: assembled
    /// with a same-length placeholder, then overwritten in place.
    fn binary_file(image_dict: &str, payload: &[u8]) -> Document {
        let placeholder = "@".repeat(payload.len());
        let objects = vec![
            "<</Type /Catalog /Pages 2 0 R>>".to_string(),
            "<</Type /Pages /Kids [3 0 R] /Count 1>>".to_string(),
            "<</Type /Page /Parent 2 0 R /Contents 4 0 R /Resources <</XObject <</Im0 5 0 R>>>>>>".to_string(),
            stream("", b"q /Im0 Do Q"),
            format!("<<{image_dict} /Length {}>>\nstream\n{placeholder}\nendstream", payload.len()),
        ];
        let mut bytes = assemble(&objects);
        let at = memchr::memmem::find(&bytes, placeholder.as_bytes()).unwrap();
        bytes[at..at + payload.len()].copy_from_slice(payload);
        build_revision_chain(bytes).unwrap()
    }

    #[test]
    fn jpeg_passthrough() {
        let jpeg = [0xFF, 0xD8, 0xFF, 0xE0, 0x00, 0x10, b'J', b'F', b'I', b'F', 0x00, 0xFF, 0xD9];
        let doc = binary_file(
            "/Type /XObject /Subtype /Image /Width 1 /Height 1 /BitsPerComponent 8 /ColorSpace /DeviceRGB /Filter /DCTDecode",
            &jpeg,
        );
        let got = extract_images(&doc, 0).unwrap();
        assert!(got.errors.is_empty(), "{:?}", got.errors);
        assert_eq!(got.images.len(), 1);
        assert_eq!(got.images[0].format, ImageFormat::Jpeg);
        assert_eq!(got.images[0].payload, jpeg);
    }

    #[test]
    fn flate_rgb_pixmap() {
        let pixels: Vec<u8> = (0..12).collect();
        let doc = binary_file(
            "/Type /XObject /Subtype /Image /Width 2 /Height 2 /BitsPerComponent 8 /ColorSpace /DeviceRGB /Filter /FlateDecode",
            &flate(&pixels),
        );
        let got = extract_images(&doc, 0).unwrap();
        let img = &got.images[0];
        assert_eq!((img.format, img.width, img.height), (ImageFormat::RawPixmap, 2, 2));
        assert_eq!(img.payload, pixels);
        assert_eq!(img.color_space, Name::new("DeviceRGB"));
    }

    #[test]
    fn no_xobjects() {
        let doc = with_images(Vec::new());
        assert!(extract_images(&doc, 0).unwrap().images.is_empty());
    }

    #[test]
    fn soft_mask_is_separate() {
        let doc = with_images(vec![
            stream(
                "/Type /XObject /Subtype /Image /Width 1 /Height 1 /BitsPerComponent 8 /ColorSpace /DeviceGray /SMask 6 0 R",
                b"A",
            ),
            stream("/Type /XObject /Subtype /Image /Width 1 /Height 1 /BitsPerComponent 8 /ColorSpace /DeviceGray", b"B"),
        ]);
        let got = extract_images(&doc, 0).unwrap();
        assert_eq!(got.images.len(), 2);
        assert_eq!(got.images[1].soft_mask_of, Some(ObjectId::new(5, 0)));
        assert_eq!(got.images[1].payload, b"B");
    }
}
