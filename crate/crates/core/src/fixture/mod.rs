//! A small PDF writer for building test files with known contents.
//!
//! [`write_pdf`] produces a single-revision file, [`incremental_save`]
//! appends an update the way an editor's "Save" does (changed objects keep
//! their numbers, a new xref section lists only them, `/Prev` links back),
//! and [`full_save`] rewrites the current state as one clean block. Every
//! call returns a [`Manifest`] describing exactly what was written, which
//! tests use as ground truth.

pub mod encode;
pub(crate) mod writer;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cos::{ByteSpan, CosValue, Dict, ObjectId, PdfString};
use crate::error::{Error, Result};
use crate::extract::encode_text_string;
use crate::filters::FilterName;
use crate::pagetree::walk_pages;
use crate::revisions::{build_revision_chain, Document};

use writer::{Body, BlockWriter};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FontKind {
    /// Helvetica with WinAnsiEncoding.
    #[default]
    Latin,
    /// A Type0 font with Identity-H codes and a ToUnicode CMap.
    IdentityUnicode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextSpec {
    pub text: String,
    #[serde(default)]
    pub font: FontKind,
}

impl TextSpec {
    pub fn latin(text: impl Into<String>) -> Self {
        TextSpec { text: text.into(), font: FontKind::Latin }
    }

    pub fn unicode(text: impl Into<String>) -> Self {
        TextSpec { text: text.into(), font: FontKind::IdentityUnicode }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageKind {
    /// JPEG bytes embedded untouched under DCTDecode.
    Jpeg,
    /// 8-bit RGB samples, Flate-compressed.
    Rgb8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSpec {
    pub format: ImageKind,
    #[serde(with = "base64_bytes")]
    pub payload: Vec<u8>,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    #[serde(default)]
    pub texts: Vec<TextSpec>,
    #[serde(default)]
    pub images: Vec<ImageSpec>,
}

impl PageSpec {
    pub fn text(lines: &[&str]) -> Self {
        PageSpec { texts: lines.iter().map(|t| TextSpec::latin(*t)).collect(), images: Vec::new() }
    }

    /// What [`crate::extract::extract_text`] returns for this page: one
    /// line per non-empty text item.
    pub fn expected_text(&self) -> String {
        let lines: Vec<&str> = self.texts.iter().map(|t| t.text.as_str()).filter(|t| !t.is_empty()).collect();
        lines.join("\n")
    }
}

/// Changes applied by one [`incremental_save`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    #[serde(default)]
    pub page_edits: BTreeMap<usize, PageSpec>,
    #[serde(default)]
    pub pages_appended: Vec<PageSpec>,
    #[serde(default)]
    pub info_updates: BTreeMap<String, String>,
}

impl EditScript {
    pub fn is_empty(&self) -> bool {
        self.page_edits.is_empty() && self.pages_appended.is_empty() && self.info_updates.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WriteOptions {
    /// Filters for content streams, in decode order. Empty writes them raw.
    pub content_filters: Vec<FilterName>,
    /// Close the file with a cross-reference stream instead of a table.
    pub xref_stream: bool,
    pub info: BTreeMap<String, String>,
}

impl Default for WriteOptions {
    fn default() -> Self {
        let info = [("Producer", "pdfresidue fixture"), ("CreationDate", BASE_DATE), ("ModDate", BASE_DATE)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        WriteOptions { content_filters: vec![FilterName::FlateDecode], xref_stream: false, info }
    }
}

const BASE_DATE: &str = "D:20080101000000Z";

/// ModDate stamped by the `n`th save: one minute after the previous one, so
/// dates are distinct without reading a clock.
fn save_date(n: usize) -> String {
    format!("D:20080101{:02}{:02}00Z", (n / 60) % 24, n % 60)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectRole {
    Catalog,
    Pages,
    Info,
    LatinFont,
    UnicodeFont { page: usize },
    CidFont { page: usize },
    ToUnicode { page: usize },
    Page { page: usize },
    Content { page: usize },
    Image { page: usize, index: usize },
    XrefStream,
    /// A stream written to carry hidden data, or the empty one replacing it.
    Carrier,
    /// Copied unchanged by a full save.
    Copied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestObject {
    pub id: ObjectId,
    /// `N G obj` through `endobj`.
    pub span: ByteSpan,
    pub role: ObjectRole,
    /// Stream data before any filter was applied.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_base64")]
    pub payload: Option<Vec<u8>>,
}

/// What one write appended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    /// Index of the revision this write created.
    pub revision: usize,
    /// Where this write's block starts.
    pub block_start: usize,
    pub file_len: usize,
    pub xref_offset: usize,
    /// Pages in the document after the write.
    pub page_count: usize,
    /// Objects in the order they were written.
    pub objects: Vec<ManifestObject>,
}

impl Manifest {
    pub fn object(&self, role: ObjectRole) -> Option<&ManifestObject> {
        self.objects.iter().find(|o| o.role == role)
    }
}

const LATIN_FONT: &str = "F1";
const UNICODE_FONT: &str = "F2";

/// Writes a fresh single-revision file.
///
/// Object numbers: 1 catalog, 2 page tree root, 3 info, 4 the shared Latin
/// font, then per page its page object, content stream, Type0 font trio
/// (only if the page uses Unicode text) and images.
pub fn write_pdf(pages: &[PageSpec], options: &WriteOptions) -> Result<(Vec<u8>, Manifest)> {
    let mut w = BlockWriter::new(Vec::new(), 0, 5);
    let catalog = ObjectId::new(1, 0);
    let pages_root = ObjectId::new(2, 0);
    let info = ObjectId::new(3, 0);
    let font = ObjectId::new(4, 0);

    let mut kids = Vec::with_capacity(pages.len());
    let mut page_objects = Vec::new();
    for (index, spec) in pages.iter().enumerate() {
        let page = w.allocate();
        let content = w.allocate();
        kids.push(CosValue::Reference(page));
        page_objects.push((index, spec, page, content));
    }

    w.object(catalog, ObjectRole::Catalog, Body::Value(catalog_dict(pages_root)));
    w.object(pages_root, ObjectRole::Pages, Body::Value(pages_dict(kids)));
    w.object(info, ObjectRole::Info, Body::Value(info_dict(&options.info)));
    w.object(font, ObjectRole::LatinFont, Body::Value(latin_font()));
    for (index, spec, page, content) in page_objects {
        let parent = pages_root;
        write_page(&mut w, options, index, spec, page, content, parent, font)?;
    }

    let mut trailer = Dict::new();
    trailer.insert("Root", CosValue::Reference(catalog));
    trailer.insert("Info", CosValue::Reference(info));
    let manifest_pages = pages.len();
    let (bytes, mut manifest) = w.finish(trailer, options.xref_stream, true)?;
    manifest.page_count = manifest_pages;
    Ok((bytes, manifest))
}

/// Appends one update applying `edits` to the current state of `bytes`.
/// The original bytes are left untouched.
pub fn incremental_save(bytes: &[u8], edits: &EditScript) -> Result<(Vec<u8>, Manifest)> {
    incremental_save_with(bytes, edits, &WriteOptions::default())
}

/// [`incremental_save`] with explicit content filters. The xref form follows
/// the file's last revision rather than `options.xref_stream`.
pub fn incremental_save_with(bytes: &[u8], edits: &EditScript, options: &WriteOptions) -> Result<(Vec<u8>, Manifest)> {
    let doc = build_revision_chain(bytes.to_vec())?;
    let last = doc.last_revision();
    let walk = walk_pages(&doc, last)?;
    let page_count = walk.pages.len();
    for &index in edits.page_edits.keys() {
        if index >= page_count {
            return Err(Error::BadEditScript(format!(
                "page {index} does not exist (document has {page_count})"
            )));
        }
    }

    let next = next_free_number(&doc, last);
    let mut w = BlockWriter::new(bytes.to_vec(), doc.revision_count(), next);
    let xref_stream = doc.revisions()[last].is_xref_stream();

    let catalog_id = doc.root(last).ok_or_else(|| Error::BadEditScript("trailer has no /Root".into()))?;
    let catalog = doc.catalog(last)?;
    let pages_root = catalog
        .get_ref("Pages")
        .ok_or_else(|| Error::BadEditScript("catalog has no /Pages".into()))?;

    let needs_font = !edits.page_edits.is_empty() || !edits.pages_appended.is_empty();
    let font = if needs_font { Some(find_latin_font(&doc, last, &walk.pages, &mut w)) } else { None };

    for (&index, spec) in &edits.page_edits {
        let page = &walk.pages[index];
        let content = match page.contents.first() {
            Some(&c) => c,
            None => w.allocate(),
        };
        let parent = match doc.resolve(last, page.page_object)?.0 {
            CosValue::Dict(d) => d.get_ref("Parent").unwrap_or(pages_root),
            _ => pages_root,
        };
        write_page(&mut w, options, index, spec, page.page_object, content, parent, font.unwrap())?;
    }

    if !edits.pages_appended.is_empty() {
        let mut root = match doc.resolve(last, pages_root)?.0 {
            CosValue::Dict(d) => d,
            _ => return Err(Error::BadEditScript("/Pages is not a dictionary".into())),
        };
        let mut kids: Vec<CosValue> = root
            .get("Kids")
            .map(|k| doc.deref(last, k))
            .and_then(|k| k.as_array().map(<[CosValue]>::to_vec))
            .unwrap_or_default();
        let mut new_pages = Vec::new();
        for (offset, spec) in edits.pages_appended.iter().enumerate() {
            let page = w.allocate();
            let content = w.allocate();
            kids.push(CosValue::Reference(page));
            new_pages.push((page_count + offset, spec, page, content));
        }
        root.insert("Kids", CosValue::Array(kids));
        root.insert("Count", CosValue::Integer((page_count + edits.pages_appended.len()) as i64));
        w.object(pages_root, ObjectRole::Pages, Body::Value(CosValue::Dict(root)));
        for (index, spec, page, content) in new_pages {
            write_page(&mut w, options, index, spec, page, content, pages_root, font.unwrap())?;
        }
    }

    let mut info_id = doc.trailer_entry(last, "Info").and_then(CosValue::as_reference);
    if !edits.is_empty() {
        let mut info = match info_id.map(|id| doc.resolve(last, id)) {
            Some(Ok((CosValue::Dict(d), _))) => d,
            _ => Dict::new(),
        };
        info.insert("ModDate", CosValue::String(PdfString::literal(save_date(doc.revision_count()))));
        for (k, v) in &edits.info_updates {
            info.insert(k.as_bytes(), CosValue::String(PdfString::literal(encode_text_string(v))));
        }
        let id = info_id.unwrap_or_else(|| w.allocate());
        info_id = Some(id);
        w.object(id, ObjectRole::Info, Body::Value(CosValue::Dict(info)));
    }

    let mut trailer = Dict::new();
    trailer.insert("Root", CosValue::Reference(catalog_id));
    if let Some(id) = info_id {
        trailer.insert("Info", CosValue::Reference(id));
    }
    let prev = doc.revisions()[last].trailer.startxref_value;
    trailer.insert("Prev", CosValue::Integer(prev as i64));
    let (bytes, mut manifest) = w.finish(trailer, xref_stream, false)?;
    manifest.page_count = page_count + edits.pages_appended.len();
    Ok((bytes, manifest))
}

/// Rewrites the final revision as a single block: only objects reachable
/// from `/Root` and `/Info` survive, each under its current number.
pub fn full_save(bytes: &[u8]) -> Result<Vec<u8>> {
    let doc = build_revision_chain(bytes.to_vec())?;
    let last = doc.last_revision();
    let root = doc.root(last).ok_or_else(|| Error::BadEditScript("trailer has no /Root".into()))?;
    let info = doc.trailer_entry(last, "Info").and_then(CosValue::as_reference);

    let mut reached: BTreeMap<ObjectId, Body> = BTreeMap::new();
    let mut queue: VecDeque<ObjectId> = [Some(root), info].into_iter().flatten().collect();
    let mut seen: BTreeSet<u32> = queue.iter().map(|id| id.number).collect();
    while let Some(id) = queue.pop_front() {
        let Ok((value, _)) = doc.resolve(last, id) else { continue };
        let (refs, body) = match value {
            CosValue::Stream(s) => {
                // The length goes inline, so an indirect /Length object is
                // not carried over.
                let mut dict = s.dict;
                dict.remove("Length");
                let raw = s.raw.slice(doc.bytes()).unwrap_or_default().to_vec();
                (CosValue::Dict(dict.clone()).references(), Body::RawStream { dict, raw, payload: None })
            }
            other => (other.references(), Body::Value(other)),
        };
        for r in refs {
            if seen.insert(r.number) {
                queue.push_back(r);
            }
        }
        reached.insert(id, body);
    }

    let size = reached.keys().map(|id| id.number + 1).max().unwrap_or(1);
    let mut w = BlockWriter::new(Vec::new(), 0, size);
    for (id, body) in reached {
        w.object(id, ObjectRole::Copied, body);
    }
    let mut trailer = Dict::new();
    trailer.insert("Root", CosValue::Reference(root));
    if let Some(info) = info {
        trailer.insert("Info", CosValue::Reference(info));
    }
    Ok(w.finish(trailer, false, true)?.0)
}

/// A whole fixture: initial pages plus a sequence of saves. This is the
/// JSON accepted by the `fixture` command.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub pages: Vec<PageSpec>,
    #[serde(default)]
    pub saves: Vec<EditScript>,
    /// Write content streams uncompressed.
    #[serde(default)]
    pub raw_content: bool,
    #[serde(default)]
    pub xref_stream: bool,
    #[serde(default)]
    pub info: BTreeMap<String, String>,
}

/// Every intermediate file of a [`FixtureSpec`] build; `files[0]` is the
/// original and `files.last()` the final result.
#[derive(Debug, Clone)]
pub struct FixtureBuild {
    pub files: Vec<Vec<u8>>,
    pub manifests: Vec<Manifest>,
}

impl FixtureBuild {
    pub fn final_bytes(&self) -> &[u8] {
        self.files.last().expect("a build always has its original file")
    }
}

pub fn build_fixture(spec: &FixtureSpec) -> Result<FixtureBuild> {
    let mut options = WriteOptions { xref_stream: spec.xref_stream, ..WriteOptions::default() };
    if spec.raw_content {
        options.content_filters.clear();
    }
    options.info.extend(spec.info.iter().map(|(k, v)| (k.clone(), v.clone())));
    let (bytes, manifest) = write_pdf(&spec.pages, &options)?;
    let mut build = FixtureBuild { files: vec![bytes], manifests: vec![manifest] };
    for script in &spec.saves {
        let (bytes, manifest) = incremental_save_with(build.final_bytes(), script, &options)?;
        build.files.push(bytes);
        build.manifests.push(manifest);
    }
    Ok(build)
}

pub(crate) fn next_free_number(doc: &Document, rev: usize) -> u32 {
    let from_size = doc
        .trailer_entry(rev, "Size")
        .and_then(CosValue::as_int)
        .and_then(|n| u32::try_from(n).ok())
        .unwrap_or(1);
    let from_view = doc.view(rev).ok().and_then(|v| v.keys().next_back().copied()).map_or(1, |n| n + 1);
    from_size.max(from_view).max(1)
}

/// The `/F1` font of the first page that has one, or a freshly written one.
fn find_latin_font(doc: &Document, rev: usize, pages: &[crate::pagetree::PageRef], w: &mut BlockWriter) -> ObjectId {
    for page in pages {
        let resources = page.resources_dict(doc);
        if let Some(CosValue::Dict(fonts)) = resources.get("Font").map(|f| doc.deref(rev, f)) {
            if let Some(id) = fonts.get(LATIN_FONT).and_then(CosValue::as_reference) {
                return id;
            }
        }
    }
    let id = w.allocate();
    w.object(id, ObjectRole::LatinFont, Body::Value(latin_font()));
    id
}

fn catalog_dict(pages: ObjectId) -> CosValue {
    let mut d = Dict::new();
    d.insert("Type", CosValue::name("Catalog"));
    d.insert("Pages", CosValue::Reference(pages));
    CosValue::Dict(d)
}

fn pages_dict(kids: Vec<CosValue>) -> CosValue {
    let mut d = Dict::new();
    d.insert("Type", CosValue::name("Pages"));
    d.insert("Count", CosValue::Integer(kids.len() as i64));
    d.insert("Kids", CosValue::Array(kids));
    CosValue::Dict(d)
}

fn info_dict(info: &BTreeMap<String, String>) -> CosValue {
    let mut d = Dict::new();
    for (k, v) in info {
        d.insert(k.as_bytes(), CosValue::String(PdfString::literal(encode_text_string(v))));
    }
    CosValue::Dict(d)
}

fn latin_font() -> CosValue {
    let mut d = Dict::new();
    d.insert("Type", CosValue::name("Font"));
    d.insert("Subtype", CosValue::name("Type1"));
    d.insert("BaseFont", CosValue::name("Helvetica"));
    d.insert("Encoding", CosValue::name("WinAnsiEncoding"));
    CosValue::Dict(d)
}

/// Writes a page object, its content stream and any per-page resources.
#[allow(clippy::too_many_arguments)]
fn write_page(
    w: &mut BlockWriter,
    options: &WriteOptions,
    index: usize,
    spec: &PageSpec,
    page: ObjectId,
    content: ObjectId,
    parent: ObjectId,
    latin: ObjectId,
) -> Result<()> {
    // Unicode text uses two-byte codes numbered by first appearance.
    let mut glyphs: Vec<char> = Vec::new();
    for t in spec.texts.iter().filter(|t| t.font == FontKind::IdentityUnicode) {
        for c in t.text.chars() {
            if !glyphs.contains(&c) {
                glyphs.push(c);
            }
        }
    }
    let code_of = |c: char| glyphs.iter().position(|&g| g == c).unwrap() as u16 + 1;
    if glyphs.len() >= u16::MAX as usize {
        return Err(Error::Precondition("too many distinct characters on one page".into()));
    }

    let mut program = Vec::new();
    for (line, t) in spec.texts.iter().enumerate() {
        let y = 720 - 16 * (line as i64 % 40);
        let shown = match t.font {
            FontKind::Latin => {
                let (bytes, _, unmappable) = encoding_rs::WINDOWS_1252.encode(&t.text);
                if unmappable {
                    return Err(Error::Precondition(format!(
                        "text {:?} is not representable in WinAnsiEncoding; use the unicode font",
                        t.text
                    )));
                }
                CosValue::String(PdfString::literal(bytes.into_owned()))
            }
            FontKind::IdentityUnicode => {
                let codes: Vec<u8> = t.text.chars().flat_map(|c| code_of(c).to_be_bytes()).collect();
                CosValue::String(PdfString::hex(codes))
            }
        };
        let font = if t.font == FontKind::Latin { LATIN_FONT } else { UNICODE_FONT };
        program.extend_from_slice(format!("BT /{font} 12 Tf 72 {y} Td ").as_bytes());
        shown.write_to(&mut program);
        program.extend_from_slice(b" Tj ET\n");
    }

    let mut image_names = Dict::new();
    let mut image_objects = Vec::new();
    for (k, img) in spec.images.iter().enumerate() {
        let id = w.allocate();
        let name = format!("Im{k}");
        let y = 100 + 10 * k;
        program.extend_from_slice(
            format!("q {} 0 0 {} 300 {y} cm /{name} Do Q\n", img.width, img.height).as_bytes(),
        );
        image_names.insert(name.as_bytes(), CosValue::Reference(id));
        image_objects.push((id, k, img));
    }

    let mut fonts = Dict::new();
    fonts.insert(LATIN_FONT, CosValue::Reference(latin));
    let unicode_ids = if glyphs.is_empty() {
        None
    } else {
        let ids = (w.allocate(), w.allocate(), w.allocate());
        fonts.insert(UNICODE_FONT, CosValue::Reference(ids.0));
        Some(ids)
    };
    let mut resources = Dict::new();
    resources.insert("Font", CosValue::Dict(fonts));
    if !image_names.is_empty() {
        resources.insert("XObject", CosValue::Dict(image_names));
    }

    let mut page_dict = Dict::new();
    page_dict.insert("Type", CosValue::name("Page"));
    page_dict.insert("Parent", CosValue::Reference(parent));
    page_dict.insert(
        "MediaBox",
        CosValue::Array([0, 0, 612, 792].into_iter().map(CosValue::Integer).collect()),
    );
    page_dict.insert("Contents", CosValue::Reference(content));
    page_dict.insert("Resources", CosValue::Dict(resources));
    w.object(page, ObjectRole::Page { page: index }, Body::Value(CosValue::Dict(page_dict)));
    w.object(
        content,
        ObjectRole::Content { page: index },
        Body::stream(Dict::new(), &options.content_filters, program)?,
    );

    if let Some((type0, cid, cmap)) = unicode_ids {
        let mut d = Dict::new();
        d.insert("Type", CosValue::name("Font"));
        d.insert("Subtype", CosValue::name("Type0"));
        d.insert("BaseFont", CosValue::name("FixtureUnicode"));
        d.insert("Encoding", CosValue::name("Identity-H"));
        d.insert("DescendantFonts", CosValue::Array(vec![CosValue::Reference(cid)]));
        d.insert("ToUnicode", CosValue::Reference(cmap));
        w.object(type0, ObjectRole::UnicodeFont { page: index }, Body::Value(CosValue::Dict(d)));

        let mut sys = Dict::new();
        sys.insert("Registry", CosValue::String(PdfString::literal(&b"Adobe"[..])));
        sys.insert("Ordering", CosValue::String(PdfString::literal(&b"Identity"[..])));
        sys.insert("Supplement", CosValue::Integer(0));
        let mut d = Dict::new();
        d.insert("Type", CosValue::name("Font"));
        d.insert("Subtype", CosValue::name("CIDFontType2"));
        d.insert("BaseFont", CosValue::name("FixtureUnicode"));
        d.insert("CIDSystemInfo", CosValue::Dict(sys));
        d.insert("CIDToGIDMap", CosValue::name("Identity"));
        w.object(cid, ObjectRole::CidFont { page: index }, Body::Value(CosValue::Dict(d)));

        w.object(
            cmap,
            ObjectRole::ToUnicode { page: index },
            Body::stream(Dict::new(), &options.content_filters, to_unicode_cmap(&glyphs))?,
        );
    }

    for (id, k, img) in image_objects {
        w.object(id, ObjectRole::Image { page: index, index: k }, image_body(img)?);
    }
    Ok(())
}

fn image_body(img: &ImageSpec) -> Result<Body> {
    let mut d = Dict::new();
    d.insert("Type", CosValue::name("XObject"));
    d.insert("Subtype", CosValue::name("Image"));
    d.insert("Width", CosValue::Integer(i64::from(img.width)));
    d.insert("Height", CosValue::Integer(i64::from(img.height)));
    d.insert("BitsPerComponent", CosValue::Integer(8));
    d.insert("ColorSpace", CosValue::name("DeviceRGB"));
    match img.format {
        ImageKind::Jpeg => {
            if !img.payload.starts_with(&[0xFF, 0xD8]) {
                return Err(Error::UnsupportedImageFormat("JPEG payload does not start with an SOI marker".into()));
            }
            d.insert("Filter", CosValue::name("DCTDecode"));
            Ok(Body::RawStream { dict: d, raw: img.payload.clone(), payload: Some(img.payload.clone()) })
        }
        ImageKind::Rgb8 => {
            let expected = img.width as usize * img.height as usize * 3;
            if img.payload.len() != expected {
                return Err(Error::UnsupportedImageFormat(format!(
                    "{}x{} RGB image needs {expected} bytes, got {}",
                    img.width,
                    img.height,
                    img.payload.len()
                )));
            }
            Body::stream(d, &[FilterName::FlateDecode], img.payload.clone())
        }
    }
}

/// A ToUnicode CMap mapping code `i + 1` to `glyphs[i]`.
fn to_unicode_cmap(glyphs: &[char]) -> Vec<u8> {
    let mut out = String::from(
        "/CIDInit /ProcSet findresource begin\n12 dict begin\nbegincmap\n\
         /CIDSystemInfo << /Registry (Adobe) /Ordering (UCS) /Supplement 0 >> def\n\
         /CMapName /Fixture-UCS def\n/CMapType 2 def\n\
         1 begincodespacerange\n<0000> <FFFF>\nendcodespacerange\n",
    );
    for (chunk_no, chunk) in glyphs.chunks(100).enumerate() {
        out.push_str(&format!("{} beginbfchar\n", chunk.len()));
        for (i, c) in chunk.iter().enumerate() {
            let code = chunk_no * 100 + i + 1;
            let mut units = [0u16; 2];
            let hex: String = c.encode_utf16(&mut units).iter().map(|u| format!("{u:04X}")).collect();
            out.push_str(&format!("<{code:04X}> <{hex}>\n"));
        }
        out.push_str("endbfchar\n");
    }
    out.push_str("endcmap\nCMapName currentdict /CMap defineresource pop\nend\nend\n");
    out.into_bytes()
}

mod base64_bytes {
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&base64::engine::general_purpose::STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        base64::engine::general_purpose::STANDARD
            .decode(text.trim())
            .map_err(serde::de::Error::custom)
    }
}

mod opt_base64 {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(bytes: &Option<Vec<u8>>, s: S) -> Result<S::Ok, S::Error> {
        match bytes {
            Some(b) => super::base64_bytes::serialize(b, s),
            None => s.serialize_none(),
        }
    }
}
