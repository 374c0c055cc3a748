use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::cmap::{parse_to_unicode, ToUnicodeMap};
use super::content::{tokenize_content, Operation};
use super::encoding::BaseEncoding;
use crate::cos::{CosValue, Dict, Name, ObjectId};
use crate::error::Result;
use crate::pagetree::{content_program, walk_pages};
use crate::revisions::Document;

/// Deepest form-XObject nesting followed for text.
const MAX_FORM_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextOptions {
    /// A `TJ` adjustment of more than this many thousandths of a text-space
    /// unit to the right (a negative number in the array) becomes a space.
    pub kerning_space_threshold: f64,
}

impl Default for TextOptions {
    fn default() -> Self {
        TextOptions { kerning_space_threshold: 200.0 }
    }
}

/// How to turn the string operands shown with one font into text.
#[derive(Debug, Clone, PartialEq)]
pub struct FontMap {
    pub resource_name: Name,
    pub base_encoding: BaseEncoding,
    pub to_unicode: Option<ToUnicodeMap>,
}

impl FontMap {
    pub fn fallback(resource_name: Name) -> Self {
        FontMap {
            resource_name,
            base_encoding: BaseEncoding::WinAnsi,
            to_unicode: None,
        }
    }

    /// Reads a font dictionary's encoding and ToUnicode map.
    pub fn from_font(doc: &Document, rev: usize, resource_name: Name, font: &Dict) -> Self {
        let subtype = font.get_name("Subtype");
        let encoding = font.get("Encoding").map(|e| doc.deref(rev, e));
        let base_encoding = if subtype == Some(b"Type0") {
            BaseEncoding::IdentityTwoByte
        } else {
            match &encoding {
                Some(CosValue::Name(n)) => BaseEncoding::from_name(n.as_bytes()),
                Some(CosValue::Dict(d)) => d.get_name("BaseEncoding").and_then(BaseEncoding::from_name),
                _ => None,
            }
            .filter(|e| *e != BaseEncoding::IdentityTwoByte)
            .unwrap_or(BaseEncoding::WinAnsi)
        };
        let to_unicode = match font.get("ToUnicode").map(|t| doc.deref(rev, t)) {
            Some(CosValue::Stream(s)) => doc.decode_stream(rev, &s).ok().map(|d| parse_to_unicode(&d.data)),
            _ => None,
        };
        FontMap {
            resource_name,
            base_encoding,
            to_unicode,
        }
    }

    fn code_width(&self) -> usize {
        match self.base_encoding {
            BaseEncoding::IdentityTwoByte => 2,
            _ => 1,
        }
    }

    /// Decodes a shown string; returns the text and how many codes had no
    /// mapping.
    pub fn decode(&self, bytes: &[u8]) -> (String, usize) {
        let width = self.code_width();
        let mut text = String::new();
        let mut unknown = 0;
        for chunk in bytes.chunks(width) {
            let code = chunk.iter().fold(0u32, |acc, &b| acc << 8 | u32::from(b));
            if let Some(mapped) = self.to_unicode.as_ref().and_then(|m| m.get(code)) {
                text.push_str(mapped);
                continue;
            }
            match (chunk.len(), self.base_encoding.decode_byte(chunk[0])) {
                (1, Some(c)) => text.push(c),
                _ => {
                    unknown += 1;
                    text.push('\u{FFFD}');
                }
            }
        }
        (text, unknown)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TextRun {
    pub text: String,
    pub page_index: usize,
    /// Emission order within the page.
    pub order: usize,
    /// Whether a text-positioning boundary precedes this run.
    pub line_break_before: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PageText {
    pub page_index: usize,
    pub runs: Vec<TextRun>,
    pub joined: String,
    pub warnings: Vec<String>,
    /// Set when the page's content could not be read at all.
    pub error: Option<String>,
}

impl PageText {
    /// Rebuilds `joined` from the runs and their break flags.
    pub fn join_runs(runs: &[TextRun]) -> String {
        let mut joined = String::new();
        for run in runs {
            if run.line_break_before {
                joined.push('\n');
            }
            joined.push_str(&run.text);
        }
        joined
    }
}

/// Extracts the text of every page of revision `rev`.
pub fn extract_text(doc: &Document, rev: usize) -> Result<Vec<PageText>> {
    extract_text_with(doc, rev, &TextOptions::default())
}

pub fn extract_text_with(doc: &Document, rev: usize, options: &TextOptions) -> Result<Vec<PageText>> {
    let walk = walk_pages(doc, rev)?;
    Ok(walk
        .pages
        .iter()
        .map(|page| {
            let mut out = PageText { page_index: page.page_index, ..PageText::default() };
            match content_program(doc, rev, page) {
                Ok(program) => {
                    let resources = page.resources_dict(doc);
                    let mut interp = Interpreter::new(doc, rev, page.page_index, options);
                    interp.run(&program, &resources, 0);
                    out.runs = interp.runs;
                    out.warnings = interp.warnings;
                }
                Err(e) => out.error = Some(e.to_string()),
            }
            out.joined = PageText::join_runs(&out.runs);
            out
        })
        .collect())
}

struct Interpreter<'a> {
    doc: &'a Document,
    rev: usize,
    page_index: usize,
    options: &'a TextOptions,
    fonts: HashMap<(usize, Name), FontMap>,
    runs: Vec<TextRun>,
    warnings: Vec<String>,
    pending_break: bool,
    forms_seen: HashSet<ObjectId>,
    scope: usize,
}

impl<'a> Interpreter<'a> {
    fn new(doc: &'a Document, rev: usize, page_index: usize, options: &'a TextOptions) -> Self {
        Interpreter {
            doc,
            rev,
            page_index,
            options,
            fonts: HashMap::new(),
            runs: Vec::new(),
            warnings: Vec::new(),
            pending_break: false,
            forms_seen: HashSet::new(),
            scope: 0,
        }
    }

    fn run(&mut self, program: &[u8], resources: &Dict, depth: usize) {
        let tokens = tokenize_content(program);
        self.warnings.extend(tokens.errors);
        let scope = self.scope;
        self.scope += 1;
        let mut font: Option<FontMap> = None;
        let mut line_y = 0.0f64;
        for op in &tokens.ops {
            let nums = |i: usize| op.operands.get(i).and_then(CosValue::as_f64);
            match op.operator.as_bytes() {
                b"BT" => line_y = 0.0,
                b"ET" | b"T*" => self.pending_break = true,
                b"Td" | b"TD" => {
                    let ty = nums(1).unwrap_or(0.0);
                    if ty != 0.0 {
                        self.pending_break = true;
                    }
                    line_y += ty;
                }
                b"Tm" => {
                    let f = nums(5).unwrap_or(line_y);
                    if f != line_y {
                        self.pending_break = true;
                    }
                    line_y = f;
                }
                b"Tf" => {
                    if let Some(name) = op.operands.first().and_then(CosValue::as_name) {
                        font = Some(self.font(scope, resources, Name::new(name)));
                    }
                }
                b"Tj" => self.show(font.as_ref(), op.operands.first()),
                b"'" => {
                    self.pending_break = true;
                    self.show(font.as_ref(), op.operands.first());
                }
                b"\"" => {
                    self.pending_break = true;
                    self.show(font.as_ref(), op.operands.get(2));
                }
                b"TJ" => self.show_array(font.as_ref(), op),
                b"Do" => {
                    if let Some(name) = op.operands.first().and_then(CosValue::as_name) {
                        self.form(resources, name, depth);
                    }
                }
                _ => {}
            }
        }
    }

    fn font(&mut self, scope: usize, resources: &Dict, name: Name) -> FontMap {
        if let Some(f) = self.fonts.get(&(scope, name.clone())) {
            return f.clone();
        }
        let fonts = resources.get("Font").map(|f| self.doc.deref(self.rev, f));
        let map = match fonts.as_ref().and_then(|f| f.as_dict()).and_then(|f| f.get_bytes(name.as_bytes())) {
            Some(v) => match self.doc.deref(self.rev, v) {
                CosValue::Dict(d) => FontMap::from_font(self.doc, self.rev, name.clone(), &d),
                _ => {
                    self.warnings.push(format!("font /{} does not resolve", name.to_string_lossy()));
                    FontMap::fallback(name.clone())
                }
            },
            None => {
                self.warnings.push(format!("font /{} is not in the resources", name.to_string_lossy()));
                FontMap::fallback(name.clone())
            }
        };
        self.fonts.insert((scope, name), map.clone());
        map
    }

    fn decode(&mut self, font: Option<&FontMap>, bytes: &[u8]) -> String {
        let fallback;
        let font = match font {
            Some(f) => f,
            None => {
                fallback = FontMap::fallback(Name::new(""));
                &fallback
            }
        };
        let (text, unknown) = font.decode(bytes);
        if unknown > 0 {
            self.warnings.push(format!(
                "{unknown} code(s) shown with /{} have no Unicode mapping",
                font.resource_name.to_string_lossy()
            ));
        }
        text
    }

    fn emit(&mut self, text: String) {
        if text.is_empty() {
            return;
        }
        let line_break_before = self.pending_break && !self.runs.is_empty();
        self.pending_break = false;
        self.runs.push(TextRun {
            text,
            page_index: self.page_index,
            order: self.runs.len(),
            line_break_before,
        });
    }

    fn show(&mut self, font: Option<&FontMap>, operand: Option<&CosValue>) {
        if let Some(bytes) = operand.and_then(CosValue::as_string) {
            let text = self.decode(font, bytes);
            self.emit(text);
        }
    }

    fn show_array(&mut self, font: Option<&FontMap>, op: &Operation) {
        let Some(items) = op.operands.first().and_then(CosValue::as_array) else {
            return;
        };
        let mut text = String::new();
        for item in items {
            match item {
                CosValue::String(s) => text.push_str(&self.decode(font, &s.bytes)),
                other => {
                    if let Some(n) = other.as_f64() {
                        if -n > self.options.kerning_space_threshold {
                            text.push(' ');
                        }
                    }
                }
            }
        }
        self.emit(text);
    }

    fn form(&mut self, resources: &Dict, name: &[u8], depth: usize) {
        if depth >= MAX_FORM_DEPTH {
            return;
        }
        let xobjects = resources.get("XObject").map(|x| self.doc.deref(self.rev, x));
        let Some(CosValue::Reference(id)) = xobjects
            .as_ref()
            .and_then(|x| x.as_dict())
            .and_then(|x| x.get_bytes(name))
            .cloned()
        else {
            return;
        };
        if !self.forms_seen.insert(id) {
            return;
        }
        let Ok((CosValue::Stream(stream), _)) = self.doc.resolve(self.rev, id) else {
            return;
        };
        if stream.dict.get_name("Subtype") != Some(b"Form") {
            return;
        }
        match self.doc.decode_stream(self.rev, &stream) {
            Ok(decoded) => {
                let inner = match stream.dict.get("Resources").map(|r| self.doc.deref(self.rev, r)) {
                    Some(CosValue::Dict(d)) => d,
                    _ => resources.clone(),
                };
                self.run(&decoded.data, &inner, depth + 1);
            }
            Err(e) => self.warnings.push(format!("form {id}: {e}")),
        }
    }
}
