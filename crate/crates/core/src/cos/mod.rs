//! COS object model: the value grammar shared by object bodies, trailers,
//! content streams and CMaps.

mod lexer;
mod scan;
mod serialize;

use std::borrow::Borrow;
use std::fmt;
use std::ops::Range;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub(crate) use lexer::{is_regular, is_whitespace, ContentItem, Lexer};
pub use lexer::{lex_dict_entries, lex_value, parse_indirect_object, IndirectObject, LengthResolver};
pub use scan::{scan_all_objects, ObjectScan};

/// Object number plus generation. Generation is five decimal digits in an
/// xref line, so it fits a `u16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectId {
    pub number: u32,
    pub generation: u16,
}

impl ObjectId {
    pub const fn new(number: u32, generation: u16) -> Self {
        ObjectId { number, generation }
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.number, self.generation)
    }
}

/// A half-open byte range `[start, start + len)` in a file image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ByteSpan {
    pub start: usize,
    pub len: usize,
}

impl ByteSpan {
    pub const fn new(start: usize, len: usize) -> Self {
        ByteSpan { start, len }
    }

    pub fn from_range(start: usize, end: usize) -> Self {
        debug_assert!(end >= start);
        ByteSpan {
            start,
            len: end - start,
        }
    }

    pub const fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end()
    }

    pub fn contains(&self, pos: usize) -> bool {
        pos >= self.start && pos < self.end()
    }

    pub fn encloses(&self, other: &ByteSpan) -> bool {
        other.start >= self.start && other.end() <= self.end()
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Slice `bytes` by this span, or `None` when it runs past the end.
    pub fn slice<'a>(&self, bytes: &'a [u8]) -> Option<&'a [u8]> {
        bytes.get(self.range())
    }
}

impl fmt::Display for ByteSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end())
    }
}

/// A PDF name, stored with `#xx` escapes already decoded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(pub Vec<u8>);

impl Name {
    pub fn new(name: impl AsRef<[u8]>) -> Self {
        Name(name.as_ref().to_vec())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_string_lossy(&self) -> String {
        String::from_utf8_lossy(&self.0).into_owned()
    }
}

impl Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string_lossy())
    }
}

impl Borrow<[u8]> for Name {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl PartialEq<str> for Name {
    fn eq(&self, other: &str) -> bool {
        self.0 == other.as_bytes()
    }
}

impl PartialEq<&str> for Name {
    fn eq(&self, other: &&str) -> bool {
        self.0 == other.as_bytes()
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}", String::from_utf8_lossy(&self.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StringForm {
    #[default]
    Literal,
    Hex,
}

/// String bytes after escape/hex decoding. Text interpretation happens in
/// [`crate::extract`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdfString {
    pub bytes: Vec<u8>,
    pub form: StringForm,
}

impl PdfString {
    pub fn literal(bytes: impl Into<Vec<u8>>) -> Self {
        PdfString {
            bytes: bytes.into(),
            form: StringForm::Literal,
        }
    }

    pub fn hex(bytes: impl Into<Vec<u8>>) -> Self {
        PdfString {
            bytes: bytes.into(),
            form: StringForm::Hex,
        }
    }
}

/// Insertion-ordered dictionary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dict(IndexMap<Name, CosValue>);

impl Dict {
    pub fn new() -> Self {
        Dict(IndexMap::new())
    }

    pub fn get(&self, key: &str) -> Option<&CosValue> {
        self.0.get(key.as_bytes())
    }

    /// Lookup by raw name bytes, for keys that came from content streams.
    pub fn get_bytes(&self, key: &[u8]) -> Option<&CosValue> {
        self.0.get(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.0.contains_key(key.as_bytes())
    }

    pub fn insert(&mut self, key: impl AsRef<[u8]>, value: CosValue) -> Option<CosValue> {
        self.0.insert(Name::new(key), value)
    }

    pub fn remove(&mut self, key: &str) -> Option<CosValue> {
        self.0.shift_remove(key.as_bytes())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &CosValue)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `/Key /Value` lookup returning the name bytes.
    pub fn get_name(&self, key: &str) -> Option<&[u8]> {
        self.get(key).and_then(CosValue::as_name)
    }

    pub fn get_int(&self, key: &str) -> Option<i64> {
        self.get(key).and_then(CosValue::as_int)
    }

    pub fn get_ref(&self, key: &str) -> Option<ObjectId> {
        self.get(key).and_then(CosValue::as_reference)
    }

    pub fn has_type(&self, ty: &str) -> bool {
        self.get_name("Type") == Some(ty.as_bytes())
    }
}

impl FromIterator<(Name, CosValue)> for Dict {
    fn from_iter<T: IntoIterator<Item = (Name, CosValue)>>(iter: T) -> Self {
        Dict(iter.into_iter().collect())
    }
}

/// A stream: its dictionary plus the location of the undecoded payload in
/// the file image.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub dict: Dict,
    pub raw: ByteSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CosValue {
    Null,
    Boolean(bool),
    Integer(i64),
    Real(f64),
    Name(Name),
    String(PdfString),
    Array(Vec<CosValue>),
    Dict(Dict),
    Stream(Stream),
    Reference(ObjectId),
}

impl CosValue {
    pub fn name(n: impl AsRef<[u8]>) -> Self {
        CosValue::Name(Name::new(n))
    }

    pub fn reference(number: u32, generation: u16) -> Self {
        CosValue::Reference(ObjectId::new(number, generation))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            CosValue::Integer(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            CosValue::Integer(i) => Some(*i as f64),
            CosValue::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&[u8]> {
        match self {
            CosValue::Name(n) => Some(n.as_bytes()),
            _ => None,
        }
    }

    pub fn as_string(&self) -> Option<&[u8]> {
        match self {
            CosValue::String(s) => Some(&s.bytes),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[CosValue]> {
        match self {
            CosValue::Array(a) => Some(a),
            _ => None,
        }
    }

    /// The dictionary of a `Dict` or of a `Stream`.
    pub fn as_dict(&self) -> Option<&Dict> {
        match self {
            CosValue::Dict(d) => Some(d),
            CosValue::Stream(s) => Some(&s.dict),
            _ => None,
        }
    }

    pub fn as_stream(&self) -> Option<&Stream> {
        match self {
            CosValue::Stream(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_reference(&self) -> Option<ObjectId> {
        match self {
            CosValue::Reference(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, CosValue::Null)
    }

    /// Every indirect reference nested anywhere inside this value,
    /// including stream dictionaries.
    pub fn references(&self) -> Vec<ObjectId> {
        let mut out = Vec::new();
        self.collect_references(&mut out);
        out
    }

    fn collect_references(&self, out: &mut Vec<ObjectId>) {
        match self {
            CosValue::Reference(r) => out.push(*r),
            CosValue::Array(a) => a.iter().for_each(|v| v.collect_references(out)),
            CosValue::Dict(d) => d.iter().for_each(|(_, v)| v.collect_references(out)),
            CosValue::Stream(s) => s.dict.iter().for_each(|(_, v)| v.collect_references(out)),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_arithmetic() {
        let s = ByteSpan::new(10, 5);
        assert_eq!(s.end(), 15);
        assert!(s.contains(10) && s.contains(14) && !s.contains(15));
        assert!(s.encloses(&ByteSpan::new(11, 4)));
        assert!(!s.encloses(&ByteSpan::new(11, 5)));
        assert_eq!(s.slice(b"0123456789abcdefg"), Some(&b"abcde"[..]));
        assert_eq!(ByteSpan::new(15, 5).slice(b"0123456789abcdefg"), None);
    }

    #[test]
    fn dict_lookup_by_str() {
        let mut d = Dict::new();
        d.insert("Type", CosValue::name("Page"));
        d.insert("Count", CosValue::Integer(3));
        assert!(d.has_type("Page"));
        assert_eq!(d.get_int("Count"), Some(3));
        assert!(d.get("Missing").is_none());
    }

    #[test]
    fn nested_references_are_collected() {
        let v = CosValue::Array(vec![
            CosValue::reference(1, 0),
            CosValue::Dict([(Name::new("A"), CosValue::reference(4, 0))].into_iter().collect()),
        ]);
        assert_eq!(v.references(), vec![ObjectId::new(1, 0), ObjectId::new(4, 0)]);
    }
}
