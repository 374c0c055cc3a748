use memchr::memmem;

use super::{ByteSpan, CosValue, Dict, Name, ObjectId, PdfString, Stream};
use crate::error::{Error, Result};

const MAX_NESTING: usize = 256;

pub(crate) fn is_whitespace(b: u8) -> bool {
    matches!(b, 0 | b'\t' | b'\n' | 0x0C | b'\r' | b' ')
}

pub(crate) fn is_delimiter(b: u8) -> bool {
    matches!(
        b,
        b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%'
    )
}

pub(crate) fn is_regular(b: u8) -> bool {
    !is_whitespace(b) && !is_delimiter(b)
}

/// Resolves an indirect `/Length` to a byte count.
pub type LengthResolver<'a> = &'a dyn Fn(ObjectId) -> Option<usize>;

/// Cursor over a file image. Never reads past `buf.len()`.
pub(crate) struct Lexer<'a> {
    buf: &'a [u8],
    pub(crate) pos: usize,
    depth: usize,
}

pub(crate) enum ContentItem<'a> {
    Operand(CosValue),
    Operator(&'a [u8]),
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(buf: &'a [u8], pos: usize) -> Self {
        Lexer { buf, pos, depth: 0 }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.buf.len()
    }

    pub(crate) fn peek(&self) -> Option<u8> {
        self.buf.get(self.pos).copied()
    }

    pub(crate) fn rest(&self) -> &'a [u8] {
        self.buf.get(self.pos..).unwrap_or(&[])
    }

    /// Skips whitespace and `%` comments.
    pub(crate) fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if is_whitespace(b) {
                self.pos += 1;
            } else if b == b'%' {
                while let Some(c) = self.peek() {
                    if c == b'\r' || c == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    pub(crate) fn skip_whitespace_only(&mut self) {
        while self.peek().is_some_and(is_whitespace) {
            self.pos += 1;
        }
    }

    /// Consumes a single CRLF, LF or CR if present.
    pub(crate) fn skip_eol(&mut self) -> usize {
        match self.rest() {
            [b'\r', b'\n', ..] => {
                self.pos += 2;
                2
            }
            [b'\n', ..] | [b'\r', ..] => {
                self.pos += 1;
                1
            }
            _ => 0,
        }
    }

    /// Reads a run of regular characters (possibly empty).
    pub(crate) fn read_regular(&mut self) -> &'a [u8] {
        let start = self.pos;
        while self.peek().is_some_and(is_regular) {
            self.pos += 1;
        }
        &self.buf[start..self.pos]
    }

    /// Reads the next regular token without consuming it.
    pub(crate) fn peek_keyword(&self) -> &'a [u8] {
        let mut end = self.pos;
        while self.buf.get(end).copied().is_some_and(is_regular) {
            end += 1;
        }
        &self.buf[self.pos..end]
    }

    /// Reads an unsigned decimal integer token.
    pub(crate) fn read_unsigned(&mut self) -> Option<u64> {
        let save = self.pos;
        let tok = self.read_regular();
        if tok.is_empty() || tok.len() > 19 || !tok.iter().all(u8::is_ascii_digit) {
            self.pos = save;
            return None;
        }
        std::str::from_utf8(tok).ok()?.parse().ok()
    }

    pub(crate) fn parse_value(&mut self, allow_refs: bool) -> Result<CosValue> {
        let start = self.pos;
        let b = self
            .peek()
            .ok_or_else(|| Error::malformed(start, "unexpected end of data"))?;
        match b {
            b'/' => Ok(CosValue::Name(self.parse_name())),
            b'(' => self.parse_literal_string().map(CosValue::String),
            b'<' => {
                if self.buf.get(self.pos + 1) == Some(&b'<') {
                    self.parse_dict(allow_refs).map(CosValue::Dict)
                } else {
                    self.parse_hex_string().map(CosValue::String)
                }
            }
            b'[' => self.parse_array(allow_refs),
            b'0'..=b'9' | b'+' | b'-' | b'.' => self.parse_number(allow_refs),
            _ if is_regular(b) => {
                let kw = self.read_regular();
                match kw {
                    b"true" => Ok(CosValue::Boolean(true)),
                    b"false" => Ok(CosValue::Boolean(false)),
                    b"null" => Ok(CosValue::Null),
                    _ => {
                        self.pos = start;
                        Err(Error::malformed(
                            start,
                            format!("unexpected keyword `{}`", String::from_utf8_lossy(kw)),
                        ))
                    }
                }
            }
            _ => Err(Error::malformed(
                start,
                format!("unexpected delimiter `{}`", b as char),
            )),
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(Error::malformed(self.pos, "nesting too deep"));
        }
        Ok(())
    }

    fn parse_number(&mut self, allow_refs: bool) -> Result<CosValue> {
        let start = self.pos;
        let tok = self.read_regular();
        let number = parse_numeric(tok).ok_or_else(|| {
            Error::malformed(
                start,
                format!("bad number `{}`", String::from_utf8_lossy(tok)),
            )
        })?;
        let CosValue::Integer(n) = number else {
            return Ok(number);
        };
        if allow_refs && n >= 0 && n <= u32::MAX as i64 && tok[0].is_ascii_digit() {
            let after_num = self.pos;
            self.skip_ws();
            if let Some(gen) = self.read_unsigned() {
                self.skip_ws();
                if gen <= u16::MAX as u64 && self.read_regular() == b"R" {
                    return Ok(CosValue::Reference(ObjectId::new(n as u32, gen as u16)));
                }
            }
            self.pos = after_num;
        }
        Ok(number)
    }

    fn parse_name(&mut self) -> Name {
        self.pos += 1;
        let raw = self.read_regular();
        let mut out = Vec::with_capacity(raw.len());
        let mut i = 0;
        while i < raw.len() {
            if raw[i] == b'#' && i + 2 < raw.len() {
                if let (Some(h), Some(l)) = (hex_val(raw[i + 1]), hex_val(raw[i + 2])) {
                    out.push(h << 4 | l);
                    i += 3;
                    continue;
                }
            }
            out.push(raw[i]);
            i += 1;
        }
        Name(out)
    }

    fn parse_literal_string(&mut self) -> Result<PdfString> {
        let start = self.pos;
        self.pos += 1;
        let mut depth = 1usize;
        let mut out = Vec::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(Error::malformed(start, "unterminated literal string"));
            };
            self.pos += 1;
            match c {
                b'\\' => {
                    let Some(e) = self.peek() else {
                        return Err(Error::malformed(start, "unterminated literal string"));
                    };
                    self.pos += 1;
                    match e {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'b' => out.push(0x08),
                        b'f' => out.push(0x0C),
                        b'0'..=b'7' => {
                            let mut v = (e - b'0') as u32;
                            for _ in 0..2 {
                                match self.peek() {
                                    Some(d @ b'0'..=b'7') => {
                                        v = v * 8 + (d - b'0') as u32;
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push((v & 0xFF) as u8);
                        }
                        b'\r' => {
                            if self.peek() == Some(b'\n') {
                                self.pos += 1;
                            }
                        }
                        b'\n' => {}
                        other => out.push(other),
                    }
                }
                b'(' => {
                    depth += 1;
                    out.push(c);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    out.push(c);
                }
                b'\r' => {
                    if self.peek() == Some(b'\n') {
                        self.pos += 1;
                    }
                    out.push(b'\n');
                }
                _ => out.push(c),
            }
        }
        Ok(PdfString::literal(out))
    }

    fn parse_hex_string(&mut self) -> Result<PdfString> {
        let start = self.pos;
        self.pos += 1;
        let mut out = Vec::new();
        let mut high: Option<u8> = None;
        loop {
            let Some(c) = self.peek() else {
                return Err(Error::malformed(start, "unterminated hex string"));
            };
            self.pos += 1;
            if c == b'>' {
                break;
            }
            if is_whitespace(c) {
                continue;
            }
            let v = hex_val(c).ok_or_else(|| {
                Error::malformed(self.pos - 1, "invalid character in hex string")
            })?;
            match high.take() {
                Some(h) => out.push(h << 4 | v),
                None => high = Some(v),
            }
        }
        if let Some(h) = high {
            out.push(h << 4);
        }
        Ok(PdfString::hex(out))
    }

    fn parse_array(&mut self, allow_refs: bool) -> Result<CosValue> {
        let start = self.pos;
        self.enter()?;
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(Error::malformed(start, "unterminated array")),
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => items.push(self.parse_value(allow_refs)?),
            }
        }
        self.depth -= 1;
        Ok(CosValue::Array(items))
    }

    fn parse_dict(&mut self, allow_refs: bool) -> Result<Dict> {
        let start = self.pos;
        self.enter()?;
        self.pos += 2;
        let mut dict = Dict::new();
        loop {
            self.skip_ws();
            match self.rest() {
                [] => return Err(Error::malformed(start, "unterminated dictionary")),
                [b'>', b'>', ..] => {
                    self.pos += 2;
                    break;
                }
                [b'/', ..] => {
                    let key = self.parse_name();
                    self.skip_ws();
                    if self.rest().starts_with(b">>") {
                        return Err(Error::malformed(self.pos, "dictionary key without value"));
                    }
                    let value = self.parse_value(allow_refs)?;
                    dict.0.insert(key, value);
                }
                _ => return Err(Error::malformed(self.pos, "dictionary key is not a name")),
            }
        }
        self.depth -= 1;
        Ok(dict)
    }

    /// Next operand or operator of a content stream. `None` at end of input.
    pub(crate) fn next_content_item(&mut self) -> Option<Result<ContentItem<'a>>> {
        self.skip_ws();
        let b = self.peek()?;
        if is_regular(b) && !matches!(b, b'0'..=b'9' | b'+' | b'-' | b'.') {
            let kw = self.peek_keyword();
            if !matches!(kw, b"true" | b"false" | b"null") {
                self.pos += kw.len();
                return Some(Ok(ContentItem::Operator(kw)));
            }
        }
        Some(self.parse_value(false).map(ContentItem::Operand))
    }
}

fn hex_val(b: u8) -> Option<u8> {
    match b {
        b'0'..=b'9' => Some(b - b'0'),
        b'a'..=b'f' => Some(b - b'a' + 10),
        b'A'..=b'F' => Some(b - b'A' + 10),
        _ => None,
    }
}

/// `[+-]digits[.digits]` or `[+-].digits`; integers that overflow `i64`
/// degrade to reals.
fn parse_numeric(tok: &[u8]) -> Option<CosValue> {
    let body = match tok.first()? {
        b'+' | b'-' => &tok[1..],
        _ => tok,
    };
    let dots = body.iter().filter(|&&c| c == b'.').count();
    let digits = body.iter().filter(|c| c.is_ascii_digit()).count();
    if digits == 0 || dots > 1 || digits + dots != body.len() {
        return None;
    }
    let s = std::str::from_utf8(tok).ok()?;
    if dots == 0 {
        if let Ok(i) = s.parse::<i64>() {
            return Some(CosValue::Integer(i));
        }
    }
    s.parse::<f64>().ok().map(CosValue::Real)
}

/// Parses one value starting at `offset` (after skipping whitespace and
/// comments) and returns it with the exact span it occupies.
pub fn lex_value(bytes: &[u8], offset: usize) -> Result<(CosValue, ByteSpan)> {
    if offset > bytes.len() {
        return Err(Error::malformed(offset, "offset past end of file"));
    }
    let mut lx = Lexer::new(bytes, offset);
    lx.skip_ws();
    let start = lx.pos;
    let value = lx.parse_value(true)?;
    Ok((value, ByteSpan::from_range(start, lx.pos)))
}

/// Walks a dictionary at `offset` and returns each entry together with the
/// span of its value, for in-place edits of trailer fields.
pub fn lex_dict_entries(bytes: &[u8], offset: usize) -> Result<Vec<(Name, CosValue, ByteSpan)>> {
    let mut lx = Lexer::new(bytes, offset);
    lx.skip_ws();
    if !lx.rest().starts_with(b"<<") {
        return Err(Error::malformed(lx.pos, "expected `<<`"));
    }
    let start = lx.pos;
    lx.pos += 2;
    let mut out = Vec::new();
    loop {
        lx.skip_ws();
        match lx.rest() {
            [] => return Err(Error::malformed(start, "unterminated dictionary")),
            [b'>', b'>', ..] => return Ok(out),
            [b'/', ..] => {
                let key = lx.parse_name();
                lx.skip_ws();
                let vstart = lx.pos;
                let value = lx.parse_value(true)?;
                out.push((key, value, ByteSpan::from_range(vstart, lx.pos)));
            }
            _ => return Err(Error::malformed(lx.pos, "dictionary key is not a name")),
        }
    }
}

/// A parsed `N G obj ... endobj` body.
#[derive(Debug, Clone, PartialEq)]
pub struct IndirectObject {
    pub id: ObjectId,
    pub value: CosValue,
    /// From the object number through `endobj` inclusive.
    pub span: ByteSpan,
    pub warnings: Vec<String>,
}

/// Parses the indirect object whose header starts at `offset`.
///
/// A stream's declared `/Length` is trusted only when `endstream` follows
/// it; otherwise the payload runs up to the scanned `endstream` keyword and
/// a warning is recorded. An indirect `/Length` needs `lengths`; passing a
/// resolver that answers `None` forces the scan.
pub fn parse_indirect_object(
    bytes: &[u8],
    offset: usize,
    lengths: Option<LengthResolver<'_>>,
) -> Result<IndirectObject> {
    let mut lx = Lexer::new(bytes, offset.min(bytes.len()));
    lx.skip_whitespace_only();
    let start = lx.pos;
    let mismatch = || Error::IdMismatch { offset: start };

    let number = lx.read_unsigned().filter(|&n| n <= u32::MAX as u64).ok_or_else(mismatch)?;
    lx.skip_ws();
    let generation = lx.read_unsigned().filter(|&g| g <= u16::MAX as u64).ok_or_else(mismatch)?;
    lx.skip_ws();
    if lx.read_regular() != b"obj" {
        return Err(mismatch());
    }
    let id = ObjectId::new(number as u32, generation as u16);
    let mut warnings = Vec::new();

    lx.skip_ws();
    let mut value = if lx.peek_keyword() == b"endobj" {
        CosValue::Null
    } else {
        lx.parse_value(true)?
    };
    let mut end = lx.pos;
    lx.skip_ws();

    if lx.peek_keyword() == b"stream" {
        let CosValue::Dict(dict) = value else {
            return Err(Error::malformed(lx.pos, "stream keyword after a non-dictionary"));
        };
        lx.pos += 6;
        while matches!(lx.peek(), Some(b' ' | b'\t')) {
            lx.pos += 1;
        }
        lx.skip_eol();
        let data_start = lx.pos;

        let declared = match dict.get("Length") {
            Some(CosValue::Integer(n)) if *n >= 0 => usize::try_from(*n).ok(),
            Some(CosValue::Reference(r)) => match lengths {
                None => return Err(Error::StreamLengthUnresolvable { id }),
                Some(resolve) => resolve(*r),
            },
            _ => None,
        };

        let fits = declared.and_then(|n| {
            let data_end = data_start.checked_add(n)?;
            (data_end <= bytes.len() && endstream_follows(bytes, data_end)).then_some(data_end)
        });
        let data_end = match fits {
            Some(e) => e,
            None => {
                let found = memmem::find(&bytes[data_start..], b"endstream")
                    .map(|p| p + data_start)
                    .ok_or_else(|| Error::malformed(data_start, "unterminated stream"))?;
                let mut e = found;
                if e > data_start && bytes[e - 1] == b'\n' {
                    e -= 1;
                    if e > data_start && bytes[e - 1] == b'\r' {
                        e -= 1;
                    }
                } else if e > data_start && bytes[e - 1] == b'\r' {
                    e -= 1;
                }
                warnings.push(match declared {
                    Some(n) => format!(
                        "object {id}: declared /Length {n} disagrees with endstream; using {}",
                        e - data_start
                    ),
                    None => format!("object {id}: /Length unavailable; scanned for endstream"),
                });
                e
            }
        };
        lx.pos = data_end;
        lx.skip_ws();
        if lx.peek_keyword() != b"endstream" {
            return Err(Error::malformed(lx.pos, "missing endstream"));
        }
        lx.pos += 9;
        end = lx.pos;
        value = CosValue::Stream(Stream {
            dict,
            raw: ByteSpan::from_range(data_start, data_end),
        });
        lx.skip_ws();
    }

    if lx.peek_keyword() == b"endobj" {
        lx.pos += 6;
        end = lx.pos;
    } else {
        warnings.push(format!("object {id}: missing endobj"));
    }

    Ok(IndirectObject {
        id,
        value,
        span: ByteSpan::from_range(start, end),
        warnings,
    })
}

fn endstream_follows(bytes: &[u8], at: usize) -> bool {
    let mut p = at;
    while p < bytes.len() && is_whitespace(bytes[p]) {
        p += 1;
    }
    bytes[p..].starts_with(b"endstream")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cos::StringForm;

    fn lex(s: &str) -> (CosValue, ByteSpan) {
        lex_value(s.as_bytes(), 0).unwrap()
    }

    #[test]
    fn reference_and_span() {
        assert_eq!(lex("107 0 R"), (CosValue::reference(107, 0), ByteSpan::new(0, 7)));
    }

    #[test]
    fn null_keyword() {
        assert_eq!(lex("null"), (CosValue::Null, ByteSpan::new(0, 4)));
    }

    #[test]
    fn kids_dictionary() {
        let (v, span) = lex("<</Kids [1 0 R 4 0 R 6 0 R]>>");
        let expected: Dict = [(
            Name::new("Kids"),
            CosValue::Array(vec![
                CosValue::reference(1, 0),
                CosValue::reference(4, 0),
                CosValue::reference(6, 0),
            ]),
        )]
        .into_iter()
        .collect();
        assert_eq!(v, CosValue::Dict(expected));
        assert_eq!(span, ByteSpan::new(0, 29));
    }

    #[test]
    fn leading_whitespace_and_comments_excluded_from_span() {
        let (v, span) = lex("  % note\n 42 ");
        assert_eq!(v, CosValue::Integer(42));
        assert_eq!(span, ByteSpan::new(10, 2));
    }

    #[test]
    fn integers_not_followed_by_r_stay_integers() {
        let (v, span) = lex("12 0 obj");
        assert_eq!(v, CosValue::Integer(12));
        assert_eq!(span, ByteSpan::new(0, 2));
        assert_eq!(lex("[1 2 3]").0.as_array().unwrap().len(), 3);
        assert_eq!(lex("[1 0 R 5]").0.as_array().unwrap().len(), 2);
    }

    #[test]
    fn numbers() {
        assert_eq!(lex("-.002").0, CosValue::Real(-0.002));
        assert_eq!(lex("4.").0, CosValue::Real(4.0));
        assert_eq!(lex("+17").0, CosValue::Integer(17));
        assert!(lex_value(b"1e5", 0).is_err());
        assert!(lex_value(b"-", 0).is_err());
        assert!(lex_value(b"1.2.3", 0).is_err());
        assert_eq!(lex("99999999999999999999").0, CosValue::Real(1e20));
    }

    #[test]
    fn literal_string_escapes() {
        let (v, _) = lex(r"(a\(b\)\\c\101\0537\n(nested)x\
y)");
        assert_eq!(v.as_string().unwrap(), b"a(b)\\cA+7\n(nested)xy");
        let (v, _) = lex("(line\r\nbreak)");
        assert_eq!(v.as_string().unwrap(), b"line\nbreak");
    }

    #[test]
    fn hex_string_odd_length_pads() {
        let (v, _) = lex("<48 65 6C 6C 6F 7>");
        match v {
            CosValue::String(s) => {
                assert_eq!(s.bytes, b"Hellop");
                assert_eq!(s.form, StringForm::Hex);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(lex_value(b"<4G>", 0).is_err());
    }

    #[test]
    fn name_hash_escapes() {
        assert_eq!(lex("/A#20B").0, CosValue::name("A B"));
        assert_eq!(lex("/Odd#2").0, CosValue::name("Odd#2"));
    }

    #[test]
    fn malformed_inputs_are_errors() {
        for s in ["(unterminated", "<<", "<< /A 1", "[1 2", "<</A>>", ">>", "obj", "<< 1 2 >>"] {
            assert!(
                matches!(lex_value(s.as_bytes(), 0), Err(Error::MalformedToken { .. })),
                "{s}"
            );
        }
        assert!(lex_value(b"", 0).is_err());
        assert!(lex_value(b"abc", 10).is_err());
    }

    #[test]
    fn deep_nesting_is_bounded() {
        let s = "[".repeat(10_000);
        assert!(lex_value(s.as_bytes(), 0).is_err());
    }

    #[test]
    fn pages_object_framing() {
        let src = b"21 0 obj <</Type /Pages /Count 3>> endobj";
        let obj = parse_indirect_object(src, 0, None).unwrap();
        assert_eq!(obj.id, ObjectId::new(21, 0));
        assert!(obj.value.as_dict().unwrap().has_type("Pages"));
        assert_eq!(obj.span, ByteSpan::new(0, src.len()));
    }

    #[test]
    fn null_object() {
        let obj = parse_indirect_object(b"5 0 obj null endobj", 0, None).unwrap();
        assert_eq!(obj.id, ObjectId::new(5, 0));
        assert_eq!(obj.value, CosValue::Null);
    }

    #[test]
    fn stream_with_declared_length() {
        let src = b"7 0 obj\n<</Length 10>>\nstream\r\n0123456789\nendstream\nendobj\n";
        let obj = parse_indirect_object(src, 0, None).unwrap();
        let s = obj.value.as_stream().unwrap();
        assert_eq!(s.raw.len, 10);
        assert_eq!(s.raw.slice(src).unwrap(), b"0123456789");
        assert!(obj.warnings.is_empty());
        assert_eq!(obj.span.end(), src.len() - 1);
    }

    #[test]
    fn stream_length_conflict_trusts_endstream() {
        let src = b"7 0 obj <</Length 4>> stream\n0123456789\nendstream endobj";
        let obj = parse_indirect_object(src, 0, None).unwrap();
        assert_eq!(obj.value.as_stream().unwrap().raw.slice(src).unwrap(), b"0123456789");
        assert_eq!(obj.warnings.len(), 1);
    }

    #[test]
    fn indirect_length_requires_resolver() {
        let src = b"7 0 obj <</Length 8 0 R>> stream\nabcd\nendstream endobj";
        assert!(matches!(
            parse_indirect_object(src, 0, None),
            Err(Error::StreamLengthUnresolvable { .. })
        ));
        let with = parse_indirect_object(src, 0, Some(&|_| Some(4))).unwrap();
        assert_eq!(with.value.as_stream().unwrap().raw.len, 4);
        assert!(with.warnings.is_empty());
        let scanned = parse_indirect_object(src, 0, Some(&|_| None)).unwrap();
        assert_eq!(scanned.value.as_stream().unwrap().raw.len, 4);
        assert_eq!(scanned.warnings.len(), 1);
    }

    #[test]
    fn bad_headers() {
        assert!(matches!(
            parse_indirect_object(b"x 0 obj null endobj", 0, None),
            Err(Error::IdMismatch { .. })
        ));
        assert!(matches!(
            parse_indirect_object(b"1 0 ob null endobj", 0, None),
            Err(Error::IdMismatch { .. })
        ));
        assert!(matches!(
            parse_indirect_object(b"1 70000 obj null endobj", 0, None),
            Err(Error::IdMismatch { .. })
        ));
    }

    #[test]
    fn dict_entry_spans() {
        let src = b"trailer\n<</Size 9 /Prev 1234 /Root 1 0 R>>";
        let entries = lex_dict_entries(src, 8).unwrap();
        let (_, v, span) = &entries[1];
        assert_eq!(*v, CosValue::Integer(1234));
        assert_eq!(span.slice(src).unwrap(), b"1234");
        assert_eq!(entries[2].2.slice(src).unwrap(), b"1 0 R");
    }
}
