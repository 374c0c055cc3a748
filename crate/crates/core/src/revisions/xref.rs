use memchr::memmem;

use super::{Trailer, XrefEntry, XrefKind, XrefSection, XrefSubsection};
use crate::cos::{parse_indirect_object, ByteSpan, CosValue, Dict, Lexer};
use crate::error::{Error, Result};
use crate::filters::{decode_stream, DecodedStream};

/// How far back from the end of the file `startxref` is searched for.
pub const STARTXREF_WINDOW: usize = 2048;

/// Returns the integer after the last `startxref` keyword in the tail of
/// the file.
pub fn parse_startxref(bytes: &[u8]) -> Result<usize> {
    let tail_start = bytes.len().saturating_sub(STARTXREF_WINDOW);
    let tail = &bytes[tail_start..];
    let at = memmem::rfind(tail, b"startxref").ok_or(Error::NoStartxref)?;
    let mut lx = Lexer::new(bytes, tail_start + at + 9);
    lx.skip_ws();
    lx.read_unsigned()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or(Error::NoStartxref)
}

/// Parses the cross-reference section at `offset`: either a classic
/// `xref` table followed by `trailer`, or a cross-reference stream object.
pub fn parse_xref_at(bytes: &[u8], offset: usize) -> Result<(XrefSection, Trailer)> {
    if offset >= bytes.len() {
        return Err(Error::NotAnXref { offset });
    }
    let mut lx = Lexer::new(bytes, offset);
    lx.skip_whitespace_only();
    if lx.peek_keyword() == b"xref" {
        parse_table(bytes, lx.pos)
    } else if lx.peek().is_some_and(|b| b.is_ascii_digit()) {
        parse_xref_stream(bytes, lx.pos)
    } else {
        Err(Error::NotAnXref { offset })
    }
}

fn parse_table(bytes: &[u8], start: usize) -> Result<(XrefSection, Trailer)> {
    let truncated = || Error::TruncatedTable { offset: start };
    let mut lx = Lexer::new(bytes, start + 4);
    lx.skip_ws();
    let mut subsections = Vec::new();
    let mut end = start + 4;
    {
        let mut probe = Lexer::new(bytes, start + 4);
        while matches!(probe.peek(), Some(b' ' | b'\t')) {
            probe.pos += 1;
        }
        probe.skip_eol();
        end = end.max(probe.pos);
    }
    loop {
        lx.skip_ws();
        if lx.at_end() {
            return Err(truncated());
        }
        if lx.peek_keyword() == b"trailer" {
            break;
        }
        let first = lx.read_unsigned().ok_or_else(truncated)?;
        lx.skip_ws();
        let count = lx.read_unsigned().ok_or_else(truncated)?;
        let first = u32::try_from(first).map_err(|_| truncated())?;
        if u64::from(first) + count > u64::from(u32::MAX) + 1 {
            return Err(truncated());
        }
        let mut entries = Vec::new();
        for i in 0..count {
            lx.skip_ws();
            let line_start = lx.pos;
            let offset = lx.read_unsigned().ok_or_else(truncated)?;
            lx.skip_ws();
            let generation = lx.read_unsigned().ok_or_else(truncated)?;
            lx.skip_ws();
            let in_use = match lx.read_regular() {
                b"n" => true,
                b"f" => false,
                _ => return Err(truncated()),
            };
            let flag_end = lx.pos;
            while matches!(lx.peek(), Some(b' ')) {
                lx.pos += 1;
            }
            lx.skip_eol();
            end = lx.pos;
            entries.push(XrefEntry {
                object_number: first + i as u32,
                offset: usize::try_from(offset).map_err(|_| truncated())?,
                generation: u16::try_from(generation).unwrap_or(u16::MAX),
                in_use,
                compressed: None,
                line: Some(ByteSpan::from_range(line_start, flag_end)),
            });
        }
        if entries.is_empty() {
            // Header line alone still belongs to the table.
            let mut probe = Lexer::new(bytes, lx.pos);
            while matches!(probe.peek(), Some(b' ')) {
                probe.pos += 1;
            }
            probe.skip_eol();
            end = probe.pos;
        }
        subsections.push(XrefSubsection { first, entries });
    }
    let trailer_kw = lx.pos;
    lx.pos += 7;
    lx.skip_ws();
    let dict_start = lx.pos;
    let dict = match lx.parse_value(true) {
        Ok(CosValue::Dict(d)) => d,
        _ => return Err(Error::TruncatedTable { offset: dict_start }),
    };
    let section = XrefSection {
        kind: XrefKind::Table,
        offset: start,
        subsections,
        span: ByteSpan::from_range(start, end),
    };
    let trailer = Trailer {
        dict,
        startxref_value: start,
        span: ByteSpan::from_range(trailer_kw, lx.pos),
    };
    Ok((section, trailer))
}

fn parse_xref_stream(bytes: &[u8], start: usize) -> Result<(XrefSection, Trailer)> {
    let obj = parse_indirect_object(bytes, start, Some(&|_| None))
        .map_err(|_| Error::NotAnXref { offset: start })?;
    let CosValue::Stream(stream) = &obj.value else {
        return Err(Error::NotAnXref { offset: start });
    };
    if !stream.dict.has_type("XRef") {
        return Err(Error::NotAnXref { offset: start });
    }
    let dict = &stream.dict;
    let unsupported = |m: &str| Error::UnsupportedXrefStreamField(m.to_string());

    let widths: Vec<usize> = dict
        .get("W")
        .and_then(CosValue::as_array)
        .ok_or_else(|| unsupported("missing /W"))?
        .iter()
        .map(|v| v.as_int().and_then(|w| usize::try_from(w).ok()))
        .collect::<Option<_>>()
        .ok_or_else(|| unsupported("non-integer /W"))?;
    if widths.len() != 3 || widths.iter().any(|&w| w > 8) || widths[1] == 0 {
        return Err(unsupported(&format!("/W {widths:?}")));
    }
    let size = dict.get_int("Size").ok_or_else(|| unsupported("missing /Size"))?;
    let index: Vec<(u64, u64)> = match dict.get("Index").and_then(CosValue::as_array) {
        Some(items) => {
            let nums: Vec<u64> = items
                .iter()
                .map(|v| v.as_int().and_then(|n| u64::try_from(n).ok()))
                .collect::<Option<_>>()
                .ok_or_else(|| unsupported("non-integer /Index"))?;
            if nums.len() % 2 != 0 {
                return Err(unsupported("odd /Index length"));
            }
            nums.chunks(2).map(|c| (c[0], c[1])).collect()
        }
        None => vec![(0, u64::try_from(size).unwrap_or(0))],
    };

    let DecodedStream { data, terminal, unknown_filter } =
        decode_stream(bytes, stream, &|_| None)?;
    if terminal.is_some() || unknown_filter.is_some() {
        return Err(unsupported("xref stream uses an undecodable filter"));
    }

    let row = widths.iter().sum::<usize>();
    let mut rows = data.chunks_exact(row);
    let field = |chunk: &[u8]| chunk.iter().fold(0u64, |acc, &b| acc << 8 | u64::from(b));
    let mut subsections = Vec::new();
    for (first, count) in index {
        let first = u32::try_from(first).map_err(|_| unsupported("/Index out of range"))?;
        let mut entries = Vec::new();
        for i in 0..count {
            let Some(r) = rows.next() else {
                return Err(Error::TruncatedTable { offset: start });
            };
            let (a, rest) = r.split_at(widths[0]);
            let (b, c) = rest.split_at(widths[1]);
            let kind = if widths[0] == 0 { 1 } else { field(a) };
            let (f2, f3) = (field(b), field(c));
            let object_number = first
                .checked_add(u32::try_from(i).unwrap_or(u32::MAX))
                .ok_or(Error::TruncatedTable { offset: start })?;
            let entry = match kind {
                0 => XrefEntry {
                    object_number,
                    offset: f2 as usize,
                    generation: u16::try_from(f3).unwrap_or(u16::MAX),
                    in_use: false,
                    compressed: None,
                    line: None,
                },
                1 => XrefEntry {
                    object_number,
                    offset: f2 as usize,
                    generation: u16::try_from(f3).unwrap_or(u16::MAX),
                    in_use: true,
                    compressed: None,
                    line: None,
                },
                2 => XrefEntry {
                    object_number,
                    offset: 0,
                    generation: 0,
                    in_use: true,
                    compressed: Some(super::CompressedLocation {
                        stream_object: u32::try_from(f2).unwrap_or(u32::MAX),
                        index: u32::try_from(f3).unwrap_or(u32::MAX),
                    }),
                    line: None,
                },
                // Unknown types are treated as null references.
                _ => continue,
            };
            entries.push(entry);
        }
        subsections.push(XrefSubsection { first, entries });
    }

    let trailer_dict: Dict = dict.clone();
    let section = XrefSection {
        kind: XrefKind::Stream(obj.id),
        offset: start,
        subsections,
        span: obj.span,
    };
    let trailer = Trailer {
        dict: trailer_dict,
        startxref_value: start,
        span: obj.span,
    };
    Ok((section, trailer))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn startxref_in_tail() {
        let src = b"%PDF-1.7\n...\nstartxref\n116342\n%%EOF\n";
        assert_eq!(parse_startxref(src).unwrap(), 116342);
        let mut junk = src.to_vec();
        junk.extend_from_slice(b"garbage after eof\r\n");
        assert_eq!(parse_startxref(&junk).unwrap(), 116342);
        assert!(matches!(parse_startxref(b"%PDF-1.7 nothing"), Err(Error::NoStartxref)));
        assert!(matches!(parse_startxref(b"startxref\n%%EOF"), Err(Error::NoStartxref)));
    }

    #[test]
    fn last_startxref_wins() {
        let src = b"startxref\n10\n%%EOF\nstartxref\n20\n%%EOF\n";
        assert_eq!(parse_startxref(src).unwrap(), 20);
    }

    #[test]
    fn subsection_of_twenty_two() {
        let mut src = b"xref\n106 22\n".to_vec();
        src.extend_from_slice(b"0000001484 00000 n\r\n");
        for i in 1..22 {
            src.extend_from_slice(format!("{:010} 00000 n\r\n", 2000 + i).as_bytes());
        }
        src.extend_from_slice(b"trailer\n<</Size 128 /Root 107 0 R>>\nstartxref\n0\n%%EOF\n");
        let (section, trailer) = parse_xref_at(&src, 0).unwrap();
        assert_eq!(section.subsections.len(), 1);
        let sub = &section.subsections[0];
        assert_eq!(sub.first, 106);
        assert_eq!(sub.entries.len(), 22);
        assert_eq!(sub.entries[21].object_number, 127);
        let e = &sub.entries[0];
        assert_eq!((e.offset, e.generation, e.in_use), (1484, 0, true));
        assert_eq!(e.line.unwrap().len, 18);
        assert_eq!(trailer.dict.get_int("Size"), Some(128));
        assert_eq!(section.span.end(), src.iter().position(|&b| b == b't').unwrap());
    }

    #[test]
    fn free_list_head() {
        let src = b"xref\n0 1\n0000000000 65535 f\r\ntrailer\n<<>>";
        let (section, _) = parse_xref_at(src, 0).unwrap();
        let e = &section.subsections[0].entries[0];
        assert!(!e.in_use);
        assert_eq!(e.generation, 65535);
    }

    #[test]
    fn truncated_and_not_xref() {
        assert!(matches!(
            parse_xref_at(b"xref\n0 3\n0000000000 65535 f\r\n", 0),
            Err(Error::TruncatedTable { .. })
        ));
        assert!(matches!(parse_xref_at(b"hello", 0), Err(Error::NotAnXref { .. })));
        assert!(matches!(parse_xref_at(b"1 0 obj 5 endobj", 0), Err(Error::NotAnXref { .. })));
        assert!(matches!(parse_xref_at(b"", 0), Err(Error::NotAnXref { .. })));
    }

    #[test]
    fn empty_table_is_allowed() {
        let src = b"xref\ntrailer\n<</Size 3>>";
        let (section, trailer) = parse_xref_at(src, 0).unwrap();
        assert!(section.subsections.is_empty());
        assert_eq!(section.span, ByteSpan::new(0, 5));
        assert_eq!(trailer.span.start, 5);
    }

    #[test]
    fn xref_stream_fields() {
        // Rows: type 1 offset 0x0102 gen 0; type 2 in stream 5 index 3; type 0.
        let rows: Vec<u8> = vec![1, 0x01, 0x02, 0, 2, 0x00, 0x05, 3, 0, 0x00, 0x00, 0xFF];
        let mut src = format!(
            "9 0 obj\n<</Type /XRef /Size 12 /Index [9 3] /W [1 2 1] /Length {}>>\nstream\n",
            rows.len()
        )
        .into_bytes();
        src.extend_from_slice(&rows);
        src.extend_from_slice(b"\nendstream\nendobj\n");
        let (section, trailer) = parse_xref_at(&src, 0).unwrap();
        assert_eq!(section.kind, XrefKind::Stream(crate::cos::ObjectId::new(9, 0)));
        let e = &section.subsections[0].entries;
        assert_eq!((e[0].object_number, e[0].offset, e[0].in_use), (9, 0x0102, true));
        let c = e[1].compressed.unwrap();
        assert_eq!((e[1].object_number, c.stream_object, c.index), (10, 5, 3));
        assert!(!e[2].in_use);
        assert_eq!(trailer.dict.get_int("Size"), Some(12));
    }

    #[test]
    fn xref_stream_bad_widths() {
        let src = b"9 0 obj\n<</Type /XRef /Size 1 /W [1 2] /Length 0>>\nstream\n\nendstream\nendobj";
        assert!(matches!(
            parse_xref_at(src, 0),
            Err(Error::UnsupportedXrefStreamField(_))
        ));
    }
}
