use std::collections::BTreeMap;

use super::content::tokenize_content;
use crate::cos::CosValue;

/// Largest `bfrange` expanded; bigger ranges are clipped with a warning.
const MAX_RANGE: u32 = 0x1_0000;

/// Code → text mapping read from a ToUnicode CMap.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ToUnicodeMap {
    pub map: BTreeMap<u32, String>,
    /// Bytes per code, from `codespacerange` or else the widest source code.
    pub code_bytes: Option<usize>,
    pub warnings: Vec<String>,
}

impl ToUnicodeMap {
    pub fn get(&self, code: u32) -> Option<&str> {
        self.map.get(&code).map(String::as_str)
    }
}

fn code_of(bytes: &[u8]) -> Option<u32> {
    if bytes.is_empty() || bytes.len() > 4 {
        return None;
    }
    Some(bytes.iter().fold(0u32, |acc, &b| acc << 8 | u32::from(b)))
}

fn utf16_units(bytes: &[u8]) -> Vec<u16> {
    bytes
        .chunks(2)
        .map(|c| if c.len() == 2 { u16::from_be_bytes([c[0], c[1]]) } else { u16::from(c[0]) })
        .collect()
}

fn text_of(units: &[u16]) -> String {
    char::decode_utf16(units.iter().copied())
        .map(|r| r.unwrap_or('\u{FFFD}'))
        .collect()
}

/// Parses the `bfchar` and `bfrange` sections of a ToUnicode CMap.
///
/// Malformed entries are skipped and noted in `warnings`; whatever parsed
/// is still returned.
pub fn parse_to_unicode(cmap: &[u8]) -> ToUnicodeMap {
    let mut out = ToUnicodeMap::default();
    let tokens = tokenize_content(cmap);
    out.warnings.extend(tokens.errors);
    let mut widest = 0usize;
    for op in &tokens.ops {
        let args = &op.operands;
        if op.is("endcodespacerange") {
            for pair in args.chunks(2) {
                if let Some(lo) = pair[0].as_string() {
                    out.code_bytes = Some(out.code_bytes.unwrap_or(0).max(lo.len()));
                }
            }
        } else if op.is("endbfchar") {
            if args.len() % 2 != 0 {
                out.warnings.push("bfchar section has an odd number of operands".into());
            }
            for pair in args.chunks_exact(2) {
                let (Some(src), Some(dst)) = (pair[0].as_string(), pair[1].as_string()) else {
                    out.warnings.push("bfchar entry is not a pair of strings".into());
                    continue;
                };
                let Some(code) = code_of(src) else {
                    out.warnings.push("bfchar source code wider than 4 bytes".into());
                    continue;
                };
                widest = widest.max(src.len());
                out.map.insert(code, text_of(&utf16_units(dst)));
            }
        } else if op.is("endbfrange") {
            if args.len() % 3 != 0 {
                out.warnings.push("bfrange section is not made of triples".into());
            }
            for triple in args.chunks_exact(3) {
                let (Some(lo_b), Some(hi_b)) = (triple[0].as_string(), triple[1].as_string()) else {
                    out.warnings.push("bfrange bounds are not strings".into());
                    continue;
                };
                let (Some(lo), Some(hi)) = (code_of(lo_b), code_of(hi_b)) else {
                    out.warnings.push("bfrange bound wider than 4 bytes".into());
                    continue;
                };
                if hi < lo {
                    out.warnings.push(format!("bfrange <{lo:X}> <{hi:X}> is inverted"));
                    continue;
                }
                widest = widest.max(lo_b.len());
                let span = hi - lo;
                let hi = if span >= MAX_RANGE {
                    out.warnings.push(format!("bfrange starting at <{lo:X}> clipped"));
                    lo + MAX_RANGE - 1
                } else {
                    hi
                };
                match &triple[2] {
                    CosValue::String(s) => {
                        let base = utf16_units(&s.bytes);
                        if base.is_empty() {
                            out.warnings.push("empty bfrange destination".into());
                            continue;
                        }
                        for (i, code) in (lo..=hi).enumerate() {
                            let mut units = base.clone();
                            let last = units.len() - 1;
                            units[last] = units[last].wrapping_add(i as u16);
                            out.map.insert(code, text_of(&units));
                        }
                    }
                    CosValue::Array(targets) => {
                        for (code, target) in (lo..=hi).zip(targets) {
                            match target.as_string() {
                                Some(t) => {
                                    out.map.insert(code, text_of(&utf16_units(t)));
                                }
                                None => out.warnings.push("bfrange array target is not a string".into()),
                            }
                        }
                    }
                    _ => out.warnings.push("bfrange destination is neither string nor array".into()),
                }
            }
        }
    }
    if out.code_bytes.is_none() && widest > 0 {
        out.code_bytes = Some(widest);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_with_incremented_target() {
        let m = parse_to_unicode(b"1 beginbfrange\n<0041> <005A> <0041>\nendbfrange");
        assert_eq!(m.map.len(), 26);
        for code in 0x41..=0x5A {
            assert_eq!(m.get(code).unwrap(), char::from_u32(code).unwrap().to_string());
        }
        assert_eq!(m.code_bytes, Some(2));
    }

    #[test]
    fn empty_body() {
        let m = parse_to_unicode(b"");
        assert!(m.map.is_empty() && m.warnings.is_empty());
    }

    #[test]
    fn surrogate_pair_target() {
        let m = parse_to_unicode(b"1 beginbfchar <3A51> <D840DC3E> endbfchar");
        assert_eq!(m.get(0x3A51), Some("\u{2003E}"));
    }

    #[test]
    fn array_targets_and_ligatures() {
        let m = parse_to_unicode(
            b"/CIDInit /ProcSet findresource begin 12 dict begin begincmap\n\
              /CIDSystemInfo << /Registry (Adobe) /Ordering (UCS) /Supplement 0 >> def\n\
              1 begincodespacerange <00> <FF> endcodespacerange\n\
              1 beginbfrange <01> <03> [<0066006C> <0041> <D55C>] endbfrange\n\
              endcmap CMapName currentdict /CMap defineresource pop end end",
        );
        assert_eq!(m.get(1), Some("fl"));
        assert_eq!(m.get(2), Some("A"));
        assert_eq!(m.get(3), Some("한"));
        assert_eq!(m.code_bytes, Some(1));
        assert!(m.warnings.is_empty(), "{:?}", m.warnings);
    }

    #[test]
    fn malformed_entries_warn_and_keep_the_rest() {
        let m = parse_to_unicode(b"2 beginbfchar <01> <0041> <02> endbfchar 1 beginbfrange <05> <01> <0041> endbfrange");
        assert_eq!(m.get(1), Some("A"));
        assert_eq!(m.warnings.len(), 2);
    }
}
