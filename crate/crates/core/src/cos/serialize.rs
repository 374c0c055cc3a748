use std::io::Write;

use super::{CosValue, Dict, Name, PdfString, StringForm};

impl CosValue {
    /// Serializes the value. Streams write only their dictionary; the
    /// payload is the caller's business.
    pub fn write_to(&self, out: &mut Vec<u8>) {
        match self {
            CosValue::Null => out.extend_from_slice(b"null"),
            CosValue::Boolean(b) => out.extend_from_slice(if *b { b"true" } else { b"false" }),
            CosValue::Integer(i) => {
                let _ = write!(out, "{i}");
            }
            CosValue::Real(r) => write_real(*r, out),
            CosValue::Name(n) => n.write_to(out),
            CosValue::String(s) => s.write_to(out),
            CosValue::Array(items) => {
                out.push(b'[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(b' ');
                    }
                    item.write_to(out);
                }
                out.push(b']');
            }
            CosValue::Dict(d) => d.write_to(out),
            CosValue::Stream(s) => s.dict.write_to(out),
            CosValue::Reference(r) => {
                let _ = write!(out, "{} {} R", r.number, r.generation);
            }
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out);
        out
    }
}

impl Dict {
    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(b"<<");
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                out.push(b' ');
            }
            k.write_to(out);
            out.push(b' ');
            v.write_to(out);
        }
        out.extend_from_slice(b">>");
    }
}

impl Name {
    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.push(b'/');
        for &b in &self.0 {
            if (0x21..=0x7E).contains(&b) && b != b'#' && super::is_regular(b) {
                out.push(b);
            } else {
                let _ = write!(out, "#{b:02X}");
            }
        }
    }
}

impl PdfString {
    pub fn write_to(&self, out: &mut Vec<u8>) {
        match self.form {
            StringForm::Hex => {
                out.push(b'<');
                for b in &self.bytes {
                    let _ = write!(out, "{b:02X}");
                }
                out.push(b'>');
            }
            StringForm::Literal => {
                out.push(b'(');
                for &b in &self.bytes {
                    match b {
                        b'(' | b')' | b'\\' => {
                            out.push(b'\\');
                            out.push(b);
                        }
                        0x20..=0x7E => out.push(b),
                        _ => {
                            let _ = write!(out, "\\{b:03o}");
                        }
                    }
                }
                out.push(b')');
            }
        }
    }
}

fn write_real(r: f64, out: &mut Vec<u8>) {
    if !r.is_finite() {
        out.push(b'0');
        return;
    }
    let s = format!("{r:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    let s = if s == "-0" { "0" } else { s };
    out.extend_from_slice(s.as_bytes());
    if !s.contains('.') {
        out.extend_from_slice(b".0");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cos::{lex_value, ObjectId};
    use proptest::prelude::*;

    #[test]
    fn compact_forms() {
        let mut d = Dict::new();
        d.insert("Type", CosValue::name("Page"));
        d.insert("Parent", CosValue::Reference(ObjectId::new(2, 0)));
        d.insert("MediaBox", CosValue::Array(vec![CosValue::Integer(0), CosValue::Real(612.5)]));
        assert_eq!(
            CosValue::Dict(d).to_bytes(),
            b"<</Type /Page /Parent 2 0 R /MediaBox [0 612.5]>>"
        );
        assert_eq!(CosValue::name("A B").to_bytes(), b"/A#20B");
        assert_eq!(CosValue::String(PdfString::literal(&b"a(b)\n"[..])).to_bytes(), b"(a\\(b\\)\\012)");
    }

    fn arb_value() -> impl Strategy<Value = CosValue> {
        let leaf = prop_oneof![
            Just(CosValue::Null),
            any::<bool>().prop_map(CosValue::Boolean),
            any::<i64>().prop_map(CosValue::Integer),
            (-1_000_000i64..1_000_000).prop_map(|n| CosValue::Real(n as f64 / 64.0)),
            proptest::collection::vec(any::<u8>(), 0..12).prop_map(|n| CosValue::Name(Name(n))),
            proptest::collection::vec(any::<u8>(), 0..24)
                .prop_map(|b| CosValue::String(PdfString::literal(b))),
            proptest::collection::vec(any::<u8>(), 0..24)
                .prop_map(|b| CosValue::String(PdfString::hex(b))),
            (0u32..100_000, any::<u16>()).prop_map(|(n, g)| CosValue::reference(n, g)),
        ];
        leaf.prop_recursive(4, 48, 6, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..6).prop_map(CosValue::Array),
                proptest::collection::vec(("[A-Za-z]{1,6}", inner), 0..6).prop_map(|kv| {
                    let mut d = Dict::new();
                    for (k, v) in kv {
                        d.insert(k, v);
                    }
                    CosValue::Dict(d)
                }),
            ]
        })
    }

    proptest! {
        // Writing then lexing is the identity, and the span covers exactly
        // what was written.
        #[test]
        fn write_then_lex(v in arb_value()) {
            let bytes = v.to_bytes();
            let (back, span) = lex_value(&bytes, 0).unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(span.len, bytes.len());
            // Span exactness: re-lexing the span alone yields an equal value.
            let (again, _) = lex_value(span.slice(&bytes).unwrap(), 0).unwrap();
            prop_assert_eq!(again, v);
        }
    }
}
