use memchr::memmem;

use crate::cos::{is_regular, is_whitespace, ContentItem, CosValue, Dict, Lexer, Name, PdfString};

/// One postfix operation of a content stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub operands: Vec<CosValue>,
    pub operator: Name,
}

impl Operation {
    pub fn is(&self, op: &str) -> bool {
        self.operator.as_bytes() == op.as_bytes()
    }
}

/// Tokenizer output; `errors` lists spans that could not be read. The
/// tokenizer skips past each one and carries on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tokenized {
    pub ops: Vec<Operation>,
    pub errors: Vec<String>,
}

/// Operands kept per operator before the oldest are dropped.
const MAX_OPERANDS: usize = 4096;

/// Splits a decoded content stream into operations.
///
/// Inline images come back as a single `BI` operation whose operands are
/// the image dictionary and the raw sample bytes.
pub fn tokenize_content(program: &[u8]) -> Tokenized {
    let mut out = Tokenized::default();
    let mut stack: Vec<CosValue> = Vec::new();
    let mut lx = Lexer::new(program, 0);
    loop {
        let before = lx.pos;
        let Some(item) = lx.next_content_item() else { break };
        match item {
            Ok(ContentItem::Operand(v)) => {
                if stack.len() == MAX_OPERANDS {
                    stack.remove(0);
                }
                stack.push(v);
            }
            Ok(ContentItem::Operator(b"BI")) => {
                stack.clear();
                match inline_image(&mut lx) {
                    Some((dict, data)) => out.ops.push(Operation {
                        operands: vec![CosValue::Dict(dict), CosValue::String(PdfString::literal(data))],
                        operator: Name::new("BI"),
                    }),
                    None => out.errors.push(format!("unterminated inline image at byte {before}")),
                }
            }
            Ok(ContentItem::Operator(op)) => out.ops.push(Operation {
                operands: std::mem::take(&mut stack),
                operator: Name::new(op),
            }),
            Err(e) => {
                out.errors.push(e.to_string());
                stack.clear();
                // Resume after the offending token.
                lx.pos = lx.pos.max(before + 1);
                while lx.peek().is_some_and(is_regular) {
                    lx.pos += 1;
                }
            }
        }
    }
    out
}

/// Reads `key value ... ID <data> EI` after a `BI` operator.
fn inline_image(lx: &mut Lexer<'_>) -> Option<(Dict, Vec<u8>)> {
    let mut dict = Dict::new();
    loop {
        lx.skip_ws();
        if lx.at_end() {
            return None;
        }
        if lx.peek_keyword() == b"ID" {
            lx.pos += 2;
            break;
        }
        let key = match lx.parse_value(false).ok()? {
            CosValue::Name(n) => n,
            _ => return None,
        };
        lx.skip_ws();
        let value = lx.parse_value(false).ok()?;
        dict.insert(key.as_bytes(), value);
    }
    // A single whitespace byte separates ID from the data.
    if lx.peek().is_some_and(is_whitespace) {
        lx.pos += 1;
    }
    let data_start = lx.pos;
    let rest = lx.rest();
    let mut from = 0;
    while let Some(at) = memmem::find(&rest[from..], b"EI") {
        let at = from + at;
        let before_ok = at == 0 || is_whitespace(rest[at - 1]);
        let after_ok = rest.get(at + 2).is_none_or(|&b| !is_regular(b));
        if before_ok && after_ok {
            let end = if at > 0 { at - 1 } else { at };
            lx.pos = data_start + at + 2;
            return Some((dict, rest[..end].to_vec()));
        }
        from = at + 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ops(src: &str) -> Vec<(Vec<CosValue>, String)> {
        let t = tokenize_content(src.as_bytes());
        assert!(t.errors.is_empty(), "{:?}", t.errors);
        t.ops
            .into_iter()
            .map(|o| (o.operands, o.operator.to_string_lossy()))
            .collect()
    }

    #[test]
    fn hand_tokenized_text_block() {
        let got = ops("BT /F1 12 Tf (Hi) Tj ET");
        let want = vec![
            (vec![], "BT".to_string()),
            (vec![CosValue::name("F1"), CosValue::Integer(12)], "Tf".to_string()),
            (vec![CosValue::String(PdfString::literal(&b"Hi"[..]))], "Tj".to_string()),
            (vec![], "ET".to_string()),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn empty_program() {
        assert!(tokenize_content(b"").ops.is_empty());
        assert!(tokenize_content(b"  % only a comment\n").ops.is_empty());
    }

    #[test]
    fn tj_array_is_one_operand() {
        let got = ops("[(A) -120 (B)] TJ");
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].1, "TJ");
        assert_eq!(got[0].0.len(), 1);
        assert_eq!(got[0].0[0].as_array().unwrap().len(), 3);
    }

    #[test]
    fn quote_operators_and_unknown_ops() {
        let got = ops("(a) ' 1 2 (b) \" q 1 0 0 1 0 0 cm Q xyz");
        let names: Vec<&str> = got.iter().map(|o| o.1.as_str()).collect();
        assert_eq!(names, vec!["'", "\"", "q", "cm", "Q", "xyz"]);
        assert_eq!(got[1].0.len(), 3);
    }

    #[test]
    fn inline_image_is_one_token() {
        let got = tokenize_content(b"q BI /W 2 /H 1 /BPC 8 /CS /G ID \x00\xFF EI Q").ops;
        let names: Vec<String> = got.iter().map(|o| o.operator.to_string_lossy()).collect();
        assert_eq!(names, vec!["q", "BI", "Q"]);
        let dict = got[1].operands[0].as_dict().unwrap();
        assert_eq!(dict.get_int("W"), Some(2));
        assert_eq!(got[1].operands[1].as_string().unwrap(), b"\x00\xFF");
    }

    #[test]
    fn recovers_after_bad_tokens() {
        let t = tokenize_content(b"(ok) Tj ) ] (fine) Tj");
        assert_eq!(t.ops.len(), 2);
        assert!(!t.errors.is_empty());
        assert_eq!(t.ops[1].operands[0].as_string().unwrap(), b"fine");
    }

    #[test]
    fn never_loops_on_garbage() {
        use proptest::prelude::*;
        proptest!(|(junk in proptest::collection::vec(any::<u8>(), 0..256))| {
            let _ = tokenize_content(&junk);
        });
    }
}
