use memchr::memmem;

use super::lexer::{is_regular, is_whitespace, parse_indirect_object};
use super::{ByteSpan, ObjectId};

/// Every syntactic `N G obj ... endobj` found by carving.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObjectScan {
    /// In file order; spans never overlap. Ids repeat when an object was
    /// rewritten by a later update.
    pub objects: Vec<(ObjectId, ByteSpan)>,
    /// Candidates that looked like object headers but failed to parse.
    pub warnings: usize,
}

/// Carves the file for indirect objects without consulting any xref.
pub fn scan_all_objects(bytes: &[u8]) -> ObjectScan {
    let mut scan = ObjectScan::default();
    let mut cursor = 0usize;
    let no_lengths = |_: ObjectId| None;
    for kw in memmem::find_iter(bytes, b"obj") {
        if kw < cursor {
            continue;
        }
        if bytes.get(kw + 3).copied().is_some_and(is_regular) {
            continue;
        }
        let Some(start) = header_start(bytes, kw) else {
            continue;
        };
        if start < cursor {
            continue;
        }
        match parse_indirect_object(bytes, start, Some(&no_lengths)) {
            Ok(obj) => {
                cursor = obj.span.end();
                scan.objects.push((obj.id, obj.span));
            }
            Err(_) => scan.warnings += 1,
        }
    }
    scan
}

/// Walks backwards from an `obj` keyword over `digits ws digits ws`.
fn header_start(bytes: &[u8], kw: usize) -> Option<usize> {
    let mut p = kw;
    let skip_ws = |p: &mut usize| -> bool {
        let from = *p;
        while *p > 0 && is_whitespace(bytes[*p - 1]) {
            *p -= 1;
        }
        *p < from
    };
    let skip_digits = |p: &mut usize| -> bool {
        let from = *p;
        while *p > 0 && bytes[*p - 1].is_ascii_digit() && from - *p < 10 {
            *p -= 1;
        }
        *p < from
    };
    if !skip_ws(&mut p) || !skip_digits(&mut p) || !skip_ws(&mut p) || !skip_digits(&mut p) {
        return None;
    }
    if p > 0 && is_regular(bytes[p - 1]) {
        return None;
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file() {
        assert_eq!(scan_all_objects(b""), ObjectScan::default());
    }

    #[test]
    fn finds_objects_in_order_and_skips_stream_payloads() {
        let src = b"%PDF-1.7\n1 0 obj\n<</Length 12>>\nstream\n9 0 obj fake\nendstream\nendobj\n\
2 0 obj (x) endobj\n1 0 obj 5 endobj";
        let scan = scan_all_objects(src);
        let ids: Vec<u32> = scan.objects.iter().map(|(id, _)| id.number).collect();
        assert_eq!(ids, vec![1, 2, 1]);
        assert!(scan.objects.windows(2).all(|w| w[0].1.end() <= w[1].1.start));
        assert_eq!(scan.warnings, 0);
    }

    #[test]
    fn broken_candidates_are_counted() {
        let scan = scan_all_objects(b"1 0 obj (unterminated endobj\n2 0 obj null endobj");
        assert_eq!(scan.warnings, 1);
        assert_eq!(scan.objects.len(), 1);
        assert_eq!(scan.objects[0].0, ObjectId::new(2, 0));
    }

    #[test]
    fn ignores_endobj_and_objstm() {
        let scan = scan_all_objects(b"/ObjStm endobj xobj 1 obj");
        assert!(scan.objects.is_empty());
    }
}
