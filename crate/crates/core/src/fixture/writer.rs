use std::io::Write;

use crate::cos::{ByteSpan, CosValue, Dict, ObjectId};
use crate::error::{Error, Result};
use crate::filters::FilterName;
use crate::revisions::format_entry_line;

use super::encode::{encode_chain, flate, png_up};
use super::{Manifest, ManifestObject, ObjectRole};

const HEADER: &[u8] = b"%PDF-1.7\n%\xE2\xE3\xCF\xD3\n";

pub(crate) enum Body {
    Value(CosValue),
    /// Stream data already encoded for the filters named in `dict`.
    RawStream { dict: Dict, raw: Vec<u8>, payload: Option<Vec<u8>> },
}

impl Body {
    pub(crate) fn stream(mut dict: Dict, filters: &[FilterName], data: Vec<u8>) -> Result<Body> {
        let raw = encode_chain(filters, &data)?;
        match filters {
            [] => {}
            [one] => {
                dict.insert("Filter", CosValue::name(one.as_pdf_name()));
            }
            many => {
                let names = many.iter().map(|f| CosValue::name(f.as_pdf_name())).collect();
                dict.insert("Filter", CosValue::Array(names));
            }
        }
        Ok(Body::RawStream { dict, raw, payload: Some(data) })
    }
}

/// Appends objects to a file image and closes the block with an xref
/// section, trailer, `startxref` and `%%EOF`.
pub(crate) struct BlockWriter {
    out: Vec<u8>,
    block_start: usize,
    revision: usize,
    next: u32,
    written: Vec<(ObjectId, usize)>,
    objects: Vec<ManifestObject>,
}

impl BlockWriter {
    /// `prefix` is the existing file (empty for a new one); `next` is the
    /// first unused object number.
    pub(crate) fn new(prefix: Vec<u8>, revision: usize, next: u32) -> Self {
        let mut out = prefix;
        let block_start = out.len();
        if out.is_empty() {
            out.extend_from_slice(HEADER);
        } else if !matches!(out.last(), Some(b'\n' | b'\r')) {
            out.push(b'\n');
        }
        BlockWriter { out, block_start, revision, next, written: Vec::new(), objects: Vec::new() }
    }

    pub(crate) fn allocate(&mut self) -> ObjectId {
        let id = ObjectId::new(self.next, 0);
        self.next += 1;
        id
    }

    pub(crate) fn object(&mut self, id: ObjectId, role: ObjectRole, body: Body) {
        let start = self.out.len();
        let _ = write!(self.out, "{} {} obj\n", id.number, id.generation);
        let payload = match body {
            Body::Value(v) => {
                v.write_to(&mut self.out);
                None
            }
            Body::RawStream { mut dict, raw, payload } => {
                dict.insert("Length", CosValue::Integer(raw.len() as i64));
                dict.write_to(&mut self.out);
                self.out.extend_from_slice(b"\nstream\n");
                self.out.extend_from_slice(&raw);
                self.out.extend_from_slice(b"\nendstream");
                payload
            }
        };
        self.out.extend_from_slice(b"\nendobj");
        let span = ByteSpan::from_range(start, self.out.len());
        self.out.push(b'\n');
        self.next = self.next.max(id.number + 1);
        self.written.push((id, start));
        self.objects.push(ManifestObject { id, span, role, payload });
    }

    /// Closes the block. `first` writes a complete table starting at object
    /// 0; otherwise only the objects written here are listed.
    pub(crate) fn finish(mut self, trailer: Dict, xref_stream: bool, first: bool) -> Result<(Vec<u8>, Manifest)> {
        let xref_offset = if xref_stream {
            self.xref_stream(trailer, first)?
        } else {
            self.xref_table(trailer, first)
        };
        let _ = write!(self.out, "startxref\n{xref_offset}\n%%EOF\n");
        let manifest = Manifest {
            revision: self.revision,
            block_start: self.block_start,
            file_len: self.out.len(),
            xref_offset,
            page_count: 0,
            objects: self.objects,
        };
        Ok((self.out, manifest))
    }

    /// `(number, Some((offset, generation)))` rows grouped into contiguous
    /// subsections; `None` marks a free slot.
    fn subsections(&self, first: bool, size: u32) -> Vec<(u32, Vec<Option<(usize, u16)>>)> {
        let mut rows: Vec<(u32, (usize, u16))> =
            self.written.iter().map(|(id, off)| (id.number, (*off, id.generation))).collect();
        rows.sort_by_key(|r| r.0);
        rows.dedup_by_key(|r| r.0);
        if first {
            let mut all = vec![None; size as usize];
            for (n, row) in rows {
                all[n as usize] = Some(row);
            }
            return vec![(0, all)];
        }
        let mut groups: Vec<(u32, Vec<Option<(usize, u16)>>)> = Vec::new();
        for (n, row) in rows {
            match groups.last_mut() {
                Some((start, items)) if *start + items.len() as u32 == n => items.push(Some(row)),
                _ => groups.push((n, vec![Some(row)])),
            }
        }
        groups
    }

    fn trailer_dict(&self, size: u32, rest: Dict) -> Dict {
        let mut d = Dict::new();
        d.insert("Size", CosValue::Integer(i64::from(size)));
        for (k, v) in rest.iter() {
            d.insert(k.as_bytes(), v.clone());
        }
        d
    }

    fn xref_table(&mut self, trailer: Dict, first: bool) -> usize {
        let size = self.next;
        let offset = self.out.len();
        self.out.extend_from_slice(b"xref\n");
        for (start, items) in self.subsections(first, size) {
            let _ = write!(self.out, "{start} {}\n", items.len());
            for item in items {
                let line = match item {
                    Some((off, gen)) => format_entry_line(off, gen, true),
                    None => format_entry_line(0, 65535, false),
                };
                self.out.extend_from_slice(line.as_bytes());
                self.out.extend_from_slice(b"\r\n");
            }
        }
        self.out.extend_from_slice(b"trailer\n");
        self.trailer_dict(size, trailer).write_to(&mut self.out);
        self.out.push(b'\n');
        offset
    }

    fn xref_stream(&mut self, trailer: Dict, first: bool) -> Result<usize> {
        let id = self.allocate();
        let offset = self.out.len();
        // Registered before grouping so the stream lists itself.
        self.written.push((id, offset));
        let size = self.next;
        let groups = self.subsections(first, size);
        self.written.pop();

        let mut rows = Vec::new();
        let mut index = Vec::new();
        for (start, items) in &groups {
            index.push(CosValue::Integer(i64::from(*start)));
            index.push(CosValue::Integer(items.len() as i64));
            for item in items {
                match item {
                    Some((off, gen)) => {
                        let off = u32::try_from(*off)
                            .map_err(|_| Error::Precondition("offset too large for a 4-byte xref field".into()))?;
                        rows.push(1u8);
                        rows.extend_from_slice(&off.to_be_bytes());
                        rows.extend_from_slice(&gen.to_be_bytes());
                    }
                    None => {
                        rows.extend_from_slice(&[0, 0, 0, 0, 0]);
                        rows.extend_from_slice(&65535u16.to_be_bytes());
                    }
                }
            }
        }
        let mut dict = self.trailer_dict(size, trailer);
        dict.insert("Type", CosValue::name("XRef"));
        dict.insert("W", CosValue::Array([1, 4, 2].into_iter().map(CosValue::Integer).collect()));
        dict.insert("Index", CosValue::Array(index));
        dict.insert("Filter", CosValue::name("FlateDecode"));
        let mut parms = Dict::new();
        parms.insert("Predictor", CosValue::Integer(12));
        parms.insert("Columns", CosValue::Integer(7));
        dict.insert("DecodeParms", CosValue::Dict(parms));
        let raw = flate(&png_up(&rows, 7));
        self.object(id, ObjectRole::XrefStream, Body::RawStream { dict, raw, payload: Some(rows) });
        Ok(offset)
    }
}
