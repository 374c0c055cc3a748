//! Encoders matching the decodable filters, used to build test files.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::filters::FilterName;

pub fn flate(data: &[u8]) -> Vec<u8> {
    let mut enc = flate2::write::ZlibEncoder::new(Vec::new(), flate2::Compression::default());
    enc.write_all(data).expect("writing to a Vec cannot fail");
    enc.finish().expect("writing to a Vec cannot fail")
}

pub fn ascii_hex(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() * 2 + 1);
    for b in data {
        out.extend_from_slice(format!("{b:02X}").as_bytes());
    }
    out.push(b'>');
    out
}

pub fn ascii85(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() * 5 / 4 + 4);
    for chunk in data.chunks(4) {
        let mut group = [0u8; 4];
        group[..chunk.len()].copy_from_slice(chunk);
        let mut value = u32::from_be_bytes(group);
        if chunk.len() == 4 && value == 0 {
            out.push(b'z');
            continue;
        }
        let mut digits = [0u8; 5];
        for d in digits.iter_mut().rev() {
            *d = (value % 85) as u8 + b'!';
            value /= 85;
        }
        out.extend_from_slice(&digits[..chunk.len() + 1]);
    }
    out.extend_from_slice(b"~>");
    out
}

pub fn run_length(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < data.len() {
        let mut run = 1;
        while i + run < data.len() && run < 128 && data[i + run] == data[i] {
            run += 1;
        }
        if run >= 2 {
            out.push((257 - run) as u8);
            out.push(data[i]);
            i += run;
            continue;
        }
        let start = i;
        while i < data.len() && i - start < 128 {
            if i + 1 < data.len() && data[i + 1] == data[i] {
                break;
            }
            i += 1;
        }
        if i == start {
            i += 1;
        }
        out.push((i - start - 1) as u8);
        out.extend_from_slice(&data[start..i]);
    }
    out.push(128);
    out
}

/// LZW with 9–12 bit codes. The code width follows the decoder's table
/// size, so the output decodes with the same `EarlyChange`.
pub fn lzw(data: &[u8], early_change: bool) -> Vec<u8> {
    const CLEAR: u32 = 256;
    const EOD: u32 = 257;
    let early = u32::from(early_change);
    let mut writer = BitWriter::default();
    let mut dict: HashMap<(u32, u8), u32> = HashMap::new();
    let mut next_code = 258u32;
    let mut width = 9u32;
    // Table size as the decoder will see it after each code.
    let mut decoder_len = 258u32;
    let mut first_since_clear = true;

    writer.put(CLEAR, width);
    let emit = |code: u32, writer: &mut BitWriter, width: &mut u32, decoder_len: &mut u32, first: &mut bool| {
        writer.put(code, *width);
        if !*first {
            *decoder_len = (*decoder_len + 1).min(4096);
        }
        *first = false;
        if *decoder_len + early >= (1 << *width) && *width < 12 {
            *width += 1;
        }
    };

    let mut current: Option<u32> = None;
    for &byte in data {
        let Some(w) = current else {
            current = Some(u32::from(byte));
            continue;
        };
        if let Some(&code) = dict.get(&(w, byte)) {
            current = Some(code);
            continue;
        }
        emit(w, &mut writer, &mut width, &mut decoder_len, &mut first_since_clear);
        if next_code < 4096 {
            dict.insert((w, byte), next_code);
            next_code += 1;
        }
        if next_code == 4096 {
            writer.put(CLEAR, width);
            dict.clear();
            next_code = 258;
            width = 9;
            decoder_len = 258;
            first_since_clear = true;
        }
        current = Some(u32::from(byte));
    }
    if let Some(w) = current {
        emit(w, &mut writer, &mut width, &mut decoder_len, &mut first_since_clear);
    }
    writer.put(EOD, width);
    writer.finish()
}

#[derive(Default)]
struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    fn put(&mut self, code: u32, width: u32) {
        self.acc = self.acc << width | u64::from(code);
        self.nbits += width;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.out.push((self.acc >> self.nbits) as u8);
        }
        self.acc &= (1 << self.nbits) - 1;
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.out.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.out
    }
}

/// PNG "Up" prediction over rows of `columns` bytes (one colour, 8 bits).
pub fn png_up(data: &[u8], columns: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() + data.len() / columns.max(1) + 1);
    let mut prev = vec![0u8; columns];
    for row in data.chunks(columns) {
        out.push(2);
        for (i, &b) in row.iter().enumerate() {
            out.push(b.wrapping_sub(prev[i]));
        }
        prev[..row.len()].copy_from_slice(row);
    }
    out
}

/// Encodes one filter.
pub fn encode(filter: &FilterName, data: &[u8]) -> Result<Vec<u8>> {
    Ok(match filter {
        FilterName::FlateDecode => flate(data),
        FilterName::AsciiHexDecode => ascii_hex(data),
        FilterName::Ascii85Decode => ascii85(data),
        FilterName::RunLengthDecode => run_length(data),
        FilterName::LzwDecode => lzw(data, true),
        other => {
            return Err(Error::Precondition(format!(
                "no encoder for {}",
                String::from_utf8_lossy(other.as_pdf_name())
            )))
        }
    })
}

/// Encodes `data` so that decoding with `chain` (in decode order) gives it
/// back.
pub fn encode_chain(chain: &[FilterName], data: &[u8]) -> Result<Vec<u8>> {
    let mut out = data.to_vec();
    for f in chain.iter().rev() {
        out = encode(f, &out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{apply_filter, FilterSpec};
    use proptest::prelude::*;

    fn round_trip(name: FilterName, data: &[u8]) -> Vec<u8> {
        apply_filter(&FilterSpec::new(name.clone()), &encode(&name, data).unwrap()).unwrap()
    }

    #[test]
    fn known_vectors() {
        assert_eq!(ascii_hex(b"Hello"), b"48656C6C6F>");
        assert_eq!(ascii85(b"Man "), b"9jqo^~>");
        assert_eq!(ascii85(&[0, 0, 0, 0]), b"z~>");
        assert_eq!(run_length(b""), [128]);
        assert_eq!(run_length(b"aaab"), [254, b'a', 0, b'b', 128]);
        // The format reference's LZW example.
        assert_eq!(
            lzw(&[45, 45, 45, 45, 45, 65, 45, 45, 45, 66], true),
            [0x80, 0x0B, 0x60, 0x50, 0x22, 0x0C, 0x0C, 0x85, 0x01]
        );
    }

    #[test]
    fn lzw_matches_an_independent_decoder() {
        // weezl implements the same MSB-first LZW with early change.
        let data: Vec<u8> = (0..20_000u32).map(|i| (i * 7 % 251) as u8 ^ (i / 97) as u8).collect();
        let ours = lzw(&data, true);
        let mut dec = weezl::decode::Decoder::with_tiff_size_switch(weezl::BitOrder::Msb, 8);
        assert_eq!(dec.decode(&ours).unwrap(), data);
        // And our decoder reads weezl's output.
        let mut enc = weezl::encode::Encoder::with_tiff_size_switch(weezl::BitOrder::Msb, 8);
        let theirs = enc.encode(&data).unwrap();
        let back = apply_filter(&FilterSpec::new(FilterName::LzwDecode), &theirs).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn png_up_decodes() {
        use crate::cos::{CosValue, Dict};
        let data: Vec<u8> = (0..70u8).collect();
        let mut params = Dict::new();
        params.insert("Predictor", CosValue::Integer(12));
        params.insert("Columns", CosValue::Integer(7));
        let spec = FilterSpec::with_params(FilterName::FlateDecode, params);
        assert_eq!(apply_filter(&spec, &flate(&png_up(&data, 7))).unwrap(), data);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn every_filter_round_trips(data in proptest::collection::vec(any::<u8>(), 0..65_536)) {
            for name in [
                FilterName::FlateDecode,
                FilterName::AsciiHexDecode,
                FilterName::Ascii85Decode,
                FilterName::RunLengthDecode,
                FilterName::LzwDecode,
            ] {
                prop_assert_eq!(round_trip(name, &data), data.clone());
            }
        }

        #[test]
        fn repetitive_data_round_trips(seed in proptest::collection::vec(0u8..3, 1..64), reps in 1usize..2000) {
            let data: Vec<u8> = seed.iter().cycle().take(seed.len() * reps).copied().collect();
            prop_assert_eq!(round_trip(FilterName::RunLengthDecode, &data), data.clone());
            prop_assert_eq!(round_trip(FilterName::LzwDecode, &data), data.clone());
        }
    }
}
