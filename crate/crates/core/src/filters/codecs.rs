//! Decoders for the non-image stream filters.

use std::io::Read;

use flate2::read::{DeflateDecoder, ZlibDecoder};

use crate::cos::is_whitespace;
use crate::error::{Error, Result};

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptStream(msg.into())
}

fn check_cap(len: usize, cap: usize) -> Result<()> {
    if len > cap {
        Err(corrupt("expansion cap"))
    } else {
        Ok(())
    }
}

pub(crate) fn flate(input: &[u8], cap: usize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let zlib_header = input.len() >= 2
        && input[0] & 0x0F == 8
        && (u16::from(input[0]) << 8 | u16::from(input[1])) % 31 == 0;
    let read = if zlib_header {
        ZlibDecoder::new(input).take(cap as u64 + 1).read_to_end(&mut out)
    } else {
        DeflateDecoder::new(input).take(cap as u64 + 1).read_to_end(&mut out)
    };
    read.map_err(|e| corrupt(format!("inflate: {e}")))?;
    check_cap(out.len(), cap)?;
    Ok(out)
}

pub(crate) fn ascii_hex(input: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(input.len() / 2);
    let mut high: Option<u8> = None;
    for &c in input {
        if c == b'>' {
            break;
        }
        if is_whitespace(c) {
            continue;
        }
        let v = match c {
            b'0'..=b'9' => c - b'0',
            b'a'..=b'f' => c - b'a' + 10,
            b'A'..=b'F' => c - b'A' + 10,
            _ => return Err(corrupt(format!("ASCIIHex: invalid byte 0x{c:02X}"))),
        };
        match high.take() {
            Some(h) => out.push(h << 4 | v),
            None => high = Some(v),
        }
    }
    if let Some(h) = high {
        out.push(h << 4);
    }
    Ok(out)
}

pub(crate) fn ascii85(input: &[u8], cap: usize) -> Result<Vec<u8>> {
    let body = input.strip_prefix(b"<~").unwrap_or(input);
    let mut out = Vec::with_capacity(body.len() * 4 / 5);
    let mut group = [0u8; 5];
    let mut n = 0usize;
    let mut i = 0usize;
    while i < body.len() {
        let c = body[i];
        i += 1;
        match c {
            b'~' => break,
            b'z' if n == 0 => out.extend_from_slice(&[0; 4]),
            b'!'..=b'u' => {
                group[n] = c - b'!';
                n += 1;
                if n == 5 {
                    out.extend_from_slice(&a85_group(&group)?.to_be_bytes());
                    n = 0;
                }
            }
            _ if is_whitespace(c) => {}
            _ => return Err(corrupt(format!("ASCII85: invalid byte 0x{c:02X}"))),
        }
        check_cap(out.len(), cap)?;
    }
    match n {
        0 => {}
        1 => return Err(corrupt("ASCII85: dangling single character")),
        _ => {
            for slot in group.iter_mut().skip(n) {
                *slot = 84;
            }
            let word = a85_group(&group)?.to_be_bytes();
            out.extend_from_slice(&word[..n - 1]);
        }
    }
    Ok(out)
}

fn a85_group(g: &[u8; 5]) -> Result<u32> {
    let v = g.iter().fold(0u64, |acc, &d| acc * 85 + u64::from(d));
    u32::try_from(v).map_err(|_| corrupt("ASCII85: group overflow"))
}

pub(crate) fn run_length(input: &[u8], cap: usize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < input.len() {
        let len = input[i];
        i += 1;
        match len {
            128 => break,
            0..=127 => {
                let n = usize::from(len) + 1;
                let chunk = input
                    .get(i..i + n)
                    .ok_or_else(|| corrupt("RunLength: truncated literal run"))?;
                out.extend_from_slice(chunk);
                i += n;
            }
            _ => {
                let b = *input.get(i).ok_or_else(|| corrupt("RunLength: truncated repeat"))?;
                i += 1;
                out.resize(out.len() + 257 - usize::from(len), b);
            }
        }
        check_cap(out.len(), cap)?;
    }
    Ok(out)
}

/// Variable-width (9..12 bit) MSB-first LZW with clear code 256 and EOD
/// 257. `early_change` is the /EarlyChange parameter.
pub(crate) fn lzw(input: &[u8], early_change: bool, cap: usize) -> Result<Vec<u8>> {
    const CLEAR: u16 = 256;
    const EOD: u16 = 257;
    let early = usize::from(early_change);

    // Each entry is (prefix code, last byte, length); strings are rebuilt
    // backwards on emission.
    let mut table: Vec<(u16, u8, usize)> = (0..=255u16).map(|b| (u16::MAX, b as u8, 1)).collect();
    table.push((u16::MAX, 0, 0));
    table.push((u16::MAX, 0, 0));
    let mut width = 9u32;
    let mut prev: Option<u16> = None;
    let mut out = Vec::new();
    let mut bits = 0u32;
    let mut nbits = 0u32;
    let mut bytes = input.iter();

    let emit = |table: &[(u16, u8, usize)], code: u16, out: &mut Vec<u8>| -> u8 {
        let (_, _, len) = table[code as usize];
        let start = out.len();
        out.resize(start + len, 0);
        let mut c = code;
        for slot in (start..start + len).rev() {
            let (p, b, _) = table[c as usize];
            out[slot] = b;
            c = p;
        }
        out[start]
    };

    loop {
        while nbits < width {
            match bytes.next() {
                Some(&b) => {
                    bits = bits << 8 | u32::from(b);
                    nbits += 8;
                }
                None => return Ok(out),
            }
        }
        let code = ((bits >> (nbits - width)) & ((1 << width) - 1)) as u16;
        nbits -= width;
        bits &= (1u32 << nbits).wrapping_sub(1);

        match code {
            CLEAR => {
                table.truncate(258);
                width = 9;
                prev = None;
                continue;
            }
            EOD => return Ok(out),
            _ => {}
        }
        let next = table.len();
        match prev {
            None => {
                if usize::from(code) >= next {
                    return Err(corrupt("LZW: code out of range"));
                }
                emit(&table, code, &mut out);
            }
            Some(p) => {
                let first = if usize::from(code) < next {
                    emit(&table, code, &mut out)
                } else if usize::from(code) == next {
                    let first = emit(&table, p, &mut out);
                    out.push(first);
                    first
                } else {
                    return Err(corrupt("LZW: code out of range"));
                };
                if next < 4096 {
                    let plen = table[p as usize].2;
                    table.push((p, first, plen + 1));
                }
            }
        }
        prev = Some(code);
        check_cap(out.len(), cap)?;
        if table.len() + early >= (1 << width) && width < 12 {
            width += 1;
        }
    }
}

/// Undoes a TIFF (2) or PNG (>= 10) predictor.
pub(crate) fn unpredict(
    data: Vec<u8>,
    predictor: i64,
    colors: usize,
    bits_per_component: usize,
    columns: usize,
) -> Result<Vec<u8>> {
    if predictor <= 1 {
        return Ok(data);
    }
    if colors == 0 || colors > 32 || !matches!(bits_per_component, 1 | 2 | 4 | 8 | 16) || columns == 0 {
        return Err(corrupt("predictor: invalid parameters"));
    }
    let row_bits = colors
        .checked_mul(bits_per_component)
        .and_then(|b| b.checked_mul(columns))
        .ok_or_else(|| corrupt("predictor: row too large"))?;
    let row_len = row_bits.div_ceil(8);
    let bpp = (colors * bits_per_component).div_ceil(8).max(1);

    if predictor == 2 {
        if bits_per_component != 8 {
            return Err(corrupt("TIFF predictor: only 8-bit components are supported"));
        }
        let mut data = data;
        for row in data.chunks_mut(row_len) {
            for i in bpp..row.len() {
                row[i] = row[i].wrapping_add(row[i - bpp]);
            }
        }
        return Ok(data);
    }
    if predictor < 10 {
        return Err(corrupt(format!("unknown predictor {predictor}")));
    }

    let mut out = Vec::with_capacity(data.len());
    let mut prior = vec![0u8; row_len];
    for chunk in data.chunks(row_len + 1) {
        let (kind, src) = (chunk[0], &chunk[1..]);
        let mut row = vec![0u8; src.len()];
        for i in 0..src.len() {
            let left = if i >= bpp { row[i - bpp] } else { 0 };
            let up = prior[i];
            let up_left = if i >= bpp { prior[i - bpp] } else { 0 };
            row[i] = match kind {
                0 => src[i],
                1 => src[i].wrapping_add(left),
                2 => src[i].wrapping_add(up),
                3 => src[i].wrapping_add(((u16::from(left) + u16::from(up)) / 2) as u8),
                4 => src[i].wrapping_add(paeth(left, up, up_left)),
                _ => return Err(corrupt(format!("PNG predictor: bad row filter {kind}"))),
            };
        }
        out.extend_from_slice(&row);
        prior[..row.len()].copy_from_slice(&row);
    }
    Ok(out)
}

pub(crate) fn paeth(a: u8, b: u8, c: u8) -> u8 {
    let p = i16::from(a) + i16::from(b) - i16::from(c);
    let pa = (p - i16::from(a)).abs();
    let pb = (p - i16::from(b)).abs();
    let pc = (p - i16::from(c)).abs();
    if pa <= pb && pa <= pc {
        a
    } else if pb <= pc {
        b
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: usize = 1 << 20;

    #[test]
    fn ascii_hex_hello() {
        assert_eq!(ascii_hex(b"48656C6C6F>").unwrap(), b"Hello");
        assert_eq!(ascii_hex(b"4 8 6>trailing").unwrap(), b"H`");
        assert!(ascii_hex(b"4x>").is_err());
    }

    #[test]
    fn ascii85_known_vectors() {
        // "Man " -> 9jqo^ ; hand-checked: 0x4D616E20 = 1298230816
        assert_eq!(ascii85(b"9jqo^~>", CAP).unwrap(), b"Man ");
        assert_eq!(ascii85(b"z~>", CAP).unwrap(), [0u8; 4]);
        assert_eq!(ascii85(b"<~9jqo^ ~>", CAP).unwrap(), b"Man ");
        assert!(ascii85(b"9jqo^v~>", CAP).is_err());
        assert!(ascii85(b"9~>", CAP).is_err());
        assert!(ascii85(b"uuuuu~>", CAP).is_err());
    }

    #[test]
    fn run_length_eod_only() {
        assert_eq!(run_length(&[128], CAP).unwrap(), b"");
        assert_eq!(run_length(&[2, b'a', b'b', b'c', 254, b'x', 128], CAP).unwrap(), b"abcxxx");
        assert!(run_length(&[5, b'a'], CAP).is_err());
    }

    #[test]
    fn lzw_spec_example() {
        // The sequence 45 45 45 45 45 65 45 45 45 66 from the format
        // reference encodes to 80 0B 60 50 22 0C 0C 85 01 with EarlyChange 1.
        let encoded = [0x80, 0x0B, 0x60, 0x50, 0x22, 0x0C, 0x0C, 0x85, 0x01];
        assert_eq!(
            lzw(&encoded, true, CAP).unwrap(),
            [45, 45, 45, 45, 45, 65, 45, 45, 45, 66]
        );
    }

    #[test]
    fn png_up_and_paeth_rows() {
        // Two rows of 3 bytes, Up filter on the second row.
        let data = vec![0, 1, 2, 3, 2, 1, 1, 1];
        assert_eq!(unpredict(data, 12, 1, 8, 3).unwrap(), vec![1, 2, 3, 2, 3, 4]);
        let data = vec![4, 10, 20, 4, 5, 5];
        // Paeth: row0 left-only -> 10, 30; row1: a=0,b=10,c=0 -> b; then
        // a=15,b=30,c=10 -> p=35, pa=20, pb=5, pc=25 -> b.
        assert_eq!(unpredict(data, 14, 1, 8, 2).unwrap(), vec![10, 30, 15, 35]);
        assert!(unpredict(vec![9, 0, 0], 12, 1, 8, 2).is_err());
    }

    #[test]
    fn tiff_predictor() {
        assert_eq!(unpredict(vec![1, 1, 1, 5, 1, 1], 2, 1, 8, 3).unwrap(), vec![1, 2, 3, 5, 6, 7]);
    }

    #[test]
    fn flate_garbage_is_corrupt() {
        assert!(matches!(flate(b"\x78\x9c\xff\xff\xff", CAP), Err(Error::CorruptStream(_))));
    }
}
