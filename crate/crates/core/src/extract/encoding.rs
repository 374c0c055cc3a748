//! Single-byte base encodings and document-level text strings.

/// Base encoding for simple (single-byte) fonts, or the two-byte identity
/// mapping used by composite fonts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum BaseEncoding {
    Standard,
    WinAnsi,
    MacRoman,
    IdentityTwoByte,
}

impl BaseEncoding {
    pub fn from_name(name: &[u8]) -> Option<Self> {
        match name {
            b"StandardEncoding" => Some(BaseEncoding::Standard),
            b"WinAnsiEncoding" => Some(BaseEncoding::WinAnsi),
            b"MacRomanEncoding" => Some(BaseEncoding::MacRoman),
            b"Identity-H" | b"Identity-V" => Some(BaseEncoding::IdentityTwoByte),
            _ => None,
        }
    }

    /// Bytes per character code.
    pub fn code_width(self) -> usize {
        if self == BaseEncoding::IdentityTwoByte {
            2
        } else {
            1
        }
    }

    /// Maps one single-byte code. Composite fonts have no intrinsic
    /// mapping, so this is `None` for them.
    pub fn decode_byte(self, code: u8) -> Option<char> {
        match self {
            BaseEncoding::WinAnsi => Some(single_byte(encoding_rs::WINDOWS_1252, code)),
            BaseEncoding::MacRoman => Some(single_byte(encoding_rs::MACINTOSH, code)),
            BaseEncoding::Standard => standard(code),
            BaseEncoding::IdentityTwoByte => None,
        }
    }
}

fn single_byte(enc: &'static encoding_rs::Encoding, code: u8) -> char {
    let bytes = [code];
    let (text, _) = enc.decode_without_bom_handling(&bytes);
    text.chars().next().unwrap_or('\u{FFFD}')
}

fn standard(code: u8) -> Option<char> {
    let c = match code {
        0x27 => '\u{2019}',
        0x60 => '\u{2018}',
        0x20..=0x7E => code as char,
        0xA1 => '¡',
        0xA2 => '¢',
        0xA3 => '£',
        0xA4 => '\u{2044}',
        0xA5 => '¥',
        0xA6 => 'ƒ',
        0xA7 => '§',
        0xA8 => '¤',
        0xA9 => '\'',
        0xAA => '\u{201C}',
        0xAB => '«',
        0xAC => '\u{2039}',
        0xAD => '\u{203A}',
        0xAE => '\u{FB01}',
        0xAF => '\u{FB02}',
        0xB1 => '\u{2013}',
        0xB2 => '\u{2020}',
        0xB3 => '\u{2021}',
        0xB4 => '·',
        0xB6 => '¶',
        0xB7 => '\u{2022}',
        0xB8 => '\u{201A}',
        0xB9 => '\u{201E}',
        0xBA => '\u{201D}',
        0xBB => '»',
        0xBC => '\u{2026}',
        0xBD => '\u{2030}',
        0xBF => '¿',
        0xC1 => '`',
        0xC2 => '´',
        0xC3 => '\u{02C6}',
        0xC4 => '\u{02DC}',
        0xC5 => '¯',
        0xC6 => '\u{02D8}',
        0xC7 => '\u{02D9}',
        0xC8 => '¨',
        0xCA => '\u{02DA}',
        0xCB => '¸',
        0xCD => '\u{02DD}',
        0xCE => '\u{02DB}',
        0xCF => '\u{02C7}',
        0xD0 => '\u{2014}',
        0xE1 => 'Æ',
        0xE3 => 'ª',
        0xE8 => 'Ł',
        0xE9 => 'Ø',
        0xEA => 'Œ',
        0xEB => 'º',
        0xF1 => 'æ',
        0xF5 => 'ı',
        0xF8 => 'ł',
        0xF9 => 'ø',
        0xFA => 'œ',
        0xFB => 'ß',
        _ => return None,
    };
    Some(c)
}

/// PDFDocEncoding, used by text strings without a byte-order mark.
pub fn pdf_doc_char(code: u8) -> char {
    const HIGH: [char; 33] = [
        '\u{2022}', '\u{2020}', '\u{2021}', '\u{2026}', '\u{2014}', '\u{2013}', '\u{0192}',
        '\u{2044}', '\u{2039}', '\u{203A}', '\u{2212}', '\u{2030}', '\u{201E}', '\u{201C}',
        '\u{201D}', '\u{2018}', '\u{2019}', '\u{201A}', '\u{2122}', '\u{FB01}', '\u{FB02}',
        '\u{0141}', '\u{0152}', '\u{0160}', '\u{0178}', '\u{017D}', '\u{0131}', '\u{0142}',
        '\u{0153}', '\u{0161}', '\u{017E}', '\u{FFFD}', '\u{20AC}',
    ];
    const LOW: [char; 8] = [
        '\u{02D8}', '\u{02C7}', '\u{02C6}', '\u{02D9}', '\u{02DD}', '\u{02DB}', '\u{02DA}',
        '\u{02DC}',
    ];
    match code {
        0x18..=0x1F => LOW[usize::from(code - 0x18)],
        0x7F | 0xAD => '\u{FFFD}',
        0x80..=0xA0 => HIGH[usize::from(code - 0x80)],
        _ => char::from(code),
    }
}

/// Decodes a PDF text string: UTF-16BE after `FE FF`, UTF-8 after
/// `EF BB BF`, PDFDocEncoding otherwise.
pub fn decode_text_string(bytes: &[u8]) -> String {
    if let Some(rest) = bytes.strip_prefix(&[0xFE, 0xFF]) {
        let units: Vec<u16> = rest
            .chunks(2)
            .map(|c| u16::from_be_bytes([c[0], *c.get(1).unwrap_or(&0)]))
            .collect();
        return char::decode_utf16(units)
            .map(|r| r.unwrap_or('\u{FFFD}'))
            .collect();
    }
    if let Some(rest) = bytes.strip_prefix(&[0xEF, 0xBB, 0xBF]) {
        return String::from_utf8_lossy(rest).into_owned();
    }
    bytes.iter().map(|&b| pdf_doc_char(b)).collect()
}

/// Encodes text as a PDF text string: plain bytes when every character
/// survives PDFDocEncoding's ASCII range, UTF-16BE with a BOM otherwise.
pub fn encode_text_string(text: &str) -> Vec<u8> {
    if text.bytes().all(|b| (0x20..0x7F).contains(&b) || b == b'\n' || b == b'\t') {
        return text.as_bytes().to_vec();
    }
    let mut out = vec![0xFE, 0xFF];
    for unit in text.encode_utf16() {
        out.extend_from_slice(&unit.to_be_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utf16_text_string() {
        assert_eq!(decode_text_string(&[0xFE, 0xFF, 0xD5, 0x5C, 0x00, 0x41]), "한A");
        // Surrogate pair.
        assert_eq!(decode_text_string(&[0xFE, 0xFF, 0xD8, 0x40, 0xDC, 0x3E]), "\u{2003E}");
        // Odd trailing byte does not panic.
        assert_eq!(decode_text_string(&[0xFE, 0xFF, 0x00]).chars().count(), 1);
    }

    #[test]
    fn pdfdoc_text_string() {
        assert_eq!(decode_text_string(b"My Doc"), "My Doc");
        assert_eq!(decode_text_string(&[0x80, 0xA0, 0xE9]), "\u{2022}\u{20AC}é");
        assert_eq!(decode_text_string(&[0xEF, 0xBB, 0xBF, 0xC3, 0xA9]), "é");
    }

    #[test]
    fn encode_round_trips() {
        for s in ["Plain", "한글 text", "\u{2003E}", "caf\u{e9}"] {
            assert_eq!(decode_text_string(&encode_text_string(s)), s);
        }
    }

    #[test]
    fn base_encodings() {
        assert_eq!(BaseEncoding::WinAnsi.decode_byte(0x80), Some('\u{20AC}'));
        assert_eq!(BaseEncoding::WinAnsi.decode_byte(b'A'), Some('A'));
        assert_eq!(BaseEncoding::MacRoman.decode_byte(0x8E), Some('é'));
        assert_eq!(BaseEncoding::Standard.decode_byte(0x27), Some('\u{2019}'));
        assert_eq!(BaseEncoding::Standard.decode_byte(0x80), None);
        assert_eq!(BaseEncoding::IdentityTwoByte.code_width(), 2);
    }
}
