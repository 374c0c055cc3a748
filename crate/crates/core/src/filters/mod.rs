//! Stream filter chains.
//!
//! Image codecs (DCT, JPX, CCITT) are never decoded: a chain stops in front
//! of them and hands the still-encoded bytes back together with the
//! terminal filter, so extracted JPEGs stay byte-identical to what was
//! embedded.

mod codecs;

use crate::cos::{CosValue, Dict, Name, ObjectId, Stream};
use crate::error::{Error, Result};

/// Default per-stream output cap.
pub const DEFAULT_DECODE_CAP: usize = 256 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterName {
    FlateDecode,
    AsciiHexDecode,
    Ascii85Decode,
    RunLengthDecode,
    LzwDecode,
    DctDecode,
    JpxDecode,
    CcittFaxDecode,
    Other(Name),
}

impl FilterName {
    pub fn from_name(name: &[u8]) -> Self {
        match name {
            b"FlateDecode" | b"Fl" => FilterName::FlateDecode,
            b"ASCIIHexDecode" | b"AHx" => FilterName::AsciiHexDecode,
            b"ASCII85Decode" | b"A85" => FilterName::Ascii85Decode,
            b"RunLengthDecode" | b"RL" => FilterName::RunLengthDecode,
            b"LZWDecode" | b"LZW" => FilterName::LzwDecode,
            b"DCTDecode" | b"DCT" => FilterName::DctDecode,
            b"JPXDecode" => FilterName::JpxDecode,
            b"CCITTFaxDecode" | b"CCF" => FilterName::CcittFaxDecode,
            other => FilterName::Other(Name::new(other)),
        }
    }

    pub fn as_pdf_name(&self) -> &[u8] {
        match self {
            FilterName::FlateDecode => b"FlateDecode",
            FilterName::AsciiHexDecode => b"ASCIIHexDecode",
            FilterName::Ascii85Decode => b"ASCII85Decode",
            FilterName::RunLengthDecode => b"RunLengthDecode",
            FilterName::LzwDecode => b"LZWDecode",
            FilterName::DctDecode => b"DCTDecode",
            FilterName::JpxDecode => b"JPXDecode",
            FilterName::CcittFaxDecode => b"CCITTFaxDecode",
            FilterName::Other(n) => n.as_bytes(),
        }
    }

    /// Image codecs end a decode chain.
    pub fn is_image_codec(&self) -> bool {
        matches!(
            self,
            FilterName::DctDecode | FilterName::JpxDecode | FilterName::CcittFaxDecode
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub name: FilterName,
    pub params: Dict,
}

impl FilterSpec {
    pub fn new(name: FilterName) -> Self {
        FilterSpec {
            name,
            params: Dict::new(),
        }
    }

    pub fn with_params(name: FilterName, params: Dict) -> Self {
        FilterSpec { name, params }
    }

    fn param(&self, key: &str, default: i64) -> i64 {
        self.params.get_int(key).unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeLimits {
    pub max_output: usize,
}

impl Default for DecodeLimits {
    fn default() -> Self {
        DecodeLimits {
            max_output: DEFAULT_DECODE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedStream {
    pub data: Vec<u8>,
    /// The image codec the chain stopped at, if any.
    pub terminal: Option<FilterSpec>,
    /// Set when an unrecognised filter was reached; `data` is then the
    /// output of the filters before it.
    pub unknown_filter: Option<Name>,
}

/// Applies one decodable filter.
pub fn apply_filter(spec: &FilterSpec, input: &[u8]) -> Result<Vec<u8>> {
    apply_filter_with(spec, input, DecodeLimits::default())
}

pub fn apply_filter_with(spec: &FilterSpec, input: &[u8], limits: DecodeLimits) -> Result<Vec<u8>> {
    let cap = limits.max_output;
    let decoded = match &spec.name {
        FilterName::FlateDecode => codecs::flate(input, cap)?,
        FilterName::LzwDecode => codecs::lzw(input, spec.param("EarlyChange", 1) != 0, cap)?,
        FilterName::AsciiHexDecode => codecs::ascii_hex(input)?,
        FilterName::Ascii85Decode => codecs::ascii85(input, cap)?,
        FilterName::RunLengthDecode => codecs::run_length(input, cap)?,
        other => {
            return Err(Error::CorruptStream(format!(
                "{} is not a decodable filter",
                String::from_utf8_lossy(other.as_pdf_name())
            )))
        }
    };
    if matches!(spec.name, FilterName::FlateDecode | FilterName::LzwDecode) {
        let predictor = spec.param("Predictor", 1);
        let as_usize = |v: i64| usize::try_from(v).unwrap_or(0);
        return codecs::unpredict(
            decoded,
            predictor,
            as_usize(spec.param("Colors", 1)),
            as_usize(spec.param("BitsPerComponent", 8)),
            as_usize(spec.param("Columns", 1)),
        );
    }
    Ok(decoded)
}

/// Reads `/Filter` and `/DecodeParms` (or their inline-image
/// abbreviations) into a positional chain.
pub fn filter_chain(dict: &Dict, resolve: &dyn Fn(ObjectId) -> Option<CosValue>) -> Vec<FilterSpec> {
    let deref = |v: &CosValue| -> CosValue {
        match v {
            CosValue::Reference(id) => resolve(*id).unwrap_or(CosValue::Null),
            other => other.clone(),
        }
    };
    let filters = dict.get("Filter").map(deref);
    let names: Vec<FilterName> = match &filters {
        Some(CosValue::Name(n)) => vec![FilterName::from_name(n.as_bytes())],
        Some(CosValue::Array(items)) => items
            .iter()
            .filter_map(|v| deref(v).as_name().map(FilterName::from_name))
            .collect(),
        _ => Vec::new(),
    };
    let parms = dict.get("DecodeParms").or_else(|| dict.get("DP")).map(deref);
    let parm_at = |i: usize| -> Dict {
        let v = match &parms {
            Some(CosValue::Array(items)) => items.get(i).map(deref),
            Some(single) if i == 0 => Some(single.clone()),
            _ => None,
        };
        match v {
            Some(CosValue::Dict(d)) => d,
            _ => Dict::new(),
        }
    };
    names
        .into_iter()
        .enumerate()
        .map(|(i, name)| FilterSpec::with_params(name, parm_at(i)))
        .collect()
}

/// Decodes a stream whose payload lives in `file`.
pub fn decode_stream(
    file: &[u8],
    stream: &Stream,
    resolve: &dyn Fn(ObjectId) -> Option<CosValue>,
) -> Result<DecodedStream> {
    decode_stream_with(file, stream, resolve, DecodeLimits::default())
}

pub fn decode_stream_with(
    file: &[u8],
    stream: &Stream,
    resolve: &dyn Fn(ObjectId) -> Option<CosValue>,
    limits: DecodeLimits,
) -> Result<DecodedStream> {
    let raw = stream
        .raw
        .slice(file)
        .ok_or_else(|| Error::CorruptStream(format!("payload {} outside file", stream.raw)))?;
    decode_bytes(raw, &filter_chain(&stream.dict, resolve), limits)
}

/// Runs a filter chain over bytes that are already in memory.
pub fn decode_bytes(raw: &[u8], chain: &[FilterSpec], limits: DecodeLimits) -> Result<DecodedStream> {
    let mut data = raw.to_vec();
    for spec in chain {
        if spec.name.is_image_codec() {
            return Ok(DecodedStream {
                data,
                terminal: Some(spec.clone()),
                unknown_filter: None,
            });
        }
        if let FilterName::Other(n) = &spec.name {
            return Ok(DecodedStream {
                data,
                terminal: None,
                unknown_filter: Some(n.clone()),
            });
        }
        data = apply_filter_with(spec, &data, limits)?;
    }
    Ok(DecodedStream {
        data,
        terminal: None,
        unknown_filter: None,
    })
}
