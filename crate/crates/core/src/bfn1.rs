//! `BFN1` truth-table files.
//!
//! ```text
//! BFN1 n=<n>\n
//! <ceil(2^n / 8) bytes as uppercase hex>
//! ```
//!
//! Bit `i` of the table is bit `i mod 8` of byte `i / 8`; a set bit means
//! `f(point i) = -1`. Unused high bits of the last byte must be zero.

use crate::cube::{check_dim, TruthTable, DEFAULT_MAX_DIM};
use crate::error::{Error, Result};

const MAGIC: &str = "BFN1";

pub fn serialize(f: &TruthTable) -> String {
    format!("{MAGIC} n={}\n{}", f.n(), hex::encode_upper(f.to_bytes()))
}

pub fn parse(text: &str) -> Result<TruthTable> {
    parse_capped(text, DEFAULT_MAX_DIM)
}

pub fn parse_capped(text: &str, cap: u32) -> Result<TruthTable> {
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| Error::Parse("missing header line".into()))?;
    let header = header.trim_end_matches('\r');
    let n: u32 = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.strip_prefix(" n="))
        .ok_or_else(|| Error::Parse(format!("malformed header `{header}`")))?
        .parse()
        .map_err(|_| Error::Parse(format!("malformed dimension in `{header}`")))?;
    check_dim(n, cap).map_err(|e| Error::Parse(e.to_string()))?;

    let body = body.trim_end_matches(['\n', '\r']);
    let bytes = hex::decode(body).map_err(|e| Error::Parse(format!("bad hex payload: {e}")))?;
    let bits = 1usize << n;
    let expect = bits.div_ceil(8);
    if bytes.len() != expect {
        return Err(Error::Parse(format!("payload has {} bytes, n={n} needs {expect}", bytes.len())));
    }
    if bits < 8 && bytes[0] >> bits != 0 {
        return Err(Error::Parse("unused trailing bits are nonzero".into()));
    }

    let mut words = vec![0u64; bits.div_ceil(64)];
    for (i, b) in bytes.iter().enumerate() {
        words[i / 8] |= (*b as u64) << (8 * (i % 8));
    }
    Ok(TruthTable::from_words(n, words))
}

/// Hex payload only (used for compact witnesses).
pub fn payload_hex(f: &TruthTable) -> String {
    hex::encode_upper(f.to_bytes())
}
