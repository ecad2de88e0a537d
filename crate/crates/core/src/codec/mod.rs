//! Fixed-dictionary LZ parsing of last-move tables and its byte encoding.
//!
//! An SPT is parsed greedily against a dictionary SPT of the same length:
//! each step takes the longest dictionary substring matching the remaining
//! input, or a single literal when the next symbol never occurs in the
//! dictionary. On the wire each token is a length code followed by a
//! location-delta code, or a single literal byte; see [`wire`].

pub mod lz77;
pub mod matcher;
pub mod wire;

pub use matcher::DictIndex;

use crate::error::{Error, Result};
use matcher::check_alphabet;
use wire::Head;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    Match { location: u32, length: u32 },
    Literal(u8),
}

impl Token {
    pub fn expanded_len(&self) -> usize {
        match *self {
            Token::Match { length, .. } => length as usize,
            Token::Literal(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub expanded_length: usize,
}

impl TokenStream {
    pub fn new(tokens: Vec<Token>) -> Self {
        let expanded_length = tokens.iter().map(Token::expanded_len).sum();
        TokenStream {
            tokens,
            expanded_length,
        }
    }
}

impl DictIndex {
    /// Greedy parse of `spt` against the indexed dictionary.
    pub fn compress(&self, spt: &[u8]) -> Result<TokenStream> {
        if spt.len() != self.dict_len() {
            return Err(Error::LengthMismatch {
                expected: self.dict_len(),
                actual: spt.len(),
            });
        }
        check_alphabet(spt)?;
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < spt.len() {
            match self.longest_match(&spt[i..]) {
                Some((location, length)) => {
                    tokens.push(Token::Match { location, length });
                    i += length as usize;
                }
                None => {
                    tokens.push(Token::Literal(spt[i]));
                    i += 1;
                }
            }
        }
        Ok(TokenStream {
            tokens,
            expanded_length: spt.len(),
        })
    }

    /// [`DictIndex::compress`] followed by [`encode_stream`], appending to `out`.
    pub fn compress_encoded(&self, spt: &[u8], out: &mut Vec<u8>) -> Result<()> {
        let stream = self.compress(spt)?;
        encode_into(&stream.tokens, out)
    }
}

pub fn compress_spt(spt: &[u8], dict: &[u8]) -> Result<TokenStream> {
    if spt.len() != dict.len() {
        return Err(Error::LengthMismatch {
            expected: dict.len(),
            actual: spt.len(),
        });
    }
    DictIndex::new(dict)?.compress(spt)
}

pub fn decompress_spt(stream: &TokenStream, dict: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(stream.expanded_length);
    for (i, tok) in stream.tokens.iter().enumerate() {
        match *tok {
            Token::Match { location, length } => {
                let (start, end) = (location as usize, location as usize + length as usize);
                let slice = dict.get(start..end).ok_or_else(|| {
                    Error::Corrupt(format!(
                        "token {i}: match {start}..{end} outside dictionary of {}",
                        dict.len()
                    ))
                })?;
                out.extend_from_slice(slice);
            }
            Token::Literal(v) => out.push(v),
        }
    }
    if out.len() != stream.expanded_length {
        return Err(Error::LengthMismatch {
            expected: stream.expanded_length,
            actual: out.len(),
        });
    }
    Ok(out)
}

pub fn encode_into(tokens: &[Token], out: &mut Vec<u8>) -> Result<()> {
    let mut prev = 0i64;
    for tok in tokens {
        match *tok {
            Token::Match { location, length } => {
                wire::encode_length(length, out)?;
                wire::encode_delta(location as i64 - prev, out)?;
                prev = location as i64;
            }
            Token::Literal(v) => wire::encode_literal(v, out)?,
        }
    }
    Ok(())
}

pub fn encode_stream(stream: &TokenStream) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(stream.tokens.len() * 2);
    encode_into(&stream.tokens, &mut out)?;
    Ok(out)
}

#[inline]
fn next_location(prev: &mut i64, delta: i64, at: usize) -> Result<u32> {
    let loc = *prev + delta;
    if !(0..=u32::MAX as i64).contains(&loc) {
        return Err(Error::Corrupt(format!("negative location at byte {at}")));
    }
    *prev = loc;
    Ok(loc as u32)
}

pub fn decode_stream(bytes: &[u8]) -> Result<TokenStream> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    let mut prev = 0i64;
    while pos < bytes.len() {
        let at = pos;
        match wire::decode_head(bytes, &mut pos)? {
            Head::Literal(v) => tokens.push(Token::Literal(v)),
            Head::Length(length) => {
                let delta = wire::decode_delta(bytes, &mut pos)?;
                let location = next_location(&mut prev, delta, at)?;
                tokens.push(Token::Match { location, length });
            }
        }
    }
    Ok(TokenStream::new(tokens))
}

/// Decodes `bytes` and expands it against `dict` straight into `out`
/// without materializing tokens. `out` must have exactly the expanded
/// length.
#[inline]
pub fn expand_into(bytes: &[u8], dict: &[u8], out: &mut [u8]) -> Result<()> {
    let mut pos = 0;
    let mut prev = 0i64;
    let mut written = 0usize;
    while pos < bytes.len() {
        let at = pos;
        match wire::decode_head(bytes, &mut pos)? {
            Head::Literal(v) => {
                let slot = out
                    .get_mut(written)
                    .ok_or_else(|| Error::Corrupt(format!("output overrun at byte {at}")))?;
                *slot = v;
                written += 1;
            }
            Head::Length(length) => {
                let delta = wire::decode_delta(bytes, &mut pos)?;
                let start = next_location(&mut prev, delta, at)? as usize;
                let len = length as usize;
                let src = dict.get(start..start + len).ok_or_else(|| {
                    Error::Corrupt(format!("match outside dictionary at byte {at}"))
                })?;
                let dst = out
                    .get_mut(written..written + len)
                    .ok_or_else(|| Error::Corrupt(format!("output overrun at byte {at}")))?;
                dst.copy_from_slice(src);
                written += len;
            }
        }
    }
    if written != out.len() {
        return Err(Error::Corrupt(format!(
            "record expands to {written} entries, expected {}",
            out.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Token::{Literal as L, Match as M};

    fn m(location: u32, length: u32) -> Token {
        M { location, length }
    }

    #[test]
    fn worked_example_rows() {
        let dict = [0u8; 6];
        let cases: [(&[u8], Vec<Token>); 5] = [
            (&[0, 0, 0, 0, 0, 0], vec![m(0, 6)]),
            (&[0, 0, 1, 0, 0, 0], vec![m(0, 2), L(1), m(0, 3)]),
            (&[0, 0, 2, 0, 0, 0], vec![m(0, 2), L(2), m(0, 3)]),
            (&[0, 0, 3, 0, 0, 1], vec![m(0, 2), L(3), m(0, 2), L(1)]),
            (&[0, 0, 2, 1, 1, 0], vec![m(0, 2), L(2), L(1), L(1), m(0, 1)]),
        ];
        for (spt, want) in cases {
            let got = compress_spt(spt, &dict).unwrap();
            assert_eq!(got.tokens, want);
            assert_eq!(got.expanded_length, 6);
            assert_eq!(decompress_spt(&got, &dict).unwrap(), spt);
        }
    }

    #[test]
    fn hand_traced_parse() {
        let s = compress_spt(&[3, 1, 2], &[1, 2, 3]).unwrap();
        assert_eq!(s.tokens, vec![m(2, 1), m(0, 2)]);
        assert_eq!(decompress_spt(&s, &[1, 2, 3]).unwrap(), vec![3, 1, 2]);
    }

    #[test]
    fn literal_only_stream() {
        let s = TokenStream::new(vec![L(7)]);
        assert_eq!(decompress_spt(&s, &[]).unwrap(), vec![7]);
        assert_eq!(encode_stream(&TokenStream::new(vec![L(0x0F)])).unwrap(), vec![0xFF]);
    }

    #[test]
    fn alphabet_and_length_checks() {
        assert!(matches!(
            compress_spt(&[0, 16], &[0, 0]),
            Err(Error::Alphabet { position: 1, .. })
        ));
        assert!(matches!(
            compress_spt(&[0], &[0, 0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn out_of_bounds_match_is_corruption() {
        let s = TokenStream::new(vec![m(4, 3)]);
        assert!(matches!(decompress_spt(&s, &[0; 6]), Err(Error::Corrupt(_))));
        let bytes = encode_stream(&s).unwrap();
        let mut out = [0u8; 3];
        assert!(expand_into(&bytes, &[0; 6], &mut out).is_err());
    }

    #[test]
    fn deltas_skip_literals() {
        let s = TokenStream::new(vec![m(5, 1), L(3), m(2, 1), m(70, 2)]);
        let bytes = encode_stream(&s).unwrap();
        // 5, then literal, then -3, then +68 (two-byte code)
        assert_eq!(bytes, vec![0x01, 0x05, 0xF3, 0x01, 0x43, 0x02, 0x80, 0x44]);
        assert_eq!(decode_stream(&bytes).unwrap(), s);
    }

    #[test]
    fn empty_and_truncated_streams() {
        assert_eq!(decode_stream(&[]).unwrap(), TokenStream::default());
        assert!(decode_stream(&[0x02]).is_err());
        assert!(decode_stream(&[0x80]).is_err());
        assert!(decode_stream(&[0x02, 0xF0]).is_err());
        // a leading negative delta would point before the dictionary
        assert!(decode_stream(&[0x01, 0x41]).is_err());
    }

    #[test]
    fn expand_matches_decode_then_decompress() {
        let dict = [0, 1, 2, 3, 0, 1, 2, 3];
        let spt = [2, 3, 0, 1, 1, 5, 3, 0];
        let s = compress_spt(&spt, &dict).unwrap();
        let bytes = encode_stream(&s).unwrap();
        let mut out = [0u8; 8];
        expand_into(&bytes, &dict, &mut out).unwrap();
        assert_eq!(out, spt);
        let mut short = [0u8; 7];
        assert!(expand_into(&bytes, &dict, &mut short).is_err());
    }
}
