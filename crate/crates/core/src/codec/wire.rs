//! Prefix codes for match lengths, literals and location deltas.
//!
//! Length / literal codes, dispatched on the first byte:
//!
//! | range                    | bytes | format                                |
//! |--------------------------|-------|---------------------------------------|
//! | literal `[0x0, 0xF]`     | 1     | `1111xxxx`                            |
//! | `[0x01, 0x7F]`           | 1     | `0xxxxxxx`                            |
//! | `[0x80, 0x3FFF]`         | 2     | `10xxxxxx xxxxxxxx`                   |
//! | `[0x4000, 0x1FFFFF]`     | 3     | `110xxxxx xxxxxxxx xxxxxxxx`          |
//! | `[0x200000, 0xFFFFFFF]`  | 4     | `1110xxxx xxxxxxxx xxxxxxxx xxxxxxxx` |
//!
//! Location deltas are sign-magnitude; the bit after the width prefix is
//! the sign:
//!
//! | magnitude               | bytes | format (`s` = sign)                   |
//! |-------------------------|-------|---------------------------------------|
//! | `[0x00, 0x3F]`          | 1     | `0sxxxxxx`                            |
//! | `[0x40, 0x1FFF]`        | 2     | `10sxxxxx xxxxxxxx`                   |
//! | `[0x2000, 0xFFFFF]`     | 3     | `110sxxxx xxxxxxxx xxxxxxxx`          |
//! | `[0x100000, 0x7FFFFFF]` | 4     | `1110sxxx xxxxxxxx xxxxxxxx xxxxxxxx` |
//!
//! Payload bits are big-endian and right-aligned. Encoders always pick the
//! shortest code; decoders reject overlong forms and negative zero so each
//! token stream has exactly one encoding.

use crate::error::{Error, Result};

pub const MAX_LENGTH: u32 = 0x0FFF_FFFF;
pub const MAX_DELTA: i64 = 0x07FF_FFFF;

/// Decoded length-position code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    Length(u32),
    Literal(u8),
}

#[inline]
fn push_be(out: &mut Vec<u8>, value: u32, width: usize, prefix: u8) {
    let bytes = value.to_be_bytes();
    let tail = &bytes[4 - width..];
    out.push(prefix | tail[0]);
    out.extend_from_slice(&tail[1..]);
}

pub fn encode_literal(value: u8, out: &mut Vec<u8>) -> Result<()> {
    if value > 0x0F {
        return Err(Error::Range {
            field: "literal",
            value: value as i64,
        });
    }
    out.push(0xF0 | value);
    Ok(())
}

pub fn encode_length(length: u32, out: &mut Vec<u8>) -> Result<()> {
    match length {
        1..=0x7F => out.push(length as u8),
        0x80..=0x3FFF => push_be(out, length, 2, 0x80),
        0x4000..=0x1F_FFFF => push_be(out, length, 3, 0xC0),
        0x20_0000..=MAX_LENGTH => push_be(out, length, 4, 0xE0),
        _ => {
            return Err(Error::Range {
                field: "match length",
                value: length as i64,
            })
        }
    }
    Ok(())
}

pub fn encode_delta(delta: i64, out: &mut Vec<u8>) -> Result<()> {
    let magnitude = delta.unsigned_abs();
    if magnitude > MAX_DELTA as u64 {
        return Err(Error::Range {
            field: "location delta",
            value: delta,
        });
    }
    let m = magnitude as u32;
    let neg = delta < 0;
    match m {
        0..=0x3F => out.push(if neg { 0x40 } else { 0 } | m as u8),
        0x40..=0x1FFF => push_be(out, m, 2, 0x80 | if neg { 0x20 } else { 0 }),
        0x2000..=0xF_FFFF => push_be(out, m, 3, 0xC0 | if neg { 0x10 } else { 0 }),
        _ => push_be(out, m, 4, 0xE0 | if neg { 0x08 } else { 0 }),
    }
    Ok(())
}

#[inline]
fn take<'a>(bytes: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8]> {
    let s = bytes
        .get(*pos..*pos + n)
        .ok_or_else(|| Error::Corrupt(format!("truncated code at byte {}", *pos)))?;
    *pos += n;
    Ok(s)
}

#[inline]
fn be_value(first: u8, rest: &[u8]) -> u32 {
    rest.iter().fold(first as u32, |acc, &b| (acc << 8) | b as u32)
}

/// Decodes one length or literal code starting at `*pos`.
#[inline]
pub fn decode_head(bytes: &[u8], pos: &mut usize) -> Result<Head> {
    let at = *pos;
    let b0 = take(bytes, pos, 1)?[0];
    let (value, min) = match b0 {
        0x00..=0x7F => (b0 as u32, 1),
        0x80..=0xBF => (be_value(b0 & 0x3F, take(bytes, pos, 1)?), 0x80),
        0xC0..=0xDF => (be_value(b0 & 0x1F, take(bytes, pos, 2)?), 0x4000),
        0xE0..=0xEF => (be_value(b0 & 0x0F, take(bytes, pos, 3)?), 0x20_0000),
        0xF0..=0xFF => return Ok(Head::Literal(b0 & 0x0F)),
    };
    if value < min {
        return Err(Error::Corrupt(format!(
            "non-canonical length {value} at byte {at}"
        )));
    }
    Ok(Head::Length(value))
}

/// Decodes one location-delta code starting at `*pos`.
#[inline]
pub fn decode_delta(bytes: &[u8], pos: &mut usize) -> Result<i64> {
    let at = *pos;
    let b0 = take(bytes, pos, 1)?[0];
    let (neg, magnitude, min) = match b0 {
        0x00..=0x7F => (b0 & 0x40 != 0, (b0 & 0x3F) as u32, 0),
        0x80..=0xBF => (b0 & 0x20 != 0, be_value(b0 & 0x1F, take(bytes, pos, 1)?), 0x40),
        0xC0..=0xDF => (b0 & 0x10 != 0, be_value(b0 & 0x0F, take(bytes, pos, 2)?), 0x2000),
        0xE0..=0xEF => (b0 & 0x08 != 0, be_value(b0 & 0x07, take(bytes, pos, 3)?), 0x10_0000),
        0xF0..=0xFF => {
            return Err(Error::Corrupt(format!(
                "invalid location prefix {b0:#04x} at byte {at}"
            )))
        }
    };
    if magnitude < min || (neg && magnitude == 0) {
        return Err(Error::Corrupt(format!(
            "non-canonical location delta at byte {at}"
        )));
    }
    Ok(if neg {
        -(magnitude as i64)
    } else {
        magnitude as i64
    })
}
