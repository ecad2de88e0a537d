//! Classic sliding-window LZ77, kept as a baseline.
//!
//! Unlike the fixed-dictionary codec, the window slides with the input, so
//! recovering record `k` of a concatenation means expanding every record
//! before it. [`Lz77Records::extract`] reports how many bytes it had to
//! expand to make that cost visible.

const MIN_MATCH: usize = 3;
const HASH_BITS: u32 = 16;
const MAX_CHAIN: usize = 64;
const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lz77Token {
    /// Copy `length` bytes starting `distance` bytes back; may overlap the
    /// bytes being produced.
    Copy { distance: u32, length: u32 },
    Literal(u8),
}

#[inline]
fn hash3(data: &[u8], i: usize) -> usize {
    let k = (data[i] as u32) << 16 | (data[i + 1] as u32) << 8 | data[i + 2] as u32;
    (k.wrapping_mul(0x9E37_79B1) >> (32 - HASH_BITS)) as usize
}

pub fn compress(data: &[u8], window: usize) -> Vec<Lz77Token> {
    assert!(window > 0, "window must be positive");
    let mut head = vec![NIL; 1 << HASH_BITS];
    let mut prev = vec![NIL; data.len()];
    let mut out = Vec::new();
    let mut i = 0;
    let insert = |head: &mut [u32], prev: &mut [u32], p: usize| {
        if p + MIN_MATCH <= data.len() {
            let h = hash3(data, p);
            prev[p] = head[h];
            head[h] = p as u32;
        }
    };
    while i < data.len() {
        let mut best_len = 0;
        let mut best_dist = 0;
        if i + MIN_MATCH <= data.len() {
            let mut cand = head[hash3(data, i)];
            let mut probes = 0;
            while cand != NIL && probes < MAX_CHAIN {
                let c = cand as usize;
                if i - c > window {
                    break;
                }
                let len = (0..data.len() - i)
                    .take_while(|&k| data[c + k] == data[i + k])
                    .count();
                if len > best_len {
                    best_len = len;
                    best_dist = i - c;
                }
                cand = prev[c];
                probes += 1;
            }
        }
        if best_len >= MIN_MATCH {
            out.push(Lz77Token::Copy {
                distance: best_dist as u32,
                length: best_len as u32,
            });
            for p in i..i + best_len {
                insert(&mut head, &mut prev, p);
            }
            i += best_len;
        } else {
            out.push(Lz77Token::Literal(data[i]));
            insert(&mut head, &mut prev, i);
            i += 1;
        }
    }
    out
}

/// Expands tokens into `out`; stops once `limit` bytes exist.
fn expand(tokens: &[Lz77Token], out: &mut Vec<u8>, limit: usize) {
    for tok in tokens {
        if out.len() >= limit {
            break;
        }
        match *tok {
            Lz77Token::Literal(b) => out.push(b),
            Lz77Token::Copy { distance, length } => {
                let start = out.len() - distance as usize;
                for k in 0..length as usize {
                    let b = out[start + k];
                    out.push(b);
                }
            }
        }
    }
}

pub fn decompress(tokens: &[Lz77Token]) -> Vec<u8> {
    let mut out = Vec::new();
    expand(tokens, &mut out, usize::MAX);
    out
}

/// Equal-length records compressed as one LZ77 stream.
#[derive(Debug, Clone)]
pub struct Lz77Records {
    tokens: Vec<Lz77Token>,
    record_len: usize,
    count: usize,
}

impl Lz77Records {
    pub fn new(records: &[Vec<u8>], window: usize) -> Self {
        let record_len = records.first().map_or(0, Vec::len);
        assert!(records.iter().all(|r| r.len() == record_len));
        let joined: Vec<u8> = records.concat();
        Lz77Records {
            tokens: compress(&joined, window),
            record_len,
            count: records.len(),
        }
    }

    pub fn tokens(&self) -> &[Lz77Token] {
        &self.tokens
    }

    /// Record `k` plus the number of bytes expanded to reach it.
    pub fn extract(&self, k: usize) -> (Vec<u8>, usize) {
        assert!(k < self.count);
        let end = (k + 1) * self.record_len;
        let mut out = Vec::with_capacity(end);
        expand(&self.tokens, &mut out, end);
        let expanded = out.len();
        (out[k * self.record_len..end].to_vec(), expanded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_input_collapses() {
        let data = vec![0u8; 10_000];
        let toks = compress(&data, 4096);
        assert!(toks.len() <= 3, "{} tokens", toks.len());
        assert_eq!(decompress(&toks), data);
    }

    #[test]
    fn random_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(0..3000);
            let sym = rng.gen_range(1..=16u8);
            let data: Vec<u8> = (0..n).map(|_| rng.gen_range(0..sym)).collect();
            let window = rng.gen_range(1..600);
            assert_eq!(decompress(&compress(&data, window)), data);
        }
    }

    #[test]
    fn extracting_late_record_expands_predecessors() {
        let records: Vec<Vec<u8>> = (0..8u8).map(|i| vec![i % 3; 100]).collect();
        let archive = Lz77Records::new(&records, 256);
        let (rec, expanded) = archive.extract(6);
        assert_eq!(rec, records[6]);
        assert!(expanded >= 700);
    }
}
