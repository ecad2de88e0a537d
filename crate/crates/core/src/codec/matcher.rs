//! Longest-match index over a fixed dictionary.
//!
//! A suffix automaton over the 16-symbol alphabet. Walking it from the
//! initial state along the input yields the longest prefix of the input that
//! occurs anywhere in the dictionary, in time proportional to the match
//! length, and each state remembers the end of its first occurrence, which
//! gives the smallest matching location.

use crate::error::{Error, Result};

pub const ALPHABET: usize = 16;
const NONE: u32 = u32::MAX;

/// Longest supported dictionary (lengths must fit the 28-bit length code).
pub const MAX_DICT_LEN: usize = 0x0FFF_FFFF;

#[derive(Debug, Clone)]
pub struct DictIndex {
    next: Vec<u32>,
    link: Vec<u32>,
    len: Vec<u32>,
    first_end: Vec<u32>,
    dict_len: usize,
}

pub(crate) fn check_alphabet(data: &[u8]) -> Result<()> {
    match data.iter().position(|&b| b as usize >= ALPHABET) {
        Some(position) => Err(Error::Alphabet {
            position,
            value: data[position],
        }),
        None => Ok(()),
    }
}

impl DictIndex {
    pub fn new(dict: &[u8]) -> Result<Self> {
        check_alphabet(dict)?;
        if dict.len() > MAX_DICT_LEN {
            return Err(Error::Range {
                field: "dictionary length",
                value: dict.len() as i64,
            });
        }
        let cap = 2 * dict.len() + 1;
        let mut idx = DictIndex {
            next: Vec::with_capacity(cap * ALPHABET),
            link: Vec::with_capacity(cap),
            len: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
            dict_len: dict.len(),
        };
        idx.push_state(0, NONE, 0);
        let mut last = 0u32;
        for (i, &c) in dict.iter().enumerate() {
            let c = c as usize;
            let cur = idx.push_state(idx.len[last as usize] + 1, NONE, i as u32);
            let mut p = last;
            while p != NONE && idx.next[p as usize * ALPHABET + c] == NONE {
                idx.next[p as usize * ALPHABET + c] = cur;
                p = idx.link[p as usize];
            }
            if p == NONE {
                idx.link[cur as usize] = 0;
            } else {
                let q = idx.next[p as usize * ALPHABET + c];
                if idx.len[p as usize] + 1 == idx.len[q as usize] {
                    idx.link[cur as usize] = q;
                } else {
                    let clone = idx.push_state(
                        idx.len[p as usize] + 1,
                        idx.link[q as usize],
                        idx.first_end[q as usize],
                    );
                    let (qs, cs) = (q as usize * ALPHABET, clone as usize * ALPHABET);
                    idx.next.copy_within(qs..qs + ALPHABET, cs);
                    while p != NONE && idx.next[p as usize * ALPHABET + c] == q {
                        idx.next[p as usize * ALPHABET + c] = clone;
                        p = idx.link[p as usize];
                    }
                    idx.link[q as usize] = clone;
                    idx.link[cur as usize] = clone;
                }
            }
            last = cur;
        }
        Ok(idx)
    }

    fn push_state(&mut self, len: u32, link: u32, first_end: u32) -> u32 {
        let id = self.len.len() as u32;
        self.next.extend_from_slice(&[NONE; ALPHABET]);
        self.link.push(link);
        self.len.push(len);
        self.first_end.push(first_end);
        id
    }

    pub fn dict_len(&self) -> usize {
        self.dict_len
    }

    /// `(location, length)` of the longest dictionary substring equal to a
    /// prefix of `data`, smallest location on ties; `None` if even the first
    /// symbol does not occur. Symbols outside the alphabet end the match.
    #[inline]
    pub fn longest_match(&self, data: &[u8]) -> Option<(u32, u32)> {
        let mut state = 0usize;
        let mut matched = 0u32;
        for &c in data {
            if c as usize >= ALPHABET {
                break;
            }
            let t = self.next[state * ALPHABET + c as usize];
            if t == NONE {
                break;
            }
            state = t as usize;
            matched += 1;
        }
        (matched > 0).then(|| (self.first_end[state] + 1 - matched, matched))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(dict: &[u8], data: &[u8]) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32)> = None;
        for loc in 0..dict.len() {
            let l = dict[loc..]
                .iter()
                .zip(data)
                .take_while(|(a, b)| a == b)
                .count() as u32;
            if l > 0 && best.is_none_or(|(_, bl)| l > bl) {
                best = Some((loc as u32, l));
            }
        }
        best
    }

    #[test]
    fn finds_first_longest_occurrence() {
        let dict = [1, 2, 3, 1, 2, 3, 4];
        let idx = DictIndex::new(&dict).unwrap();
        assert_eq!(idx.longest_match(&[1, 2, 3, 4]), Some((3, 4)));
        assert_eq!(idx.longest_match(&[2, 3, 1]), Some((1, 3)));
        assert_eq!(idx.longest_match(&[3]), Some((2, 1)));
        assert_eq!(idx.longest_match(&[5]), None);
        assert_eq!(idx.longest_match(&[]), None);
    }

    #[test]
    fn empty_dictionary_matches_nothing() {
        let idx = DictIndex::new(&[]).unwrap();
        assert_eq!(idx.longest_match(&[0]), None);
    }

    #[test]
    fn rejects_out_of_alphabet_dictionary() {
        assert!(matches!(
            DictIndex::new(&[0, 16]),
            Err(Error::Alphabet { position: 1, value: 16 })
        ));
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let sym = rng.gen_range(1..=16u8);
            let n = rng.gen_range(0..200);
            let dict: Vec<u8> = (0..n).map(|_| rng.gen_range(0..sym)).collect();
            let data: Vec<u8> = (0..rng.gen_range(0..40)).map(|_| rng.gen_range(0..sym)).collect();
            let idx = DictIndex::new(&dict).unwrap();
            assert_eq!(idx.longest_match(&data), brute(&dict, &data), "{dict:?} {data:?}");
        }
    }
}
