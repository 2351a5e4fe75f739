//! Freely reduced words over a rank-`m` alphabet.
//!
//! Elements of the free group are stored as reduced letter sequences, with
//! reduction enforced at construction. The ASCII surface syntax maps the
//! i-th generator to the i-th lowercase letter and its inverse to the
//! corresponding uppercase letter; the empty word is spelled `1`.

use crate::error::{Error, Result};
use num::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The generating alphabet of a free group of rank `m`, `2 <= m <= 26`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        // Rank 1 degenerates the sphere formula 2m(2m-1)^(k-1); the upper
        // limit comes from the ascii surface syntax.
        if !(2..=26).contains(&rank) {
            return Err(Error::InvalidRank(rank));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of directions `2m`, i.e. letters including inverses.
    pub fn dirs(&self) -> usize {
        2 * self.rank
    }

    /// All letters in the fixed direction order x1, x1^-1, x2, x2^-1, ...
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.dirs()).map(Letter::from_dir)
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.index() < self.rank
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        for l in w.letters() {
            if !self.contains(*l) {
                return Err(Error::LetterOutOfRange {
                    index: l.index(),
                    rank: self.rank,
                });
            }
        }
        Ok(())
    }

    /// Parse a word from the ascii surface syntax. `reduce = false` rejects
    /// unreduced input.
    pub fn parse_word(&self, s: &str, reduce: bool) -> Result<Word> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::with_capacity(s.len());
        for (pos, c) in s.chars().enumerate() {
            let l = Letter::from_char(c).ok_or_else(|| Error::Parse {
                pos,
                msg: format!("invalid character {c:?}"),
            })?;
            if !self.contains(l) {
                return Err(Error::Parse {
                    pos,
                    msg: format!("letter {c:?} out of range for rank {}", self.rank),
                });
            }
            letters.push(l);
        }
        if !reduce {
            for (i, pair) in letters.windows(2).enumerate() {
                if pair[0] == pair[1].inverse() {
                    return Err(Error::Unreduced(i));
                }
            }
        }
        Ok(Word::reduce_seq(&letters))
    }
}

/// A single letter `x_i` or `x_i^-1`, with a 0-based generator index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    index: u8,
    inv: bool,
}

impl Letter {
    pub fn new(index: usize, inv: bool) -> Self {
        debug_assert!(index < 26);
        Letter {
            index: index as u8,
            inv,
        }
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.inv
    }

    pub fn inverse(&self) -> Letter {
        Letter {
            index: self.index,
            inv: !self.inv,
        }
    }

    /// Dense direction code: `x_(i+1)` -> `2i`, `x_(i+1)^-1` -> `2i+1`.
    /// The order x1, x1^-1, x2, x2^-1, ... is the tie-breaking order used
    /// everywhere deterministic traversal matters.
    pub fn dir(&self) -> usize {
        2 * self.index as usize + self.inv as usize
    }

    pub fn from_dir(d: usize) -> Letter {
        Letter {
            index: (d / 2) as u8,
            inv: d % 2 == 1,
        }
    }

    pub fn to_char(&self) -> char {
        let base = if self.inv { b'A' } else { b'a' };
        (base + self.index) as char
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Some(Letter::new(c as usize - 'A' as usize, true)),
            _ => None,
        }
    }
}

/// A freely reduced word; the empty sequence is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word { letters: Vec::new() }
    }

    /// Free reduction of an arbitrary letter sequence (stack reduction).
    pub fn reduce_seq(seq: &[Letter]) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(seq.len());
        for &l in seq {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    pub fn from_letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    /// Wraps a letter sequence the caller guarantees to be reduced.
    pub(crate) fn from_letters_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        Word { letters }
    }

    pub fn letters(&self) -> std::slice::Iter<'_, Letter> {
        self.letters.iter()
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Freely reduced product `self * other`.
    pub fn multiply(&self, other: &Word) -> Word {
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    /// Amount of cancellation `c(u,v) = (|u| + |v| - |uv|) / 2`.
    pub fn cancellation(&self, other: &Word) -> usize {
        let prod = self.multiply(other);
        (self.len() + other.len() - prod.len()) / 2
    }

    /// Appends a letter, assuming it does not cancel. Used by enumerators
    /// that maintain reducedness themselves.
    pub fn push_unchecked(&mut self, l: Letter) {
        debug_assert!(self.letters.last() != Some(&l.inverse()));
        self.letters.push(l);
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word {
            letters: self.letters[..len].to_vec(),
        }
    }

    /// `u ∘ v`: concatenation that must be cancellation-free.
    pub fn concat_no_cancel(&self, other: &Word) -> Option<Word> {
        if self.cancellation(other) != 0 {
            return None;
        }
        Some(self.multiply(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for c in s.chars() {
            let l = Letter::from_char(c)
                .ok_or_else(|| serde::de::Error::custom(format!("bad letter {c:?}")))?;
            letters.push(l);
        }
        Ok(Word::reduce_seq(&letters))
    }
}

/// `|S_k|`: 1 for k = 0, else `2m (2m-1)^(k-1)`.
pub fn sphere_size(k: usize, alphabet: &Alphabet) -> BigInt {
    if k == 0 {
        return BigInt::from(1);
    }
    let m = alphabet.rank();
    BigInt::from(2 * m) * BigInt::from(2 * m - 1).pow(k as u32 - 1)
}

/// Streams every reduced word of length exactly `k`, each once, in
/// lexicographic direction order.
pub fn enumerate_sphere(k: usize, alphabet: Alphabet) -> SphereIter {
    SphereIter {
        alphabet,
        target: k,
        stack: vec![0],
        word: Word::empty(),
        done: false,
    }
}

/// Depth-first enumerator over the tree of reduced words.
pub struct SphereIter {
    alphabet: Alphabet,
    target: usize,
    /// Next direction to try at each depth.
    stack: Vec<usize>,
    word: Word,
    done: bool,
}

impl Iterator for SphereIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if self.target == 0 {
            self.done = true;
            return Some(Word::empty());
        }
        let dirs = self.alphabet.dirs();
        loop {
            let depth = self.stack.len() - 1;
            let d = *self.stack.last().unwrap();
            if d >= dirs {
                // backtrack
                self.stack.pop();
                if self.stack.is_empty() {
                    self.done = true;
                    return None;
                }
                self.word.letters.pop();
                *self.stack.last_mut().unwrap() += 1;
                continue;
            }
            let l = Letter::from_dir(d);
            if self.word.last() == Some(l.inverse()) {
                *self.stack.last_mut().unwrap() += 1;
                continue;
            }
            if depth + 1 == self.target {
                let mut out = self.word.clone();
                out.push_unchecked(l);
                *self.stack.last_mut().unwrap() += 1;
                return Some(out);
            }
            self.word.push_unchecked(l);
            self.stack.push(0);
        }
    }
}
