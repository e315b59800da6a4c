//! Freely reduced words over a finite free-group alphabet.
//!
//! A [`Letter`] is a generator index together with a sign. Letters order as
//! `x < X < y < Y < ...`, and [`Word`] orders ShortLex (length first, then
//! lexicographically by letter). ShortLex is the canonical order used for every
//! tie-break in the crate.
//!
//! The ASCII format writes generator `i` as the `i`-th lowercase letter and its
//! inverse as the matching uppercase letter; `"1"` and `""` are the identity.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 26;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u16);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        debug_assert!(generator < MAX_RANK);
        Letter((generator as u16) << 1 | inverse as u16)
    }

    pub fn from_code(code: usize) -> Self {
        Letter(code as u16)
    }

    /// Index into `0..2 * rank`; the order of codes is the alphabet order.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        if c.is_ascii_lowercase() {
            Some(Letter::new((c as u8 - b'a') as usize, false))
        } else if c.is_ascii_uppercase() {
            Some(Letter::new((c as u8 - b'A') as usize, true))
        } else {
            None
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Ordered list of generator names. The order fixes ShortLex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Names must be distinct single lowercase ASCII letters so that the ASCII
    /// word format stays unambiguous; generator `i` is the `i`-th name.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() || names.len() > MAX_RANK {
            return Err(Error::MalformedInput(format!(
                "alphabet size {} outside 1..={MAX_RANK}",
                names.len()
            )));
        }
        let mut out = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().trim();
            let expected = ((b'a' + i as u8) as char).to_string();
            if n != expected {
                return Err(Error::MalformedInput(format!(
                    "generator {i} must be named {expected:?}, got {n:?}"
                )));
            }
            out.push(n.to_string());
        }
        Ok(Alphabet { names: out })
    }

    pub fn standard(rank: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&rank));
        Alphabet {
            names: (0..rank)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parse(&self, s: &str) -> Result<Word> {
        let w: Word = s.parse()?;
        self.check(&w)?;
        Ok(w)
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(g) if g >= self.rank() => Err(Error::AlphabetMismatch(format!(
                "word {w} uses generator {g} outside rank {}",
                self.rank()
            ))),
            _ => Ok(()),
        }
    }

    /// Reduce a raw sequence of `(generator index, ±1)` pairs.
    pub fn free_reduce(&self, raw: &[(usize, i8)]) -> Result<Word> {
        let mut letters = Vec::with_capacity(raw.len());
        for &(g, s) in raw {
            if g >= self.rank() {
                return Err(Error::MalformedInput(format!(
                    "unknown generator index {g} (rank {})",
                    self.rank()
                )));
            }
            let inv = match s {
                1 => false,
                -1 => true,
                _ => return Err(Error::MalformedInput(format!("sign {s} not ±1"))),
            };
            letters.push(Letter::new(g, inv));
        }
        Ok(Word::from_letters(letters))
    }

    pub fn concat(&self, u: &Word, v: &Word) -> Result<Word> {
        self.check(u)?;
        self.check(v)?;
        Ok(u * v)
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn generator(g: usize) -> Self {
        Word(vec![Letter::new(g, false)])
    }

    /// Stack-based free reduction.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Wraps letters that the caller guarantees are already reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut k = 0;
        let n = self.0.len();
        while k < n.min(other.0.len()) && self.0[n - 1 - k] == other.0[k].inverse() {
            k += 1;
        }
        let mut out = Vec::with_capacity(n - k + other.0.len() - k);
        out.extend_from_slice(&self.0[..n - k]);
        out.extend_from_slice(&other.0[k..]);
        Word(out)
    }

    /// Right multiplication by a single letter.
    pub fn push(&self, l: Letter) -> Word {
        let mut out = self.0.clone();
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
        Word(out)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        &(g * self) * &g.inverse()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(f), Some(l)) => self.0.len() == 1 || *f != l.inverse(),
            _ => true,
        }
    }

    /// Returns `(core, conjugator)` with `self = conjugator · core · conjugator⁻¹`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        (
            Word(self.0[k..n - k].to_vec()),
            Word(self.0[..k].to_vec()),
        )
    }

    /// Maximal root: `self = r^k` with `r` not a proper power.
    pub fn root(&self) -> Result<(Word, u32)> {
        if self.is_identity() {
            return Err(Error::EmptyInput("root of the identity"));
        }
        let (core, conj) = self.cyclic_reduce();
        let n = core.len();
        // smallest period dividing n gives the largest exponent
        for p in 1..=n {
            if n % p != 0 {
                continue;
            }
            if (p..n).all(|i| core.0[i] == core.0[i - p]) {
                let r = Word(core.0[..p].to_vec()).conjugate_by(&conj);
                return Ok((r, (n / p) as u32));
            }
        }
        unreachable!("the full length is always a period")
    }

    /// All cyclic rotations of a cyclically reduced word.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.0.len();
        (0..n.max(1))
            .map(|i| {
                let mut v = self.0[i.min(n)..].to_vec();
                v.extend_from_slice(&self.0[..i.min(n)]);
                Word(v)
            })
            .collect()
    }

    /// Every reduced word of length `<= radius`, in ShortLex order.
    pub fn ball(rank: usize, radius: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut frontier = vec![Word::identity()];
        for _ in 0..radius {
            let mut next = Vec::with_capacity(frontier.len() * (2 * rank).saturating_sub(1));
            for w in &frontier {
                for code in 0..2 * rank {
                    let l = Letter::from_code(code);
                    if w.last() == Some(l.inverse()) {
                        continue;
                    }
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    pub fn to_ascii(&self) -> String {
        self.to_string()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Mul<&Word> for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        Word::mul(self, rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            letters.push(
                Letter::from_char(c)
                    .ok_or_else(|| Error::MalformedInput(format!("bad letter {c:?} in {s:?}")))?,
            );
        }
        Ok(Word::from_letters(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a word, panicking on malformed input. For tests and literals.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}
