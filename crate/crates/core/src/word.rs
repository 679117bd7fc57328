//! Binary symbols, words and the `1,0^k,1` style word templates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One output symbol of the binary alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u8);

impl Symbol {
    pub const ZERO: Symbol = Symbol(0);
    pub const ONE: Symbol = Symbol(1);
    pub const ALL: [Symbol; 2] = [Symbol::ZERO, Symbol::ONE];

    pub fn new(value: u8) -> Result<Self> {
        match value {
            0 | 1 => Ok(Symbol(value)),
            _ => Err(Error::Parse(format!("symbol {value} is not in {{0, 1}}"))),
        }
    }

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite sequence of symbols. The first element is emitted first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    /// The word of length `len` whose binary digits spell `bits`, most
    /// significant digit first.
    pub fn from_index(bits: u64, len: usize) -> Self {
        let symbols = (0..len)
            .map(|pos| Symbol(((bits >> (len - 1 - pos)) & 1) as u8))
            .collect();
        Word(symbols)
    }

    /// All `2^len` words of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        assert!(len < 64, "word length {len} too large to enumerate");
        (0..1u64 << len).map(move |bits| Word::from_index(bits, len))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Symbol::ZERO),
                '1' => Ok(Symbol::ONE),
                other => Err(Error::Parse(format!(
                    "word {s:?} contains non-binary character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Repeat {
    Once,
    K,
}

/// A word family with exactly one block repeated a variable number of times,
/// written as comma separated tokens `s` or `s^k`, e.g. `1,0^k,1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordTemplate {
    pattern: Vec<(Symbol, Repeat)>,
}

impl WordTemplate {
    /// The family `1 0^k 1`.
    pub fn one_zeros_one() -> Self {
        WordTemplate {
            pattern: vec![
                (Symbol::ONE, Repeat::Once),
                (Symbol::ZERO, Repeat::K),
                (Symbol::ONE, Repeat::Once),
            ],
        }
    }

    pub fn instantiate(&self, k: usize) -> Word {
        let mut w = Word::empty();
        for &(s, rep) in &self.pattern {
            let count = match rep {
                Repeat::Once => 1,
                Repeat::K => k,
            };
            for _ in 0..count {
                w.push(s);
            }
        }
        w
    }
}

impl fmt::Display for WordTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (s, rep)) in self.pattern.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            match rep {
                Repeat::Once => write!(f, "{s}")?,
                Repeat::K => write!(f, "{s}^k")?,
            }
        }
        Ok(())
    }
}

impl FromStr for WordTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pattern = Vec::new();
        for token in s.split(',') {
            let token = token.trim();
            let (sym, rep) = match token.split_once('^') {
                None => (token, Repeat::Once),
                Some((sym, "k")) => (sym, Repeat::K),
                Some((_, exp)) => {
                    return Err(Error::Parse(format!(
                        "template token {token:?}: exponent must be the literal k, got {exp:?}"
                    )))
                }
            };
            let sym = match sym {
                "0" => Symbol::ZERO,
                "1" => Symbol::ONE,
                _ => {
                    return Err(Error::Parse(format!(
                        "template token {token:?}: symbol must be 0 or 1"
                    )))
                }
            };
            pattern.push((sym, rep));
        }
        let n_var = pattern.iter().filter(|(_, r)| *r == Repeat::K).count();
        if n_var != 1 {
            return Err(Error::Parse(format!(
                "template {s:?} must contain exactly one `^k` block, found {n_var}"
            )));
        }
        Ok(WordTemplate { pattern })
    }
}
