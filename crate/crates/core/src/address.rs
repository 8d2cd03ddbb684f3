//! Finite address prefixes over the alphabet `{1, …, N}`.
//!
//! A prefix stands for the infinite address obtained by padding it with the
//! all-ones tail `1̄`, so the empty prefix denotes `1̄` itself. Addresses are
//! ordered by the tops ordering: at the first index where two addresses
//! differ, the one with the smaller symbol is the larger address. Under this
//! order `1̄` is the maximum.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Default truncation depth for accumulated and concatenated addresses.
pub const DEFAULT_MAX_DEPTH: usize = 48;

/// The symbol used to pad finite prefixes.
pub const PAD_SYMBOL: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u8);

impl Symbol {
    pub fn new(value: u8) -> Option<Symbol> {
        (value >= 1).then_some(Symbol(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AddressPrefix {
    symbols: Vec<u8>,
}

/// Result of a bounded concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concat {
    pub prefix: AddressPrefix,
    pub truncated: bool,
}

impl AddressPrefix {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a prefix from raw symbols; panics on a zero symbol.
    pub fn from_symbols(symbols: impl Into<Vec<u8>>) -> Self {
        let symbols = symbols.into();
        assert!(symbols.iter().all(|&s| s >= 1), "symbols are 1-based");
        Self { symbols }
    }

    pub fn repeat(symbol: u8, count: usize) -> Self {
        Self::from_symbols(vec![symbol; count])
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbol at a 0-based index of the padded address.
    pub fn padded(&self, index: usize) -> u8 {
        self.symbols.get(index).copied().unwrap_or(PAD_SYMBOL)
    }

    pub fn max_symbol(&self) -> u8 {
        self.symbols.iter().copied().max().unwrap_or(PAD_SYMBOL)
    }

    pub fn push(&mut self, symbol: u8) {
        assert!(symbol >= 1, "symbols are 1-based");
        self.symbols.push(symbol);
    }

    pub fn tops_cmp(&self, other: &AddressPrefix) -> Ordering {
        tops_compare(self, other)
    }

    /// Drops the first symbol; the empty prefix is fixed.
    pub fn shift(&self) -> AddressPrefix {
        AddressPrefix {
            symbols: self.symbols.iter().skip(1).copied().collect(),
        }
    }

    pub fn truncate(&mut self, len: usize) {
        self.symbols.truncate(len);
    }

    pub fn concat(&self, tail: &AddressPrefix) -> AddressPrefix {
        concat_bounded(self, tail, DEFAULT_MAX_DEPTH).prefix
    }
}

/// Compares the `1̄`-padded infinite addresses under the tops ordering.
pub fn tops_compare(p: &AddressPrefix, q: &AddressPrefix) -> Ordering {
    let n = p.len().max(q.len());
    for i in 0..n {
        let (a, b) = (p.padded(i), q.padded(i));
        if a != b {
            return b.cmp(&a);
        }
    }
    Ordering::Equal
}

/// `2^-k` for the least (1-based) index `k` where the padded addresses differ.
pub fn code_metric(p: &AddressPrefix, q: &AddressPrefix) -> f64 {
    let n = p.len().max(q.len());
    (0..n)
        .find(|&i| p.padded(i) != q.padded(i))
        .map_or(0.0, |i| 0.5f64.powi(i as i32 + 1))
}

pub fn shift(p: &AddressPrefix) -> AddressPrefix {
    p.shift()
}

/// Concatenates, truncating to `max_depth` symbols.
pub fn concat_bounded(head: &AddressPrefix, tail: &AddressPrefix, max_depth: usize) -> Concat {
    let mut symbols = Vec::with_capacity(head.len() + tail.len());
    symbols.extend_from_slice(&head.symbols);
    symbols.extend_from_slice(&tail.symbols);
    let truncated = symbols.len() > max_depth;
    symbols.truncate(max_depth);
    Concat {
        prefix: AddressPrefix { symbols },
        truncated,
    }
}

impl fmt::Display for AddressPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.iter().all(|&s| s <= 9) {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
        } else {
            for (i, s) in self.symbols.iter().enumerate() {
                if i > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for AddressPrefix {
    type Err = Error;

    /// Digits `1`–`9` run together (`"3122"`), or dot-separated symbols for
    /// larger alphabets (`"12.3.40"`). The empty string is `1̄`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid address '{s}'"));
        let symbols = if s.contains('.') {
            s.split('.')
                .map(|t| t.parse::<u8>().ok().filter(|&v| v >= 1).ok_or_else(bad))
                .collect::<Result<Vec<u8>, Error>>()?
        } else {
            s.chars()
                .map(|c| match c {
                    '1'..='9' => Ok(c as u8 - b'0'),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<u8>, Error>>()?
        };
        Ok(AddressPrefix { symbols })
    }
}

/// Reverse address `σ_k σ_{k-1} … σ_1 1̄` built one symbol at a time,
/// keeping only the `depth` most recent symbols.
///
/// The buffer always holds exactly `depth` symbols, padded with `1`, so two
/// accumulators of equal depth compare with a single slice comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseAccumulator {
    buf: Vec<u8>,
    filled: usize,
}

impl ReverseAccumulator {
    pub fn new(depth: usize) -> Self {
        assert!(depth >= 1, "accumulator depth must be positive");
        Self {
            buf: vec![PAD_SYMBOL; depth],
            filled: 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.buf.len()
    }

    /// Number of real (non-padding) symbols held.
    pub fn filled(&self) -> usize {
        self.filled
    }

    #[inline]
    pub fn push(&mut self, symbol: u8) {
        debug_assert!(symbol >= 1);
        let d = self.buf.len();
        self.buf.copy_within(0..d - 1, 1);
        self.buf[0] = symbol;
        self.filled = (self.filled + 1).min(d);
    }

    /// The padded reading, most recent symbol first.
    pub fn padded(&self) -> &[u8] {
        &self.buf
    }

    pub fn reading(&self) -> AddressPrefix {
        AddressPrefix::from_symbols(&self.buf[..self.filled])
    }
}

/// Tops comparison of two equal-length, already padded symbol slices.
#[inline]
pub fn tops_compare_padded(p: &[u8], q: &[u8]) -> Ordering {
    q.cmp(p)
}
