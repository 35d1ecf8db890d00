//! The ternary channel alphabet {0, 1, e}.

use std::fmt;

/// One symbol of the erasure alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    Erasure,
}

impl Symbol {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    /// The hard value, or `None` for an erasure.
    pub fn bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Erasure => None,
        }
    }

    pub fn is_erasure(self) -> bool {
        self == Symbol::Erasure
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Erasure => 'e',
        };
        write!(f, "{c}")
    }
}

/// Number of erasure symbols in a vector (the quantity written α).
pub fn erasure_count(symbols: &[Symbol]) -> usize {
    symbols.iter().filter(|s| s.is_erasure()).count()
}

/// Lift a bit vector into the ternary alphabet.
pub fn from_bits(bits: &[bool]) -> Vec<Symbol> {
    bits.iter().map(|&b| Symbol::from_bit(b)).collect()
}

/// Parse a string of `0`, `1` and `e` characters. Handy for fixtures.
pub fn parse_symbols(s: &str) -> Option<Vec<Symbol>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            'e' => Some(Symbol::Erasure),
            _ => None,
        })
        .collect()
}
