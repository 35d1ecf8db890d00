//! Redundancy precoding: CRC polynomial division or a random linear
//! parity-check matrix.
//!
//! CRC convention: non-reflected bit order (first bit = highest degree),
//! zero initial register, zero final XOR — plain polynomial division over
//! F2. Generators are written as hex strings, most significant bit first,
//! including the leading coefficient.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrecodeError {
    #[error("generator polynomial must have degree >= 1 with leading coefficient 1")]
    InvalidGenerator,
    #[error("generator hex string {0:?} is not valid")]
    BadHex(String),
    #[error("input length {got} does not match expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// A degree-`r` CRC generator polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrcSpec {
    /// `r + 1` coefficient bits, `coeffs[0]` = coefficient of `x^r` (always 1).
    coeffs: Vec<bool>,
}

impl CrcSpec {
    pub fn new(coeffs: Vec<bool>) -> Result<Self, PrecodeError> {
        if coeffs.len() < 2 || !coeffs[0] {
            return Err(PrecodeError::InvalidGenerator);
        }
        Ok(Self { coeffs })
    }

    /// Parse a hex coefficient string, highest-degree bit first, including
    /// the leading 1 (e.g. `"107"` for `x^8 + x^2 + x + 1`).
    pub fn from_hex(hex: &str) -> Result<Self, PrecodeError> {
        let value =
            u128::from_str_radix(hex, 16).map_err(|_| PrecodeError::BadHex(hex.to_string()))?;
        if value < 2 {
            return Err(PrecodeError::BadHex(hex.to_string()));
        }
        let bits = 128 - value.leading_zeros() as usize;
        let coeffs = (0..bits).rev().map(|i| (value >> i) & 1 == 1).collect();
        Self::new(coeffs)
    }

    /// Degree `r` of the generator.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_hex(&self) -> String {
        let mut value: u128 = 0;
        for &b in &self.coeffs {
            value = (value << 1) | u128::from(b);
        }
        format!("{value:X}")
    }
}

/// Published generator polynomials per degree, with a documented fallback of
/// `x^r + x + 1` for degrees without a table entry. Hex, leading 1 included.
const GENERATOR_TABLE: &[(usize, &str)] = &[
    (1, "3"),          // x + 1 (parity)
    (2, "7"),          // x^2 + x + 1
    (3, "B"),          // CRC-3/GSM
    (4, "13"),         // CRC-4/ITU
    (5, "25"),         // CRC-5/USB
    (6, "43"),         // CRC-6/ITU
    (7, "89"),         // CRC-7/MMC
    (8, "107"),        // CRC-8 (CCITT/ATM)
    (10, "633"),       // CRC-10/ATM
    (11, "B85"),       // CRC-11 (FlexRay)
    (12, "180F"),      // CRC-12 (telecom)
    (14, "4805"),      // CRC-14/DARC
    (15, "C599"),      // CRC-15/CAN
    (16, "11021"),     // CRC-16/CCITT
    (24, "1864CFB"),   // CRC-24 (OpenPGP)
    (32, "104C11DB7"), // CRC-32 (IEEE 802.3)
];

/// The default generator for redundancy `r` (1 <= r <= 64).
pub fn default_generator_hex(r: usize) -> String {
    if let Some((_, hex)) = GENERATOR_TABLE.iter().find(|(d, _)| *d == r) {
        return (*hex).to_string();
    }
    format!("{:X}", (1u128 << r) | 3)
}

/// Remainder of `v · x^r` divided by the generator: `r` bits, highest degree
/// first.
pub fn crc_remainder(v: &[bool], spec: &CrcSpec) -> Vec<bool> {
    let r = spec.degree();
    let mut reg = vec![false; r];
    for &bit in v {
        let top = reg[0] ^ bit;
        reg.rotate_left(1);
        reg[r - 1] = false;
        if top {
            for (cell, &coeff) in reg.iter_mut().zip(&spec.coeffs[1..]) {
                *cell ^= coeff;
            }
        }
    }
    reg
}

/// A random `r × (k+r)` parity-check matrix with an invertible parity
/// submatrix, drawn from a seed.
#[derive(Debug, Clone)]
pub struct RandomParitySpec {
    rows: Vec<Vec<bool>>,
    k: usize,
    r: usize,
    parity_columns: Vec<usize>,
    seed: u64,
    /// Inverse of the r × r submatrix on the parity columns.
    parity_inverse: Vec<Vec<bool>>,
}

/// Gauss-Jordan inverse over F2; `None` if singular.
fn invert_f2(matrix: &[Vec<bool>]) -> Option<Vec<Vec<bool>>> {
    let r = matrix.len();
    let mut work: Vec<Vec<bool>> = matrix.to_vec();
    let mut inv: Vec<Vec<bool>> = (0..r).map(|i| (0..r).map(|j| i == j).collect()).collect();
    for col in 0..r {
        let pivot = (col..r).find(|&row| work[row][col])?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        for row in 0..r {
            if row != col && work[row][col] {
                for j in 0..r {
                    work[row][j] ^= work[col][j];
                    inv[row][j] ^= inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

impl RandomParitySpec {
    /// Draw rows uniformly from the seed; redraw whenever the parity
    /// submatrix (the last `r` columns) is singular.
    pub fn draw(k: usize, r: usize, seed: u64) -> Self {
        assert!(r >= 1, "random parity precoding needs r >= 1");
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let parity_columns: Vec<usize> = (k..k + r).collect();
        loop {
            let rows: Vec<Vec<bool>> = (0..r)
                .map(|_| (0..k + r).map(|_| rng.gen()).collect())
                .collect();
            let submatrix: Vec<Vec<bool>> = rows
                .iter()
                .map(|row| parity_columns.iter().map(|&c| row[c]).collect())
                .collect();
            if let Some(parity_inverse) = invert_f2(&submatrix) {
                return Self {
                    rows,
                    k,
                    r,
                    parity_columns,
                    seed,
                    parity_inverse,
                };
            }
        }
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn parity_columns(&self) -> &[usize] {
        &self.parity_columns
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn syndrome(&self, v: &[bool]) -> Vec<bool> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(false, |acc, (&h, &b)| acc ^ (h && b))
            })
            .collect()
    }
}

/// The redundancy attachment used ahead of the polar encoder.
#[derive(Debug, Clone)]
pub enum Precode {
    /// No redundancy (r = 0); every word passes the check.
    None,
    Crc(CrcSpec),
    RandomParity(RandomParitySpec),
}

impl Precode {
    /// Redundancy length `r`.
    pub fn redundancy(&self) -> usize {
        match self {
            Precode::None => 0,
            Precode::Crc(spec) => spec.degree(),
            Precode::RandomParity(spec) => spec.r,
        }
    }

    /// Extend a `k`-bit message to `k + r` bits.
    ///
    /// CRC: append the remainder. Parity: solve `u H^T = 0` for the parity
    /// positions (unique since the parity submatrix is invertible).
    pub fn attach(&self, message: &[bool]) -> Vec<bool> {
        match self {
            Precode::None => message.to_vec(),
            Precode::Crc(spec) => {
                let mut out = message.to_vec();
                out.extend(crc_remainder(message, spec));
                out
            }
            Precode::RandomParity(spec) => {
                assert_eq!(
                    message.len(),
                    spec.k,
                    "message length must match the parity spec"
                );
                let mut word = vec![false; spec.k + spec.r];
                word[..spec.k].copy_from_slice(message);
                let s = spec.syndrome(&word);
                for (i, &col) in spec.parity_columns.iter().enumerate() {
                    let mut bit = false;
                    for (j, &sj) in s.iter().enumerate() {
                        bit ^= spec.parity_inverse[i][j] && sj;
                    }
                    word[col] = bit;
                }
                word
            }
        }
    }

    /// True iff the `k + r`-bit word carries valid redundancy.
    pub fn check(&self, word: &[bool]) -> Result<bool, PrecodeError> {
        match self {
            Precode::None => Ok(true),
            Precode::Crc(spec) => Ok(crc_remainder(word, spec).iter().all(|&b| !b)),
            Precode::RandomParity(spec) => {
                if word.len() != spec.k + spec.r {
                    return Err(PrecodeError::LengthMismatch {
                        got: word.len(),
                        expected: spec.k + spec.r,
                    });
                }
                Ok(spec.syndrome(word).iter().all(|&b| !b))
            }
        }
    }
}
