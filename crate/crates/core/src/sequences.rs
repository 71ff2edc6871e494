//! Deterministic physical-layer sequences: Zadoff-Chu synchronization
//! sequences, length-31 Gold scrambling sequences and the QPSK reference
//! signals derived from them.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::CellConfig;

/// Root indices of the three PSS sequences, one per `cell_id mod 3`.
pub const PSS_ROOTS: [u32; 3] = [25, 29, 34];

/// PSS sequence length.
pub const PSS_LEN: usize = 63;

/// Steps discarded from the Gold generator before bits are emitted.
const GOLD_FAST_FORWARD: usize = 1600;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("zadoff-chu length {0} must be odd and at least 3")]
    InvalidLength(usize),
    #[error("zadoff-chu root {q} invalid for length {n}: need 0 < q < n with gcd(q, n) = 1")]
    InvalidRoot { q: u32, n: usize },
    #[error("PSS selector {0} outside 0..=2")]
    PssSelector(usize),
    #[error("(slot {slot}, symbol {symbol}) is not an RS-bearing position")]
    NotRsPosition { slot: usize, symbol: usize },
}

/// A constant-amplitude zero-autocorrelation sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ZcSequence {
    pub root: u32,
    pub samples: Vec<Complex64>,
}

impl ZcSequence {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Cyclic autocorrelation (or cross-correlation against `other`) at
    /// integer lag, `sum_k x[k] * conj(y[(k + lag) mod n])`.
    pub fn cyclic_correlation(&self, other: &ZcSequence, lag: usize) -> Complex64 {
        let n = self.len();
        assert_eq!(n, other.len());
        (0..n)
            .map(|k| self.samples[k] * other.samples[(k + lag) % n].conj())
            .sum()
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Evaluates `x_q[k] = exp(-j pi q k (k+1) / n)` for `k = 0..n`.
pub fn zadoff_chu(q: u32, n: usize) -> Result<ZcSequence, SequenceError> {
    if n < 3 || n % 2 == 0 {
        return Err(SequenceError::InvalidLength(n));
    }
    if q == 0 || q as usize >= n || gcd(q as usize, n) != 1 {
        return Err(SequenceError::InvalidRoot { q, n });
    }
    let samples = (0..n)
        .map(|k| {
            // k(k+1) is always even, so work modulo 2n to keep the phase
            // argument small for long sequences.
            let kk = (k * (k + 1)) % (2 * n);
            let phase = -std::f64::consts::PI * (q as usize * kk % (2 * n)) as f64 / n as f64;
            Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(ZcSequence { root: q, samples })
}

/// The length-63 PSS sequence for `n_id_2 = cell_id mod 3`.
pub fn pss_sequence(n_id_2: usize) -> Result<ZcSequence, SequenceError> {
    let root = *PSS_ROOTS
        .get(n_id_2)
        .ok_or(SequenceError::PssSelector(n_id_2))?;
    zadoff_chu(root, PSS_LEN)
}

/// A scrambling sequence from two 31-stage linear feedback registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldSequence {
    pub init: u32,
    pub bits: Vec<u8>,
}

/// Generates `length` bits of the Gold sequence seeded by `init`.
///
/// The first register always starts from state 1, the second from
/// `init` (31 significant bits), and both run 1600 steps before the
/// first emitted bit.
pub fn gold_sequence(init: u32, length: usize) -> GoldSequence {
    let mask = (1u32 << 31) - 1;
    let mut x1: u32 = 1;
    let mut x2: u32 = init & mask;

    let mut step = |x1: &mut u32, x2: &mut u32| -> u8 {
        let out = ((*x1 ^ *x2) & 1) as u8;
        let f1 = ((*x1 >> 3) ^ *x1) & 1;
        let f2 = ((*x2 >> 3) ^ (*x2 >> 2) ^ (*x2 >> 1) ^ *x2) & 1;
        *x1 = (*x1 >> 1) | (f1 << 30);
        *x2 = (*x2 >> 1) | (f2 << 30);
        out
    };

    for _ in 0..GOLD_FAST_FORWARD {
        step(&mut x1, &mut x2);
    }
    let bits = (0..length).map(|_| step(&mut x1, &mut x2)).collect();
    GoldSequence { init, bits }
}

/// Gold-sequence initialization for the RS at a given position.
pub fn rs_init(cell_id: u16, slot: usize, symbol: usize) -> u32 {
    ((slot * 7 + symbol) * 512 + usize::from(cell_id)) as u32
}

/// QPSK reference-signal symbols for one RS-bearing position, one per
/// RS resource element in frequency order.
pub fn rs_symbols(
    cell_id: u16,
    slot: usize,
    symbol: usize,
    n_rb: usize,
) -> Result<Vec<Complex64>, SequenceError> {
    if symbol != 0 && symbol != 4 {
        return Err(SequenceError::NotRsPosition { slot, symbol });
    }
    let count = 2 * n_rb;
    let gold = gold_sequence(rs_init(cell_id, slot, symbol), 2 * count);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Ok(gold
        .bits
        .chunks_exact(2)
        .map(|pair| {
            Complex64::new(
                scale * (1.0 - 2.0 * f64::from(pair[0])),
                scale * (1.0 - 2.0 * f64::from(pair[1])),
            )
        })
        .collect())
}

/// Fixed SSS placeholder: a length-62 scrambled m-sequence mapped to
/// BPSK. Present so grids and spoofing scenarios have a concrete signal;
/// no detection or attack logic consumes it.
pub fn sss_sequence(cell_id: u16) -> Vec<Complex64> {
    gold_sequence(u32::from(cell_id), 62)
        .bits
        .iter()
        .map(|&b| Complex64::new(1.0 - 2.0 * f64::from(b), 0.0))
        .collect()
}

/// RS values for every RS position of a slot symbol, keyed off the grid
/// config so callers stay aligned with the lattice.
pub fn rs_symbols_for(
    cfg: &CellConfig,
    slot: usize,
    symbol_in_slot: usize,
) -> Result<Vec<Complex64>, SequenceError> {
    rs_symbols(cfg.cell_id, slot, symbol_in_slot, cfg.n_rb)
}
