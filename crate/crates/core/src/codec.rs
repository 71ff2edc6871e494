//! Modulation mapping and the channel-coding models that translate
//! interference power into bit and block error rates.
//!
//! Coded channels get real encoders and soft decoders (repetition,
//! rate-1/3 constraint-length-7 convolutional, the rate-1/16 block code,
//! and the broadcast-channel combination of the two). The turbo-coded
//! shared channels are represented by a calibrated BLER threshold curve
//! instead of a full codec.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::ReKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("bit count {got} not divisible by {bits_per_symbol} bits per symbol")]
    Indivisible { got: usize, bits_per_symbol: usize },
    #[error("noise variance {0} must be positive")]
    NoisePower(f64),
    #[error("scheme expects info length {expected}, got {got}")]
    InfoLength { expected: usize, got: usize },
    #[error("coded length {got} not a multiple of {unit}")]
    CodedLength { got: usize, unit: usize },
    #[error("{0:?} is a threshold model, not a bit-level codec")]
    ModeledOnly(CodeScheme),
    #[error("no threshold model for channel {0}")]
    UnsupportedChannel(ReKind),
}

/// Modulation alphabet. All constellations are Gray-mapped with unit
/// average energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModScheme {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl ModScheme {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            ModScheme::Bpsk => 1,
            ModScheme::Qpsk => 2,
            ModScheme::Qam16 => 4,
            ModScheme::Qam64 => 6,
        }
    }

    /// Per-axis amplitude levels indexed by the Gray-coded axis bits.
    /// Bit pattern 0 maps to the most positive level, so the all-zeros
    /// symbol is the positive corner point.
    fn axis_levels(self) -> &'static [f64] {
        match self {
            ModScheme::Bpsk | ModScheme::Qpsk => &[1.0, -1.0],
            ModScheme::Qam16 => &[3.0, 1.0, -1.0, -3.0],
            ModScheme::Qam64 => &[7.0, 5.0, 3.0, 1.0, -1.0, -3.0, -5.0, -7.0],
        }
    }

    fn scale(self) -> f64 {
        match self {
            ModScheme::Bpsk => 1.0,
            ModScheme::Qpsk => std::f64::consts::FRAC_1_SQRT_2,
            ModScheme::Qam16 => 1.0 / 10f64.sqrt(),
            ModScheme::Qam64 => 1.0 / 42f64.sqrt(),
        }
    }

    /// Gray code over `width` bits -> level index.
    fn gray_index(bits: &[u8]) -> usize {
        // Interpret the bit group as a reflected Gray code word.
        let mut idx = 0usize;
        let mut acc = 0u8;
        for &b in bits {
            acc ^= b;
            idx = (idx << 1) | usize::from(acc);
        }
        idx
    }

    fn axis_value(self, bits: &[u8]) -> f64 {
        self.axis_levels()[Self::gray_index(bits)]
    }

    /// The constellation point for one symbol's bit group. The first
    /// half of the bits selects the in-phase axis, the second half the
    /// quadrature axis; BPSK uses the in-phase axis only.
    pub fn map_symbol(self, bits: &[u8]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol());
        let s = self.scale();
        match self {
            ModScheme::Bpsk => Complex64::new(s * self.axis_value(bits), 0.0),
            _ => {
                let half = bits.len() / 2;
                Complex64::new(
                    s * self.axis_value(&bits[..half]),
                    s * self.axis_value(&bits[half..]),
                )
            }
        }
    }

    /// Every `(bit pattern, point)` pair of the alphabet.
    pub fn alphabet(self) -> Vec<(Vec<u8>, Complex64)> {
        let bps = self.bits_per_symbol();
        (0..1usize << bps)
            .map(|word| {
                let bits: Vec<u8> = (0..bps).map(|i| ((word >> (bps - 1 - i)) & 1) as u8).collect();
                let point = self.map_symbol(&bits);
                (bits, point)
            })
            .collect()
    }
}

/// Maps a bit stream to unit-average-energy symbols. The bit count must
/// divide evenly; there is no silent padding.
pub fn modulate(bits: &[u8], scheme: ModScheme) -> Result<Vec<Complex64>, CodecError> {
    let bps = scheme.bits_per_symbol();
    if bits.len() % bps != 0 {
        return Err(CodecError::Indivisible {
            got: bits.len(),
            bits_per_symbol: bps,
        });
    }
    Ok(bits.chunks_exact(bps).map(|b| scheme.map_symbol(b)).collect())
}

/// Max-log per-bit log-likelihood ratios, positive for bit 0.
///
/// `noise_var` is the total variance of the circular complex noise per
/// symbol; the receiver is assumed ignorant of any structured
/// interference on top of it.
pub fn demodulate_soft(
    symbols: &[Complex64],
    scheme: ModScheme,
    noise_var: f64,
) -> Result<Vec<f64>, CodecError> {
    if !(noise_var > 0.0) {
        return Err(CodecError::NoisePower(noise_var));
    }
    let alphabet = scheme.alphabet();
    let bps = scheme.bits_per_symbol();
    let mut llrs = Vec::with_capacity(symbols.len() * bps);
    for y in symbols {
        for i in 0..bps {
            let mut best0 = f64::INFINITY;
            let mut best1 = f64::INFINITY;
            for (bits, point) in &alphabet {
                let d = (y - point).norm_sqr();
                if bits[i] == 0 {
                    best0 = best0.min(d);
                } else {
                    best1 = best1.min(d);
                }
            }
            llrs.push((best1 - best0) / noise_var);
        }
    }
    Ok(llrs)
}

/// Channel-coding schemes of the physical channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CodeScheme {
    /// BPSK repetition-3, decoded by majority vote over the LLR signs.
    RepetitionR3,
    /// Rate-1/3 constraint-length-7 feedforward convolutional code
    /// (generators 133/171/165 octal, zero tail), soft Viterbi decoded.
    ConvR13,
    /// Rate-1/16 block code: two info bits select one of four 32-bit
    /// Walsh rows at pairwise Hamming distance 16, decoded by
    /// correlation.
    BlockR116,
    /// Broadcast-channel scheme: 16-bit checksum, convolutional
    /// encoding, then 16-fold repetition combined before decoding.
    PbchR148,
    /// Turbo coding stand-in; only [`turbo_threshold`] consumes it.
    TurboThreshold(f64),
}

const CONV_K: usize = 7;
const CONV_GENERATORS: [u32; 3] = [0o133, 0o171, 0o165];
const CONV_STATES: usize = 1 << (CONV_K - 1);
const PBCH_REPS: usize = 16;
const BLOCK_N: usize = 32;

impl CodeScheme {
    /// Coded bits produced from `k` info bits.
    pub fn coded_len(self, k: usize) -> Result<usize, CodecError> {
        match self {
            CodeScheme::RepetitionR3 => Ok(3 * k),
            CodeScheme::ConvR13 => Ok(3 * (k + CONV_K - 1)),
            CodeScheme::BlockR116 => {
                if k == 2 {
                    Ok(BLOCK_N)
                } else {
                    Err(CodecError::InfoLength { expected: 2, got: k })
                }
            }
            CodeScheme::PbchR148 => Ok(PBCH_REPS * 3 * (k + 16 + CONV_K - 1)),
            CodeScheme::TurboThreshold(_) => Err(CodecError::ModeledOnly(self)),
        }
    }
}

fn parity(word: u32) -> u8 {
    (word.count_ones() & 1) as u8
}

fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(3 * (bits.len() + CONV_K - 1));
    let mut reg: u32 = 0;
    for &b in bits.iter().chain(std::iter::repeat(&0u8).take(CONV_K - 1)) {
        reg = ((reg >> 1) | (u32::from(b) << (CONV_K - 1))) & ((1 << CONV_K) - 1);
        for g in CONV_GENERATORS {
            out.push(parity(reg & g));
        }
    }
    out
}

/// Appends a 16-bit checksum (CRC-16/CCITT, polynomial 0x1021) over the
/// bit vector.
fn crc16(bits: &[u8]) -> [u8; 16] {
    let mut crc: u16 = 0xFFFF;
    for &b in bits {
        let top = ((crc >> 15) as u8) ^ b;
        crc <<= 1;
        if top == 1 {
            crc ^= 0x1021;
        }
    }
    std::array::from_fn(|i| ((crc >> (15 - i)) & 1) as u8)
}

/// One of the four 32-bit Walsh codewords; bit `k` is the parity of
/// `index & k`.
fn block_codeword(index: usize) -> [u8; BLOCK_N] {
    std::array::from_fn(|k| parity((index & k) as u32))
}

pub fn encode(bits: &[u8], scheme: CodeScheme) -> Result<Vec<u8>, CodecError> {
    match scheme {
        CodeScheme::RepetitionR3 => Ok(bits.iter().flat_map(|&b| [b, b, b]).collect()),
        CodeScheme::ConvR13 => Ok(conv_encode(bits)),
        CodeScheme::BlockR116 => {
            if bits.len() != 2 {
                return Err(CodecError::InfoLength {
                    expected: 2,
                    got: bits.len(),
                });
            }
            let index = (usize::from(bits[0]) << 1) | usize::from(bits[1]);
            Ok(block_codeword(index).to_vec())
        }
        CodeScheme::PbchR148 => {
            let mut with_crc = bits.to_vec();
            with_crc.extend_from_slice(&crc16(bits));
            let conv = conv_encode(&with_crc);
            let mut out = Vec::with_capacity(conv.len() * PBCH_REPS);
            for _ in 0..PBCH_REPS {
                out.extend_from_slice(&conv);
            }
            Ok(out)
        }
        CodeScheme::TurboThreshold(_) => Err(CodecError::ModeledOnly(scheme)),
    }
}

/// Decodes LLRs (positive = bit 0) back to info bits plus a pass flag.
///
/// The flag reports the broadcast channel's checksum; schemes without an
/// integrity check always pass.
pub fn decode(llrs: &[f64], scheme: CodeScheme) -> Result<(Vec<u8>, bool), CodecError> {
    match scheme {
        CodeScheme::RepetitionR3 => {
            if llrs.len() % 3 != 0 {
                return Err(CodecError::CodedLength {
                    got: llrs.len(),
                    unit: 3,
                });
            }
            let bits = llrs
                .chunks_exact(3)
                .map(|c| {
                    let zeros = c.iter().filter(|&&l| l >= 0.0).count();
                    u8::from(zeros < 2)
                })
                .collect();
            Ok((bits, true))
        }
        CodeScheme::ConvR13 => Ok((viterbi(llrs)?, true)),
        CodeScheme::BlockR116 => {
            if llrs.len() != BLOCK_N {
                return Err(CodecError::CodedLength {
                    got: llrs.len(),
                    unit: BLOCK_N,
                });
            }
            let mut best = 0usize;
            let mut best_score = f64::NEG_INFINITY;
            for index in 0..4 {
                let cw = block_codeword(index);
                let score: f64 = cw
                    .iter()
                    .zip(llrs)
                    .map(|(&c, &l)| if c == 0 { l } else { -l })
                    .sum();
                if score > best_score {
                    best_score = score;
                    best = index;
                }
            }
            Ok((vec![(best >> 1) as u8, (best & 1) as u8], true))
        }
        CodeScheme::PbchR148 => {
            let unit = llrs.len() / PBCH_REPS;
            if llrs.len() % PBCH_REPS != 0 || unit % 3 != 0 {
                return Err(CodecError::CodedLength {
                    got: llrs.len(),
                    unit: PBCH_REPS * 3,
                });
            }
            // Combine the repetitions before decoding.
            let mut combined = vec![0.0; unit];
            for rep in llrs.chunks_exact(unit) {
                for (acc, &l) in combined.iter_mut().zip(rep) {
                    *acc += l;
                }
            }
            let decoded = viterbi(&combined)?;
            if decoded.len() < 16 {
                return Err(CodecError::CodedLength {
                    got: llrs.len(),
                    unit: PBCH_REPS * 3 * (16 + CONV_K),
                });
            }
            let (info, rx_crc) = decoded.split_at(decoded.len() - 16);
            let pass = crc16(info) == rx_crc;
            Ok((info.to_vec(), pass))
        }
        CodeScheme::TurboThreshold(_) => Err(CodecError::ModeledOnly(scheme)),
    }
}

/// Soft-input maximum-likelihood sequence decoder for the zero-tailed
/// rate-1/3 code. Hands back info bits with the tail removed.
fn viterbi(llrs: &[f64]) -> Result<Vec<u8>, CodecError> {
    if llrs.len() % 3 != 0 || llrs.len() / 3 < CONV_K - 1 {
        return Err(CodecError::CodedLength {
            got: llrs.len(),
            unit: 3,
        });
    }
    let steps = llrs.len() / 3;

    // Branch table: register = input bit in the MSB, state bits below,
    // matching conv_encode's shift direction.
    let mut expected = [[0u8; 3]; CONV_STATES * 2];
    for state in 0..CONV_STATES {
        for input in 0..2u32 {
            let reg = (input << (CONV_K - 1)) | state as u32;
            for (j, g) in CONV_GENERATORS.into_iter().enumerate() {
                expected[state * 2 + input as usize][j] = parity(reg & g);
            }
        }
    }

    let mut metrics = [f64::NEG_INFINITY; CONV_STATES];
    metrics[0] = 0.0;
    // predecessor[t][state] packs (previous state, input bit).
    let mut pred = vec![[(0u8, 0u8); CONV_STATES]; steps];

    for (t, chunk) in llrs.chunks_exact(3).enumerate() {
        let mut next = [f64::NEG_INFINITY; CONV_STATES];
        for state in 0..CONV_STATES {
            if metrics[state] == f64::NEG_INFINITY {
                continue;
            }
            for input in 0..2usize {
                let exp = &expected[state * 2 + input];
                let mut bm = 0.0;
                for j in 0..3 {
                    bm += if exp[j] == 0 { chunk[j] } else { -chunk[j] };
                }
                let ns = (state >> 1) | (input << (CONV_K - 2));
                let cand = metrics[state] + bm;
                if cand > next[ns] {
                    next[ns] = cand;
                    pred[t][ns] = (state as u8, input as u8);
                }
            }
        }
        metrics = next;
    }

    // Zero tail forces the final state to 0.
    let mut state = 0usize;
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        let (prev, input) = pred[t][state];
        bits[t] = input;
        state = prev as usize;
    }
    bits.truncate(steps - (CONV_K - 1));
    Ok(bits)
}

/// BLER estimate for the turbo-coded shared channels: a logistic curve
/// in dB anchored at BLER 0.1 for -7 dB and 0.5 for -9 dB, monotone
/// nonincreasing in SINR.
pub fn turbo_threshold(channel: ReKind, effective_sinr_db: f64) -> Result<f64, CodecError> {
    if channel != ReKind::Pdsch && channel != ReKind::Pusch {
        return Err(CodecError::UnsupportedChannel(channel));
    }
    let slope = 9f64.ln() / 2.0;
    Ok(1.0 / (1.0 + (slope * (effective_sinr_db + 9.0)).exp()))
}
