//! OFDM symbol modulation and demodulation with cyclic prefix.
//!
//! Subcarriers are mapped around DC (bin 0 carries the middle
//! subcarrier) and both transforms are unitary, so per-subcarrier power
//! survives the round trip and time-domain noise keeps its variance
//! per frequency bin.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OfdmError {
    #[error("{active} active subcarriers do not fit an FFT of size {fft_size}")]
    Overfull { active: usize, fft_size: usize },
    #[error("time-domain symbol length {got}, expected {expected}")]
    SymbolLength { got: usize, expected: usize },
}

/// FFT size and cyclic-prefix length used for a given occupied
/// bandwidth: the smallest power of two with at least one third
/// headroom, with the prefix scaled to keep the 1024/72 ratio of the
/// 50-RB configuration (128/9 for small test bandwidths).
pub fn fft_params(n_active: usize) -> (usize, usize) {
    let mut fft_size = 128;
    while fft_size * 3 < n_active * 4 {
        fft_size *= 2;
    }
    (fft_size, fft_size * 9 / 128)
}

/// A planned OFDM transform pair for one bandwidth.
pub struct Ofdm {
    fft_size: usize,
    cp_len: usize,
    n_active: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Ofdm {
    pub fn new(n_active: usize, fft_size: usize, cp_len: usize) -> Result<Self, OfdmError> {
        if n_active > fft_size {
            return Err(OfdmError::Overfull {
                active: n_active,
                fft_size,
            });
        }
        let mut planner = FftPlanner::new();
        Ok(Ofdm {
            fft_size,
            cp_len,
            n_active,
            forward: planner.plan_fft_forward(fft_size),
            inverse: planner.plan_fft_inverse(fft_size),
        })
    }

    pub fn for_bandwidth(n_active: usize) -> Result<Self, OfdmError> {
        let (fft_size, cp_len) = fft_params(n_active);
        Ofdm::new(n_active, fft_size, cp_len)
    }

    pub fn samples_per_symbol(&self) -> usize {
        self.fft_size + self.cp_len
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    /// FFT bin for a logical subcarrier index; the middle subcarrier
    /// lands on DC, lower halves wrap to negative frequencies.
    fn bin(&self, subcarrier: usize) -> usize {
        let offset = subcarrier as isize - (self.n_active / 2) as isize;
        offset.rem_euclid(self.fft_size as isize) as usize
    }

    /// One frequency-domain column -> cyclic-prefixed time samples.
    pub fn modulate(&self, column: &[Complex64]) -> Result<Vec<Complex64>, OfdmError> {
        if column.len() != self.n_active {
            return Err(OfdmError::Overfull {
                active: column.len(),
                fft_size: self.fft_size,
            });
        }
        let mut bins = vec![Complex64::default(); self.fft_size];
        for (k, &v) in column.iter().enumerate() {
            bins[self.bin(k)] = v;
        }
        self.inverse.process(&mut bins);
        let scale = 1.0 / (self.fft_size as f64).sqrt();
        for b in bins.iter_mut() {
            *b *= scale;
        }
        let mut out = Vec::with_capacity(self.fft_size + self.cp_len);
        out.extend_from_slice(&bins[self.fft_size - self.cp_len..]);
        out.extend_from_slice(&bins);
        Ok(out)
    }

    /// Cyclic-prefixed time samples -> frequency-domain column.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<Vec<Complex64>, OfdmError> {
        let expected = self.fft_size + self.cp_len;
        if samples.len() != expected {
            return Err(OfdmError::SymbolLength {
                got: samples.len(),
                expected,
            });
        }
        let mut bins = samples[self.cp_len..].to_vec();
        self.forward.process(&mut bins);
        let scale = 1.0 / (self.fft_size as f64).sqrt();
        Ok((0..self.n_active)
            .map(|k| bins[self.bin(k)] * scale)
            .collect())
    }
}

/// Single-shot helper mirroring [`Ofdm::modulate`].
pub fn ofdm_modulate(
    column: &[Complex64],
    fft_size: usize,
    cp_len: usize,
) -> Result<Vec<Complex64>, OfdmError> {
    Ofdm::new(column.len(), fft_size, cp_len)?.modulate(column)
}

/// Single-shot helper mirroring [`Ofdm::demodulate`].
pub fn ofdm_demodulate(
    samples: &[Complex64],
    n_active: usize,
    fft_size: usize,
    cp_len: usize,
) -> Result<Vec<Complex64>, OfdmError> {
    Ofdm::new(n_active, fft_size, cp_len)?.demodulate(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn fifty_rb_parameters() {
        assert_eq!(fft_params(600), (1024, 72));
        assert_eq!(fft_params(72), (128, 9));
    }

    #[test]
    fn round_trip_is_exact_without_a_channel() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let column: Vec<Complex64> = (0..600)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let time = ofdm_modulate(&column, 1024, 72).unwrap();
        assert_eq!(time.len(), 1096);
        let back = ofdm_demodulate(&time, 600, 1024, 72).unwrap();
        for (a, b) in column.iter().zip(&back) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn single_subcarrier_is_a_constant_magnitude_tone() {
        let mut column = vec![Complex64::default(); 120];
        column[37] = Complex64::new(1.0, 0.0);
        let time = ofdm_modulate(&column, 128, 9).unwrap();
        let expected = 1.0 / (128f64).sqrt();
        for s in &time {
            assert!((s.norm() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn prefix_equals_symbol_tail() {
        let column: Vec<Complex64> = (0..60)
            .map(|k| Complex64::new(k as f64 * 0.01, -(k as f64) * 0.02))
            .collect();
        let time = ofdm_modulate(&column, 128, 9).unwrap();
        let (cp, body) = time.split_at(9);
        assert_eq!(cp, &body[128 - 9..]);
    }

    #[test]
    fn per_subcarrier_power_is_preserved() {
        let column = vec![Complex64::new(1.0, 0.0); 600];
        let time = ofdm_modulate(&column, 1024, 72).unwrap();
        let body_energy: f64 = time[72..].iter().map(|s| s.norm_sqr()).sum();
        assert!((body_energy - 600.0).abs() < 1e-9);
    }

    #[test]
    fn overfull_mapping_is_rejected() {
        let column = vec![Complex64::default(); 130];
        assert!(matches!(
            ofdm_modulate(&column, 128, 9),
            Err(OfdmError::Overfull { .. })
        ));
    }
}
