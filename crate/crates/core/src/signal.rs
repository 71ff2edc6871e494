//! Complex-valued frequency-domain frame container shared by the jammer
//! and the link simulator.

use num_complex::Complex64;

/// One frame of frequency-domain samples, laid out like a
/// [`crate::grid::ResourceGrid`]: `n_sc` subcarriers by `n_symb` OFDM
/// symbols, symbol-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSignal {
    n_sc: usize,
    n_symb: usize,
    cells: Vec<Complex64>,
}

impl FrameSignal {
    pub fn zeros(n_sc: usize, n_symb: usize) -> Self {
        FrameSignal {
            n_sc,
            n_symb,
            cells: vec![Complex64::default(); n_sc * n_symb],
        }
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_sc
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symb
    }

    pub fn get(&self, sc: usize, sym: usize) -> Complex64 {
        self.cells[sym * self.n_sc + sc]
    }

    pub fn set(&mut self, sc: usize, sym: usize, v: Complex64) {
        self.cells[sym * self.n_sc + sc] = v;
    }

    pub fn add(&mut self, sc: usize, sym: usize, v: Complex64) {
        self.cells[sym * self.n_sc + sc] += v;
    }

    /// Contiguous view of one OFDM symbol across all subcarriers.
    pub fn symbol(&self, sym: usize) -> &[Complex64] {
        &self.cells[sym * self.n_sc..(sym + 1) * self.n_sc]
    }

    pub fn symbol_mut(&mut self, sym: usize) -> &mut [Complex64] {
        &mut self.cells[sym * self.n_sc..(sym + 1) * self.n_sc]
    }

    /// Mean per-RE power over the whole frame.
    pub fn mean_power(&self) -> f64 {
        self.cells.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.cells.len() as f64
    }
}
