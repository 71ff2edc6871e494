//! FDD LTE resource-grid construction and resource-element accounting.
//!
//! A frame is modeled as a dense time-frequency lattice in which every
//! resource element (one subcarrier over one OFDM symbol) carries exactly
//! one [`ReKind`] label. The downlink and uplink builders reproduce the
//! per-channel RE census of a 10 MHz FDD cell: 84000 REs per frame at
//! 50 resource blocks, 4000 of them cell-specific reference signals,
//! 160 PCFICH, 21000 PUCCH at the default edge allocation, and so on.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reference signals repeat every 6 subcarriers on their symbol.
const RS_SPACING: usize = 6;
/// PSS/SSS span 62 active subcarriers plus the center position.
const SYNC_WIDTH: usize = 63;
/// PBCH spans the center six resource blocks.
const PBCH_WIDTH: usize = 72;
/// PCFICH occupies four groups of four subcarriers in the first symbol.
const PCFICH_GROUPS: usize = 4;
/// PHICH is modeled as three groups of twelve REs per subframe.
const PHICH_RES_PER_SUBFRAME: usize = 36;
/// PRACH occupies six resource blocks over one subframe.
const PRACH_RBS: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cell_id {0} outside the physical-cell-identity range 0..=503")]
    CellIdRange(u16),
    #[error("n_rb {0} below 6: the cell must span the center 72 subcarriers")]
    BandwidthTooNarrow(usize),
    #[error("pdcch_symbols {0} outside 1..=3")]
    PdcchSymbols(usize),
    #[error("pucch_fraction {0} outside the open interval (0, 1)")]
    PucchFraction(f64),
    #[error("{0} must be at least {1}")]
    DimensionTooSmall(&'static str, usize),
    #[error("prach_subframe {0} outside 0..{1}")]
    PrachSubframe(usize, usize),
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("operation requires a {expected} grid, got {got}")]
    Direction { expected: Direction, got: Direction },
}

/// Link direction of a built grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Downlink,
    Uplink,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Downlink => write!(f, "downlink"),
            Direction::Uplink => write!(f, "uplink"),
        }
    }
}

/// Label carried by every resource element of a built grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReKind {
    Pdsch,
    Pbch,
    Pcfich,
    Pdcch,
    Phich,
    Rs,
    Pss,
    Sss,
    Pusch,
    Pucch,
    Prach,
    Dmrs,
    Unused,
}

impl ReKind {
    pub const DOWNLINK: [ReKind; 9] = [
        ReKind::Pdsch,
        ReKind::Pbch,
        ReKind::Pcfich,
        ReKind::Pdcch,
        ReKind::Phich,
        ReKind::Rs,
        ReKind::Pss,
        ReKind::Sss,
        ReKind::Unused,
    ];

    pub const UPLINK: [ReKind; 5] = [
        ReKind::Pusch,
        ReKind::Pucch,
        ReKind::Prach,
        ReKind::Dmrs,
        ReKind::Unused,
    ];

    /// Canonical spelling used in CSV exports and on the CLI.
    pub fn name(self) -> &'static str {
        match self {
            ReKind::Pdsch => "PDSCH",
            ReKind::Pbch => "PBCH",
            ReKind::Pcfich => "PCFICH",
            ReKind::Pdcch => "PDCCH",
            ReKind::Phich => "PHICH",
            ReKind::Rs => "RS",
            ReKind::Pss => "PSS",
            ReKind::Sss => "SSS",
            ReKind::Pusch => "PUSCH",
            ReKind::Pucch => "PUCCH",
            ReKind::Prach => "PRACH",
            ReKind::Dmrs => "DMRS",
            ReKind::Unused => "Unused",
        }
    }

    pub fn parse(s: &str) -> Option<ReKind> {
        let all = [
            ReKind::Pdsch,
            ReKind::Pbch,
            ReKind::Pcfich,
            ReKind::Pdcch,
            ReKind::Phich,
            ReKind::Rs,
            ReKind::Pss,
            ReKind::Sss,
            ReKind::Pusch,
            ReKind::Pucch,
            ReKind::Prach,
            ReKind::Dmrs,
            ReKind::Unused,
        ];
        all.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    pub fn direction(self) -> Direction {
        match self {
            ReKind::Pusch | ReKind::Pucch | ReKind::Prach | ReKind::Dmrs => Direction::Uplink,
            _ => Direction::Downlink,
        }
    }
}

impl fmt::Display for ReKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cell-level parameters from which both grids are derived.
///
/// Defaults describe the 10 MHz reference configuration: 50 resource
/// blocks of 12 subcarriers, 7 symbols per slot (normal cyclic prefix),
/// 20 slots per frame, a 3-symbol control region and a quarter of the
/// uplink given to PUCCH.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    pub cell_id: u16,
    pub n_rb: usize,
    pub n_sc_per_rb: usize,
    pub n_symb_per_slot: usize,
    pub n_slots_per_frame: usize,
    pub pdcch_symbols: usize,
    pub pucch_fraction: f64,
    /// Subframe carrying the PRACH region.
    pub prach_subframe: usize,
    /// First resource block of the PRACH region; `None` places it just
    /// above the lower PUCCH band.
    pub prach_rb_offset: Option<usize>,
}

impl Default for CellConfig {
    fn default() -> Self {
        CellConfig {
            cell_id: 0,
            n_rb: 50,
            n_sc_per_rb: 12,
            n_symb_per_slot: 7,
            n_slots_per_frame: 20,
            pdcch_symbols: 3,
            pucch_fraction: 0.25,
            prach_subframe: 1,
            prach_rb_offset: None,
        }
    }
}

impl CellConfig {
    pub fn with_n_rb(n_rb: usize) -> Self {
        CellConfig {
            n_rb,
            ..CellConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cell_id > 503 {
            return Err(ConfigError::CellIdRange(self.cell_id));
        }
        if self.n_rb < 6 {
            return Err(ConfigError::BandwidthTooNarrow(self.n_rb));
        }
        if self.n_sc_per_rb < 12 {
            return Err(ConfigError::DimensionTooSmall("n_sc_per_rb", 12));
        }
        if self.n_symb_per_slot < 5 {
            return Err(ConfigError::DimensionTooSmall("n_symb_per_slot", 5));
        }
        if self.n_slots_per_frame < 2 || self.n_slots_per_frame % 2 != 0 {
            return Err(ConfigError::DimensionTooSmall("n_slots_per_frame", 2));
        }
        if !(1..=3).contains(&self.pdcch_symbols) {
            return Err(ConfigError::PdcchSymbols(self.pdcch_symbols));
        }
        if !(self.pucch_fraction > 0.0 && self.pucch_fraction < 1.0) {
            return Err(ConfigError::PucchFraction(self.pucch_fraction));
        }
        if self.prach_subframe >= self.subframes() {
            return Err(ConfigError::PrachSubframe(
                self.prach_subframe,
                self.subframes(),
            ));
        }
        Ok(())
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_rb * self.n_sc_per_rb
    }

    pub fn symbols_per_frame(&self) -> usize {
        self.n_slots_per_frame * self.n_symb_per_slot
    }

    pub fn symbols_per_subframe(&self) -> usize {
        2 * self.n_symb_per_slot
    }

    pub fn subframes(&self) -> usize {
        self.n_slots_per_frame / 2
    }

    pub fn total_res(&self) -> usize {
        self.n_subcarriers() * self.symbols_per_frame()
    }

    /// PSS root selector, `cell_id mod 3`.
    pub fn pss_selector(&self) -> usize {
        usize::from(self.cell_id) % 3
    }

    /// Frequency shift of the RS lattice on a given symbol of a slot.
    ///
    /// The shift is a function of `cell_id mod 3`, so cells whose
    /// identities differ by 3 share RS positions while neighbouring
    /// identities do not.
    pub fn rs_shift(&self, symbol_in_slot: usize) -> usize {
        let base = usize::from(self.cell_id) % 3;
        match symbol_in_slot {
            0 => base,
            4 => base + 3,
            _ => panic!("symbol {symbol_in_slot} carries no reference signals"),
        }
    }

    /// Symbol indices within a slot that carry reference signals.
    pub fn rs_symbols_in_slot(&self) -> [usize; 2] {
        [0, 4]
    }

    /// RS subcarrier indices for one RS-bearing symbol, in frequency order.
    pub fn rs_subcarriers(&self, symbol_in_slot: usize) -> impl Iterator<Item = usize> {
        let shift = self.rs_shift(symbol_in_slot);
        (shift..self.n_subcarriers()).step_by(RS_SPACING)
    }

    /// First subcarrier of the centered region of `width` subcarriers.
    pub fn center_start(&self, width: usize) -> usize {
        (self.n_subcarriers().saturating_sub(width)) / 2
    }
}

/// A fully labeled per-frame time-frequency lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    direction: Direction,
    n_sc: usize,
    n_symb: usize,
    cfg: CellConfig,
    /// Symbol-major storage: `cells[sym * n_sc + sc]`.
    cells: Vec<ReKind>,
}

impl ResourceGrid {
    fn blank(direction: Direction, cfg: &CellConfig) -> Self {
        let n_sc = cfg.n_subcarriers();
        let n_symb = cfg.symbols_per_frame();
        ResourceGrid {
            direction,
            n_sc,
            n_symb,
            cfg: cfg.clone(),
            cells: vec![ReKind::Unused; n_sc * n_symb],
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_sc
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symb
    }

    pub fn total_res(&self) -> usize {
        self.cells.len()
    }

    pub fn cfg(&self) -> &CellConfig {
        &self.cfg
    }

    pub fn kind_at(&self, sc: usize, sym: usize) -> ReKind {
        self.cells[sym * self.n_sc + sc]
    }

    fn set(&mut self, sc: usize, sym: usize, kind: ReKind) {
        self.cells[sym * self.n_sc + sc] = kind;
    }

    fn set_if_unused(&mut self, sc: usize, sym: usize, kind: ReKind) -> bool {
        let cell = &mut self.cells[sym * self.n_sc + sc];
        if *cell == ReKind::Unused {
            *cell = kind;
            true
        } else {
            false
        }
    }

    /// Exact census of elements labeled `kind`.
    pub fn re_count(&self, kind: ReKind) -> usize {
        self.cells.iter().filter(|&&k| k == kind).count()
    }

    /// Census over every kind present in this grid's direction.
    pub fn counts(&self) -> Vec<(ReKind, usize)> {
        let kinds: &[ReKind] = match self.direction {
            Direction::Downlink => &ReKind::DOWNLINK,
            Direction::Uplink => &ReKind::UPLINK,
        };
        kinds.iter().map(|&k| (k, self.re_count(k))).collect()
    }

    /// Fraction of the frame occupied by the union of `kinds`.
    pub fn occupancy_fraction(&self, kinds: &[ReKind]) -> f64 {
        let n: usize = kinds.iter().map(|&k| self.re_count(k)).sum();
        n as f64 / self.total_res() as f64
    }

    /// All `(subcarrier, symbol)` positions labeled `kind`, in
    /// symbol-major order.
    pub fn positions(&self, kind: ReKind) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for sym in 0..self.n_symb {
            for sc in 0..self.n_sc {
                if self.kind_at(sc, sym) == kind {
                    out.push((sc, sym));
                }
            }
        }
        out
    }

    /// Every RE in the center 72 subcarriers across all symbols, the
    /// target of the center-6-RB attack. Errors on uplink grids.
    pub fn center_region_res(&self) -> Result<Vec<(usize, usize)>, GridError> {
        if self.direction != Direction::Downlink {
            return Err(GridError::Direction {
                expected: Direction::Downlink,
                got: self.direction,
            });
        }
        let start = self.cfg.center_start(PBCH_WIDTH);
        let width = PBCH_WIDTH.min(self.n_sc);
        let mut out = Vec::with_capacity(width * self.n_symb);
        for sym in 0..self.n_symb {
            for sc in start..start + width {
                out.push((sc, sym));
            }
        }
        Ok(out)
    }

    /// Grid occupancy export: one `subcarrier,symbol,kind` row per RE.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() * 12);
        out.push_str("subcarrier,symbol,kind\n");
        for sc in 0..self.n_sc {
            for sym in 0..self.n_symb {
                out.push_str(&format!("{},{},{}\n", sc, sym, self.kind_at(sc, sym).name()));
            }
        }
        out
    }
}

/// Builds the downlink frame lattice.
///
/// Placement order (highest precedence first): PSS/SSS on the center 63
/// subcarriers of their symbols in subframes 0 and 5, reference signals,
/// PBCH on the center 72 subcarriers of four symbols in subframe 0,
/// PCFICH, PHICH, then PDCCH filling the rest of the control region and
/// PDSCH absorbing every remaining element.
pub fn build_downlink_grid(cfg: &CellConfig) -> Result<ResourceGrid, GridError> {
    cfg.validate()?;
    let mut grid = ResourceGrid::blank(Direction::Downlink, cfg);
    let n_sc = grid.n_sc;
    let nsymb_slot = cfg.n_symb_per_slot;

    // PSS in the last symbol and SSS in the second-to-last symbol of the
    // first slot of subframes 0 and N/2.
    let sync_start = cfg.center_start(SYNC_WIDTH);
    let sync_width = SYNC_WIDTH.min(n_sc);
    for sf in [0, cfg.subframes() / 2] {
        let slot_base = sf * cfg.symbols_per_subframe();
        let pss_sym = slot_base + nsymb_slot - 1;
        let sss_sym = slot_base + nsymb_slot - 2;
        for sc in sync_start..sync_start + sync_width {
            grid.set(sc, pss_sym, ReKind::Pss);
            grid.set(sc, sss_sym, ReKind::Sss);
        }
    }

    // Cell-specific reference signals: two subcarriers per RB on the
    // first and fifth symbol of every slot.
    for slot in 0..cfg.n_slots_per_frame {
        for sym_in_slot in cfg.rs_symbols_in_slot() {
            let sym = slot * nsymb_slot + sym_in_slot;
            for sc in cfg.rs_subcarriers(sym_in_slot) {
                grid.set_if_unused(sc, sym, ReKind::Rs);
            }
        }
    }

    // PBCH: center 72 subcarriers over the four symbols of the second
    // slot of subframe 0, around already-placed RS.
    let pbch_start = cfg.center_start(PBCH_WIDTH);
    let pbch_width = PBCH_WIDTH.min(n_sc);
    for sym in nsymb_slot..nsymb_slot + 4 {
        for sc in pbch_start..pbch_start + pbch_width {
            grid.set_if_unused(sc, sym, ReKind::Pbch);
        }
    }

    // PCFICH: four groups of four REs in symbol 0 of every subframe.
    // Each group takes one subcarrier sextet aligned to a multiple of 6,
    // skipping the two RS residues, so the census stays 16 per subframe
    // for every cell identity.
    let rs_res = usize::from(cfg.cell_id) % 3;
    let group_span = n_sc / PCFICH_GROUPS;
    for sf in 0..cfg.subframes() {
        let sym = sf * cfg.symbols_per_subframe();
        for g in 0..PCFICH_GROUPS {
            let raw = (usize::from(cfg.cell_id) * 7 + g * group_span) % n_sc;
            let block = raw - raw % RS_SPACING;
            for off in 0..RS_SPACING {
                if off == rs_res || off == rs_res + 3 {
                    continue;
                }
                grid.set(block + off, sym, ReKind::Pcfich);
            }
        }
    }

    // PHICH: 36 REs (three groups of twelve) in symbol 0 of every
    // subframe, taking the first free subcarriers after a cell-dependent
    // starting point.
    for sf in 0..cfg.subframes() {
        let sym = sf * cfg.symbols_per_subframe();
        let start = (usize::from(cfg.cell_id) * 11) % n_sc;
        let mut placed = 0;
        for i in 0..n_sc {
            if placed == PHICH_RES_PER_SUBFRAME {
                break;
            }
            let sc = (start + i) % n_sc;
            if grid.set_if_unused(sc, sym, ReKind::Phich) {
                placed += 1;
            }
        }
    }

    // PDCCH fills the remaining control region.
    for sf in 0..cfg.subframes() {
        let base = sf * cfg.symbols_per_subframe();
        for sym in base..base + cfg.pdcch_symbols {
            for sc in 0..n_sc {
                grid.set_if_unused(sc, sym, ReKind::Pdcch);
            }
        }
    }

    // PDSCH absorbs everything else.
    for cell in grid.cells.iter_mut() {
        if *cell == ReKind::Unused {
            *cell = ReKind::Pdsch;
        }
    }

    Ok(grid)
}

/// Number of PUCCH subcarrier columns for a config, always even so the
/// allocation splits equally between the two band edges.
pub fn pucch_columns(cfg: &CellConfig) -> usize {
    let half = (cfg.pucch_fraction * cfg.n_subcarriers() as f64 / 2.0).round() as usize;
    2 * half.min(cfg.n_subcarriers() / 2)
}

/// Builds the uplink frame lattice.
///
/// PUCCH occupies contiguous edge bands over all symbols, a PRACH region
/// of six resource blocks sits in one subframe, DMRS takes symbol 3 of
/// every slot inside the PUSCH region, and PUSCH absorbs the rest.
pub fn build_uplink_grid(cfg: &CellConfig) -> Result<ResourceGrid, GridError> {
    cfg.validate()?;
    let mut grid = ResourceGrid::blank(Direction::Uplink, cfg);
    let n_sc = grid.n_sc;
    let n_symb = grid.n_symb;

    let half = pucch_columns(cfg) / 2;
    for sym in 0..n_symb {
        for sc in 0..half {
            grid.set(sc, sym, ReKind::Pucch);
            grid.set(n_sc - 1 - sc, sym, ReKind::Pucch);
        }
    }

    // PRACH: six RBs over one subframe, clipped to whatever is not
    // already PUCCH.
    let rb_offset = cfg
        .prach_rb_offset
        .unwrap_or_else(|| half.div_ceil(cfg.n_sc_per_rb));
    let prach_lo = rb_offset * cfg.n_sc_per_rb;
    let prach_hi = (prach_lo + PRACH_RBS * cfg.n_sc_per_rb).min(n_sc);
    let sf_base = cfg.prach_subframe * cfg.symbols_per_subframe();
    for sym in sf_base..sf_base + cfg.symbols_per_subframe() {
        for sc in prach_lo..prach_hi {
            grid.set_if_unused(sc, sym, ReKind::Prach);
        }
    }

    // DMRS on symbol 3 of every slot, inside the PUSCH region only.
    for slot in 0..cfg.n_slots_per_frame {
        let sym = slot * cfg.n_symb_per_slot + 3;
        for sc in 0..n_sc {
            grid.set_if_unused(sc, sym, ReKind::Dmrs);
        }
    }

    for cell in grid.cells.iter_mut() {
        if *cell == ReKind::Unused {
            *cell = ReKind::Pusch;
        }
    }

    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_downlink_census() {
        let grid = build_downlink_grid(&CellConfig::default()).unwrap();
        assert_eq!(grid.total_res(), 84000);
        let total: usize = grid.counts().iter().map(|&(_, n)| n).sum();
        assert_eq!(total, 84000);
        assert_eq!(grid.re_count(ReKind::Rs), 4000);
        assert_eq!(grid.re_count(ReKind::Pcfich), 160);
        assert_eq!(grid.re_count(ReKind::Pss), 126);
        assert_eq!(grid.re_count(ReKind::Sss), 126);
        assert_eq!(grid.re_count(ReKind::Phich), 360);
        assert_eq!(grid.re_count(ReKind::Unused), 0);
    }

    #[test]
    fn pbch_occupies_center_72_in_subframe_0_only() {
        let cfg = CellConfig::default();
        let grid = build_downlink_grid(&cfg).unwrap();
        let start = cfg.center_start(72);
        for (sc, sym) in grid.positions(ReKind::Pbch) {
            assert!(sc >= start && sc < start + 72);
            assert!(sym >= 7 && sym < 11, "PBCH outside subframe 0: sym {sym}");
        }
        // 72 x 4 symbols minus the RS already present on symbol 7.
        assert_eq!(grid.re_count(ReKind::Pbch), 72 * 4 - 12);
    }

    #[test]
    fn minimal_bandwidth_pbch_spans_whole_band() {
        let cfg = CellConfig::with_n_rb(6);
        let grid = build_downlink_grid(&cfg).unwrap();
        assert_eq!(grid.center_region_res().unwrap().len(), grid.total_res());
        // On each PBCH symbol every subcarrier is PBCH or RS.
        for sym in 8..11 {
            for sc in 0..grid.n_subcarriers() {
                assert_eq!(grid.kind_at(sc, sym), ReKind::Pbch);
            }
        }
    }

    #[test]
    fn center_region_census_and_coverage() {
        let grid = build_downlink_grid(&CellConfig::default()).unwrap();
        let region = grid.center_region_res().unwrap();
        assert_eq!(region.len(), 10080);
        let set: std::collections::HashSet<_> = region.into_iter().collect();
        for kind in [ReKind::Pbch, ReKind::Pss, ReKind::Sss] {
            for pos in grid.positions(kind) {
                assert!(set.contains(&pos), "{kind} RE {pos:?} outside center region");
            }
        }
        assert!((grid.occupancy_fraction(&[ReKind::Rs]) - 4000.0 / 84000.0).abs() < 1e-15);
        assert_eq!(10080.0 / 84000.0, 0.12);
    }

    #[test]
    fn center_region_rejects_uplink() {
        let grid = build_uplink_grid(&CellConfig::default()).unwrap();
        assert!(matches!(
            grid.center_region_res(),
            Err(GridError::Direction { .. })
        ));
    }

    #[test]
    fn default_uplink_census() {
        let grid = build_uplink_grid(&CellConfig::default()).unwrap();
        assert_eq!(grid.re_count(ReKind::Pucch), 21000);
        assert!((grid.occupancy_fraction(&[ReKind::Pucch]) - 0.25).abs() < 1e-15);
        assert_eq!(grid.re_count(ReKind::Prach), 72 * 14);
        assert_eq!(grid.re_count(ReKind::Unused), 0);
        let total: usize = grid.counts().iter().map(|&(_, n)| n).sum();
        assert_eq!(total, 84000);
    }

    #[test]
    fn pucch_splits_equally_between_edges() {
        let cfg = CellConfig::default();
        let grid = build_uplink_grid(&cfg).unwrap();
        let n_sc = grid.n_subcarriers();
        let lower: usize = grid
            .positions(ReKind::Pucch)
            .iter()
            .filter(|&&(sc, _)| sc < n_sc / 2)
            .count();
        assert_eq!(lower, 21000 / 2);
    }

    #[test]
    fn tiny_pucch_fraction_rounds_to_whole_even_columns() {
        let cfg = CellConfig {
            pucch_fraction: f64::MIN_POSITIVE,
            ..CellConfig::default()
        };
        let grid = build_uplink_grid(&cfg).unwrap();
        let count = grid.re_count(ReKind::Pucch);
        assert_eq!(count % grid.n_symbols(), 0);
        assert_eq!((count / grid.n_symbols()) % 2, 0);
    }

    #[test]
    fn pcfich_sits_in_first_symbol_of_each_subframe() {
        for cell_id in [0u16, 1, 5, 97, 503] {
            let cfg = CellConfig {
                cell_id,
                ..CellConfig::default()
            };
            let grid = build_downlink_grid(&cfg).unwrap();
            let pos = grid.positions(ReKind::Pcfich);
            assert_eq!(pos.len(), 160, "cell_id {cell_id}");
            for (_, sym) in pos {
                assert_eq!(sym % 14, 0);
            }
        }
    }

    #[test]
    fn invalid_configs_name_the_violated_invariant() {
        let mut cfg = CellConfig::default();
        cfg.n_rb = 5;
        let err = build_downlink_grid(&cfg).unwrap_err();
        assert!(err.to_string().contains("n_rb 5"));

        let cfg = CellConfig {
            cell_id: 504,
            ..CellConfig::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::CellIdRange(504))
        ));

        let cfg = CellConfig {
            pucch_fraction: 1.0,
            ..CellConfig::default()
        };
        assert!(build_uplink_grid(&cfg).is_err());
    }

    #[test]
    fn csv_export_shape() {
        let grid = build_downlink_grid(&CellConfig::with_n_rb(6)).unwrap();
        let csv = grid.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("subcarrier,symbol,kind"));
        assert_eq!(csv.lines().count(), grid.total_res() + 1);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,0,"));
    }
}
