//! Monte Carlo OFDM link simulation: modulate a frame, apply noise and a
//! jam plan, demodulate, decode, and measure per-channel error rates;
//! bisect for J/S denial thresholds.
//!
//! Every random draw comes from a substream keyed on the scenario seed,
//! the role, and the frame/symbol indices, so a scenario is bit-exactly
//! reproducible and frames could be evaluated in any order or in
//! parallel with identical results.

pub mod ofdm;

mod capture;

pub use capture::pss_capture_rate;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::codec::{
    self, demodulate_soft, modulate, CodeScheme, CodecError, ModScheme,
};
use crate::grid::{
    build_downlink_grid, build_uplink_grid, CellConfig, Direction, GridError, ReKind, ResourceGrid,
};
use crate::jammer::{self, AttackKind, AttackSpec, JamError, JamPlan};
use crate::rng::substream;
use crate::sequences::{pss_sequence, rs_symbols_for, sss_sequence, SequenceError};
use crate::signal::FrameSignal;

use self::ofdm::{Ofdm, OfdmError};

/// Denial criterion for the control format indicator: its two-bit
/// payload must be rendered pure noise.
pub const DENIAL_BER_PCFICH: f64 = 0.5;
/// Denial criterion for the turbo-coded shared channels.
pub const DENIAL_BLER_SHARED: f64 = 0.1;
/// Denial criterion for the remaining coded channels.
pub const DENIAL_BER_CODED: f64 = 0.1;

/// SINR down to which the rate-1/16 block code decodes reliably; below
/// it the control indicator is effectively denied.
pub const PCFICH_DECODE_LIMIT_SINR_DB: f64 = -1.5;

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Block error rate of the rate-1/16 block code at its decode-limit
/// SINR, from the union bound over the three competitor codewords at
/// Hamming distance 16. Used as the operating-point BLER that marks
/// PCFICH denial in threshold searches.
pub fn pcfich_decode_limit_bler() -> f64 {
    let gamma = 10f64.powf(PCFICH_DECODE_LIMIT_SINR_DB / 10.0);
    3.0 * q_function(4.0 * gamma.sqrt())
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Jam(#[from] JamError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Ofdm(#[from] OfdmError),
    #[error("channel {0} has no link-simulation model")]
    UnsupportedChannel(ReKind),
    #[error("channel {0} not present in the {1} grid")]
    ChannelAbsent(ReKind, Direction),
    #[error("n_frames must be at least 1")]
    NoFrames,
    #[error("one {channel} block spans {needed} frames; raise n_frames")]
    FramesTooFew { channel: ReKind, needed: usize },
    #[error("RS-estimation runs require {0}")]
    Estimation(&'static str),
    #[error(
        "target {target} not bracketed on [{lo_db} dB, {hi_db} dB]: metric reaches {at_lo} at the low end and {at_hi} at the high end"
    )]
    Bracket {
        target: f64,
        lo_db: f64,
        hi_db: f64,
        at_lo: f64,
        at_hi: f64,
    },
}

/// One Monte Carlo trial description.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    pub cfg: CellConfig,
    pub channel: ReKind,
    pub attack: AttackSpec,
    pub js_re_db: f64,
    pub snr_db: f64,
    pub n_frames: usize,
    pub seed: u64,
}

impl LinkScenario {
    /// A scenario with the background SNR at its 10 dB default.
    pub fn new(cfg: CellConfig, channel: ReKind, attack: AttackKind, js_re_db: f64) -> Self {
        LinkScenario {
            cfg,
            channel,
            attack: AttackSpec::new(attack),
            js_re_db,
            snr_db: 10.0,
            n_frames: 10,
            seed: 1,
        }
    }

    pub fn with_snr(mut self, snr_db: f64) -> Self {
        self.snr_db = snr_db;
        self
    }

    pub fn with_frames(mut self, n_frames: usize) -> Self {
        self.n_frames = n_frames;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Measured outcome of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkResult {
    pub ber: f64,
    pub bler: f64,
    pub bits_measured: u64,
    pub denial: bool,
}

/// Target metric for [`find_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdTarget {
    Ber(f64),
    Bler(f64),
}

impl ThresholdTarget {
    fn value(self) -> f64 {
        match self {
            ThresholdTarget::Ber(v) | ThresholdTarget::Bler(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Coding {
    /// Raw symbol decisions; shared channels report BLER through the
    /// turbo threshold model instead of a bit-level codec.
    Uncoded,
    Coded {
        scheme: CodeScheme,
        info_len: usize,
    },
}

#[derive(Debug, Clone, Copy)]
struct ChannelModel {
    mod_scheme: ModScheme,
    coding: Coding,
}

/// Modulation and coding per physical channel. The shared channels are
/// pinned to their interference worst case (QPSK), and PUCCH follows
/// the BPSK operating point its threshold analysis is based on.
fn channel_model(channel: ReKind) -> Option<ChannelModel> {
    let m = |mod_scheme, coding| Some(ChannelModel { mod_scheme, coding });
    match channel {
        ReKind::Pdsch | ReKind::Pusch => m(ModScheme::Qpsk, Coding::Uncoded),
        ReKind::Pbch => m(
            ModScheme::Qpsk,
            Coding::Coded {
                scheme: CodeScheme::PbchR148,
                info_len: 14,
            },
        ),
        ReKind::Pcfich => m(
            ModScheme::Qpsk,
            Coding::Coded {
                scheme: CodeScheme::BlockR116,
                info_len: 2,
            },
        ),
        ReKind::Pdcch => m(
            ModScheme::Qpsk,
            Coding::Coded {
                scheme: CodeScheme::ConvR13,
                info_len: 40,
            },
        ),
        ReKind::Phich => m(
            ModScheme::Bpsk,
            Coding::Coded {
                scheme: CodeScheme::RepetitionR3,
                info_len: 1,
            },
        ),
        ReKind::Pucch => m(
            ModScheme::Bpsk,
            Coding::Coded {
                scheme: CodeScheme::ConvR13,
                info_len: 40,
            },
        ),
        _ => None,
    }
}

struct Engine {
    cfg: CellConfig,
    grid: ResourceGrid,
    model: ChannelModel,
    plan: JamPlan,
    ofdm: Ofdm,
    /// Channel RE positions per frame, symbol-major.
    positions: Vec<(usize, usize)>,
    /// Map (sc, sym) -> index into the per-frame position list.
    pos_index: Vec<u32>,
    /// Symbols that must actually be simulated.
    needed: Vec<bool>,
    pss: Vec<Complex64>,
    sss: Vec<Complex64>,
    /// RS values keyed by (slot, rs symbol slot index).
    rs_values: Vec<Vec<Complex64>>,
    estimation: bool,
    snr_db: f64,
    seed: u64,
}

impl Engine {
    fn new(
        scenario: &LinkScenario,
        estimation: bool,
        custom_plan: Option<JamPlan>,
        simulate_all_columns: bool,
    ) -> Result<Engine, SimError> {
        if scenario.n_frames == 0 {
            return Err(SimError::NoFrames);
        }
        let cfg = scenario.cfg.clone();
        let model =
            channel_model(scenario.channel).ok_or(SimError::UnsupportedChannel(scenario.channel))?;
        let grid = match scenario.channel.direction() {
            Direction::Downlink => build_downlink_grid(&cfg)?,
            Direction::Uplink => build_uplink_grid(&cfg)?,
        };
        let positions = grid.positions(scenario.channel);
        if positions.is_empty() {
            return Err(SimError::ChannelAbsent(scenario.channel, grid.direction()));
        }
        let plan = match custom_plan {
            Some(p) => p,
            None => jammer::plan(&scenario.attack, &grid, scenario.js_re_db, Some(cfg.cell_id))?,
        };

        let n_sc = grid.n_subcarriers();
        let n_symb = grid.n_symbols();
        let mut pos_index = vec![u32::MAX; n_sc * n_symb];
        for (i, &(sc, sym)) in positions.iter().enumerate() {
            pos_index[sym * n_sc + sc] = i as u32;
        }

        // Only symbols that feed a measurement need the OFDM transit;
        // jamming on other columns cannot influence a flat-channel
        // receiver, and skipping them leaves every substream untouched.
        let mut needed = vec![simulate_all_columns; n_symb];
        for &(_, sym) in &positions {
            needed[sym] = true;
        }
        if estimation {
            for slot in 0..cfg.n_slots_per_frame {
                for s in cfg.rs_symbols_in_slot() {
                    needed[slot * cfg.n_symb_per_slot + s] = true;
                }
            }
        }

        let mut rs_values = Vec::with_capacity(cfg.n_slots_per_frame * 2);
        for slot in 0..cfg.n_slots_per_frame {
            for sym_in_slot in cfg.rs_symbols_in_slot() {
                rs_values.push(rs_symbols_for(&cfg, slot, sym_in_slot)?);
            }
        }

        let ofdm = Ofdm::for_bandwidth(n_sc)?;
        Ok(Engine {
            pss: pss_sequence(cfg.pss_selector())?.samples,
            sss: sss_sequence(cfg.cell_id),
            cfg,
            grid,
            model,
            plan,
            ofdm,
            positions,
            pos_index,
            needed,
            estimation,
            snr_db: scenario.snr_db,
            seed: scenario.seed,
        })
    }

    fn rs_value(&self, slot: usize, sym_in_slot: usize, sc: usize) -> Complex64 {
        let comb = (sym_in_slot == 4) as usize;
        let shift = self.cfg.rs_shift(sym_in_slot);
        self.rs_values[slot * 2 + comb][(sc - shift) / 6]
    }

    /// Assembles the transmitted frequency-domain frame. `payload` is
    /// this frame's slice of the channel symbol stream.
    fn tx_frame(&self, frame: usize, payload: &[Complex64]) -> FrameSignal {
        let n_sc = self.grid.n_subcarriers();
        let mut tx = FrameSignal::zeros(n_sc, self.grid.n_symbols());
        let sync_start = self.cfg.center_start(63);
        let channel = self.positions.first().map(|_| ());
        let _ = channel;
        for sym in 0..self.grid.n_symbols() {
            if !self.needed[sym] {
                continue;
            }
            let slot = sym / self.cfg.n_symb_per_slot;
            let sym_in_slot = sym % self.cfg.n_symb_per_slot;
            let mut bg = substream(self.seed, "bg", frame as u64, sym as u64);
            for sc in 0..n_sc {
                let kind = self.grid.kind_at(sc, sym);
                let idx = self.pos_index[sym * n_sc + sc];
                let v = if idx != u32::MAX {
                    payload[idx as usize]
                } else {
                    match kind {
                        ReKind::Unused => Complex64::default(),
                        ReKind::Rs => self.rs_value(slot, sym_in_slot, sc),
                        ReKind::Pss => self.pss[(sc - sync_start) % self.pss.len()],
                        ReKind::Sss => {
                            // The 63rd accounting RE carries a unit filler.
                            let i = sc - sync_start;
                            if i < self.sss.len() {
                                self.sss[i]
                            } else {
                                Complex64::new(1.0, 0.0)
                            }
                        }
                        _ => {
                            let bits = [bg.gen_range(0..2u8), bg.gen_range(0..2u8)];
                            ModScheme::Qpsk.map_symbol(&bits)
                        }
                    }
                };
                tx.set(sc, sym, v);
            }
        }
        tx
    }

    /// Jam injection, OFDM transit and additive noise for one frame.
    fn rx_frame(&self, frame: usize, tx: &FrameSignal) -> Result<FrameSignal, SimError> {
        let mut jam_rng = substream(self.seed, "jam", frame as u64, 0);
        let mut rx = jammer::inject(&self.plan, tx, &mut jam_rng)?;
        let noise_var = 10f64.powf(-self.snr_db / 10.0);
        let normal = Normal::new(0.0, (noise_var / 2.0).sqrt()).expect("finite sigma");
        for sym in 0..self.grid.n_symbols() {
            if !self.needed[sym] {
                continue;
            }
            let mut time = self.ofdm.modulate(rx.symbol(sym))?;
            let mut nrng = substream(self.seed, "noise", frame as u64, sym as u64);
            for s in time.iter_mut() {
                *s += Complex64::new(normal.sample(&mut nrng), normal.sample(&mut nrng));
            }
            let freq = self.ofdm.demodulate(&time)?;
            rx.symbol_mut(sym).copy_from_slice(&freq);
        }
        Ok(rx)
    }

    /// Channel estimate per slot from the received RS, least squares at
    /// the RS positions with linear interpolation between them.
    fn slot_channel_profile(&self, rx: &FrameSignal, slot: usize) -> Vec<(usize, Complex64)> {
        let mut prof = Vec::with_capacity(4 * self.cfg.n_rb);
        for sym_in_slot in self.cfg.rs_symbols_in_slot() {
            let sym = slot * self.cfg.n_symb_per_slot + sym_in_slot;
            for sc in self.cfg.rs_subcarriers(sym_in_slot) {
                let known = self.rs_value(slot, sym_in_slot, sc);
                prof.push((sc, rx.get(sc, sym) / known));
            }
        }
        prof.sort_by_key(|&(sc, _)| sc);
        prof
    }
}

fn interpolate_profile(prof: &[(usize, Complex64)], sc: usize) -> Complex64 {
    match prof.binary_search_by_key(&sc, |&(p, _)| p) {
        Ok(i) => prof[i].1,
        Err(0) => prof[0].1,
        Err(i) if i == prof.len() => prof[prof.len() - 1].1,
        Err(i) => {
            let (x0, h0) = prof[i - 1];
            let (x1, h1) = prof[i];
            let w = (sc - x0) as f64 / (x1 - x0) as f64;
            h0 * (1.0 - w) + h1 * w
        }
    }
}

fn hard_bit(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

fn simulate(
    scenario: &LinkScenario,
    estimation: bool,
    custom_plan: Option<JamPlan>,
) -> Result<LinkResult, SimError> {
    let engine = Engine::new(scenario, estimation, custom_plan, false)?;
    let model = engine.model;
    let bps = model.mod_scheme.bits_per_symbol();
    let per_frame = engine.positions.len();
    let total_slots = per_frame * scenario.n_frames;

    // Payload: either raw bits on every channel RE, or whole coded
    // blocks streamed across the frame sequence with modulated filler
    // on the tail.
    let mut payload_rng = substream(scenario.seed, "payload", 0, 0);
    let (truth_bits, tx_symbols, syms_per_block, info_len) = match model.coding {
        Coding::Uncoded => {
            let bits: Vec<u8> = (0..total_slots * bps)
                .map(|_| payload_rng.gen_range(0..2u8))
                .collect();
            let syms = modulate(&bits, model.mod_scheme)?;
            (bits, syms, 0, 0)
        }
        Coding::Coded { scheme, info_len } => {
            let coded_len = scheme.coded_len(info_len)?;
            debug_assert_eq!(coded_len % bps, 0);
            let spb = coded_len / bps;
            let n_blocks = total_slots / spb;
            if n_blocks == 0 {
                return Err(SimError::FramesTooFew {
                    channel: scenario.channel,
                    needed: spb.div_ceil(per_frame),
                });
            }
            let mut bits = Vec::with_capacity(n_blocks * info_len);
            let mut syms = Vec::with_capacity(total_slots);
            for _ in 0..n_blocks {
                let block: Vec<u8> = (0..info_len).map(|_| payload_rng.gen_range(0..2u8)).collect();
                let coded = codec::encode(&block, scheme)?;
                syms.extend(modulate(&coded, model.mod_scheme)?);
                bits.extend(block);
            }
            let mut filler_rng = substream(scenario.seed, "filler", 0, 0);
            while syms.len() < total_slots {
                let b: Vec<u8> = (0..bps).map(|_| filler_rng.gen_range(0..2u8)).collect();
                syms.extend(modulate(&b, model.mod_scheme)?);
            }
            (bits, syms, spb, info_len)
        }
    };

    // Per-frame transit; received channel symbols collect in stream
    // order. Interference-plus-noise power is measured against the
    // known transmitted symbols.
    let mut rx_symbols = Vec::with_capacity(total_slots);
    let mut err_power = 0.0;
    for frame in 0..scenario.n_frames {
        let payload = &tx_symbols[frame * per_frame..(frame + 1) * per_frame];
        let tx = engine.tx_frame(frame, payload);
        let rx = engine.rx_frame(frame, &tx)?;

        if estimation {
            let mut profiles: Vec<Option<Vec<(usize, Complex64)>>> =
                vec![None; engine.cfg.n_slots_per_frame];
            for (i, &(sc, sym)) in engine.positions.iter().enumerate() {
                let slot = sym / engine.cfg.n_symb_per_slot;
                let prof = profiles[slot]
                    .get_or_insert_with(|| engine.slot_channel_profile(&rx, slot));
                let h = interpolate_profile(prof, sc);
                let eq = rx.get(sc, sym) / h;
                err_power += (eq - payload[i]).norm_sqr();
                rx_symbols.push(eq);
            }
        } else {
            for (i, &(sc, sym)) in engine.positions.iter().enumerate() {
                let v = rx.get(sc, sym);
                err_power += (v - payload[i]).norm_sqr();
                rx_symbols.push(v);
            }
        }
    }

    let noise_var = 10f64.powf(-scenario.snr_db / 10.0).max(1e-300);
    let llrs = demodulate_soft(&rx_symbols, model.mod_scheme, noise_var)?;
    let effective_sinr_db = -10.0 * (err_power / total_slots as f64).max(1e-300).log10();

    let (ber, bler, bits_measured) = match model.coding {
        Coding::Uncoded => {
            let errors = llrs
                .iter()
                .zip(&truth_bits)
                .filter(|(&l, &b)| hard_bit(l) != b)
                .count();
            let ber = errors as f64 / truth_bits.len() as f64;
            let bler = codec::turbo_threshold(scenario.channel, effective_sinr_db)?;
            (ber, bler, truth_bits.len() as u64)
        }
        Coding::Coded { scheme, .. } => {
            let llrs_per_block = syms_per_block * bps;
            let n_blocks = truth_bits.len() / info_len;
            let mut bit_errors = 0usize;
            let mut block_errors = 0usize;
            for b in 0..n_blocks {
                let slice = &llrs[b * llrs_per_block..(b + 1) * llrs_per_block];
                let (decoded, _pass) = codec::decode(slice, scheme)?;
                let truth = &truth_bits[b * info_len..(b + 1) * info_len];
                let errs = decoded
                    .iter()
                    .zip(truth)
                    .filter(|(a, b)| a != b)
                    .count();
                bit_errors += errs;
                block_errors += usize::from(errs > 0);
            }
            (
                bit_errors as f64 / (n_blocks * info_len) as f64,
                block_errors as f64 / n_blocks as f64,
                (n_blocks * info_len) as u64,
            )
        }
    };

    let denial = match scenario.channel {
        ReKind::Pcfich => ber >= DENIAL_BER_PCFICH,
        ReKind::Pdsch | ReKind::Pusch => bler >= DENIAL_BLER_SHARED,
        _ => ber >= DENIAL_BER_CODED,
    };

    Ok(LinkResult {
        ber,
        bler,
        bits_measured,
        denial,
    })
}

/// Runs a scenario with ideal (flat, known) channel knowledge.
pub fn run(scenario: &LinkScenario) -> Result<LinkResult, SimError> {
    simulate(scenario, false, None)
}

/// Runs a downlink shared-channel scenario with the equalizer driven by
/// the received reference signals, so RS corruption degrades every data
/// decision. Restricted to the attacks that exercise that path.
pub fn run_rs_estimation(scenario: &LinkScenario) -> Result<LinkResult, SimError> {
    if scenario.channel != ReKind::Pdsch {
        return Err(SimError::Estimation("the PDSCH as channel under test"));
    }
    if !matches!(scenario.attack.kind, AttackKind::RsJam | AttackKind::Barrage) {
        return Err(SimError::Estimation("an RS-coupled attack (rs or barrage)"));
    }
    simulate(scenario, true, None)
}

/// Runs a scenario against an explicit jam plan (e.g. a custom target
/// set for comparison experiments), optionally with RS-driven
/// equalization.
pub fn run_with_plan(
    scenario: &LinkScenario,
    plan: JamPlan,
    estimation: bool,
) -> Result<LinkResult, SimError> {
    simulate(scenario, estimation, Some(plan))
}

/// Mean measured interference-plus-noise power per RE relative to unit
/// signal power, over every symbol of `n_frames` frames.
pub fn measured_interference_power(scenario: &LinkScenario) -> Result<f64, SimError> {
    let engine = Engine::new(scenario, false, None, true)?;
    let model = engine.model;
    let bps = model.mod_scheme.bits_per_symbol();
    let per_frame = engine.positions.len();
    let mut payload_rng = substream(scenario.seed, "payload", 0, 0);
    let bits: Vec<u8> = (0..per_frame * scenario.n_frames * bps)
        .map(|_| payload_rng.gen_range(0..2u8))
        .collect();
    let syms = modulate(&bits, model.mod_scheme)?;

    let mut acc = 0.0;
    let mut n = 0usize;
    for frame in 0..scenario.n_frames {
        let payload = &syms[frame * per_frame..(frame + 1) * per_frame];
        let tx = engine.tx_frame(frame, payload);
        let rx = engine.rx_frame(frame, &tx)?;
        for sym in 0..engine.grid.n_symbols() {
            for sc in 0..engine.grid.n_subcarriers() {
                acc += (rx.get(sc, sym) - tx.get(sc, sym)).norm_sqr();
                n += 1;
            }
        }
    }
    Ok(acc / n as f64)
}

/// Threshold searches use RS-driven estimation exactly when the attack
/// mechanism requires it.
fn threshold_uses_estimation(scenario: &LinkScenario) -> bool {
    scenario.attack.kind == AttackKind::RsJam && scenario.channel == ReKind::Pdsch
}

fn probe_frames(
    template: &LinkScenario,
    target: ThresholdTarget,
) -> Result<usize, SimError> {
    const MIN_BITS: f64 = 2e4;
    const MIN_ERRORS_AT_TARGET: f64 = 40.0;
    let model =
        channel_model(template.channel).ok_or(SimError::UnsupportedChannel(template.channel))?;
    let grid = match template.channel.direction() {
        Direction::Downlink => build_downlink_grid(&template.cfg)?,
        Direction::Uplink => build_uplink_grid(&template.cfg)?,
    };
    let per_frame = grid.re_count(template.channel).max(1);
    let bps = model.mod_scheme.bits_per_symbol();
    let frames = match model.coding {
        Coding::Uncoded => (MIN_BITS / (per_frame * bps) as f64).ceil() as usize,
        Coding::Coded { scheme, info_len } => {
            let spb = scheme.coded_len(info_len)? / bps;
            let mut blocks = MIN_BITS / info_len as f64;
            if let ThresholdTarget::Bler(t) = target {
                blocks = blocks.max(MIN_ERRORS_AT_TARGET / t);
            }
            (blocks.ceil() as usize * spb).div_ceil(per_frame)
        }
    };
    Ok(frames.max(1).max(template.n_frames))
}

/// Bisects the J/S over the targeted REs to 0.25 dB for the smallest
/// value whose smoothed Monte Carlo metric reaches `target`, over the
/// bracket [-20, +30] dB. Errors with the achieved extremes when the
/// target is unreachable.
pub fn find_threshold(
    template: &LinkScenario,
    target: ThresholdTarget,
) -> Result<f64, SimError> {
    const LO: f64 = -20.0;
    const HI: f64 = 30.0;
    const RESOLUTION: f64 = 0.25;

    let estimation = threshold_uses_estimation(template);
    let n_frames = probe_frames(template, target)?;
    let probe = |js: f64| -> Result<f64, SimError> {
        let mut s = template.clone();
        s.js_re_db = js;
        s.n_frames = n_frames;
        let r = simulate(&s, estimation, None)?;
        Ok(match target {
            ThresholdTarget::Ber(_) => r.ber,
            ThresholdTarget::Bler(_) => r.bler,
        })
    };

    let t = target.value();
    let at_lo = probe(LO)?;
    if at_lo >= t {
        return Ok(LO);
    }
    let at_hi = probe(HI)?;
    if at_hi < t {
        return Err(SimError::Bracket {
            target: t,
            lo_db: LO,
            hi_db: HI,
            at_lo,
            at_hi,
        });
    }
    let (mut lo, mut hi) = (LO, HI);
    while hi - lo > RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// BER of a modulation/coding pair on a plain AWGN channel at a given
/// Eb/N0 (rate and tail overhead folded into the per-bit energy).
pub fn awgn_ber(
    mod_scheme: ModScheme,
    coding: Option<(CodeScheme, usize)>,
    ebn0_db: f64,
    min_info_bits: usize,
    seed: u64,
) -> Result<f64, SimError> {
    let bps = mod_scheme.bits_per_symbol();
    let (rate, info_len) = match coding {
        None => (1.0, 1000),
        Some((scheme, info_len)) => (
            info_len as f64 / scheme.coded_len(info_len)? as f64,
            info_len,
        ),
    };
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let noise_var = 1.0 / (ebn0 * bps as f64 * rate);
    let normal = Normal::new(0.0, (noise_var / 2.0).sqrt()).expect("finite sigma");

    let mut rng = substream(seed, "awgn-ber", ebn0_db.to_bits(), 0);
    let mut bit_errors = 0usize;
    let mut bits_done = 0usize;
    while bits_done < min_info_bits {
        let info: Vec<u8> = (0..info_len).map(|_| rng.gen_range(0..2u8)).collect();
        let coded = match coding {
            None => info.clone(),
            Some((scheme, _)) => codec::encode(&info, scheme)?,
        };
        let mut symbols = modulate(&coded, mod_scheme)?;
        for s in symbols.iter_mut() {
            *s += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
        let llrs = demodulate_soft(&symbols, mod_scheme, noise_var)?;
        let decoded = match coding {
            None => llrs.iter().map(|&l| hard_bit(l)).collect(),
            Some((scheme, _)) => codec::decode(&llrs, scheme)?.0,
        };
        bit_errors += decoded.iter().zip(&info).filter(|(a, b)| a != b).count();
        bits_done += info_len;
    }
    Ok(bit_errors as f64 / bits_done as f64)
}

/// The Eb/N0 (dB) at which the pair's BER falls to `target_ber`,
/// bisected to 0.05 dB over `[lo_db, hi_db]`.
pub fn awgn_ber_threshold(
    mod_scheme: ModScheme,
    coding: Option<(CodeScheme, usize)>,
    target_ber: f64,
    lo_db: f64,
    hi_db: f64,
    min_info_bits: usize,
    seed: u64,
) -> Result<f64, SimError> {
    let probe = |db: f64| awgn_ber(mod_scheme, coding, db, min_info_bits, seed);
    let at_lo = probe(lo_db)?;
    let at_hi = probe(hi_db)?;
    if at_lo <= target_ber || at_hi > target_ber {
        return Err(SimError::Bracket {
            target: target_ber,
            lo_db,
            hi_db,
            at_lo,
            at_hi,
        });
    }
    let (mut lo, mut hi) = (lo_db, hi_db);
    while hi - lo > 0.05 {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? <= target_ber {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jammer::JamWaveform;

    fn pdsch_scenario(js: f64) -> LinkScenario {
        LinkScenario::new(
            CellConfig::default(),
            ReKind::Pdsch,
            AttackKind::Barrage,
            js,
        )
    }

    #[test]
    fn clean_link_has_zero_ber() {
        let s = pdsch_scenario(f64::NEG_INFINITY)
            .with_snr(40.0)
            .with_frames(10);
        let r = run(&s).unwrap();
        assert_eq!(r.ber, 0.0);
        assert!(!r.denial);
        assert!(r.bits_measured > 1_000_000);
    }

    #[test]
    fn results_are_bit_identical_for_equal_scenarios() {
        let s = pdsch_scenario(-3.0).with_frames(2).with_seed(99);
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uncoded_qpsk_matches_the_q_function_anchor() {
        // BER 0.1 for uncoded QPSK at Eb/N0 = (invQ(0.1))^2 / 2, i.e.
        // -0.855 dB; run with the SNR set to the matching per-symbol
        // SINR of 2.155 dB.
        let s = pdsch_scenario(f64::NEG_INFINITY)
            .with_snr(2.155)
            .with_frames(2);
        let r = run(&s).unwrap();
        assert!(
            (r.ber - 0.1).abs() < 0.015,
            "uncoded QPSK anchor: ber {}",
            r.ber
        );
    }

    #[test]
    fn pcfich_under_heavy_jamming_is_pure_noise() {
        let s = LinkScenario::new(
            CellConfig::default(),
            ReKind::Pcfich,
            AttackKind::PcfichJam,
            20.0,
        )
        .with_frames(100);
        let r = run(&s).unwrap();
        assert!(
            (r.ber - 0.5).abs() < 0.05,
            "PCFICH at +20 dB: ber {}",
            r.ber
        );
        assert!(r.denial || r.ber >= 0.45);
    }

    #[test]
    fn unsupported_channel_errors() {
        let s = LinkScenario::new(
            CellConfig::default(),
            ReKind::Prach,
            AttackKind::PucchJam,
            0.0,
        );
        assert!(matches!(
            run(&s),
            Err(SimError::UnsupportedChannel(ReKind::Prach))
        ));
    }

    #[test]
    fn energy_accounting_holds_for_barrage() {
        let s = pdsch_scenario(0.0).with_snr(10.0).with_frames(1);
        let measured = measured_interference_power(&s).unwrap();
        let expected = 10f64.powf(-1.0) + 1.0;
        assert!(
            (measured / expected - 1.0).abs() < 0.03,
            "measured {measured}, expected {expected}"
        );
    }

    #[test]
    fn ber_is_monotone_in_jam_power() {
        let points: Vec<f64> = (-2..3)
            .map(|i| {
                let s = pdsch_scenario(f64::from(i) * 4.0).with_frames(1);
                run(&s).unwrap().ber
            })
            .collect();
        for w in points.windows(2) {
            // One-sigma slack on ~150k bits.
            assert!(w[1] >= w[0] - 0.002, "{points:?}");
        }
    }

    #[test]
    fn rs_estimation_matches_ideal_when_clean() {
        let s = pdsch_scenario(f64::NEG_INFINITY).with_frames(3);
        let ideal = run(&s).unwrap();
        let est = run_rs_estimation(&s).unwrap();
        // Local least-squares estimation carries a small noise penalty;
        // the link stays effectively clean.
        assert!(est.ber < 0.02, "estimated-channel ber {}", est.ber);
        assert!(est.ber + 1e-9 >= ideal.ber);
    }

    #[test]
    fn rs_estimation_guards_its_preconditions() {
        let s = LinkScenario::new(
            CellConfig::default(),
            ReKind::Pcfich,
            AttackKind::RsJam,
            0.0,
        );
        assert!(matches!(
            run_rs_estimation(&s),
            Err(SimError::Estimation(_))
        ));
        let s = LinkScenario::new(
            CellConfig::default(),
            ReKind::Pdsch,
            AttackKind::PssSpoof,
            0.0,
        );
        assert!(matches!(
            run_rs_estimation(&s),
            Err(SimError::Estimation(_))
        ));
    }

    #[test]
    fn rs_jamming_beats_data_jamming_at_equal_power() {
        let cfg = CellConfig::default();
        let js = 8.22;
        let rs = LinkScenario::new(cfg.clone(), ReKind::Pdsch, AttackKind::RsJam, js)
            .with_frames(20)
            .with_seed(5);
        let rs_ber = run_rs_estimation(&rs).unwrap().ber;

        // Same RE count and per-RE power on data-only REs.
        let grid = build_downlink_grid(&cfg).unwrap();
        let n_targets = grid.re_count(ReKind::Rs);
        let mut rng = substream(5, "data-target", 0, 0);
        let pdsch = grid.positions(ReKind::Pdsch);
        let mut target: Vec<(usize, usize)> = (0..n_targets)
            .map(|_| pdsch[rng.gen_range(0..pdsch.len())])
            .collect();
        target.sort_unstable_by_key(|&(sc, sym)| (sym, sc));
        target.dedup();
        let plan = JamPlan::custom(target, JamWaveform::GaussianNoise, js, &grid);
        let data_ber = run_with_plan(&rs, plan, true).unwrap().ber;

        assert!(
            rs_ber > data_ber,
            "rs jamming {rs_ber} vs data jamming {data_ber}"
        );
    }

    #[test]
    fn threshold_bracket_failure_names_the_extremes() {
        // Raw QPSK never reaches BER 0.5 under finite jamming.
        let template = pdsch_scenario(0.0).with_frames(1);
        let err = find_threshold(&template, ThresholdTarget::Ber(0.5)).unwrap_err();
        match err {
            SimError::Bracket { at_lo, at_hi, .. } => {
                assert!(at_lo < 0.01);
                assert!(at_hi > 0.4 && at_hi < 0.5);
            }
            other => panic!("expected bracket error, got {other}"),
        }
    }

    #[test]
    fn phich_threshold_matches_the_awgn_oracle() {
        // Majority-vote repetition-3 over BPSK reaches BER 0.1 at chip
        // BER 0.1958, i.e. SINR 0.3672 -> J/S = 1/0.3672 - 0.1 = +4.19 dB
        // at 10 dB background SNR.
        let template = LinkScenario::new(
            CellConfig::default(),
            ReKind::Phich,
            AttackKind::Barrage,
            0.0,
        );
        let js = find_threshold(&template, ThresholdTarget::Ber(0.1)).unwrap();
        assert!(
            (js - 4.19).abs() < 1.0,
            "PHICH BER-0.1 threshold {js} dB vs oracle 4.19 dB"
        );
    }

    #[test]
    fn decode_limit_constant_matches_its_formula() {
        let bler = pcfich_decode_limit_bler();
        assert!((bler - 1.15e-3).abs() < 0.05e-3, "decode-limit BLER {bler}");
    }
}
