//! The six jamming attacks: target resource-element rules, waveforms,
//! and synchronization/complexity metadata.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Direction, ReKind, ResourceGrid};
use crate::sequences::{zadoff_chu, PSS_LEN, PSS_ROOTS};
use crate::signal::FrameSignal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JamError {
    #[error("attack {attack} targets the {expected}, got a {got} grid")]
    DirectionMismatch {
        attack: AttackKind,
        expected: Direction,
        got: Direction,
    },
    #[error("attack {0} requires PSS/SSS synchronization: provide the target cell_id")]
    SyncRequired(AttackKind),
    #[error("plan built for {plan_sc}x{plan_symb}, signal grid is {got_sc}x{got_symb}")]
    Shape {
        plan_sc: usize,
        plan_symb: usize,
        got_sc: usize,
        got_symb: usize,
    },
}

/// The attack taxonomy of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackKind {
    Barrage,
    RsJam,
    Center6Rb,
    PssSpoof,
    PcfichJam,
    PucchJam,
}

impl AttackKind {
    pub const ALL: [AttackKind; 6] = [
        AttackKind::Barrage,
        AttackKind::RsJam,
        AttackKind::Center6Rb,
        AttackKind::PssSpoof,
        AttackKind::PcfichJam,
        AttackKind::PucchJam,
    ];

    /// Stable identifier used in configs and on the CLI.
    pub fn id(self) -> &'static str {
        match self {
            AttackKind::Barrage => "barrage",
            AttackKind::RsJam => "rs",
            AttackKind::Center6Rb => "center6rb",
            AttackKind::PssSpoof => "pss-spoof",
            AttackKind::PcfichJam => "pcfich",
            AttackKind::PucchJam => "pucch",
        }
    }

    pub fn parse(s: &str) -> Option<AttackKind> {
        Self::ALL.into_iter().find(|k| k.id() == s)
    }

    /// Human-readable name matching the comparison table rows.
    pub fn label(self) -> &'static str {
        match self {
            AttackKind::Barrage => "Barrage Jamming",
            AttackKind::RsJam => "RS Jamming",
            AttackKind::Center6Rb => "Center 6 Resource Blocks Jamming",
            AttackKind::PssSpoof => "PSS Spoofing",
            AttackKind::PcfichJam => "PCFICH Jamming",
            AttackKind::PucchJam => "PUCCH Jamming",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            AttackKind::PucchJam => Direction::Uplink,
            _ => Direction::Downlink,
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Whether the jammer must first synchronize to the cell's PSS/SSS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyncRequirement {
    None,
    PssSssSync,
}

/// Relative implementation effort of an attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Complexity {
    VeryLow,
    Low,
    Medium,
    High,
}

impl Complexity {
    pub fn label(self) -> &'static str {
        match self {
            Complexity::VeryLow => "Very Low",
            Complexity::Low => "Low",
            Complexity::Medium => "Medium",
            Complexity::High => "High",
        }
    }
}

/// One attack plus its fixed metadata and duty-cycle knob.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub sync: SyncRequirement,
    pub complexity: Complexity,
    /// Fraction of targeted REs actually energized.
    pub duty: f64,
}

impl AttackSpec {
    pub fn new(kind: AttackKind) -> Self {
        let (sync, complexity) = match kind {
            AttackKind::Barrage => (SyncRequirement::None, Complexity::VeryLow),
            AttackKind::RsJam => (SyncRequirement::PssSssSync, Complexity::High),
            AttackKind::Center6Rb => (SyncRequirement::None, Complexity::VeryLow),
            AttackKind::PssSpoof => (SyncRequirement::None, Complexity::Medium),
            AttackKind::PcfichJam => (SyncRequirement::PssSssSync, Complexity::High),
            AttackKind::PucchJam => (SyncRequirement::None, Complexity::Low),
        };
        AttackSpec {
            kind,
            sync,
            complexity,
            duty: 1.0,
        }
    }

    pub fn with_duty(mut self, duty: f64) -> Self {
        self.duty = duty;
        self
    }
}

/// Energy pattern transmitted on the targeted REs.
#[derive(Debug, Clone, PartialEq)]
pub enum JamWaveform {
    GaussianNoise,
    /// All listed roots transmitted as frequency-domain ZC sequences.
    ZcSpoof(Vec<u32>),
}

/// A resolved attack: concrete target set, waveform and power.
#[derive(Debug, Clone, PartialEq)]
pub struct JamPlan {
    target: Vec<(usize, usize)>,
    waveform: JamWaveform,
    js_re_db: f64,
    duty: f64,
    n_sc: usize,
    n_symb: usize,
    /// The spoof attack transmits several sequences over the same REs;
    /// the comparison table counts each transmission separately.
    accounting_factor: usize,
}

impl JamPlan {
    /// A plan over an explicit RE set, for what-if exploration beyond
    /// the six named attacks.
    pub fn custom(
        target: Vec<(usize, usize)>,
        waveform: JamWaveform,
        js_re_db: f64,
        grid: &ResourceGrid,
    ) -> Self {
        JamPlan {
            target,
            waveform,
            js_re_db,
            duty: 1.0,
            n_sc: grid.n_subcarriers(),
            n_symb: grid.n_symbols(),
            accounting_factor: 1,
        }
    }

    pub fn target(&self) -> &[(usize, usize)] {
        &self.target
    }

    pub fn js_re_db(&self) -> f64 {
        self.js_re_db
    }

    pub fn waveform(&self) -> &JamWaveform {
        &self.waveform
    }

    /// RE count as reported in the comparison table (three sequences
    /// for the spoof attack, the physical target size otherwise).
    pub fn accounting_re_count(&self) -> usize {
        self.target.len() * self.accounting_factor
    }

    /// Per-RE jam power relative to unit signal power.
    pub fn power(&self) -> f64 {
        10f64.powf(self.js_re_db / 10.0)
    }
}

/// Table default minimum J/S over the targeted REs, in dB.
pub fn default_jsre(kind: AttackKind) -> f64 {
    match kind {
        AttackKind::Barrage => -2.0,
        AttackKind::RsJam => 4.0,
        AttackKind::Center6Rb => -2.0,
        AttackKind::PssSpoof => 3.0,
        AttackKind::PcfichJam => 1.5,
        AttackKind::PucchJam => -2.0,
    }
}

/// Resolves an attack against a built grid.
///
/// Attacks whose `sync` requirement is [`SyncRequirement::PssSssSync`]
/// model a jammer that must first recover the cell identity from the
/// synchronization signals; planning them without a `known_cell_id` is
/// an error.
pub fn plan(
    attack: &AttackSpec,
    grid: &ResourceGrid,
    js_re_db: f64,
    known_cell_id: Option<u16>,
) -> Result<JamPlan, JamError> {
    let expected = attack.kind.direction();
    if grid.direction() != expected {
        return Err(JamError::DirectionMismatch {
            attack: attack.kind,
            expected,
            got: grid.direction(),
        });
    }
    if attack.sync == SyncRequirement::PssSssSync && known_cell_id.is_none() {
        return Err(JamError::SyncRequired(attack.kind));
    }

    let (target, waveform, accounting_factor) = match attack.kind {
        AttackKind::Barrage => {
            let mut t = Vec::with_capacity(grid.total_res());
            for sym in 0..grid.n_symbols() {
                for sc in 0..grid.n_subcarriers() {
                    t.push((sc, sym));
                }
            }
            (t, JamWaveform::GaussianNoise, 1)
        }
        AttackKind::RsJam => (grid.positions(ReKind::Rs), JamWaveform::GaussianNoise, 1),
        AttackKind::Center6Rb => (
            grid.center_region_res().expect("downlink checked above"),
            JamWaveform::GaussianNoise,
            1,
        ),
        AttackKind::PssSpoof => (
            grid.positions(ReKind::Pss),
            JamWaveform::ZcSpoof(PSS_ROOTS.to_vec()),
            PSS_ROOTS.len(),
        ),
        AttackKind::PcfichJam => (grid.positions(ReKind::Pcfich), JamWaveform::GaussianNoise, 1),
        AttackKind::PucchJam => (grid.positions(ReKind::Pucch), JamWaveform::GaussianNoise, 1),
    };

    Ok(JamPlan {
        target,
        waveform,
        js_re_db,
        duty: attack.duty,
        n_sc: grid.n_subcarriers(),
        n_symb: grid.n_symbols(),
        accounting_factor,
    })
}

/// Adds the jamming waveform to a frequency-domain frame.
///
/// Gaussian plans add circular noise at `10^(js_re/10)` per-RE power
/// relative to unit signal power; spoof plans add each root sequence at
/// that power with a random phase per (root, symbol). REs outside the
/// target are untouched.
pub fn inject<R: Rng>(
    plan: &JamPlan,
    signal_grid: &FrameSignal,
    rng: &mut R,
) -> Result<FrameSignal, JamError> {
    if signal_grid.n_subcarriers() != plan.n_sc || signal_grid.n_symbols() != plan.n_symb {
        return Err(JamError::Shape {
            plan_sc: plan.n_sc,
            plan_symb: plan.n_symb,
            got_sc: signal_grid.n_subcarriers(),
            got_symb: signal_grid.n_symbols(),
        });
    }
    let mut out = signal_grid.clone();
    let power = plan.power();

    // Duty gating draws happen first, in canonical target order, so the
    // energized subset is independent of the waveform draws.
    let energized: Vec<(usize, usize)> = if plan.duty < 1.0 {
        plan.target
            .iter()
            .copied()
            .filter(|_| rng.gen::<f64>() < plan.duty)
            .collect()
    } else {
        plan.target.clone()
    };

    match &plan.waveform {
        JamWaveform::GaussianNoise => {
            let sigma = (power / 2.0).sqrt();
            let normal = Normal::new(0.0, sigma).expect("sigma finite");
            for (sc, sym) in energized {
                let z = Complex64::new(normal.sample(rng), normal.sample(rng));
                out.add(sc, sym, z);
            }
        }
        JamWaveform::ZcSpoof(roots) => {
            let amplitude = power.sqrt();
            let mut by_symbol: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (sc, sym) in energized {
                by_symbol.entry(sym).or_default().push(sc);
            }
            for (sym, mut scs) in by_symbol {
                scs.sort_unstable();
                for &root in roots {
                    let seq = zadoff_chu(root, PSS_LEN).expect("PSS roots are valid");
                    let phase = Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
                    for (i, &sc) in scs.iter().enumerate() {
                        let sample = seq.samples[i % PSS_LEN];
                        out.add(sc, sym, sample * amplitude * phase);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_downlink_grid, build_uplink_grid, CellConfig};
    use crate::rng::substream;

    fn dl() -> ResourceGrid {
        build_downlink_grid(&CellConfig::default()).unwrap()
    }

    #[test]
    fn metadata_matches_the_comparison_table() {
        let cases = [
            (AttackKind::Barrage, SyncRequirement::None, Complexity::VeryLow),
            (AttackKind::RsJam, SyncRequirement::PssSssSync, Complexity::High),
            (AttackKind::Center6Rb, SyncRequirement::None, Complexity::VeryLow),
            (AttackKind::PssSpoof, SyncRequirement::None, Complexity::Medium),
            (AttackKind::PcfichJam, SyncRequirement::PssSssSync, Complexity::High),
            (AttackKind::PucchJam, SyncRequirement::None, Complexity::Low),
        ];
        for (kind, sync, complexity) in cases {
            let spec = AttackSpec::new(kind);
            assert_eq!(spec.sync, sync, "{kind}");
            assert_eq!(spec.complexity, complexity, "{kind}");
            assert_eq!(spec.duty, 1.0);
        }
    }

    #[test]
    fn census_matches_the_comparison_table() {
        let dl = dl();
        let ul = build_uplink_grid(&CellConfig::default()).unwrap();
        let expect = [
            (AttackKind::Barrage, 84000),
            (AttackKind::RsJam, 4000),
            (AttackKind::Center6Rb, 10080),
            (AttackKind::PssSpoof, 378),
            (AttackKind::PcfichJam, 160),
            (AttackKind::PucchJam, 21000),
        ];
        for (kind, n) in expect {
            let grid = if kind == AttackKind::PucchJam { &ul } else { &dl };
            let plan = plan(&AttackSpec::new(kind), grid, default_jsre(kind), Some(0)).unwrap();
            assert_eq!(plan.accounting_re_count(), n, "{kind}");
        }
    }

    #[test]
    fn spoof_counts_three_sequences_over_the_physical_region() {
        let plan = plan(&AttackSpec::new(AttackKind::PssSpoof), &dl(), 3.0, None).unwrap();
        assert_eq!(plan.target().len(), 126);
        assert_eq!(plan.accounting_re_count(), 378);
    }

    #[test]
    fn default_jsre_values() {
        assert_eq!(default_jsre(AttackKind::Barrage), -2.0);
        assert_eq!(default_jsre(AttackKind::RsJam), 4.0);
        assert_eq!(default_jsre(AttackKind::PcfichJam), 1.5);
        assert_eq!(default_jsre(AttackKind::PssSpoof), 3.0);
    }

    #[test]
    fn direction_mismatch_is_an_error() {
        let ul = build_uplink_grid(&CellConfig::default()).unwrap();
        let err = plan(&AttackSpec::new(AttackKind::Barrage), &ul, 0.0, None).unwrap_err();
        assert!(matches!(err, JamError::DirectionMismatch { .. }));
        let err = plan(&AttackSpec::new(AttackKind::PucchJam), &dl(), 0.0, None).unwrap_err();
        assert!(matches!(err, JamError::DirectionMismatch { .. }));
    }

    #[test]
    fn sync_attacks_require_cell_id() {
        for kind in [AttackKind::RsJam, AttackKind::PcfichJam] {
            let err = plan(&AttackSpec::new(kind), &dl(), 0.0, None).unwrap_err();
            assert!(matches!(err, JamError::SyncRequired(k) if k == kind));
            assert!(plan(&AttackSpec::new(kind), &dl(), 0.0, Some(0)).is_ok());
        }
        assert!(plan(&AttackSpec::new(AttackKind::Barrage), &dl(), 0.0, None).is_ok());
    }

    #[test]
    fn zero_power_injection_is_identity() {
        let grid = dl();
        let p = plan(
            &AttackSpec::new(AttackKind::Barrage),
            &grid,
            f64::NEG_INFINITY,
            None,
        )
        .unwrap();
        let mut frame = FrameSignal::zeros(grid.n_subcarriers(), grid.n_symbols());
        frame.set(3, 5, Complex64::new(0.4, -0.2));
        let mut rng = substream(9, "jam", 0, 0);
        let out = inject(&p, &frame, &mut rng).unwrap();
        assert_eq!(out, frame);
    }

    #[test]
    fn injection_is_local_to_the_target() {
        let grid = dl();
        let p = plan(&AttackSpec::new(AttackKind::PcfichJam), &grid, 10.0, Some(0)).unwrap();
        let frame = FrameSignal::zeros(grid.n_subcarriers(), grid.n_symbols());
        let mut rng = substream(1, "jam", 0, 0);
        let out = inject(&p, &frame, &mut rng).unwrap();
        let target: std::collections::HashSet<_> = p.target().iter().copied().collect();
        for sym in 0..grid.n_symbols() {
            for sc in 0..grid.n_subcarriers() {
                if !target.contains(&(sc, sym)) {
                    assert_eq!(out.get(sc, sym), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn barrage_at_zero_db_injects_unit_power() {
        let grid = dl();
        let p = plan(&AttackSpec::new(AttackKind::Barrage), &grid, 0.0, None).unwrap();
        let frame = FrameSignal::zeros(grid.n_subcarriers(), grid.n_symbols());
        let mut rng = substream(42, "jam", 0, 0);
        let out = inject(&p, &frame, &mut rng).unwrap();
        let measured = out.mean_power();
        assert!(
            (measured - 1.0).abs() < 0.05,
            "measured jam power {measured}"
        );
    }

    #[test]
    fn per_re_power_within_two_percent_over_100_frames() {
        let grid = dl();
        let p = plan(&AttackSpec::new(AttackKind::RsJam), &grid, 4.0, Some(0)).unwrap();
        let frame = FrameSignal::zeros(grid.n_subcarriers(), grid.n_symbols());
        let mut acc = 0.0;
        let mut n = 0usize;
        for f in 0..100 {
            let mut rng = substream(7, "jam", f, 0);
            let out = inject(&p, &frame, &mut rng).unwrap();
            for &(sc, sym) in p.target() {
                acc += out.get(sc, sym).norm_sqr();
                n += 1;
            }
        }
        let nominal = p.power();
        let measured = acc / n as f64;
        assert!(
            (measured / nominal - 1.0).abs() < 0.02,
            "measured {measured}, nominal {nominal}"
        );
    }

    #[test]
    fn duty_cycle_thins_the_energized_set() {
        let grid = dl();
        let attack = AttackSpec::new(AttackKind::Barrage).with_duty(0.25);
        let p = plan(&attack, &grid, 0.0, None).unwrap();
        let frame = FrameSignal::zeros(grid.n_subcarriers(), grid.n_symbols());
        let mut rng = substream(3, "jam", 0, 0);
        let out = inject(&p, &frame, &mut rng).unwrap();
        let hit = p
            .target()
            .iter()
            .filter(|&&(sc, sym)| out.get(sc, sym).norm_sqr() > 0.0)
            .count();
        let frac = hit as f64 / p.target().len() as f64;
        assert!((frac - 0.25).abs() < 0.02, "energized fraction {frac}");
    }

    #[test]
    fn spoof_injection_covers_pss_symbols() {
        let grid = dl();
        let p = plan(&AttackSpec::new(AttackKind::PssSpoof), &grid, 3.0, None).unwrap();
        let frame = FrameSignal::zeros(grid.n_subcarriers(), grid.n_symbols());
        let mut rng = substream(5, "jam", 0, 0);
        let out = inject(&p, &frame, &mut rng).unwrap();
        for &(sc, sym) in p.target() {
            assert!(out.get(sc, sym).norm_sqr() > 0.0, "({sc},{sym}) untouched");
        }
    }
}
