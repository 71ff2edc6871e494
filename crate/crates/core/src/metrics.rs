//! Frame-averaged jammer-to-signal accounting and the vulnerability
//! comparison table.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::grid::{build_downlink_grid, build_uplink_grid, CellConfig, GridError};
use crate::jammer::{self, AttackKind, AttackSpec, JamError, SyncRequirement};

/// J/S over the targeted REs at which the turbo-coded shared channels
/// are denied; not a comparison-table row because it does not beat
/// barrage jamming.
pub const PDSCH_PUSCH_JSRE_DB: f64 = 7.0;
/// Same, for the broadcast channel attacked with time synchronization.
pub const PBCH_JSRE_DB: f64 = 0.0;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("n_re {n_re} exceeds the frame's {frame} resource elements")]
    NreExceedsFrame { n_re: usize, frame: usize },
    #[error("counts must be positive")]
    EmptyFrame,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Jam(#[from] JamError),
}

/// Frame-averaged J/S in dB for a given per-RE J/S and target size:
/// the per-RE ratio scaled in linear power by `n_re` out of the
/// `20 * n_symb * n_sc * n_rb` REs of a frame, assuming uniform power
/// spectral density across the signal.
pub fn js_frame(
    js_re_db: f64,
    n_re: usize,
    n_rb: usize,
    n_symb: usize,
    n_sc: usize,
) -> Result<f64, MetricsError> {
    if n_re == 0 || n_rb == 0 || n_symb == 0 || n_sc == 0 {
        return Err(MetricsError::EmptyFrame);
    }
    let frame = 20 * n_symb * n_sc * n_rb;
    if n_re > frame {
        return Err(MetricsError::NreExceedsFrame { n_re, frame });
    }
    Ok(js_re_db + 10.0 * (n_re as f64 / frame as f64).log10())
}

/// Inverse of [`js_frame`]: the per-RE J/S needed to reach a given
/// frame-averaged J/S over `n_re` targeted REs.
pub fn jsre_for_frame(
    js_f_db: f64,
    n_re: usize,
    n_rb: usize,
    n_symb: usize,
    n_sc: usize,
) -> Result<f64, MetricsError> {
    let offset = js_frame(0.0, n_re, n_rb, n_symb, n_sc)?;
    Ok(js_f_db - offset)
}

/// Where the table's per-RE J/S column comes from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum JsReSource {
    /// The table-default values of [`jammer::default_jsre`].
    #[default]
    TableDefault,
    /// Externally measured values (e.g. from threshold searches),
    /// falling back to the defaults for missing attacks.
    Provided(BTreeMap<AttackKind, f64>),
}

impl JsReSource {
    fn jsre(&self, kind: AttackKind) -> f64 {
        match self {
            JsReSource::TableDefault => jammer::default_jsre(kind),
            JsReSource::Provided(map) => {
                map.get(&kind).copied().unwrap_or_else(|| jammer::default_jsre(kind))
            }
        }
    }
}

/// One row of the vulnerability comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VulnRow {
    pub attack: String,
    pub n_re: usize,
    pub re_fraction: f64,
    pub js_re_db: f64,
    pub sync_required: bool,
    pub complexity: String,
    pub js_f_db: f64,
    #[serde(skip)]
    pub kind: AttackKind,
}

impl VulnRow {
    pub const CSV_HEADER: &'static str =
        "attack,n_re,re_fraction,js_re_db,sync_required,complexity,js_f_db";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.attack,
            self.n_re,
            self.re_fraction,
            self.js_re_db,
            self.sync_required,
            self.complexity,
            self.js_f_db
        )
    }
}

/// Builds the comparison table for the given attacks.
///
/// Targeted RE counts come from a fresh grid census (the spoof attack
/// uses the three-sequence accounting), per-RE J/S from `source`, and
/// the frame-averaged column from [`js_frame`].
pub fn vulnerability_table(
    cfg: &CellConfig,
    attacks: &[AttackKind],
    source: &JsReSource,
) -> Result<Vec<VulnRow>, MetricsError> {
    let downlink = build_downlink_grid(cfg)?;
    let uplink = build_uplink_grid(cfg)?;
    let mut rows = Vec::with_capacity(attacks.len());
    for &kind in attacks {
        let spec = AttackSpec::new(kind);
        let grid = match kind {
            AttackKind::PucchJam => &uplink,
            _ => &downlink,
        };
        let js_re_db = source.jsre(kind);
        let plan = jammer::plan(&spec, grid, js_re_db, Some(cfg.cell_id))?;
        let n_re = plan.accounting_re_count();
        let js_f_db = js_frame(
            js_re_db,
            n_re,
            cfg.n_rb,
            cfg.n_symb_per_slot,
            cfg.n_sc_per_rb,
        )?;
        rows.push(VulnRow {
            attack: kind.id().to_string(),
            n_re,
            re_fraction: n_re as f64 / cfg.total_res() as f64,
            js_re_db,
            sync_required: spec.sync == SyncRequirement::PssSssSync,
            complexity: spec.complexity.label().to_string(),
            js_f_db,
            kind,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrage_row_is_a_fixed_point() {
        let v = js_frame(-2.0, 84000, 50, 7, 12).unwrap();
        assert!((v + 2.0).abs() < 1e-12);
    }

    #[test]
    fn rs_and_spoof_rows_reconstruct_table_values() {
        let rs = js_frame(4.0, 4000, 50, 7, 12).unwrap();
        assert!((rs - -9.22).abs() < 0.005, "rs row {rs}");
        let spoof = js_frame(3.0, 378, 50, 7, 12).unwrap();
        assert!((spoof - -20.47).abs() < 0.005, "spoof row {spoof}");
    }

    #[test]
    fn oversized_target_is_a_domain_error() {
        assert!(matches!(
            js_frame(0.0, 84001, 50, 7, 12),
            Err(MetricsError::NreExceedsFrame { .. })
        ));
    }

    #[test]
    fn frame_inverse_round_trips() {
        let js_re = jsre_for_frame(-5.0, 4000, 50, 7, 12).unwrap();
        let back = js_frame(js_re, 4000, 50, 7, 12).unwrap();
        assert!((back + 5.0).abs() < 1e-12);
    }

    #[test]
    fn default_table_matches_printed_integers_within_rounding() {
        let rows = vulnerability_table(
            &CellConfig::default(),
            &AttackKind::ALL,
            &JsReSource::TableDefault,
        )
        .unwrap();
        let printed = [-2.0, -9.0, -11.0, -20.0, -25.0, -8.0];
        assert_eq!(rows.len(), 6);
        for (row, want) in rows.iter().zip(printed) {
            assert!(
                (row.js_f_db - want).abs() < 0.8,
                "{}: {} vs printed {}",
                row.attack,
                row.js_f_db,
                want
            );
        }
    }

    #[test]
    fn pcfich_is_the_downlink_minimum_and_pucch_the_uplink() {
        let rows = vulnerability_table(
            &CellConfig::default(),
            &AttackKind::ALL,
            &JsReSource::TableDefault,
        )
        .unwrap();
        let min = rows
            .iter()
            .min_by(|a, b| a.js_f_db.total_cmp(&b.js_f_db))
            .unwrap();
        assert_eq!(min.kind, AttackKind::PcfichJam);
        let uplink_min = rows
            .iter()
            .filter(|r| r.kind == AttackKind::PucchJam)
            .min_by(|a, b| a.js_f_db.total_cmp(&b.js_f_db))
            .unwrap();
        assert_eq!(uplink_min.kind, AttackKind::PucchJam);
    }

    #[test]
    fn single_attack_row() {
        let rows = vulnerability_table(
            &CellConfig::default(),
            &[AttackKind::Barrage],
            &JsReSource::TableDefault,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].js_f_db, rows[0].js_re_db);
    }

    #[test]
    fn provided_source_overrides_defaults() {
        let mut map = BTreeMap::new();
        map.insert(AttackKind::Barrage, 1.25);
        let rows = vulnerability_table(
            &CellConfig::default(),
            &[AttackKind::Barrage, AttackKind::RsJam],
            &JsReSource::Provided(map),
        )
        .unwrap();
        assert_eq!(rows[0].js_re_db, 1.25);
        assert_eq!(rows[1].js_re_db, 4.0);
    }

    #[test]
    fn serialized_field_names_are_pinned() {
        let rows = vulnerability_table(
            &CellConfig::default(),
            &[AttackKind::Barrage],
            &JsReSource::TableDefault,
        )
        .unwrap();
        let json = serde_json::to_value(&rows[0]).unwrap();
        let obj = json.as_object().unwrap();
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        for want in [
            "attack",
            "n_re",
            "re_fraction",
            "js_re_db",
            "sync_required",
            "complexity",
            "js_f_db",
        ] {
            assert!(keys.contains(&want), "missing field {want}");
        }
        assert_eq!(obj.len(), 7);
        assert_eq!(VulnRow::CSV_HEADER.split(',').count(), 7);
    }

    #[test]
    fn js_f_never_exceeds_js_re() {
        let rows = vulnerability_table(
            &CellConfig::default(),
            &AttackKind::ALL,
            &JsReSource::TableDefault,
        )
        .unwrap();
        for row in rows {
            assert!(row.js_f_db <= row.js_re_db + 1e-12, "{}", row.attack);
        }
    }
}
