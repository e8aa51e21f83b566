//! Per-tower exclusion radii under the pollution viewpoint, the protection
//! viewpoint and the FCC Grade-B rule.
//!
//! Every radius is found by inverting the Hata model of the tower (or of a
//! secondary device standing near the tower) at a fixed loss budget:
//!
//! | radius            | loss budget                                   |
//! |-------------------|-----------------------------------------------|
//! | pollution         | `P_t - N0 - gamma`                            |
//! | protection        | `P_t - N0 - delta - psi`                      |
//! | separation        | `P_s - psi` (plus 27 dB on adjacent channels) |
//! | Grade-B           | `P_t - dBm(41 dBu)`                           |
//! | FCC separation    | `P_s - dBm(41 - 23 dBu)`                      |

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::propagation::{
    dbu_to_dbm, BandPlan, Environment, HataLink, PropagationError, RangePolicy, SolvedDistance,
};

#[derive(Debug, Error)]
pub enum RegulatoryError {
    #[error("transmitter '{id}': {reason}")]
    InvalidTransmitter { id: String, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown preset '{0}' (expected one of pollution-5, pollution-10, pollution-15, protection-0.1, protection-1, fcc)")]
    UnknownPreset(String),
    #[error("unknown method '{0}' (expected pollution, protection, fcc or intersection)")]
    UnknownMethod(String),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
}

/// One terrestrial TV transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmitter {
    pub id: String,
    pub location: GeoPoint,
    pub power_dbm: f64,
    pub channel: u8,
    pub antenna_height_m: f64,
    pub env: Environment,
    pub zone: String,
}

impl Transmitter {
    pub fn new(
        id: impl Into<String>,
        location: GeoPoint,
        power_dbm: f64,
        channel: u8,
        antenna_height_m: f64,
        env: Environment,
        zone: impl Into<String>,
    ) -> Result<Self, RegulatoryError> {
        let tx = Self {
            id: id.into(),
            location,
            power_dbm,
            channel,
            antenna_height_m,
            env,
            zone: zone.into(),
        };
        tx.validate()?;
        Ok(tx)
    }

    pub fn validate(&self) -> Result<(), RegulatoryError> {
        let bad = |reason: String| RegulatoryError::InvalidTransmitter {
            id: self.id.clone(),
            reason,
        };
        if !(30.0..=90.0).contains(&self.power_dbm) {
            return Err(bad(format!("power {} dBm outside 30..=90", self.power_dbm)));
        }
        if !(self.antenna_height_m > 0.0 && self.antenna_height_m.is_finite()) {
            return Err(bad(format!("antenna height {} m", self.antenna_height_m)));
        }
        if !BandPlan::UHF_IV.contains(i64::from(self.channel)) {
            return Err(bad(format!("channel {} outside 21..=35", self.channel)));
        }
        Ok(())
    }

    fn center_mhz(&self) -> f64 {
        // channel validated on construction
        BandPlan::UHF_IV
            .center_mhz(i64::from(self.channel))
            .unwrap_or(f64::NAN)
    }
}

/// Tunable regulatory quantities. Defaults are the co-channel pollution
/// tolerance of 15 dB and the FCC protection margins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulatoryParams {
    /// Co-channel interference a secondary receiver tolerates above noise.
    pub gamma_co_db: f64,
    pub gamma_adj_db: f64,
    /// Fading margin on the primary link.
    pub psi_db: f64,
    /// Extra margin applied on the adjacent channel.
    pub psi_adj_extra_db: f64,
    /// Required primary SINR.
    pub delta_db: f64,
    pub secondary_power_dbm: f64,
    pub secondary_haat_m: f64,
    pub grade_b_dbu: f64,
    pub noise_dbm: f64,
    pub rx_height_m: f64,
    /// Emit adjacent-channel exclusion disks.
    pub include_adjacent: bool,
    pub range_policy: RangePolicy,
}

impl Default for RegulatoryParams {
    fn default() -> Self {
        Self {
            gamma_co_db: 15.0,
            gamma_adj_db: 45.0,
            psi_db: 1.0,
            psi_adj_extra_db: 27.0,
            delta_db: 45.0,
            secondary_power_dbm: 36.0,
            secondary_haat_m: 30.0,
            grade_b_dbu: 41.0,
            noise_dbm: -104.97,
            rx_height_m: 1.5,
            include_adjacent: true,
            range_policy: RangePolicy::Extrapolate,
        }
    }
}

impl RegulatoryParams {
    pub fn validate(&self) -> Result<(), RegulatoryError> {
        let values = [
            self.gamma_co_db,
            self.gamma_adj_db,
            self.psi_db,
            self.psi_adj_extra_db,
            self.delta_db,
            self.secondary_power_dbm,
            self.secondary_haat_m,
            self.grade_b_dbu,
            self.noise_dbm,
            self.rx_height_m,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RegulatoryError::InvalidParams("non-finite value".into()));
        }
        if self.gamma_adj_db < self.gamma_co_db {
            return Err(RegulatoryError::InvalidParams(format!(
                "gamma_adj_db {} < gamma_co_db {}",
                self.gamma_adj_db, self.gamma_co_db
            )));
        }
        if self.psi_adj_extra_db < 0.0 {
            return Err(RegulatoryError::InvalidParams(
                "psi_adj_extra_db must be >= 0".into(),
            ));
        }
        if self.secondary_haat_m <= 0.0 || self.rx_height_m <= 0.0 {
            return Err(RegulatoryError::InvalidParams(
                "antenna heights must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// White-space estimation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pollution,
    Protection,
    Fcc,
    /// White space must be free under both pollution and protection.
    Intersection,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Pollution,
        Method::Protection,
        Method::Fcc,
        Method::Intersection,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pollution => "pollution",
            Method::Protection => "protection",
            Method::Fcc => "fcc",
            Method::Intersection => "intersection",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = RegulatoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| RegulatoryError::UnknownMethod(s.to_string()))
    }
}

/// Named parameter sets, one per configuration used in the published tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Pollution5,
    Pollution10,
    Pollution15,
    Protection01,
    Protection1,
    Fcc,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Pollution5,
        Preset::Pollution10,
        Preset::Pollution15,
        Preset::Protection1,
        Preset::Protection01,
        Preset::Fcc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Pollution5 => "pollution-5",
            Preset::Pollution10 => "pollution-10",
            Preset::Pollution15 => "pollution-15",
            Preset::Protection01 => "protection-0.1",
            Preset::Protection1 => "protection-1",
            Preset::Fcc => "fcc",
        }
    }

    pub fn method(&self) -> Method {
        match self {
            Preset::Pollution5 | Preset::Pollution10 | Preset::Pollution15 => Method::Pollution,
            Preset::Protection01 | Preset::Protection1 => Method::Protection,
            Preset::Fcc => Method::Fcc,
        }
    }

    pub fn params(&self) -> RegulatoryParams {
        self.apply_to(RegulatoryParams::default())
    }

    /// Sets the knob this preset varies, leaving everything else of `base`.
    pub fn apply_to(&self, base: RegulatoryParams) -> RegulatoryParams {
        match self {
            Preset::Pollution5 => RegulatoryParams {
                gamma_co_db: 5.0,
                ..base
            },
            Preset::Pollution10 => RegulatoryParams {
                gamma_co_db: 10.0,
                ..base
            },
            Preset::Pollution15 => RegulatoryParams {
                gamma_co_db: 15.0,
                ..base
            },
            Preset::Protection01 => RegulatoryParams {
                psi_db: 0.1,
                ..base
            },
            Preset::Protection1 => RegulatoryParams {
                psi_db: 1.0,
                ..base
            },
            Preset::Fcc => base,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = RegulatoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| RegulatoryError::UnknownPreset(s.to_string()))
    }
}

/// Why a disk is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZoneKind {
    PollutionCo,
    PollutionAdj,
    NoTalkCo,
    NoTalkAdj,
    FccNoTalk,
}

impl ZoneKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZoneKind::PollutionCo => "pollution-co",
            ZoneKind::PollutionAdj => "pollution-adj",
            ZoneKind::NoTalkCo => "notalk-co",
            ZoneKind::NoTalkAdj => "notalk-adj",
            ZoneKind::FccNoTalk => "fcc-notalk",
        }
    }
}

impl fmt::Display for ZoneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A disk around a tower inside which `channel` is not white space.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionZone {
    pub tower_id: String,
    pub center: GeoPoint,
    pub channel: u8,
    pub radius_km: f64,
    pub kind: ZoneKind,
    pub extrapolated: bool,
    pub clamped: bool,
}

fn primary_link(tx: &Transmitter, p: &RegulatoryParams) -> HataLink {
    HataLink::new(tx.center_mhz(), tx.antenna_height_m, p.rx_height_m, tx.env)
}

fn secondary_link(tx: &Transmitter, p: &RegulatoryParams) -> HataLink {
    HataLink::new(tx.center_mhz(), p.secondary_haat_m, p.rx_height_m, tx.env)
}

fn sum(a: SolvedDistance, b: SolvedDistance) -> SolvedDistance {
    SolvedDistance {
        km: a.km + b.km,
        clamped: a.clamped || b.clamped,
        extrapolated: a.extrapolated || b.extrapolated,
    }
}

/// Distance within which the primary signal exceeds the secondary
/// receiver's tolerance `gamma` above the noise floor.
pub fn pollution_radius(
    tx: &Transmitter,
    p: &RegulatoryParams,
    adjacent: bool,
) -> Result<SolvedDistance, RegulatoryError> {
    let gamma = if adjacent {
        p.gamma_adj_db
    } else {
        p.gamma_co_db
    };
    let budget = tx.power_dbm - p.noise_dbm - gamma;
    Ok(primary_link(tx, p).inverse_distance(budget, p.range_policy)?)
}

/// Edge of the area where the primary link still meets `delta + psi`.
pub fn protection_radius(
    tx: &Transmitter,
    p: &RegulatoryParams,
) -> Result<SolvedDistance, RegulatoryError> {
    let budget = tx.power_dbm - p.noise_dbm - p.delta_db - p.psi_db;
    Ok(primary_link(tx, p).inverse_distance(budget, p.range_policy)?)
}

/// Distance a secondary device must keep from a receiver at the protection
/// edge. Uses the tower's channel and clutter class but not its power.
pub fn separation_distance(
    tx: &Transmitter,
    p: &RegulatoryParams,
    adjacent: bool,
) -> Result<SolvedDistance, RegulatoryError> {
    let margin = if adjacent {
        p.psi_db + p.psi_adj_extra_db
    } else {
        p.psi_db
    };
    let budget = p.secondary_power_dbm - margin;
    Ok(secondary_link(tx, p).inverse_distance(budget, p.range_policy)?)
}

/// Protection radius plus separation distance.
pub fn no_talk_radius(
    tx: &Transmitter,
    p: &RegulatoryParams,
    adjacent: bool,
) -> Result<SolvedDistance, RegulatoryError> {
    Ok(sum(
        protection_radius(tx, p)?,
        separation_distance(tx, p, adjacent)?,
    ))
}

/// Distance at which the tower's field strength falls to the Grade-B level.
pub fn fcc_grade_b_radius(
    tx: &Transmitter,
    p: &RegulatoryParams,
) -> Result<SolvedDistance, RegulatoryError> {
    let (lo, hi) = BandPlan::UHF_IV.channel_bounds(i64::from(tx.channel))?;
    let threshold = dbu_to_dbm(p.grade_b_dbu, lo, hi)?;
    Ok(primary_link(tx, p).inverse_distance(tx.power_dbm - threshold, p.range_policy)?)
}

/// Distance at which a secondary device produces `grade_b_dbu - 23` dBu at a
/// receiver on the Grade-B contour.
pub fn fcc_separation_distance(
    tx: &Transmitter,
    p: &RegulatoryParams,
) -> Result<SolvedDistance, RegulatoryError> {
    let (lo, hi) = BandPlan::UHF_IV.channel_bounds(i64::from(tx.channel))?;
    let level = dbu_to_dbm(p.grade_b_dbu - 23.0, lo, hi)?;
    let budget = p.secondary_power_dbm - level;
    Ok(secondary_link(tx, p).inverse_distance(budget, p.range_policy)?)
}

pub fn fcc_no_talk_radius(
    tx: &Transmitter,
    p: &RegulatoryParams,
) -> Result<SolvedDistance, RegulatoryError> {
    Ok(sum(
        fcc_grade_b_radius(tx, p)?,
        fcc_separation_distance(tx, p)?,
    ))
}

fn disk(tx: &Transmitter, channel: u8, kind: ZoneKind, r: SolvedDistance) -> ExclusionZone {
    ExclusionZone {
        tower_id: tx.id.clone(),
        center: tx.location,
        channel,
        radius_km: r.km,
        kind,
        extrapolated: r.extrapolated,
        clamped: r.clamped,
    }
}

fn pollution_disks(
    tx: &Transmitter,
    p: &RegulatoryParams,
    out: &mut Vec<ExclusionZone>,
) -> Result<(), RegulatoryError> {
    out.push(disk(
        tx,
        tx.channel,
        ZoneKind::PollutionCo,
        pollution_radius(tx, p, false)?,
    ));
    if p.include_adjacent {
        let r = pollution_radius(tx, p, true)?;
        for c in BandPlan::UHF_IV.adjacent(tx.channel) {
            out.push(disk(tx, c, ZoneKind::PollutionAdj, r));
        }
    }
    Ok(())
}

fn protection_disks(
    tx: &Transmitter,
    p: &RegulatoryParams,
    out: &mut Vec<ExclusionZone>,
) -> Result<(), RegulatoryError> {
    out.push(disk(
        tx,
        tx.channel,
        ZoneKind::NoTalkCo,
        no_talk_radius(tx, p, false)?,
    ));
    if p.include_adjacent {
        let r = no_talk_radius(tx, p, true)?;
        for c in BandPlan::UHF_IV.adjacent(tx.channel) {
            out.push(disk(tx, c, ZoneKind::NoTalkAdj, r));
        }
    }
    Ok(())
}

/// Exclusion disks of one tower under `method`.
pub fn exclusion_zones(
    tx: &Transmitter,
    p: &RegulatoryParams,
    method: Method,
) -> Result<Vec<ExclusionZone>, RegulatoryError> {
    tx.validate()?;
    p.validate()?;
    let mut out = Vec::with_capacity(6);
    match method {
        Method::Pollution => pollution_disks(tx, p, &mut out)?,
        Method::Protection => protection_disks(tx, p, &mut out)?,
        Method::Fcc => out.push(disk(
            tx,
            tx.channel,
            ZoneKind::FccNoTalk,
            fcc_no_talk_radius(tx, p)?,
        )),
        Method::Intersection => {
            pollution_disks(tx, p, &mut out)?;
            protection_disks(tx, p, &mut out)?;
        }
    }
    Ok(out)
}

/// Exclusion disks for every tower, in tower order.
pub fn exclusion_zones_all(
    towers: &[Transmitter],
    p: &RegulatoryParams,
    method: Method,
) -> Result<Vec<ExclusionZone>, RegulatoryError> {
    let per_tower: Result<Vec<_>, _> = towers
        .par_iter()
        .map(|tx| exclusion_zones(tx, p, method))
        .collect();
    Ok(per_tower?.into_iter().flatten().collect())
}

/// Published radii for the 10 kW channel-29 tower at Sinhagad Fort, Pune.
pub const PUNE_REFERENCE_KM: [(&str, f64); 5] = [
    ("pollution-co gamma=15", 37.70),
    ("pollution-adj gamma=45", 4.24),
    ("protection psi=1", 33.82),
    ("notalk-co psi=1", 33.83),
    ("fcc-notalk", 41.60),
];

/// Relative tolerance accepted against [`PUNE_REFERENCE_KM`].
pub const REFERENCE_TOLERANCE: f64 = 0.30;

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub label: &'static str,
    pub reference_km: f64,
    pub computed: SolvedDistance,
}

impl Discrepancy {
    pub fn relative_error(&self) -> f64 {
        (self.computed.km - self.reference_km) / self.reference_km
    }

    pub fn within_tolerance(&self) -> bool {
        self.relative_error().abs() <= REFERENCE_TOLERANCE
    }
}

/// Computes each reference radius for `tx` with the default parameters
/// (gamma 15 dB, psi 1 dB) and pairs it with its published value.
pub fn reference_discrepancies(
    tx: &Transmitter,
    p: &RegulatoryParams,
) -> Result<Vec<Discrepancy>, RegulatoryError> {
    let p = RegulatoryParams {
        gamma_co_db: 15.0,
        psi_db: 1.0,
        ..*p
    };
    let computed = [
        pollution_radius(tx, &p, false)?,
        pollution_radius(tx, &p, true)?,
        protection_radius(tx, &p)?,
        no_talk_radius(tx, &p, false)?,
        fcc_no_talk_radius(tx, &p)?,
    ];
    Ok(PUNE_REFERENCE_KM
        .iter()
        .zip(computed)
        .map(|(&(label, reference_km), computed)| Discrepancy {
            label,
            reference_km,
            computed,
        })
        .collect())
}
