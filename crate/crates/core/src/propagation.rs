//! Okumura-Hata path loss and its inverse, thermal noise, the UHF Band-IV
//! channel plan and the dBu to dBm field-strength conversion.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PropagationError {
    #[error("channel {0} outside band plan 21..=35")]
    ChannelOutOfBand(i64),
    #[error("bandwidth must be positive, got {0} Hz")]
    BadBandwidth(f64),
    #[error("frequencies must satisfy 0 < f_low < f_high, got ({0}, {1}) MHz")]
    BadFrequencies(f64, f64),
    #[error("{what} = {value} outside Hata validity range {lo}..={hi}")]
    OutOfModelRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("distance must be positive and finite, got {0} km")]
    BadDistance(f64),
    #[error("path loss must be finite, got {0}")]
    BadPathLoss(f64),
    #[error("unknown environment '{0}'")]
    UnknownEnvironment(String),
}

/// Channel raster of the UHF TV band: 15 channels of 8 MHz from 470 MHz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandPlan {
    pub first_channel: u8,
    pub channel_width_mhz: u32,
    pub band_start_mhz: u32,
    pub n_channels: u8,
}

impl BandPlan {
    pub const UHF_IV: BandPlan = BandPlan {
        first_channel: 21,
        channel_width_mhz: 8,
        band_start_mhz: 470,
        n_channels: 15,
    };

    pub fn last_channel(&self) -> u8 {
        self.first_channel + self.n_channels - 1
    }

    pub fn channels(&self) -> RangeInclusive<u8> {
        self.first_channel..=self.last_channel()
    }

    pub fn contains(&self, channel: i64) -> bool {
        (i64::from(self.first_channel)..=i64::from(self.last_channel())).contains(&channel)
    }

    /// Zero-based position of a channel, used as its bit in availability masks.
    pub fn offset(&self, channel: u8) -> Option<usize> {
        self.contains(i64::from(channel))
            .then(|| usize::from(channel - self.first_channel))
    }

    pub fn channel_bounds(&self, channel: i64) -> Result<(f64, f64), PropagationError> {
        if !self.contains(channel) {
            return Err(PropagationError::ChannelOutOfBand(channel));
        }
        let low = f64::from(self.band_start_mhz)
            + (channel - i64::from(self.first_channel)) as f64 * f64::from(self.channel_width_mhz);
        Ok((low, low + f64::from(self.channel_width_mhz)))
    }

    pub fn center_mhz(&self, channel: i64) -> Result<f64, PropagationError> {
        let (lo, hi) = self.channel_bounds(channel)?;
        Ok((lo + hi) / 2.0)
    }

    /// Channels at distance one from `channel` that are still inside the band.
    pub fn adjacent(&self, channel: u8) -> impl Iterator<Item = u8> + '_ {
        [i64::from(channel) - 1, i64::from(channel) + 1]
            .into_iter()
            .filter(|&c| self.contains(c))
            .map(|c| c as u8)
    }
}

/// Band edges in MHz of a UHF Band-IV channel.
pub fn channel_bounds(channel: i64) -> Result<(f64, f64), PropagationError> {
    BandPlan::UHF_IV.channel_bounds(channel)
}

/// Thermal noise power at 290 K over `bandwidth_hz`.
pub fn noise_floor_dbm(bandwidth_hz: f64) -> Result<f64, PropagationError> {
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(PropagationError::BadBandwidth(bandwidth_hz));
    }
    Ok(-174.0 + 10.0 * bandwidth_hz.log10())
}

/// Converts a field strength in dBu to received power in dBm for a channel
/// spanning `f_low_mhz..f_high_mhz`.
pub fn dbu_to_dbm(e_dbu: f64, f_low_mhz: f64, f_high_mhz: f64) -> Result<f64, PropagationError> {
    if !(f_low_mhz > 0.0 && f_high_mhz > f_low_mhz) {
        return Err(PropagationError::BadFrequencies(f_low_mhz, f_high_mhz));
    }
    Ok(e_dbu - 130.8 + 20.0 * (1230.0 / (f_high_mhz + f_low_mhz)).log10())
}

/// Clutter class selecting the Hata receive-antenna correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Environment {
    UrbanLarge,
    UrbanMedium,
    Suburban,
    Open,
}

impl Environment {
    pub const ALL: [Environment; 4] = [
        Environment::UrbanLarge,
        Environment::UrbanMedium,
        Environment::Suburban,
        Environment::Open,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Environment::UrbanLarge => "urban-large",
            Environment::UrbanMedium => "urban-medium",
            Environment::Suburban => "suburban",
            Environment::Open => "open",
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Environment {
    type Err = PropagationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Environment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| PropagationError::UnknownEnvironment(s.to_string()))
    }
}

/// What to do when a Hata input leaves the model's nominal range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangePolicy {
    /// Reject any input outside the nominal range.
    Strict,
    /// Clamp frequency and antenna heights into range, evaluate the closed
    /// form at any positive distance, and flag the result.
    #[default]
    Extrapolate,
}

pub const HATA_FREQ_MHZ: (f64, f64) = (150.0, 1500.0);
pub const HATA_TX_HEIGHT_M: (f64, f64) = (30.0, 200.0);
pub const HATA_RX_HEIGHT_M: (f64, f64) = (1.0, 10.0);
pub const HATA_DISTANCE_KM: (f64, f64) = (1.0, 20.0);

/// Bounds applied to every inverted distance.
pub const DISTANCE_CLAMP_KM: (f64, f64) = (0.01, 500.0);

/// A path-loss value with a flag telling whether the model was used
/// outside its nominal range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub db: f64,
    pub extrapolated: bool,
}

/// A distance recovered from a path-loss budget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolvedDistance {
    pub km: f64,
    /// The raw solution fell outside [`DISTANCE_CLAMP_KM`] and was clamped.
    pub clamped: bool,
    /// Evaluated outside the nominal Hata range.
    pub extrapolated: bool,
}

/// One transmitter/receiver geometry for the Okumura-Hata model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HataLink {
    pub f_mhz: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub env: Environment,
}

fn checked(
    what: &'static str,
    value: f64,
    (lo, hi): (f64, f64),
    policy: RangePolicy,
) -> Result<(f64, bool), PropagationError> {
    if !value.is_finite() {
        return Err(PropagationError::OutOfModelRange {
            what,
            value,
            lo,
            hi,
        });
    }
    if (lo..=hi).contains(&value) {
        return Ok((value, false));
    }
    match policy {
        RangePolicy::Strict => Err(PropagationError::OutOfModelRange {
            what,
            value,
            lo,
            hi,
        }),
        RangePolicy::Extrapolate => Ok((value.clamp(lo, hi), true)),
    }
}

impl HataLink {
    pub fn new(f_mhz: f64, tx_height_m: f64, rx_height_m: f64, env: Environment) -> Self {
        Self {
            f_mhz,
            tx_height_m,
            rx_height_m,
            env,
        }
    }

    /// Returns the link with parameters clamped into range plus whether any
    /// clamping happened.
    fn effective(&self, policy: RangePolicy) -> Result<(HataLink, bool), PropagationError> {
        let (f, xf) = checked("f_mhz", self.f_mhz, HATA_FREQ_MHZ, policy)?;
        let (hb, xb) = checked("tx_height_m", self.tx_height_m, HATA_TX_HEIGHT_M, policy)?;
        let (hm, xm) = checked("rx_height_m", self.rx_height_m, HATA_RX_HEIGHT_M, policy)?;
        Ok((HataLink::new(f, hb, hm, self.env), xf || xb || xm))
    }

    fn mobile_correction(&self) -> f64 {
        let lf = self.f_mhz.log10();
        let hm = self.rx_height_m;
        match self.env {
            Environment::UrbanLarge if self.f_mhz >= 400.0 => {
                3.2 * (11.75 * hm).log10().powi(2) - 4.97
            }
            Environment::UrbanLarge => 8.29 * (1.54 * hm).log10().powi(2) - 1.1,
            _ => (1.1 * lf - 0.7) * hm - (1.56 * lf - 0.8),
        }
    }

    fn clutter_offset(&self) -> f64 {
        let lf = self.f_mhz.log10();
        match self.env {
            Environment::UrbanLarge | Environment::UrbanMedium => 0.0,
            Environment::Suburban => -2.0 * (self.f_mhz / 28.0).log10().powi(2) - 5.4,
            Environment::Open => -4.78 * lf * lf + 18.33 * lf - 40.94,
        }
    }

    /// Loss at 1 km.
    fn intercept_db(&self) -> f64 {
        69.55 + 26.16 * self.f_mhz.log10()
            - 13.82 * self.tx_height_m.log10()
            - self.mobile_correction()
            + self.clutter_offset()
    }

    /// Loss increase per decade of distance.
    fn slope_db(&self) -> f64 {
        44.9 - 6.55 * self.tx_height_m.log10()
    }

    pub fn path_loss(&self, d_km: f64, policy: RangePolicy) -> Result<PathLoss, PropagationError> {
        if !(d_km > 0.0 && d_km.is_finite()) {
            return Err(PropagationError::BadDistance(d_km));
        }
        let (link, mut extrapolated) = self.effective(policy)?;
        let (_, xd) = checked("d_km", d_km, HATA_DISTANCE_KM, policy)?;
        extrapolated |= xd;
        Ok(PathLoss {
            db: link.intercept_db() + link.slope_db() * d_km.log10(),
            extrapolated,
        })
    }

    /// Distance at which the median loss equals `pl_db`, clamped to
    /// [`DISTANCE_CLAMP_KM`].
    pub fn inverse_distance(
        &self,
        pl_db: f64,
        policy: RangePolicy,
    ) -> Result<SolvedDistance, PropagationError> {
        if !pl_db.is_finite() {
            return Err(PropagationError::BadPathLoss(pl_db));
        }
        let (link, params_clamped) = self.effective(policy)?;
        let raw = 10f64.powf((pl_db - link.intercept_db()) / link.slope_db());
        let (lo, hi) = DISTANCE_CLAMP_KM;
        let km = raw.clamp(lo, hi);
        let outside = !(HATA_DISTANCE_KM.0..=HATA_DISTANCE_KM.1).contains(&raw);
        if outside && policy == RangePolicy::Strict {
            return Err(PropagationError::OutOfModelRange {
                what: "d_km",
                value: raw,
                lo: HATA_DISTANCE_KM.0,
                hi: HATA_DISTANCE_KM.1,
            });
        }
        Ok(SolvedDistance {
            km,
            clamped: km != raw,
            extrapolated: params_clamped || outside,
        })
    }
}

/// Median Okumura-Hata loss in dB, rejecting inputs outside the model range.
pub fn hata_path_loss(
    f_mhz: f64,
    tx_height_m: f64,
    rx_height_m: f64,
    d_km: f64,
    env: Environment,
) -> Result<f64, PropagationError> {
    HataLink::new(f_mhz, tx_height_m, rx_height_m, env)
        .path_loss(d_km, RangePolicy::Strict)
        .map(|pl| pl.db)
}

/// Inverse of the Hata distance term, extrapolating outside the nominal range.
pub fn hata_inverse_distance(
    f_mhz: f64,
    tx_height_m: f64,
    rx_height_m: f64,
    pl_db: f64,
    env: Environment,
) -> Result<SolvedDistance, PropagationError> {
    HataLink::new(f_mhz, tx_height_m, rx_height_m, env)
        .inverse_distance(pl_db, RangePolicy::Extrapolate)
}
