//! Channel-availability rasters and their area statistics.

use thiserror::Error;

use crate::geo::{haversine_distance, GeoPoint, RasterGrid, EARTH_RADIUS_KM};
use crate::propagation::BandPlan;
use crate::regulatory::{
    exclusion_zones_all, ExclusionZone, Method, RegulatoryError, RegulatoryParams, Transmitter,
};

/// Bits 0..15 set: every channel 21..=35 free.
pub const ALL_CHANNELS: u16 = (1 << 15) - 1;
pub const N_CHANNELS: usize = 15;

#[derive(Debug, Error)]
pub enum WsmapError {
    #[error("raster has no masked area")]
    NoMaskedArea,
    #[error("unknown zone '{0}'")]
    UnknownZone(String),
    #[error("channel count {0} outside 0..=15")]
    CountOutOfRange(i64),
    #[error(transparent)]
    Regulatory(#[from] RegulatoryError),
}

/// True when no exclusion disk for channel `c` covers `pt`.
pub fn channel_available(pt: GeoPoint, c: u8, zones: &[ExclusionZone]) -> bool {
    !zones
        .iter()
        .any(|z| z.channel == c && haversine_distance(pt, z.center) <= z.radius_km)
}

/// Per-cell channel bitmasks over a zone-masked grid.
#[derive(Debug, Clone)]
pub struct AvailabilityRaster {
    grid: RasterGrid,
    masks: Vec<u16>,
    method: Method,
    params: RegulatoryParams,
}

impl AvailabilityRaster {
    /// Builds a raster directly from bitmasks (row-major, one per cell).
    /// Cells outside every zone are forced to zero.
    pub fn from_masks(
        grid: RasterGrid,
        mut masks: Vec<u16>,
        method: Method,
        params: RegulatoryParams,
    ) -> Self {
        assert_eq!(masks.len(), grid.len(), "one mask per cell");
        for (m, z) in masks.iter_mut().zip(grid.mask()) {
            if z.is_none() {
                *m = 0;
            } else {
                *m &= ALL_CHANNELS;
            }
        }
        Self {
            grid,
            masks,
            method,
            params,
        }
    }

    pub fn grid(&self) -> &RasterGrid {
        &self.grid
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn params(&self) -> &RegulatoryParams {
        &self.params
    }

    /// Channel bitmask of a cell; `None` outside the zones.
    pub fn mask(&self, row: usize, col: usize) -> Option<u16> {
        self.grid
            .zone_index(row, col)
            .map(|_| self.masks[self.grid.index(row, col)])
    }

    pub fn available_count(&self, row: usize, col: usize) -> Option<u32> {
        self.mask(row, col).map(u16::count_ones)
    }

    pub fn is_available(&self, row: usize, col: usize, channel: u8) -> Option<bool> {
        let bit = BandPlan::UHF_IV.offset(channel)?;
        self.mask(row, col).map(|m| m & (1 << bit) != 0)
    }

    /// Area in km² of masked cells by exact available count, optionally
    /// restricted to one zone index.
    fn count_areas(&self, zone: Option<usize>) -> [f64; N_CHANNELS + 1] {
        let mut areas = [0.0; N_CHANNELS + 1];
        for (row, col, z) in self.grid.masked_cells() {
            if zone.is_some_and(|want| want != z) {
                continue;
            }
            let n = self.masks[self.grid.index(row, col)].count_ones() as usize;
            areas[n] += self.grid.row_cell_area(row);
        }
        areas
    }

    fn zone_index(&self, name: &str) -> Result<usize, WsmapError> {
        self.grid
            .zone_names()
            .iter()
            .position(|z| z == name)
            .ok_or_else(|| WsmapError::UnknownZone(name.to_string()))
    }
}

/// Clears channel bits of every masked cell whose centre lies within one of
/// `zones`. Only the bounding box of each disk is visited.
fn apply_exclusions(grid: &RasterGrid, masks: &mut [u16], zones: &[ExclusionZone]) {
    let res = grid.resolution_deg();
    let origin = grid.origin();
    let (n_rows, n_cols) = (grid.n_rows() as i64, grid.n_cols() as i64);
    for zone in zones {
        let Some(bit) = BandPlan::UHF_IV.offset(zone.channel) else {
            continue;
        };
        let clear = !(1u16 << bit);
        let ang = zone.radius_km / EARTH_RADIUS_KM;
        let dlat = ang.to_degrees();
        let lat0 = zone.center.lat_deg();
        let lon0 = zone.center.lon_deg();
        let to_row = |lat: f64| ((lat - origin.lat_deg()) / res - 0.5).floor() as i64;
        let to_col = |lon: f64| ((lon - origin.lon_deg()) / res - 0.5).floor() as i64;
        let r_lo = (to_row(lat0 - dlat) - 1).max(0);
        let r_hi = (to_row(lat0 + dlat) + 2).min(n_rows - 1);
        // widest longitude offset of a spherical cap that misses the poles
        let s = ang.sin() / lat0.to_radians().cos();
        let (c_lo, c_hi) =
            if lat0.abs() + dlat >= 90.0 || s >= 1.0 || ang >= std::f64::consts::FRAC_PI_2 {
                (0, n_cols - 1)
            } else {
                let dlon = s.asin().to_degrees();
                (
                    (to_col(lon0 - dlon) - 1).max(0),
                    (to_col(lon0 + dlon) + 2).min(n_cols - 1),
                )
            };
        for row in r_lo..=r_hi {
            for col in c_lo..=c_hi {
                let (row, col) = (row as usize, col as usize);
                if grid.zone_index(row, col).is_none() {
                    continue;
                }
                let (lat, lon) = grid.cell_center_deg(row, col);
                let Ok(c) = GeoPoint::new(lat, lon) else {
                    continue;
                };
                if haversine_distance(c, zone.center) <= zone.radius_km {
                    masks[grid.index(row, col)] &= clear;
                }
            }
        }
    }
}

/// Raster of available channels given precomputed exclusion disks.
pub fn raster_from_zones(
    grid: &RasterGrid,
    zones: &[ExclusionZone],
    method: Method,
    params: RegulatoryParams,
) -> AvailabilityRaster {
    let mut masks: Vec<u16> = grid
        .mask()
        .iter()
        .map(|z| if z.is_some() { ALL_CHANNELS } else { 0 })
        .collect();
    apply_exclusions(grid, &mut masks, zones);
    AvailabilityRaster {
        grid: grid.clone(),
        masks,
        method,
        params,
    }
}

/// Available channels at every cell centre of `grid` for `towers` under `method`.
pub fn availability_raster(
    grid: &RasterGrid,
    towers: &[Transmitter],
    params: &RegulatoryParams,
    method: Method,
) -> Result<AvailabilityRaster, WsmapError> {
    let zones = exclusion_zones_all(towers, params, method)?;
    Ok(raster_from_zones(grid, &zones, method, *params))
}

/// Area-weighted share of masked cells with at least `k` free channels,
/// for `k` in `0..=15`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfTable {
    percent: [f64; N_CHANNELS + 1],
}

impl CcdfTable {
    fn from_count_areas(areas: &[f64; N_CHANNELS + 1]) -> Result<Self, WsmapError> {
        let mut suffix = [0.0; N_CHANNELS + 1];
        let mut acc = 0.0;
        for k in (0..=N_CHANNELS).rev() {
            acc += areas[k];
            suffix[k] = acc;
        }
        let total = suffix[0];
        if total <= 0.0 {
            return Err(WsmapError::NoMaskedArea);
        }
        let mut percent = [0.0; N_CHANNELS + 1];
        for k in 0..=N_CHANNELS {
            percent[k] = 100.0 * (suffix[k] / total);
        }
        Ok(Self { percent })
    }

    /// `(k, percent)` pairs for k = 0..=15.
    pub fn rows(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        self.percent.iter().enumerate().map(|(k, &p)| (k as u8, p))
    }

    pub fn at_least(&self, k: i64) -> Result<f64, WsmapError> {
        usize::try_from(k)
            .ok()
            .and_then(|i| self.percent.get(i).copied())
            .ok_or(WsmapError::CountOutOfRange(k))
    }

    /// Mean available count implied by the table, `sum_{k>=1} P(>=k)`.
    pub fn mean(&self) -> f64 {
        self.percent[1..].iter().map(|p| p / 100.0).sum()
    }
}

pub fn ccdf(r: &AvailabilityRaster) -> Result<CcdfTable, WsmapError> {
    CcdfTable::from_count_areas(&r.count_areas(None))
}

pub fn zone_ccdf(r: &AvailabilityRaster, zone: &str) -> Result<CcdfTable, WsmapError> {
    let z = r.zone_index(zone)?;
    CcdfTable::from_count_areas(&r.count_areas(Some(z)))
}

/// Area-weighted mean number of free channels over the cells of `zone`.
pub fn zone_average(r: &AvailabilityRaster, zone: &str) -> Result<f64, WsmapError> {
    Ok(zone_ccdf(r, zone)?.mean())
}

/// Area-weighted mean over every masked cell.
pub fn overall_average(r: &AvailabilityRaster) -> Result<f64, WsmapError> {
    Ok(ccdf(r)?.mean())
}

/// Mean free channels computed as `sum_k k * area_k / area`, independent of
/// the CCDF path.
pub fn weighted_mean_count(r: &AvailabilityRaster, zone: Option<&str>) -> Result<f64, WsmapError> {
    let z = zone.map(|name| r.zone_index(name)).transpose()?;
    let areas = r.count_areas(z);
    let total: f64 = areas.iter().sum();
    if total <= 0.0 {
        return Err(WsmapError::NoMaskedArea);
    }
    Ok(areas
        .iter()
        .enumerate()
        .map(|(k, a)| k as f64 * a)
        .sum::<f64>()
        / total)
}

pub fn percent_area_with_at_least(r: &AvailabilityRaster, k: i64) -> Result<f64, WsmapError> {
    if !(0..=N_CHANNELS as i64).contains(&k) {
        return Err(WsmapError::CountOutOfRange(k));
    }
    ccdf(r)?.at_least(k)
}
