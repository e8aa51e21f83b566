//! Seeded synthetic tower sets for zones without public tower data.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::towers::kw_to_dbm;
use super::DataError;
use crate::geo::{point_in_region, GeoPoint, ZoneRegion};
use crate::propagation::Environment;
use crate::regulatory::Transmitter;

/// How towers are spread over zones.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum DensityProfile {
    /// Expected share of each zone proportional to its planar area.
    #[default]
    AreaProportional,
    /// Explicit relative weights, one per zone.
    Weights(Vec<f64>),
}

impl DensityProfile {
    fn weights(&self, zones: &[ZoneRegion]) -> Result<Vec<f64>, DataError> {
        let w = match self {
            DensityProfile::AreaProportional => {
                zones.iter().map(|z| z.planar_area_deg2()).collect()
            }
            DensityProfile::Weights(w) => {
                if w.len() != zones.len() {
                    return Err(DataError::Sample(format!(
                        "{} weights for {} zones",
                        w.len(),
                        zones.len()
                    )));
                }
                w.clone()
            }
        };
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
            return Err(DataError::Sample(
                "weights must be non-negative with a positive sum".into(),
            ));
        }
        Ok(w)
    }
}

// (kW, HAAT range in m): low-power, 1 kW and high-power transmitters
const POWER_CLASSES: [(f64, f64, f64); 3] =
    [(0.05, 30.0, 60.0), (1.0, 60.0, 150.0), (10.0, 100.0, 200.0)];
const POWER_WEIGHTS: [f64; 3] = [0.5, 0.3, 0.2];
const ENV_WEIGHTS: [f64; 4] = [0.2, 0.3, 0.3, 0.2];

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Draws `count` towers inside `zones`. Identical inputs give identical
/// output on every platform.
pub fn gen_sample_towers(
    seed: u64,
    zones: &[ZoneRegion],
    count: usize,
    profile: &DensityProfile,
) -> Result<Vec<Transmitter>, DataError> {
    if count == 0 {
        return Err(DataError::Sample("count must be positive".into()));
    }
    if zones.is_empty() {
        return Err(DataError::Sample("no zones".into()));
    }
    if let Some(z) = zones.iter().find(|z| z.planar_area_deg2() <= 0.0) {
        return Err(DataError::Sample(format!(
            "zone '{}' has zero area",
            z.name()
        )));
    }
    let zone_pick = WeightedIndex::new(profile.weights(zones)?)
        .map_err(|e| DataError::Sample(e.to_string()))?;
    let power_pick = WeightedIndex::new(POWER_WEIGHTS).expect("static weights");
    let env_pick = WeightedIndex::new(ENV_WEIGHTS).expect("static weights");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_zone = vec![0usize; zones.len()];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let zi = zone_pick.sample(&mut rng);
        let zone = &zones[zi];
        let location = sample_point(&mut rng, zone)?;
        let (kw, h_lo, h_hi) = POWER_CLASSES[power_pick.sample(&mut rng)];
        let haat = rng.random_range(h_lo..=h_hi).round();
        let channel: u8 = rng.random_range(21..=34);
        let env = Environment::ALL[env_pick.sample(&mut rng)];
        per_zone[zi] += 1;
        let id = format!("{}-{:04}", zone.name(), per_zone[zi]);
        out.push(Transmitter::new(
            id,
            location,
            round4(kw_to_dbm(kw)),
            channel,
            haat,
            env,
            zone.name(),
        )?);
    }
    Ok(out)
}

fn sample_point(rng: &mut ChaCha8Rng, zone: &ZoneRegion) -> Result<GeoPoint, DataError> {
    let (lat0, lon0, lat1, lon1) = zone.bounds();
    for _ in 0..100_000 {
        let lat = round4(rng.random_range(lat0..=lat1));
        let lon = round4(rng.random_range(lon0..=lon1));
        let p = GeoPoint::new(lat, lon)?;
        if point_in_region(p, zone) {
            return Ok(p);
        }
    }
    Err(DataError::Sample(format!(
        "could not place a tower in zone '{}'",
        zone.name()
    )))
}
