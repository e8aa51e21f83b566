//! Tower CSV schema: `id,lat,lon,power,power_unit,channel,haat_m,env,zone`.

use std::io::{Read, Write};
use std::path::Path;

use super::{io_err, DataError};
use crate::geo::GeoPoint;
use crate::propagation::Environment;
use crate::regulatory::Transmitter;

pub const TOWER_HEADER: [&str; 9] = [
    "id",
    "lat",
    "lon",
    "power",
    "power_unit",
    "channel",
    "haat_m",
    "env",
    "zone",
];

/// Transmit power in dBm for a value given in kilowatts.
pub fn kw_to_dbm(kw: f64) -> f64 {
    10.0 * (kw * 1e6).log10()
}

fn parse_row(rec: &csv::StringRecord, line: u64) -> Result<Transmitter, DataError> {
    let bad = |reason: String| DataError::Row { line, reason };
    if rec.len() != TOWER_HEADER.len() {
        return Err(bad(format!(
            "expected {} fields, got {}",
            TOWER_HEADER.len(),
            rec.len()
        )));
    }
    let num = |i: usize| -> Result<f64, DataError> {
        rec[i]
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(format!("{} '{}' is not a number", TOWER_HEADER[i], &rec[i])))
    };
    let id = rec[0].trim();
    if id.is_empty() {
        return Err(bad("empty id".into()));
    }
    let location = GeoPoint::new(num(1)?, num(2)?).map_err(|e| bad(e.to_string()))?;
    let power = num(3)?;
    let power_dbm = match rec[4].trim() {
        "kW" | "kw" => {
            if power <= 0.0 {
                return Err(bad(format!("power {power} kW must be positive")));
            }
            kw_to_dbm(power)
        }
        "dBm" | "dbm" => power,
        other => return Err(bad(format!("unknown power unit '{other}'"))),
    };
    let channel: i64 = rec[5]
        .trim()
        .parse()
        .map_err(|_| bad(format!("channel '{}' is not an integer", &rec[5])))?;
    if !(21..=35).contains(&channel) {
        return Err(bad(format!("channel {channel} outside 21..=35")));
    }
    let env: Environment = rec[7]
        .trim()
        .parse()
        .map_err(|e: crate::propagation::PropagationError| bad(e.to_string()))?;
    Transmitter::new(
        id,
        location,
        power_dbm,
        channel as u8,
        num(6)?,
        env,
        rec[8].trim(),
    )
    .map_err(|e| bad(e.to_string()))
}

/// Reads towers from any CSV source. Lines starting with `#` are skipped.
pub fn read_tower_csv(reader: impl Read) -> Result<Vec<Transmitter>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names != TOWER_HEADER {
        return Err(DataError::Row {
            line: 1,
            reason: format!("header must be {}", TOWER_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let tx = parse_row(&rec, line)?;
        if !ids.insert(tx.id.clone()) {
            return Err(DataError::Row {
                line,
                reason: format!("duplicate id '{}'", tx.id),
            });
        }
        out.push(tx);
    }
    Ok(out)
}

pub fn parse_tower_csv(path: impl AsRef<Path>) -> Result<Vec<Transmitter>, DataError> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(io_err(path))?;
    read_tower_csv(f)
}

/// Writes towers with power in dBm.
pub fn write_tower_csv(towers: &[Transmitter], mut w: impl Write) -> Result<(), DataError> {
    let mut buf = String::new();
    buf.push_str(&TOWER_HEADER.join(","));
    buf.push('\n');
    for t in towers {
        buf.push_str(&format!(
            "{},{:.4},{:.4},{:.4},dBm,{},{:.4},{},{}\n",
            t.id,
            t.location.lat_deg(),
            t.location.lon_deg(),
            t.power_dbm,
            t.channel,
            t.antenna_height_m,
            t.env,
            t.zone
        ));
    }
    w.write_all(buf.as_bytes()).map_err(|source| DataError::Io {
        path: "<tower csv>".into(),
        source,
    })
}
