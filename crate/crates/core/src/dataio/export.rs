//! Report and raster writers. Every numeric value is printed with four
//! decimals and every table starts with a `#` provenance line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{io_err, DataError};
use crate::geo::RasterGrid;
use crate::reassign::{distinct, Reassignment};
use crate::regulatory::{
    Discrepancy, ExclusionZone, Method, Preset, RegulatoryParams, Transmitter,
};
use crate::wsmap::{
    availability_raster, ccdf, overall_average, percent_area_with_at_least, zone_average,
    zone_ccdf, AvailabilityRaster, N_CHANNELS,
};

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.flush().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e.error,
    })?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn radii_csv(zones: &[ExclusionZone], provenance: &str) -> String {
    let mut out = format!("# {provenance}\ntower_id,channel,kind,radius_km,extrapolated,clamped\n");
    for z in zones {
        let _ = writeln!(
            out,
            "{},{},{},{:.4},{},{}",
            csv_field(&z.tower_id),
            z.channel,
            z.kind,
            z.radius_km,
            z.extrapolated,
            z.clamped
        );
    }
    out
}

pub fn discrepancy_csv(rows: &[(String, Vec<Discrepancy>)], provenance: &str) -> String {
    let mut out = format!(
        "# {provenance}\ntower_id,radius,reference_km,computed_km,relative_error,within_tolerance,extrapolated,clamped\n"
    );
    for (id, list) in rows {
        for d in list {
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4},{:.4},{},{},{}",
                csv_field(id),
                d.label,
                d.reference_km,
                d.computed.km,
                d.relative_error(),
                d.within_tolerance(),
                d.computed.extrapolated,
                d.computed.clamped
            );
        }
    }
    out
}

/// One line per masked cell: `row,col,lat,lon,zone,bitmask,count`.
pub fn raster_csv(r: &AvailabilityRaster, provenance: &str) -> String {
    let g = r.grid();
    let mut out = format!("# {provenance}\nrow,col,lat,lon,zone,bitmask,count\n");
    for (row, col, z) in g.masked_cells() {
        let (lat, lon) = g.cell_center_deg(row, col);
        let mask = r.mask(row, col).unwrap_or(0);
        let _ = writeln!(
            out,
            "{row},{col},{lat:.4},{lon:.4},{},{mask:04x},{}",
            csv_field(&g.zone_names()[z]),
            mask.count_ones()
        );
    }
    out
}

/// `(row, col, bitmask)` triples read back from [`raster_csv`] output.
pub fn read_raster_csv(reader: impl BufRead) -> Result<Vec<(usize, usize, u16)>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| DataError::Row {
            line,
            reason: format!("bad {what}"),
        };
        let row = rec
            .get(0)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("row"))?;
        let col = rec
            .get(1)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("col"))?;
        let mask = rec
            .get(5)
            .and_then(|v| u16::from_str_radix(v, 16).ok())
            .ok_or_else(|| bad("bitmask"))?;
        out.push((row, col, mask));
    }
    Ok(out)
}

/// Cell polygons of every masked cell with `channels` (free count) and
/// `bitmask` properties.
pub fn raster_geojson(r: &AvailabilityRaster, provenance: &str) -> String {
    let g = r.grid();
    let half = g.resolution_deg() / 2.0;
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"type\":\"FeatureCollection\",\"properties\":{{\"provenance\":{}}},\"features\":[",
        serde_json::Value::String(provenance.to_string())
    );
    let mut first = true;
    for (row, col, z) in g.masked_cells() {
        let (lat, lon) = g.cell_center_deg(row, col);
        let mask = r.mask(row, col).unwrap_or(0);
        let (s, n, w, e) = (lat - half, lat + half, lon - half, lon + half);
        if !first {
            out.push(',');
        }
        first = false;
        let _ = write!(
            out,
            "\n{{\"type\":\"Feature\",\"properties\":{{\"row\":{row},\"col\":{col},\"zone\":{},\"bitmask\":\"{mask:04x}\",\"channels\":{}}},\
             \"geometry\":{{\"type\":\"Polygon\",\"coordinates\":[[[{w:.4},{s:.4}],[{e:.4},{s:.4}],[{e:.4},{n:.4}],[{w:.4},{n:.4}],[{w:.4},{s:.4}]]]}}}}",
            serde_json::Value::String(g.zone_names()[z].clone()),
            mask.count_ones()
        );
    }
    out.push_str("\n]}\n");
    out
}

pub fn ccdf_csv(r: &AvailabilityRaster, provenance: &str) -> Result<String, DataError> {
    let all = ccdf(r)?;
    // zones without any cell have no distribution
    let zones: Vec<_> = r
        .grid()
        .zone_names()
        .iter()
        .filter_map(|z| zone_ccdf(r, z).ok().map(|t| (z, t)))
        .collect();
    let mut out = format!("# {provenance}\nk,all");
    for (z, _) in &zones {
        out.push(',');
        out.push_str(&csv_field(z));
    }
    out.push('\n');
    for k in 0..=N_CHANNELS as i64 {
        let _ = write!(out, "{k},{:.4}", all.at_least(k)?);
        for (_, t) in &zones {
            let _ = write!(out, ",{:.4}", t.at_least(k)?);
        }
        out.push('\n');
    }
    Ok(out)
}

/// One configuration row of the zone-average and percent-area tables.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub preset: Preset,
    pub method: Method,
    pub parameters: String,
    pub include_adjacent: bool,
    /// Zone averages in grid zone order; `None` for zones without cells.
    pub zone_averages: Vec<Option<f64>>,
    pub overall_average: f64,
    /// Percent of area with at least 10, 12 and 15 free channels.
    pub percent_at_least: [f64; 3],
}

fn describe(preset: Preset, p: &RegulatoryParams, adjacent: bool) -> String {
    match preset.method() {
        Method::Pollution | Method::Intersection if adjacent => format!(
            "gamma={} dB; adjacent gamma={} dB",
            p.gamma_co_db, p.gamma_adj_db
        ),
        Method::Pollution | Method::Intersection => format!("gamma={} dB", p.gamma_co_db),
        Method::Protection if adjacent => format!(
            "psi={} dB; adjacent psi={} dB",
            p.psi_db,
            p.psi_db + p.psi_adj_extra_db
        ),
        Method::Protection => format!("psi={} dB", p.psi_db),
        Method::Fcc => format!("E={} dBu", p.grade_b_dbu),
    }
}

/// Configurations of the zone-average table: each preset co-channel only,
/// then with adjacent-channel disks (the FCC rule has no adjacent variant).
pub fn stats_configs(
    presets: &[Preset],
    base: &RegulatoryParams,
) -> Vec<(Preset, RegulatoryParams)> {
    let mut out = Vec::new();
    for &preset in presets {
        let p = preset.apply_to(*base);
        out.push((
            preset,
            RegulatoryParams {
                include_adjacent: false,
                ..p
            },
        ));
        if preset.method() != Method::Fcc {
            out.push((
                preset,
                RegulatoryParams {
                    include_adjacent: true,
                    ..p
                },
            ));
        }
    }
    out
}

pub fn stats_rows(
    grid: &RasterGrid,
    towers: &[Transmitter],
    configs: &[(Preset, RegulatoryParams)],
) -> Result<Vec<StatsRow>, DataError> {
    configs
        .par_iter()
        .map(|(preset, p)| {
            let method = preset.method();
            let r = availability_raster(grid, towers, p, method)?;
            let zone_averages = grid
                .zone_names()
                .iter()
                .map(|z| zone_average(&r, z).ok())
                .collect();
            Ok(StatsRow {
                preset: *preset,
                method,
                parameters: describe(*preset, p, p.include_adjacent),
                include_adjacent: p.include_adjacent,
                zone_averages,
                overall_average: overall_average(&r)?,
                percent_at_least: [
                    percent_area_with_at_least(&r, 10)?,
                    percent_area_with_at_least(&r, 12)?,
                    percent_area_with_at_least(&r, 15)?,
                ],
            })
        })
        .collect()
}

fn opt4(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

pub fn zone_average_csv(rows: &[StatsRow], zone_names: &[String], provenance: &str) -> String {
    let mut out = format!("# {provenance}\nmethod,parameters,preset,include_adjacent");
    for z in zone_names {
        out.push(',');
        out.push_str(&csv_field(z));
    }
    out.push_str(",all\n");
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{}",
            r.method,
            csv_field(&r.parameters),
            r.preset,
            r.include_adjacent
        );
        for v in &r.zone_averages {
            out.push(',');
            out.push_str(&opt4(*v));
        }
        let _ = writeln!(out, ",{:.4}", r.overall_average);
    }
    out
}

pub fn percent_area_csv(rows: &[StatsRow], provenance: &str) -> String {
    let mut out = format!(
        "# {provenance}\nmethod,parameters,preset,include_adjacent,at_least_10,at_least_12,at_least_15\n"
    );
    for r in rows {
        let [a, b, c] = r.percent_at_least;
        let _ = writeln!(
            out,
            "{},{},{},{},{a:.4},{b:.4},{c:.4}",
            r.method,
            csv_field(&r.parameters),
            r.preset,
            r.include_adjacent
        );
    }
    out
}

pub fn assignment_csv(towers: &[Transmitter], r: &Reassignment, provenance: &str) -> String {
    let mut out = format!("# {provenance}\ntower_id,zone,old_channel,new_channel\n");
    for (t, new) in towers.iter().zip(r.assignment.channels()) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&t.id),
            csv_field(&t.zone),
            t.channel,
            new
        );
    }
    out
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ChannelCounts {
    pub towers: usize,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReassignSummary {
    pub method: &'static str,
    pub preset: String,
    pub basis: String,
    pub min_separation: u8,
    pub edges: usize,
    pub violations: usize,
    pub kept_original: bool,
    pub overall: ChannelCounts,
    pub zones: BTreeMap<String, ChannelCounts>,
}

pub fn reassign_summary(
    towers: &[Transmitter],
    r: &Reassignment,
    preset: Preset,
    basis: &str,
    min_separation: u8,
) -> ReassignSummary {
    let mut by_zone: BTreeMap<String, (Vec<u8>, Vec<u8>)> = BTreeMap::new();
    for (t, &new) in towers.iter().zip(r.assignment.channels()) {
        let e = by_zone.entry(t.zone.clone()).or_default();
        e.0.push(t.channel);
        e.1.push(new);
    }
    ReassignSummary {
        method: "reassign",
        preset: preset.to_string(),
        basis: basis.to_string(),
        min_separation,
        edges: r.graph.edges().len(),
        violations: r.assignment.violations().len(),
        kept_original: r.kept_original,
        overall: ChannelCounts {
            towers: towers.len(),
            before: distinct(&r.original),
            after: r.assignment.distinct_channels_used(),
        },
        zones: by_zone
            .into_iter()
            .map(|(z, (b, a))| {
                (
                    z,
                    ChannelCounts {
                        towers: a.len(),
                        before: distinct(&b),
                        after: distinct(&a),
                    },
                )
            })
            .collect(),
    }
}

/// Grey+alpha PNG, north up: intensity = 17 * free channels, alpha 0
/// outside the zones.
pub fn render_png(r: &AvailabilityRaster) -> Result<Vec<u8>, DataError> {
    let g = r.grid();
    let (w, h) = (g.n_cols(), g.n_rows());
    let mut data = Vec::with_capacity(w * h * 2);
    for row in (0..h).rev() {
        for col in 0..w {
            match r.available_count(row, col) {
                Some(n) => data.extend_from_slice(&[(n * 17) as u8, 255]),
                None => data.extend_from_slice(&[0, 0]),
            }
        }
    }
    let mut bytes = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut bytes, w as u32, h as u32);
        enc.set_color(png::ColorType::GrayscaleAlpha);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&data)?;
    }
    Ok(bytes)
}
