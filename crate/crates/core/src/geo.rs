//! Geographic primitives: points, great-circle distance, zone polygons and
//! the equirectangular raster grid that all area statistics are computed on.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

/// Mean earth radius used for every distance in the crate.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Kilometres per degree of arc used for cell areas.
pub const KM_PER_DEGREE: f64 = 111.19;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("invalid coordinate: lat {lat}, lon {lon}")]
    InvalidPoint { lat: f64, lon: f64 },
    #[error("zone '{0}' needs at least 3 distinct vertices")]
    DegeneratePolygon(String),
    #[error("zone '{0}' has zero area")]
    ZeroArea(String),
    #[error("zone '{0}' boundary intersects itself")]
    SelfIntersecting(String),
    #[error("resolution must be in (0, 1] degrees, got {0}")]
    BadResolution(f64),
    #[error("no zones given")]
    NoZones,
    #[error("cell ({row}, {col}) outside {n_rows}x{n_cols} grid")]
    CellOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("geojson: {0}")]
    GeoJson(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A validated latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat_deg: f64,
    lon_deg: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self, GeoError> {
        let ok = lat_deg.is_finite()
            && lon_deg.is_finite()
            && (-90.0..=90.0).contains(&lat_deg)
            && (-180.0..=180.0).contains(&lon_deg);
        if !ok {
            return Err(GeoError::InvalidPoint {
                lat: lat_deg,
                lon: lon_deg,
            });
        }
        Ok(Self { lat_deg, lon_deg })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.4}, {:.4})", self.lat_deg, self.lon_deg)
    }
}

/// Great-circle distance in kilometres on a sphere of radius [`EARTH_RADIUS_KM`].
pub fn haversine_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat_deg.to_radians(), b.lat_deg.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon_deg - a.lon_deg).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// A named zone bounded by a simple polygon (exterior ring only).
///
/// Vertices are treated as planar (lon, lat) coordinates for containment.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneRegion {
    name: String,
    boundary: Vec<GeoPoint>,
}

impl ZoneRegion {
    /// Builds a zone from its boundary ring. A repeated closing vertex is
    /// accepted and dropped.
    pub fn new(name: impl Into<String>, mut boundary: Vec<GeoPoint>) -> Result<Self, GeoError> {
        let name = name.into();
        if boundary.len() > 1 && boundary.first() == boundary.last() {
            boundary.pop();
        }
        boundary.dedup();
        if boundary.len() < 3 {
            return Err(GeoError::DegeneratePolygon(name));
        }
        let zone = Self { name, boundary };
        if zone.self_intersects() {
            return Err(GeoError::SelfIntersecting(zone.name));
        }
        if zone.planar_area_deg2() <= 0.0 {
            return Err(GeoError::ZeroArea(zone.name));
        }
        Ok(zone)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn boundary(&self) -> &[GeoPoint] {
        &self.boundary
    }

    fn edges(&self) -> impl Iterator<Item = (GeoPoint, GeoPoint)> + '_ {
        let n = self.boundary.len();
        (0..n).map(move |i| (self.boundary[i], self.boundary[(i + 1) % n]))
    }

    /// Unsigned shoelace area in square degrees.
    pub fn planar_area_deg2(&self) -> f64 {
        self.edges()
            .map(|(a, b)| a.lon_deg * b.lat_deg - b.lon_deg * a.lat_deg)
            .sum::<f64>()
            .abs()
            / 2.0
    }

    /// (min_lat, min_lon, max_lat, max_lon)
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.boundary.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), p| {
                (
                    a.min(p.lat_deg),
                    b.min(p.lon_deg),
                    c.max(p.lat_deg),
                    d.max(p.lon_deg),
                )
            },
        )
    }

    fn self_intersects(&self) -> bool {
        let edges: Vec<_> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                // neighbouring edges share a vertex by construction
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(edges[i], edges[j]) {
                    return true;
                }
            }
        }
        false
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn xy(p: GeoPoint) -> (f64, f64) {
    (p.lon_deg, p.lat_deg)
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    let scale = (b.0 - a.0).abs().max((b.1 - a.1).abs()).max(1.0);
    cross(a, b, p).abs() <= 1e-12 * scale * scale
        && p.0 >= a.0.min(b.0) - 1e-12
        && p.0 <= a.0.max(b.0) + 1e-12
        && p.1 >= a.1.min(b.1) - 1e-12
        && p.1 <= a.1.max(b.1) + 1e-12
}

fn segments_intersect(s: (GeoPoint, GeoPoint), t: (GeoPoint, GeoPoint)) -> bool {
    let (p1, p2, p3, p4) = (xy(s.0), xy(s.1), xy(t.0), xy(t.1));
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(p1, p3, p4)
        || on_segment(p2, p3, p4)
        || on_segment(p3, p1, p2)
        || on_segment(p4, p1, p2)
}

/// Even-odd ray casting; points on the boundary count as inside.
pub fn point_in_region(p: GeoPoint, zone: &ZoneRegion) -> bool {
    let q = xy(p);
    if zone.edges().any(|(a, b)| on_segment(q, xy(a), xy(b))) {
        return true;
    }
    let mut inside = false;
    for (a, b) in zone.edges() {
        let (a, b) = (xy(a), xy(b));
        if (a.1 > q.1) != (b.1 > q.1) {
            let x_at = a.0 + (q.1 - a.1) * (b.0 - a.0) / (b.1 - a.1);
            if q.0 < x_at {
                inside = !inside;
            }
        }
    }
    inside
}

/// Equirectangular grid over the union bounding box of a set of zones.
///
/// Row 0 is the southernmost row; column 0 the westernmost.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    origin: GeoPoint,
    resolution_deg: f64,
    n_rows: usize,
    n_cols: usize,
    zone_names: Vec<String>,
    mask: Vec<Option<u16>>,
}

impl RasterGrid {
    pub fn origin(&self) -> GeoPoint {
        self.origin
    }

    pub fn resolution_deg(&self) -> f64 {
        self.resolution_deg
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Zone names in input order; mask entries index into this list.
    pub fn zone_names(&self) -> &[String] {
        &self.zone_names
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n_cols + col
    }

    fn check(&self, row: usize, col: usize) -> Result<(), GeoError> {
        if row >= self.n_rows || col >= self.n_cols {
            return Err(GeoError::CellOutOfRange {
                row,
                col,
                n_rows: self.n_rows,
                n_cols: self.n_cols,
            });
        }
        Ok(())
    }

    /// Centre of a cell as raw (lat, lon) degrees.
    pub fn cell_center_deg(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin.lat_deg + (row as f64 + 0.5) * self.resolution_deg,
            self.origin.lon_deg + (col as f64 + 0.5) * self.resolution_deg,
        )
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Result<GeoPoint, GeoError> {
        self.check(row, col)?;
        let (lat, lon) = self.cell_center_deg(row, col);
        GeoPoint::new(lat, lon)
    }

    /// Index into [`zone_names`](Self::zone_names) of the zone owning this cell.
    pub fn zone_index(&self, row: usize, col: usize) -> Option<usize> {
        self.mask
            .get(self.index(row, col))
            .copied()
            .flatten()
            .map(usize::from)
    }

    pub fn zone_of(&self, row: usize, col: usize) -> Option<&str> {
        self.zone_index(row, col)
            .map(|i| self.zone_names[i].as_str())
    }

    /// Flat mask in row-major order.
    pub fn mask(&self) -> &[Option<u16>] {
        &self.mask
    }

    /// Area in km² of one cell, weighted by the cosine of its centre latitude.
    pub fn cell_area(&self, row: usize, col: usize) -> Result<f64, GeoError> {
        self.check(row, col)?;
        Ok(self.row_cell_area(row))
    }

    pub(crate) fn row_cell_area(&self, row: usize) -> f64 {
        let (lat, _) = self.cell_center_deg(row, 0);
        let side = self.resolution_deg * KM_PER_DEGREE;
        (side * side * lat.to_radians().cos()).max(0.0)
    }

    /// Row-major iterator over `(row, col, zone_index)` for every masked cell.
    pub fn masked_cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(move |(i, z)| z.map(|z| (i / self.n_cols, i % self.n_cols, usize::from(z))))
    }
}

/// Builds the raster covering the union bounding box of `zones`.
///
/// Each cell belongs to the first zone (in input order) whose polygon
/// contains the cell centre.
pub fn make_grid(zones: &[ZoneRegion], resolution_deg: f64) -> Result<RasterGrid, GeoError> {
    if !(resolution_deg > 0.0 && resolution_deg <= 1.0) {
        return Err(GeoError::BadResolution(resolution_deg));
    }
    if zones.is_empty() {
        return Err(GeoError::NoZones);
    }
    let (min_lat, min_lon, max_lat, max_lon) = zones.iter().map(ZoneRegion::bounds).fold(
        (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ),
        |acc, b| {
            (
                acc.0.min(b.0),
                acc.1.min(b.1),
                acc.2.max(b.2),
                acc.3.max(b.3),
            )
        },
    );
    let span = |lo: f64, hi: f64| (((hi - lo) / resolution_deg) - 1e-9).ceil().max(1.0) as usize;
    let n_rows = span(min_lat, max_lat);
    let n_cols = span(min_lon, max_lon);
    let origin = GeoPoint::new(min_lat, min_lon)?;

    let mut grid = RasterGrid {
        origin,
        resolution_deg,
        n_rows,
        n_cols,
        zone_names: zones.iter().map(|z| z.name.clone()).collect(),
        mask: Vec::new(),
    };
    let bounds: Vec<_> = zones.iter().map(ZoneRegion::bounds).collect();
    let mask: Vec<Option<u16>> = (0..n_rows)
        .into_par_iter()
        .flat_map_iter(|row| {
            let grid = &grid;
            let bounds = &bounds;
            (0..n_cols).map(move |col| {
                let (lat, lon) = grid.cell_center_deg(row, col);
                let p = GeoPoint {
                    lat_deg: lat,
                    lon_deg: lon,
                };
                zones
                    .iter()
                    .zip(bounds)
                    .position(|(z, b)| {
                        lat >= b.0
                            && lat <= b.2
                            && lon >= b.1
                            && lon <= b.3
                            && point_in_region(p, z)
                    })
                    .map(|i| i as u16)
            })
        })
        .collect();
    grid.mask = mask;
    Ok(grid)
}

/// Parses a GeoJSON FeatureCollection of Polygon features carrying a
/// `name` property. Polygons with holes are rejected.
pub fn parse_zones_geojson(text: &str) -> Result<Vec<ZoneRegion>, GeoError> {
    let err = |m: &str| GeoError::GeoJson(m.to_string());
    let doc: Value = serde_json::from_str(text).map_err(|e| GeoError::GeoJson(e.to_string()))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(err("expected a FeatureCollection"));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing features array"))?;
    let mut zones = Vec::with_capacity(features.len());
    for (i, f) in features.iter().enumerate() {
        let name = f
            .pointer("/properties/name")
            .and_then(Value::as_str)
            .ok_or_else(|| GeoError::GeoJson(format!("feature {i} has no name property")))?;
        let geom = f
            .get("geometry")
            .ok_or_else(|| GeoError::GeoJson(format!("feature {i} has no geometry")))?;
        if geom.get("type").and_then(Value::as_str) != Some("Polygon") {
            return Err(GeoError::GeoJson(format!(
                "feature '{name}' is not a Polygon"
            )));
        }
        let rings = geom
            .get("coordinates")
            .and_then(Value::as_array)
            .ok_or_else(|| GeoError::GeoJson(format!("feature '{name}' has no coordinates")))?;
        match rings.len() {
            0 => return Err(GeoError::GeoJson(format!("feature '{name}' has no rings"))),
            1 => {}
            _ => return Err(GeoError::GeoJson(format!("feature '{name}' has holes"))),
        }
        let ring = rings[0]
            .as_array()
            .ok_or_else(|| GeoError::GeoJson(format!("feature '{name}' ring is not an array")))?;
        let mut pts = Vec::with_capacity(ring.len());
        for pos in ring {
            let lon = pos.get(0).and_then(Value::as_f64);
            let lat = pos.get(1).and_then(Value::as_f64);
            match (lat, lon) {
                (Some(lat), Some(lon)) => pts.push(GeoPoint::new(lat, lon)?),
                _ => {
                    return Err(GeoError::GeoJson(format!(
                        "feature '{name}' has a bad position"
                    )))
                }
            }
        }
        zones.push(ZoneRegion::new(name, pts)?);
    }
    Ok(zones)
}

pub fn load_zones_geojson(path: impl AsRef<Path>) -> Result<Vec<ZoneRegion>, GeoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GeoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_zones_geojson(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn square(name: &str, lat0: f64, lon0: f64, side: f64) -> ZoneRegion {
        ZoneRegion::new(
            name,
            vec![
                pt(lat0, lon0),
                pt(lat0, lon0 + side),
                pt(lat0 + side, lon0 + side),
                pt(lat0 + side, lon0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_out_of_range_points() {
        assert!(GeoPoint::new(91.0, 0.0).is_err());
        assert!(GeoPoint::new(0.0, -180.5).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn haversine_identity_and_degree() {
        let pune = pt(18.37, 73.75);
        assert_eq!(haversine_distance(pune, pune), 0.0);
        // 6371 * pi / 180
        let d = haversine_distance(pt(0.0, 0.0), pt(0.0, 1.0));
        assert!((d - 111.19).abs() < 0.01, "{d}");
        let d2 = haversine_distance(pt(0.0, 0.0), pt(1.0, 0.0));
        assert!((d - d2).abs() < 1e-9);
    }

    #[test]
    fn containment_basics() {
        let tri = ZoneRegion::new("t", vec![pt(0.0, 0.0), pt(0.0, 3.0), pt(3.0, 0.0)]).unwrap();
        assert!(point_in_region(pt(1.0, 1.0), &tri));
        assert!(!point_in_region(pt(5.0, 5.0), &tri));
        assert!(point_in_region(pt(0.0, 0.0), &tri));
        assert!(point_in_region(pt(0.0, 1.5), &tri));
        assert!(!point_in_region(pt(2.0, 2.0), &tri));
    }

    #[test]
    fn degenerate_and_bowtie_rejected() {
        assert!(matches!(
            ZoneRegion::new("x", vec![pt(0.0, 0.0), pt(1.0, 1.0)]),
            Err(GeoError::DegeneratePolygon(_))
        ));
        assert!(matches!(
            ZoneRegion::new("x", vec![pt(0.0, 0.0), pt(1.0, 1.0), pt(2.0, 2.0)]),
            Err(GeoError::ZeroArea(_))
        ));
        let bowtie = vec![pt(0.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0), pt(1.0, 0.0)];
        assert!(matches!(
            ZoneRegion::new("x", bowtie),
            Err(GeoError::SelfIntersecting(_))
        ));
    }

    #[test]
    fn closing_vertex_dropped() {
        let z = ZoneRegion::new(
            "z",
            vec![pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 1.0), pt(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(z.boundary().len(), 3);
    }

    #[test]
    fn grid_cell_counts() {
        let z = square("a", 10.0, 70.0, 1.0);
        let g = make_grid(std::slice::from_ref(&z), 0.5).unwrap();
        assert_eq!((g.n_rows(), g.n_cols()), (2, 2));
        assert_eq!(g.masked_cells().count(), 4);
        let g = make_grid(&[z], 0.25).unwrap();
        assert_eq!(g.masked_cells().count(), 16);
    }

    #[test]
    fn grid_errors() {
        let z = square("a", 10.0, 70.0, 1.0);
        assert!(matches!(make_grid(&[], 0.5), Err(GeoError::NoZones)));
        assert!(matches!(
            make_grid(std::slice::from_ref(&z), 0.0),
            Err(GeoError::BadResolution(_))
        ));
        assert!(matches!(
            make_grid(&[z], 1.5),
            Err(GeoError::BadResolution(_))
        ));
    }

    #[test]
    fn disjoint_zones_match_bruteforce() {
        let zones = vec![
            square("a", 10.0, 70.0, 1.0),
            ZoneRegion::new("b", vec![pt(10.2, 72.0), pt(10.4, 73.9), pt(11.8, 72.5)]).unwrap(),
        ];
        let g = make_grid(&zones, 0.1).unwrap();
        for row in 0..g.n_rows() {
            for col in 0..g.n_cols() {
                let c = g.cell_center(row, col).unwrap();
                let expected = zones
                    .iter()
                    .find(|z| point_in_region(c, z))
                    .map(|z| z.name());
                assert_eq!(g.zone_of(row, col), expected);
            }
        }
        assert!(g.masked_cells().any(|(_, _, z)| z == 1));
    }

    #[test]
    fn overlap_resolved_by_order() {
        let zones = vec![
            square("first", 0.0, 0.0, 1.0),
            square("second", 0.0, 0.0, 1.0),
        ];
        let g = make_grid(&zones, 0.5).unwrap();
        assert!(g.masked_cells().all(|(_, _, z)| z == 0));
    }

    #[test]
    fn cell_area_values() {
        let eq = make_grid(&[square("e", -0.5, 0.0, 1.0)], 1.0).unwrap();
        let a = eq.cell_area(0, 0).unwrap();
        assert!((a - 12363.3).abs() < 0.5, "{a}");
        let hi = make_grid(&[square("h", 59.5, 0.0, 1.0)], 1.0).unwrap();
        let b = hi.cell_area(0, 0).unwrap();
        assert!((b / a - 0.5).abs() < 0.005);
        let half = make_grid(&[square("q", -0.5, 0.0, 1.0)], 0.5).unwrap();
        // row 1 centre sits at lat 0.25
        let q = half.cell_area(1, 0).unwrap() / (0.25f64).to_radians().cos();
        assert!((q - a / 4.0).abs() < 1e-6);
        assert!(matches!(
            eq.cell_area(1, 0),
            Err(GeoError::CellOutOfRange { .. })
        ));
    }

    #[test]
    fn geojson_parsing() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"name":"west"},
             "geometry":{"type":"Polygon","coordinates":[[[70,10],[71,10],[71,11],[70,11],[70,10]]]}}]}"#;
        let zones = parse_zones_geojson(text).unwrap();
        assert_eq!(zones.len(), 1);
        assert_eq!(zones[0].name(), "west");
        assert!(point_in_region(pt(10.5, 70.5), &zones[0]));

        let holed = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"name":"h"},
             "geometry":{"type":"Polygon","coordinates":[
               [[0,0],[4,0],[4,4],[0,4],[0,0]],[[1,1],[2,1],[2,2],[1,1]]]}}]}"#;
        assert!(matches!(
            parse_zones_geojson(holed),
            Err(GeoError::GeoJson(_))
        ));
    }
}
