//! UHF TV white space estimation from a terrestrial transmitter database.
//!
//! Exclusion radii are computed per tower with the Okumura-Hata model under
//! three rules (pollution viewpoint, protection viewpoint, FCC Grade-B),
//! rasterised over zone polygons, and summarised as area-weighted channel
//! statistics. [`reassign`] relabels tower channels so that overlapping
//! coverage areas are never on the same or adjacent channels.

pub mod dataio;
pub mod geo;
pub mod propagation;
pub mod reassign;
pub mod regulatory;
pub mod wsmap;

pub use geo::{GeoPoint, RasterGrid, ZoneRegion};
pub use propagation::{BandPlan, Environment, RangePolicy};
pub use regulatory::{ExclusionZone, Method, Preset, RegulatoryParams, Transmitter};
pub use wsmap::AvailabilityRaster;
