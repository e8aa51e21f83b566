//! `tvws` command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::RunConfig;
use super::export::{self, write_atomic};
use super::sample::{gen_sample_towers, DensityProfile};
use super::towers::{parse_tower_csv, write_tower_csv};
use super::DataError;
use crate::geo::{load_zones_geojson, make_grid, RasterGrid, ZoneRegion};
use crate::reassign::reassign_towers;
use crate::regulatory::{exclusion_zones_all, reference_discrepancies, Preset, Transmitter};
use crate::wsmap::{raster_from_zones, AvailabilityRaster};

#[derive(Debug, Parser)]
#[command(
    name = "tvws",
    version,
    about = "UHF TV white space estimation and channel reassignment"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Flat key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// pollution-5, pollution-10, pollution-15, protection-0.1, protection-1 or fcc
    #[arg(long)]
    preset: Option<String>,
    /// pollution, protection, fcc or intersection (defaults to the preset's method)
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    towers: Option<PathBuf>,
    /// GeoJSON FeatureCollection of named zone polygons
    #[arg(long)]
    zones: Option<PathBuf>,
    /// Grid resolution in degrees
    #[arg(long)]
    resolution: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate Hata outside its nominal range and flag the results (default)
    #[arg(long, conflicts_with = "strict")]
    extrapolate: bool,
    /// Reject inputs outside the nominal Hata range
    #[arg(long)]
    strict: bool,
    /// Co-channel disks only
    #[arg(long)]
    no_adjacent: bool,
    /// Any configuration key, e.g. --set rx_height_m=10
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exclusion disks of every tower
    Radii {
        #[command(flatten)]
        common: Common,
        /// Write computed vs published reference radii to this CSV
        #[arg(long)]
        discrepancy_report: Option<PathBuf>,
    },
    /// Write raster.csv and raster.geojson
    Rasterize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_geojson: bool,
    },
    /// Write zone-average and percent-area tables for every preset
    Stats {
        #[command(flatten)]
        common: Common,
    },
    /// Write the area CCDF of free channels
    Ccdf {
        #[command(flatten)]
        common: Common,
    },
    /// Reassign channels with the fewest distinct channels
    Reassign {
        #[command(flatten)]
        common: Common,
        /// Coverage radius: fcc (Grade-B) or protection
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        min_separation: Option<u8>,
    },
    /// Render the availability raster as a PNG
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded synthetic tower CSV
    GenSample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count: Option<usize>,
        /// Relative tower density per zone, comma separated, in zone order
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long)]
        output: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Run(DataError),
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Run(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn build_config(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &c.config {
        Some(p) if !p.exists() => {
            return Err(usage(format!("config file {} not found", p.display())))
        }
        Some(p) => RunConfig::load(p).map_err(|e| usage(e.to_string()))?,
        None => RunConfig::default(),
    };
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| pairs.push((k.to_string(), v));
    if let Some(v) = &c.preset {
        push("preset", v.clone());
    }
    if let Some(v) = &c.method {
        push("method", v.clone());
    }
    if let Some(v) = &c.towers {
        push("towers", v.display().to_string());
    }
    if let Some(v) = &c.zones {
        push("zones", v.display().to_string());
    }
    if let Some(v) = c.resolution {
        push("resolution", v.to_string());
    }
    if let Some(v) = &c.out {
        push("out", v.display().to_string());
    }
    if c.strict {
        push("extrapolate", "false".into());
    }
    if c.extrapolate {
        push("extrapolate", "true".into());
    }
    if c.no_adjacent {
        push("include_adjacent", "false".into());
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        push(k, v.to_string());
    }
    for (k, v) in pairs {
        cfg.set(&k, &v).map_err(|e| usage(e.to_string()))?;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn existing<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    match p {
        None => Err(usage(format!("missing --{flag}"))),
        Some(p) if !p.exists() => Err(usage(format!("{} not found", p.display()))),
        Some(p) => Ok(p),
    }
}

fn load_towers(cfg: &RunConfig) -> Result<Vec<Transmitter>, CliError> {
    Ok(parse_tower_csv(existing(&cfg.towers, "towers")?)?)
}

fn load_zones(cfg: &RunConfig) -> Result<Vec<ZoneRegion>, CliError> {
    Ok(load_zones_geojson(existing(&cfg.zones, "zones")?).map_err(DataError::from)?)
}

fn load_grid(cfg: &RunConfig) -> Result<RasterGrid, CliError> {
    Ok(make_grid(&load_zones(cfg)?, cfg.resolution_deg).map_err(DataError::from)?)
}

fn warn_extrapolated(err: &mut dyn Write, zones: &[crate::regulatory::ExclusionZone]) {
    let n = zones.iter().filter(|z| z.extrapolated).count();
    let c = zones.iter().filter(|z| z.clamped).count();
    if n > 0 {
        let _ = writeln!(
            err,
            "warning: {n} of {} radii evaluated outside the nominal Hata range ({c} clamped)",
            zones.len()
        );
    }
}

fn build_raster(cfg: &RunConfig, err: &mut dyn Write) -> Result<AvailabilityRaster, CliError> {
    let towers = load_towers(cfg)?;
    let grid = load_grid(cfg)?;
    let zones = exclusion_zones_all(&towers, &cfg.params, cfg.method()).map_err(DataError::from)?;
    warn_extrapolated(err, &zones);
    Ok(raster_from_zones(&grid, &zones, cfg.method(), cfg.params))
}

fn write_file(path: &Path, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    write_atomic(path, bytes)?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(())
}

fn run(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Radii {
            common,
            discrepancy_report,
        } => {
            let cfg = build_config(&common)?;
            let towers = load_towers(&cfg)?;
            let zones =
                exclusion_zones_all(&towers, &cfg.params, cfg.method()).map_err(DataError::from)?;
            warn_extrapolated(err, &zones);
            let _ = out.write_all(export::radii_csv(&zones, &cfg.provenance()).as_bytes());
            if let Some(path) = discrepancy_report {
                let rows = towers
                    .iter()
                    .map(|t| Ok((t.id.clone(), reference_discrepancies(t, &cfg.params)?)))
                    .collect::<Result<Vec<_>, crate::regulatory::RegulatoryError>>()
                    .map_err(DataError::from)?;
                let text = export::discrepancy_csv(&rows, &cfg.provenance());
                write_file(&path, text.as_bytes(), err)?;
            }
        }
        Command::Rasterize { common, no_geojson } => {
            let cfg = build_config(&common)?;
            let r = build_raster(&cfg, err)?;
            let prov = cfg.provenance();
            write_file(
                &cfg.out_dir.join("raster.csv"),
                export::raster_csv(&r, &prov).as_bytes(),
                out,
            )?;
            if !no_geojson {
                write_file(
                    &cfg.out_dir.join("raster.geojson"),
                    export::raster_geojson(&r, &prov).as_bytes(),
                    out,
                )?;
            }
        }
        Command::Stats { common } => {
            let cfg = build_config(&common)?;
            let towers = load_towers(&cfg)?;
            let grid = load_grid(&cfg)?;
            let presets: Vec<Preset> = match common.preset {
                Some(_) => vec![cfg.preset],
                None => Preset::ALL.to_vec(),
            };
            let configs = export::stats_configs(&presets, &cfg.params);
            let rows = export::stats_rows(&grid, &towers, &configs)?;
            let names: Vec<_> = presets.iter().map(Preset::as_str).collect();
            let prov = format!(
                "presets={} resolution={:.4} towers={}",
                names.join(";"),
                cfg.resolution_deg,
                towers.len()
            );
            let t2 = export::zone_average_csv(&rows, grid.zone_names(), &prov);
            let t3 = export::percent_area_csv(&rows, &prov);
            let _ = out.write_all(t2.as_bytes());
            write_file(&cfg.out_dir.join("zone_averages.csv"), t2.as_bytes(), err)?;
            write_file(&cfg.out_dir.join("percent_area.csv"), t3.as_bytes(), err)?;
        }
        Command::Ccdf { common } => {
            let cfg = build_config(&common)?;
            let r = build_raster(&cfg, err)?;
            let text = export::ccdf_csv(&r, &cfg.provenance())?;
            let _ = out.write_all(text.as_bytes());
            write_file(&cfg.out_dir.join("ccdf.csv"), text.as_bytes(), err)?;
        }
        Command::Reassign {
            common,
            basis,
            min_separation,
        } => {
            let mut cfg = build_config(&common)?;
            if let Some(b) = basis {
                cfg.set("basis", &b).map_err(|e| usage(e.to_string()))?;
            }
            if let Some(s) = min_separation {
                cfg.set("min_separation", &s.to_string())
                    .map_err(|e| usage(e.to_string()))?;
            }
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let towers = load_towers(&cfg)?;
            let r = reassign_towers(&towers, &cfg.params, cfg.basis, cfg.min_separation)
                .map_err(DataError::from)?;
            let summary = export::reassign_summary(
                &towers,
                &r,
                cfg.preset,
                cfg.basis.as_str(),
                cfg.min_separation,
            );
            let prov = format!(
                "preset={} method=reassign basis={} min_separation={}",
                cfg.preset, cfg.basis, cfg.min_separation
            );
            let _ = writeln!(out, "distinct channels: {}", summary.overall.after);
            let _ = writeln!(out, "distinct channels before: {}", summary.overall.before);
            for (zone, c) in &summary.zones {
                let _ = writeln!(out, "zone {zone}: {} -> {}", c.before, c.after);
            }
            write_file(
                &cfg.out_dir.join("assignment.csv"),
                export::assignment_csv(&towers, &r, &prov).as_bytes(),
                err,
            )?;
            let mut json = serde_json::to_string_pretty(&summary).map_err(DataError::from)?;
            json.push('\n');
            write_file(&cfg.out_dir.join("summary.json"), json.as_bytes(), err)?;
        }
        Command::Render { common, output } => {
            let cfg = build_config(&common)?;
            let r = build_raster(&cfg, err)?;
            let path = output.unwrap_or_else(|| cfg.out_dir.join("availability.png"));
            write_file(&path, &export::render_png(&r)?, out)?;
        }
        Command::GenSample {
            common,
            seed,
            count,
            weights,
            output,
        } => {
            let mut cfg = build_config(&common)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(c) = count {
                cfg.count = c;
            }
            let zones = load_zones(&cfg)?;
            let profile = if weights.is_empty() {
                DensityProfile::AreaProportional
            } else {
                DensityProfile::Weights(weights)
            };
            let towers = gen_sample_towers(cfg.seed, &zones, cfg.count, &profile)?;
            let mut buf = Vec::new();
            write_tower_csv(&towers, &mut buf)?;
            write_file(&output, &buf, out)?;
        }
    }
    Ok(())
}

/// Runs the CLI. Returns 0 on success, 2 on usage errors (bad flags,
/// missing files) and 1 on any other failure.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match run(cli.cmd, out, err) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Run(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
