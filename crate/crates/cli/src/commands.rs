use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cqed_core::field::{
    g_field, load_grid, mode_volume, save_grid_binary, save_grid_csv, synth_mode,
};
use cqed_core::fom::{fom_sweep, g_from_mode_volume, SweepAxis};
use cqed_core::implant::{implant_distribution, median_vs_d_curve, violin_export};
use cqed_core::reflection::{contrast_curve, emitter_like_resonance, spin_spectra};
use cqed_core::units::{cubic_wavelength, rad_to_ghz, rad_to_hz, wavelength_to_omega};
use cqed_core::{FieldGrid, ImplantRegion, LateralPlane, Plane, ScalarField, SystemParams};
use log::info;
use serde_json::json;

use crate::config::{FieldSource, PlaneChoice, RunConfig, SweepList};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, Cell, Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// β, I and C versus coupling or mode volume, one curve per γ*.
    FomSweep,
    /// Drift-broadened spin-down and spin-up reflectivity.
    Spectrum,
    /// Best spin contrast versus cavity detuning, one curve per g.
    Contrast,
    /// Mode volume of a field grid.
    Modevol,
    /// Lateral coupling map through the implantation plane.
    Gmap,
    /// Coupling median versus implantation diameter and violin tables.
    ImplantStats,
    /// Write the synthetic field grid.
    SynthField,
}

/// Runs one command and returns the files written, in a fixed order.
pub fn run(
    command: Command,
    cfg: &RunConfig,
    out: &Path,
    format: Format,
) -> CliResult<Vec<PathBuf>> {
    let mut files = vec![write_json(&out.join("config_resolved.json"), cfg)?];
    match command {
        Command::FomSweep => fom(cfg, out, format, &mut files)?,
        Command::Spectrum => spectrum(cfg, out, format, &mut files)?,
        Command::Contrast => contrast(cfg, out, format, &mut files)?,
        Command::Modevol => modevol(cfg, out, &mut files)?,
        Command::Gmap => gmap(cfg, out, format, &mut files)?,
        Command::ImplantStats => implant(cfg, out, format, &mut files)?,
        Command::SynthField => synth(cfg, out, format, &mut files)?,
    }
    Ok(files)
}

fn fom(cfg: &RunConfig, out: &Path, format: Format, files: &mut Vec<PathBuf>) -> CliResult<()> {
    let axis = match &cfg.sweep.axis {
        SweepList::Coupling(g) => SweepAxis::Coupling(g.clone()),
        SweepList::ModeVolume(v) => SweepAxis::ModeVolume(v.clone()),
    };
    let cubic = cfg.cubic_wavelength();
    let mut table = Table::new(&[
        "gamma_star_GHz",
        "g_GHz",
        "V_lambda_n3",
        "beta",
        "beta_wg",
        "indist",
        "cooperativity",
        "status",
    ]);
    let mut failed = Vec::new();
    for &gamma_star in &cfg.sweep.gamma_star {
        let base = SystemParams {
            gamma_star,
            ..cfg.system
        };
        info!("fom-sweep: gamma_star = {} GHz", rad_to_ghz(gamma_star));
        let rows = fom_sweep(&base, &axis, Some(&cfg.dipole), cfg.hilbert, &cfg.numerics)?;
        for row in rows {
            let head: Vec<Cell> = vec![
                rad_to_ghz(gamma_star).into(),
                rad_to_ghz(row.g).into(),
                row.mode_volume.map(|v| v / cubic).into(),
            ];
            let tail: Vec<Cell> = match row.result {
                Ok(r) => vec![
                    r.beta.into(),
                    r.beta_wg.into(),
                    r.indist.into(),
                    r.cooperativity.into(),
                    "ok".into(),
                ],
                Err(msg) => {
                    failed.push(format!("g = {} GHz: {msg}", rad_to_ghz(row.g)));
                    vec![
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                        msg.into(),
                    ]
                }
            };
            table.push(head.into_iter().chain(tail).collect());
        }
    }
    files.push(table.write(out, "fom_sweep", format)?);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::PartialFailure {
            failed: failed.len(),
            total: table.rows.len(),
            first: failed.swap_remove(0),
        })
    }
}

fn spectrum(
    cfg: &RunConfig,
    out: &Path,
    format: Format,
    files: &mut Vec<PathBuf>,
) -> CliResult<()> {
    let (down, up) = cfg.spin.transition_detunings(&cfg.system);
    let s = cfg.spectrum;
    let center = s
        .center
        .unwrap_or_else(|| emitter_like_resonance(cfg.system.g, 0.5 * (down + up)));
    let n = (s.half_width / s.step).round() as i64;
    let grid: Vec<f64> = (-n..=n).map(|k| center + k as f64 * s.step).collect();
    let (r_down, r_up) = spin_spectra(&cfg.system, &cfg.spin, &grid)?;

    for (stem, spectrum) in [("spectrum_down", &r_down), ("spectrum_up", &r_up)] {
        let mut table = Table::new(&["detuning_Hz", "R"]);
        for (&d, &r) in grid.iter().zip(&spectrum.values) {
            table.push(vec![rad_to_hz(d).into(), r.into()]);
        }
        files.push(table.write(out, stem, format)?);
    }

    let dip = |i: Option<usize>| i.map(|i| rad_to_ghz(grid[i]));
    let (dip_down, dip_up) = (dip(r_down.argmin()), dip(r_up.argmin()));
    let summary = json!({
        "center_GHz": rad_to_ghz(center),
        "step_GHz": rad_to_ghz(s.step),
        "transition_down_GHz": rad_to_ghz(down),
        "transition_up_GHz": rad_to_ghz(up),
        "dip_down_GHz": dip_down,
        "dip_up_GHz": dip_up,
        "dip_separation_GHz": dip_down.zip(dip_up).map(|(a, b)| (b - a).abs()),
    });
    files.push(write_json(&out.join("spectrum_summary.json"), &summary)?);
    Ok(())
}

fn contrast(
    cfg: &RunConfig,
    out: &Path,
    format: Format,
    files: &mut Vec<PathBuf>,
) -> CliResult<()> {
    let c = &cfg.contrast;
    let mut table = Table::new(&[
        "g_GHz",
        "cavity_detuning_GHz",
        "best_probe_GHz",
        "contrast",
        "abs_difference",
        "R_down",
        "R_up",
    ]);
    let mut best = Vec::new();
    for &g in &c.g {
        let rows = contrast_curve(
            &cfg.system.with_g(g),
            &cfg.spin,
            &c.detunings,
            c.probe,
            c.window,
        )?;
        for r in &rows {
            table.push(vec![
                rad_to_ghz(g).into(),
                rad_to_ghz(r.cavity_detuning).into(),
                rad_to_ghz(r.best_probe).into(),
                r.contrast.into(),
                r.abs_difference.into(),
                r.r_down.into(),
                r.r_up.into(),
            ]);
        }
        let top = rows
            .iter()
            .fold(&rows[0], |b, r| if r.contrast > b.contrast { r } else { b });
        best.push(json!({
            "g_GHz": rad_to_ghz(g),
            "best_cavity_detuning_GHz": rad_to_ghz(top.cavity_detuning),
            "best_probe_GHz": rad_to_ghz(top.best_probe),
            "contrast": top.contrast,
        }));
    }
    files.push(table.write(out, "contrast", format)?);
    files.push(write_json(&out.join("contrast_summary.json"), &best)?);
    Ok(())
}

fn load_field(cfg: &RunConfig) -> CliResult<FieldGrid> {
    Ok(match &cfg.field {
        FieldSource::Path(p) => load_grid(p)?,
        FieldSource::Synth(s) => synth_mode(s)?,
    })
}

fn modevol(cfg: &RunConfig, out: &Path, files: &mut Vec<PathBuf>) -> CliResult<()> {
    let grid = load_field(cfg)?;
    let mv = mode_volume(&grid)?;
    let omega = wavelength_to_omega(grid.wavelength());
    let g_max = g_from_mode_volume(mv.volume, &cfg.dipole, omega)?;
    let summary = json!({
        "volume_m3": mv.volume,
        "volume_lambda_n3": mv.normalized,
        "lambda_n3_m3": cubic_wavelength(grid.wavelength(), grid.n_ref()),
        "argmax": mv.argmax,
        "argmax_position_m": mv.argmax_position,
        "max_energy_density": mv.max_energy_density,
        "g_max_GHz": rad_to_ghz(g_max),
        "dims": grid.geometry().dims,
        "spacing_m": grid.geometry().spacing,
    });
    files.push(write_json(&out.join("modevol.json"), &summary)?);
    Ok(())
}

/// Coupling map and the lateral plane selected in the config.
fn coupling_map(cfg: &RunConfig) -> CliResult<(ScalarField, Plane)> {
    let grid = load_field(cfg)?;
    let gmap = g_field(&grid, &cfg.dipole, wavelength_to_omega(grid.wavelength()))?;
    let plane = match cfg.implant.plane {
        PlaneChoice::Fixed(p) => p,
        PlaneChoice::Peak => {
            let idx = gmap
                .dielectric_argmax()
                .ok_or_else(|| cqed_core::Error::Empty("map has no dielectric voxel".into()))?;
            Plane::Depth(gmap.geometry.coords(idx)[2])
        }
    };
    if let Plane::Depth(k) = plane {
        if k >= gmap.geometry.dims[2] {
            return Err(CliError::config(
                "implant.plane.depth",
                format!(
                    "depth index {k} outside the grid (nz = {})",
                    gmap.geometry.dims[2]
                ),
            ));
        }
    }
    Ok((gmap, plane))
}

fn plane_json(plane: Plane) -> serde_json::Value {
    match plane {
        Plane::Depth(k) => json!({ "depth": k }),
        Plane::MaxProjection => json!("max-projection"),
    }
}

fn gmap(cfg: &RunConfig, out: &Path, format: Format, files: &mut Vec<PathBuf>) -> CliResult<()> {
    let (gmap, plane) = coupling_map(cfg)?;
    let slice = LateralPlane::extract(&gmap, plane);
    let geo = gmap.geometry;
    let mut table = Table::new(&["i", "j", "x_nm", "y_nm", "dielectric", "g_GHz"]);
    for j in 0..slice.ny {
        for i in 0..slice.nx {
            let idx = slice.index([i, j]);
            let [x, y, _] = geo.position([i, j, 0]);
            let g = slice.mask[idx].then(|| rad_to_ghz(slice.values[idx]));
            table.push(vec![
                i.into(),
                j.into(),
                to_nm(x).into(),
                to_nm(y).into(),
                slice.mask[idx].into(),
                g.into(),
            ]);
        }
    }
    files.push(table.write(out, "gmap", format)?);

    let argmax = gmap.dielectric_argmax().map(|i| geo.coords(i));
    let summary = json!({
        "g_max_GHz": argmax.map(|ijk| rad_to_ghz(gmap.values[geo.index(ijk[0], ijk[1], ijk[2])])),
        "argmax": argmax,
        "plane": plane_json(plane),
        "dims": geo.dims,
        "spacing_m": geo.spacing,
    });
    files.push(write_json(&out.join("gmap_summary.json"), &summary)?);
    Ok(())
}

/// Metres to nanometres, rounded to 1e-6 nm so that `30e-9` prints as `30`.
fn to_nm(x: f64) -> f64 {
    (x * 1e15).round() / 1e6
}

/// `50e-9` → `"50"`, `12.5e-9` → `"12.5"`.
fn nm_label(d: f64) -> String {
    format!("{}", to_nm(d))
}

fn implant(cfg: &RunConfig, out: &Path, format: Format, files: &mut Vec<PathBuf>) -> CliResult<()> {
    let (gmap, plane) = coupling_map(cfg)?;
    let center = match cfg.implant.center {
        Some(c) => c,
        None => {
            let slice = LateralPlane::extract(&gmap, plane);
            let best = (0..slice.values.len())
                .filter(|&i| slice.mask[i])
                .fold(None, |b: Option<usize>, i| match b {
                    Some(k) if slice.values[k] >= slice.values[i] => b,
                    _ => Some(i),
                })
                .ok_or_else(|| cqed_core::Error::Empty("plane has no dielectric voxel".into()))?;
            [best % slice.nx, best / slice.nx]
        }
    };
    let region = ImplantRegion {
        center,
        diameter: 0.0,
        plane,
    };
    region.validate(&gmap)?;

    let curve = median_vs_d_curve(&gmap, &region, &cfg.implant.diameters)?;
    let mut table = Table::new(&["D_nm", "median_GHz", "p40_GHz", "p60_GHz", "samples"]);
    for r in &curve {
        table.push(vec![
            to_nm(r.diameter).into(),
            rad_to_ghz(r.median).into(),
            rad_to_ghz(r.p40).into(),
            rad_to_ghz(r.p60).into(),
            r.samples.into(),
        ]);
    }
    files.push(table.write(out, "implant_curve", format)?);

    let mut violins = Vec::new();
    for &d in &cfg.implant.violin_diameters {
        let dist = implant_distribution(&gmap, &region.with_diameter(d))?;
        let v = violin_export(&dist, cfg.implant.bins)?;
        let mut t = Table::new(&["bin_center_GHz", "density"]);
        let per_ghz = rad_to_ghz(1.0);
        for (c, rho) in v.bin_centers.iter().zip(&v.density) {
            t.push(vec![rad_to_ghz(*c).into(), (rho / per_ghz).into()]);
        }
        let stem = format!("violin_{}nm", nm_label(d));
        files.push(t.write(out, &stem, format)?);
        violins.push(json!({
            "diameter_nm": to_nm(d),
            "table": stem,
            "samples": dist.len(),
            "bin_width_GHz": rad_to_ghz(v.bin_width),
            "min_GHz": rad_to_ghz(v.min),
            "whisker_low_GHz": rad_to_ghz(v.whisker_low),
            "p25_GHz": rad_to_ghz(v.p25),
            "median_GHz": rad_to_ghz(v.median),
            "p75_GHz": rad_to_ghz(v.p75),
            "whisker_high_GHz": rad_to_ghz(v.whisker_high),
            "max_GHz": rad_to_ghz(v.max),
        }));
    }
    let summary = json!({
        "center": center,
        "plane": plane_json(plane),
        "violins": violins,
    });
    files.push(write_json(&out.join("implant_summary.json"), &summary)?);
    Ok(())
}

fn synth(cfg: &RunConfig, out: &Path, format: Format, files: &mut Vec<PathBuf>) -> CliResult<()> {
    let FieldSource::Synth(spec) = &cfg.field else {
        return Err(CliError::config(
            "field",
            "synth-field needs a `field.synth` block",
        ));
    };
    let grid = synth_mode(spec)?;
    let path = out.join("field.fgrd");
    save_grid_binary(&grid, &path)?;
    files.push(path);
    if format == Format::Csv {
        let path = out.join("field.csv");
        save_grid_csv(&grid, &path)?;
        files.push(path);
    }
    Ok(())
}
