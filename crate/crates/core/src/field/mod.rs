//! Electromagnetic field grids: mode volume, coupling maps and synthetic
//! stand-in modes.

mod grid;
mod io;
mod synth;
mod volume;

pub use grid::{FieldGrid, GridGeometry, ScalarField, DIELECTRIC_THRESHOLD};
pub use io::{
    load_grid, load_grid_binary, load_grid_csv, save_grid, save_grid_binary, save_grid_csv, MAGIC,
    VERSION,
};
pub use synth::{synth_mode, BowtieHoles, SynthSpec};
pub use volume::{g_field, mode_volume, ModeVolume};
