//! JSON run configuration.
//!
//! Every physical quantity is an object `{"value": x, "unit": "GHz"}` and
//! every list is `{"values": [..], "unit": "nm"}`. Frequencies given in Hz
//! multiples are ordinary frequencies and are multiplied by 2π; `rad/s` is
//! taken as is. Unknown keys are rejected with the nearest valid key.

use std::f64::consts::TAU;
use std::path::PathBuf;

use cqed_core::field::BowtieHoles;
use cqed_core::reflection::{fwhm_to_sigma, ProbeWindow};
use cqed_core::units::{
    cubic_wavelength, wavelength_to_omega, DEBYE, DIAMOND_INDEX, SIV_WAVELENGTH,
};
use cqed_core::{
    DipoleSpec, FomNumerics, HilbertSpec, Orientation, Plane, ProbePolicy, SpinConfig, SynthSpec,
    SystemParams,
};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Rate,
    Length,
    Dipole,
    Volume,
}

impl Dim {
    fn name(self) -> &'static str {
        match self {
            Dim::Rate => "rate",
            Dim::Length => "length",
            Dim::Dipole => "dipole moment",
            Dim::Volume => "volume",
        }
    }

    fn units(self) -> &'static [&'static str] {
        match self {
            Dim::Rate => &["Hz", "kHz", "MHz", "GHz", "THz", "rad/s"],
            Dim::Length => &["m", "um", "nm"],
            Dim::Dipole => &["Debye", "C*m"],
            Dim::Volume => &["m^3", "um^3", "nm^3", "(lambda/n)^3"],
        }
    }
}

/// Converts a tagged value to rad/s or SI.
fn unit_factor(dim: Dim, unit: &str, cubic: f64) -> Option<f64> {
    let f = match (dim, unit) {
        (Dim::Rate, "Hz") => TAU,
        (Dim::Rate, "kHz") => TAU * 1e3,
        (Dim::Rate, "MHz") => TAU * 1e6,
        (Dim::Rate, "GHz") => TAU * 1e9,
        (Dim::Rate, "THz") => TAU * 1e12,
        (Dim::Rate, "rad/s") => 1.0,
        (Dim::Length, "m") => 1.0,
        (Dim::Length, "um") => 1e-6,
        (Dim::Length, "nm") => 1e-9,
        (Dim::Dipole, "Debye") => DEBYE,
        (Dim::Dipole, "C*m") => 1.0,
        (Dim::Volume, "m^3") => 1.0,
        (Dim::Volume, "um^3") => 1e-18,
        (Dim::Volume, "nm^3") => 1e-27,
        (Dim::Volume, "(lambda/n)^3") => cubic,
        _ => return None,
    };
    Some(f)
}

fn nearest<'k>(key: &str, allowed: &[&'k str]) -> Option<&'k str> {
    allowed
        .iter()
        .map(|k| (strsim::jaro_winkler(key, k), *k))
        .filter(|(score, _)| *score > 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, k)| k)
}

/// A JSON object plus its dotted path, for error messages.
struct Block<'a> {
    path: String,
    map: &'a Map<String, Value>,
    /// (λ/n)³ in m³ for volume units.
    cubic: f64,
}

impl<'a> Block<'a> {
    fn new(path: String, value: &'a Value, cubic: f64) -> CliResult<Self> {
        match value {
            Value::Object(map) => Ok(Block { path, map, cubic }),
            _ => Err(CliError::config(path, "expected a JSON object")),
        }
    }

    fn child_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn check(&self, allowed: &[&str]) -> CliResult<()> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                let hint = match nearest(key, allowed) {
                    Some(k) => format!("unknown key `{key}`; did you mean `{k}`?"),
                    None => format!(
                        "unknown key `{key}`; expected one of {}",
                        allowed.join(", ")
                    ),
                };
                return Err(CliError::config(self.child_path(key), hint));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn sub(&self, key: &str) -> CliResult<Option<Block<'a>>> {
        self.get(key)
            .map(|v| Block::new(self.child_path(key), v, self.cubic))
            .transpose()
    }

    fn err(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::config(self.child_path(key), message)
    }

    fn number(&self, key: &str) -> CliResult<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| self.err(key, "expected a number")),
        }
    }

    fn uint(&self, key: &str) -> CliResult<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| self.err(key, "expected a non-negative integer")),
        }
    }

    fn string(&self, key: &str) -> CliResult<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| self.err(key, "expected a string")),
        }
    }

    fn factor(&self, key: &str, q: &Block, dim: Dim) -> CliResult<f64> {
        let unit = q
            .string("unit")?
            .ok_or_else(|| self.err(key, "missing field `unit`"))?;
        unit_factor(dim, unit, self.cubic).ok_or_else(|| {
            q.err(
                "unit",
                format!(
                    "unit `{unit}` is not a {}; expected one of {}",
                    dim.name(),
                    dim.units().join(", ")
                ),
            )
        })
    }

    fn quantity(&self, key: &str, dim: Dim) -> CliResult<Option<f64>> {
        let Some(q) = self.sub(key)? else {
            return Ok(None);
        };
        q.check(&["value", "unit"])?;
        let factor = self.factor(key, &q, dim)?;
        let value = q
            .number("value")?
            .ok_or_else(|| self.err(key, "missing field `value`"))?;
        Ok(Some(value * factor))
    }

    /// A list; `null` entries become +∞ when `allow_inf` is set.
    fn quantities(&self, key: &str, dim: Dim, allow_inf: bool) -> CliResult<Option<Vec<f64>>> {
        let Some(q) = self.sub(key)? else {
            return Ok(None);
        };
        q.check(&["values", "unit"])?;
        let factor = self.factor(key, &q, dim)?;
        let values = q
            .map
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| self.err(key, "missing field `values` (array)"))?;
        values
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Value::Null if allow_inf => Ok(f64::INFINITY),
                _ => v
                    .as_f64()
                    .map(|x| x * factor)
                    .ok_or_else(|| q.err(&format!("values[{i}]"), "expected a number")),
            })
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }
}

/// Source of the electromagnetic field for grid commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldSource {
    Path(PathBuf),
    Synth(SynthSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SweepList {
    /// Couplings (rad/s).
    Coupling(Vec<f64>),
    /// Mode volumes (m³).
    ModeVolume(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub axis: SweepList,
    /// One curve per dephasing rate (rad/s).
    pub gamma_star: Vec<f64>,
}

/// Probe window of the `spectrum` command (rad/s, relative to the cavity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumConfig {
    /// `None` centers on the dressed emitter-like resonance.
    pub center: Option<f64>,
    pub half_width: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrastConfig {
    /// One curve per coupling (rad/s).
    pub g: Vec<f64>,
    /// Cavity minus emitter detunings (rad/s).
    pub detunings: Vec<f64>,
    pub probe: ProbePolicy,
    pub window: ProbeWindow,
}

/// Lateral plane selection for `gmap` and `implant-stats`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneChoice {
    /// Depth of the dielectric maximum.
    Peak,
    Fixed(Plane),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplantConfig {
    /// Disk diameters for the median curve (m).
    pub diameters: Vec<f64>,
    /// Diameters with a violin table (m).
    pub violin_diameters: Vec<f64>,
    pub bins: usize,
    pub plane: PlaneChoice,
    /// Lateral voxel index; `None` uses the dielectric maximum.
    pub center: Option<[usize; 2]>,
}

/// Fully resolved configuration; rates in rad/s, lengths in m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub system: SystemParams,
    pub wavelength: f64,
    pub n_ref: f64,
    pub hilbert: HilbertSpec,
    pub numerics: FomNumerics,
    pub dipole: DipoleSpec,
    pub sweep: SweepConfig,
    pub spin: SpinConfig,
    pub spectrum: SpectrumConfig,
    pub contrast: ContrastConfig,
    pub field: FieldSource,
    pub implant: ImplantConfig,
}

impl RunConfig {
    /// `(λ/n)³` in m³.
    pub fn cubic_wavelength(&self) -> f64 {
        cubic_wavelength(self.wavelength, self.n_ref)
    }
}

fn ghz(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| TAU * 1e9 * v).collect()
}

fn nm(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v * 1e-9).collect()
}

/// `n` log-spaced points from `lo` to `hi`.
fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::config("", format!("invalid JSON: {e}")))?;
    let root = Block::new(String::new(), &value, 0.0)?;
    root.check(&[
        "system", "hilbert", "numerics", "dipole", "sweep", "spin", "spectrum", "contrast",
        "field", "implant",
    ])?;

    let (system, wavelength, n_ref) = parse_system(root.sub("system")?)?;
    let cubic = cubic_wavelength(wavelength, n_ref);

    let hilbert = match root.sub("hilbert")? {
        None => HilbertSpec::default(),
        Some(b) => {
            b.check(&["n_max"])?;
            match b.uint("n_max")? {
                None => HilbertSpec::default(),
                Some(n) => HilbertSpec::new(n).map_err(|e| b.err("n_max", e.to_string()))?,
            }
        }
    };

    let numerics = parse_numerics(root.sub("numerics")?)?;
    let dipole = parse_dipole(root.sub("dipole")?)?;
    let sweep = parse_sweep(root.sub("sweep")?.map(|b| Block { cubic, ..b }))?;
    let spin = parse_spin(root.sub("spin")?)?;
    let spectrum = parse_spectrum(root.sub("spectrum")?)?;
    let contrast = parse_contrast(root.sub("contrast")?)?;
    let field = parse_field(root.sub("field")?)?;
    let implant = parse_implant(root.sub("implant")?)?;

    Ok(RunConfig {
        system,
        wavelength,
        n_ref,
        hilbert,
        numerics,
        dipole,
        sweep,
        spin,
        spectrum,
        contrast,
        field,
        implant,
    })
}

fn parse_system(b: Option<Block>) -> CliResult<(SystemParams, f64, f64)> {
    let mut p = SystemParams::siv(TAU * 10e9);
    let (mut wavelength, mut n_ref) = (SIV_WAVELENGTH, DIAMOND_INDEX);
    if let Some(b) = b {
        b.check(&[
            "g",
            "kappa_wg",
            "kappa_sc",
            "gamma",
            "gamma_star",
            "delta_ca",
            "wavelength",
            "n_ref",
        ])?;
        let fields: [(&str, &mut f64); 6] = [
            ("g", &mut p.g),
            ("kappa_wg", &mut p.kappa_wg),
            ("kappa_sc", &mut p.kappa_sc),
            ("gamma", &mut p.gamma),
            ("gamma_star", &mut p.gamma_star),
            ("delta_ca", &mut p.delta_ca),
        ];
        for (key, slot) in fields {
            if let Some(v) = b.quantity(key, Dim::Rate)? {
                *slot = v;
            }
        }
        if let Some(l) = b.quantity("wavelength", Dim::Length)? {
            wavelength = l;
        }
        if let Some(n) = b.number("n_ref")? {
            n_ref = n;
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(b.err("wavelength", "must be > 0"));
        }
        if !(n_ref > 0.0 && n_ref.is_finite()) {
            return Err(b.err("n_ref", "must be > 0"));
        }
        p.omega = wavelength_to_omega(wavelength);
        p.validate()
            .map_err(|e| CliError::config("system", e.to_string()))?;
    }
    Ok((p, wavelength, n_ref))
}

fn parse_numerics(b: Option<Block>) -> CliResult<FomNumerics> {
    let mut n = FomNumerics::default();
    if let Some(b) = b {
        b.check(&[
            "residual_threshold",
            "convergence_limit",
            "horizon_factor",
            "step_factor",
        ])?;
        let fields: [(&str, &mut f64); 4] = [
            ("residual_threshold", &mut n.residual_threshold),
            ("convergence_limit", &mut n.convergence_limit),
            ("horizon_factor", &mut n.horizon_factor),
            ("step_factor", &mut n.step_factor),
        ];
        for (key, slot) in fields {
            if let Some(v) = b.number(key)? {
                *slot = v;
            }
        }
    }
    Ok(n)
}

fn parse_dipole(b: Option<Block>) -> CliResult<DipoleSpec> {
    let mut d = DipoleSpec::siv();
    let Some(b) = b else {
        return Ok(d);
    };
    b.check(&["mu", "orientation", "overlap_xi"])?;
    if let Some(mu) = b.quantity("mu", Dim::Dipole)? {
        d.mu = mu;
    }
    if let Some(xi) = b.number("overlap_xi")? {
        d.overlap_xi = xi;
    }
    match b.get("orientation") {
        None => {}
        Some(Value::String(s)) if s == "aligned" => d.orientation = Orientation::AlignedWithField,
        Some(Value::String(s)) => {
            return Err(b.err(
                "orientation",
                format!(
                    "unknown orientation `{s}`; expected \"aligned\" or {{\"axis\": [x, y, z]}}"
                ),
            ))
        }
        Some(_) => {
            let o = b.sub("orientation")?.expect("non-null");
            o.check(&["axis"])?;
            let axis: Vec<f64> = o
                .get("axis")
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(Value::as_f64).collect())
                .unwrap_or_default();
            let norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
            if axis.len() != 3 || !(norm > 0.0 && norm.is_finite()) {
                return Err(o.err("axis", "expected three numbers with nonzero norm"));
            }
            d.orientation =
                Orientation::FixedAxis([axis[0] / norm, axis[1] / norm, axis[2] / norm]);
        }
    }
    d.validate()
        .map_err(|e| CliError::config("dipole", e.to_string()))?;
    Ok(d)
}

fn parse_sweep(b: Option<Block>) -> CliResult<SweepConfig> {
    let mut s = SweepConfig {
        axis: SweepList::Coupling(ghz(&[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0])),
        gamma_star: ghz(&[0.05, 1.0]),
    };
    let Some(b) = b else {
        return Ok(s);
    };
    b.check(&["g", "mode_volume", "gamma_star"])?;
    let g = b.quantities("g", Dim::Rate, false)?;
    let v = b.quantities("mode_volume", Dim::Volume, false)?;
    s.axis = match (g, v) {
        (Some(_), Some(_)) => {
            return Err(b.err("mode_volume", "give either `g` or `mode_volume`, not both"))
        }
        (Some(g), None) => SweepList::Coupling(g),
        (None, Some(v)) => SweepList::ModeVolume(v),
        (None, None) => s.axis,
    };
    if let Some(gs) = b.quantities("gamma_star", Dim::Rate, false)? {
        if gs.is_empty() {
            return Err(b.err("gamma_star", "must not be empty"));
        }
        s.gamma_star = gs;
    }
    Ok(s)
}

fn parse_spin(b: Option<Block>) -> CliResult<SpinConfig> {
    let (mut split, mut drift, mut offset) = (TAU * 1e9, TAU * 50e6, 0.0);
    if let Some(b) = b {
        b.check(&["zeeman_split", "drift", "drift_kind", "spin_down_offset"])?;
        if let Some(v) = b.quantity("zeeman_split", Dim::Rate)? {
            split = v;
        }
        if let Some(v) = b.quantity("drift", Dim::Rate)? {
            drift = v;
        }
        match b.string("drift_kind")? {
            None | Some("sigma") => {}
            Some("fwhm") => drift = fwhm_to_sigma(drift),
            Some(k) => {
                return Err(b.err(
                    "drift_kind",
                    format!("unknown `{k}`; expected sigma or fwhm"),
                ))
            }
        }
        if let Some(v) = b.quantity("spin_down_offset", Dim::Rate)? {
            offset = v;
        }
    }
    SpinConfig::new(split, drift, offset).map_err(|e| CliError::config("spin", e.to_string()))
}

fn parse_spectrum(b: Option<Block>) -> CliResult<SpectrumConfig> {
    let mut s = SpectrumConfig {
        center: None,
        half_width: TAU * 5e9,
        step: TAU * 10e6,
    };
    if let Some(b) = b {
        b.check(&["center", "half_width", "step"])?;
        s.center = b.quantity("center", Dim::Rate)?;
        if let Some(v) = b.quantity("half_width", Dim::Rate)? {
            s.half_width = v;
        }
        if let Some(v) = b.quantity("step", Dim::Rate)? {
            s.step = v;
        }
        if !(s.step > 0.0 && s.half_width >= s.step) {
            return Err(b.err("step", "need 0 < step <= half_width"));
        }
    }
    Ok(s)
}

fn parse_contrast(b: Option<Block>) -> CliResult<ContrastConfig> {
    let mut c = ContrastConfig {
        g: ghz(&[10.0, 100.0]),
        detunings: log_grid(TAU * 1e8, TAU * 1e13, 61),
        probe: ProbePolicy::Optimize,
        window: ProbeWindow {
            half_width: TAU * 5e9,
            step: TAU * 10e6,
        },
    };
    let Some(b) = b else {
        return Ok(c);
    };
    b.check(&[
        "g",
        "detunings",
        "probe",
        "window_half_width",
        "window_step",
    ])?;
    if let Some(g) = b.quantities("g", Dim::Rate, false)? {
        c.g = g;
    }
    if let Some(d) = b.quantities("detunings", Dim::Rate, false)? {
        c.detunings = d;
    }
    if c.g.is_empty() || c.detunings.is_empty() {
        return Err(b.err("detunings", "coupling and detuning lists must be nonempty"));
    }
    match b.get("probe") {
        None => {}
        Some(Value::String(s)) if s == "optimize" => c.probe = ProbePolicy::Optimize,
        Some(Value::Object(_)) => {
            let p = b.sub("probe")?.expect("non-null");
            p.check(&["fixed"])?;
            let offset = p
                .quantity("fixed", Dim::Rate)?
                .ok_or_else(|| p.err("fixed", "missing field `fixed`"))?;
            c.probe = ProbePolicy::Fixed(offset);
        }
        Some(_) => {
            return Err(b.err("probe", "expected \"optimize\" or {\"fixed\": quantity}"));
        }
    }
    if let Some(v) = b.quantity("window_half_width", Dim::Rate)? {
        c.window.half_width = v;
    }
    if let Some(v) = b.quantity("window_step", Dim::Rate)? {
        c.window.step = v;
    }
    if !(c.window.step > 0.0 && c.window.half_width >= c.window.step) {
        return Err(b.err("window_step", "need 0 < window_step <= window_half_width"));
    }
    Ok(c)
}

fn parse_field(b: Option<Block>) -> CliResult<FieldSource> {
    let Some(b) = b else {
        return Ok(FieldSource::Synth(SynthSpec::default()));
    };
    b.check(&["path", "synth"])?;
    let path = b.string("path")?;
    let synth = b.sub("synth")?;
    match (path, synth) {
        (Some(_), Some(_)) => Err(b.err("synth", "give either `path` or `synth`, not both")),
        (Some(p), None) => Ok(FieldSource::Path(PathBuf::from(p))),
        (None, Some(s)) => parse_synth(&s).map(FieldSource::Synth),
        (None, None) => Err(b.err("path", "missing field `path` (or `synth`)")),
    }
}

fn parse_synth(b: &Block) -> CliResult<SynthSpec> {
    b.check(&[
        "preset",
        "dims",
        "spacing",
        "beam_width",
        "beam_thickness",
        "lattice_period",
        "sigma",
        "holes",
        "eps_dielectric",
        "wavelength",
        "n_ref",
    ])?;
    let mut s = match b.string("preset")? {
        None | Some("bowtie") => SynthSpec::default(),
        Some("ultra-confined") => SynthSpec::ultra_confined(),
        Some(p) => {
            let hint = nearest(p, &["bowtie", "ultra-confined"])
                .map(|k| format!("; did you mean `{k}`?"))
                .unwrap_or_default();
            return Err(b.err("preset", format!("unknown preset `{p}`{hint}")));
        }
    };
    if let Some(dims) = b.get("dims") {
        let d: Vec<usize> = dims
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|v| v.as_u64().map(|n| n as usize))
                    .collect()
            })
            .unwrap_or_default();
        if d.len() != 3 {
            return Err(b.err("dims", "expected three non-negative integers"));
        }
        s.dims = [d[0], d[1], d[2]];
    }
    let triple = |key: &str, allow_inf: bool| -> CliResult<Option<[f64; 3]>> {
        match b.quantities(key, Dim::Length, allow_inf)? {
            None => Ok(None),
            Some(v) if v.len() == 3 => Ok(Some([v[0], v[1], v[2]])),
            Some(_) => Err(b.err(key, "expected three values")),
        }
    };
    if let Some(v) = triple("spacing", false)? {
        s.spacing = v;
    }
    if let Some(v) = triple("sigma", true)? {
        s.sigma = v;
    }
    let lengths: [(&str, &mut f64); 4] = [
        ("beam_width", &mut s.beam_width),
        ("beam_thickness", &mut s.beam_thickness),
        ("lattice_period", &mut s.lattice_period),
        ("wavelength", &mut s.wavelength),
    ];
    for (key, slot) in lengths {
        if let Some(v) = b.quantity(key, Dim::Length)? {
            *slot = v;
        }
    }
    if let Some(v) = b.number("eps_dielectric")? {
        s.eps_dielectric = v;
    }
    if let Some(v) = b.number("n_ref")? {
        s.n_ref = v;
    }
    match b.map.get("holes") {
        None => {}
        Some(Value::Null) => s.holes = None,
        Some(_) => {
            let h = b.sub("holes")?.expect("non-null");
            h.check(&["bridge_half_width", "taper", "extent"])?;
            let mut holes = s.holes.unwrap_or(BowtieHoles {
                bridge_half_width: 15e-9,
                taper: 1.0,
                extent: 120e-9,
            });
            if let Some(v) = h.quantity("bridge_half_width", Dim::Length)? {
                holes.bridge_half_width = v;
            }
            if let Some(v) = h.number("taper")? {
                holes.taper = v;
            }
            if let Some(v) = h.quantity("extent", Dim::Length)? {
                holes.extent = v;
            }
            s.holes = Some(holes);
        }
    }
    s.validate()
        .map_err(|e| CliError::config(b.path.clone(), e.to_string()))?;
    Ok(s)
}

fn parse_implant(b: Option<Block>) -> CliResult<ImplantConfig> {
    let mut c = ImplantConfig {
        diameters: nm(&(0..=20).map(|k| 10.0 * k as f64).collect::<Vec<_>>()),
        violin_diameters: nm(&[0.0, 50.0, 100.0, 200.0]),
        bins: 40,
        plane: PlaneChoice::Peak,
        center: None,
    };
    let Some(b) = b else {
        return Ok(c);
    };
    b.check(&["diameters", "violin_diameters", "bins", "plane", "center"])?;
    if let Some(d) = b.quantities("diameters", Dim::Length, false)? {
        c.diameters = d;
    }
    if let Some(d) = b.quantities("violin_diameters", Dim::Length, false)? {
        c.violin_diameters = d;
    }
    if c.diameters.is_empty() {
        return Err(b.err("diameters", "must not be empty"));
    }
    if c.diameters
        .iter()
        .chain(&c.violin_diameters)
        .any(|d| !(*d >= 0.0 && d.is_finite()))
    {
        return Err(b.err("diameters", "diameters must be finite and >= 0"));
    }
    if let Some(n) = b.uint("bins")? {
        if n < 2 {
            return Err(b.err("bins", "need at least 2 bins"));
        }
        c.bins = n;
    }
    match b.get("plane") {
        None => {}
        Some(Value::String(s)) if s == "peak" => c.plane = PlaneChoice::Peak,
        Some(Value::String(s)) if s == "max-projection" => {
            c.plane = PlaneChoice::Fixed(Plane::MaxProjection)
        }
        Some(Value::Object(_)) => {
            let p = b.sub("plane")?.expect("non-null");
            p.check(&["depth"])?;
            let k = p
                .uint("depth")?
                .ok_or_else(|| p.err("depth", "missing field `depth`"))?;
            c.plane = PlaneChoice::Fixed(Plane::Depth(k));
        }
        Some(_) => {
            return Err(b.err(
                "plane",
                "expected \"peak\", \"max-projection\" or {\"depth\": k}",
            ))
        }
    }
    if let Some(v) = b.get("center") {
        let ij: Vec<usize> = v
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|x| x.as_u64().map(|n| n as usize))
                    .collect()
            })
            .unwrap_or_default();
        if ij.len() != 2 {
            return Err(b.err("center", "expected two voxel indices [i, j]"));
        }
        c.center = Some([ij[0], ij[1]]);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("{}").unwrap();
        assert_eq!(c.system, SystemParams::siv(TAU * 10e9));
        assert_eq!(c.hilbert, HilbertSpec::default());
        assert_eq!(c.sweep.gamma_star.len(), 2);
        assert_eq!(c.field, FieldSource::Synth(SynthSpec::default()));
    }

    #[test]
    fn ghz_is_an_ordinary_frequency() {
        let c = parse_config(r#"{"system": {"g": {"value": 10, "unit": "GHz"}}}"#).unwrap();
        assert!((c.system.g / (TAU * 10e9) - 1.0).abs() < 1e-15);
        let c = parse_config(r#"{"system": {"g": {"value": 5, "unit": "rad/s"}}}"#).unwrap();
        assert_eq!(c.system.g, 5.0);
    }

    #[test]
    fn misspelled_key_names_the_nearest() {
        let err = parse_config(r#"{"system": {"kapa_wg": {"value": 1, "unit": "GHz"}}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("system.kapa_wg"), "{err}");
        assert!(err.contains("`kappa_wg`"), "{err}");
    }

    #[test]
    fn unit_mismatch_names_the_path() {
        let err = parse_config(r#"{"system": {"gamma": {"value": 1, "unit": "nm"}}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("system.gamma.unit"), "{err}");
    }

    #[test]
    fn untagged_quantity_rejected() {
        assert!(parse_config(r#"{"system": {"g": 10}}"#).is_err());
        assert!(parse_config(r#"{"system": {"g": {"value": 10}}}"#).is_err());
    }

    #[test]
    fn volume_in_cubic_wavelengths() {
        let c = parse_config(
            r#"{"sweep": {"mode_volume": {"values": [0.5], "unit": "(lambda/n)^3"}}}"#,
        )
        .unwrap();
        let SweepList::ModeVolume(v) = &c.sweep.axis else {
            panic!("expected a volume sweep");
        };
        assert_eq!(v[0], 0.5 * c.cubic_wavelength());
    }

    #[test]
    fn null_sigma_is_unbounded() {
        let c = parse_config(
            r#"{"field": {"synth": {"preset": "ultra-confined",
                "sigma": {"values": [400, 8, null], "unit": "nm"}}}}"#,
        )
        .unwrap();
        let FieldSource::Synth(s) = c.field else {
            panic!("expected a synthetic field");
        };
        assert!(s.sigma[2].is_infinite());
        assert!((s.sigma[1] - 8e-9).abs() < 1e-24);
        assert_eq!(s.dims, SynthSpec::ultra_confined().dims);
    }

    #[test]
    fn fixed_axis_is_normalized() {
        let c = parse_config(r#"{"dipole": {"orientation": {"axis": [1, 1, 1]}}}"#).unwrap();
        let Orientation::FixedAxis(a) = c.dipole.orientation else {
            panic!("expected a fixed axis");
        };
        assert!((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
