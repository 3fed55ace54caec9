//! Command-line and config-file parameters.
//!
//! Every subcommand reads a section of the same name from the `--config`
//! file. Each section struct doubles as the clap argument struct, so a flag
//! and a file key share a name (`ramsey_time` in the file is
//! `--ramsey-time` on the command line). Flags win over the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::CliError;

/// Pulse duration: a number, or `auto` for a quarter Rabi cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Auto,
    Value(f64),
}

impl FromStr for Tau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Tau::Auto);
        }
        s.parse::<f64>()
            .map(Tau::Value)
            .map_err(|_| format!("expected a number or `auto`, got `{s}`"))
    }
}

impl<'de> Deserialize<'de> for Tau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Tau::Value(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

macro_rules! section {
    (
        physics $(#[$sm:meta])* $name:ident { $($rest:tt)* }
    ) => {
        section! {
            $(#[$sm])* $name {
                /// Drive coupling strength λ.
                lambda: f64,
                /// Atomic transition frequency ω21.
                omega21: f64,
                /// Detuning θ = ω - ω21 (exclusive with `omega`).
                theta: f64,
                /// Drive frequency ω (exclusive with `theta`).
                omega: f64,
                /// Pulse duration, or `auto` for π/(4λ).
                #[arg(allow_negative_numbers = true)]
                tau: Tau,
                /// Free-evolution (Ramsey) time T.
                #[arg(short = 'T')]
                #[serde(alias = "T")]
                ramsey_time: f64,
                /// Dephasing rate α.
                #[arg(allow_negative_numbers = true)]
                alpha: f64,
                /// Dephasing frequency shift β.
                #[arg(allow_negative_numbers = true)]
                beta: f64,
                /// Also apply dephasing during the pulses in the oracle.
                #[arg(num_args = 0..=1, default_missing_value = "true")]
                dephase_during_pulses: bool,
                $($rest)*
            }
        }
    };
    (
        $(#[$sm:meta])* $name:ident {
            $( $(#[$m:meta])* $field:ident : $ty:ty ),* $(,)?
        }
    ) => {
        $(#[$sm])*
        #[derive(Debug, Default, Clone, clap::Args, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $( $(#[$m])* #[arg(long)] pub $field: Option<$ty>, )*
        }

        impl $name {
            /// Fills every unset field from `file`.
            pub fn overlay(self, file: Self) -> Self {
                Self { $( $field: self.$field.or(file.$field), )* }
            }

            pub fn set_keys(&self) -> Vec<&'static str> {
                let mut keys = Vec::new();
                $( if self.$field.is_some() { keys.push(stringify!($field)); } )*
                keys
            }
        }
    };
}

section! {
    physics
    RamseyArgs {
        /// csv or json.
        format: String,
        /// Output file (stdout if absent).
        out: PathBuf,
    }
}

section! {
    physics
    ScanArgs {
        /// Lowest drive frequency of the scan.
        #[arg(allow_negative_numbers = true)]
        grid_min: f64,
        /// Highest drive frequency of the scan.
        #[arg(allow_negative_numbers = true)]
        grid_max: f64,
        /// Number of grid points.
        grid_count: usize,
        /// analytic, oracle, both or resonant.
        source: String,
        /// csv or json.
        format: String,
        /// Output file (stdout if absent).
        out: PathBuf,
        /// Lineshape plot.
        svg: PathBuf,
    }
}

section! {
    physics
    FwhmArgs {
        #[arg(allow_negative_numbers = true)]
        grid_min: f64,
        #[arg(allow_negative_numbers = true)]
        grid_max: f64,
        grid_count: usize,
        /// analytic, oracle, both or resonant.
        source: String,
        format: String,
        out: PathBuf,
        /// Also write the underlying scan as CSV.
        scan_out: PathBuf,
        /// Lineshape plot with the mid-contrast level.
        svg: PathBuf,
        /// Contrast against αT plot.
        decay_svg: PathBuf,
        /// αT values for the contrast plot (comma separated).
        #[arg(value_delimiter = ',')]
        decay_alpha_t: Vec<f64>,
    }
}

section! {
    OptimizeArgs {
        /// Dephasing rates α (comma separated).
        #[arg(value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Rescaled multipliers αΛ (comma separated).
        #[arg(value_delimiter = ',', allow_negative_numbers = true)]
        lambdas: Vec<f64>,
        /// Branches of Θ = ±α to solve: any of `+`, `-` (comma separated).
        #[arg(value_delimiter = ',', allow_hyphen_values = true)]
        branches: Vec<String>,
        /// Lower end of the αT search interval.
        bracket_lo: f64,
        /// Upper end of the αT search interval.
        bracket_hi: f64,
        /// Number of sign-scan cells in the search interval.
        subdivisions: usize,
        /// recomputed or printed.
        objective: String,
        format: String,
        out: PathBuf,
        /// αT against Λ plot.
        svg: PathBuf,
    }
}

section! {
    CpiArgs {
        /// Local dimension of clock and remainder.
        d: usize,
        /// Level spacing of the clock Hamiltonian.
        omega: f64,
        /// Clock observable: chain or phase.
        observable: String,
        /// Use a product state instead of the maximally entangled one.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        product: bool,
        /// Index of the reading eigenstate the clock starts in.
        initial_reading: usize,
        /// Trapezoid intervals over one period.
        intervals: usize,
        format: String,
        out: PathBuf,
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileRoot {
    ramsey: Option<RamseyArgs>,
    scan: Option<ScanArgs>,
    fwhm: Option<FwhmArgs>,
    optimize: Option<OptimizeArgs>,
    cpi: Option<CpiArgs>,
}

/// Parsed config file plus its text for locating keys in messages.
#[derive(Debug)]
pub struct ConfigFile {
    path: PathBuf,
    text: String,
    root: FileRoot,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let root: FileRoot = toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        Ok(Self {
            path: path.to_path_buf(),
            text,
            root,
        })
    }

    /// 1-based line of `key` inside `[section]`.
    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let header = format!("[{section}]");
        let mut inside = false;
        for (i, line) in self.text.lines().enumerate() {
            let t = line.trim();
            if t.starts_with('[') {
                inside = t == header;
                continue;
            }
            if inside {
                if let Some((k, _)) = t.split_once('=') {
                    let k = k.trim();
                    if k == key || (key == "ramsey_time" && k == "T") {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }
}

/// The section types that can be read from a config file.
pub trait Section: Sized + Default {
    const NAME: &'static str;
    fn from_file(file: &ConfigFile) -> Option<Self>;
}

macro_rules! impl_section {
    ($ty:ty, $field:ident) => {
        impl Section for $ty {
            const NAME: &'static str = stringify!($field);
            fn from_file(file: &ConfigFile) -> Option<Self> {
                file.root.$field.clone()
            }
        }
    };
}

impl_section!(RamseyArgs, ramsey);
impl_section!(ScanArgs, scan);
impl_section!(FwhmArgs, fwhm);
impl_section!(OptimizeArgs, optimize);
impl_section!(CpiArgs, cpi);

/// Where each merged value came from, for error messages.
pub struct Origins<'a> {
    section: &'static str,
    flags: Vec<&'static str>,
    file: Option<&'a ConfigFile>,
}

impl<'a> Origins<'a> {
    pub fn describe(&self, key: &str) -> String {
        if self.flags.contains(&key) {
            return format!("flag --{}", key.replace('_', "-"));
        }
        if let Some(file) = self.file {
            if let Some(line) = file.line_of(self.section, key) {
                return format!("{}:{line}: [{}] {key}", file.path.display(), self.section);
            }
        }
        format!("{key} (default)")
    }

    pub fn invalid(&self, key: &str, reason: impl fmt::Display) -> CliError {
        CliError::validation(format!("{}: {reason}", self.describe(key)))
    }
}

/// Applies the file section beneath the flags.
pub fn resolve<'a, T: Section>(
    flags: T,
    file: Option<&'a ConfigFile>,
    set_keys: impl Fn(&T) -> Vec<&'static str>,
    overlay: impl Fn(T, T) -> T,
) -> (T, Origins<'a>) {
    let origins = Origins {
        section: T::NAME,
        flags: set_keys(&flags),
        file,
    };
    let from_file = file.and_then(T::from_file).unwrap_or_default();
    (overlay(flags, from_file), origins)
}
