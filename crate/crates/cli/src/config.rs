//! Run configuration, read from TOML.
//!
//! ```toml
//! command = "zeros"
//! seed = 7
//!
//! [group]
//! preset = "elementary"
//! ell = 2.0
//!
//! [zeros]
//! rect = [-0.5, 1.0, -10.0, 10.0]
//! m = 24
//! ```
//!
//! The group is either a preset (`"elementary"` with `ell`, `"symmetric"`
//! with `r` and `gap`) or explicit `disks = [{ center, radius }, ...]` with
//! optional `generators = [[a, b, c, d], ...]`. Command sections are
//! optional and every field in them has a default, except `zeros.rect` and
//! `localization.s0`. Complex numbers are `[re, im]` pairs.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use schottky_core::transfer::Rect;
use schottky_core::{elementary_schottky, symmetric_schottky, Disk, MobiusMap, SchottkyData, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Words,
    Partition,
    Dimension,
    ZetaGrid,
    Zeros,
    Fup,
    Equivariance,
    Localization,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Words => "words",
            Command::Partition => "partition",
            Command::Dimension => "dimension",
            Command::ZetaGrid => "zeta-grid",
            Command::Zeros => "zeros",
            Command::Fup => "fup",
            Command::Equivariance => "equivariance",
            Command::Localization => "localization",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A problem with one field of the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub group: GroupSpec,
    #[serde(default)]
    pub words: WordsParams,
    #[serde(default)]
    pub partition: PartitionParams,
    #[serde(default)]
    pub dimension: DimensionParams,
    #[serde(default)]
    pub zeta_grid: ZetaGridParams,
    #[serde(default)]
    pub zeros: ZerosParams,
    #[serde(default)]
    pub fup: FupParams,
    #[serde(default)]
    pub equivariance: EquivarianceParams,
    #[serde(default)]
    pub localization: LocalizationParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Elementary,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub center: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub preset: Option<Preset>,
    pub ell: Option<f64>,
    pub r: Option<usize>,
    pub gap: Option<f64>,
    pub disks: Option<Vec<DiskSpec>>,
    pub generators: Option<Vec<[f64; 4]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WordsParams {
    pub length: usize,
}

impl Default for WordsParams {
    fn default() -> Self {
        WordsParams { length: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionParams {
    pub tau: f64,
    pub margin: f64,
}

impl Default for PartitionParams {
    fn default() -> Self {
        PartitionParams {
            tau: 1e-2,
            margin: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimensionParams {
    pub tol: f64,
    pub m: usize,
    /// Also estimate by box counting, refining until a cover has this many
    /// intervals. Zero skips it.
    pub box_count: usize,
}

impl Default for DimensionParams {
    fn default() -> Self {
        DimensionParams {
            tol: 1e-9,
            m: schottky_core::transfer::DIMENSION_NODES,
            box_count: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZetaGridParams {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub n_re: usize,
    pub n_im: usize,
    pub m: usize,
}

impl Default for ZetaGridParams {
    fn default() -> Self {
        ZetaGridParams {
            re: [0.0, 1.0],
            im: [-5.0, 5.0],
            n_re: 11,
            n_im: 11,
            m: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZerosParams {
    /// [re_min, re_max, im_min, im_max].
    pub rect: Option<[f64; 4]>,
    pub m: usize,
}

impl Default for ZerosParams {
    fn default() -> Self {
        ZerosParams { rect: None, m: 24 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FupParams {
    pub h: Vec<f64>,
    pub rho: f64,
    pub c0: f64,
    /// Repeat every measurement on the doubled grid.
    pub certify: bool,
}

impl Default for FupParams {
    fn default() -> Self {
        FupParams {
            h: (6..=12).map(|k| 2f64.powi(-k)).collect(),
            rho: 0.8,
            c0: 1.0,
            certify: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquivarianceParams {
    pub word: String,
    pub s: [f64; 2],
    pub n: usize,
    pub modes: usize,
}

impl Default for EquivarianceParams {
    fn default() -> Self {
        EquivarianceParams {
            word: "1".into(),
            s: [0.5, 32.0],
            n: 1024,
            modes: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizationParams {
    pub s0: Option<[f64; 2]>,
    pub m: usize,
    /// Defaults to 1/|Im s0|.
    pub h: Option<f64>,
    pub k_threshold: f64,
}

impl Default for LocalizationParams {
    fn default() -> Self {
        LocalizationParams {
            s0: None,
            m: 32,
            h: None,
            k_threshold: 10.0,
        }
    }
}

impl FromStr for RunConfig {
    type Err = Vec<ConfigError>;
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_config(text)
    }
}

/// Parses and range-checks a configuration. Syntax and type errors stop at
/// the first problem; range errors are all collected.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<ConfigError>> {
    let de =
        toml::Deserializer::parse(text).map_err(|e| vec![ConfigError::new("", e.to_string())])?;
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        vec![ConfigError::new(path, e.into_inner().message().to_string())]
    })?;
    let errors = cfg.check();
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(errors)
    }
}

fn positive(errs: &mut Vec<ConfigError>, path: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        errs.push(ConfigError::new(
            path,
            format!("must be positive and finite, got {x}"),
        ));
    }
}

fn finite(errs: &mut Vec<ConfigError>, path: &str, xs: &[f64]) {
    if xs.iter().any(|x| !x.is_finite()) {
        errs.push(ConfigError::new(path, "must be finite"));
    }
}

fn at_least(errs: &mut Vec<ConfigError>, path: &str, n: usize, min: usize) {
    if n < min {
        errs.push(ConfigError::new(
            path,
            format!("must be at least {min}, got {n}"),
        ));
    }
}

impl RunConfig {
    pub fn check(&self) -> Vec<ConfigError> {
        let mut e = Vec::new();
        self.group.check(&mut e);

        at_least(&mut e, "words.length", self.words.length, 1);

        positive(&mut e, "partition.tau", self.partition.tau);
        if !(self.partition.margin >= 0.0 && self.partition.margin.is_finite()) {
            e.push(ConfigError::new(
                "partition.margin",
                "must be nonnegative and finite",
            ));
        }

        if !(self.dimension.tol >= 1e-10 && self.dimension.tol < 1.0) {
            e.push(ConfigError::new("dimension.tol", "must lie in [1e-10, 1)"));
        }
        at_least(&mut e, "dimension.m", self.dimension.m, 2);

        let z = &self.zeta_grid;
        finite(&mut e, "zeta_grid.re", &z.re);
        finite(&mut e, "zeta_grid.im", &z.im);
        at_least(&mut e, "zeta_grid.n_re", z.n_re, 1);
        at_least(&mut e, "zeta_grid.n_im", z.n_im, 1);
        at_least(&mut e, "zeta_grid.m", z.m, 2);

        if let Some([a, b, c, d]) = self.zeros.rect {
            if Rect::new(a, b, c, d).is_err() {
                e.push(ConfigError::new(
                    "zeros.rect",
                    "need finite bounds with min < max",
                ));
            }
        }
        at_least(&mut e, "zeros.m", self.zeros.m, 2);

        let f = &self.fup;
        if f.h.len() < 5 {
            e.push(ConfigError::new(
                "fup.h",
                format!("\u{2265} 5 samples required, got {}", f.h.len()),
            ));
        }
        for (i, &h) in f.h.iter().enumerate() {
            if !(h > 0.0 && h < 1.0) {
                e.push(ConfigError::new(
                    format!("fup.h[{i}]"),
                    format!("must lie in (0, 1), got {h}"),
                ));
            }
        }
        if f.h.windows(2).any(|w| !(w[1] < w[0])) {
            e.push(ConfigError::new("fup.h", "must be strictly decreasing"));
        }
        if !(f.rho > 0.0 && f.rho <= 1.0) {
            e.push(ConfigError::new(
                "fup.rho",
                format!("must lie in (0, 1], got {}", f.rho),
            ));
        }
        positive(&mut e, "fup.c0", f.c0);

        let q = &self.equivariance;
        if Word::parse(&q.word).is_err() {
            e.push(ConfigError::new(
                "equivariance.word",
                format!("cannot parse {:?}", q.word),
            ));
        }
        finite(&mut e, "equivariance.s", &q.s);
        if q.s[1] == 0.0 {
            e.push(ConfigError::new(
                "equivariance.s",
                "needs a nonzero imaginary part",
            ));
        }
        at_least(&mut e, "equivariance.n", q.n, 64);
        at_least(&mut e, "equivariance.modes", q.modes, 1);

        let l = &self.localization;
        if let Some(s0) = l.s0 {
            finite(&mut e, "localization.s0", &s0);
            if s0[1] == 0.0 {
                e.push(ConfigError::new(
                    "localization.s0",
                    "needs a nonzero imaginary part",
                ));
            }
        }
        if let Some(h) = l.h {
            positive(&mut e, "localization.h", h);
        }
        at_least(&mut e, "localization.m", l.m, 2);
        positive(&mut e, "localization.k_threshold", l.k_threshold);
        e
    }

    pub fn rect(&self) -> Option<Rect> {
        self.zeros
            .rect
            .and_then(|[a, b, c, d]| Rect::new(a, b, c, d).ok())
    }

    pub fn equivariance_s(&self) -> Complex64 {
        Complex64::new(self.equivariance.s[0], self.equivariance.s[1])
    }
}

impl GroupSpec {
    fn check(&self, e: &mut Vec<ConfigError>) {
        let preset_fields =
            self.preset.is_some() || self.ell.is_some() || self.r.is_some() || self.gap.is_some();
        let explicit = self.disks.is_some() || self.generators.is_some();
        if preset_fields == explicit {
            e.push(ConfigError::new(
                "group",
                "exactly one group spec: a preset or explicit disks",
            ));
            return;
        }
        match &self.preset {
            Some(Preset::Elementary) => {
                match self.ell {
                    Some(ell) => positive(e, "group.ell", ell),
                    None => e.push(ConfigError::new(
                        "group.ell",
                        "required by the elementary preset",
                    )),
                }
                for (name, set) in [
                    ("group.r", self.r.is_some()),
                    ("group.gap", self.gap.is_some()),
                ] {
                    if set {
                        e.push(ConfigError::new(name, "not used by the elementary preset"));
                    }
                }
            }
            Some(Preset::Symmetric) => {
                match self.r {
                    Some(r) => at_least(e, "group.r", r, 2),
                    None => e.push(ConfigError::new(
                        "group.r",
                        "required by the symmetric preset",
                    )),
                }
                match self.gap {
                    Some(g) => positive(e, "group.gap", g),
                    None => e.push(ConfigError::new(
                        "group.gap",
                        "required by the symmetric preset",
                    )),
                }
                if self.ell.is_some() {
                    e.push(ConfigError::new(
                        "group.ell",
                        "not used by the symmetric preset",
                    ));
                }
            }
            None if !explicit => e.push(ConfigError::new("group.preset", "missing")),
            None => {}
        }
        if let Some(disks) = &self.disks {
            if disks.is_empty() || disks.len() % 2 != 0 {
                e.push(ConfigError::new(
                    "group.disks",
                    format!("need a positive even number of disks, got {}", disks.len()),
                ));
            }
            for (i, d) in disks.iter().enumerate() {
                if !d.center.is_finite() {
                    e.push(ConfigError::new(
                        format!("group.disks[{i}].center"),
                        "must be finite",
                    ));
                }
                positive(e, &format!("group.disks[{i}].radius"), d.radius);
            }
            if let Some(gens) = &self.generators {
                if gens.len() != disks.len() {
                    e.push(ConfigError::new(
                        "group.generators",
                        format!("{} generators for {} disks", gens.len(), disks.len()),
                    ));
                }
                for (i, g) in gens.iter().enumerate() {
                    if MobiusMap::new(g[0], g[1], g[2], g[3]).is_err() {
                        e.push(ConfigError::new(
                            format!("group.generators[{i}]"),
                            "must have determinant 1",
                        ));
                    }
                }
            }
        } else if self.generators.is_some() {
            e.push(ConfigError::new(
                "group.disks",
                "required when generators are given",
            ));
        }
    }

    /// The group, without running the Schottky validator on explicit data.
    pub fn build(&self) -> schottky_core::Result<SchottkyData> {
        match (&self.preset, &self.disks) {
            (Some(Preset::Elementary), _) => elementary_schottky(self.ell.unwrap_or(f64::NAN)),
            (Some(Preset::Symmetric), _) => {
                symmetric_schottky(self.r.unwrap_or(0), self.gap.unwrap_or(f64::NAN))
            }
            (None, Some(disks)) => {
                let disks = disks
                    .iter()
                    .map(|d| Disk::new(d.center, d.radius))
                    .collect::<schottky_core::Result<Vec<_>>>()?;
                match &self.generators {
                    Some(gens) => {
                        let gens = gens
                            .iter()
                            .map(|g| MobiusMap::new(g[0], g[1], g[2], g[3]))
                            .collect::<schottky_core::Result<Vec<_>>>()?;
                        SchottkyData::new(disks, gens)
                    }
                    None => SchottkyData::from_disks(disks),
                }
            }
            (None, None) => Err(schottky_core::Error::InvalidParameter {
                name: "group",
                reason: "no group given".into(),
            }),
        }
    }
}
