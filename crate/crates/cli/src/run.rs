//! Command dispatch and output.
//!
//! Every command validates the group first and writes `report.json` to the
//! output directory, plus the command's CSV table if it has one. Reports
//! carry no timings, so equal configurations and seeds give equal bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use schottky_core::export::{
    write_fup_scan_csv, write_localization_csv, write_partition_csv, write_zeros_csv,
    write_zeta_grid_csv,
};
use schottky_core::fup::{
    eigenfunction_localization, equivariance_residual_for_word, fit_beta, norm_scan, RadialCutoff,
};
use schottky_core::partition::{
    box_counting_dimension, enumerate_partition, limit_set_cover, IntervalCover,
};
use schottky_core::transfer::{bowen_dimension_with, find_zeros, zeta_grid, ZeroSearchOptions};
use schottky_core::words::words_of_length;
use schottky_core::{word_interval, SchottkyData, ValidationReport, Word};

use crate::config::{Command, ConfigError, RunConfig};

#[derive(Debug)]
pub enum RunError {
    Config(Vec<ConfigError>),
    /// The group failed the Schottky validator.
    Validation(ValidationReport),
    /// A computation failed; numerical failures exit with status 2.
    Compute(schottky_core::Error),
    /// Zeros were found but not all of them survived M-doubling.
    Unverified {
        unresolved: usize,
        unverified: usize,
    },
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Compute(e) if e.is_numerical() => 2,
            RunError::Unverified { .. } => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(errs) => {
                let lines: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
                write!(f, "invalid configuration:\n  {}", lines.join("\n  "))
            }
            RunError::Validation(r) => {
                write!(f, "group failed validation: {}", r.failures.join("; "))
            }
            RunError::Compute(e) => write!(f, "{e}"),
            RunError::Unverified {
                unresolved,
                unverified,
            } => write!(
                f,
                "{unresolved} unresolved boxes and {unverified} zeros failed the M-doubling check"
            ),
            RunError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<schottky_core::Error> for RunError {
    fn from(e: schottky_core::Error) -> Self {
        RunError::Compute(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub seed: u64,
    pub config: RunConfig,
    pub validation: Option<ValidationReport>,
    pub result: Value,
    /// Files written next to the report.
    pub outputs: Vec<String>,
}

/// Resolves the command from the command line and the configuration; they
/// must agree when both are given.
pub fn resolve_command(cli: Option<Command>, cfg: &RunConfig) -> Result<Command, RunError> {
    match (cli, cfg.command) {
        (Some(a), Some(b)) if a != b => Err(RunError::Config(vec![ConfigError {
            path: "command".into(),
            message: format!(
                "configuration says {b:?} but {a:?} was requested",
                b = b.name(),
                a = a.name()
            ),
        }])),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(RunError::Config(vec![ConfigError {
            path: "command".into(),
            message: "no command given".into(),
        }])),
    }
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn csv<F>(&mut self, name: &str, write: F) -> Result<(), RunError>
    where
        F: FnOnce(BufWriter<File>) -> schottky_core::Result<()>,
    {
        let file = File::create(self.dir.join(name))?;
        write(BufWriter::new(file))?;
        self.written.push(name.to_string());
        Ok(())
    }
}

fn write_report(dir: &Path, report: &RunReport) -> Result<(), RunError> {
    let mut w = BufWriter::new(File::create(dir.join("report.json"))?);
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| RunError::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Validates, runs one command and writes its outputs into `out`.
/// On a validation failure the report is still written before returning.
pub fn run(
    cfg: &RunConfig,
    command: Command,
    seed: u64,
    out: &Path,
) -> Result<RunReport, RunError> {
    let errs = cfg.check();
    if !errs.is_empty() {
        return Err(RunError::Config(errs));
    }
    fs::create_dir_all(out)?;
    let mut report = RunReport {
        command,
        seed,
        config: cfg.clone(),
        validation: None,
        result: Value::Null,
        outputs: Vec::new(),
    };
    let data = match cfg.group.build() {
        Ok(d) => d,
        Err(schottky_core::Error::InvalidSchottky { failures }) => {
            let v = ValidationReport {
                passed: false,
                min_gap: f64::NAN,
                max_pairing_residual: f64::NAN,
                max_boundary_residual: f64::NAN,
                failures,
            };
            report.validation = Some(v.clone());
            write_report(out, &report)?;
            return Err(RunError::Validation(v));
        }
        Err(e) => return Err(e.into()),
    };
    let validation = data.validate();
    report.validation = Some(validation.clone());
    if !validation.passed {
        write_report(out, &report)?;
        return Err(RunError::Validation(validation));
    }

    let mut outputs = Outputs {
        dir: out.to_path_buf(),
        written: Vec::new(),
    };
    let outcome = dispatch(cfg, command, seed, &data, &mut outputs);
    report.outputs = outputs.written;
    match outcome {
        Ok(result) => {
            report.result = result;
            write_report(out, &report)?;
            Ok(report)
        }
        Err(Failure { result, error }) => {
            report.result = result;
            write_report(out, &report)?;
            Err(error)
        }
    }
}

/// A failed command, with whatever result it produced before failing.
struct Failure {
    result: Value,
    error: RunError,
}

impl<E: Into<RunError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            result: Value::Null,
            error: e.into(),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn dispatch(
    cfg: &RunConfig,
    command: Command,
    seed: u64,
    data: &SchottkyData,
    out: &mut Outputs,
) -> Result<Value, Failure> {
    match command {
        Command::Validate => Ok(json!({ "letters": data.letters(), "disks": data.disks() })),
        Command::Words => {
            let n = cfg.words.length;
            let entries = words_of_length(data, n)
                .into_iter()
                .map(|w| word_interval(data, &w).map(|iv| (w, iv)))
                .collect::<schottky_core::Result<Vec<_>>>()?;
            let count = entries.len();
            let cover = IntervalCover {
                entries,
                resolution: 0.0,
                margin: 0.0,
            };
            out.csv("words.csv", |w| write_partition_csv(w, &cover))?;
            Ok(json!({ "length": n, "count": count, "total_length": cover.total_length() }))
        }
        Command::Partition => {
            let p = &cfg.partition;
            let partition = enumerate_partition(data, p.tau)?;
            partition.check(data)?;
            let cover = limit_set_cover(data, p.tau, p.margin)?;
            out.csv("partition.csv", |w| write_partition_csv(w, &cover))?;
            let max_len = partition.words.iter().map(|w| w.len()).max().unwrap_or(0);
            Ok(json!({
                "tau": p.tau,
                "margin": p.margin,
                "count": cover.len(),
                "max_word_length": max_len,
                "total_length": cover.total_length(),
            }))
        }
        Command::Dimension => {
            let p = &cfg.dimension;
            let (a, b) = rayon::join(
                || bowen_dimension_with(data, p.tol, p.m),
                || bowen_dimension_with(data, p.tol, 2 * p.m),
            );
            let (a, b) = (a?, b?);
            let boxes = if p.box_count > 0 {
                Some(box_counting_dimension(data, p.box_count)?)
            } else {
                None
            };
            Ok(json!({
                "delta": a.delta,
                "estimate": a,
                "delta_2M": (a.delta - b.delta).abs(),
                "box_count": boxes,
            }))
        }
        Command::ZetaGrid => {
            let p = &cfg.zeta_grid;
            let grid = zeta_grid(
                data,
                (p.re[0], p.re[1]),
                (p.im[0], p.im[1]),
                p.n_re,
                p.n_im,
                p.m,
            )?;
            out.csv("zeta_grid.csv", |w| write_zeta_grid_csv(w, &grid))?;
            let max_delta = grid.iter().map(|c| c.delta).fold(0.0, f64::max);
            Ok(json!({ "points": grid.len(), "m": p.m, "max_delta_2M": max_delta }))
        }
        Command::Zeros => {
            let rect = cfg.rect().ok_or_else(|| {
                RunError::Config(vec![ConfigError {
                    path: "zeros.rect".into(),
                    message: "required by the zeros command".into(),
                }])
            })?;
            let zeros = find_zeros(data, rect, cfg.zeros.m, &ZeroSearchOptions::default())?;
            out.csv("zeros.csv", |w| write_zeros_csv(w, &zeros))?;
            let result = to_value(&zeros);
            if zeros.all_verified() {
                Ok(result)
            } else {
                Err(Failure {
                    result,
                    error: RunError::Unverified {
                        unresolved: zeros.unresolved.len(),
                        unverified: zeros.zeros.iter().filter(|z| !z.verified).count(),
                    },
                })
            }
        }
        Command::Fup => {
            let p = &cfg.fup;
            let chi = RadialCutoff::for_data(data);
            let scan = norm_scan(data, &p.h, p.rho, p.c0, &chi, seed, p.certify)?;
            out.csv("fup_scan.csv", |w| write_fup_scan_csv(w, &scan))?;
            let restricted: Vec<(f64, f64)> =
                scan.iter().map(|m| (m.h, m.restricted_norm)).collect();
            let whole: Vec<(f64, f64)> = scan.iter().map(|m| (m.h, m.whole_norm)).collect();
            let fit = fit_beta(&restricted)?;
            let whole_fit = fit_beta(&whole)?;
            Ok(json!({
                "beta_fit": fit.beta_fit,
                "residual": fit.residual,
                "points_used": fit.points_used,
                "fit": fit,
                "whole_circle_fit": whole_fit,
                "measurements": scan,
            }))
        }
        Command::Equivariance => {
            let p = &cfg.equivariance;
            let word = Word::parse(&p.word)?;
            let s = cfg.equivariance_s();
            let (a, b) = rayon::join(
                || equivariance_residual_for_word(data, &word, s, p.n, p.modes),
                || equivariance_residual_for_word(data, &word, s, 2 * p.n, p.modes),
            );
            let (a, b) = (a?, b?);
            Ok(json!({
                "residual": a.residual,
                "at_n": a,
                "at_2n": b,
                "N_doubling_delta": (a.residual - b.residual).abs(),
            }))
        }
        Command::Localization => {
            let p = &cfg.localization;
            let [re, im] = p.s0.ok_or_else(|| {
                RunError::Config(vec![ConfigError {
                    path: "localization.s0".into(),
                    message: "required by the localization command".into(),
                }])
            })?;
            let s0 = Complex64::new(re, im);
            let h = p.h.unwrap_or(1.0 / im.abs());
            let (a, b) = rayon::join(
                || eigenfunction_localization(data, s0, p.m, h, p.k_threshold),
                || eigenfunction_localization(data, s0, 2 * p.m, h, p.k_threshold),
            );
            let (a, b) = (a?, b?);
            out.csv("localization.csv", |w| write_localization_csv(w, &a))?;
            let letters: Vec<Value> = a
                .letters
                .iter()
                .map(|l| json!({ "letter": l.letter + 1, "outside_fraction": l.outside_fraction }))
                .collect();
            let negligible: Vec<usize> = a.negligible.iter().map(|&x| x + 1).collect();
            Ok(json!({
                "s0": s0,
                "h": h,
                "m": p.m,
                "k_threshold": p.k_threshold,
                "max_outside_fraction": a.max_outside_fraction,
                "delta_2M": (a.max_outside_fraction - b.max_outside_fraction).abs(),
                "letters": letters,
                "negligible": negligible,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn elementary(extra: &str) -> RunConfig {
        parse_config(&format!(
            "[group]\npreset = \"elementary\"\nell = 2\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn command_conflict_is_a_config_error() {
        let c = parse_config("command = \"zeros\"\n[group]\npreset = \"elementary\"\nell = 2\n")
            .unwrap();
        let e = resolve_command(Some(Command::Fup), &c).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert_eq!(resolve_command(None, &c).unwrap(), Command::Zeros);
        assert!(resolve_command(None, &elementary("")).is_err());
    }

    #[test]
    fn zeros_without_rect_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let e = run(&elementary(""), Command::Zeros, 0, dir.path()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn numerical_failures_exit_with_two() {
        let e = RunError::Compute(schottky_core::Error::NotConverged {
            what: "test",
            last_change: 1.0,
        });
        assert_eq!(e.exit_code(), 2);
        assert_eq!(
            RunError::Unverified {
                unresolved: 1,
                unverified: 0
            }
            .exit_code(),
            2
        );
    }

    #[test]
    fn words_table_has_one_row_per_word() {
        let dir = tempfile::tempdir().unwrap();
        let r = run(
            &elementary("[words]\nlength = 4\n"),
            Command::Words,
            0,
            dir.path(),
        )
        .unwrap();
        assert_eq!(r.result["count"], 2);
        let text = fs::read_to_string(dir.path().join("words.csv")).unwrap();
        assert_eq!(text.lines().count(), 3);
    }
}
