//! CSV output. Floats are written as `{:.16e}` so that files round-trip
//! exactly and are byte-identical across runs.

use std::io::Write;

use crate::error::Result;
use crate::fup::{LocalizationProfile, NormMeasurement};
use crate::partition::IntervalCover;
use crate::transfer::{CertifiedDet, ZeroList};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// re_s, im_s, abs_det, M, newton_iters, multiplicity, delta_2M.
pub fn write_zeros_csv<W: Write>(out: W, zeros: &ZeroList) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "re_s",
        "im_s",
        "abs_det",
        "M",
        "newton_iters",
        "multiplicity",
        "delta_2M",
    ])?;
    for z in &zeros.zeros {
        w.write_record([
            fmt_f64(z.s.re),
            fmt_f64(z.s.im),
            fmt_f64(z.abs_det),
            z.m.to_string(),
            z.newton_iters.to_string(),
            z.multiplicity.to_string(),
            fmt_f64(z.delta_2m),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// h, rho, C0, N_grid, restricted_norm, whole_norm, N_doubling_delta.
pub fn write_fup_scan_csv<W: Write>(out: W, scan: &[NormMeasurement]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "h",
        "rho",
        "C0",
        "N_grid",
        "restricted_norm",
        "whole_norm",
        "N_doubling_delta",
    ])?;
    for m in scan {
        w.write_record([
            fmt_f64(m.h),
            fmt_f64(m.rho),
            fmt_f64(m.c0),
            m.n_grid.to_string(),
            fmt_f64(m.restricted_norm),
            fmt_f64(m.whole_norm),
            fmt_opt(m.doubling_delta),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// word, left, right, length.
pub fn write_partition_csv<W: Write>(out: W, cover: &IntervalCover) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["word", "left", "right", "length"])?;
    for (word, iv) in &cover.entries {
        w.write_record([
            word.to_string(),
            fmt_f64(iv.left),
            fmt_f64(iv.right),
            fmt_f64(iv.length()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// re_s, im_s, re_det, im_det, abs_det, M, delta_2M.
pub fn write_zeta_grid_csv<W: Write>(out: W, grid: &[CertifiedDet]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "re_s", "im_s", "re_det", "im_det", "abs_det", "M", "delta_2M",
    ])?;
    for c in grid {
        w.write_record([
            fmt_f64(c.s.re),
            fmt_f64(c.s.im),
            fmt_f64(c.value.re),
            fmt_f64(c.value.im),
            fmt_f64(c.value.norm()),
            c.m.to_string(),
            fmt_f64(c.delta),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// letter, outside_fraction, negligible. Letters are 1-based.
pub fn write_localization_csv<W: Write>(out: W, profile: &LocalizationProfile) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["letter", "outside_fraction", "negligible"])?;
    let mut rows: Vec<(usize, Option<f64>)> = profile
        .letters
        .iter()
        .map(|l| (l.letter, Some(l.outside_fraction)))
        .chain(profile.negligible.iter().map(|&a| (a, None)))
        .collect();
    rows.sort_by_key(|r| r.0);
    for (a, frac) in rows {
        w.write_record([
            (a + 1).to_string(),
            fmt_opt(frac),
            frac.is_none().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
