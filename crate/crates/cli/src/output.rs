//! CSV and text writers. Floats use the C `%.12e` layout so that files from
//! different tools diff cleanly.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use micromaser_core::experiments::TauSample;
use micromaser_core::{AuditReport, ObservableSeries, PhotonDistribution, QGrid, TauOptimum};

/// `printf("%.12e", x)`: twelve mantissa digits, signed exponent with at
/// least two digits, `nan`/`inf` for non-finite values.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn create(path: &Path) -> io::Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

pub fn write_series(path: &Path, series: &ObservableSeries) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "atom_index,zeta,mean_n,g2")?;
    for k in 0..series.zeta.len() {
        writeln!(
            w,
            "{k},{},{},{}",
            sci(series.zeta[k]),
            sci(series.mean_n[k]),
            sci(series.g2[k])
        )?;
    }
    w.flush()
}

pub fn write_distribution(path: &Path, p: &PhotonDistribution) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "n,p_n")?;
    for (n, &x) in p.p.iter().enumerate() {
        writeln!(w, "{n},{}", sci(x))?;
    }
    w.flush()
}

pub fn write_qgrid(path: &Path, q: &QGrid) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x,y,q")?;
    for i in 0..q.spec.nx {
        for j in 0..q.spec.ny {
            writeln!(
                w,
                "{},{},{}",
                sci(q.spec.x(i)),
                sci(q.spec.y(j)),
                sci(q.value(i, j))
            )?;
        }
    }
    w.flush()
}

pub fn write_audit(path: &Path, audit: &AuditReport) -> io::Result<()> {
    fs::write(path, audit.to_string())
}

/// Coarse grid only, in scan order.
pub fn write_tau_scan(path: &Path, samples: &[TauSample]) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "tau,zeta_min,argmin_atom_index")?;
    for s in samples {
        writeln!(w, "{},{},{}", sci(s.tau), sci(s.zeta_min), s.argmin_atom)?;
    }
    w.flush()
}

pub fn write_best(path: &Path, opt: &TauOptimum) -> io::Result<()> {
    let text = format!(
        "tau_star = {}\nzeta_min = {}\nargmin_atom_index = {}\nenergy_constraint_met = {}\n",
        sci(opt.tau_star),
        sci(opt.zeta_min),
        opt.argmin_atom,
        opt.energy_constraint_met
    );
    fs::write(path, text)
}
