//! CSV emission. Every file starts with one comment line carrying the
//! config hash and the column names, then the plain CSV header and data.

use exkerr_core::diagnostics::EnergySeries;
use exkerr_core::{Error, MultiplierSet};
use std::io::Write;
use std::path::Path;

const COEFF_COLUMNS: &str = "r,z,u,w,v,wT,A,V,boxwT,th_dr,th_dt,th_ang,th_psi";
const SERIES_COLUMNS: &str = "t,E_T,flux_in,flux_out,B_cum,C_est_running";

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, Error> {
    let f = std::fs::File::create(path)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(f))
}

/// Coefficient rows on a log grid in r − M over (M(1+1e−6), r_max].
pub fn write_coeffs_csv(
    path: &Path,
    ms: &MultiplierSet,
    hash: &str,
    n: usize,
    r_max: f64,
) -> Result<usize, Error> {
    let m = ms.params.mass;
    let mut w = create(path)?;
    let io = |e: std::io::Error| Error::Config(format!("write {}: {e}", path.display()));
    writeln!(w, "# config_hash={hash} columns={COEFF_COLUMNS}").map_err(io)?;
    writeln!(w, "{COEFF_COLUMNS}").map_err(io)?;
    let (lo, hi) = ((1e-6_f64).ln(), (r_max / m - 1.0).ln());
    for k in 0..n {
        let r = m * (1.0 + (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp());
        let s = ms.sample(r)?;
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            s.r, s.z, s.u, s.w, s.v, s.w_t, s.a, s.v_coeff, s.box_w_t,
            s.theorem[0], s.theorem[1], s.theorem[2], s.theorem[3]
        )
        .map_err(io)?;
    }
    Ok(n)
}

pub fn write_series_csv(path: &Path, series: &EnergySeries, hash: &str) -> Result<(), Error> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| Error::Config(format!("write {}: {e}", path.display()));
    writeln!(w, "# config_hash={hash} columns={SERIES_COLUMNS}").map_err(io)?;
    writeln!(w, "{SERIES_COLUMNS}").map_err(io)?;
    for i in 0..series.times.len() {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            series.times[i],
            series.e_t[i],
            series.flux_in[i],
            series.flux_out[i],
            series.b_cum[i],
            series.c_est_running[i]
        )
        .map_err(io)?;
    }
    Ok(())
}
