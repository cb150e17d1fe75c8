//! Convergence fits and CSV output.

use std::io::Write;

use crate::error::{Error, Result};

/// Least-squares slope of `log e` against `log ε`. `None` if fewer than
/// two points or any value is not positive and finite.
pub fn fit_slope(eps: &[f64], errs: &[f64]) -> Option<f64> {
    if eps.len() != errs.len() || eps.len() < 2 {
        return None;
    }
    if eps.iter().chain(errs).any(|v| !(*v > 0.0 && v.is_finite())) {
        return None;
    }
    let x: Vec<f64> = eps.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

/// Errors strictly decrease as `ε` decreases (the ladder is given in
/// decreasing order of `ε`).
pub fn is_monotone(errs: &[f64]) -> bool {
    errs.windows(2).all(|w| w[1] < w[0])
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header and rows of floats as CSV.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Invalid(format!("writing CSV: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::SizeMismatch { expected: header.len(), got: r.len() });
        }
        w.write_record(r.iter().map(|v| fmt_float(*v))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("writing CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law_is_its_exponent() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = eps.iter().map(|e: &f64| 3.0 * e.powf(1.7)).collect();
        assert!((fit_slope(&eps, &errs).unwrap() - 1.7).abs() < 1e-12);
        assert!(fit_slope(&eps, &[1.0, 0.0, 1.0, 1.0]).is_none());
        assert!(is_monotone(&errs));
    }

    #[test]
    fn csv_floats_round_trip() {
        let mut buf = Vec::new();
        let v = [0.1 + 0.2, 1.0 / 3.0, -2.5e-300];
        write_csv(&mut buf, &["a", "b", "c"], &[v.to_vec()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let back: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, v);
    }
}
