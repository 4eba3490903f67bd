//! CSV tables shared by sampled and exact results.

use std::fmt::Write;

use super::moments::MomentEstimate;
use super::postselect::PostSelectionCurve;

/// Where a row came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Sampled,
    Exact,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Sampled => "fss",
            Source::Exact => "exact",
        }
    }
}

/// One row of a temperature table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub temperature: f64,
    pub mean_n0: f64,
    pub var_n0: f64,
    pub stderr: f64,
    pub source: Source,
}

impl ScanRow {
    pub fn sampled(temperature: f64, m: &MomentEstimate) -> Self {
        ScanRow { temperature, mean_n0: m.mean_n0, var_n0: m.var_n0, stderr: m.stderr_var, source: Source::Sampled }
    }

    pub fn exact(temperature: f64, mean_n0: f64, var_n0: f64) -> Self {
        ScanRow { temperature, mean_n0, var_n0, stderr: 0.0, source: Source::Exact }
    }
}

pub const SCAN_HEADER: &str = "T,mean_N0,var_N0,stderr,source";
pub const CURVE_HEADER: &str = "T,f,delta_E,var_N0,stderr,W,E_mean";

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = format!("{SCAN_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{}", r.temperature, r.mean_n0, r.var_n0, r.stderr, r.source.as_str()).expect("string write");
    }
    s
}

/// Post-selection curves. `f` is the fraction actually retained, `W` the
/// number of retained records, `E_mean` the centre of the window; the
/// temperature label is the one of the parent canonical set.
pub fn curve_csv(curves: &[PostSelectionCurve]) -> String {
    let mut s = format!("{CURVE_HEADER}\n");
    for c in curves {
        for p in &c.points {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                c.temperature, p.fraction, p.delta_e, p.var_n0, p.stderr_var, p.retained, c.e_mean
            )
            .expect("string write");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_rows() {
        let rows = [ScanRow::exact(2.5, 10.0, 3.25)];
        assert_eq!(scan_csv(&rows), "T,mean_N0,var_N0,stderr,source\n2.5,10,3.25,0,exact\n");
    }
}
