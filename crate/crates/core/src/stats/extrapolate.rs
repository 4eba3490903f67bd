use nalgebra::{DMatrix, DVector};

use super::jackknife::{jackknife_stderr, replicates};
use super::postselect::{curve_points, post_selection_curve, PostSelectionCurve, DEFAULT_FRACTIONS};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::sampler::{SampleRecord, SampleSet};

/// Fits with a larger condition number are refused.
pub const MAX_CONDITION: f64 = 1e8;

/// Curve points with a requested fraction above this are kept in the curve
/// but left out of the fit. Wide windows reach into the tails of the energy
/// distribution, where a low-degree polynomial in `f` no longer describes the
/// curve and the intercept picks up a bias of a few percent.
pub const DEFAULT_FIT_MAX_FRACTION: f64 = 0.4;

/// How a sample set is reduced to a microcanonical variance.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroFit {
    /// Requested retained fractions, largest first.
    pub fractions: Vec<f64>,
    pub degree: usize,
    /// Largest requested fraction that enters the fit.
    pub max_fraction: f64,
}

impl Default for MicroFit {
    fn default() -> Self {
        MicroFit { fractions: DEFAULT_FRACTIONS.to_vec(), degree: 2, max_fraction: DEFAULT_FIT_MAX_FRACTION }
    }
}

impl MicroFit {
    /// The points of `curve` that enter the fit.
    pub fn fitted(&self, curve: &PostSelectionCurve) -> PostSelectionCurve {
        let mut out = curve.clone();
        out.points.retain(|p| p.target <= self.max_fraction * (1.0 + 1e-12));
        out
    }

    pub fn extrapolate(&self, curve: &PostSelectionCurve) -> Result<Extrapolation> {
        extrapolate_micro(&self.fitted(curve), self.degree)
    }
}

/// Intercept at `f = 0` of a polynomial fit to a post-selection curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    pub stderr: f64,
    pub degree: usize,
    pub condition: f64,
}

/// Weighted least-squares polynomial in the retained fraction, evaluated at
/// zero.
///
/// Points are weighted by `1/stderr²`. If any error is missing or zero the fit
/// is unweighted and the uncertainty comes from the residuals instead.
pub fn extrapolate_micro(curve: &PostSelectionCurve, degree: usize) -> Result<Extrapolation> {
    let pts = &curve.points;
    if pts.len() < degree + 2 {
        return Err(Error::InvalidParameter(format!(
            "a degree-{degree} fit needs at least {} curve points, got {}",
            degree + 2,
            pts.len()
        )));
    }
    if pts.iter().all(|p| p.delta_e == 0.0) {
        // Every window already holds a single energy.
        let p = &pts[0];
        return Ok(Extrapolation { value: p.var_n0, stderr: p.stderr_var, degree, condition: 1.0 });
    }
    let weighted = pts.iter().all(|p| p.stderr_var.is_finite() && p.stderr_var > 0.0);
    let n = pts.len();
    let cols = degree + 1;
    let mut x = DMatrix::<f64>::zeros(n, cols);
    let mut y = DVector::<f64>::zeros(n);
    for (r, p) in pts.iter().enumerate() {
        let w = if weighted { 1.0 / p.stderr_var } else { 1.0 };
        for c in 0..cols {
            x[(r, c)] = w * p.fraction.powi(c as i32);
        }
        y[r] = w * p.var_n0;
    }

    let svd = x.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let coef = svd.solve(&y, 0.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;

    // Cov = (XᵀX)⁻¹ in weighted units, scaled by the residual variance when unweighted.
    let xtx_inv = (x.transpose() * &x).try_inverse().ok_or(Error::IllConditioned { condition })?;
    let mut var0 = xtx_inv[(0, 0)];
    if !weighted {
        let resid = &y - &x * &coef;
        let dof = (n - cols) as f64;
        var0 *= resid.norm_squared() / dof;
    }
    Ok(Extrapolation { value: coef[0], stderr: var0.max(0.0).sqrt(), degree, condition })
}

/// Microcanonical variance from one sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroEstimate {
    pub value: f64,
    /// Jackknife over chains of the whole post-select-and-fit procedure, with
    /// the fit weights held at their full-set values.
    /// Falls back to the fit error with fewer than four chains.
    pub stderr: f64,
    /// Error propagated through the fit alone, ignoring correlations between
    /// nested windows.
    pub fit_stderr: f64,
    /// The whole curve, including points outside the fit range.
    pub curve: PostSelectionCurve,
    /// Intercepts for fit degrees 1 to 3 over the fit range, where possible.
    pub sensitivity: Vec<(usize, f64)>,
}

pub fn micro_variance<T: Real>(set: &SampleSet<T>, fit: &MicroFit) -> Result<MicroEstimate> {
    let curve = post_selection_curve(set, &fit.fractions)?;
    let fitted = fit.fitted(&curve);
    let best = extrapolate_micro(&fitted, fit.degree)?;
    let reps = replicates(set.records(), |sub| refit(&curve, sub, fit));
    let jk = jackknife_stderr(&reps);
    let sensitivity = (1..=3).filter_map(|d| extrapolate_micro(&fitted, d).ok().map(|e| (d, e.value))).collect();
    Ok(MicroEstimate {
        value: best.value,
        stderr: if jk.is_finite() { jk } else { best.stderr },
        fit_stderr: best.stderr,
        curve,
        sensitivity,
    })
}

/// Intercept for a subset of records, keeping the fit weights of `full`.
///
/// Holding the weights fixed makes each jackknife replicate one pass over
/// the records instead of a nested jackknife for fresh weights.
pub(crate) fn refit<T: Real>(full: &PostSelectionCurve, records: &[SampleRecord<T>], fit: &MicroFit) -> f64 {
    if records.is_empty() {
        return f64::NAN;
    }
    let mut curve = full.clone();
    for (p, q) in curve.points.iter_mut().zip(curve_points(records, &fit.fractions)) {
        p.fraction = q.fraction;
        p.delta_e = q.delta_e;
        p.var_n0 = q.var;
    }
    fit.extrapolate(&curve).map(|e| e.value).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::CurvePoint;

    fn curve(points: &[(f64, f64, f64)]) -> PostSelectionCurve {
        PostSelectionCurve {
            temperature: 1.0,
            e_mean: 0.0,
            points: points
                .iter()
                .map(|&(f, v, s)| CurvePoint {
                    target: f,
                    fraction: f,
                    delta_e: f,
                    var_n0: v,
                    stderr_var: s,
                    retained: 1,
                })
                .collect(),
        }
    }

    #[test]
    fn constant_curve() {
        let c = curve(&[(1.0, 4.0, 0.1), (0.5, 4.0, 0.1), (0.3, 4.0, 0.2), (0.1, 4.0, 0.3)]);
        let e = extrapolate_micro(&c, 2).unwrap();
        assert!((e.value - 4.0).abs() < 1e-12);
        let c = curve(&[(1.0, 4.0, 0.0), (0.5, 4.0, 0.0), (0.3, 4.0, 0.0), (0.1, 4.0, 0.0)]);
        assert!((extrapolate_micro(&c, 2).unwrap().value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn linear_curve_with_noise() {
        let noise = [0.02, -0.03, 0.01, 0.0, -0.01, 0.02, -0.02, 0.01];
        let pts: Vec<(f64, f64, f64)> = crate::stats::DEFAULT_FRACTIONS
            .iter()
            .zip(noise)
            .map(|(&f, n)| (f, 2.0 + 3.0 * f + n, 0.02))
            .collect();
        let e = extrapolate_micro(&curve(&pts), 1).unwrap();
        assert!((e.value - 2.0).abs() < 3.0 * e.stderr, "{e:?}");
        assert!(e.stderr < 0.05);
    }

    #[test]
    fn fit_range_drops_wide_windows() {
        // exact parabola below the ceiling, a kink above it
        let pts: Vec<(f64, f64, f64)> = crate::stats::DEFAULT_FRACTIONS
            .iter()
            .map(|&f| (f, if f <= 0.4 { 5.0 + f - 2.0 * f * f } else { 9.0 }, 0.1))
            .collect();
        let c = curve(&pts);
        let fit = MicroFit::default();
        assert_eq!(fit.fitted(&c).points.len(), 5);
        assert!((fit.extrapolate(&c).unwrap().value - 5.0).abs() < 1e-10);
        let all = MicroFit { max_fraction: 1.0, ..MicroFit::default() };
        assert!((all.extrapolate(&c).unwrap().value - 5.0).abs() > 0.1);
        let narrow = MicroFit { max_fraction: 0.1, ..MicroFit::default() };
        assert!(narrow.extrapolate(&c).is_err());
    }

    #[test]
    fn too_few_points_or_ill_conditioned() {
        let c = curve(&[(1.0, 1.0, 0.1), (0.5, 1.0, 0.1), (0.2, 1.0, 0.1)]);
        assert!(extrapolate_micro(&c, 2).is_err());
        let c = curve(&[(1.0, 1.0, 0.1), (1.0, 1.1, 0.1), (1.0, 0.9, 0.1), (1.0, 1.0, 0.1)]);
        assert!(matches!(extrapolate_micro(&c, 1), Err(Error::IllConditioned { .. })));
    }
}
