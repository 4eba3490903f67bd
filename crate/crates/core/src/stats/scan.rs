use super::extrapolate::{micro_variance, refit, MicroFit};
use super::jackknife::{chain_groups, jackknife_stderr, without_group, MIN_CHAINS_FOR_ERRORS};
use super::moments::{moments, moments_of_records, MomentEstimate};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::num::Real;
use crate::sampler::{run_chains, SampleSet, SamplerParams};

/// Canonical variance over a temperature grid and its interpolated maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakScan {
    pub grid: Vec<(f64, MomentEstimate)>,
    pub t_max: f64,
    pub var_max: f64,
    /// Jackknife over chains; `NaN` when unavailable.
    pub t_max_stderr: f64,
    pub var_max_stderr: f64,
}

/// Independent seed for the `index`-th job of a run (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Vertex of the parabola through the grid maximum and its two neighbours.
///
/// `points` are `(x, y)` with strictly increasing `x`; at least five are
/// required. A maximum on either end of the grid is refused.
pub fn locate_peak(points: &[(f64, f64)], axis: &'static str) -> Result<(f64, f64)> {
    if points.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "peak location needs at least 5 grid points, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParameter(format!("{axis} grid must be strictly increasing")));
    }
    let i = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty");
    if i == 0 || i == points.len() - 1 {
        return Err(Error::PeakAtBoundary { axis, at: points[i].0 });
    }
    let ((x0, y0), (x1, y1), (x2, y2)) = (points[i - 1], points[i], points[i + 1]);
    // Newton form: y = y0 + d1 (x − x0) + d2 (x − x0)(x − x1)
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = ((y2 - y1) / (x2 - x1) - d1) / (x2 - x0);
    if !(d2 < 0.0) {
        return Ok((x1, y1));
    }
    let xv = 0.5 * (x0 + x1) - d1 / (2.0 * d2);
    let xv = xv.clamp(x0, x2);
    Ok((xv, y0 + d1 * (xv - x0) + d2 * (xv - x0) * (xv - x1)))
}

/// Peak of the canonical variance from sample sets at increasing temperatures.
///
/// The sets should share chain ids; the error on `T_max` comes from
/// repeating the peak search with one chain left out everywhere.
pub fn scan_peak_from_sets<T: Real>(sets: &[(f64, SampleSet<T>)]) -> Result<PeakScan> {
    let grid = sets
        .iter()
        .map(|(t, s)| moments(s).map(|m| (*t, m)))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = grid.iter().map(|(t, m)| (*t, m.var_n0)).collect();
    let (t_max, var_max) = locate_peak(&pts, "temperature")?;

    let groups: Vec<Vec<Vec<usize>>> = sets.iter().map(|(_, s)| chain_groups(s.records())).collect();
    let g = groups.iter().map(Vec::len).min().unwrap_or(0);
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    if g >= MIN_CHAINS_FOR_ERRORS && groups.iter().all(|gr| gr.len() == g) {
        for j in 0..g {
            let rep: Vec<(f64, f64)> = sets
                .iter()
                .zip(&groups)
                .map(|((t, s), gr)| {
                    let sub = without_group(s.records(), gr, j);
                    (*t, moments_of_records(&sub).map(|m| m.var_n0).unwrap_or(f64::NAN))
                })
                .collect();
            match locate_peak(&rep, "temperature") {
                Ok((t, v)) => {
                    ts.push(t);
                    vs.push(v);
                }
                Err(_) => {
                    ts.clear();
                    break;
                }
            }
        }
    }
    let (t_max_stderr, var_max_stderr) =
        if ts.len() == g && g > 0 { (jackknife_stderr(&ts), jackknife_stderr(&vs)) } else { (f64::NAN, f64::NAN) };
    Ok(PeakScan { grid, t_max, var_max, t_max_stderr, var_max_stderr })
}

/// Samples every temperature of `t_grid` and locates the variance peak.
///
/// `params.beta` is ignored; each temperature gets its own seed derived from
/// `params.seed` and its grid index.
pub fn scan_peak<T: Real>(model: &Model<T>, t_grid: &[f64], params: &SamplerParams) -> Result<PeakScan> {
    let sets = sample_grid(model, t_grid, params)?;
    scan_peak_from_sets(&sets)
}

/// Runs `params.chain_count` chains at every temperature of `t_grid`.
///
/// `params.gamma` applies to every grid point; choose it for the hottest one
/// (see [`default_gamma`](crate::sampler::default_gamma)).
pub fn sample_grid<T: Real>(model: &Model<T>, t_grid: &[f64], params: &SamplerParams) -> Result<Vec<(f64, SampleSet<T>)>> {
    if let Some(t) = t_grid.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::InvalidParameter(format!("temperatures must be positive, got {t}")));
    }
    t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let p = SamplerParams { beta: 1.0 / t, seed: derive_seed(params.seed, k as u64), ..params.clone() };
            run_chains(model, &p).map(|s| (t, s))
        })
        .collect()
}

/// Fixed-temperature ensemble ratio `S̃ = Δ²N0_micro / Δ²N0_cano`.
#[derive(Clone, Debug, PartialEq)]
pub struct STilde {
    pub value: f64,
    pub stderr: f64,
    pub var_cano: f64,
    pub var_micro: f64,
}

/// `S̃` from one canonical sample set, normally taken at `T_max`.
pub fn s_tilde_from_set<T: Real>(set: &SampleSet<T>, fit: &MicroFit) -> Result<STilde> {
    let cano = moments(set)?;
    let micro = micro_variance(set, fit)?;
    let ratio = |cano: f64, micro: f64| if cano > 0.0 { micro / cano } else { 1.0 };
    let value = ratio(cano.var_n0, micro.value);
    let reps = super::jackknife::replicates(set.records(), |sub| match moments_of_records(sub) {
        Ok(c) => ratio(c.var_n0, refit(&micro.curve, sub, fit)),
        Err(_) => f64::NAN,
    });
    let mut stderr = jackknife_stderr(&reps);
    if !stderr.is_finite() {
        // Propagate the fit error when chains are too few for a jackknife.
        stderr = (micro.fit_stderr / cano.var_n0).abs();
    }
    Ok(STilde { value, stderr, var_cano: cano.var_n0, var_micro: micro.value })
}

/// Samples at `params.beta` (the located `T_max`) and returns `S̃`.
pub fn s_tilde<T: Real>(model: &Model<T>, params: &SamplerParams, fit: &MicroFit) -> Result<STilde> {
    let set = run_chains(model, params)?;
    s_tilde_from_set(&set, fit)
}
