//! Estimators over sample sets: moments, energy-window post-selection,
//! extrapolation to the microcanonical limit and peak location.

mod autocorr;
mod extrapolate;
mod jackknife;
mod moments;
mod output;
mod postselect;
mod scan;

pub use autocorr::integrated_autocorrelation;
pub use extrapolate::{extrapolate_micro, micro_variance, Extrapolation, MicroEstimate, MicroFit, DEFAULT_FIT_MAX_FRACTION, MAX_CONDITION};
pub use jackknife::{jackknife_stderr, MIN_CHAINS_FOR_ERRORS};
pub use moments::{mean_and_variance, moments, MomentEstimate};
pub use output::{curve_csv, scan_csv, ScanRow, Source, CURVE_HEADER, SCAN_HEADER};
pub use postselect::{post_select, post_select_around, post_selection_curve, CurvePoint, PostSelectionCurve, DEFAULT_FRACTIONS};
pub use scan::{derive_seed, locate_peak, s_tilde, s_tilde_from_set, scan_peak, scan_peak_from_sets, PeakScan, STilde};

pub use scan::sample_grid;
