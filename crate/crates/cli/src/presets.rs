//! Named experiment plans for the published figures.
//!
//! Units follow each trap's convention (see [`TrapConfig::units`]), so the
//! numbers in the tables can be read against the figure axes directly.
//! Temperature grids are given relative to the ideal-gas canonical peak where
//! possible so that `--scale` keeps them around the peak.

use crate::config::{ExperimentConfig, Mode, Plan, TrapConfig};

pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    /// Applied when `--scale` is not given.
    pub default_scale: f64,
    build: fn() -> Vec<ExperimentConfig>,
}

impl Preset {
    /// The plan at full size, with independent seeds for its experiments.
    pub fn plan(&self) -> Plan {
        let base = self.name.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
        let mut experiment = (self.build)();
        for (i, e) in experiment.iter_mut().enumerate() {
            e.sampler.seed = crate::experiment_seed(base, i);
        }
        Plan { name: Some(self.name.to_string()), output: None, experiment }
    }
}

pub const PRESETS: [Preset; 8] = [
    Preset {
        name: "figure2",
        about: "ring trap, N=100, ideal gas: canonical variance vs T against the exact result, and the post-selected microcanonical variance",
        default_scale: 1.0,
        build: figure2,
    },
    Preset {
        name: "figure3",
        about: "ring trap, N=100, repulsive gas: variance vs T at g=0.5, variance at T=5 for g in 0..1, peak variance for g in {0.25, 0.5, 1}",
        default_scale: 1.0,
        build: figure3,
    },
    Preset {
        name: "figure4",
        about: "1D harmonic trap, N=100, g in {0, 0.1}: canonical and microcanonical variance vs T",
        default_scale: 1.0,
        build: figure4,
    },
    Preset {
        name: "figure5",
        about: "1D traps: ensemble ratio S vs N, exact for the harmonic trap and sampled for both",
        default_scale: 1.0,
        build: figure5,
    },
    Preset {
        name: "figure6",
        about: "3D harmonic trap, N=10^4, aspect ratios 1, 2, 4, 10: post-selection curves at the canonical peak (N=1000 unless --scale 1)",
        default_scale: 10.0,
        build: figure6,
    },
    Preset {
        name: "figure7",
        about: "3D harmonic trap: S and S~ vs N for aspect ratios 1, 4, 20",
        default_scale: 1.0,
        build: figure7,
    },
    Preset {
        name: "figure8",
        about: "3D harmonic trap, N=100, aspect ratios 1 and 7, g in {0, 0.05}: canonical and microcanonical variance vs T",
        default_scale: 1.0,
        build: figure8,
    },
    Preset {
        name: "s3d-large",
        about: "3D isotropic trap, N=10^5: S~ at the canonical peak (hours of CPU; not part of any check)",
        default_scale: 1.0,
        build: s3d_large,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn exp(mode: Mode, label: &str, trap: TrapConfig, atoms: usize, coupling: f64) -> ExperimentConfig {
    let mut e = ExperimentConfig::new(mode);
    e.label = Some(label.to_string());
    e.trap = Some(trap);
    e.atoms = Some(atoms);
    e.coupling = coupling;
    e
}

const RING: TrapConfig = TrapConfig::Ring1d { length: 1.0 };
const H1D: TrapConfig = TrapConfig::Harmonic1d { omega: 1.0 };

fn h3d(aspect_ratio: f64) -> TrapConfig {
    TrapConfig::Harmonic3d { aspect_ratio }
}

/// Multiples of the ideal peak temperature, denser near the peak.
fn around_peak() -> Vec<f64> {
    vec![0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.25, 1.4, 1.6, 1.8, 2.0, 2.5, 3.0]
}

/// Temperatures for the interacting ring, whose peak moves far above the
/// ideal one.
fn ring_interacting_grid() -> Vec<f64> {
    (0..15).map(|i| 10.0 * 1.25f64.powi(i)).collect()
}

fn sampled(mut e: ExperimentConfig, samples: usize, chains: usize) -> ExperimentConfig {
    e.sampler.samples = samples;
    e.sampler.chains = chains;
    e
}

fn figure2() -> Vec<ExperimentConfig> {
    let mut cano = sampled(exp(Mode::ScanPeak, "canonical", RING, 100, 0.0), 4000, 16);
    cano.relative_temperatures = Some(around_peak());
    let mut micro = sampled(exp(Mode::Postselect, "microcanonical", RING, 100, 0.0), 4000, 32);
    micro.relative_temperatures = Some(around_peak());
    vec![cano, micro]
}

fn figure3() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    let mut cano = sampled(exp(Mode::ScanPeak, "canonical-g0.5", RING, 100, 0.5), 4000, 16);
    cano.temperatures = Some(ring_interacting_grid());
    cano.exact = Some(true);
    out.push(cano);
    let mut micro = sampled(exp(Mode::Postselect, "microcanonical-g0.5", RING, 100, 0.5), 4000, 32);
    micro.temperatures = Some(ring_interacting_grid());
    out.push(micro);
    for g in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mut low = sampled(exp(Mode::Sample, &format!("t5-g{g:.2}"), RING, 100, g), 20_000, 16);
        low.temperatures = Some(vec![5.0]);
        low.write_samples = Some(false);
        out.push(low);
    }
    for g in [0.25, 1.0] {
        let mut peak = sampled(exp(Mode::ScanPeak, &format!("peak-g{g:.2}"), RING, 100, g), 4000, 16);
        peak.temperatures = Some(ring_interacting_grid());
        out.push(peak);
    }
    out
}

fn figure4() -> Vec<ExperimentConfig> {
    let grid = vec![0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.25, 1.4, 1.6, 1.8, 2.0];
    let mut out = Vec::new();
    for g in [0.0, 0.1] {
        let mut cano = sampled(exp(Mode::ScanPeak, &format!("canonical-g{g}"), H1D, 100, g), 4000, 16);
        cano.relative_temperatures = Some(grid.clone());
        let mut micro = sampled(exp(Mode::Postselect, &format!("microcanonical-g{g}"), H1D, 100, g), 4000, 32);
        micro.relative_temperatures = Some(grid.clone());
        out.extend([cano, micro]);
    }
    out
}

fn figure5() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for n in [10, 20, 50, 100, 200, 500, 1000] {
        out.push(sampled(exp(Mode::SRatio, &format!("harmonic1d-n{n}"), H1D, n, 0.0), 4000, 32));
    }
    for n in [10, 20, 50, 100, 200] {
        out.push(sampled(exp(Mode::SRatio, &format!("ring-n{n}"), RING, n, 0.0), 4000, 32));
    }
    out
}

fn figure6() -> Vec<ExperimentConfig> {
    [1.0, 2.0, 4.0, 10.0]
        .iter()
        .map(|&l| {
            let mut e = sampled(exp(Mode::Postselect, &format!("lambda{l}"), h3d(l), 10_000, 0.0), 4000, 32);
            e.relative_temperatures = Some(vec![1.0]);
            e
        })
        .collect()
}

fn figure7() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for l in [1.0, 4.0, 20.0] {
        for n in [100, 200, 500, 1000] {
            out.push(sampled(exp(Mode::SRatio, &format!("lambda{l}-n{n}"), h3d(l), n, 0.0), 4000, 32));
        }
    }
    out
}

fn figure8() -> Vec<ExperimentConfig> {
    let grid = vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5];
    let mut out = Vec::new();
    for l in [1.0, 7.0] {
        for g in [0.0, 0.05] {
            let mut e = sampled(exp(Mode::Postselect, &format!("lambda{l}-g{g}"), h3d(l), 100, g), 4000, 32);
            e.relative_temperatures = Some(grid.clone());
            out.push(e);
        }
    }
    out
}

fn s3d_large() -> Vec<ExperimentConfig> {
    let mut e = sampled(exp(Mode::SRatio, "lambda1-n100000", h3d(1.0), 100_000, 0.0), 2000, 16);
    // Near the ideal-gas condensation temperature (N/ζ(3))^{1/3} ≈ 43.7. The
    // default cutoff would put 2·10⁷ modes in the basis.
    e.temperatures = Some(vec![39.0, 40.0, 41.0, 42.0, 43.0, 44.0, 45.0]);
    e.sampler.cutoff = Some(400);
    e.exact = Some(false);
    vec![e]
}
