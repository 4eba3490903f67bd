/// Which ensemble a distribution belongs to, with its control parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ensemble {
    Canonical { beta: f64 },
    Microcanonical { energy: u64 },
}

/// `p(N0)` for `N0 = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateDistribution {
    pub probabilities: Vec<f64>,
    pub ensemble: Ensemble,
}

impl GroundStateDistribution {
    pub fn atoms(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Mean and variance of `N0`.
pub fn distribution_moments(dist: &GroundStateDistribution) -> (f64, f64) {
    let p = &dist.probabilities;
    let mean: f64 = p.iter().enumerate().map(|(n, q)| n as f64 * q).sum();
    let var = p.iter().enumerate().map(|(n, q)| (n as f64 - mean).powi(2) * q).sum();
    (mean, var)
}
