//! Numerical thresholds.
//!
//! Every threshold is derived from a single master tolerance (default `1e-9`).
//! The environment variable `WSTAR_TOL` overrides the master value; all derived
//! thresholds scale with it proportionally.

use std::sync::OnceLock;

pub const DEFAULT_MASTER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    master: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::with_master(DEFAULT_MASTER)
    }
}

impl Tolerances {
    pub fn with_master(master: f64) -> Self {
        assert!(master > 0.0 && master.is_finite(), "master tolerance must be positive");
        Tolerances { master }
    }

    fn scaled(&self, base: f64) -> f64 {
        base * (self.master / DEFAULT_MASTER)
    }

    /// Defining identities of inputs (projections, unitaries, compatibility).
    pub fn identity(&self) -> f64 {
        self.master
    }

    /// Relative singular-value threshold for rank decisions.
    pub fn rank_relative(&self) -> f64 {
        self.master
    }

    /// Absolute floor for rank decisions on (nearly) zero inputs.
    pub fn rank_floor(&self) -> f64 {
        self.scaled(1e-12)
    }

    /// Residuals of derived identities (Hodge, invariance, isometry).
    pub fn residual(&self) -> f64 {
        self.scaled(1e-8)
    }

    /// Below this, a restricted unitary is taken as is; between this and
    /// [`Tolerances::residual`] it is re-unitarized.
    pub fn drift(&self) -> f64 {
        self.scaled(1e-10)
    }

    /// Eigen-angles closer than this (radians) are merged.
    pub fn cluster(&self) -> f64 {
        self.scaled(1e-7)
    }

    /// Stop the square-root series once a summand's norm drops below this.
    pub fn series_stop(&self) -> f64 {
        self.scaled(1e-12)
    }

    /// Agreement required between the series and the diagonalizing square root.
    pub fn sqrt_agreement(&self) -> f64 {
        self.scaled(1e-6)
    }
}

static GLOBAL: OnceLock<Tolerances> = OnceLock::new();

/// Process-wide tolerances, read once from `WSTAR_TOL`.
pub fn tolerances() -> &'static Tolerances {
    GLOBAL.get_or_init(|| {
        std::env::var("WSTAR_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| *v > 0.0 && v.is_finite())
            .map(Tolerances::with_master)
            .unwrap_or_default()
    })
}

/// Installs explicit tolerances. Returns `false` if they were already initialized.
pub fn set_tolerances(t: Tolerances) -> bool {
    GLOBAL.set(t).is_ok()
}
