//! Numerical thresholds shared by every stage of the pipeline.
//!
//! Absolute thresholds apply to quantities that are already normalized
//! (states, probabilities, completeness). Thresholds marked relative are
//! multiplied by a problem scale at the point of use, since the saturation
//! conditions are homogeneous in the SLDs.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Hermiticity of inputs (entrywise).
    pub herm: f64,
    /// Smallest admissible eigenvalue of a state is `-psd`.
    pub psd: f64,
    /// Unit trace of states, zero trace of derivatives.
    pub trace: f64,
    /// Support cutoff, relative to the largest eigenvalue of the state.
    pub rank: f64,
    /// Eigenvalue gap below which eigenvalues count as degenerate.
    pub degen: f64,
    /// Lyapunov residual of the SLD, relative to `max(1, ‖∂ρ‖_F)`.
    pub sld: f64,
    /// QFIM singularity, relative to `max(1, max|F|)`.
    pub singular: f64,
    /// Outcome probability below which an outcome is null.
    pub null: f64,
    /// Largest derivative tolerated on a null outcome.
    pub grad: f64,
    /// Completeness `‖Σ E − 𝕀‖_max`.
    pub complete: f64,
    /// Hollowization residual, relative to the family scale.
    pub sat: f64,
    /// Partial commutativity, relative to `max_i ‖L_i‖²`.
    pub pcc: f64,
    /// Gram-Schmidt discard threshold, relative to input norm.
    pub gs: f64,
    /// Diagonal magnitude accepted by single-matrix hollowization,
    /// relative to `max(1, ‖A‖)`.
    pub hollow: f64,
    /// Finite-difference step for non-commuting generators.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-10,
            psd: 1e-10,
            trace: 1e-10,
            rank: 1e-10,
            degen: 1e-8,
            sld: 1e-10,
            singular: 1e-10,
            null: 1e-12,
            grad: 1e-5,
            complete: 1e-9,
            sat: 1e-9,
            pcc: 1e-9,
            gs: 1e-10,
            hollow: 1e-12,
            fd_step: 1e-5,
        }
    }
}

impl Tolerances {
    /// Absolute hollowization threshold for a family of the given scale.
    pub fn sat_threshold(&self, scale: f64) -> f64 {
        self.sat * scale
    }
}
