//! Tolerance ladder shared by the verifiers and the CLI.

use serde::{Deserialize, Serialize};

use crate::models::{ModelKind, SpaceFormModel};

/// Bitension / tension threshold for models with closed-form connections.
pub const CLOSED_FORM_TOL: f64 = 1e-5;
/// Threshold for the deformed sphere (one extra calibration layer).
pub const DEFORMED_TOL: f64 = 1e-4;
/// Maximum `|η(T)|` accepted as Legendre by the bitension evaluators.
pub const LEGENDRE_GATE: f64 = 1e-6;
/// Standard deviation below which a sampled φ-torsion counts as constant.
pub const CONSTANT_TORSION_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub closed_form: f64,
    pub deformed: f64,
    pub tol_order: f64,
    pub legendre_gate: f64,
    pub constant_torsion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed_form: CLOSED_FORM_TOL,
            deformed: DEFORMED_TOL,
            tol_order: crate::curves::DEFAULT_TOL_ORDER,
            legendre_gate: LEGENDRE_GATE,
            constant_torsion: CONSTANT_TORSION_TOL,
        }
    }
}

impl Tolerances {
    /// Verdict threshold for curves in `m`.
    pub fn bitension_for(&self, m: &SpaceFormModel) -> f64 {
        match m.kind() {
            ModelKind::DeformedSphere { .. } => self.deformed,
            ModelKind::UnitSphere | ModelKind::FlatSasakian => self.closed_form,
        }
    }

    /// Every entry scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            closed_form: self.closed_form * factor,
            deformed: self.deformed * factor,
            tol_order: self.tol_order,
            legendre_gate: self.legendre_gate,
            constant_torsion: self.constant_torsion * factor,
        }
    }

    pub fn is_valid(&self) -> bool {
        [
            self.closed_form,
            self.deformed,
            self.tol_order,
            self.legendre_gate,
            self.constant_torsion,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0)
    }
}
