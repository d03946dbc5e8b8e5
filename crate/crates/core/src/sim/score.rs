use serde::{Deserialize, Serialize};

use super::command::SimError;
use super::state::{GameState, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScoreMode {
    /// 1 for a win, 0 otherwise.
    Binary,
    /// Weighted sum of unspent gold, kill points and base health.
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreWeights {
    pub mode: ScoreMode,
    #[serde(default)]
    pub unspent: f64,
    #[serde(default)]
    pub points: f64,
    #[serde(default)]
    pub health: f64,
}

impl ScoreWeights {
    pub fn binary() -> Self {
        Self { mode: ScoreMode::Binary, unspent: 0.0, points: 0.0, health: 0.0 }
    }

    pub fn linear(unspent: f64, points: f64, health: f64) -> Self {
        Self { mode: ScoreMode::Linear, unspent, points, health }
    }

    pub fn score(&self, outcome: Outcome, breakdown: &ScoreBreakdown) -> f64 {
        match self.mode {
            ScoreMode::Binary => f64::from(u8::from(outcome == Outcome::Win)),
            ScoreMode::Linear => {
                self.unspent * breakdown.unspent as f64
                    + self.points * breakdown.points as f64
                    + self.health * breakdown.health as f64
            }
        }
    }
}

/// The quantities a linear score is computed from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub unspent: u64,
    pub points: u64,
    pub health: u64,
}

impl GameState {
    /// Unspent gold over all pools, kill points, and base health floored at zero.
    pub fn score_breakdown(&self) -> ScoreBreakdown {
        ScoreBreakdown { unspent: self.wallet.total(), points: self.kill_points, health: self.health.max(0) as u64 }
    }
}

/// Final score of an ended round.
pub fn compute_score(state: &GameState, weights: &ScoreWeights) -> Result<f64, SimError> {
    if state.outcome == Outcome::Ongoing {
        return Err(SimError::NotEnded);
    }
    Ok(weights.score(state.outcome, &state.score_breakdown()))
}
