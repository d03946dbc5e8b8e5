//! Tower and enemy definitions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Highest level reachable on each upgrade track.
pub const MAX_UPGRADE_LEVEL: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Archetype {
    Basic,
    Poison,
    Piercing,
    Splash,
    Obstacle,
    Slow,
    Fear,
    Sniper,
    Discount,
    Support,
    Multishot,
    Map,
}

impl Archetype {
    pub const ALL: [Archetype; 12] = [
        Archetype::Basic,
        Archetype::Poison,
        Archetype::Piercing,
        Archetype::Splash,
        Archetype::Obstacle,
        Archetype::Slow,
        Archetype::Fear,
        Archetype::Sniper,
        Archetype::Discount,
        Archetype::Support,
        Archetype::Multishot,
        Archetype::Map,
    ];

    /// Whether towers of this archetype acquire targets and fire.
    pub fn attacks(self) -> bool {
        !matches!(self, Archetype::Discount | Archetype::Support | Archetype::Obstacle)
    }

    /// Whether this archetype ever deals damage (directly or through a trap).
    pub fn deals_damage(self) -> bool {
        !matches!(self, Archetype::Discount | Archetype::Support)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UpgradeTrack {
    Range,
    Damage,
    Firerate,
}

impl UpgradeTrack {
    pub const ALL: [UpgradeTrack; 3] = [UpgradeTrack::Range, UpgradeTrack::Damage, UpgradeTrack::Firerate];

    /// Per-level stat multiplier, compounded per level.
    pub fn multiplier(self) -> f64 {
        match self {
            UpgradeTrack::Range => 1.25,
            UpgradeTrack::Damage => 1.5,
            UpgradeTrack::Firerate => 1.25,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UpgradeTrack::Range => "RANGE",
            UpgradeTrack::Damage => "DAMAGE",
            UpgradeTrack::Firerate => "FIRERATE",
        }
    }
}

impl fmt::Display for UpgradeTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UpgradeTrack {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "RANGE" => Ok(UpgradeTrack::Range),
            "DAMAGE" => Ok(UpgradeTrack::Damage),
            "FIRERATE" => Ok(UpgradeTrack::Firerate),
            _ => Err(format!("unknown upgrade track {s:?}")),
        }
    }
}

/// Facing of a placed object; only scored in object-manipulation levels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Orientation {
    #[default]
    North,
    East,
    South,
    West,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::North => "NORTH",
            Orientation::East => "EAST",
            Orientation::South => "SOUTH",
            Orientation::West => "WEST",
        }
    }
}

/// Archetype-specific parameters. Every field has a default, so a spec only
/// lists what it overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffectParams {
    pub poison_dps: f64,
    pub poison_seconds: f64,
    pub splash_radius: f64,
    pub slow_multiplier: f64,
    pub slow_seconds: f64,
    pub fear_multiplier: f64,
    pub fear_seconds: f64,
    pub fear_immunity_seconds: f64,
    pub sniper_reference_speed: f64,
    pub sniper_cap: f64,
    pub trap_charges: u32,
    pub trap_recharge_seconds: f64,
    pub discount_multiplier: f64,
    pub support_buff: f64,
}

impl Default for EffectParams {
    fn default() -> Self {
        Self {
            poison_dps: 5.0,
            poison_seconds: 3.0,
            splash_radius: 1.5,
            slow_multiplier: 0.5,
            slow_seconds: 2.0,
            fear_multiplier: 1.0,
            fear_seconds: 1.5,
            fear_immunity_seconds: 5.0,
            sniper_reference_speed: 1.0,
            sniper_cap: 3.0,
            trap_charges: 10,
            trap_recharge_seconds: 10.0,
            discount_multiplier: 0.8,
            support_buff: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub id: String,
    pub archetype: Archetype,
    pub cost: u64,
    /// Tiles, Euclidean between cell centers.
    pub range: f64,
    /// Hit points per shot.
    pub damage: f64,
    /// Shots per second.
    pub firerate: f64,
    /// Cost of the first upgrade on any track; doubles per level.
    pub upgrade_cost: u64,
    #[serde(default)]
    pub effect: EffectParams,
    #[serde(default)]
    pub display_name: String,
    #[serde(default)]
    pub description: String,
}

impl TowerSpec {
    /// Name as written to interaction logs.
    pub fn log_name(&self) -> String {
        self.id.to_ascii_uppercase()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnemyVariant {
    pub id: String,
    pub max_health: f64,
    /// Tiles per second.
    pub speed: f64,
    /// Score points credited on kill.
    pub points: u64,
    /// Gold credited on kill.
    pub bounty: u64,
}
