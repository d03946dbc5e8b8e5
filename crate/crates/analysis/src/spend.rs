//! Per-round gold ledger rebuilt from a session log.
//!
//! The board is reconstructed from BUY, SELL and UPGRADE records so that
//! upgrade prices include any discount in effect at the time.

use std::fmt;

use taskforge_core::sim::{upgrade_cost, TowerId, TowerInstance};
use taskforge_core::{Phase, SessionConfig, TowerSpec, UpgradeTrack};
use taskforge_telemetry::{Action, LogRecord, RecordBody};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundSummary {
    pub room: String,
    pub level: usize,
    pub round: usize,
    pub start_gold: u64,
    pub tower_spend: u64,
    pub upgrade_spend: u64,
    pub refunds: u64,
    pub bounties: u64,
    /// `start - towers - upgrades + refunds + bounties`.
    pub unspent: i64,
    /// The unspent figure the server wrote at round end, if any.
    pub logged_unspent: Option<i64>,
    pub buys: u64,
    pub kills: u64,
    pub leaks: u64,
    pub final_health: Option<i64>,
    pub score: Option<u64>,
    pub chat: u64,
    /// False when the round had no closing boundary.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpendIssue {
    /// Computed and logged unspent gold disagree.
    Mismatch {
        level: usize,
        round: usize,
        computed: i64,
        logged: i64,
    },
    /// A round started before the previous one ended, or the log stopped mid-round.
    MissingBoundary {
        level: usize,
        round: usize,
    },
    /// A gameplay record outside any round. `index` is the record position.
    OutsideRound {
        index: usize,
    },
    UnknownTower {
        index: usize,
        tower_type: String,
    },
    NoTowerAtCell {
        index: usize,
        location: (u32, u32),
    },
    BadUpgrade {
        index: usize,
        detail: String,
    },
    BadBoundary {
        index: usize,
        detail: String,
    },
}

impl fmt::Display for SpendIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpendIssue::Mismatch { level, round, computed, logged } => {
                write!(f, "level {level} round {round}: computed unspent {computed}, log says {logged}")
            }
            SpendIssue::MissingBoundary { level, round } => {
                write!(f, "level {level} round {round}: no round end record, results are partial")
            }
            SpendIssue::OutsideRound { index } => write!(f, "record {index}: action outside any round"),
            SpendIssue::UnknownTower { index, tower_type } => {
                write!(f, "record {index}: tower type {tower_type} is not in the config")
            }
            SpendIssue::NoTowerAtCell { index, location: (x, y) } => {
                write!(f, "record {index}: no tower at ({x}, {y})")
            }
            SpendIssue::BadUpgrade { index, detail } => write!(f, "record {index}: {detail}"),
            SpendIssue::BadBoundary { index, detail } => write!(f, "record {index}: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpendReport {
    pub rounds: Vec<RoundSummary>,
    pub issues: Vec<SpendIssue>,
}

struct OpenRound {
    summary: RoundSummary,
    phase: Phase,
    start_health: i64,
    board: Vec<TowerInstance>,
    next_id: u32,
}

impl OpenRound {
    fn close(mut self, complete: bool) -> RoundSummary {
        let s = &mut self.summary;
        s.unspent =
            s.start_gold as i64 - s.tower_spend as i64 - s.upgrade_spend as i64 + s.refunds as i64 + s.bounties as i64;
        s.complete = complete;
        if s.final_health.is_none() {
            s.final_health = Some(self.start_health - s.leaks as i64);
        }
        self.summary
    }
}

fn spec_by_log_name<'a>(config: &'a SessionConfig, tower_type: &str) -> Option<&'a TowerSpec> {
    config.towers.iter().find(|t| t.log_name() == tower_type)
}

fn parse_detail<T: std::str::FromStr>(rec: &LogRecord, key: &str) -> Result<T, String> {
    let raw = rec.detail(key).ok_or_else(|| format!("missing {key}"))?;
    raw.parse().map_err(|_| format!("bad {key} {raw:?}"))
}

fn open_round(config: &SessionConfig, room: &str, rec: &LogRecord) -> Result<OpenRound, String> {
    let level: usize = parse_detail(rec, "level")?;
    let round: usize = parse_detail(rec, "round")?;
    let start_gold: u64 = parse_detail(rec, "gold")?;
    let start_health: i64 = parse_detail(rec, "health")?;
    let phase = match rec.detail("phase") {
        Some("ATTACK") => Phase::Attack,
        _ => Phase::Planning,
    };
    let spec = config.levels.get(level).ok_or_else(|| format!("level {level} is not in the config"))?;
    let board: Vec<TowerInstance> = spec
        .preplaced
        .iter()
        .enumerate()
        .map(|(i, obj)| TowerInstance::new(TowerId(i as u32), obj.tower.clone(), None, obj.cell))
        .collect();
    Ok(OpenRound {
        summary: RoundSummary { room: room.to_string(), level, round, start_gold, ..RoundSummary::default() },
        phase,
        start_health,
        next_id: board.len() as u32,
        board,
    })
}

/// Splits a log into rounds and prices every action against `config`.
pub fn expenditure_series(records: &[LogRecord], config: &SessionConfig) -> SpendReport {
    let mut report = SpendReport::default();
    let mut room = String::new();
    let mut open: Option<OpenRound> = None;

    for (index, rec) in records.iter().enumerate() {
        match &rec.body {
            RecordBody::System { event, .. } => match event.as_str() {
                "SESSION_START" => room = rec.detail("room").unwrap_or_default().to_string(),
                "ROUND_START" => {
                    if let Some(prev) = open.take() {
                        let s = prev.close(false);
                        report.issues.push(SpendIssue::MissingBoundary { level: s.level, round: s.round });
                        report.rounds.push(s);
                    }
                    match open_round(config, &room, rec) {
                        Ok(r) => open = Some(r),
                        Err(detail) => report.issues.push(SpendIssue::BadBoundary { index, detail }),
                    }
                }
                "ROUND_END" => {
                    let Some(mut r) = open.take() else {
                        report.issues.push(SpendIssue::BadBoundary { index, detail: "round end without start".into() });
                        continue;
                    };
                    r.summary.logged_unspent = parse_detail(rec, "unspent").ok();
                    r.summary.score = parse_detail(rec, "score").ok();
                    r.summary.final_health = parse_detail(rec, "health").ok();
                    let s = r.close(true);
                    if let Some(logged) = s.logged_unspent.filter(|l| *l != s.unspent) {
                        report.issues.push(SpendIssue::Mismatch {
                            level: s.level,
                            round: s.round,
                            computed: s.unspent,
                            logged,
                        });
                    }
                    report.rounds.push(s);
                }
                "PHASE" => {
                    if let Some(r) = open.as_mut() {
                        r.phase = match rec.detail("to") {
                            Some("ATTACK") => Phase::Attack,
                            Some("ENDED") => Phase::Ended,
                            _ => Phase::Planning,
                        };
                    }
                }
                "KILL" => match open.as_mut() {
                    Some(r) => {
                        r.summary.kills += 1;
                        r.summary.bounties += parse_detail::<u64>(rec, "bounty").unwrap_or(0);
                    }
                    None => report.issues.push(SpendIssue::OutsideRound { index }),
                },
                "LEAK" => match open.as_mut() {
                    Some(r) => r.summary.leaks += 1,
                    None => report.issues.push(SpendIssue::OutsideRound { index }),
                },
                _ => {}
            },
            RecordBody::Chat { .. } => {
                if let Some(r) = open.as_mut() {
                    r.summary.chat += 1;
                }
            }
            RecordBody::Action { action, tower_type, upgrade, location, .. } => {
                let Some(r) = open.as_mut() else {
                    report.issues.push(SpendIssue::OutsideRound { index });
                    continue;
                };
                if let Err(issue) = apply_action(config, r, index, *action, tower_type, upgrade.as_ref(), *location) {
                    report.issues.push(issue);
                }
            }
        }
    }
    if let Some(r) = open.take() {
        let s = r.close(false);
        report.issues.push(SpendIssue::MissingBoundary { level: s.level, round: s.round });
        report.rounds.push(s);
    }
    report
}

fn apply_action(
    config: &SessionConfig,
    r: &mut OpenRound,
    index: usize,
    action: Action,
    tower_type: &str,
    upgrade: Option<&taskforge_telemetry::UpgradeInfo>,
    (x, y): (u32, u32),
) -> Result<(), SpendIssue> {
    let cell = taskforge_core::Cell::new(x, y);
    let at = r.board.iter().position(|t| t.cell == cell);
    match action {
        Action::Buy => {
            let spec = spec_by_log_name(config, tower_type)
                .ok_or_else(|| SpendIssue::UnknownTower { index, tower_type: tower_type.to_string() })?;
            let mut tower = TowerInstance::new(TowerId(r.next_id), spec.id.clone(), None, cell);
            tower.spent = spec.cost;
            r.next_id += 1;
            r.board.push(tower);
            r.summary.tower_spend += spec.cost;
            r.summary.buys += 1;
        }
        Action::Sell => {
            let idx = at.ok_or(SpendIssue::NoTowerAtCell { index, location: (x, y) })?;
            let rate = match r.phase {
                Phase::Attack => config.refund.attack,
                _ => config.refund.planning,
            };
            let tower = r.board.remove(idx);
            r.summary.refunds += (tower.spent as f64 * rate).floor() as u64;
        }
        Action::Upgrade => {
            let idx = at.ok_or(SpendIssue::NoTowerAtCell { index, location: (x, y) })?;
            let info = upgrade.ok_or_else(|| SpendIssue::BadUpgrade { index, detail: "no upgrade track".into() })?;
            let track: UpgradeTrack = info
                .track
                .parse()
                .map_err(|_| SpendIssue::BadUpgrade { index, detail: format!("unknown track {}", info.track) })?;
            let cost = upgrade_cost(config, &r.board, &r.board[idx], track)
                .map_err(|e| SpendIssue::BadUpgrade { index, detail: e.to_string() })?;
            let tower = &mut r.board[idx];
            tower.levels[track.index()] += 1;
            tower.spent += cost;
            if tower.level(track) != info.level {
                return Err(SpendIssue::BadUpgrade {
                    index,
                    detail: format!("logged level {} but the board has {}", info.level, tower.level(track)),
                });
            }
            r.summary.upgrade_spend += cost;
        }
    }
    Ok(())
}
