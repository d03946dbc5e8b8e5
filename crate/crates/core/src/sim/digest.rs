//! Canonical text form of a round, for hashing.
//!
//! Fields are written in a fixed order, integers exactly and reals with six
//! decimals, so equal states always hash equal.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::command::{EventKind, SimEvent};
use super::state::{GameState, Resolution, Wallet};

fn real(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn canonical_state(state: &GameState) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "level={} round={}", state.level, state.round);
    let _ = writeln!(w, "phase={} outcome={}", state.phase.as_str(), state.outcome.as_str());
    let _ = writeln!(
        w,
        "tick={} attack_ticks={} planning_ticks={} timed={}",
        state.tick, state.attack_ticks, state.planning_ticks, state.planning_timed
    );
    let players: Vec<String> = state.players.iter().map(ToString::to_string).collect();
    let ready: Vec<String> = state.ready.iter().map(ToString::to_string).collect();
    let _ = writeln!(w, "players={} ready={}", players.join(","), ready.join(","));
    match &state.wallet {
        Wallet::Shared(g) => {
            let _ = writeln!(w, "money shared={g}");
        }
        Wallet::Individual(pools) => {
            let parts: Vec<String> = pools.iter().map(|(p, g)| format!("{p}:{g}")).collect();
            let _ = writeln!(w, "money individual={}", parts.join(","));
        }
    }
    let _ = writeln!(w, "health={} kill_points={}", state.health, state.kill_points);
    let t = &state.totals;
    let _ = writeln!(
        w,
        "totals spawned={} killed={} leaked={} bounties={} purchases={} refunds={}",
        t.spawned, t.killed, t.leaked, t.bounties, t.purchases, t.refunds
    );
    for tw in &state.towers {
        let owner = tw.owner.map_or("-".to_string(), |p| p.to_string());
        let _ = write!(
            w,
            "tower {} {} owner={} cell={},{} orient={} levels={},{},{} cooldown={} spent={}",
            tw.id,
            tw.spec,
            owner,
            tw.cell.x,
            tw.cell.y,
            tw.orientation.as_str(),
            tw.levels[0],
            tw.levels[1],
            tw.levels[2],
            real(tw.cooldown_ticks),
            tw.spent
        );
        if let Some(trap) = &tw.trap {
            let _ = write!(
                w,
                " trap={},{} charges={} recharge={}",
                trap.cell.x, trap.cell.y, trap.charges, trap.recharge_ticks
            );
        }
        let _ = writeln!(w);
    }
    for e in &state.enemies {
        let _ = write!(
            w,
            "enemy {} {} route={} progress={} prev={} health={}",
            e.spawn_index,
            e.variant,
            e.route,
            real(e.progress),
            real(e.prev_progress),
            real(e.health)
        );
        for fx in &e.effects {
            let _ = write!(
                w,
                " {}:{}:{}:{}:{}",
                fx.kind.as_str(),
                real(fx.magnitude),
                fx.remaining_ticks,
                fx.immunity_ticks,
                fx.active
            );
        }
        let _ = writeln!(w);
    }
    for p in &state.pending {
        let _ = writeln!(w, "pending {} sp={} route={} {}", p.tick, p.spawn_point, p.route, p.variant);
    }
    match &state.resolution {
        None => {}
        Some(Resolution::Selection { selected, correct }) => {
            let _ = writeln!(w, "resolution selection {selected} {correct}");
        }
        Some(Resolution::Layout { score }) => {
            let _ = writeln!(w, "resolution layout {}", real(*score));
        }
        Some(Resolution::Timeout) => {
            let _ = writeln!(w, "resolution timeout");
        }
    }
    out
}

pub fn canonical_event(ev: &SimEvent) -> String {
    let body = match &ev.kind {
        EventKind::Placed { tower, spec, cell, orientation, by, cost } => {
            format!("{tower} {spec} {},{} {} by={by} cost={cost}", cell.x, cell.y, orientation.as_str())
        }
        EventKind::Sold { tower, spec, cell, by, refund } => {
            format!("{tower} {spec} {},{} by={by} refund={refund}", cell.x, cell.y)
        }
        EventKind::Upgraded { tower, spec, cell, track, level, by, cost } => {
            format!("{tower} {spec} {},{} {track} {level} by={by} cost={cost}", cell.x, cell.y)
        }
        EventKind::Spawned { enemy, variant, spawn_point } => format!("{enemy} {variant} sp={spawn_point}"),
        EventKind::Killed { enemy, variant, bounty, points } => {
            format!("{enemy} {variant} bounty={bounty} points={points}")
        }
        EventKind::Leaked { enemy, variant } => format!("{enemy} {variant}"),
        EventKind::PhaseChanged { from, to } => format!("{}>{}", from.as_str(), to.as_str()),
        EventKind::RoundEnded { outcome } => outcome.as_str().to_string(),
    };
    format!("{} {} {}", ev.tick, ev.kind.name(), body)
}

fn hex_sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hex SHA-256 of [`canonical_state`].
pub fn state_digest(state: &GameState) -> String {
    hex_sha256(canonical_state(state).as_bytes())
}

/// Hex SHA-256 over the canonical lines of an event sequence.
pub fn events_digest(events: &[SimEvent]) -> String {
    let mut h = Sha256::new();
    for ev in events {
        h.update(canonical_event(ev).as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}
