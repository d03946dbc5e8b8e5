use chrono::DateTime;
use proptest::prelude::*;
use taskforge_telemetry::*;

const EXCERPT: &str = include_str!("../../../fixtures/planning_excerpt.log");

#[test]
fn planning_excerpt_parses_to_sixteen_records() {
    let parsed = parse_log(EXCERPT);
    assert!(parsed.errors.is_empty(), "{:?}", parsed.errors);
    assert_eq!(parsed.records.len(), 16);
    let chats: Vec<&str> = parsed
        .records
        .iter()
        .filter_map(|r| match &r.body {
            RecordBody::Chat { speaker, .. } => Some(speaker.as_str()),
            _ => None,
        })
        .collect();
    assert_eq!(chats, ["tjwill", "tjwill", "tjwill", "schou01"]);
    let buys: Vec<(&str, (u32, u32))> = parsed
        .records
        .iter()
        .filter_map(|r| match &r.body {
            RecordBody::Action { action: Action::Buy, tower_type, location, .. } => {
                Some((tower_type.as_str(), *location))
            }
            _ => None,
        })
        .collect();
    assert_eq!(buys.len(), 12);
    assert!(buys.contains(&("MAP", (0, 14))));
    assert_eq!(buys[0], ("DISCOUNT", (10, 0)));
    assert_eq!(buys.iter().filter(|(t, _)| *t == "MAP").count(), 9);
    assert!(parsed.records.iter().all(|r| r.ts.is_none()));
}

#[test]
fn planning_excerpt_reserializes_token_for_token() {
    let parsed = parse_log(EXCERPT);
    for (line, record) in EXCERPT.lines().zip(&parsed.records) {
        assert_eq!(serialize_record(record), line);
    }
}

#[test]
fn timestamps_are_optional_per_line() {
    let line = "<ts>2024-05-01T12:00:00.250Z</ts> <speaker>tjwill</speaker> <chat_text>willdo</chat_text>";
    let r = parse_line(line).unwrap();
    assert_eq!(r.ts, DateTime::from_timestamp_millis(1_714_564_800_250));
    assert_eq!(serialize_record(&r), line);
    assert_eq!(serialize_record(&r.without_ts()), "<speaker>tjwill</speaker> <chat_text>willdo</chat_text>");
}

fn text() -> impl Strategy<Value = String> {
    // Printable text including the characters that need escaping.
    "[ -~é<>&;=%]{0,40}"
}

fn record() -> impl Strategy<Value = LogRecord> {
    let ts = prop::option::of((0i64..4_000_000_000_000).prop_map(|ms| DateTime::from_timestamp_millis(ms).unwrap()));
    let name = "[A-Za-z0-9_]{1,12}";
    let body = prop_oneof![
        (name, text()).prop_map(|(s, t)| RecordBody::Chat { speaker: s, text: t }),
        (0usize..3, "[A-Z]{1,10}", prop::option::of(("[A-Z]{1,8}", 0u8..10)), (0u32..64, 0u32..64), name).prop_map(
            |(a, tower_type, up, location, user)| {
                let action = [Action::Buy, Action::Sell, Action::Upgrade][a];
                let up = up.unwrap_or(("RANGE".into(), 1));
                let upgrade = (action == Action::Upgrade).then_some(UpgradeInfo { track: up.0, level: up.1 });
                RecordBody::Action { action, tower_type, upgrade, location, user }
            }
        ),
        ("[A-Z_]{1,16}", prop::collection::vec((text(), text()), 0..4))
            .prop_map(|(event, detail)| RecordBody::System { event, detail }),
    ];
    (ts, body).prop_map(|(ts, body)| LogRecord { ts, body })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn records_survive_a_round_trip(r in record()) {
        let line = serialize_record(&r);
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(parse_line(&line).unwrap(), r);
    }
}
