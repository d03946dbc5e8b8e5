//! Room keys, session tokens and team-name suggestions.

use std::collections::HashSet;

use rand::{Rng, RngCore};

const ADJECTIVES: [&str; 24] = [
    "Amber", "Brave", "Clever", "Crimson", "Daring", "Eager", "Fuzzy", "Gentle", "Golden", "Happy", "Jolly", "Keen",
    "Lucky", "Mellow", "Nimble", "Plucky", "Quick", "Rusty", "Silver", "Sleepy", "Swift", "Tidy", "Witty", "Zesty",
];

const NOUNS: [&str; 24] = [
    "Badgers", "Beacons", "Comets", "Falcons", "Ferrets", "Foxes", "Geckos", "Herons", "Koalas", "Lynxes", "Marmots",
    "Otters", "Owls", "Pandas", "Pelicans", "Puffins", "Quokkas", "Ravens", "Robins", "Sparrows", "Tigers", "Turtles",
    "Walruses", "Wombats",
];

const KEY_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
pub const KEY_LEN: usize = 6;

/// A team name drawn uniformly from the bundled word pairs.
pub fn suggest_team_name(rng: &mut impl Rng) -> String {
    let a = ADJECTIVES[rng.random_range(0..ADJECTIVES.len())];
    let n = NOUNS[rng.random_range(0..NOUNS.len())];
    format!("{a} {n}")
}

pub fn random_key(rng: &mut impl Rng) -> String {
    (0..KEY_LEN).map(|_| char::from(KEY_ALPHABET[rng.random_range(0..KEY_ALPHABET.len())])).collect()
}

/// A key not in `live`, drawing again on collision.
pub fn unique_key(rng: &mut impl Rng, live: &HashSet<String>) -> String {
    loop {
        let key = random_key(rng);
        if !live.contains(&key) {
            return key;
        }
    }
}

pub fn is_room_key(s: &str) -> bool {
    s.len() == KEY_LEN && s.bytes().all(|b| KEY_ALPHABET.contains(&b))
}

/// 128 random bits from the thread CSPRNG, hex encoded.
pub fn session_token() -> String {
    let mut bytes = [0u8; 16];
    rand::rng().fill_bytes(&mut bytes);
    hex::encode(bytes)
}
