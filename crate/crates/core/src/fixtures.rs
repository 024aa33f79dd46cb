//! Bundled trained schedules.
//!
//! `table2.json`: two-qubit, four-chunk schedule. `table3.json`: fully
//! symmetric seven-qubit, four-chunk schedule. Both use total time 1.58
//! in units with ħ = 1.

use crate::schedule::Schedule;

pub const TABLE2_JSON: &str = include_str!("../fixtures/table2.json");
pub const TABLE3_JSON: &str = include_str!("../fixtures/table3.json");

/// Two-qubit trained schedule.
pub fn table2() -> Schedule {
    Schedule::from_json(TABLE2_JSON).expect("bundled table2.json is valid")
}

/// Seven-qubit trained schedule.
pub fn table3() -> Schedule {
    Schedule::from_json(TABLE3_JSON).expect("bundled table3.json is valid")
}

/// Looks up a bundled fixture by file name (`table2.json`, `table3`, ...).
pub fn by_name(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".json") {
        "table2" => Some(TABLE2_JSON),
        "table3" => Some(TABLE3_JSON),
        _ => None,
    }
}
