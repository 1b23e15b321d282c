#![no_main]

use libfuzzer_sys::fuzz_target;
use nvqc::parse::{parse_grid, MAX_GRID_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_grid(s) {
        assert!(!g.is_empty() && g.len() <= MAX_GRID_POINTS);
        assert!(g.iter().all(|x| x.is_finite()));
    }
});
