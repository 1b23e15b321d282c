#![no_main]

use libfuzzer_sys::fuzz_target;
use nvqc::parse::parse_ga_config;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_ga_config(s) {
        assert!(c.validate().is_ok());
    }
});
