#![no_main]

use libfuzzer_sys::fuzz_target;
use nvqc::parse::parse_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_target(s) {
        // Keep the unitary small enough to build quickly.
        if t.n_carbons().is_ok_and(|n| n <= 4) {
            let _ = t.unitary();
        }
    }
});
