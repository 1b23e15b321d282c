#![no_main]

use libfuzzer_sys::fuzz_target;
use nvqc::parse::parse_robust;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_robust(s) {
        assert!(r.lo > 0.0 && r.lo <= r.hi && r.samples >= 1);
    }
});
