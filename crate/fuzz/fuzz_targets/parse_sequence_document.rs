#![no_main]

use libfuzzer_sys::fuzz_target;
use nvqc::parse::parse_sequence_document;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_sequence_document(s) {
        if let Ok(seq) = doc.sequence() {
            let _ = seq.n_pulses();
        }
        let _ = doc.to_json();
    }
});
