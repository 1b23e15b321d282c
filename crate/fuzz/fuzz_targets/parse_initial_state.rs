#![no_main]

use libfuzzer_sys::fuzz_target;
use nvqc::parse::parse_initial_state;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(s) = std::str::from_utf8(rest) else { return };
    let n_qubits = 2 + (n as usize % 4);
    if let Ok(rho) = parse_initial_state(s, n_qubits) {
        assert_eq!(rho.dim(), 1 << n_qubits);
    }
});
