//! Published tables and figures of merit, evaluated through the public API.

use nvqc::catalog::{builtin_catalog, find_entry, verification_csv, verify_catalog, VerifyOptions};
use nvqc::ga::{make_sequence_objective, encode_params};
use nvqc::lab::{initial_state_model, simulate_search_populations, state_fidelity, carbon_polarization};
use nvqc::pulse::DensityMatrix;
use nvqc::spinsys::{NVParams, PAPER_COUPLINGS};
use nvqc::spectrum::{find_peaks, fid_spectrum, SpectrumConfig, Transition};

#[test]
fn grover_and_two_qubit_entries_verify() {
    let rows = verify_catalog(&builtin_catalog(), &VerifyOptions::default()).unwrap();
    assert_eq!(rows.len(), 19);
    for r in rows.iter().filter(|r| !r.name.starts_with("crx") || r.name == "crx1_2q") {
        assert!(r.pass, "{r:?}");
    }
    assert_eq!(verification_csv(&rows).lines().count(), 20);
}

#[test]
fn objective_matches_table_fidelity() {
    let e = find_entry("fixed_00").unwrap();
    let obj = make_sequence_objective(&e.target, 4, &NVParams::default(), &PAPER_COUPLINGS[..1], 0.5, None).unwrap();
    assert!((obj.fidelity(&encode_params(&e.sequence)) - 0.991).abs() < 0.005);
}

#[test]
fn search_state_fidelity() {
    let e = find_entry("robust_11").unwrap();
    let p = simulate_search_populations(&e, &NVParams::default()).unwrap();
    assert!((p[3] - 0.967).abs() < 0.01);
    assert!(p.iter().all(|&x| x >= -1e-9) && p.iter().sum::<f64>() <= 1.0 + 1e-9);
    let sys = e.system(&NVParams::default()).unwrap();
    let out = nvqc::pulse::evolve_state(&e.sequence, &DensityMatrix::basis(4, 0).unwrap(), &sys, None).unwrap();
    let f2 = state_fidelity(&DensityMatrix::basis(4, 3).unwrap(), &out).unwrap();
    assert!((f2 - p[3]).abs() < 1e-12);
}

#[test]
fn prepared_state_polarization() {
    let rho = initial_state_model(0.83, 0.08).unwrap();
    assert!((carbon_polarization(&rho).unwrap() - 0.66).abs() < 1e-12);
}

/// Groups peaks whose frequencies lie within `gap` of their neighbor.
fn groups(peaks: &[(f64, f64)], gap: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for &(f, _) in peaks {
        match out.last_mut() {
            Some(g) if f - g.last().unwrap() < gap => g.push(f),
            _ => out.push(vec![f]),
        }
    }
    out
}

fn centers(gs: &[Vec<f64>]) -> Vec<f64> {
    gs.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect()
}

#[test]
fn esr_spectrum_line_structure() {
    let p = NVParams::default();
    let c = PAPER_COUPLINGS[0];
    let cfg = SpectrumConfig::default();

    let minus = groups(&find_peaks(&fid_spectrum(&p, &c, Transition::Minus, &cfg).unwrap(), 0.1), 1.0);
    assert_eq!(minus.len(), 3, "{minus:?}");
    assert!(minus.iter().all(|g| g.len() == 4), "{minus:?}");
    let cm = centers(&minus);
    for w in cm.windows(2) {
        assert!((w[1] - w[0] - 2.16).abs() < 0.01, "{cm:?}");
    }

    let plus = groups(&find_peaks(&fid_spectrum(&p, &c, Transition::Plus, &cfg).unwrap(), 0.1), 1.0);
    assert_eq!(plus.len(), 3, "{plus:?}");
    assert!(plus.iter().all(|g| g.len() == 2), "{plus:?}");
}

#[test]
fn spectrum_follows_detuning() {
    let p = NVParams::default();
    let c = PAPER_COUPLINGS[0];
    let base = SpectrumConfig { n_points: 4096, ..SpectrumConfig::default() };
    let shifted = SpectrumConfig { nu_d_mhz: base.nu_d_mhz + 0.5, ..base };
    let a = find_peaks(&fid_spectrum(&p, &c, Transition::Minus, &base).unwrap(), 0.1);
    let b = find_peaks(&fid_spectrum(&p, &c, Transition::Minus, &shifted).unwrap(), 0.1);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((y.0 - x.0 - 0.5).abs() <= base.bin_width_mhz(), "{x:?} {y:?}");
    }
}
