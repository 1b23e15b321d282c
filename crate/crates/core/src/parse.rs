//! Text entry points shared by the command-line front end and the fuzz targets.
//!
//! Every function here returns an error rather than panicking on malformed input.

use crate::catalog::SequenceDocument;
use crate::ga::GaConfig;
use crate::lab::initial_state_model;
use crate::pulse::{rabi_grid, DensityMatrix, RabiRange};
use crate::targets::TargetSpec;
use crate::{Error, Result};

/// Upper bound on grid sizes accepted from text.
pub const MAX_GRID_POINTS: usize = 1_000_000;

fn number(field: &str, s: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{field}: `{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("{field}: `{s}` is not finite")));
    }
    Ok(x)
}

fn count(field: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{field}: `{s}` is not a non-negative integer")))
}

fn split_exact<'a>(s: &'a str, sep: char, n: usize, what: &str) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != n {
        return Err(Error::Parse(format!("{what}: expected {n} fields separated by `{sep}`, got `{s}`")));
    }
    Ok(parts)
}

/// `lo:hi:n`, `n` points with both endpoints; `n = 1` gives the midpoint.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let p = split_exact(s, ':', 3, "grid")?;
    let (lo, hi, n) = (number("grid lo", p[0])?, number("grid hi", p[1])?, count("grid n", p[2])?);
    if n == 0 {
        return Err(Error::Parse("grid: empty (n = 0)".into()));
    }
    if n > MAX_GRID_POINTS {
        return Err(Error::Parse(format!("grid: {n} points exceeds {MAX_GRID_POINTS}")));
    }
    rabi_grid(lo, hi, n).map_err(|e| Error::Parse(e.to_string()))
}

/// `lo,hi,k`: robust averaging over `k` Rabi samples in `[lo, hi]` MHz.
pub fn parse_robust(s: &str) -> Result<RabiRange> {
    let p = split_exact(s, ',', 3, "robust range")?;
    let (lo, hi, samples) = (number("robust lo", p[0])?, number("robust hi", p[1])?, count("robust k", p[2])?);
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::Parse(format!("robust range: need 0 < lo <= hi, got {lo}, {hi}")));
    }
    if samples == 0 || samples > 10_000 {
        return Err(Error::Parse(format!("robust range: sample count {samples} outside [1, 10000]")));
    }
    Ok(RabiRange { lo, hi, samples })
}

pub fn parse_sequence_document(s: &str) -> Result<SequenceDocument> {
    SequenceDocument::from_json(s)
}

pub fn parse_target(s: &str) -> Result<TargetSpec> {
    TargetSpec::from_json(s)
}

pub fn parse_ga_config(s: &str) -> Result<GaConfig> {
    GaConfig::from_json(s)
}

/// Initial register state: a bitstring such as `00` or `101` (electron first),
/// `mixed`, or `prepared:p,c` for the two-qubit prepared-state model.
pub fn parse_initial_state(s: &str, n_qubits: usize) -> Result<DensityMatrix> {
    if n_qubits == 0 || n_qubits > 16 {
        return Err(Error::Parse(format!("unsupported register of {n_qubits} qubits")));
    }
    let dim = 1usize << n_qubits;
    let s = s.trim();
    if s == "mixed" {
        return Ok(DensityMatrix::maximally_mixed(dim));
    }
    if let Some(rest) = s.strip_prefix("prepared:") {
        if n_qubits != 2 {
            return Err(Error::Parse("prepared state is defined for two qubits".into()));
        }
        let p = split_exact(rest, ',', 2, "prepared state")?;
        return initial_state_model(number("p", p[0])?, number("c", p[1])?)
            .map_err(|e| Error::Parse(e.to_string()));
    }
    let bits = s.trim_start_matches('|').trim_end_matches('>');
    if bits.len() != n_qubits || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Parse(format!(
            "initial state `{s}`: expected {n_qubits} binary digits, `mixed`, or `prepared:p,c`"
        )));
    }
    let index = bits.bytes().fold(0usize, |acc, b| 2 * acc + (b - b'0') as usize);
    DensityMatrix::basis(dim, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5:0.5:1").unwrap(), vec![0.5]);
        let g = parse_grid("0:1:5").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[4], 1.0);
        for bad in ["", "0:1", "0:1:0", "1:0:3", "a:1:2", "0:1:-2", "nan:1:2", "0:inf:2", "0:1:2:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn robust_ranges() {
        let r = parse_robust("0.48,0.52,5").unwrap();
        assert_eq!((r.lo, r.hi, r.samples), (0.48, 0.52, 5));
        for bad in ["0.48,0.52", "0.52,0.48,5", "0,0.5,5", "0.4,0.5,0", "x,y,z"] {
            assert!(parse_robust(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn initial_states() {
        let rho = parse_initial_state("|10>", 2).unwrap();
        assert_eq!(rho.populations().unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        let m = parse_initial_state("mixed", 2).unwrap();
        assert_eq!(m.populations().unwrap(), vec![0.25; 4]);
        assert!(parse_initial_state("prepared:0.83,0.08", 2).is_ok());
        for bad in ["2", "000", "prepared:0.5,0.9", "prepared:0.5", "", "prepared:1,1,1"] {
            assert!(parse_initial_state(bad, 2).is_err(), "{bad}");
        }
        assert!(parse_initial_state("prepared:0.9,0.1", 3).is_err());
    }
}
