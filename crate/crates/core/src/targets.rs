//! Ideal target unitaries.
//!
//! Qubit order is big-endian: qubit 0 (the electron) is the most significant
//! bit of a basis index, so `|10⟩` is the electron in `m_S = -1` with the
//! carbon up.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spinsys::{embed_qubit, identity, re, spin_operators, Operator, Spin};
use crate::{Error, Result};

pub const MAX_GROVER_QUBITS: usize = 10;

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_GROVER_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidTarget(format!(
            "qubit count must be in 1..={MAX_GROVER_QUBITS}, got {n}"
        )))
    }
}

/// `H^{⊗n}`.
pub fn hadamard_layer(n: usize) -> Result<Operator> {
    check_qubits(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = Operator::from_row_slice(2, 2, &[re(h), re(h), re(h), re(-h)]);
    Ok((1..n).fold(had.clone(), |acc, _| acc.kronecker(&had)))
}

/// `I - 2|t⟩⟨t|`.
pub fn oracle_unitary(n: usize, target_index: usize) -> Result<Operator> {
    check_qubits(n)?;
    let dim = 1usize << n;
    if target_index >= dim {
        return Err(Error::InvalidTarget(format!(
            "target index {target_index} out of range for {n} qubits"
        )));
    }
    let mut u = identity(dim);
    u[(target_index, target_index)] = re(-1.0);
    Ok(u)
}

/// Inversion about the mean, `2P - I` with `P` the uniform projector.
pub fn diffusion_unitary(n: usize) -> Result<Operator> {
    check_qubits(n)?;
    let dim = 1usize << n;
    let off = 2.0 / dim as f64;
    Ok(Operator::from_element(dim, dim, re(off)) - identity(dim))
}

/// `round(π / (4 asin(2^{-n/2})) - 1/2)`, at least 1.
pub fn optimal_iterations(n: usize) -> usize {
    let theta = (2f64).powf(-(n as f64) / 2.0).asin();
    let m = (std::f64::consts::PI / (4.0 * theta) - 0.5).round();
    (m as usize).max(1)
}

/// Electron-controlled `exp(-iπ I_x^j)` on carbon `j` (1-based). Identity when
/// the electron is in `m_S = 0`, rotation when it is in `m_S = -1`.
pub fn controlled_rx_target(n_carbons: usize, j: usize) -> Result<Operator> {
    if n_carbons == 0 || n_carbons > crate::spinsys::MAX_CARBONS {
        return Err(Error::InvalidTarget(format!("invalid carbon count {n_carbons}")));
    }
    if j == 0 || j > n_carbons {
        return Err(Error::InvalidTarget(format!(
            "carbon index {j} out of range 1..={n_carbons}"
        )));
    }
    let nq = n_carbons + 1;
    let half_dim = 1usize << n_carbons;
    // exp(-iπ I_x) = -2i I_x for spin 1/2.
    let rx = embed_qubit(&spin_operators(Spin::Half).x, j, nq) * Complex64::new(0.0, -2.0);
    let mut u = identity(1 << nq);
    let lower = rx.view((half_dim, half_dim), (half_dim, half_dim)).into_owned();
    u.view_mut((half_dim, half_dim), (half_dim, half_dim))
        .copy_from(&lower);
    Ok(u)
}

/// `(θ)_φ = exp(-iθ[I_x cos φ + I_y sin φ])`, angles in radians.
pub fn single_qubit_rotation(theta: f64, phi: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    let off = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, -phi);
    let off_t = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, phi);
    Operator::from_row_slice(2, 2, &[re(c), off, off_t, re(c)])
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetKind {
    Grover {
        n_qubits: usize,
        target_index: usize,
        iterations: usize,
        include_prep: bool,
    },
    ControlledRx {
        n_carbons: usize,
        j: usize,
    },
    Custom(Operator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub name: String,
    pub kind: TargetKind,
}

impl TargetSpec {
    /// One search iteration mapping the prepared `|00⟩` to `|target⟩`.
    pub fn grover2(target_index: usize) -> Self {
        Self {
            name: format!("grover_{target_index:02b}"),
            kind: TargetKind::Grover {
                n_qubits: 2,
                target_index,
                iterations: 1,
                include_prep: true,
            },
        }
    }

    pub fn controlled_rx(n_carbons: usize, j: usize) -> Self {
        Self {
            name: format!("crx{j}_{}q", n_carbons + 1),
            kind: TargetKind::ControlledRx { n_carbons, j },
        }
    }

    pub fn unitary(&self) -> Result<Operator> {
        match &self.kind {
            &TargetKind::Grover {
                n_qubits,
                target_index,
                iterations,
                include_prep,
            } => grover_circuit_unitary(n_qubits, target_index, iterations, include_prep),
            &TargetKind::ControlledRx { n_carbons, j } => controlled_rx_target(n_carbons, j),
            TargetKind::Custom(m) => {
                let err = crate::spinsys::unitarity_error(m);
                if err > 1e-9 {
                    return Err(Error::InvalidTarget(format!(
                        "custom matrix is not unitary ({err:e})"
                    )));
                }
                Ok(m.clone())
            }
        }
    }

    /// Number of ¹³C spins the target acts on alongside the electron.
    pub fn n_carbons(&self) -> Result<usize> {
        let dim = match &self.kind {
            TargetKind::Grover { n_qubits, .. } => 1usize << n_qubits,
            TargetKind::ControlledRx { n_carbons, .. } => return Ok(*n_carbons),
            TargetKind::Custom(m) => m.nrows(),
        };
        if dim < 4 || !dim.is_power_of_two() {
            return Err(Error::InvalidTarget(format!(
                "target of dimension {dim} does not fit an electron plus carbons register"
            )));
        }
        Ok(dim.trailing_zeros() as usize - 1)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<RawTarget>(text)?.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RawTarget::from(self)).expect("target serializes")
    }
}

/// `(D·I_t)^m`, preceded by `H^{⊗n}` when `include_prep` is set.
pub fn grover_circuit_unitary(
    n_qubits: usize,
    target_index: usize,
    iterations: usize,
    include_prep: bool,
) -> Result<Operator> {
    let step = diffusion_unitary(n_qubits)? * oracle_unitary(n_qubits, target_index)?;
    let mut u = identity(1 << n_qubits);
    for _ in 0..iterations {
        u = &step * u;
    }
    if include_prep {
        u *= hadamard_layer(n_qubits)?;
    }
    Ok(u)
}

/// Wire form: `{"kind": "grover"|"controlled_rx"|"custom", ...}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTarget {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_prep: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_carbons: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    /// Row-major real part of a custom matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<Vec<f64>>>,
}

fn require<T>(v: Option<T>, field: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidTarget(format!("`{kind}` target needs `{field}`")))
}

fn reject_extra(present: &[(&str, bool)], kind: &str) -> Result<()> {
    match present.iter().find(|(_, p)| *p) {
        Some((f, _)) => Err(Error::InvalidTarget(format!(
            "field `{f}` does not apply to a `{kind}` target"
        ))),
        None => Ok(()),
    }
}

impl TryFrom<RawTarget> for TargetSpec {
    type Error = Error;

    fn try_from(raw: RawTarget) -> Result<Self> {
        let spec = match raw.kind.as_str() {
            "grover" => {
                reject_extra(
                    &[
                        ("n_carbons", raw.n_carbons.is_some()),
                        ("j", raw.j.is_some()),
                        ("real", raw.real.is_some()),
                        ("imag", raw.imag.is_some()),
                    ],
                    "grover",
                )?;
                let n_qubits = require(raw.n_qubits, "n_qubits", "grover")?;
                let target_index = require(raw.target_index, "target_index", "grover")?;
                let iterations = raw.iterations.unwrap_or(1);
                check_qubits(n_qubits)?;
                if target_index >= 1 << n_qubits {
                    return Err(Error::InvalidTarget(format!(
                        "target index {target_index} out of range for {n_qubits} qubits"
                    )));
                }
                if iterations > 1 << 16 {
                    return Err(Error::InvalidTarget(format!("too many iterations ({iterations})")));
                }
                TargetSpec {
                    name: raw.name.unwrap_or_else(|| {
                        format!("grover_{target_index:0width$b}", width = n_qubits)
                    }),
                    kind: TargetKind::Grover {
                        n_qubits,
                        target_index,
                        iterations,
                        include_prep: raw.include_prep.unwrap_or(true),
                    },
                }
            }
            "controlled_rx" => {
                reject_extra(
                    &[
                        ("n_qubits", raw.n_qubits.is_some()),
                        ("target_index", raw.target_index.is_some()),
                        ("iterations", raw.iterations.is_some()),
                        ("include_prep", raw.include_prep.is_some()),
                        ("real", raw.real.is_some()),
                        ("imag", raw.imag.is_some()),
                    ],
                    "controlled_rx",
                )?;
                let n_carbons = require(raw.n_carbons, "n_carbons", "controlled_rx")?;
                let j = require(raw.j, "j", "controlled_rx")?;
                controlled_rx_target(n_carbons, j)?;
                let mut spec = TargetSpec::controlled_rx(n_carbons, j);
                if let Some(name) = raw.name {
                    spec.name = name;
                }
                spec
            }
            "custom" => {
                reject_extra(
                    &[
                        ("n_qubits", raw.n_qubits.is_some()),
                        ("target_index", raw.target_index.is_some()),
                        ("iterations", raw.iterations.is_some()),
                        ("include_prep", raw.include_prep.is_some()),
                        ("n_carbons", raw.n_carbons.is_some()),
                        ("j", raw.j.is_some()),
                    ],
                    "custom",
                )?;
                let real = require(raw.real, "real", "custom")?;
                let dim = real.len();
                let imag = raw.imag.unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
                if dim == 0 || dim > 1 << 9 || imag.len() != dim {
                    return Err(Error::InvalidTarget("custom matrix has bad shape".into()));
                }
                let mut m = Operator::zeros(dim, dim);
                for (i, (rr, ir)) in real.iter().zip(&imag).enumerate() {
                    if rr.len() != dim || ir.len() != dim {
                        return Err(Error::InvalidTarget("custom matrix is not square".into()));
                    }
                    for (k, (&a, &b)) in rr.iter().zip(ir).enumerate() {
                        if !(a.is_finite() && b.is_finite()) {
                            return Err(Error::InvalidTarget("non-finite matrix entry".into()));
                        }
                        m[(i, k)] = Complex64::new(a, b);
                    }
                }
                let spec = TargetSpec {
                    name: raw.name.unwrap_or_else(|| "custom".into()),
                    kind: TargetKind::Custom(m),
                };
                spec.unitary()?;
                spec
            }
            other => {
                return Err(Error::InvalidTarget(format!("unknown target kind `{other}`")));
            }
        };
        Ok(spec)
    }
}

impl From<&TargetSpec> for RawTarget {
    fn from(t: &TargetSpec) -> Self {
        let mut raw = RawTarget {
            name: Some(t.name.clone()),
            ..Default::default()
        };
        match &t.kind {
            &TargetKind::Grover {
                n_qubits,
                target_index,
                iterations,
                include_prep,
            } => {
                raw.kind = "grover".into();
                raw.n_qubits = Some(n_qubits);
                raw.target_index = Some(target_index);
                raw.iterations = Some(iterations);
                raw.include_prep = Some(include_prep);
            }
            &TargetKind::ControlledRx { n_carbons, j } => {
                raw.kind = "controlled_rx".into();
                raw.n_carbons = Some(n_carbons);
                raw.j = Some(j);
            }
            TargetKind::Custom(m) => {
                raw.kind = "custom".into();
                let rows = |f: fn(&Complex64) -> f64| {
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|k| f(&m[(i, k)])).collect())
                        .collect()
                };
                raw.real = Some(rows(|z| z.re));
                raw.imag = Some(rows(|z| z.im));
            }
        }
        raw
    }
}

impl Serialize for TargetSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawTarget::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TargetSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        RawTarget::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinsys::{max_abs_diff, unitarity_error};

    #[test]
    fn hadamard() {
        let h1 = hadamard_layer(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h1[(1, 1)].re + s).abs() < 1e-15 && (h1[(0, 1)].re - s).abs() < 1e-15);
        let h2 = hadamard_layer(2).unwrap();
        for i in 0..4 {
            assert!((h2[(i, 0)] - re(0.5)).norm() < 1e-15);
        }
        assert!(max_abs_diff(&(&h2 * &h2), &identity(4)) < 1e-12);
        assert!(hadamard_layer(0).is_err());
    }

    #[test]
    fn oracle_is_diagonal_phase_flip() {
        let o = oracle_unitary(2, 3).unwrap();
        assert_eq!(o, crate::spinsys::diag_real(&[1.0, 1.0, 1.0, -1.0]));
        let o = oracle_unitary(2, 1).unwrap();
        assert_eq!(o, crate::spinsys::diag_real(&[1.0, -1.0, 1.0, 1.0]));
        assert!(max_abs_diff(&(&o * &o), &identity(4)) < 1e-15);
        assert!(oracle_unitary(2, 4).is_err());
    }

    #[test]
    fn diffusion_matches_hadamard_conjugated_zero_oracle() {
        let d = diffusion_unitary(2).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let expect = if i == k { -0.5 } else { 0.5 };
                assert!((d[(i, k)] - re(expect)).norm() < 1e-15);
            }
        }
        for n in 1..=4 {
            let d = diffusion_unitary(n).unwrap();
            let h = hadamard_layer(n).unwrap();
            // H I_0 H = -(2P - I); the identity holds up to the global sign.
            let via_h = &h * oracle_unitary(n, 0).unwrap() * &h * re(-1.0);
            assert!(max_abs_diff(&d, &via_h) < 1e-12);
            assert!(unitarity_error(&d) < 1e-12);
            assert!(max_abs_diff(&(&d * &d), &identity(1 << n)) < 1e-12);
        }
    }

    #[test]
    fn iterations_formula() {
        assert_eq!(optimal_iterations(1), 1);
        assert_eq!(optimal_iterations(2), 1);
        assert_eq!(optimal_iterations(4), 3);
    }

    #[test]
    fn grover_maps_zero_to_target() {
        let mut images = Vec::new();
        for t in 0..4 {
            let u = grover_circuit_unitary(2, t, 1, true).unwrap();
            assert!((u[(t, 0)].norm_sqr() - 1.0).abs() < 1e-12);
            images.push((0..4).find(|&i| u[(i, 0)].norm_sqr() > 0.5).unwrap());
        }
        images.sort();
        assert_eq!(images, vec![0, 1, 2, 3]);
        let id = grover_circuit_unitary(2, 1, 0, false).unwrap();
        assert!(max_abs_diff(&id, &identity(4)) < 1e-15);
    }

    #[test]
    fn controlled_rx_blocks() {
        let u = controlled_rx_target(1, 1).unwrap();
        let minus_i_sx = Operator::from_row_slice(
            2,
            2,
            &[re(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), re(0.0)],
        );
        assert!(max_abs_diff(&u.view((2, 2), (2, 2)).into_owned(), &minus_i_sx) < 1e-12);
        assert!(max_abs_diff(&u.view((0, 0), (2, 2)).into_owned(), &identity(2)) < 1e-15);
        let sq = &u * &u;
        assert!(max_abs_diff(&sq, &crate::spinsys::diag_real(&[1.0, 1.0, -1.0, -1.0])) < 1e-12);
        for n in 1..=4 {
            for j in 1..=n {
                let u = controlled_rx_target(n, j).unwrap();
                assert_eq!(u.nrows(), 1 << (n + 1));
                assert!(unitarity_error(&u) < 1e-12);
            }
        }
        assert!(controlled_rx_target(2, 0).is_err());
        assert!(controlled_rx_target(2, 3).is_err());
    }

    #[test]
    fn rotation_gate() {
        assert!(max_abs_diff(&single_qubit_rotation(0.0, 1.3), &identity(2)) < 1e-15);
        let x = single_qubit_rotation(std::f64::consts::PI, 0.0);
        assert!((x[(0, 1)] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(x[(0, 0)].norm() < 1e-12);
        let prod = single_qubit_rotation(0.7, 0.4) * single_qubit_rotation(-0.7, 0.4);
        assert!(max_abs_diff(&prod, &identity(2)) < 1e-12);
        // Agrees with the generator exponential.
        let half = spin_operators(Spin::Half);
        let gen = (&half.x * re(0.4f64.cos()) + &half.y * re(0.4f64.sin())) * re(0.7);
        let u = crate::spinsys::hermitian_propagator(&gen, 1.0 / std::f64::consts::TAU).unwrap();
        assert!(max_abs_diff(&u, &single_qubit_rotation(0.7, 0.4)) < 1e-12);
    }

    #[test]
    fn target_json() {
        let t = TargetSpec::from_json(r#"{"kind":"grover","n_qubits":2,"target_index":3}"#).unwrap();
        assert_eq!(t, TargetSpec::grover2(3).renamed("grover_11"));
        let t2 = TargetSpec::from_json(&t.to_json()).unwrap();
        assert_eq!(t, t2);
        let c = TargetSpec::from_json(r#"{"kind":"controlled_rx","n_carbons":2,"j":2}"#).unwrap();
        assert_eq!(c.n_carbons().unwrap(), 2);
        assert!(TargetSpec::from_json(r#"{"kind":"controlled_rx","n_carbons":2,"j":3}"#).is_err());
        assert!(TargetSpec::from_json(r#"{"kind":"grover","n_qubits":2,"target_index":3,"j":1}"#).is_err());
        assert!(TargetSpec::from_json(r#"{"kind":"grover","n_qubits":2,"target_index":3,"bogus":1}"#).is_err());
        assert!(TargetSpec::from_json(r#"{"kind":"nope"}"#).is_err());
        let custom = TargetSpec::from_json(r#"{"kind":"custom","real":[[0,1],[1,0]]}"#).unwrap();
        assert!(custom.n_carbons().is_err());
        assert!(TargetSpec::from_json(r#"{"kind":"custom","real":[[1,1],[1,0]]}"#).is_err());
    }

    impl TargetSpec {
        fn renamed(mut self, n: &str) -> Self {
            self.name = n.into();
            self
        }
    }
}
