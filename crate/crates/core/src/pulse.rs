//! Pulse sequences of `n` rectangular microwave pulses interleaved with `n + 1`
//! free-evolution delays, and the fidelities of the unitaries they produce.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spinsys::{
    build_multi_carbon_hamiltonian, embed_qubit, hermiticity_error, identity,
    nitrogen_leakage_operators, re, spin_operators, trace, CarbonCoupling, HermitianEigen,
    NVParams, Operator, Spin, HERMITIAN_TOL,
};
use crate::{Error, Result};

/// One microwave pulse and the delay that follows it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub pulse_us: f64,
    pub phase_deg: f64,
    pub post_delay_us: f64,
}

/// `τ₀, (t₁, φ₁, τ₁), …, (t_n, φ_n, τ_n)` at a fixed Rabi frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSequence {
    pub rabi_mhz: f64,
    /// Rabi interval the sequence was made robust against, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_range_mhz: Option<[f64; 2]>,
    pub lead_delay_us: f64,
    pub segments: Vec<Segment>,
}

fn nonneg(label: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSequence(format!("{label} must be finite and >= 0, got {x}")))
    }
}

pub fn wrap_phase(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

impl PulseSequence {
    pub fn new(rabi_mhz: f64, lead_delay_us: f64, segments: Vec<Segment>) -> Result<Self> {
        Self {
            rabi_mhz,
            rabi_range_mhz: None,
            lead_delay_us,
            segments,
        }
        .validated()
    }

    /// Builds a sequence from table columns: `delays` holds `τ₀…τ_n`.
    pub fn from_columns(
        rabi_mhz: f64,
        delays: &[f64],
        pulses: &[f64],
        phases_deg: &[f64],
    ) -> Result<Self> {
        if delays.len() != pulses.len() + 1 || pulses.len() != phases_deg.len() {
            return Err(Error::InvalidSequence(format!(
                "need n pulses, n phases and n+1 delays; got {}, {}, {}",
                pulses.len(),
                phases_deg.len(),
                delays.len()
            )));
        }
        let segments = pulses
            .iter()
            .zip(phases_deg)
            .zip(&delays[1..])
            .map(|((&pulse_us, &phase_deg), &post_delay_us)| Segment {
                pulse_us,
                phase_deg,
                post_delay_us,
            })
            .collect();
        Self::new(rabi_mhz, delays[0], segments)
    }

    pub fn with_rabi_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.rabi_range_mhz = Some([lo, hi]);
        self.validated()
    }

    /// Checks durations and Rabi values and wraps phases into `[0, 360)`.
    pub fn validated(mut self) -> Result<Self> {
        if !(self.rabi_mhz.is_finite() && self.rabi_mhz > 0.0) {
            return Err(Error::InvalidSequence(format!(
                "rabi_mhz must be > 0, got {}",
                self.rabi_mhz
            )));
        }
        if let Some([lo, hi]) = self.rabi_range_mhz {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
                return Err(Error::InvalidSequence(format!(
                    "rabi_range_mhz must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        nonneg("lead_delay_us", self.lead_delay_us)?;
        for (k, s) in self.segments.iter_mut().enumerate() {
            nonneg(&format!("segments[{k}].pulse_us"), s.pulse_us)?;
            nonneg(&format!("segments[{k}].post_delay_us"), s.post_delay_us)?;
            if !s.phase_deg.is_finite() {
                return Err(Error::InvalidSequence(format!("segments[{k}].phase_deg is not finite")));
            }
            s.phase_deg = wrap_phase(s.phase_deg);
        }
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<Self>(text)?.validated()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequence serializes")
    }

    pub fn n_pulses(&self) -> usize {
        self.segments.len()
    }

    /// Delays `τ₀…τ_n`.
    pub fn delays(&self) -> Vec<f64> {
        std::iter::once(self.lead_delay_us)
            .chain(self.segments.iter().map(|s| s.post_delay_us))
            .collect()
    }

    /// Appends `other`, merging this sequence's final delay with `other`'s lead delay.
    pub fn concat(&self, other: &PulseSequence) -> PulseSequence {
        let mut out = self.clone();
        match out.segments.last_mut() {
            Some(last) => last.post_delay_us += other.lead_delay_us,
            None => out.lead_delay_us += other.lead_delay_us,
        }
        out.segments.extend_from_slice(&other.segments);
        out
    }
}

/// `τ₀ + Σ (t_k + τ_k)`.
pub fn sequence_duration(seq: &PulseSequence) -> f64 {
    seq.lead_delay_us
        + seq
            .segments
            .iter()
            .map(|s| s.pulse_us + s.post_delay_us)
            .sum::<f64>()
}

/// Free Hamiltonian plus the two quadrature drive operators a sequence acts through.
#[derive(Debug, Clone)]
pub struct ControlSystem {
    h_free: Operator,
    drive_x: Operator,
    drive_y: Operator,
    free_eigen: HermitianEigen,
}

impl ControlSystem {
    pub fn new(h_free: Operator, drive_x: Operator, drive_y: Operator) -> Result<Self> {
        let dim = h_free.nrows();
        for m in [&h_free, &drive_x, &drive_y] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: m.nrows().max(m.ncols()),
                });
            }
            let err = hermiticity_error(m);
            if err > HERMITIAN_TOL {
                return Err(Error::NotHermitian(err));
            }
        }
        let free_eigen = HermitianEigen::new(&h_free)?;
        Ok(Self {
            h_free,
            drive_x,
            drive_y,
            free_eigen,
        })
    }

    /// Electron doublet driven through its pseudo-spin `s_x`, `s_y`.
    pub fn multi_carbon(params: &NVParams, couplings: &[CarbonCoupling]) -> Result<Self> {
        let h = build_multi_carbon_hamiltonian(params, couplings)?;
        let (dx, dy) = electron_pseudospin_drives(couplings.len() + 1);
        Self::new(h, dx, dy)
    }

    pub fn two_qubit(params: &NVParams, coupling: &CarbonCoupling) -> Result<Self> {
        Self::multi_carbon(params, std::slice::from_ref(coupling))
    }

    /// Electron doublet ⊗ ¹⁴N (6-dim), carrier resonant with the `m_N = 1` line.
    pub fn nitrogen_leakage(params: &NVParams) -> Result<Self> {
        let (free, dx, dy) = nitrogen_leakage_operators(params);
        Self::new(free, dx, dy)
    }

    /// Bare drive with no free evolution, mostly for tests.
    pub fn drive_only(drive_x: Operator, drive_y: Operator) -> Result<Self> {
        let dim = drive_x.nrows();
        Self::new(Operator::zeros(dim, dim), drive_x, drive_y)
    }

    pub fn dim(&self) -> usize {
        self.h_free.nrows()
    }

    pub fn h_free(&self) -> &Operator {
        &self.h_free
    }

    pub fn pulse_hamiltonian(&self, rabi: f64, phase_deg: f64) -> Operator {
        let phi = phase_deg.to_radians();
        &self.h_free + (&self.drive_x * re(rabi * phi.cos()) + &self.drive_y * re(rabi * phi.sin()))
    }

    pub fn free_propagator(&self, t_us: f64) -> Operator {
        self.free_eigen.propagator(t_us)
    }
}

/// Time-ordered product `U_n^d U_n^MW ⋯ U_1^MW U_0^d`.
pub fn sequence_unitary(
    seq: &PulseSequence,
    sys: &ControlSystem,
    rabi_override: Option<f64>,
) -> Result<Operator> {
    let rabi = rabi_override.unwrap_or(seq.rabi_mhz);
    let mut u = if seq.lead_delay_us == 0.0 {
        identity(sys.dim())
    } else {
        sys.free_propagator(seq.lead_delay_us)
    };
    for s in &seq.segments {
        if s.pulse_us != 0.0 {
            let h = sys.pulse_hamiltonian(rabi, s.phase_deg);
            u = HermitianEigen::new(&h)?.propagator(s.pulse_us) * u;
        }
        if s.post_delay_us != 0.0 {
            u = sys.free_propagator(s.post_delay_us) * u;
        }
    }
    Ok(u)
}

/// `|Tr(U_T† U)| / dim`, invariant under global phases of either argument.
pub fn gate_fidelity(u: &Operator, u_target: &Operator) -> Result<f64> {
    if u.shape() != u_target.shape() || !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u_target.nrows(),
            actual: u.nrows(),
        });
    }
    // Tr(A†B) = Σ conj(a_ij) b_ij, without forming the product.
    let overlap: Complex64 = u_target
        .iter()
        .zip(u.iter())
        .map(|(t, x)| t.conj() * x)
        .sum();
    Ok((overlap.norm() / u.nrows() as f64).min(1.0))
}

/// `n` uniformly spaced Rabi values over `[lo, hi]`, endpoints included.
/// A single sample sits at the midpoint.
pub fn rabi_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "invalid Rabi grid [{lo}, {hi}] x {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![0.5 * (lo + hi)]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// Mean gate fidelity over the Rabi grid.
pub fn robust_gate_fidelity(
    seq: &PulseSequence,
    u_target: &Operator,
    sys: &ControlSystem,
    rabi_lo: f64,
    rabi_hi: f64,
    n_samples: usize,
) -> Result<f64> {
    let grid = rabi_grid(rabi_lo, rabi_hi, n_samples)?;
    let mut total = 0.0;
    for &r in &grid {
        total += gate_fidelity(&sequence_unitary(seq, sys, Some(r))?, u_target)?;
    }
    Ok(total / grid.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub target_name: String,
    pub fixed_fidelity: f64,
    pub robust_fidelity: Option<f64>,
    pub duration_us: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiRange {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl RabiRange {
    /// The interval the robust tables were optimized over, sampled at 5 points.
    pub const PAPER: RabiRange = RabiRange {
        lo: 0.48,
        hi: 0.52,
        samples: 5,
    };
}

pub fn evaluate_sequence(
    seq: &PulseSequence,
    target_name: &str,
    u_target: &Operator,
    sys: &ControlSystem,
    robust: Option<RabiRange>,
) -> Result<FidelityReport> {
    let fixed_fidelity = gate_fidelity(&sequence_unitary(seq, sys, None)?, u_target)?;
    let robust_fidelity = robust
        .map(|r| robust_gate_fidelity(seq, u_target, sys, r.lo, r.hi, r.samples))
        .transpose()?;
    Ok(FidelityReport {
        target_name: target_name.to_string(),
        fixed_fidelity,
        robust_fidelity,
        duration_us: sequence_duration(seq),
    })
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-9;
    pub const PSD_TOL: f64 = 1e-9;

    pub fn new(rho: Operator) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::NotSquare {
                rows: rho.nrows(),
                cols: rho.ncols(),
            });
        }
        let herm = hermiticity_error(&rho);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:e})")));
        }
        let tr = trace(&rho);
        if (tr - re(1.0)).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_eig = HermitianEigen::new(&rho)?
            .values
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -Self::PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self(rho))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= dim {dim}")));
        }
        let mut m = Operator::zeros(dim, dim);
        m[(index, index)] = re(1.0);
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(identity(dim) * re(1.0 / dim as f64))
    }

    /// `|ψ⟩⟨ψ|` after normalizing `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|z| z / norm));
        Ok(Self(&v * v.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_matrix(self) -> Operator {
        self.0
    }

    /// `U ρ U†`. The unitary is trusted, so the result skips re-validation.
    pub fn conjugate_by(&self, u: &Operator) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(Self(u * &self.0 * u.adjoint()))
    }

    /// Diagonal populations; tiny negative round-off is clipped to zero.
    pub fn populations(&self) -> Result<Vec<f64>> {
        self.0
            .diagonal()
            .iter()
            .map(|z| {
                let p = z.re;
                if p < -1e-6 {
                    Err(Error::InvalidState(format!("negative population {p}")))
                } else {
                    Ok(p.max(0.0))
                }
            })
            .collect()
    }
}

pub fn populations(rho: &DensityMatrix) -> Result<Vec<f64>> {
    rho.populations()
}

pub fn evolve_state(
    seq: &PulseSequence,
    rho0: &DensityMatrix,
    sys: &ControlSystem,
    rabi_override: Option<f64>,
) -> Result<DensityMatrix> {
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            actual: rho0.dim(),
        });
    }
    rho0.conjugate_by(&sequence_unitary(seq, sys, rabi_override)?)
}

/// Pseudo-spin `s_x`, `s_y` of the electron (qubit 0) in an `n_qubits` register.
pub fn electron_pseudospin_drives(n_qubits: usize) -> (Operator, Operator) {
    let half = spin_operators(Spin::Half);
    (
        embed_qubit(&half.x, 0, n_qubits),
        embed_qubit(&half.y, 0, n_qubits),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinsys::{max_abs_diff, unitarity_error, PAPER_COUPLINGS};

    fn electron_only() -> ControlSystem {
        let (dx, dy) = electron_pseudospin_drives(2);
        ControlSystem::drive_only(dx, dy).unwrap()
    }

    #[test]
    fn empty_sequence_is_identity() {
        let seq = PulseSequence::new(0.5, 0.0, vec![]).unwrap();
        let sys = ControlSystem::two_qubit(&NVParams::default(), &PAPER_COUPLINGS[0]).unwrap();
        let u = sequence_unitary(&seq, &sys, None).unwrap();
        assert!(max_abs_diff(&u, &identity(4)) < 1e-15);
        assert_eq!(sequence_duration(&seq), 0.0);
    }

    #[test]
    fn one_microsecond_pulse_at_half_megahertz_flips_electron() {
        let seq = PulseSequence::from_columns(0.5, &[0.0, 0.0], &[1.0], &[0.0]).unwrap();
        let u = sequence_unitary(&seq, &electron_only(), None).unwrap();
        // exp(-iπ s_x) ⊗ I = -i σ_x ⊗ I
        let sx = spin_operators(Spin::Half).x;
        let expect = (sx * Complex64::new(0.0, -2.0)).kronecker(&identity(2));
        assert!(max_abs_diff(&u, &expect) < 1e-12);
    }

    #[test]
    fn rabi_override_changes_rotation_angle() {
        let seq = PulseSequence::from_columns(0.5, &[0.0, 0.0], &[1.0], &[90.0]).unwrap();
        let sys = electron_only();
        let full = sequence_unitary(&seq, &sys, Some(1.0)).unwrap();
        // 2π rotation of a spin-1/2 is -I.
        assert!(max_abs_diff(&full, &(identity(4) * re(-1.0))) < 1e-12);
    }

    #[test]
    fn from_columns_checks_lengths() {
        assert!(PulseSequence::from_columns(0.5, &[1.0], &[1.0], &[0.0]).is_err());
        assert!(PulseSequence::from_columns(0.5, &[1.0, 1.0], &[1.0], &[]).is_err());
        assert!(PulseSequence::from_columns(0.5, &[1.0, -1.0], &[1.0], &[0.0]).is_err());
        assert!(PulseSequence::from_columns(0.0, &[1.0], &[], &[]).is_err());
        let s = PulseSequence::from_columns(0.5, &[1.0, 2.0], &[0.5], &[-90.0]).unwrap();
        assert_eq!(s.segments[0].phase_deg, 270.0);
        assert_eq!(s.delays(), vec![1.0, 2.0]);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let ok = r#"{"rabi_mhz":0.5,"lead_delay_us":1.0,"segments":[{"pulse_us":0.5,"phase_deg":90,"post_delay_us":0.2}]}"#;
        let s = PulseSequence::from_json(ok).unwrap();
        assert_eq!(s.n_pulses(), 1);
        assert!(PulseSequence::from_json(&ok.replace("\"lead", "\"extra\":1,\"lead")).is_err());
        let with_range = r#"{"rabi_mhz":0.5,"rabi_range_mhz":[0.48,0.52],"lead_delay_us":0,"segments":[]}"#;
        assert_eq!(
            PulseSequence::from_json(with_range).unwrap().rabi_range_mhz,
            Some([0.48, 0.52])
        );
        let bad_range = r#"{"rabi_mhz":0.5,"rabi_range_mhz":[0.52,0.48],"lead_delay_us":0,"segments":[]}"#;
        assert!(PulseSequence::from_json(bad_range).is_err());
    }

    #[test]
    fn fidelity_is_phase_invariant() {
        let sys = ControlSystem::two_qubit(&NVParams::default(), &PAPER_COUPLINGS[0]).unwrap();
        let seq = PulseSequence::from_columns(0.5, &[0.3, 1.1], &[0.7], &[33.0]).unwrap();
        let u = sequence_unitary(&seq, &sys, None).unwrap();
        assert!((gate_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        let shifted = &u * Complex64::from_polar(1.0, 0.77);
        assert!((gate_fidelity(&u, &shifted).unwrap() - 1.0).abs() < 1e-12);
        assert!(gate_fidelity(&u, &identity(2)).is_err());
    }

    #[test]
    fn robust_fidelity_with_degenerate_interval_equals_fixed() {
        let sys = ControlSystem::two_qubit(&NVParams::default(), &PAPER_COUPLINGS[0]).unwrap();
        let seq = PulseSequence::from_columns(0.5, &[0.3, 1.1, 0.2], &[0.7, 0.4], &[33.0, 200.0])
            .unwrap();
        let target = identity(4);
        let fixed = gate_fidelity(&sequence_unitary(&seq, &sys, None).unwrap(), &target).unwrap();
        let robust = robust_gate_fidelity(&seq, &target, &sys, 0.5, 0.5, 4).unwrap();
        assert!((fixed - robust).abs() < 1e-12);
        assert!(robust_gate_fidelity(&seq, &target, &sys, 0.5, 0.4, 4).is_err());
        assert!(robust_gate_fidelity(&seq, &target, &sys, 0.4, 0.5, 0).is_err());
    }

    #[test]
    fn rabi_grid_includes_endpoints() {
        let g = rabi_grid(0.48, 0.52, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 0.48).abs() < 1e-15 && (g[4] - 0.52).abs() < 1e-15);
        assert!((g[2] - 0.5).abs() < 1e-15);
        assert_eq!(rabi_grid(0.4, 0.6, 1).unwrap(), vec![0.5]);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(identity(2)).is_err());
        let mut neg = diag_of(&[1.5, -0.5]);
        assert!(DensityMatrix::new(neg.clone()).is_err());
        neg[(0, 1)] = re(0.1);
        assert!(DensityMatrix::new(neg).is_err());
        let rho = DensityMatrix::basis(4, 0).unwrap();
        assert_eq!(rho.populations().unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            DensityMatrix::maximally_mixed(4).populations().unwrap(),
            vec![0.25; 4]
        );
        assert!(DensityMatrix::basis(4, 4).is_err());
    }

    fn diag_of(v: &[f64]) -> Operator {
        crate::spinsys::diag_real(v)
    }

    #[test]
    fn evolve_preserves_trace() {
        let sys = ControlSystem::two_qubit(&NVParams::default(), &PAPER_COUPLINGS[0]).unwrap();
        let seq = PulseSequence::from_columns(0.5, &[0.3, 1.1, 0.2], &[0.7, 0.4], &[33.0, 200.0])
            .unwrap();
        let rho = DensityMatrix::basis(4, 0).unwrap();
        let out = evolve_state(&seq, &rho, &sys, None).unwrap();
        assert!((trace(out.matrix()) - re(1.0)).norm() < 1e-10);
        let u = sequence_unitary(&seq, &sys, None).unwrap();
        assert!(unitarity_error(&u) < 1e-10);

        let identity_seq = PulseSequence::new(0.5, 0.0, vec![]).unwrap();
        let same = evolve_state(&identity_seq, &rho, &sys, None).unwrap();
        assert!(max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);
        assert!(evolve_state(&seq, &DensityMatrix::basis(2, 0).unwrap(), &sys, None).is_err());
    }

    #[test]
    fn concat_merges_boundary_delay() {
        let sys = ControlSystem::two_qubit(&NVParams::default(), &PAPER_COUPLINGS[0]).unwrap();
        let a = PulseSequence::from_columns(0.5, &[0.3, 1.1], &[0.7], &[33.0]).unwrap();
        let b = PulseSequence::from_columns(0.5, &[0.4, 0.9], &[0.2], &[120.0]).unwrap();
        let ab = a.concat(&b);
        assert_eq!(ab.n_pulses(), 2);
        let lhs = sequence_unitary(&ab, &sys, None).unwrap();
        let rhs = sequence_unitary(&b, &sys, None).unwrap() * sequence_unitary(&a, &sys, None).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
        assert!((sequence_duration(&ab) - sequence_duration(&a) - sequence_duration(&b)).abs() < 1e-12);
    }
}
