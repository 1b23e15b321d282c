//! State-level simulations: search populations, ¹⁴N leakage, error budget,
//! and the prepared initial state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::CatalogEntry;
use crate::pulse::{evolve_state, ControlSystem, DensityMatrix, PulseSequence};
use crate::spinsys::{diag_real, re, NVParams, Operator};
use crate::targets::grover_circuit_unitary;
use crate::{Error, Result};

/// Populations of |00⟩, |01⟩, |10⟩, |11⟩ after running a two-qubit entry on |00⟩⟨00|.
pub fn simulate_search_populations(entry: &CatalogEntry, params: &NVParams) -> Result<[f64; 4]> {
    if entry.n_qubits() != 2 {
        return Err(Error::InvalidArgument(format!(
            "{} acts on {} qubits, search populations need 2",
            entry.name,
            entry.n_qubits()
        )));
    }
    let sys = entry.system(params)?;
    let rho = evolve_state(&entry.sequence, &DensityMatrix::basis(4, 0)?, &sys, None)?;
    let p = rho.populations()?;
    Ok([p[0], p[1], p[2], p[3]])
}

/// Same populations for the exact one-iteration Grover circuit.
pub fn ideal_search_populations(target_index: usize) -> Result<[f64; 4]> {
    let u = grover_circuit_unitary(2, target_index, 1, true)?;
    let p: Vec<f64> = u.column(0).iter().map(|a| a.norm_sqr()).collect();
    Ok([p[0], p[1], p[2], p[3]])
}

/// ¹⁴N populations of `m_N = 1, 0, −1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NitrogenState {
    pub c1: f64,
    pub c0: f64,
    pub cm1: f64,
}

impl NitrogenState {
    pub fn new(c1: f64, c0: f64, cm1: f64) -> Result<Self> {
        let w = [c1, c0, cm1];
        if w.iter().any(|x| !(0.0..=1.0).contains(x)) || (c1 + c0 + cm1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "nitrogen weights {w:?} must lie in [0, 1] and sum to 1"
            )));
        }
        Ok(Self { c1, c0, cm1 })
    }

    /// Weights after optical pumping: 4/7, 2/7, 1/7.
    pub fn thermal() -> Self {
        Self {
            c1: 4.0 / 7.0,
            c0: 2.0 / 7.0,
            cm1: 1.0 / 7.0,
        }
    }

    /// `(p, (1−p)/2, (1−p)/2)`.
    pub fn from_polarization(p: f64) -> Result<Self> {
        let rest = 0.5 * (1.0 - p);
        Self::new(p, rest, rest)
    }

    pub fn weights(&self) -> [f64; 3] {
        [self.c1, self.c0, self.cm1]
    }
}

/// Population driven into `|m_S=−1, m_N=0⟩` and `|m_S=−1, m_N=−1⟩`, starting from
/// `|0⟩⟨0|_e ⊗ diag(c₁, c₀, c₋₁)`.
pub fn nitrogen_leakage(seq: &PulseSequence, state: &NitrogenState, params: &NVParams) -> Result<f64> {
    let sys = ControlSystem::nitrogen_leakage(params)?;
    let [c1, c0, cm1] = state.weights();
    let rho0 = DensityMatrix::new(diag_real(&[c1, c0, cm1, 0.0, 0.0, 0.0]))?;
    let p = evolve_state(seq, &rho0, &sys, None)?.populations()?;
    Ok(p[4] + p[5])
}

/// `(p_N, L_p)` over a grid inside `[1/3, 1]`.
pub fn polarization_sweep(seq: &PulseSequence, grid: &[f64], params: &NVParams) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty polarization grid".into()));
    }
    if let Some(p) = grid
        .iter()
        .find(|p| !(1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(*p))
    {
        return Err(Error::InvalidArgument(format!(
            "polarization {p} outside [1/3, 1]"
        )));
    }
    grid.iter()
        .map(|&p| {
            let p = p.clamp(1.0 / 3.0, 1.0);
            Ok((p, nitrogen_leakage(seq, &NitrogenState::from_polarization(p)?, params)?))
        })
        .collect()
}

/// `Re Tr(ρ_a ρ_b)`.
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    // Tr(AB) = Σ_ij A_ij B_ji
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            t += ma[(i, j)] * mb[(j, i)];
        }
    }
    Ok(t.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub f_ini: f64,
    pub f_search: f64,
    pub f1: f64,
    pub f2: f64,
    /// Residual factor `f_search / (f1·f2)`.
    pub f3: f64,
}

pub fn error_budget(f_ini: f64, f_search: f64, f1: f64, f2: f64) -> Result<ErrorBudget> {
    if f1 * f2 == 0.0 || !(f1 * f2).is_finite() {
        return Err(Error::InvalidArgument(format!(
            "error budget needs nonzero f1·f2, got {f1}·{f2}"
        )));
    }
    Ok(ErrorBudget {
        f_ini,
        f_search,
        f1,
        f2,
        f3: f_search / (f1 * f2),
    })
}

/// `|0⟩⟨0|_e ⊗ [p|0⟩⟨0| + (1−p)|1⟩⟨1| + c(|0⟩⟨1| + |1⟩⟨0|)]`.
pub fn initial_state_model(p: f64, c: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) || !c.is_finite() {
        return Err(Error::InvalidState(format!("p = {p}, c = {c}")));
    }
    if c * c > p * (1.0 - p) + 1e-12 {
        return Err(Error::InvalidState(format!(
            "c = {c} too large for p = {p}: state would not be positive"
        )));
    }
    let mut m = Operator::zeros(4, 4);
    m[(0, 0)] = re(p);
    m[(1, 1)] = re(1.0 - p);
    m[(0, 1)] = re(c);
    m[(1, 0)] = re(c);
    DensityMatrix::new(m)
}

/// `⟨2I_z⟩` of the carbon in a two-qubit state.
pub fn carbon_polarization(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let p = rho.populations()?;
    Ok(p[0] - p[1] + p[2] - p[3])
}
