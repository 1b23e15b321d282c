//! Free-induction-decay ESR spectra of one electron doublet.
//!
//! The electron, the ¹⁴N and one ¹³C are simulated with the full lab
//! Hamiltonian restricted to `m_S ∈ {0, ±1}`, in a frame rotating at the bare
//! doublet frequency `D ∓ γ_e·B`. Two ideal π/2 rotations separated by `τ`
//! (the second with phase `2π·ν_d·τ`) map the accumulated coherence onto the
//! `m_S = 0` population, which is recorded, apodized and Fourier transformed.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::lab::NitrogenState;
use crate::spinsys::{build_full_lab_hamiltonian, identity, re, CarbonCoupling, HermitianEigen, NVParams, Operator};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    /// `m_S = 0 ↔ −1`
    Minus,
    /// `m_S = 0 ↔ +1`
    Plus,
}

impl Transition {
    pub fn m_s(self) -> i32 {
        match self {
            Transition::Minus => -1,
            Transition::Plus => 1,
        }
    }

    /// Bare doublet frequency `D·m² − γ_e·B·m`, MHz.
    pub fn carrier_mhz(self, params: &NVParams) -> f64 {
        let m = self.m_s() as f64;
        params.d * m * m - params.gamma_e * params.b * m
    }

    /// Index of the electron level in the spin-1 basis `(+1, 0, −1)`.
    fn electron_index(self) -> usize {
        match self {
            Transition::Minus => 2,
            Transition::Plus => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub nu_d_mhz: f64,
    pub dwell_us: f64,
    pub n_points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            nu_d_mhz: 5.0,
            dwell_us: 0.05,
            n_points: 8192,
        }
    }
}

impl SpectrumConfig {
    pub const MIN_POINTS: usize = 256;
    pub const MAX_POINTS: usize = 1 << 20;

    pub fn validate(&self) -> Result<()> {
        let n = self.n_points;
        if !n.is_power_of_two() || !(Self::MIN_POINTS..=Self::MAX_POINTS).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "n_points must be a power of two in [{}, {}], got {n}",
                Self::MIN_POINTS,
                Self::MAX_POINTS
            )));
        }
        if !(self.dwell_us.is_finite() && self.dwell_us > 0.0) {
            return Err(Error::InvalidArgument(format!("dwell must be > 0, got {}", self.dwell_us)));
        }
        if !self.nu_d_mhz.is_finite() {
            return Err(Error::InvalidArgument("nu_d must be finite".into()));
        }
        Ok(())
    }

    pub fn bin_width_mhz(&self) -> f64 {
        1.0 / (self.n_points as f64 * self.dwell_us)
    }
}

/// Rotating-frame Hamiltonian on `{m_S=0, m_S=±1} ⊗ ¹⁴N ⊗ ¹³C` (12×12).
pub fn doublet_hamiltonian(params: &NVParams, c: &CarbonCoupling, transition: Transition) -> Result<Operator> {
    let lab = build_full_lab_hamiltonian(params, c)?;
    let levels = [1usize, transition.electron_index()];
    let idx: Vec<usize> = levels
        .iter()
        .flat_map(|&e| (0..6).map(move |k| 6 * e + k))
        .collect();
    let mut h = Operator::from_fn(12, 12, |i, j| lab[(idx[i], idx[j])]);
    let f = transition.carrier_mhz(params);
    for k in 6..12 {
        h[(k, k)] -= re(f);
    }
    Ok(h)
}

/// Hard π/2 rotation of the doublet pseudo-spin about `cos φ·x + sin φ·y`.
fn half_pi(phase_rad: f64) -> Operator {
    let (s, c) = (FRAC_PI_4.sin(), FRAC_PI_4.cos());
    let off = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, -phase_rad);
    let r = Operator::from_row_slice(2, 2, &[re(c), off, -off.conj(), re(c)]);
    r.kronecker(&identity(6))
}

fn initial_state(n: &NitrogenState) -> Operator {
    let w = n.weights();
    let mut rho = Operator::zeros(12, 12);
    for k in 0..6 {
        rho[(k, k)] = re(0.5 * w[k / 2]);
    }
    rho
}

/// `m_S = 0` population after `(π/2)₀ – τ – (π/2)_{2πν_d τ}` at `τ = k·dwell`.
pub fn fid_signal(
    params: &NVParams,
    c: &CarbonCoupling,
    transition: Transition,
    cfg: &SpectrumConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let eig = HermitianEigen::new(&doublet_hamiltonian(params, c, transition)?)?;
    let p1 = half_pi(0.0);
    let rho1 = &p1 * initial_state(&NitrogenState::thermal()) * p1.adjoint();
    // Evolve in the eigenbasis, where free precession is elementwise.
    let v = &eig.vectors;
    let rho1e = v.adjoint() * rho1 * v;
    let mut out = Vec::with_capacity(cfg.n_points);
    for k in 0..cfg.n_points {
        let tau = k as f64 * cfg.dwell_us;
        let ph: Vec<Complex64> = eig
            .values
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -TAU * e * tau))
            .collect();
        let rho_t = Operator::from_fn(12, 12, |a, b| rho1e[(a, b)] * ph[a] * ph[b].conj());
        let rho2 = v * rho_t * v.adjoint();
        let p2 = half_pi(TAU * cfg.nu_d_mhz * tau);
        let rho3 = &p2 * rho2 * p2.adjoint();
        out.push((0..6).map(|i| rho3[(i, i)].re).sum());
    }
    Ok(out)
}

/// `(frequency MHz, amplitude)` over the non-negative frequency bins.
pub fn fid_spectrum(
    params: &NVParams,
    c: &CarbonCoupling,
    transition: Transition,
    cfg: &SpectrumConfig,
) -> Result<Vec<(f64, f64)>> {
    let signal = fid_signal(params, c, transition, cfg)?;
    Ok(magnitude_spectrum(&signal, cfg.dwell_us))
}

/// Mean-subtracted, exponentially apodized (time constant half the record) FFT magnitude.
pub fn magnitude_spectrum(signal: &[f64], dwell_us: f64) -> Vec<(f64, f64)> {
    let n = signal.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let t_apod = 0.5 * n as f64 * dwell_us;
    let mut buf: Vec<Complex64> = signal
        .iter()
        .enumerate()
        .map(|(k, &s)| re((s - mean) * (-(k as f64) * dwell_us / t_apod).exp()))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * dwell_us);
    buf[..=n / 2]
        .iter()
        .enumerate()
        .map(|(k, z)| (k as f64 * df, z.norm()))
        .collect()
}

/// Local maxima at or above `rel_threshold` times the largest amplitude.
pub fn find_peaks(spectrum: &[(f64, f64)], rel_threshold: f64) -> Vec<(f64, f64)> {
    let max = spectrum.iter().map(|p| p.1).fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    spectrum
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1 && w[1].1 >= rel_threshold * max)
        .map(|w| w[1])
        .collect()
}

/// A line expected from eigenvalue differences of [`doublet_hamiltonian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedLine {
    pub frequency_mhz: f64,
    /// Relative intensity: ¹⁴N weight times the squared nuclear-state overlap.
    pub weight: f64,
}

/// Lines at `|ν_d − (E_b − E_a)|` for `a` in `m_S = 0` and `b` in the other level.
pub fn predicted_lines(
    params: &NVParams,
    c: &CarbonCoupling,
    transition: Transition,
    nu_d_mhz: f64,
) -> Result<Vec<PredictedLine>> {
    let eig = HermitianEigen::new(&doublet_hamiltonian(params, c, transition)?)?;
    let w = NitrogenState::thermal().weights();
    let v = &eig.vectors;
    let sector = |j: usize| -> bool { (6..12).map(|k| v[(k, j)].norm_sqr()).sum::<f64>() > 0.5 };
    let mut lines = Vec::new();
    for a in (0..12).filter(|&j| !sector(j)) {
        let n_weight: f64 = (0..6).map(|k| v[(k, a)].norm_sqr() * w[k / 2]).sum();
        for b in (0..12).filter(|&j| sector(j)) {
            let overlap: Complex64 = (0..6).map(|k| v[(k, a)].conj() * v[(6 + k, b)]).sum();
            let weight = n_weight * overlap.norm_sqr();
            if weight > 1e-9 {
                lines.push(PredictedLine {
                    frequency_mhz: (nu_d_mhz - (eig.values[b] - eig.values[a])).abs(),
                    weight,
                });
            }
        }
    }
    lines.sort_by(|x, y| x.frequency_mhz.total_cmp(&y.frequency_mhz));
    Ok(lines)
}
