//! Spin operators and Hamiltonians of the NV register.
//!
//! Units: every Hamiltonian is stored in cyclic frequency (MHz), time is in
//! microseconds, and [`hermitian_propagator`] supplies the factor 2π, so
//! `U = exp(-i·2π·H·t)`.
//!
//! Basis conventions:
//!
//! * spin-1 operators are ordered `m = +1, 0, -1`;
//! * spin-1/2 operators are ordered `↑, ↓`;
//! * the electron pseudo-spin (the `{m_S = 0, m_S = -1}` doublet) is the most
//!   significant qubit, with computational `|0⟩ = m_S = 0` carrying
//!   `s_z = +1/2`;
//! * carbons follow in coupling-list order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense complex square matrix, row/column indices in the basis order above.
pub type Operator = DMatrix<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-9;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I1: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(dim: usize) -> Operator {
    Operator::identity(dim, dim)
}

pub fn diag_real(values: &[f64]) -> Operator {
    let n = values.len();
    let mut m = Operator::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = re(v);
    }
    m
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |H - H†|` entrywise.
pub fn hermiticity_error(h: &Operator) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(h, &h.adjoint())
}

/// `max |U†U - I|` entrywise.
pub fn unitarity_error(u: &Operator) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn trace(m: &Operator) -> Complex64 {
    m.diagonal().iter().sum()
}

fn ensure_square(m: &Operator) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Half,
    One,
}

/// Cartesian angular-momentum matrices (ħ = 1).
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub x: Operator,
    pub y: Operator,
    pub z: Operator,
}

pub fn spin_operators(spin: Spin) -> SpinOperators {
    match spin {
        Spin::Half => SpinOperators {
            x: Operator::from_row_slice(2, 2, &[C0, re(0.5), re(0.5), C0]),
            y: Operator::from_row_slice(2, 2, &[C0, -0.5 * I1, 0.5 * I1, C0]),
            z: diag_real(&[0.5, -0.5]),
        },
        Spin::One => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let a = re(s);
            let b = Complex64::new(0.0, s);
            SpinOperators {
                x: Operator::from_row_slice(3, 3, &[C0, a, C0, a, C0, a, C0, a, C0]),
                y: Operator::from_row_slice(3, 3, &[C0, -b, C0, b, C0, -b, C0, b, C0]),
                z: diag_real(&[1.0, 0.0, -1.0]),
            }
        }
    }
}

/// Kronecker product of `factors` in listed order (first factor is most significant).
pub fn tensor_embed(factors: &[Operator]) -> Result<Operator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor_embed needs at least one factor".into()))?;
    ensure_square(first)?;
    let mut acc = first.clone();
    for f in rest {
        ensure_square(f)?;
        acc = acc.kronecker(f);
    }
    Ok(acc)
}

/// Places `op` (2×2) at qubit `pos` of an `n_qubits` register of spin-1/2 factors.
pub(crate) fn embed_qubit(op: &Operator, pos: usize, n_qubits: usize) -> Operator {
    debug_assert!(pos < n_qubits);
    let left = 1usize << pos;
    let right = 1usize << (n_qubits - pos - 1);
    identity(left).kronecker(op).kronecker(&identity(right))
}

/// Physical constants of the NV center. Frequencies in MHz, field in mT,
/// gyromagnetic ratios in MHz/mT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NVParams {
    /// Zero-field splitting.
    pub d: f64,
    pub b: f64,
    /// Secular ¹⁴N hyperfine coupling.
    pub a_n: f64,
    /// ¹⁴N quadrupole coupling.
    pub p: f64,
    pub gamma_e: f64,
    pub gamma_n: f64,
    pub gamma_c: f64,
}

impl Default for NVParams {
    fn default() -> Self {
        Self {
            d: 2870.0,
            b: 14.8,
            a_n: -2.16,
            p: -4.95,
            // CODATA values, MHz/T → MHz/mT.
            gamma_e: -28_024.951_4e-3,
            gamma_n: 3.0766e-3,
            gamma_c: 10.7084e-3,
        }
    }
}

impl NVParams {
    /// ¹³C Larmor frequency `γ_C·B`.
    pub fn nu_c(&self) -> f64 {
        self.gamma_c * self.b
    }
}

/// Secular-plus-pseudosecular hyperfine components of one ¹³C (MHz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonCoupling {
    pub a_zz: f64,
    pub a_zx: f64,
}

impl CarbonCoupling {
    pub const fn new(a_zz: f64, a_zx: f64) -> Self {
        Self { a_zz, a_zx }
    }

    fn check(&self) -> Result<()> {
        if self.a_zz.is_finite() && self.a_zx.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("non-finite coupling {self:?}")))
        }
    }
}

/// The four ¹³C sites used for the multi-qubit simulations; the first is the
/// carbon of the two-qubit experiments.
pub const PAPER_COUPLINGS: [CarbonCoupling; 4] = [
    CarbonCoupling::new(-0.152, 0.110),
    CarbonCoupling::new(-0.198, 0.328),
    CarbonCoupling::new(-0.228, 0.164),
    CarbonCoupling::new(-0.304, 0.274),
];

/// Rotating-frame Hamiltonian of the electron doublet and one ¹³C (4×4, MHz).
///
/// `(-ν_C - A_zz/2) I_z + A_zz s_z I_z + A_zx s_z I_x - (A_zx/2) I_x`
pub fn build_two_qubit_hamiltonian(params: &NVParams, c: &CarbonCoupling) -> Result<Operator> {
    build_multi_carbon_hamiltonian(params, std::slice::from_ref(c))
}

pub const MAX_CARBONS: usize = 8;

/// Electron doublet plus `couplings.len()` carbons, dim `2^(n+1)`.
pub fn build_multi_carbon_hamiltonian(
    params: &NVParams,
    couplings: &[CarbonCoupling],
) -> Result<Operator> {
    let n = couplings.len();
    if n == 0 || n > MAX_CARBONS {
        return Err(Error::InvalidArgument(format!(
            "carbon count must be in 1..={MAX_CARBONS}, got {n}"
        )));
    }
    let nq = n + 1;
    let half = spin_operators(Spin::Half);
    let nu_c = params.nu_c();
    let s_z = embed_qubit(&half.z, 0, nq);
    let dim = 1usize << nq;
    let mut h = Operator::zeros(dim, dim);
    for (j, c) in couplings.iter().enumerate() {
        c.check()?;
        let iz = embed_qubit(&half.z, j + 1, nq);
        let ix = embed_qubit(&half.x, j + 1, nq);
        h += &iz * re(-nu_c - c.a_zz / 2.0);
        h += (&s_z * &iz) * re(c.a_zz);
        h += (&s_z * &ix) * re(c.a_zx);
        h -= &ix * re(c.a_zx / 2.0);
    }
    Ok(h)
}

/// Electron (spin 1) ⊗ ¹⁴N (spin 1) ⊗ ¹³C (spin 1/2) Hamiltonian in the lab frame, 18×18.
pub fn build_full_lab_hamiltonian(params: &NVParams, c: &CarbonCoupling) -> Result<Operator> {
    c.check()?;
    let one = spin_operators(Spin::One);
    let half = spin_operators(Spin::Half);
    let i3 = identity(3);
    let i2 = identity(2);
    let k = |a: &Operator, b: &Operator, cc: &Operator| a.kronecker(b).kronecker(cc);

    let sz = k(&one.z, &i3, &i2);
    let nz = k(&i3, &one.z, &i2);
    let cz = k(&i3, &i3, &half.z);
    let cx = k(&i3, &i3, &half.x);

    let b = params.b;
    let mut h = (&sz * &sz) * re(params.d);
    h -= &sz * re(params.gamma_e * b);
    h += (&nz * &nz) * re(params.p);
    h -= &nz * re(params.gamma_n * b);
    h -= &cz * re(params.gamma_c * b);
    h += (&sz * &nz) * re(params.a_n);
    h += (&sz * &cz) * re(c.a_zz);
    h += (&sz * &cx) * re(c.a_zx);
    Ok(h)
}

/// ¹⁴N projection quantum numbers in basis order.
pub const NITROGEN_LEVELS: [i32; 3] = [1, 0, -1];

/// Detuning of the `m_S = 0 ↔ -1` line for nitrogen level `m_n`, relative to the
/// `m_N = 1` line that the microwave carrier addresses.
pub fn nitrogen_detuning(params: &NVParams, m_n: i32) -> f64 {
    -params.a_n * (1.0 - m_n as f64)
}

/// Free Hamiltonian and drive operators `(s_x ⊗ I₃, s_y ⊗ I₃)` of the 6-dim
/// electron-doublet ⊗ ¹⁴N model. Basis `{m_S=0, -1} ⊗ {m_N = 1, 0, -1}`.
pub fn nitrogen_leakage_operators(params: &NVParams) -> (Operator, Operator, Operator) {
    let half = spin_operators(Spin::Half);
    let mut free = Operator::zeros(6, 6);
    for (i, &m_n) in NITROGEN_LEVELS.iter().enumerate() {
        let mut proj = Operator::zeros(3, 3);
        proj[(i, i)] = C1;
        free += half.z.kronecker(&proj) * re(nitrogen_detuning(params, m_n));
    }
    let i3 = identity(3);
    (free, half.x.kronecker(&i3), half.y.kronecker(&i3))
}

/// `(H_free, H_drive)` of the ¹⁴N leakage model for one microwave pulse.
pub fn build_nitrogen_leakage_hamiltonians(
    params: &NVParams,
    rabi: f64,
    phase_deg: f64,
) -> Result<(Operator, Operator)> {
    if !(rabi > 0.0 && rabi.is_finite()) {
        return Err(Error::InvalidArgument(format!("rabi must be > 0, got {rabi}")));
    }
    let (free, dx, dy) = nitrogen_leakage_operators(params);
    let phi = phase_deg.to_radians();
    let drive = (dx * re(phi.cos()) + dy * re(phi.sin())) * re(rabi);
    Ok((free, drive))
}

/// Tilt (degrees) of the ¹³C quantization axis from z when the electron is in
/// `m_S = -1` (`theta_minus`) and `m_S = +1` (`theta_plus`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationAngles {
    pub theta_minus: f64,
    pub theta_plus: f64,
}

/// `θ± = arctan[A_zx / (A_zz ∓ ν_C)]`.
///
/// `theta_minus` is folded onto `[0°, 180°)`; `theta_plus` is the principal
/// arctangent in `(-90°, 90°]`.
pub fn quantization_angles(c: &CarbonCoupling, nu_c: f64) -> Result<QuantizationAngles> {
    c.check()?;
    let den_minus = c.a_zz + nu_c;
    let den_plus = c.a_zz - nu_c;
    if c.a_zx == 0.0 && (den_minus == 0.0 || den_plus == 0.0) {
        return Err(Error::InvalidArgument(
            "degenerate quantization axis (0/0)".into(),
        ));
    }
    let mut theta_minus = c.a_zx.atan2(den_minus).to_degrees();
    if theta_minus < 0.0 {
        theta_minus += 180.0;
    }
    if theta_minus >= 180.0 {
        theta_minus -= 180.0;
    }
    let theta_plus = if den_plus == 0.0 {
        90.0
    } else {
        let t = (c.a_zx / den_plus).atan().to_degrees();
        if t <= -90.0 {
            t + 180.0
        } else {
            t
        }
    };
    Ok(QuantizationAngles {
        theta_minus,
        theta_plus,
    })
}

/// `R_y(θ) = exp(-iθ I_y)` for spin 1/2, θ in radians.
pub fn rotation_y(theta: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    Operator::from_row_slice(2, 2, &[re(c), re(-s), re(s), re(c)])
}

/// `|1⟩⟨1|⊗R_y(θ₊) + |0⟩⟨0|⊗E + |-1⟩⟨-1|⊗R_y(θ₋)` on electron(spin 1) ⊗ ¹³C, 6×6.
pub fn diagonalizing_transform(theta_plus_deg: f64, theta_minus_deg: f64) -> Operator {
    let blocks = [
        rotation_y(theta_plus_deg.to_radians()),
        identity(2),
        rotation_y(theta_minus_deg.to_radians()),
    ];
    let mut u = Operator::zeros(6, 6);
    for (k, b) in blocks.iter().enumerate() {
        u.view_mut((2 * k, 2 * k), (2, 2)).copy_from(b);
    }
    u
}

/// Eigendecomposition of a Hermitian operator, reusable for propagators at many times.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl HermitianEigen {
    pub fn new(h: &Operator) -> Result<Self> {
        ensure_square(h)?;
        let err = hermiticity_error(h);
        if err > HERMITIAN_TOL {
            return Err(Error::NotHermitian(err));
        }
        // Symmetrize so round-off in the input does not leak into the eigenvectors.
        let sym = (h + h.adjoint()) * re(0.5);
        let eig = nalgebra::SymmetricEigen::new(sym);
        Ok(Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    /// `exp(-i·2π·H·t)`.
    pub fn propagator(&self, t_us: f64) -> Operator {
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -std::f64::consts::TAU * e * t_us);
            for v in scaled.column_mut(j).iter_mut() {
                *v *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `U = exp(-i·2π·H·t)` for `H` in MHz and `t` in μs.
pub fn hermitian_propagator(h: &Operator, t_us: f64) -> Result<Operator> {
    Ok(HermitianEigen::new(h)?.propagator(t_us))
}
