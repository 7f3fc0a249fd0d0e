//! Physical presets: the two-level oscillator, the two-qubit Heisenberg
//! dimer with its Bell basis, resource quantization, and the Cu(II) acetate
//! complex with its unit conversions.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianOperator, StateVector};
use crate::protocol::ZermeloProblem;

/// Two-level truncation of the harmonic ladder. Absolute energies are kept
/// (the quantization rule depends on the zero-point term through
/// `eps_f = 3 omega / 2`).
#[derive(Debug, Clone, Copy)]
pub struct OscillatorPreset {
    pub omega: f64,
}

impl OscillatorPreset {
    pub fn new(omega: f64) -> Self {
        Self { omega }
    }

    /// Energy of the target (first excited) level, `3 omega / 2`.
    pub fn eps_f(&self) -> f64 {
        1.5 * self.omega
    }
}

/// Ground-to-excited transition of the truncated oscillator:
/// `H0 = diag(omega/2, 3 omega/2)`, `psi_i = |0>`, `psi_f = |1>`.
pub fn oscillator_problem(omega: f64, k: f64) -> Result<ZermeloProblem> {
    let h0 = HermitianOperator::from_real_diagonal(&[0.5 * omega, 1.5 * omega]);
    ZermeloProblem::new(
        h0,
        StateVector::basis_state(2, 0),
        StateVector::basis_state(2, 1),
        k,
    )
}

/// The resource quantization rule `k_n = eps_f^2 / (2 (n + 1/2)^2)`.
///
/// Only non-negative `n` are enumerated; negative integers duplicate the same
/// `k` values through `(n + 1/2)^2`. `n = 0` gives the maximum `k = 2 eps_f^2`.
pub fn quantized_k(eps_f: f64, n: u32) -> Result<f64> {
    if eps_f == 0.0 {
        return Err(Error::ZeroTargetEnergy);
    }
    let half = n as f64 + 0.5;
    Ok(eps_f * eps_f / (2.0 * half * half))
}

/// Anisotropic couplings of the two-qubit Heisenberg dimer, in the Pauli
/// matrix convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    pub j_x: f64,
    pub j_y: f64,
    pub j_z: f64,
}

impl DimerParams {
    pub fn j_plus(&self) -> f64 {
        self.j_x + self.j_y
    }

    pub fn j_minus(&self) -> f64 {
        self.j_x - self.j_y
    }

    /// Energy of the `|Phi_->` target state, `-J_z + J_-`.
    pub fn eps_f(&self) -> f64 {
        -self.j_z + self.j_minus()
    }

    /// The Zeeman field strength `B_0+ = J_z - J_-` selected by the maximum
    /// realizable resource bound.
    pub fn b0_plus(&self) -> f64 {
        self.j_z - self.j_minus()
    }
}

/// Dimer background Hamiltonian `-sum_j J_j sigma_j x sigma_j` in the
/// computational basis: diagonal `(-J_z, J_z, J_z, -J_z)` with `-J_-`
/// couplings on the outer anti-diagonal and `-J_+` on the inner one.
pub fn dimer_h0(params: &DimerParams) -> HermitianOperator {
    let jz = params.j_z;
    let jm = params.j_minus();
    let jp = params.j_plus();
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let m = CMatrix::from_row_slice(4, 4, &[
        r(-jz), z, z, r(-jm),
        z, r(jz), r(-jp), z,
        z, r(-jp), r(jz), z,
        r(-jm), z, z, r(-jz),
    ]);
    HermitianOperator::new_unchecked(m)
}

/// The four maximally entangled Bell states
/// `(Phi_+, Phi_-, PhiBar_+, PhiBar_-)`, mutually orthonormal eigenvectors
/// of the dimer Hamiltonian.
pub fn bell_states() -> [StateVector; 4] {
    let s = 1.0 / 2f64.sqrt();
    let mk = |entries: [f64; 4]| {
        StateVector::new_unchecked(CVector::from_iterator(
            4,
            entries.iter().map(|&x| C64::new(x * s, 0.0)),
        ))
    };
    [
        mk([1.0, 0.0, 0.0, 1.0]),
        mk([1.0, 0.0, 0.0, -1.0]),
        mk([0.0, 1.0, 1.0, 0.0]),
        mk([0.0, 1.0, -1.0, 0.0]),
    ]
}

/// Bell swap: steer `|Phi_+>` into `|Phi_->` against the dimer drift.
pub fn bell_swap_problem(params: &DimerParams, k: f64) -> Result<ZermeloProblem> {
    let [phi_plus, phi_minus, _, _] = bell_states();
    ZermeloProblem::new(dimer_h0(params), phi_plus, phi_minus, k)
}

/// Index into the single-qubit Pauli basis `{I, x, y, z}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

pub const PAULI_AXES: [PauliAxis; 4] = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

/// The 2x2 Pauli matrix for an axis.
pub fn pauli_matrix(axis: PauliAxis) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match axis {
        PauliAxis::I => CMatrix::identity(2, 2),
        PauliAxis::X => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        PauliAxis::Y => CMatrix::from_row_slice(2, 2, &[
            z,
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            z,
        ]),
        PauliAxis::Z => {
            let mut m = CMatrix::identity(2, 2);
            m[(1, 1)] = -one;
            m
        }
    }
}

/// `sigma_a (x) sigma_b` on two qubits.
pub fn pauli_product(a: PauliAxis, b: PauliAxis) -> CMatrix {
    pauli_matrix(a).kronecker(&pauli_matrix(b))
}

/// Real coefficients of a 4x4 Hermitian operator over the 16 two-qubit Pauli
/// products, indexed `[first axis][second axis]` in `{I, x, y, z}` order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition {
    pub coefficients: [[f64; 4]; 4],
}

impl PauliDecomposition {
    pub fn coefficient(&self, a: PauliAxis, b: PauliAxis) -> f64 {
        self.coefficients[a as usize][b as usize]
    }

    /// `sum_ab c_ab sigma_a (x) sigma_b`.
    pub fn reconstruct(&self) -> HermitianOperator {
        let mut m = CMatrix::zeros(4, 4);
        for a in PAULI_AXES {
            for b in PAULI_AXES {
                let c = self.coefficient(a, b);
                if c != 0.0 {
                    m += pauli_product(a, b) * C64::new(c, 0.0);
                }
            }
        }
        HermitianOperator::new_unchecked(m)
    }
}

/// Projects a 4x4 Hermitian operator onto the Pauli product basis:
/// `c_ab = tr(h sigma_a (x) sigma_b) / 4`.
pub fn pauli_decompose(h: &HermitianOperator) -> Result<PauliDecomposition> {
    if h.dim() != 4 {
        return Err(Error::DimensionMismatch { left: h.dim(), right: 4 });
    }
    let mut coefficients = [[0.0; 4]; 4];
    for a in PAULI_AXES {
        for b in PAULI_AXES {
            let basis = pauli_product(a, b);
            let tr = crate::linalg::trace_product(h.matrix(), &basis)?;
            coefficients[a as usize][b as usize] = tr.re / 4.0;
        }
    }
    Ok(PauliDecomposition { coefficients })
}

/// Verdict on whether a resource bound yields a laboratory-implementable
/// Zeeman control.
#[derive(Debug, Clone, Copy)]
pub struct Realizability {
    pub realizable: bool,
    /// Closest quantization index `n` in `k = eps_f^2 / (2 (n + 1/2)^2)`.
    pub nearest_n: u32,
    /// `|cos(eps_f pi / sqrt(2k))|`; zero exactly at quantized `k`.
    pub deviation: f64,
}

/// Default absolute tolerance on `|cos|` for the realizability test.
pub const ZEEMAN_TOL: f64 = 1e-9;

/// Checks whether the control collapses to a pure Zeeman coupling:
/// realizable iff `cos(eps_f pi / sqrt(2k)) = 0` within `tol`, which happens
/// exactly at the quantized `k` values.
pub fn zeeman_realizability(eps_f: f64, k: f64, tol: f64) -> Result<Realizability> {
    if eps_f == 0.0 {
        return Err(Error::ZeroTargetEnergy);
    }
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::NonPositiveResource { k });
    }
    let angle = eps_f.abs() * std::f64::consts::PI / (2.0 * k).sqrt();
    let deviation = angle.cos().abs();
    // angle = (n + 1/2) pi at quantized k.
    let n_real = angle / std::f64::consts::PI - 0.5;
    let nearest_n = n_real.round().max(0.0) as u32;
    Ok(Realizability { realizable: deviation <= tol, nearest_n, deviation })
}

/// One row of the resource quantization table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationRow {
    pub n: u32,
    pub k: f64,
    pub delta_t: f64,
}

/// Quantized resource bounds with their minimum control times,
/// `delta_t_n = pi / sqrt(2 k_n) = (n + 1/2) pi / |eps_f|`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationTable {
    pub eps_f: f64,
    pub rows: Vec<QuantizationRow>,
}

impl QuantizationTable {
    pub fn new(eps_f: f64, n_max: u32) -> Result<Self> {
        let mut rows = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            let k = quantized_k(eps_f, n)?;
            let delta_t = std::f64::consts::PI / (2.0 * k).sqrt();
            rows.push(QuantizationRow { n, k, delta_t });
        }
        Ok(Self { eps_f, rows })
    }
}

/// Speed of light in cm/s (exact).
pub const SPEED_OF_LIGHT_CM_PER_S: f64 = 2.99792458e10;

/// Conversions between spectroscopic wavenumbers and natural time units.
///
/// Core computations use natural units in which energies carry cm^-1 and
/// times carry cm; seconds appear only in reports.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalUnits {
    pub c_cm_per_s: f64,
}

impl Default for PhysicalUnits {
    fn default() -> Self {
        Self { c_cm_per_s: SPEED_OF_LIGHT_CM_PER_S }
    }
}

impl PhysicalUnits {
    /// `omega = 2 pi c nu_tilde`, rad/s from cm^-1.
    pub fn wavenumber_to_angular_frequency(&self, wavenumber: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.c_cm_per_s * wavenumber
    }

    pub fn angular_frequency_to_wavenumber(&self, omega: f64) -> f64 {
        omega / (2.0 * std::f64::consts::PI * self.c_cm_per_s)
    }

    /// Converts a time in natural units (inverse wavenumber) to seconds.
    pub fn natural_time_to_seconds(&self, t_natural: f64) -> f64 {
        t_natural / (2.0 * std::f64::consts::PI * self.c_cm_per_s)
    }

    pub fn seconds_to_natural_time(&self, t_seconds: f64) -> f64 {
        t_seconds * 2.0 * std::f64::consts::PI * self.c_cm_per_s
    }
}

/// The Cu(II) acetate monohydrate dimer preset.
#[derive(Debug, Clone)]
pub struct CuAcetatePreset {
    /// Experimental couplings in cm^-1, spin-operator convention `(x, y, z)`.
    pub raw_couplings_cm: [f64; 3],
    /// `g_z` component of the g tensor.
    pub g_z: f64,
    /// Couplings in the Pauli convention (experimental values divided by -4),
    /// still carrying cm^-1.
    pub params: DimerParams,
    pub units: PhysicalUnits,
    /// Literature figure for the minimum control time, in picoseconds.
    pub expected_delta_t_ps: f64,
}

impl CuAcetatePreset {
    /// Minimum control time `pi / (2 |eps_f|)` at the maximum realizable
    /// resource bound, converted to picoseconds.
    pub fn minimum_control_time_ps(&self) -> f64 {
        let eps_f = self.params.eps_f().abs();
        let dt_natural = std::f64::consts::PI / (2.0 * eps_f);
        self.units.natural_time_to_seconds(dt_natural) * 1e12
    }

    /// Maximum Zeeman-realizable resource bound `2 eps_f^2`, in cm^-2.
    pub fn k_max(&self) -> f64 {
        let eps_f = self.params.eps_f();
        2.0 * eps_f * eps_f
    }
}

/// Experimental parameters of copper(II) acetate monohydrate, converted from
/// the spin-operator convention to the Pauli convention by dividing the
/// couplings by -4.
pub fn cu_acetate_preset() -> CuAcetatePreset {
    let raw = [297.793, 297.753, 298.453];
    CuAcetatePreset {
        raw_couplings_cm: raw,
        g_z: 2.43,
        params: DimerParams {
            j_x: raw[0] / -4.0,
            j_y: raw[1] / -4.0,
            j_z: raw[2] / -4.0,
        },
        units: PhysicalUnits::default(),
        expected_delta_t_ps: 0.2,
    }
}

/// The dimer Hamiltonian written in the Bell basis: a 2x2 block over
/// `{Phi_+, Phi_-}` coupled by a field `b` plus the diagonal tail. Used for
/// regression against the printed block form.
pub fn dimer_zermelo_block_matrix(params: &DimerParams, b: f64) -> DMatrix<f64> {
    let jz = params.j_z;
    let jm = params.j_minus();
    let jp = params.j_plus();
    DMatrix::from_row_slice(4, 4, &[
        -(jz + jm), b, 0.0, 0.0,
        b, -(jz - jm), 0.0, 0.0,
        0.0, 0.0, jz - jp, 0.0,
        0.0, 0.0, 0.0, jz + jp,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, outer};
    use crate::protocol::{solve, SolverSettings};
    use rand::{Rng, SeedableRng};

    #[test]
    fn oscillator_minimum_time() {
        let k = 4.5; // = 2 eps_f^2 at omega = 1
        let p = oscillator_problem(1.0, k).unwrap();
        let sol = solve(&p, &SolverSettings::default()).unwrap();
        let expected = std::f64::consts::PI / (2.0 * k).sqrt();
        assert!((sol.delta_t - expected).abs() < 1e-12);
        // pi / (2 * 1.5) = pi / 3 at the maximum quantized k.
        assert!((sol.delta_t - std::f64::consts::PI / 3.0).abs() < 1e-12);
        let eig = sol.hc_initial.eigendecompose();
        let s = (k / 2.0).sqrt();
        assert!((eig.eigenvalues[0] + s).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - s).abs() < 1e-12);
    }

    #[test]
    fn quantized_k_values() {
        assert!((quantized_k(1.5, 0).unwrap() - 4.5).abs() < 1e-14);
        assert!((quantized_k(1.5, 1).unwrap() - 0.5).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for n in 0..40 {
            let k = quantized_k(1.5, n).unwrap();
            assert!(k < prev && k > 0.0);
            prev = k;
        }
        assert!(matches!(quantized_k(0.0, 0), Err(Error::ZeroTargetEnergy)));
    }

    #[test]
    fn dimer_h0_zero_and_eigensystem() {
        let zero = dimer_h0(&DimerParams { j_x: 0.0, j_y: 0.0, j_z: 0.0 });
        assert_eq!(zero.trace_squared(), 0.0);

        let params = DimerParams { j_x: 1.0, j_y: 0.5, j_z: 2.0 };
        let h0 = dimer_h0(&params);
        let eig = h0.eigendecompose();
        let jz = params.j_z;
        let jm = params.j_minus();
        let jp = params.j_plus();
        let mut expected = [-(jz + jm), -(jz - jm), jz - jp, jz + jp];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }

        // The lowest branch -(J_z + J_-) is |Phi_+>.
        let [phi_plus, ..] = bell_states();
        let ground = StateVector::new_unchecked(
            eig.eigenvectors.matrix().column(0).into_owned(),
        );
        assert!((ground.fidelity(&phi_plus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_states_orthonormal() {
        let states = bell_states();
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let g = a.inner(b).unwrap();
                assert!((g.re - expected[i][j]).abs() < 1e-14);
                assert!(g.im.abs() < 1e-14);
            }
        }
        assert!((states[0].amplitudes()[0].re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((states[0].amplitudes()[3].re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bell_outer_product_pauli_identity() {
        // |Phi_+><Phi_-| = (1/4)(sigma_z x I + I x sigma_z)
        //                  - (i/4)(sigma_x x sigma_y + sigma_y x sigma_x)
        let [phi_plus, phi_minus, _, _] = bell_states();
        let lhs = outer(&phi_plus, &phi_minus).unwrap();
        let zi = pauli_product(PauliAxis::Z, PauliAxis::I);
        let iz = pauli_product(PauliAxis::I, PauliAxis::Z);
        let xy = pauli_product(PauliAxis::X, PauliAxis::Y);
        let yx = pauli_product(PauliAxis::Y, PauliAxis::X);
        let rhs = (zi + iz) * C64::new(0.25, 0.0) + (xy + yx) * C64::new(0.0, -0.25);
        assert!(max_abs(&(lhs - rhs)) < 1e-14);
    }

    #[test]
    fn bell_swap_zeeman_control_at_max_k() {
        let params = DimerParams { j_x: 1.0, j_y: 0.5, j_z: 2.0 };
        let b0 = params.b0_plus();
        let k = 2.0 * b0 * b0;
        let p = bell_swap_problem(&params, k).unwrap();
        let sol = solve(&p, &SolverSettings::default()).unwrap();
        assert!((sol.delta_t - std::f64::consts::PI / (2.0 * k).sqrt()).abs() < 1e-12);

        let zi = pauli_product(PauliAxis::Z, PauliAxis::I);
        let iz = pauli_product(PauliAxis::I, PauliAxis::Z);
        let expected = (zi + iz) * C64::new(b0 / 2.0, 0.0);
        assert!(max_abs(&(sol.hc_initial.matrix() - expected)) < 1e-10);
    }

    #[test]
    fn bell_swap_zermelo_eigenvalues() {
        let params = DimerParams { j_x: 1.0, j_y: 0.5, j_z: 2.0 };
        let b0 = params.b0_plus();
        let k = 2.0 * b0 * b0;
        let p = bell_swap_problem(&params, k).unwrap();
        let sol = solve(&p, &SolverSettings::default()).unwrap();
        let hz = HermitianOperator::new(
            p.h0().matrix() + sol.hc_initial.matrix(),
        )
        .unwrap();
        let eig = hz.eigendecompose();
        let alpha = -params.j_minus() / b0;
        let beta = (alpha * alpha + 1.0).sqrt();
        let mut expected = [
            -params.j_z - b0 * beta,
            -params.j_z + b0 * beta,
            params.j_z - params.j_plus(),
            params.j_z + params.j_plus(),
        ];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn pauli_decompose_round_trip() {
        let zi = HermitianOperator::new(pauli_product(PauliAxis::Z, PauliAxis::I)).unwrap();
        let d = pauli_decompose(&zi).unwrap();
        for a in PAULI_AXES {
            for b in PAULI_AXES {
                let want = if (a, b) == (PauliAxis::Z, PauliAxis::I) { 1.0 } else { 0.0 };
                assert!((d.coefficient(a, b) - want).abs() < 1e-14);
            }
        }

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let raw = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = HermitianOperator::new((&raw + raw.adjoint()) * C64::new(0.5, 0.0)).unwrap();
        let d = pauli_decompose(&h).unwrap();
        assert!(max_abs(&(d.reconstruct().matrix() - h.matrix())) < 1e-12);
    }

    #[test]
    fn control_pauli_weights_off_quantization() {
        // Away from quantized k both the Zeeman and the cross terms appear,
        // with weights set by the phase angle eps_f * pi / sqrt(2k).
        let params = DimerParams { j_x: 1.0, j_y: 0.5, j_z: 2.0 };
        let k = 3.3;
        let p = bell_swap_problem(&params, k).unwrap();
        let sol = solve(&p, &SolverSettings::default()).unwrap();
        let d = pauli_decompose(&sol.hc_initial).unwrap();
        let eps_f = params.eps_f();
        let angle = eps_f * std::f64::consts::PI / (2.0 * k).sqrt();
        let half_speed = 0.5 * (k / 2.0).sqrt();
        // Zeeman weight -sin, cross weight -cos (from the outer-product
        // expansion of the control in the Bell pair).
        let want_z = -half_speed * angle.sin();
        let want_cross = -half_speed * angle.cos();
        assert!((d.coefficient(PauliAxis::Z, PauliAxis::I) - want_z).abs() < 1e-10);
        assert!((d.coefficient(PauliAxis::I, PauliAxis::Z) - want_z).abs() < 1e-10);
        assert!((d.coefficient(PauliAxis::X, PauliAxis::Y) - want_cross).abs() < 1e-10);
        assert!((d.coefficient(PauliAxis::Y, PauliAxis::X) - want_cross).abs() < 1e-10);
        // Everything else vanishes.
        for a in PAULI_AXES {
            for b in PAULI_AXES {
                let named = matches!(
                    (a, b),
                    (PauliAxis::Z, PauliAxis::I)
                        | (PauliAxis::I, PauliAxis::Z)
                        | (PauliAxis::X, PauliAxis::Y)
                        | (PauliAxis::Y, PauliAxis::X)
                );
                if !named {
                    assert!(d.coefficient(a, b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn realizability_detection() {
        let eps_f = 1.5;
        let r = zeeman_realizability(eps_f, 2.0 * eps_f * eps_f, ZEEMAN_TOL).unwrap();
        assert!(r.realizable);
        assert_eq!(r.nearest_n, 0);
        assert!(r.deviation < 1e-12);

        let r = zeeman_realizability(eps_f, eps_f * eps_f, ZEEMAN_TOL).unwrap();
        assert!(!r.realizable);
    }

    #[test]
    fn realizability_routes_agree() {
        // The cosine test and the Pauli cross-coefficient test must agree on
        // random k values.
        let params = DimerParams { j_x: 1.0, j_y: 0.5, j_z: 2.0 };
        let eps_f = params.eps_f();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let tol = 1e-9;
        for _ in 0..100 {
            let k = rng.gen_range(0.2..30.0);
            let cosine = zeeman_realizability(eps_f, k, tol).unwrap();
            let p = bell_swap_problem(&params, k).unwrap();
            let sol = solve(&p, &SolverSettings::default()).unwrap();
            let d = pauli_decompose(&sol.hc_initial).unwrap();
            let cross = d
                .coefficient(PauliAxis::X, PauliAxis::Y)
                .abs()
                .max(d.coefficient(PauliAxis::Y, PauliAxis::X).abs());
            // Normalize the Pauli route to the same |cos| scale.
            let cross_cos = cross / (0.5 * (k / 2.0).sqrt());
            assert!(
                (cross_cos - cosine.deviation).abs() < 1e-8,
                "k = {k}: {cross_cos} vs {}",
                cosine.deviation
            );
            assert_eq!(cosine.realizable, cross_cos <= tol + 1e-8);
        }
    }

    #[test]
    fn quantization_table_structure() {
        let table = QuantizationTable::new(1.5, 4).unwrap();
        assert_eq!(table.rows.len(), 5);
        assert!((table.rows[0].k - 4.5).abs() < 1e-14);
        for w in table.rows.windows(2) {
            assert!(w[1].k < w[0].k);
            assert!(w[1].delta_t > w[0].delta_t);
        }
        // k (n + 1/2)^2 is constant = eps_f^2 / 2 across rows.
        for row in &table.rows {
            let half = row.n as f64 + 0.5;
            assert!((row.k * half * half - 1.5 * 1.5 / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quantized_rows_are_zeeman_realizable() {
        let params = DimerParams { j_x: 0.9, j_y: 0.4, j_z: 1.7 };
        let eps_f = params.eps_f();
        let table = QuantizationTable::new(eps_f, 3).unwrap();
        for row in &table.rows {
            let p = bell_swap_problem(&params, row.k).unwrap();
            let sol = solve(&p, &SolverSettings::default()).unwrap();
            let d = pauli_decompose(&sol.hc_initial).unwrap();
            assert!(d.coefficient(PauliAxis::X, PauliAxis::Y).abs() < 1e-9);
            assert!(d.coefficient(PauliAxis::Y, PauliAxis::X).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_round_trip() {
        let units = PhysicalUnits::default();
        let nu = 298.453;
        let back = units.angular_frequency_to_wavenumber(
            units.wavenumber_to_angular_frequency(nu),
        );
        assert!(((back - nu) / nu).abs() < 1e-14);
        let t = 1.3e-13;
        let back = units.natural_time_to_seconds(units.seconds_to_natural_time(t));
        assert!(((back - t) / t).abs() < 1e-14);
    }

    #[test]
    fn cu_acetate_parameters_and_time() {
        let preset = cu_acetate_preset();
        // J_- = 0.040 cm^-1 in the raw spin convention.
        let raw_jm = preset.raw_couplings_cm[0] - preset.raw_couplings_cm[1];
        assert!((raw_jm - 0.040).abs() < 1e-12);
        assert!((preset.params.j_minus() - raw_jm / -4.0).abs() < 1e-12);

        let dt_ps = preset.minimum_control_time_ps();
        assert!(
            (0.1..=0.4).contains(&dt_ps),
            "minimum control time {dt_ps} ps out of band"
        );
        assert!(preset.k_max() > 0.0);
    }

    #[test]
    fn dimer_bell_block_structure() {
        // Off-diagonal blocks between the {Phi+, Phi-} and {PhiBar+, PhiBar-}
        // subspaces vanish exactly.
        let params = DimerParams { j_x: 0.3, j_y: -0.2, j_z: 1.1 };
        let h0 = dimer_h0(&params);
        let states = bell_states();
        for i in 0..2 {
            for j in 2..4 {
                let hv = h0.matrix() * states[j].amplitudes();
                let elem = states[i].amplitudes().dotc(&hv);
                assert_eq!(elem, C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn block_matrix_regression() {
        // H0 + Hc(t_i) in the Bell basis equals the printed block matrix.
        let params = DimerParams { j_x: 1.0, j_y: 0.5, j_z: 2.0 };
        let b0 = params.b0_plus();
        let k = 2.0 * b0 * b0;
        let p = bell_swap_problem(&params, k).unwrap();
        let sol = solve(&p, &SolverSettings::default()).unwrap();
        let hz = p.h0().matrix() + sol.hc_initial.matrix();

        let states = bell_states();
        let mut bell_basis = CMatrix::zeros(4, 4);
        for (j, s) in states.iter().enumerate() {
            bell_basis.set_column(j, s.amplitudes());
        }
        let in_bell = bell_basis.adjoint() * hz * &bell_basis;
        let block = dimer_zermelo_block_matrix(&params, b0);
        for i in 0..4 {
            for j in 0..4 {
                let want = C64::new(block[(i, j)], 0.0);
                assert!((in_bell[(i, j)] - want).norm() < 1e-10);
            }
        }
    }
}
