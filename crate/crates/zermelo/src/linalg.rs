//! Dense complex linear algebra for small Hermitian systems.
//!
//! Everything in this crate runs on dense matrices of dimension at most a few
//! tens, so all operator exponentials go through an exact Hermitian
//! eigendecomposition rather than series or scaling-and-squaring. That keeps
//! the resulting evolution operators unitary by construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Absolute entrywise tolerance for the Hermiticity invariant `A = A^dag`.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Absolute entrywise tolerance for the unitarity invariant `U^dag U = I`.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Absolute tolerance on the unit norm of a state vector.
pub const STATE_NORM_TOL: f64 = 1e-12;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest entry magnitude of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of a matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

/// A dense complex square matrix with the Hermiticity invariant `A = A^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates and wraps a matrix. The deviation reported on rejection is
    /// the largest entry of `A - A^dag`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let deviation = max_abs(&(&matrix - matrix.adjoint()));
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    /// Wraps without validating. Caller guarantees Hermiticity.
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        debug_assert!(max_abs(&(&matrix - matrix.adjoint())) < 1e-8);
        Self { matrix }
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: CMatrix::zeros(dim, dim) }
    }

    /// Builds a diagonal operator from real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut matrix = CMatrix::zeros(dim, dim);
        for (i, &d) in diag.iter().enumerate() {
            matrix[(i, i)] = C64::new(d, 0.0);
        }
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Real trace of the operator.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(A^2)`, real and non-negative for Hermitian `A`.
    pub fn trace_squared(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Expectation value `<psi|A|psi>`, real for Hermitian `A`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let a_psi = &self.matrix * psi.amplitudes();
        psi.amplitudes().dotc(&a_psi).re
    }

    pub fn eigendecompose(&self) -> EigenDecomposition {
        hermitian_eigendecompose(self)
    }
}

/// A dense complex square matrix with the unitarity invariant `U^dag U = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let dim = matrix.nrows();
        let gram = matrix.adjoint() * &matrix;
        let deviation = max_abs(&(gram - CMatrix::identity(dim, dim)));
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self * other`; the product of unitaries stays unitary.
    pub fn compose(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_same_dim(self.dim(), psi.dim())?;
        Ok(StateVector::new_unchecked(&self.matrix * psi.amplitudes()))
    }
}

/// A normalized complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = (amplitudes.norm() - 1.0).abs();
        if deviation > STATE_NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn new_unchecked(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        Ok(Self { amplitudes: amplitudes / C64::new(norm, 0.0) })
    }

    /// The computational basis state `|index>` in the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Transition probability `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// Eigenvalues sorted ascending with the matching eigenvector columns.
///
/// The phase of each eigenvector is fixed so that its largest-magnitude
/// component is real and positive, which makes the decomposition
/// deterministic for regression tests.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: UnitaryOperator,
}

impl EigenDecomposition {
    /// `V diag(lambda) V^dag`, for round-trip checks.
    pub fn reconstruct(&self) -> CMatrix {
        let v = self.eigenvectors.matrix();
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        ));
        v * diag * v.adjoint()
    }
}

/// Eigendecomposition of a Hermitian operator with ascending eigenvalues and
/// deterministic eigenvector phases.
pub fn hermitian_eigendecompose(a: &HermitianOperator) -> EigenDecomposition {
    let dim = a.dim();
    let m = faer::Mat::from_fn(dim, dim, |i, j| {
        let z = a.matrix()[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let se = m
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigendecomposition of a finite Hermitian matrix");
    let raw_values: Vec<f64> = (0..dim).map(|i| se.S()[i].re).collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| raw_values[i].partial_cmp(&raw_values[j]).unwrap());

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut vectors = CMatrix::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(raw_values[src]);
        let mut v = CVector::from_fn(dim, |i, _| {
            let z = se.U()[(i, src)];
            C64::new(z.re, z.im)
        });
        // Phase convention: largest-magnitude component real-positive,
        // lowest index winning near-ties.
        let mut best = 0;
        let mut best_mag = 0.0;
        for (i, z) in v.iter().enumerate() {
            let mag = z.norm();
            if mag > best_mag + 1e-12 {
                best_mag = mag;
                best = i;
            }
        }
        let pivot = v[best];
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / C64::new(pivot.norm(), 0.0);
            v *= phase;
        }
        vectors.set_column(col, &v);
    }
    EigenDecomposition {
        eigenvalues,
        eigenvectors: UnitaryOperator::new_unchecked(vectors),
    }
}

/// Sign of the phase in the operator exponential `exp(sign * i * H * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

/// `exp(sign * i * h * t)` via the spectral form `V diag(e^{sign i lambda t}) V^dag`.
pub fn unitary_exp(h: &HermitianOperator, t: f64, sign: Sign) -> UnitaryOperator {
    let eig = hermitian_eigendecompose(h);
    let s = sign.factor();
    let dim = h.dim();
    let phases = CMatrix::from_diagonal(&CVector::from_iterator(
        dim,
        eig.eigenvalues.iter().map(|&l| C64::new(0.0, s * l * t).exp()),
    ));
    let v = eig.eigenvectors.matrix();
    UnitaryOperator::new_unchecked(v * phases * v.adjoint())
}

/// The forward evolution operator `exp(-i h t)`.
pub fn evolution_operator(h: &HermitianOperator, t: f64) -> UnitaryOperator {
    unitary_exp(h, t, Sign::Negative)
}

/// `[a, b] = ab - ba`; anti-Hermitian for Hermitian inputs.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<CMatrix> {
    check_same_dim(a.dim(), b.dim())?;
    Ok(a.matrix() * b.matrix() - b.matrix() * a.matrix())
}

/// `tr(ab)` without forming the product; real when both are Hermitian.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    check_same_dim(a.nrows(), b.nrows())?;
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// The outer product `|u><v|`.
pub fn outer(u: &StateVector, v: &StateVector) -> Result<CMatrix> {
    check_same_dim(u.dim(), v.dim())?;
    Ok(u.amplitudes() * v.amplitudes().adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn pauli_x() -> HermitianOperator {
        HermitianOperator::new(CMatrix::from_row_slice(2, 2, &[
            C64::new(0.0, 0.0), C64::new(1.0, 0.0),
            C64::new(1.0, 0.0), C64::new(0.0, 0.0),
        ]))
        .unwrap()
    }

    pub(crate) fn pauli_y() -> HermitianOperator {
        HermitianOperator::new(CMatrix::from_row_slice(2, 2, &[
            C64::new(0.0, 0.0), C64::new(0.0, -1.0),
            C64::new(0.0, 1.0), C64::new(0.0, 0.0),
        ]))
        .unwrap()
    }

    pub(crate) fn pauli_z() -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&[1.0, -1.0])
    }

    fn random_hermitian(dim: usize, rng: &mut impl rand::Rng) -> HermitianOperator {
        let raw = CMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        HermitianOperator::new(herm).unwrap()
    }

    #[test]
    fn zero_matrix_eigendecomposition() {
        let z = HermitianOperator::zero(2);
        let eig = z.eigendecompose();
        assert_eq!(eig.eigenvalues, vec![0.0, 0.0]);
        let id = CMatrix::identity(2, 2);
        assert!(max_abs(&(eig.eigenvectors.matrix() - id)) < 1e-14);
    }

    #[test]
    fn pauli_z_eigenvalues() {
        let eig = pauli_z().eigendecompose();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dimer_h0_eigenvalues_match_spectral_form() {
        // (J_x, J_y, J_z) = (1.0, 0.5, 2.0): spectrum {-2.5, -1.5, 0.5, 3.5}.
        let h0 = crate::models::dimer_h0(&crate::models::DimerParams {
            j_x: 1.0,
            j_y: 0.5,
            j_z: 2.0,
        });
        let eig = h0.eigendecompose();
        let expected = [-2.5, -1.5, 0.5, 3.5];
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn non_hermitian_rejected_with_diagnostic() {
        let m = CMatrix::from_row_slice(2, 2, &[
            C64::new(0.0, 0.0), C64::new(1.0, 0.0),
            C64::new(0.0, 0.0), C64::new(0.0, 0.0),
        ]);
        match HermitianOperator::new(m) {
            Err(Error::NotHermitian { deviation }) => assert!((deviation - 1.0).abs() < 1e-14),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = unitary_exp(&HermitianOperator::zero(3), 2.7, Sign::Negative);
        assert!(max_abs(&(u.matrix() - CMatrix::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn exp_pauli_z_at_pi_is_minus_identity() {
        let u = unitary_exp(&pauli_z(), std::f64::consts::PI, Sign::Negative);
        let minus_id = CMatrix::identity(2, 2) * C64::new(-1.0, 0.0);
        assert!(max_abs(&(u.matrix() - minus_id)) < 1e-12);
    }

    #[test]
    fn exp_matches_taylor_series_oracle() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(4, &mut rng);
        let t = 0.7;
        // Taylor series of exp(-i h t), summed to machine convergence.
        let a = h.matrix() * C64::new(0.0, -t);
        let mut term = CMatrix::identity(4, 4);
        let mut sum = term.clone();
        for n in 1..50 {
            term = &term * &a / C64::new(n as f64, 0.0);
            sum += &term;
        }
        let u = unitary_exp(&h, t, Sign::Negative);
        assert!(max_abs(&(u.matrix() - sum)) < 1e-12);
    }

    #[test]
    fn exp_inverse_and_group_property() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for dim in [2, 4, 8] {
            let h = random_hermitian(dim, &mut rng);
            let id = CMatrix::identity(dim, dim);
            let fwd = unitary_exp(&h, 0.9, Sign::Negative);
            let bwd = unitary_exp(&h, 0.9, Sign::Positive);
            assert!(max_abs(&(fwd.matrix() * bwd.matrix() - &id)) < 1e-10);

            let whole = unitary_exp(&h, 1.3, Sign::Negative);
            let split = unitary_exp(&h, 0.8, Sign::Negative)
                .compose(&unitary_exp(&h, 0.5, Sign::Negative))
                .unwrap();
            assert!(max_abs(&(whole.matrix() - split.matrix())) < 1e-10);
        }
    }

    #[test]
    fn eigendecomposition_round_trip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..1000 {
            let dim = 2 + trial % 15;
            let h = random_hermitian(dim, &mut rng);
            let eig = h.eigendecompose();
            assert!(max_abs(&(eig.reconstruct() - h.matrix())) < 1e-10);
            assert!(UnitaryOperator::new(eig.eigenvectors.matrix().clone()).is_ok());
            for w in eig.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn eigenvector_residual() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(6, &mut rng);
        let eig = h.eigendecompose();
        for (idx, &l) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.matrix().column(idx).into_owned();
            let res = h.matrix() * &v - &v * C64::new(l, 0.0);
            assert!(res.norm() < 1e-10);
        }
    }

    #[test]
    fn pauli_commutators() {
        let zero = commutator(&pauli_x(), &pauli_x()).unwrap();
        assert!(max_abs(&zero) < 1e-14);

        let c = commutator(&pauli_x(), &pauli_y()).unwrap();
        let two_i_z = pauli_z().matrix() * C64::new(0.0, 2.0);
        assert!(max_abs(&(c - two_i_z)) < 1e-14);
    }

    #[test]
    fn commutator_is_anti_hermitian() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(5, &mut rng);
        let b = random_hermitian(5, &mut rng);
        let c = commutator(&a, &b).unwrap();
        assert!(max_abs(&(c.adjoint() + &c)) < 1e-13);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let a = HermitianOperator::zero(2);
        let b = HermitianOperator::zero(3);
        assert!(matches!(commutator(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn trace_products() {
        let id2 = CMatrix::identity(2, 2);
        assert!((trace_product(&id2, &id2).unwrap().re - 2.0).abs() < 1e-14);
        let z = pauli_z();
        assert!((trace_product(z.matrix(), z.matrix()).unwrap().re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn outer_product_basic_and_projector() {
        let e0 = StateVector::basis_state(2, 0);
        let e1 = StateVector::basis_state(2, 1);
        let m = outer(&e0, &e1).unwrap();
        assert!((m[(0, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(max_abs(&m) <= 1.0 + 1e-15);

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let raw = CVector::from_fn(4, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let u = StateVector::normalized(raw).unwrap();
        let p = outer(&u, &u).unwrap();
        assert!(max_abs(&(&p * &p - &p)) < 1e-12);
    }

    #[test]
    fn state_normalization_enforced() {
        let v = CVector::from_element(2, C64::new(1.0, 0.0));
        assert!(matches!(StateVector::new(v), Err(Error::NotNormalized { .. })));
    }
}
