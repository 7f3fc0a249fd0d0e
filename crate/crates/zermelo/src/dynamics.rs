//! Time propagation along the solved trajectory and the diagnostics that
//! certify it: an independent fixed-step integrator, the coadjoint motion of
//! the control, the travel-time (Finsler) norm closure, and the
//! non-adiabaticity report.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, frobenius, hermitian_eigendecompose, unitary_exp, CMatrix, CVector,
    HermitianOperator, Sign, StateVector,
};
use crate::protocol::{control_unitary, ZermeloProblem, ZermeloSolution};

/// Uniform sampling grid. `n_steps` counts intervals, so a grid yields
/// `n_steps + 1` samples including both endpoints.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() || t_end <= t_start || n_steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "bad time grid: [{t_start}, {t_end}] with {n_steps} steps"
            )));
        }
        Ok(Self { t_start, t_end, n_steps })
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (0..=self.n_steps).map(move |i| self.t_start + i as f64 * h)
    }
}

/// One point of a propagated trajectory with its instantaneous diagnostics.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub t: f64,
    /// Full-picture state `|psi(t)> = U(t) |psi_i>`.
    pub psi: StateVector,
    /// Interaction-picture state `|psi'(t)> = U0^dag(t) |psi(t)>`.
    pub psi_prime: StateVector,
    /// Rotated control `Hc(t) = U0(t) Hc(t_i) U0^dag(t)`.
    pub hc_t: HermitianOperator,
    pub fidelity_to_target: f64,
    pub trace_hc_sq: f64,
    pub variance_hc: f64,
}

/// `Hc(t) = e^{-i H0 t} Hc(t_i) e^{i H0 t}`; isospectral with `Hc(t_i)`.
pub fn control_hamiltonian_at(
    h0: &HermitianOperator,
    hc_initial: &HermitianOperator,
    t: f64,
) -> HermitianOperator {
    let u0 = unitary_exp(h0, t, Sign::Negative);
    let m = u0.matrix() * hc_initial.matrix() * u0.matrix().adjoint();
    HermitianOperator::new_unchecked(m)
}

/// Rotates the control through the background eigenframe; amortizes the
/// eigendecomposition of `H0` over many evaluation times.
struct ControlRotator {
    eigenvalues: Vec<f64>,
    vectors: CMatrix,
    hc_in_frame: CMatrix,
}

impl ControlRotator {
    fn new(h0: &HermitianOperator, hc_initial: &HermitianOperator) -> Self {
        let eig = hermitian_eigendecompose(h0);
        let vectors = eig.eigenvectors.matrix().clone();
        let hc_in_frame = vectors.adjoint() * hc_initial.matrix() * &vectors;
        Self { eigenvalues: eig.eigenvalues, vectors, hc_in_frame }
    }

    fn at(&self, t: f64) -> HermitianOperator {
        let n = self.eigenvalues.len();
        let mut rotated = self.hc_in_frame.clone();
        for i in 0..n {
            for j in 0..n {
                let phase = C64::new(0.0, -(self.eigenvalues[i] - self.eigenvalues[j]) * t).exp();
                rotated[(i, j)] *= phase;
            }
        }
        HermitianOperator::new_unchecked(&self.vectors * rotated * self.vectors.adjoint())
    }

    /// `U0^dag(t) v` through the same cached eigenframe.
    fn free_backward(&self, t: f64, v: &CVector) -> CVector {
        let coeff = self.vectors.adjoint() * v;
        let mut out = CVector::zeros(v.len());
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            out += self.vectors.column(j) * (coeff[j] * C64::new(0.0, l * t).exp());
        }
        out
    }
}

fn sample_from_state(
    p: &ZermeloProblem,
    sol: &ZermeloSolution,
    rotator: &ControlRotator,
    t: f64,
    psi: StateVector,
) -> TrajectorySample {
    let psi_prime = StateVector::new_unchecked(rotator.free_backward(t, psi.amplitudes()));
    let hc_t = rotator.at(t);
    let fidelity_to_target = p.psi_f().inner(&psi).map(|z| z.norm_sqr()).unwrap_or(0.0);
    let trace_hc_sq = hc_t.trace_squared();
    let hc = &sol.hc_initial;
    let mean = hc.expectation(&psi_prime);
    let hc_psi = hc.matrix() * psi_prime.amplitudes();
    let mean_sq = hc_psi.norm_squared();
    TrajectorySample {
        t,
        psi,
        psi_prime,
        hc_t,
        fidelity_to_target,
        trace_hc_sq,
        variance_hc: mean_sq - mean * mean,
    }
}

/// Closed-form propagation `U(t) = U0(t) Uc(t)` sampled over the grid.
pub fn propagate_analytic(
    p: &ZermeloProblem,
    sol: &ZermeloSolution,
    grid: &TimeGrid,
) -> Vec<TrajectorySample> {
    let rotator = ControlRotator::new(p.h0(), &sol.hc_initial);
    grid.times()
        .map(|t| {
            let uc = control_unitary(&sol.hc_initial, t);
            let psi_prime = uc.apply(p.psi_i()).expect("dims match");
            // psi = U0(t) psi'; reuse the eigenframe with the sign flipped.
            let psi = StateVector::new_unchecked(
                rotator.free_backward(-t, psi_prime.amplitudes()),
            );
            sample_from_state(p, sol, &rotator, t, psi)
        })
        .collect()
}

/// Independent oracle: integrates `i dpsi/dt = [H0 + Hc(t)] psi` with the
/// classical fixed-step fourth-order one-step method, sampling at every grid
/// point. Errors out if the state norm drifts by more than 1e-6.
pub fn propagate_ode(
    p: &ZermeloProblem,
    sol: &ZermeloSolution,
    grid: &TimeGrid,
) -> Result<Vec<TrajectorySample>> {
    let rotator = ControlRotator::new(p.h0(), &sol.hc_initial);
    let h = grid.step();
    let rhs = |t: f64, psi: &CVector| -> CVector {
        let ham = p.h0().matrix() + rotator.at(t).matrix();
        (ham * psi) * C64::new(0.0, -1.0)
    };

    let mut psi = p.psi_i().amplitudes().clone();
    let mut samples = Vec::with_capacity(grid.n_steps + 1);
    for (i, t) in grid.times().enumerate() {
        let drift = (psi.norm() - 1.0).abs();
        if drift > 1e-6 {
            return Err(Error::NormDrift { drift });
        }
        samples.push(sample_from_state(
            p,
            sol,
            &rotator,
            t,
            StateVector::new_unchecked(psi.clone()),
        ));
        if i == grid.n_steps {
            break;
        }
        let k1 = rhs(t, &psi);
        let k2 = rhs(t + 0.5 * h, &(&psi + &k1 * C64::new(0.5 * h, 0.0)));
        let k3 = rhs(t + 0.5 * h, &(&psi + &k2 * C64::new(0.5 * h, 0.0)));
        let k4 = rhs(t + h, &(&psi + &k3 * C64::new(h, 0.0)));
        psi += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
            * C64::new(h / 6.0, 0.0);
    }
    Ok(samples)
}

/// Residual of the coadjoint motion `dHc/dt = -i [H0, Hc(t)]`, estimated by a
/// central finite difference of step `fd_step`. Second-order small in the
/// step for a correct trajectory.
pub fn coadjoint_residual(
    h0: &HermitianOperator,
    hc_initial: &HermitianOperator,
    t: f64,
    fd_step: f64,
) -> f64 {
    let plus = control_hamiltonian_at(h0, hc_initial, t + fd_step);
    let minus = control_hamiltonian_at(h0, hc_initial, t - fd_step);
    let derivative = (plus.matrix() - minus.matrix()) / C64::new(2.0 * fd_step, 0.0);
    let comm = commutator(h0, &control_hamiltonian_at(h0, hc_initial, t))
        .expect("equal dims by construction");
    frobenius(&(derivative + comm * C64::new(0.0, 1.0)))
}

/// The generator `X(s) = i (dU/ds) U^dag` of the rescaled evolution, with
/// `s = (t - t_i) / delta_t`. Hermitian because `U` is unitary.
#[derive(Debug, Clone)]
pub struct XOperator {
    matrix: CMatrix,
}

impl XOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let deviation = crate::linalg::max_abs(&(&matrix - matrix.adjoint()));
        if deviation > 1e-8 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    /// Builds `X(s) = delta_t * [H0 + Hc(t(s))]` directly from a solved
    /// trajectory.
    pub fn from_trajectory(
        h0: &HermitianOperator,
        hc_initial: &HermitianOperator,
        delta_t: f64,
        t: f64,
    ) -> Self {
        let hc_t = control_hamiltonian_at(h0, hc_initial, t);
        let m = (h0.matrix() + hc_t.matrix()) * C64::new(delta_t, 0.0);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// The travel-time norm
/// `[-tr(X H0) + sqrt(tr(X H0)^2 + (k - tr(H0^2)) tr(X^2))] / (k - tr(H0^2))`.
///
/// Evaluated on the solved trajectory it recovers `delta_t`. Singular when
/// `k = tr(H0^2)`; the limit is not implemented.
pub fn finsler_delta_t(x: &XOperator, h0: &HermitianOperator, k: f64) -> Result<f64> {
    let tr_h0_sq = h0.trace_squared();
    let denom = k - tr_h0_sq;
    if denom.abs() < 1e-12 {
        return Err(Error::SingularDenominator);
    }
    let tr_xh0 = crate::linalg::trace_product(x.matrix(), h0.matrix())?.re;
    let tr_xx = crate::linalg::trace_product(x.matrix(), x.matrix())?.re;
    Ok((-tr_xh0 + (tr_xh0 * tr_xh0 + denom * tr_xx).sqrt()) / denom)
}

/// Per-eigenbranch population history of the full Hamiltonian
/// `H(t) = H0 + Hc(t)` along the trajectory.
#[derive(Debug, Clone)]
pub struct AdiabaticityReport {
    pub times: Vec<f64>,
    /// `populations[branch][sample] = |<psi(t)|phi_branch(t)>|^2`.
    pub populations: Vec<Vec<f64>>,
    /// Largest absolute finite-difference slope of any population.
    pub max_rate: f64,
    /// Largest eigenvalue change of any branch over the grid; the spectrum
    /// of `H(t)` is constant, so this is a numerical-consistency check.
    pub eigenvalue_drift: f64,
    /// Sample indices where two branch overlaps were within 1e-6 of each
    /// other, so branch continuity is not guaranteed there.
    pub flagged_samples: Vec<usize>,
}

/// Tracks instantaneous eigenbranches of `H(t)` by greedy maximum-overlap
/// assignment against the previous grid point and reports how the state
/// populations move across them.
pub fn adiabaticity_report(
    p: &ZermeloProblem,
    sol: &ZermeloSolution,
    grid: &TimeGrid,
) -> AdiabaticityReport {
    let dim = p.dim();
    let rotator = ControlRotator::new(p.h0(), &sol.hc_initial);
    let samples = propagate_analytic(p, sol, grid);

    let mut times = Vec::with_capacity(samples.len());
    let mut populations = vec![Vec::with_capacity(samples.len()); dim];
    let mut flagged_samples = Vec::new();
    let mut reference_eigenvalues: Option<Vec<f64>> = None;
    let mut eigenvalue_drift: f64 = 0.0;
    let mut prev_vectors: Option<CMatrix> = None;

    for (idx, sample) in samples.iter().enumerate() {
        let ham = HermitianOperator::new_unchecked(
            p.h0().matrix() + rotator.at(sample.t).matrix(),
        );
        let eig = ham.eigendecompose();
        let vectors = eig.eigenvectors.matrix().clone();

        // Map instantaneous branches onto the previous ordering.
        let mut order: Vec<usize> = (0..dim).collect();
        if let Some(prev) = &prev_vectors {
            let mut assigned = vec![false; dim];
            let mut ambiguous = false;
            order.clear();
            for prev_col in 0..dim {
                let mut best = None;
                let mut best_overlap = -1.0;
                let mut second = -1.0;
                for (new_col, taken) in assigned.iter().enumerate() {
                    if *taken {
                        continue;
                    }
                    let overlap = prev
                        .column(prev_col)
                        .dotc(&vectors.column(new_col))
                        .norm();
                    if overlap > best_overlap {
                        second = best_overlap;
                        best_overlap = overlap;
                        best = Some(new_col);
                    } else if overlap > second {
                        second = overlap;
                    }
                }
                let chosen = best.expect("one column per branch");
                if second >= 0.0 && (best_overlap - second).abs() < 1e-6 {
                    ambiguous = true;
                }
                assigned[chosen] = true;
                order.push(chosen);
            }
            if ambiguous {
                flagged_samples.push(idx);
            }
        }

        let ordered_vals: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        match &reference_eigenvalues {
            None => reference_eigenvalues = Some(ordered_vals.clone()),
            Some(reference) => {
                for (a, b) in ordered_vals.iter().zip(reference) {
                    eigenvalue_drift = eigenvalue_drift.max((a - b).abs());
                }
            }
        }

        for (branch, &col) in order.iter().enumerate() {
            let overlap = vectors.column(col).dotc(sample.psi.amplitudes()).norm_sqr();
            populations[branch].push(overlap);
        }
        times.push(sample.t);

        let mut reordered = CMatrix::zeros(dim, dim);
        for (branch, &col) in order.iter().enumerate() {
            reordered.set_column(branch, &vectors.column(col));
        }
        prev_vectors = Some(reordered);
    }

    let dt = grid.step();
    let mut max_rate: f64 = 0.0;
    for series in &populations {
        for w in series.windows(2) {
            max_rate = max_rate.max((w[1] - w[0]).abs() / dt);
        }
    }

    AdiabaticityReport { times, populations, max_rate, eigenvalue_drift, flagged_samples }
}
