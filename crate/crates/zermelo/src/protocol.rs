//! The time-optimal navigation protocol.
//!
//! Given a background Hamiltonian `H0`, an initial and a final state, and an
//! energy resource bound `k = tr(Hc^2)`, the protocol runs in four steps:
//!
//! 1. solve the implicit minimum-time equation
//!    `arccos(|<psi_i| U0^dag(dt) |psi_f>|) = sqrt(k/2) * dt` for the smallest
//!    non-negative `dt`;
//! 2. build the intermediate target `|psi'_f> = U0^dag(dt) |psi_f>` and its
//!    orthonormalized companion `|psi_bar>` (Gram-Schmidt against `psi_i`);
//! 3. assemble the initial control Hamiltonian
//!    `Hc = i sqrt(k/2) (|psi_bar><psi_i| - |psi_i><psi_bar|)`;
//! 4. compose the full evolution `U(t) = U0(t) Uc(t)` with
//!    `Uc(t) = exp(-i Hc t)`.
//!
//! Both the arccos argument and the returned angle live on the principal
//! branch, so `phi` is always in `[0, pi/2]` and multi-revolution solutions
//! are excluded by construction.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{
    outer, unitary_exp, CMatrix, CVector, HermitianOperator, Sign, StateVector,
    UnitaryOperator,
};

/// Inputs of the navigation problem.
#[derive(Debug, Clone)]
pub struct ZermeloProblem {
    h0: HermitianOperator,
    psi_i: StateVector,
    psi_f: StateVector,
    k: f64,
}

impl ZermeloProblem {
    pub fn new(
        h0: HermitianOperator,
        psi_i: StateVector,
        psi_f: StateVector,
        k: f64,
    ) -> Result<Self> {
        if psi_i.dim() != h0.dim() {
            return Err(Error::DimensionMismatch { left: psi_i.dim(), right: h0.dim() });
        }
        if psi_f.dim() != h0.dim() {
            return Err(Error::DimensionMismatch { left: psi_f.dim(), right: h0.dim() });
        }
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::NonPositiveResource { k });
        }
        Ok(Self { h0, psi_i, psi_f, k })
    }

    pub fn h0(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn psi_i(&self) -> &StateVector {
        &self.psi_i
    }

    pub fn psi_f(&self) -> &StateVector {
        &self.psi_f
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    /// The speed scale `sqrt(k/2)` set by the resource bound.
    pub fn speed(&self) -> f64 {
        (self.k / 2.0).sqrt()
    }
}

/// Convergence controls for the minimum-time solver.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    /// Relative convergence tolerance on `delta_t`.
    pub tol: f64,
    /// Iteration cap for the fixed-point stage.
    pub max_iter: usize,
    /// Fallback bisection bracket, as a multiple of `pi / sqrt(2k)`.
    pub bracket_max: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 1000, bracket_max: 4.0 }
    }
}

/// Output of the minimum-time solve alone.
#[derive(Debug, Clone, Copy)]
pub struct DeltaTSolve {
    pub delta_t: f64,
    /// Angular distance `phi = sqrt(k/2) * delta_t`, in `[0, pi/2]`.
    pub phi: f64,
    pub iterations: usize,
    /// Final residual of the implicit equation.
    pub residual: f64,
}

/// The solved problem bundle.
#[derive(Debug, Clone)]
pub struct ZermeloSolution {
    pub delta_t: f64,
    pub phi: f64,
    /// `|psi'_f> = U0^dag(delta_t) |psi_f>`.
    pub psi_f_prime: StateVector,
    /// Orthonormalized target; `None` for the degenerate zero-distance case.
    pub psi_f_orthonormal: Option<StateVector>,
    /// Initial control Hamiltonian `Hc(t_i)`; zero in the degenerate case.
    pub hc_initial: HermitianOperator,
    pub iterations: usize,
    pub residual: f64,
}

impl ZermeloSolution {
    pub fn is_degenerate(&self) -> bool {
        self.psi_f_orthonormal.is_none()
    }
}

/// Overlap magnitude `|<psi_i| e^{i H0 dt} |psi_f>|` evaluated from the
/// spectral coefficients of both states.
struct OverlapEvaluator {
    coeff: Vec<(f64, C64)>,
}

impl OverlapEvaluator {
    fn new(p: &ZermeloProblem) -> Self {
        let eig = p.h0.eigendecompose();
        let vdag = eig.eigenvectors.matrix().adjoint();
        let ci = &vdag * p.psi_i.amplitudes();
        let cf = &vdag * p.psi_f.amplitudes();
        let coeff = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &l)| (l, ci[j].conj() * cf[j]))
            .collect();
        Self { coeff }
    }

    fn overlap_abs(&self, dt: f64) -> f64 {
        let sum: C64 = self
            .coeff
            .iter()
            .map(|&(l, c)| c * C64::new(0.0, l * dt).exp())
            .sum();
        sum.norm().min(1.0)
    }

    /// Angular distance `arccos(|<psi_i| U0^dag(dt) |psi_f>|)`.
    fn angle(&self, dt: f64) -> f64 {
        self.overlap_abs(dt).acos()
    }
}

/// Solves the implicit minimum-time equation for the smallest non-negative
/// root. Fixed-point iteration `dt <- angle(dt) / sqrt(k/2)` is tried first;
/// if it fails to settle, the residual is bracketed and bisected on
/// `[0, bracket_max * pi / sqrt(2k)]`.
pub fn solve_delta_t(p: &ZermeloProblem, s: &SolverSettings) -> Result<DeltaTSolve> {
    let speed = p.speed();
    let overlap = OverlapEvaluator::new(p);
    let residual_at = |dt: f64| overlap.angle(dt) - speed * dt;

    // Degenerate geometry: the states already coincide at dt = 0.
    let phi0 = overlap.angle(0.0);
    if phi0 <= f64::EPSILON {
        return Ok(DeltaTSolve { delta_t: 0.0, phi: 0.0, iterations: 0, residual: 0.0 });
    }

    let mut dt = phi0 / speed;
    let mut converged = None;
    for iter in 1..=s.max_iter {
        let next = overlap.angle(dt) / speed;
        let delta = (next - dt).abs();
        dt = next;
        let residual = residual_at(dt);
        if delta <= s.tol * dt.max(1.0) && residual.abs() <= s.tol * dt.max(1.0) {
            converged = Some(DeltaTSolve { delta_t: dt, phi: speed * dt, iterations: iter, residual });
            break;
        }
    }

    let solved = match converged {
        Some(sol) => sol,
        None => bisect_smallest_root(&residual_at, s, speed, dt)?,
    };

    // "Least time" semantics: make sure no earlier root was skipped.
    if let Some(earlier) =
        scan_for_earlier_root(&residual_at, solved.delta_t, s.tol)
    {
        return Ok(DeltaTSolve {
            delta_t: earlier,
            phi: speed * earlier,
            iterations: solved.iterations,
            residual: residual_at(earlier),
        });
    }
    Ok(solved)
}

fn bisect_smallest_root(
    residual_at: &dyn Fn(f64) -> f64,
    s: &SolverSettings,
    speed: f64,
    last_iterate: f64,
) -> Result<DeltaTSolve> {
    let upper = s.bracket_max * std::f64::consts::PI / (2.0 * speed);
    const SCAN: usize = 4096;
    let step = upper / SCAN as f64;
    let mut lo = 0.0;
    let mut f_lo = residual_at(lo);
    let mut bracket = None;
    for i in 1..=SCAN {
        let hi = i as f64 * step;
        let f_hi = residual_at(hi);
        if f_lo >= 0.0 && f_hi < 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::SolverDiverged {
        last_iterate,
        residual: residual_at(last_iterate),
    })?;
    let mut iterations = 0;
    while hi - lo > s.tol * hi.max(1.0) && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if residual_at(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let dt = 0.5 * (lo + hi);
    Ok(DeltaTSolve { delta_t: dt, phi: speed * dt, iterations, residual: residual_at(dt) })
}

/// Coarse scan of `[0, dt)` for a sign change the fixed point may have jumped
/// over; refines by bisection when one is found.
fn scan_for_earlier_root(
    residual_at: &dyn Fn(f64) -> f64,
    dt: f64,
    tol: f64,
) -> Option<f64> {
    const SCAN: usize = 2048;
    let margin = dt * 1e-6;
    let upper = dt - margin;
    if upper <= 0.0 {
        return None;
    }
    let step = upper / SCAN as f64;
    let mut lo = 0.0;
    let mut f_lo = residual_at(lo);
    for i in 1..=SCAN {
        let hi = i as f64 * step;
        let f_hi = residual_at(hi);
        if f_lo >= 0.0 && f_hi < 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                if b - a <= tol * b.max(1.0) {
                    break;
                }
                let mid = 0.5 * (a + b);
                if residual_at(mid) >= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    None
}

/// `|psi'_f> = U0^dag(delta_t) |psi_f>`.
pub fn intermediate_final_state(p: &ZermeloProblem, delta_t: f64) -> StateVector {
    let u0_dag = unitary_exp(p.h0(), delta_t, Sign::Positive);
    let v = u0_dag.matrix() * p.psi_f.amplitudes();
    StateVector::normalized(v).expect("unitary image of a unit vector")
}

/// Global-phase convention shared by the two control constructions: rotate
/// `psi_f_prime` so that `<psi_i|psi_f_prime>` is real and non-negative.
/// The angular distance only sees the overlap magnitude, so this choice is
/// free; without it the plane rotation would land on `psi_f_prime` only up
/// to that phase mismatch, not exactly.
fn phase_fixed_target(p: &ZermeloProblem, psi_f_prime: &StateVector) -> Result<(CVector, C64)> {
    let c = p.psi_i.inner(psi_f_prime)?;
    let phase = if c.norm() > 1e-15 {
        c.conj() / C64::new(c.norm(), 0.0)
    } else {
        C64::new(1.0, 0.0)
    };
    Ok((psi_f_prime.amplitudes() * phase, c * phase))
}

/// Gram-Schmidt step: projects `psi_i` out of `psi_f_prime` and renormalizes,
/// after fixing the global phase of the target so its overlap with `psi_i`
/// is real and non-negative.
///
/// Errors with [`Error::DegenerateProblem`] when the two states are parallel,
/// in which case no control is needed at all.
pub fn gram_schmidt_target(
    p: &ZermeloProblem,
    psi_f_prime: &StateVector,
) -> Result<StateVector> {
    let (target, c) = phase_fixed_target(p, psi_f_prime)?;
    if c.norm() >= 1.0 - 1e-12 {
        return Err(Error::DegenerateProblem);
    }
    let projected = target - p.psi_i.amplitudes() * c;
    StateVector::normalized(projected)
}

/// `Hc(t_i) = i sqrt(k/2) (|psi_bar><psi_i| - |psi_i><psi_bar|)`.
///
/// The result is Hermitian and traceless with `tr(Hc^2) = k` and nonzero
/// eigenvalues exactly `+-sqrt(k/2)`.
pub fn control_hamiltonian(
    p: &ZermeloProblem,
    psi_orthonormal: &StateVector,
) -> Result<HermitianOperator> {
    let overlap = p.psi_i.inner(psi_orthonormal)?.norm();
    if overlap > 1e-10 {
        return Err(Error::NotOrthogonal { overlap });
    }
    let a = outer(psi_orthonormal, &p.psi_i)?;
    let m = (&a - a.adjoint()) * C64::new(0.0, p.speed());
    Ok(HermitianOperator::new_unchecked(m))
}

/// Closed-form variant built from the intermediate state directly:
/// `i sqrt(k/2) / sin(sqrt(k/2) dt) (|psi'_f><psi_i| - h.c.)`, under the same
/// global-phase convention as [`gram_schmidt_target`] (real non-negative
/// overlap with `psi_i`, which makes the projector terms cancel).
///
/// Singular when `sin(sqrt(k/2) dt)` vanishes; the Gram-Schmidt route
/// ([`control_hamiltonian`]) has no such singularity and is the canonical
/// construction. This form serves as a cross-check.
pub fn control_hamiltonian_closed_form(
    p: &ZermeloProblem,
    psi_f_prime: &StateVector,
    delta_t: f64,
) -> Result<HermitianOperator> {
    let s = (p.speed() * delta_t).sin();
    if s.abs() < 1e-12 {
        return Err(Error::SingularConstruction { value: s });
    }
    let (target, _) = phase_fixed_target(p, psi_f_prime)?;
    let a = target * p.psi_i.amplitudes().adjoint();
    let m = (&a - a.adjoint()) * C64::new(0.0, p.speed() / s);
    Ok(HermitianOperator::new_unchecked(m))
}

/// `Uc(t) = exp(-i Hc(t_i) t)`.
pub fn control_unitary(hc_initial: &HermitianOperator, t: f64) -> UnitaryOperator {
    unitary_exp(hc_initial, t, Sign::Negative)
}

/// The same control propagator built directly as a rotation in the plane
/// spanned by `psi_i` and the orthonormalized target, with the identity on
/// the orthogonal complement.
pub fn control_unitary_plane_rotation(
    p: &ZermeloProblem,
    psi_orthonormal: &StateVector,
    t: f64,
) -> Result<UnitaryOperator> {
    let theta = p.speed() * t;
    let dim = p.dim();
    let p_ii = outer(&p.psi_i, &p.psi_i)?;
    let p_bb = outer(psi_orthonormal, psi_orthonormal)?;
    let p_bi = outer(psi_orthonormal, &p.psi_i)?;
    let m = CMatrix::identity(dim, dim)
        + (&p_ii + &p_bb) * C64::new(theta.cos() - 1.0, 0.0)
        + (&p_bi - p_bi.adjoint()) * C64::new(theta.sin(), 0.0);
    Ok(UnitaryOperator::new_unchecked(m))
}

/// `U(t) = U0(t) Uc(t)`; at `t = delta_t` it carries `psi_i` onto `psi_f`
/// up to a global phase.
pub fn full_unitary(p: &ZermeloProblem, sol: &ZermeloSolution, t: f64) -> UnitaryOperator {
    let u0 = unitary_exp(p.h0(), t, Sign::Negative);
    let uc = control_unitary(&sol.hc_initial, t);
    u0.compose(&uc).expect("solution dims match problem dims")
}

/// Runs protocol steps 1-3 and bundles the results.
pub fn solve(p: &ZermeloProblem, settings: &SolverSettings) -> Result<ZermeloSolution> {
    let dt = solve_delta_t(p, settings)?;
    if dt.delta_t == 0.0 {
        return Ok(ZermeloSolution {
            delta_t: 0.0,
            phi: 0.0,
            psi_f_prime: p.psi_f.clone(),
            psi_f_orthonormal: None,
            hc_initial: HermitianOperator::zero(p.dim()),
            iterations: dt.iterations,
            residual: dt.residual,
        });
    }
    let psi_f_prime = intermediate_final_state(p, dt.delta_t);
    let psi_bar = gram_schmidt_target(p, &psi_f_prime)?;
    let hc_initial = control_hamiltonian(p, &psi_bar)?;
    Ok(ZermeloSolution {
        delta_t: dt.delta_t,
        phi: dt.phi,
        psi_f_prime,
        psi_f_orthonormal: Some(psi_bar),
        hc_initial,
        iterations: dt.iterations,
        residual: dt.residual,
    })
}
