//! Mean-field description of the condensed (ferroelectric) phase.
//!
//! The bosonic operators are shifted by c-numbers, `a -> a + A`,
//! `b -> b + B`, and the linear terms of the Hamiltonian must vanish. All
//! amplitudes are stored scaled by `1/sqrt(N)`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{transverse_pair, StructureFactor};
use crate::model::{condensate_fraction, soft_mode_coupling, CouplingSet, Phase};

#[derive(Clone, Debug, PartialEq)]
pub struct CondensateParams {
    /// `sum_a B_a^2 / N`.
    pub sum_b2: f64,
    /// `A_lambda / sqrt(N)` per photon polarization.
    pub a: [f64; 2],
    /// `B_alpha / sqrt(N)` per matter orientation.
    pub b: [f64; 3],
    /// `g_k sqrt(N~/N)`.
    pub g_tilde: f64,
    /// `N~/N = 1 - sum B^2 / N`.
    pub n_tilde: f64,
    pub phase: Phase,
}

impl CondensateParams {
    pub fn trivial(coupling: &CouplingSet) -> Self {
        Self {
            sum_b2: 0.0,
            a: [0.0; 2],
            b: [0.0; 3],
            g_tilde: coupling.g_k(0),
            n_tilde: 1.0,
            phase: Phase::Normal,
        }
    }
}

/// Closed-form condensate for a bulk lattice with transverse structure
/// factor `f_perp`, the condensate lying along the first transverse
/// orientation with positive amplitude. Returns the trivial solution at and
/// below the critical coupling.
pub fn condensate_parameters(coupling: &CouplingSet, f_perp: f64) -> CondensateParams {
    let eta = coupling.eta;
    match soft_mode_coupling(f_perp) {
        Some(eta_c) if eta > eta_c => {
            let s = condensate_fraction(eta, f_perp);
            let n_tilde = 1.0 - s;
            let g_tilde = coupling.g_k(0) * n_tilde.sqrt();
            let beta = s.sqrt();
            CondensateParams {
                sum_b2: s,
                a: [2.0 * g_tilde * beta, 0.0],
                b: [beta, 0.0, 0.0],
                g_tilde,
                n_tilde,
                phase: Phase::Condensed,
            }
        }
        _ => CondensateParams::trivial(coupling),
    }
}

/// `sqrt(sum B^2 / N)`, zero in the normal phase.
pub fn order_parameter(eta: f64, f_perp: f64) -> f64 {
    match soft_mode_coupling(f_perp) {
        Some(eta_c) if eta > eta_c => condensate_fraction(eta, f_perp).sqrt(),
        _ => 0.0,
    }
}

fn polarizations(f: &StructureFactor) -> [Vector3<f64>; 2] {
    transverse_pair(&f.propagation())
}

/// Residuals of the stationarity conditions (photon equations first, then
/// matter), for amplitudes `a` and `b`. `N~` is taken from `b`.
pub fn stationarity_equations(
    a: &[f64; 2],
    b: &[f64; 3],
    coupling: &CouplingSet,
    f: &StructureFactor,
) -> [f64; 5] {
    let wk = coupling.first_omega_k();
    let w0 = coupling.omega0;
    let pols = polarizations(f);
    let e = |l: usize, al: usize| pols[l][al];
    let sum_b2: f64 = b.iter().map(|x| x * x).sum();
    let n_tilde = 1.0 - sum_b2;
    let g = coupling.g_k(0) * n_tilde.max(0.0).sqrt();
    let ff: Matrix3<f64> = Matrix3::from_fn(|i, j| (0..2).map(|l| e(l, i) * e(l, j)).sum::<f64>()) + f.f;

    let mut out = [0.0; 5];
    for l in 0..2 {
        let eb: f64 = (0..3).map(|al| b[al] * e(l, al)).sum();
        out[l] = 2.0 * g * wk * eb - wk * a[l];
    }
    let aeb: f64 = (0..2)
        .map(|l| a[l] * (0..3).map(|be| b[be] * e(l, be)).sum::<f64>())
        .sum();
    let bfb: f64 = (0..3)
        .map(|i| (0..3).map(|j| b[i] * ff[(i, j)] * b[j]).sum::<f64>())
        .sum();
    for al in 0..3 {
        let ae: f64 = (0..2).map(|l| a[l] * e(l, al)).sum();
        let fb: f64 = (0..3).map(|be| ff[(al, be)] * b[be]).sum();
        out[2 + al] = 2.0 * g * wk * (ae - b[al] / n_tilde * aeb)
            + 4.0 * g * g * wk * (b[al] / n_tilde * bfb - fb)
            - w0 * b[al];
    }
    out
}

/// Max-norm of the stationarity residuals at the given condensate.
pub fn stationarity_residual(params: &CondensateParams, coupling: &CouplingSet, f: &StructureFactor) -> f64 {
    stationarity_equations(&params.a, &params.b, coupling, f)
        .iter()
        .fold(0.0, |m, r| m.max(r.abs()))
}

/// `(<D>, <P_perp>, <E_perp>)` per photon polarization in reduced units,
/// with `<E_perp> = <D> - <P_perp>`.
pub fn field_expectations(
    params: &CondensateParams,
    f: &StructureFactor,
) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let pols = polarizations(f);
    let mut d = [0.0; 2];
    let mut p = [0.0; 2];
    let mut e = [0.0; 2];
    for l in 0..2 {
        d[l] = 2.0 * params.a[l];
        p[l] = 4.0 * params.g_tilde * (0..3).map(|al| params.b[al] * pols[l][al]).sum::<f64>();
        e[l] = d[l] - p[l];
    }
    (d, p, e)
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub a: [f64; 2],
    pub b: [f64; 3],
    pub residual: f64,
    pub iterations: usize,
}

const NEWTON_STEP_TOL: f64 = 1e-12;
const NEWTON_RESIDUAL_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 200;
// a stalled step only counts as converged below this residual
const NEWTON_ACCEPT_TOL: f64 = 1e-10;

fn pack(a: &[f64; 2], b: &[f64; 3]) -> DVector<f64> {
    DVector::from_vec(vec![a[0], a[1], b[0], b[1], b[2]])
}

fn unpack(x: &DVector<f64>) -> ([f64; 2], [f64; 3]) {
    ([x[0], x[1]], [x[2], x[3], x[4]])
}

fn residual_vec(x: &DVector<f64>, coupling: &CouplingSet, f: &StructureFactor) -> DVector<f64> {
    let (a, b) = unpack(x);
    DVector::from_row_slice(&stationarity_equations(&a, &b, coupling, f))
}

fn admissible(x: &DVector<f64>) -> bool {
    x[2] * x[2] + x[3] * x[3] + x[4] * x[4] < 1.0
}

/// Damped Newton iteration on the stationarity conditions with a central
/// difference Jacobian. Fails if it stalls or leaves `sum B^2 < N`.
pub fn solve_stationarity(
    start_a: [f64; 2],
    start_b: [f64; 3],
    coupling: &CouplingSet,
    f: &StructureFactor,
) -> Result<NewtonOutcome> {
    let mut x = pack(&start_a, &start_b);
    if !admissible(&x) {
        return Err(Error::Domain("starting point has sum B^2 >= N".into()));
    }
    let mut r = residual_vec(&x, coupling, f);
    for iter in 0..NEWTON_MAX_ITER {
        let norm = r.amax();
        if norm < NEWTON_RESIDUAL_TOL {
            let (a, b) = unpack(&x);
            return Ok(NewtonOutcome {
                a,
                b,
                residual: norm,
                iterations: iter,
            });
        }
        let h = 1e-7;
        let mut jac = DMatrix::zeros(5, 5);
        for j in 0..5 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let col = (residual_vec(&xp, coupling, f) - residual_vec(&xm, coupling, f)) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let Some(step) = jac.clone().lu().solve(&(-&r)) else {
            return Err(Error::Convergence {
                partial: norm,
                error_bound: f64::NAN,
                iterations: iter,
            });
        };
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-10 {
            let trial = &x + &step * t;
            if admissible(&trial) {
                let rt = residual_vec(&trial, coupling, f);
                if rt.amax() < norm {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((next, rn)) = accepted else {
            return Err(Error::Convergence {
                partial: norm,
                error_bound: f64::NAN,
                iterations: iter,
            });
        };
        let moved = (&next - &x).amax();
        x = next;
        r = rn;
        if moved < NEWTON_STEP_TOL {
            if r.amax() > NEWTON_ACCEPT_TOL {
                return Err(Error::Convergence {
                    partial: r.amax(),
                    error_bound: f64::NAN,
                    iterations: iter + 1,
                });
            }
            let (a, b) = unpack(&x);
            return Ok(NewtonOutcome {
                a,
                b,
                residual: r.amax(),
                iterations: iter + 1,
            });
        }
    }
    Err(Error::Convergence {
        partial: r.amax(),
        error_bound: f64::NAN,
        iterations: NEWTON_MAX_ITER,
    })
}

#[derive(Clone, Debug)]
pub struct MultiStartReport {
    pub converged: Vec<NewtonOutcome>,
    pub failed: usize,
}

impl MultiStartReport {
    /// Distinct solutions up to `tol` in max-norm.
    pub fn distinct(&self, tol: f64) -> Vec<&NewtonOutcome> {
        let mut out: Vec<&NewtonOutcome> = Vec::new();
        for s in &self.converged {
            let x = pack(&s.a, &s.b);
            if !out.iter().any(|o| (pack(&o.a, &o.b) - &x).amax() < tol) {
                out.push(s);
            }
        }
        out
    }
}

/// Newton solves from `starts` random points (photon amplitudes in
/// `[-1, 1]`, matter amplitudes inside the ball `sum B^2 < 1/2`).
pub fn multistart(coupling: &CouplingSet, f: &StructureFactor, starts: usize, seed: u64) -> MultiStartReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut converged = Vec::new();
    let mut failed = 0;
    for _ in 0..starts {
        let a = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let b = loop {
            let b: [f64; 3] = [
                rng.gen_range(-0.7..0.7),
                rng.gen_range(-0.7..0.7),
                rng.gen_range(-0.7..0.7),
            ];
            if b.iter().map(|x| x * x).sum::<f64>() < 0.5 {
                break b;
            }
        };
        match solve_stationarity(a, b, coupling, f) {
            Ok(s) => converged.push(s),
            Err(_) => failed += 1,
        }
    }
    MultiStartReport { converged, failed }
}
