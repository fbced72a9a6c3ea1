//! Polariton dispersion relations, branch scans and critical couplings.
//!
//! Normal-phase transverse branches are the roots of
//! `x^2 - x (w_k^2 + w~^2 (1 + 4 eta'^2)) + w_k^2 w~^2 = 0` with `x = Omega^2`.
//! Internally the coupling enters as `eta'^2 w~^2 = eta^2 w0^2`, which stays
//! finite at the soft point where `w~ -> 0`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{renormalized_frequency, soft_mode_coupling, ModelKind, Phase};

const RADICAND_FLOOR: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-10;
const CRITICAL_EPS: f64 = 1e-9;
const CRITICAL_SCAN_MAX: f64 = 10.0;
const CRITICAL_SCAN_STEP: f64 = 0.01;
const POLE_OFFSET: f64 = 1e-9;

// Larger root of x^2 - s x + p with the discriminant supplied in a
// cancellation-free form; the smaller root comes from the product.
fn ordered_roots(s: f64, p: f64, disc: f64) -> Result<(f64, f64)> {
    if disc < 0.0 || !disc.is_finite() {
        return Err(Error::Domain(format!("negative discriminant {disc:e} in branch quadratic")));
    }
    let hi = 0.5 * (s + disc.sqrt());
    let lo = if hi > 0.0 { p / hi } else { 0.0 };
    Ok((lo.max(0.0), hi))
}

/// `(Omega_LP^2, Omega_UP^2)` from `w_k^2`, `w~^2` and `c = eta'^2 w~^2`.
fn normal_roots_sq(wk2: f64, wt2: f64, c: f64) -> Result<(f64, f64)> {
    let s = wk2 + wt2 + 4.0 * c;
    let d = wk2 - wt2;
    let disc = d * d + 8.0 * c * (wk2 + wt2) + 16.0 * c * c;
    ordered_roots(s, wk2 * wt2, disc)
}

/// Lower and upper transverse polaritons of the renormalized Hopfield model.
pub fn polariton_branches(omega_k: f64, omega_tilde: f64, eta_prime: f64) -> (f64, f64) {
    assert!(omega_k > 0.0 && omega_tilde >= 0.0 && eta_prime >= 0.0);
    let c = if omega_tilde == 0.0 {
        0.0
    } else {
        (eta_prime * omega_tilde).powi(2)
    };
    let (lo, hi) = normal_roots_sq(omega_k * omega_k, omega_tilde * omega_tilde, c)
        .expect("discriminant is a sum of nonnegative terms");
    (lo.sqrt(), hi.sqrt())
}

/// Normal-phase transverse branches in terms of the bare coupling.
pub fn normal_branches(omega_k: f64, omega0: f64, eta: f64, f_perp: f64) -> Result<(f64, f64)> {
    let radicand = 1.0 + 4.0 * eta * eta * f_perp;
    if radicand < -RADICAND_FLOOR {
        return Err(Error::SoftMode { radicand });
    }
    let wt2 = omega0 * omega0 * radicand.max(0.0);
    let c = (eta * omega0).powi(2);
    let (lo, hi) = normal_roots_sq(omega_k * omega_k, wt2, c)?;
    Ok((lo.sqrt(), hi.sqrt()))
}

/// `omega0 sqrt(1 + 4 eta^2 f_par)`, independent of the photon frequency.
pub fn longitudinal_branch(omega0: f64, eta: f64, f_par: f64) -> Result<f64> {
    renormalized_frequency(omega0, eta, f_par)
}

/// Transverse branches above the critical coupling, from
/// `w_k^2 / x = 1 + (w0^2 / f_perp) / (w0^2 (1 - 16 eta^4 f_perp^2) + x)`.
pub fn condensed_branch(omega_k: f64, omega0: f64, eta: f64, f_perp: f64) -> Result<(f64, f64)> {
    let Some(eta_c) = soft_mode_coupling(f_perp) else {
        return Err(Error::PhaseDomain {
            eta,
            eta_c: f64::INFINITY,
        });
    };
    if !(eta > eta_c) {
        return Err(Error::PhaseDomain { eta, eta_c });
    }
    let wk2 = omega_k * omega_k;
    let w02 = omega0 * omega0;
    let e = w02 * (16.0 * eta.powi(4) * f_perp * f_perp - 1.0);
    let f = w02 / f_perp.abs();
    let s = wk2 + e + f;
    let p = wk2 * e;
    let d = wk2 - e;
    let disc = d * d + f * f + 2.0 * f * (wk2 + e);
    let (lo, hi) = ordered_roots(s, p, disc)?;
    for x in [lo, hi] {
        // back-substitute into the cleared form (x - e) w_k^2 = x (x - e) + (w0^2/f_perp) x
        let lhs = (x - e) * wk2;
        let rhs = x * (x - e) + w02 / f_perp * x;
        let scale = (x * x).max(e.abs() * x).max(wk2 * (x + e.abs())).max(f * x).max(f64::MIN_POSITIVE);
        if (lhs - rhs).abs() > RESIDUAL_TOL * scale {
            return Err(Error::Domain(format!(
                "condensed root {x} fails back-substitution ({:.3e})",
                (lhs - rhs).abs() / scale
            )));
        }
    }
    Ok((lo.sqrt(), hi.sqrt()))
}

/// Two-case transverse dispersion: normal branches up to and including the
/// critical coupling, condensed branches above it.
pub fn transverse_branches(
    model: ModelKind,
    omega_k: f64,
    omega0: f64,
    eta: f64,
    f_perp: f64,
) -> Result<(f64, f64, Phase)> {
    let f = model.effective_f_perp(f_perp);
    match model {
        ModelKind::Layer2D => Err(Error::Domain(
            "the layer has one branch per cavity mode; use layer_dispersion_roots".into(),
        )),
        ModelKind::Condensed3D => {
            let (lo, hi) = condensed_branch(omega_k, omega0, eta, f)?;
            Ok((lo, hi, Phase::Condensed))
        }
        _ => match soft_mode_coupling(f) {
            Some(eta_c) if eta > eta_c => {
                let (lo, hi) = condensed_branch(omega_k, omega0, eta, f)?;
                Ok((lo, hi, Phase::Condensed))
            }
            Some(eta_c) if eta == eta_c => {
                let (_, hi) = normal_roots_sq(omega_k * omega_k, 0.0, (eta * omega0).powi(2))?;
                Ok((0.0, hi.sqrt(), Phase::Normal))
            }
            _ => {
                let (lo, hi) = normal_branches(omega_k, omega0, eta, f)?;
                Ok((lo, hi, Phase::Normal))
            }
        },
    }
}

// Left-hand side of the layer dispersion relation times 2 w~, in x = Omega^2:
// (x - w~^2) + 4 c sum x / (w_n^2 - x),  c = eta'^2 w~^2.
fn layer_lhs(x: f64, wt2: f64, c: f64, poles: &[f64]) -> (f64, f64) {
    let mut value = x - wt2;
    let mut magnitude = x.abs() + wt2;
    for &w in poles {
        let term = 4.0 * c * x / (w - x);
        value += term;
        magnitude += term.abs();
    }
    (value, magnitude)
}

/// Transverse branches of a dipole layer in a multimode cavity, given the
/// renormalized matter frequency and `eta'`. Returns one root below the first
/// cavity mode, one between each pair of consecutive modes and one above the
/// last, ascending.
pub fn layer_roots(omega_tilde: f64, eta_prime: f64, modes: &[f64]) -> Result<Vec<f64>> {
    if !(omega_tilde >= 0.0 && eta_prime >= 0.0) {
        return Err(Error::Domain("omega_tilde and eta' must be nonnegative".into()));
    }
    let c = if omega_tilde == 0.0 {
        0.0
    } else {
        (eta_prime * omega_tilde).powi(2)
    };
    layer_roots_sq(omega_tilde * omega_tilde, c, modes)
}

/// Layer branches for a coupling set: `w~_perp` from the dipole coupling
/// `chi` and the layer's transverse structure factor, light-matter coupling
/// from `eta`.
pub fn layer_dispersion_roots(params: &crate::model::CouplingSet, modes: &[f64]) -> Result<Vec<f64>> {
    let f_perp = crate::lattice::f_layer().f_perp;
    let wt = params.omega_tilde(f_perp)?;
    let c = (params.eta * params.omega0).powi(2);
    layer_roots_sq(wt * wt, c, modes)
}

fn layer_roots_sq(wt2: f64, c: f64, modes: &[f64]) -> Result<Vec<f64>> {
    if modes.is_empty() {
        return Err(Error::Domain("at least one cavity mode is required".into()));
    }
    if modes[0] <= 0.0 || modes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("cavity modes must be positive and strictly increasing".into()));
    }
    if c == 0.0 {
        return Ok(vec![wt2.sqrt()]);
    }
    let poles: Vec<f64> = modes.iter().map(|w| w * w).collect();
    let k = poles.len();
    let mut brackets = Vec::with_capacity(k + 1);
    brackets.push((0.0, poles[0], false, true));
    for i in 1..k {
        brackets.push((poles[i - 1], poles[i], true, true));
    }
    let last = poles[k - 1];
    let mut upper = 2.0 * (last + wt2 + 4.0 * c * k as f64).max(last);
    while layer_lhs(upper, wt2, c, &poles).0 <= 0.0 {
        upper *= 2.0;
        if !upper.is_finite() {
            return Err(Error::Bracketing("no sign change above the last cavity mode".into()));
        }
    }
    brackets.push((last, upper, true, false));

    let mut roots = Vec::with_capacity(k + 1);
    let mut table = String::from("interval        lo              hi              f(lo)           f(hi)\n");
    let mut failed = false;
    for (i, &(lo, hi, lo_pole, hi_pole)) in brackets.iter().enumerate() {
        let Some((a, b)) = sign_change(lo, hi, lo_pole, hi_pole, wt2, c, &poles) else {
            let a = if lo_pole { lo * (1.0 + POLE_OFFSET) } else { lo };
            let b = if hi_pole { hi * (1.0 - POLE_OFFSET) } else { hi };
            let _ = writeln!(
                table,
                "{i:<15} {a:<15.8e} {b:<15.8e} {:<15.8e} {:<15.8e}",
                layer_lhs(a, wt2, c, &poles).0,
                layer_lhs(b, wt2, c, &poles).0
            );
            failed = true;
            continue;
        };
        let x = bisect(a, b, |x| layer_lhs(x, wt2, c, &poles).0);
        let (value, magnitude) = layer_lhs(x, wt2, c, &poles);
        if value.abs() > RESIDUAL_TOL * magnitude.max(f64::MIN_POSITIVE) {
            return Err(Error::Bracketing(format!(
                "root {x} in interval {i} has residual {:.3e}",
                value.abs() / magnitude
            )));
        }
        roots.push(x.sqrt());
    }
    if failed || roots.len() != k + 1 {
        return Err(Error::Bracketing(table));
    }
    Ok(roots)
}

fn sign_change(
    lo: f64,
    hi: f64,
    lo_pole: bool,
    hi_pole: bool,
    wt2: f64,
    c: f64,
    poles: &[f64],
) -> Option<(f64, f64)> {
    let mut offset = POLE_OFFSET;
    while offset >= 1e-15 {
        let a = if lo_pole { lo * (1.0 + offset) } else { lo };
        let b = if hi_pole { hi * (1.0 - offset) } else { hi };
        let fa = layer_lhs(a, wt2, c, poles).0;
        let fb = layer_lhs(b, wt2, c, poles).0;
        if fa < 0.0 && fb > 0.0 {
            return Some((a, b));
        }
        if fa == 0.0 {
            return Some((a, a));
        }
        if fb == 0.0 {
            return Some((b, b));
        }
        offset *= 1e-3;
    }
    None
}

// Bisection for an increasing function with f(a) <= 0 <= f(b).
fn bisect(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (fa, fb) = (f(a).abs(), f(b).abs());
    if fa <= fb {
        a
    } else {
        b
    }
}

/// Smallest coupling at which the lower polariton softens, found by scanning
/// `eta` up to 10 at `omega_k = omega0 = 1` and bisecting. `None` when the
/// branch never softens on that range.
pub fn critical_coupling(model: ModelKind, f_perp: f64) -> Result<Option<f64>> {
    let f = match model {
        ModelKind::RenormalizedHopfield3D | ModelKind::DickeLike | ModelKind::BareHopfield => {
            model.effective_f_perp(f_perp)
        }
        other => {
            return Err(Error::Domain(format!(
                "critical coupling is defined for normal-phase bulk models, not `{other}`"
            )))
        }
    };
    let soft = |eta: f64| match normal_branches(1.0, 1.0, eta, f) {
        Ok((lo, _)) => lo * lo <= CRITICAL_EPS * CRITICAL_EPS,
        Err(_) => true,
    };
    let steps = (CRITICAL_SCAN_MAX / CRITICAL_SCAN_STEP).round() as usize;
    let mut below = 0.0;
    for i in 1..=steps {
        let eta = i as f64 * CRITICAL_SCAN_STEP;
        if soft(eta) {
            let mut above = eta;
            while above - below > 1e-13 {
                let mid = 0.5 * (below + above);
                if soft(mid) {
                    above = mid;
                } else {
                    below = mid;
                }
            }
            return Ok(Some(0.5 * (below + above)));
        }
        below = eta;
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Lp,
    Cavity(usize),
    Up,
    Long,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Lp => f.write_str("LP"),
            Branch::Up => f.write_str("UP"),
            Branch::Long => f.write_str("LONG"),
            Branch::Cavity(n) => write!(f, "cavity-{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    OmegaK,
    Eta,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::OmegaK => "omega_k/omega0",
            Axis::Eta => "eta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub param: f64,
    /// Frequency in units of `omega0`.
    pub omega: f64,
    pub branch: Branch,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionCurve {
    pub axis: Axis,
    pub samples: Vec<Sample>,
}

impl DispersionCurve {
    pub fn branch(&self, branch: Branch) -> Vec<Sample> {
        self.samples.iter().filter(|s| s.branch == branch).copied().collect()
    }

    pub fn branches(&self) -> Vec<Branch> {
        let mut out: Vec<Branch> = self.samples.iter().map(|s| s.branch).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,branch,phase,omega_over_omega0\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", s.param, s.branch, s.phase, s.omega);
        }
        out
    }
}

/// Everything needed to evaluate a model at one point of a scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub omega0: f64,
    /// Photon frequency for bulk models; cavity ladder (or its fundamental)
    /// for the layer.
    pub omega_k: Vec<f64>,
    pub eta: f64,
    /// Layer dipole coupling; defaults to `eta`.
    pub chi: Option<f64>,
    pub f_perp: f64,
    pub f_par: f64,
    pub k_max: usize,
}

impl ModelParams {
    pub fn new(kind: ModelKind, eta: f64) -> Self {
        Self {
            kind,
            omega0: 1.0,
            omega_k: vec![1.0],
            eta,
            chi: None,
            f_perp: -1.0 / 3.0,
            f_par: 2.0 / 3.0,
            k_max: 1,
        }
    }

    fn cavity_modes(&self, fundamental: f64) -> Vec<f64> {
        if self.omega_k.len() == self.k_max && self.k_max > 1 {
            let scale = fundamental / self.omega_k[0];
            self.omega_k.iter().map(|w| w * scale).collect()
        } else {
            (1..=self.k_max).map(|n| n as f64 * fundamental).collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSpec {
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    pub longitudinal: bool,
}

impl ScanSpec {
    pub fn new(axis: Axis, min: f64, max: f64, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::Config(format!("a scan needs at least 2 samples, got {samples}")));
        }
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(Error::Config(format!("scan range must satisfy min < max, got {min}..{max}")));
        }
        Ok(Self {
            axis,
            min,
            max,
            samples,
            longitudinal: false,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

fn evaluate(params: &ModelParams, axis: Axis, x: f64, longitudinal: bool) -> Result<Vec<Sample>> {
    let (omega_k, eta) = match axis {
        Axis::OmegaK => (x * params.omega0, params.eta),
        Axis::Eta => (params.omega_k[0], x),
    };
    let w0 = params.omega0;
    let mut out = Vec::new();
    if params.kind == ModelKind::Layer2D {
        let chi = match axis {
            Axis::Eta => params.chi.unwrap_or(eta),
            Axis::OmegaK => params.chi.unwrap_or(params.eta),
        };
        let modes = params.cavity_modes(omega_k);
        let coupling = crate::model::CouplingSet::layer(w0, modes.clone(), eta, chi)?;
        let roots = layer_dispersion_roots(&coupling, &modes)?;
        let last = roots.len() - 1;
        for (i, r) in roots.iter().enumerate() {
            let branch = match i {
                0 => Branch::Lp,
                i if i == last => Branch::Up,
                i => Branch::Cavity(i),
            };
            out.push(Sample {
                param: x,
                omega: r / w0,
                branch,
                phase: Phase::Normal,
            });
        }
    } else {
        let (lo, hi, phase) = transverse_branches(params.kind, omega_k, w0, eta, params.f_perp)?;
        out.push(Sample {
            param: x,
            omega: lo / w0,
            branch: Branch::Lp,
            phase,
        });
        out.push(Sample {
            param: x,
            omega: hi / w0,
            branch: Branch::Up,
            phase,
        });
        // the Dicke-like model has a single matter mode and no longitudinal branch
        if longitudinal && phase == Phase::Normal && params.kind != ModelKind::DickeLike {
            let f_par = match params.kind {
                ModelKind::BareHopfield => 0.0,
                _ => params.f_par,
            };
            out.push(Sample {
                param: x,
                omega: longitudinal_branch(w0, eta, f_par)? / w0,
                branch: Branch::Long,
                phase,
            });
        }
    }
    Ok(out)
}

/// Sample a model along one axis. On a coupling axis that crosses the
/// critical point, the critical point itself is inserted as a normal-phase
/// sample with a vanishing lower polariton.
pub fn scan(params: &ModelParams, spec: &ScanSpec) -> Result<DispersionCurve> {
    let mut points = spec.points();
    if spec.axis == Axis::Eta && params.kind != ModelKind::Layer2D {
        if let Some(eta_c) = soft_mode_coupling(params.kind.effective_f_perp(params.f_perp)) {
            if spec.min < eta_c && eta_c < spec.max && !points.contains(&eta_c) {
                let at = points.partition_point(|&p| p < eta_c);
                points.insert(at, eta_c);
            }
        }
    }
    let per_point: Vec<Result<Vec<Sample>>> = points
        .par_iter()
        .map(|&x| evaluate(params, spec.axis, x, spec.longitudinal))
        .collect();
    let mut samples = Vec::with_capacity(points.len() * 2);
    for block in per_point {
        samples.extend(block?);
    }
    Ok(DispersionCurve {
        axis: spec.axis,
        samples,
    })
}
