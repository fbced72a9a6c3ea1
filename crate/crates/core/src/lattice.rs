//! Lattice geometries and electrostatic dipole-dipole structure factors.
//!
//! All lengths are in units of the lattice constant unless a [`LatticeSpec`]
//! says otherwise. The raw lattice sum
//!
//! ```text
//! S_ab(k, R) = sum_{0 < |r| <= R} cos(k.r) / r^3 (delta_ab - 3 r_a r_b / r^2)
//! ```
//!
//! is conditionally convergent at small `|k|`, so it is always evaluated over
//! complete spherical shells. The long-wavelength limit is available in closed
//! form through [`f_longwave_3d`].

use nalgebra::{Matrix2, Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeFamily {
    Sc,
    Fcc,
    Bcc,
    Square2D,
}

impl LatticeFamily {
    /// Structure constant `v` of the long-wavelength sum, `(4 pi / 3 v) rho`.
    pub fn long_wave_constant(self) -> Option<f64> {
        match self {
            LatticeFamily::Sc => Some(1.0),
            LatticeFamily::Fcc => Some(2f64.powf(-0.5)),
            LatticeFamily::Bcc => Some(4.0 * 3f64.powf(-1.5)),
            LatticeFamily::Square2D => None,
        }
    }
}

impl std::str::FromStr for LatticeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sc" => Ok(LatticeFamily::Sc),
            "fcc" => Ok(LatticeFamily::Fcc),
            "bcc" => Ok(LatticeFamily::Bcc),
            "square" | "square2d" | "square-2d" => Ok(LatticeFamily::Square2D),
            other => Err(Error::Config(format!("unknown lattice family `{other}`"))),
        }
    }
}

/// A Bravais lattice together with the orthonormal basis used to resolve
/// dipole orientations.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    family: LatticeFamily,
    a: f64,
    basis: [Vector3<f64>; 3],
}

impl LatticeSpec {
    pub fn new(family: LatticeFamily, a: f64) -> Result<Self> {
        Self::with_basis(family, a, [Vector3::x(), Vector3::y(), Vector3::z()])
    }

    pub fn with_basis(family: LatticeFamily, a: f64, basis: [Vector3<f64>; 3]) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("lattice constant must be positive, got {a}")));
        }
        let mut deviation: f64 = 0.0;
        for (i, ei) in basis.iter().enumerate() {
            for (j, ej) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((ei.dot(ej) - target).abs());
            }
        }
        if deviation > UNIT_TOL {
            return Err(Error::NonOrthonormalBasis { deviation });
        }
        Ok(Self { family, a, basis })
    }

    pub fn family(&self) -> LatticeFamily {
        self.family
    }

    pub fn lattice_constant(&self) -> f64 {
        self.a
    }

    pub fn basis(&self) -> &[Vector3<f64>; 3] {
        &self.basis
    }

    /// Sites per unit volume (per unit area for the square layer), using the
    /// conventional cubic cell of edge `a`.
    pub fn density(&self) -> f64 {
        match self.family {
            LatticeFamily::Sc => self.a.powi(-3),
            LatticeFamily::Fcc => 4.0 * self.a.powi(-3),
            LatticeFamily::Bcc => 2.0 * self.a.powi(-3),
            LatticeFamily::Square2D => self.a.powi(-2),
        }
    }

    pub fn nearest_neighbour_distance(&self) -> f64 {
        match self.family {
            LatticeFamily::Sc | LatticeFamily::Square2D => self.a,
            LatticeFamily::Fcc => self.a / 2f64.sqrt(),
            LatticeFamily::Bcc => self.a * 3f64.sqrt() / 2.0,
        }
    }

    // Sites are integer triples times this step.
    fn grid_step(&self) -> f64 {
        match self.family {
            LatticeFamily::Sc | LatticeFamily::Square2D => self.a,
            LatticeFamily::Fcc | LatticeFamily::Bcc => self.a / 2.0,
        }
    }

    fn contains(&self, i: i64, j: i64, l: i64) -> bool {
        match self.family {
            LatticeFamily::Sc => true,
            LatticeFamily::Square2D => l == 0,
            LatticeFamily::Fcc => (i + j + l).rem_euclid(2) == 0,
            LatticeFamily::Bcc => {
                let p = i.rem_euclid(2);
                p == j.rem_euclid(2) && p == l.rem_euclid(2)
            }
        }
    }

    fn check_cutoff(&self, r_cut: f64) -> Result<()> {
        let nearest = self.nearest_neighbour_distance();
        if !(r_cut >= nearest * (1.0 - 1e-12)) {
            return Err(Error::EmptyShell { r_cut, nearest });
        }
        Ok(())
    }
}

/// All lattice vectors with `0 < |r| <= r_cut`, ordered by length and then
/// lexicographically. The set is inversion symmetric.
pub fn lattice_sites(spec: &LatticeSpec, r_cut: f64) -> Result<Vec<Vector3<f64>>> {
    spec.check_cutoff(r_cut)?;
    let step = spec.grid_step();
    let limit = squared_limit(r_cut, step);
    let n = (r_cut / step).floor() as i64 + 1;
    let l_range = if spec.family == LatticeFamily::Square2D { 0 } else { n };
    let mut keyed = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for l in -l_range..=l_range {
                let n2 = i * i + j * j + l * l;
                if n2 == 0 || (n2 as f64) > limit || !spec.contains(i, j, l) {
                    continue;
                }
                keyed.push((n2, i, j, l));
            }
        }
    }
    keyed.sort_unstable();
    Ok(keyed
        .into_iter()
        .map(|(_, i, j, l)| Vector3::new(i as f64, j as f64, l as f64) * step)
        .collect())
}

fn squared_limit(r_cut: f64, step: f64) -> f64 {
    let x = r_cut / step;
    x * x * (1.0 + 1e-12)
}

/// Raw dipole sum at a single cutoff.
#[derive(Clone, Debug)]
pub struct DipoleSum {
    pub tensor: Matrix3<f64>,
    pub r_cut: f64,
    /// Set when `k = 0`: the sum then depends on the shape of the summation
    /// region and only the spherical-cutoff value is returned.
    pub shape_dependent: bool,
}

pub fn dipole_sum_3d(spec: &LatticeSpec, k: &Vector3<f64>, r_cut: f64) -> Result<DipoleSum> {
    let tensor = dipole_shell_sums(spec, k, &[r_cut])?.remove(0);
    Ok(DipoleSum {
        tensor,
        r_cut,
        shape_dependent: k.norm() == 0.0,
    })
}

/// Cumulative dipole sums at every cutoff in `cutoffs` (ascending), computed
/// in one pass over the lattice. Summation order is fixed, so results are
/// bit-reproducible regardless of the thread count.
pub fn dipole_shell_sums(
    spec: &LatticeSpec,
    k: &Vector3<f64>,
    cutoffs: &[f64],
) -> Result<Vec<Matrix3<f64>>> {
    if cutoffs.is_empty() {
        return Err(Error::Domain("at least one cutoff is required".into()));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("cutoffs must be strictly increasing".into()));
    }
    spec.check_cutoff(cutoffs[0])?;

    let step = spec.grid_step();
    let limits: Vec<f64> = cutoffs.iter().map(|&r| squared_limit(r, step)).collect();
    let max_limit = *limits.last().unwrap();
    let n = max_limit.sqrt().floor() as i64 + 1;
    let planar = spec.family == LatticeFamily::Square2D;
    let basis = spec.basis;
    let k = *k;
    let ncut = cutoffs.len();

    let slabs: Vec<Vec<[f64; 6]>> = (-n..=n)
        .into_par_iter()
        .map(|i| {
            let mut buckets = vec![[0.0f64; 6]; ncut];
            let rem_i = max_limit - (i * i) as f64;
            if rem_i < 0.0 {
                return buckets;
            }
            let nj = rem_i.sqrt().floor() as i64;
            for j in -nj..=nj {
                let rem_j = rem_i - (j * j) as f64;
                if rem_j < 0.0 {
                    continue;
                }
                let nl = if planar { 0 } else { rem_j.sqrt().floor() as i64 };
                for l in -nl..=nl {
                    let n2 = i * i + j * j + l * l;
                    if n2 == 0 || !spec.contains(i, j, l) {
                        continue;
                    }
                    let n2f = n2 as f64;
                    let slot = limits.partition_point(|&lim| lim < n2f);
                    if slot == ncut {
                        continue;
                    }
                    let r = Vector3::new(i as f64, j as f64, l as f64) * step;
                    let r2 = n2f * step * step;
                    let weight = k.dot(&r).cos() / (r2 * r2.sqrt());
                    let p = [basis[0].dot(&r), basis[1].dot(&r), basis[2].dot(&r)];
                    let b = &mut buckets[slot];
                    for (c, (x, y)) in PAIRS.iter().enumerate() {
                        let delta = if x == y { 1.0 } else { 0.0 };
                        b[c] += weight * (delta - 3.0 * p[*x] * p[*y] / r2);
                    }
                }
            }
            buckets
        })
        .collect();

    let mut totals = vec![[0.0f64; 6]; ncut];
    for slab in &slabs {
        for (t, b) in totals.iter_mut().zip(slab) {
            for c in 0..6 {
                t[c] += b[c];
            }
        }
    }
    let mut running = [0.0f64; 6];
    Ok(totals
        .iter()
        .map(|t| {
            for c in 0..6 {
                running[c] += t[c];
            }
            symmetric_from_components(&running)
        })
        .collect())
}

// Component order used throughout: xx, yy, zz, xy, xz, yz.
const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn symmetric_from_components(c: &[f64; 6]) -> Matrix3<f64> {
    Matrix3::new(c[0], c[3], c[4], c[3], c[1], c[5], c[4], c[5], c[2])
}

/// The six independent components `xx, yy, zz, xy, xz, yz`.
pub fn tensor_components(m: &Matrix3<f64>) -> [f64; 6] {
    PAIRS.map(|(i, j)| m[(i, j)])
}

/// Shell-partial dipole sums together with their extrapolated limit.
#[derive(Clone, Debug)]
pub struct ShellSequence {
    pub cutoffs: Vec<f64>,
    pub partial: Vec<Matrix3<f64>>,
    pub extrapolated: Matrix3<f64>,
}

/// Dipole sum over a cutoff sequence, extrapolated assuming the remaining
/// error falls off as `R^-2`.
///
/// For `k != 0` the partial sums oscillate with the continuum tail
/// `4 pi rho (3 k k - 1) j1(kR)/(kR)`; evaluating at the zeros of `j1(|k|R)`
/// ([`tail_nulling_cutoffs`]) removes that oscillation before extrapolating.
pub fn dipole_sum_sequence(
    spec: &LatticeSpec,
    k: &Vector3<f64>,
    cutoffs: &[f64],
) -> Result<ShellSequence> {
    let partial = dipole_shell_sums(spec, k, cutoffs)?;
    let extrapolated = richardson_r2(cutoffs, &partial);
    Ok(ShellSequence {
        cutoffs: cutoffs.to_vec(),
        partial,
        extrapolated,
    })
}

fn richardson_r2(cutoffs: &[f64], partial: &[Matrix3<f64>]) -> Matrix3<f64> {
    let n = partial.len();
    if n < 2 {
        return partial[n - 1];
    }
    let (r1, r2) = (cutoffs[n - 2], cutoffs[n - 1]);
    let (w1, w2) = (r1 * r1, r2 * r2);
    (partial[n - 1] * w2 - partial[n - 2] * w1) / (w2 - w1)
}

/// Radii `R_n = x_n / |k|` where `x_n` are the positive zeros of the
/// spherical Bessel function `j1`, skipping radii below `min_radius`.
pub fn tail_nulling_cutoffs(k_norm: f64, count: usize, min_radius: f64) -> Result<Vec<f64>> {
    if !(k_norm > 0.0) {
        return Err(Error::Domain("tail-nulling cutoffs need |k| > 0".into()));
    }
    let mut out = Vec::with_capacity(count);
    let mut n = 1usize;
    while out.len() < count {
        let r = spherical_j1_zero(n) / k_norm;
        if r >= min_radius {
            out.push(r);
        }
        n += 1;
    }
    Ok(out)
}

/// n-th positive zero of `j1`, i.e. of `tan x = x` (n = 1, 2, ...).
pub fn spherical_j1_zero(n: usize) -> f64 {
    let q = (n as f64 + 0.5) * std::f64::consts::PI;
    let mut x = q - 1.0 / q;
    for _ in 0..50 {
        // phi(x) = sin x - x cos x,  phi'(x) = x sin x
        let (s, c) = x.sin_cos();
        let step = (s - x * c) / (x * s);
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

/// Dimensionless structure factor resolved in the dipole orientation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureFactor {
    pub f: Matrix3<f64>,
    /// Propagation direction; `None` for the layer, whose normal is `z`.
    pub k_hat: Option<Vector3<f64>>,
    pub f_perp: f64,
    pub f_par: f64,
}

impl StructureFactor {
    /// Wrap an arbitrary symmetric matrix, splitting it along `k_hat`.
    pub fn from_matrix(f: Matrix3<f64>, k_hat: Vector3<f64>) -> Result<Self> {
        let (f_perp, f_par) = split_transverse_longitudinal(&f, &k_hat)?;
        Ok(Self {
            f,
            k_hat: Some(k_hat),
            f_perp,
            f_par,
        })
    }

    /// Isotropic factor with the given transverse and longitudinal parts and
    /// `k = z`. `f_perp = f_par = 0` is the bare Hopfield case; `f_perp = -1`
    /// is the Dicke limit.
    pub fn uniaxial(f_perp: f64, f_par: f64) -> Self {
        Self {
            f: Matrix3::from_diagonal(&Vector3::new(f_perp, f_perp, f_par)),
            k_hat: Some(Vector3::z()),
            f_perp,
            f_par,
        }
    }

    /// Direction that light propagates along (the layer normal for a layer).
    pub fn propagation(&self) -> Vector3<f64> {
        self.k_hat.unwrap_or_else(Vector3::z)
    }
}

fn check_unit(v: &Vector3<f64>) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(())
}

/// Long-wavelength structure factor `f = (3 k k^T - 1)/3` for cubic lattices.
pub fn f_longwave_3d(k_hat: &Vector3<f64>) -> Result<StructureFactor> {
    check_unit(k_hat)?;
    let f = (k_hat * k_hat.transpose() * 3.0 - Matrix3::identity()) / 3.0;
    Ok(StructureFactor {
        f,
        k_hat: Some(*k_hat),
        f_perp: -1.0 / 3.0,
        f_par: 2.0 / 3.0,
    })
}

/// Structure factor of a square layer at normal incidence.
pub fn f_layer() -> StructureFactor {
    let z = Vector3::z();
    StructureFactor {
        f: (z * z.transpose() * 3.0 - Matrix3::identity()) / 3.0,
        k_hat: None,
        f_perp: -1.0 / 3.0,
        f_par: 2.0 / 3.0,
    }
}

/// Longitudinal part `k^T f k` and the (doubly degenerate) transverse
/// eigenvalue of `f`.
pub fn split_transverse_longitudinal(f: &Matrix3<f64>, k_hat: &Vector3<f64>) -> Result<(f64, f64)> {
    check_unit(k_hat)?;
    let asym = (f - f.transpose()).abs().max();
    if asym > UNIT_TOL {
        return Err(Error::Shape(format!("structure factor is not symmetric ({asym:.3e})")));
    }
    let f_par = (k_hat.transpose() * f * k_hat)[0];
    let [u, v] = transverse_pair(k_hat);
    let block = Matrix2::new(
        u.dot(&(f * u)),
        u.dot(&(f * v)),
        v.dot(&(f * u)),
        v.dot(&(f * v)),
    );
    let eig = block.symmetric_eigenvalues();
    let (lo, hi) = (eig[0].min(eig[1]), eig[0].max(eig[1]));
    if hi - lo > DEGENERACY_TOL {
        return Err(Error::Anisotropy { first: lo, second: hi });
    }
    Ok((0.5 * (lo + hi), f_par))
}

/// Orthonormal pair spanning the plane orthogonal to `k_hat`, chosen
/// deterministically (Gram-Schmidt on the axis least aligned with `k_hat`).
pub fn transverse_pair(k_hat: &Vector3<f64>) -> [Vector3<f64>; 2] {
    let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
    let seed = axes
        .iter()
        .min_by(|a, b| {
            a.dot(k_hat)
                .abs()
                .partial_cmp(&b.dot(k_hat).abs())
                .unwrap()
        })
        .unwrap();
    let u = (seed - k_hat * seed.dot(k_hat)).normalize();
    let v = k_hat.cross(&u);
    [u, v]
}

/// Converged 2D structure constant `mu`.
#[derive(Clone, Copy, Debug)]
pub struct MuEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub cutoff: usize,
}

const MU_MAX_CUTOFF: usize = 1 << 14;

/// The square-lattice constant
/// `mu = 3/(4 pi) [sum_{n>0} n^-3 + sum_{n,m>0} (n^2+m^2)^-3/2]`.
///
/// Each row `n < M` is summed directly up to `M` with an Euler-Maclaurin
/// tail; rows `n >= M` use `sum_m (n^2+m^2)^-3/2 = 1/n^2 - 1/(2n^3)` up to
/// corrections of order `exp(-2 pi n)`. The cutoff doubles until both the
/// error bound and the change between successive cutoffs are below
/// `tol * mu`.
pub fn mu_2d(tol: f64) -> Result<MuEstimate> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut cutoff = 8usize;
    let mut previous: Option<f64> = None;
    let mut iterations = 0;
    loop {
        let (value, error_bound) = mu_2d_at(cutoff);
        iterations += 1;
        let settled = previous.is_some_and(|p| (value - p).abs() <= tol * value);
        if error_bound <= tol * value && settled {
            return Ok(MuEstimate {
                value,
                error_bound,
                cutoff,
            });
        }
        if cutoff >= MU_MAX_CUTOFF {
            return Err(Error::Convergence {
                partial: value,
                error_bound,
                iterations,
            });
        }
        previous = Some(value);
        cutoff *= 2;
    }
}

fn mu_2d_at(m: usize) -> (f64, f64) {
    let mf = m as f64;
    let mut err = 0.0;

    // sum_{n>=1} n^-3
    let mut single: f64 = (1..m).map(|n| (n as f64).powi(-3)).sum();
    single += 0.5 * mf.powi(-2) + 0.5 * mf.powi(-3) + 0.25 * mf.powi(-4) - mf.powi(-6) / 12.0;
    err += mf.powi(-8) / 12.0;

    // rows n < m
    let mut rows = 0.0;
    for n in 1..m {
        let n2 = (n as f64).powi(2);
        let mut row: f64 = (1..m).map(|j| (n2 + (j as f64).powi(2)).powf(-1.5)).sum();
        let u = n2 + mf * mf;
        let su = u.sqrt();
        let integral = 1.0 / (su * (su + mf));
        let h = u.powf(-1.5);
        let dh = -3.0 * mf * u.powf(-2.5);
        let d3h = 45.0 * mf * u.powf(-3.5) - 105.0 * mf.powi(3) * u.powf(-4.5);
        row += integral + 0.5 * h - dh / 12.0 + d3h / 720.0;
        rows += row;
        err += 2520.0 * u.powi(-4) / 30240.0;
    }

    // rows n >= m: sum of 1/n^2 - 1/(2 n^3) by Euler-Maclaurin
    let f = mf.powi(-2) - 0.5 * mf.powi(-3);
    let d1 = -2.0 * mf.powi(-3) + 1.5 * mf.powi(-4);
    let d3 = -24.0 * mf.powi(-5) + 30.0 * mf.powi(-6);
    let d5 = -720.0 * mf.powi(-7) + 1260.0 * mf.powi(-8);
    let far = (1.0 / mf - 0.25 * mf.powi(-2)) + 0.5 * f - d1 / 12.0 + d3 / 720.0;
    err += d5.abs() / 30240.0;
    // neglected Bessel corrections, 4 pi/n * sum_p p K1(2 pi p n) with K1(x) <= 2 sqrt(pi/2x) e^-x
    let bessel = 4.0 * std::f64::consts::PI / mf
        * 2.0
        * (std::f64::consts::PI / (4.0 * std::f64::consts::PI * mf)).sqrt()
        * (-2.0 * std::f64::consts::PI * mf).exp();
    err += bessel * mf;

    let scale = 3.0 / (4.0 * std::f64::consts::PI);
    (scale * (single + rows + far), scale * err)
}

/// Plain truncated sum over `n, m <= cutoff`; nondecreasing in `cutoff`.
pub fn mu_2d_partial(cutoff: usize) -> f64 {
    let single: f64 = (1..=cutoff).map(|n| (n as f64).powi(-3)).sum();
    let double: f64 = (1..=cutoff)
        .map(|n| {
            let n2 = (n as f64).powi(2);
            (1..=cutoff)
                .map(|m| (n2 + (m as f64).powi(2)).powf(-1.5))
                .sum::<f64>()
        })
        .sum();
    3.0 / (4.0 * std::f64::consts::PI) * (single + double)
}
