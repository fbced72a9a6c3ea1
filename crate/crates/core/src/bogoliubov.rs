//! Symplectic (Bogoliubov) diagonalization of quadratic boson forms.
//!
//! Eigenvalues come from the real quadrature generator `J M`, with `M` the
//! real symmetric matrix of the form in `(x, p)` variables; eigenvectors come
//! from null spaces of `D - Omega` with `D` the complex dynamical matrix.
//! Frequencies of a stable, non-degenerate-defective form are polished with
//! the Rayleigh quotient `w^dag H w` of the normalized modes.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ModeLabel, QuadraticBosonForm};

const ZERO_MODE_TOL: f64 = 1e-7;
const INSTABILITY_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-8;
const NULL_TOL: f64 = 1e-6;
const SYMPLECTIC_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SymplecticSpectrum {
    /// Nonnegative normal-mode frequencies, ascending.
    pub frequencies: Vec<f64>,
    pub stable: bool,
    /// Complex frequencies `Omega` with `Im Omega > 0`.
    pub unstable_modes: Vec<Complex64>,
    pub zero_modes: usize,
    /// Index ranges of `frequencies` that are degenerate.
    pub degenerate_blocks: Vec<Range<usize>>,
    /// Largest mismatch between `+Omega` and `-Omega` eigenvalues.
    pub pairing_error: f64,
    /// `xi = T xi'` with `xi = (a, a^dag)`; columns are the positive modes
    /// in frequency order followed by their partners. Omitted at zero modes
    /// or when a degenerate block is defective.
    pub transform: Option<DMatrix<Complex64>>,
}

impl SymplecticSpectrum {
    pub fn lowest(&self) -> f64 {
        self.frequencies.first().copied().unwrap_or(0.0)
    }
}

/// `diag(+1, -1)` metric on `(a, a^dag)`.
pub fn sigma_metric(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i < n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

fn quadrature_generator(h: &DMatrix<Complex64>, n: usize) -> DMatrix<f64> {
    // xi = W (x, p) with W = [[1, i], [1, -i]] / sqrt 2
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        if i % n != j % n {
            return Complex64::new(0.0, 0.0);
        }
        match (bi, bj) {
            (0, 0) | (1, 0) => Complex64::new(s, 0.0),
            (0, 1) => Complex64::new(0.0, s),
            _ => Complex64::new(0.0, -s),
        }
    });
    let m = (w.adjoint() * h * &w).map(|z| z.re);
    let m = (&m + m.transpose()) * 0.5;
    // J M with J = [[0, 1], [-1, 0]]
    DMatrix::from_fn(2 * n, 2 * n, |i, j| if i < n { m[(i + n, j)] } else { -m[(i - n, j)] })
}

pub fn symplectic_spectrum(form: &QuadraticBosonForm) -> Result<SymplecticSpectrum> {
    form.validate()?;
    let n = form.dim();
    let scale = form.scale();
    if n == 0 || scale == 0.0 {
        return Ok(SymplecticSpectrum {
            frequencies: vec![0.0; n],
            stable: true,
            unstable_modes: vec![],
            zero_modes: n,
            degenerate_blocks: if n > 1 { vec![0..n] } else { vec![] },
            pairing_error: 0.0,
            transform: None,
        });
    }
    let h = form.bogoliubov_matrix();
    let eig = quadrature_generator(&h, n).schur().complex_eigenvalues();

    let zero_tol = ZERO_MODE_TOL * scale;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut zeros = 0usize;
    let mut unstable = Vec::new();
    for mu in eig.iter() {
        // mu = -i Omega
        let omega = Complex64::new(-mu.im, mu.re);
        if mu.norm() < zero_tol {
            zeros += 1;
        } else if mu.re.abs() > INSTABILITY_TOL * scale {
            if omega.im > 0.0 {
                unstable.push(omega);
            }
        } else if omega.re > 0.0 {
            positive.push(omega.re);
        } else {
            negative.push(-omega.re);
        }
    }
    positive.sort_by(f64::total_cmp);
    negative.sort_by(f64::total_cmp);
    unstable.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let paired = positive.len().min(negative.len());
    let mut pairing_error: f64 = 0.0;
    let mut frequencies = Vec::with_capacity(n);
    for i in 0..paired {
        pairing_error = pairing_error.max((positive[i] - negative[i]).abs());
        frequencies.push(0.5 * (positive[i] + negative[i]));
    }
    // unpaired real eigenvalues signal a numerically split pair
    for extra in positive[paired..].iter().chain(&negative[paired..]) {
        pairing_error = pairing_error.max(*extra);
    }
    let zero_modes = zeros / 2 + zeros % 2;
    let mut all = vec![0.0; zero_modes];
    all.extend(frequencies);
    let mut frequencies = all;
    frequencies.sort_by(f64::total_cmp);

    let stable = unstable.is_empty() && positive.len() == negative.len() && zeros % 2 == 0;
    let degenerate_blocks = clusters(&frequencies)
        .into_iter()
        .filter(|r| r.len() > 1)
        .collect();

    let mut spectrum = SymplecticSpectrum {
        frequencies,
        stable,
        unstable_modes: unstable,
        zero_modes,
        degenerate_blocks,
        pairing_error,
        transform: None,
    };
    if stable && zero_modes == 0 && spectrum.frequencies.len() == n {
        if let Some(t) = normal_modes(form, &spectrum.frequencies, scale) {
            for (j, omega) in spectrum.frequencies.iter_mut().enumerate() {
                let col = t.column(j);
                *omega = (col.adjoint() * &h * col)[(0, 0)].re;
            }
            spectrum.transform = Some(t);
        }
    }
    Ok(spectrum)
}

fn clusters(freqs: &[f64]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=freqs.len() {
        let split = i == freqs.len()
            || (freqs[i] - freqs[i - 1]).abs() > CLUSTER_TOL * freqs[i].abs().max(1.0);
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn normal_modes(form: &QuadraticBosonForm, freqs: &[f64], scale: f64) -> Option<DMatrix<Complex64>> {
    let n = form.dim();
    let d = form.dynamical_matrix();
    let sigma = sigma_metric(n);
    let mut modes: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(n);

    for block in clusters(freqs) {
        let m = block.len();
        let omega: f64 = freqs[block.clone()].iter().sum::<f64>() / m as f64;
        let shifted = &d - DMatrix::from_diagonal_element(2 * n, 2 * n, Complex64::new(omega, 0.0));
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        if svd.singular_values[order[m - 1]] > NULL_TOL * scale {
            return None;
        }
        let basis = DMatrix::from_fn(2 * n, m, |i, j| v_t[(order[j], i)].conj());
        let projector = &basis * basis.adjoint();

        let mut found: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(m);
        for seed in 0..2 * n {
            if found.len() == m {
                break;
            }
            let mut w = projector.column(seed).into_owned();
            for u in &found {
                let overlap = (u.adjoint() * &sigma * &w)[(0, 0)];
                w -= u * overlap;
            }
            let norm = (w.adjoint() * &sigma * &w)[(0, 0)].re;
            if norm > NULL_TOL * w.norm_squared().max(f64::MIN_POSITIVE) && norm > 1e-12 {
                found.push(w.unscale(norm.sqrt()));
            }
        }
        if found.len() != m {
            return None;
        }
        modes.extend(found);
    }

    let mut t = DMatrix::zeros(2 * n, 2 * n);
    for (j, w) in modes.iter().enumerate() {
        for i in 0..n {
            t[(i, j)] = w[i];
            t[(i + n, j)] = w[i + n];
            t[(i, j + n)] = w[i + n].conj();
            t[(i + n, j + n)] = w[i].conj();
        }
    }
    let defect = (t.adjoint() * &sigma * &t - &sigma)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    (defect <= SYMPLECTIC_TOL).then_some(t)
}

/// Remove the bare matter Hamiltonian (frequency plus dipole-dipole term)
/// first, leaving matter modes at their renormalized frequencies and the
/// light-matter couplings rescaled accordingly. The full spectrum is
/// unchanged.
pub fn matter_prediagonalize(form: &QuadraticBosonForm) -> Result<QuadraticBosonForm> {
    let frame = form
        .matter_frame()
        .ok_or_else(|| Error::MalformedForm("form carries no bare matter Hamiltonian".into()))?;
    let idx = form.matter_indices();
    let nm = idx.len();
    if frame.dipole.shape() != (nm, nm) {
        return Err(Error::Shape(format!(
            "matter frame is {:?} for {nm} matter modes",
            frame.dipole.shape()
        )));
    }
    let mut bare = QuadraticBosonForm::zeros((0..nm).map(ModeLabel::matter).collect());
    for i in 0..nm {
        bare.number(i, frame.omega0);
        for j in 0..nm {
            if frame.dipole[(i, j)] != 0.0 {
                bare.x_x(i, j, frame.dipole[(i, j)]);
            }
        }
    }
    let spectrum = symplectic_spectrum(&bare)?;
    if !spectrum.stable || spectrum.zero_modes > 0 {
        let radicand = spectrum
            .unstable_modes
            .iter()
            .map(|w| -(w.im * w.im) / (frame.omega0 * frame.omega0))
            .fold(0.0, f64::min);
        return Err(Error::SoftMode { radicand });
    }
    let tm = spectrum
        .transform
        .ok_or_else(|| Error::MalformedForm("matter block could not be diagonalized".into()))?;

    // put each matter normal mode back on the orientation it is mostly made of
    let mut slot_of_mode = vec![usize::MAX; nm];
    let mut taken = vec![false; nm];
    for mode in 0..nm {
        let best = (0..nm)
            .filter(|&s| !taken[s])
            .max_by(|&a, &b| tm[(a, mode)].norm().total_cmp(&tm[(b, mode)].norm()))
            .unwrap();
        taken[best] = true;
        slot_of_mode[mode] = best;
    }

    let n = form.dim();
    let mut t = DMatrix::<Complex64>::identity(2 * n, 2 * n);
    for &i in &idx {
        t[(i, i)] = Complex64::new(0.0, 0.0);
        t[(i + n, i + n)] = Complex64::new(0.0, 0.0);
    }
    for (r, &ir) in idx.iter().enumerate() {
        for mode in 0..nm {
            let c = idx[slot_of_mode[mode]];
            t[(ir, c)] = tm[(r, mode)];
            t[(ir, c + n)] = tm[(r, mode + nm)];
            t[(ir + n, c)] = tm[(r + nm, mode)];
            t[(ir + n, c + n)] = tm[(r + nm, mode + nm)];
        }
    }
    let h = t.adjoint() * form.bogoliubov_matrix() * &t;
    Ok(QuadraticBosonForm::from_bogoliubov_matrix(
        form.labels().to_vec(),
        &h,
        form.trace_a(),
        form.c0(),
    ))
}

/// Zero-point energy shift `(sum Omega - tr A) / 2` from diagonalization.
pub fn ground_state_check(form: &QuadraticBosonForm) -> Result<f64> {
    let spectrum = symplectic_spectrum(form)?;
    if !spectrum.stable {
        return Err(Error::Unstable(spectrum.unstable_modes.len()));
    }
    let total: f64 = spectrum.frequencies.iter().sum();
    Ok(0.5 * (total - form.trace_a()))
}
