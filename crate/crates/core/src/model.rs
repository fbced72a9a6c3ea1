//! Couplings, mode bookkeeping and the quadratic boson Hamiltonians.
//!
//! Everything is in reduced units (`hbar = 1`, frequencies in units chosen by
//! the caller, usually `omega0 = 1`). A [`QuadraticBosonForm`] stores
//!
//! ```text
//! H = sum_ij A_ij a_i^dag a_j + 1/2 sum_ij (B_ij a_i^dag a_j^dag + h.c.) + c0
//! ```

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{f_layer, transverse_pair, StructureFactor};

const FORM_TOL: f64 = 1e-12;
const RADICAND_FLOOR: f64 = 1e-14;

/// Frequencies and couplings for one wavevector.
///
/// `omega_k` holds a single photon frequency for bulk models and the cavity
/// mode ladder for the layer. `chi` is the dipole-dipole coupling; it equals
/// `eta` for the 3D lattice and is independent of it for the layer.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSet {
    pub omega0: f64,
    pub omega_k: Vec<f64>,
    pub eta: f64,
    pub chi: f64,
}

impl CouplingSet {
    pub fn bulk(omega0: f64, omega_k: f64, eta: f64) -> Result<Self> {
        Self::new(omega0, vec![omega_k], eta, eta)
    }

    pub fn layer(omega0: f64, cavity_modes: Vec<f64>, eta: f64, chi: f64) -> Result<Self> {
        Self::new(omega0, cavity_modes, eta, chi)
    }

    pub fn new(omega0: f64, omega_k: Vec<f64>, eta: f64, chi: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::Domain(format!("omega0 must be positive, got {omega0}")));
        }
        if omega_k.is_empty() {
            return Err(Error::Shape("at least one photon frequency is required".into()));
        }
        if let Some(w) = omega_k.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Domain(format!("photon frequencies must be positive, got {w}")));
        }
        for (name, v) in [("eta", eta), ("chi", chi)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(Self {
            omega0,
            omega_k,
            eta,
            chi,
        })
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        let chi = if self.chi == self.eta { eta } else { self.chi };
        Self::new(self.omega0, self.omega_k.clone(), eta, chi)
    }

    pub fn with_omega_k(&self, omega_k: f64) -> Result<Self> {
        Self::new(self.omega0, vec![omega_k], self.eta, self.chi)
    }

    pub fn first_omega_k(&self) -> f64 {
        self.omega_k[0]
    }

    /// Bare light-matter coupling of photon mode `i`, defined through
    /// `g_k omega_k = eta sqrt(omega_k omega0)`.
    pub fn g_k(&self, i: usize) -> f64 {
        self.eta * (self.omega0 / self.omega_k[i]).sqrt()
    }

    /// Dipole-renormalized matter frequency for structure-factor entry `f`.
    pub fn omega_tilde(&self, f: f64) -> Result<f64> {
        renormalized_frequency(self.omega0, self.chi, f)
    }

    /// `eta' = eta omega0 / omega_tilde_perp`; infinite at the soft point.
    pub fn eta_prime(&self, f_perp: f64) -> Result<f64> {
        let w = self.omega_tilde(f_perp)?;
        Ok(self.eta * self.omega0 / w)
    }

    pub fn g_prime(&self, i: usize, f_perp: f64) -> Result<f64> {
        let w = self.omega_tilde(f_perp)?;
        Ok(self.g_k(i) * (self.omega0 / w).sqrt())
    }
}

/// `omega0 sqrt(1 + 4 coupling^2 f)`.
pub fn renormalized_frequency(omega0: f64, coupling: f64, f: f64) -> Result<f64> {
    let radicand = 1.0 + 4.0 * coupling * coupling * f;
    if radicand < -RADICAND_FLOOR {
        return Err(Error::SoftMode { radicand });
    }
    Ok(omega0 * radicand.max(0.0).sqrt())
}

/// Invert `eta'^2 = eta^2 / (1 + 4 eta^2 f_perp)` for `eta`.
pub fn eta_from_eta_prime(eta_prime: f64, f_perp: f64) -> Result<f64> {
    if !(eta_prime >= 0.0 && eta_prime.is_finite()) {
        return Err(Error::Domain(format!("eta' must be nonnegative, got {eta_prime}")));
    }
    let radicand = 1.0 - 4.0 * eta_prime * eta_prime * f_perp;
    if !(radicand > 0.0) {
        return Err(Error::Domain(format!(
            "no coupling reproduces eta' = {eta_prime} at f_perp = {f_perp}"
        )));
    }
    Ok(eta_prime / radicand.sqrt())
}

/// Critical coupling of the transverse matter mode, `1/(2 sqrt(-f_perp))`.
pub fn soft_mode_coupling(f_perp: f64) -> Option<f64> {
    (f_perp < 0.0).then(|| 0.5 / (-f_perp).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Normal,
    Condensed,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Condensed => "condensed",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    RenormalizedHopfield3D,
    Layer2D,
    DickeLike,
    BareHopfield,
    Condensed3D,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::RenormalizedHopfield3D,
        ModelKind::Layer2D,
        ModelKind::DickeLike,
        ModelKind::BareHopfield,
        ModelKind::Condensed3D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::RenormalizedHopfield3D => "renormalized-hopfield",
            ModelKind::Layer2D => "layer",
            ModelKind::DickeLike => "dicke",
            ModelKind::BareHopfield => "bare-hopfield",
            ModelKind::Condensed3D => "condensed",
        }
    }

    pub fn phase(self) -> Phase {
        match self {
            ModelKind::Condensed3D => Phase::Condensed,
            _ => Phase::Normal,
        }
    }

    /// Transverse structure factor the model effectively uses.
    pub fn effective_f_perp(self, f_perp: f64) -> f64 {
        match self {
            ModelKind::DickeLike => -1.0,
            ModelKind::BareHopfield => 0.0,
            _ => f_perp,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "renormalized-hopfield" | "renormalized-hopfield-3d" | "hopfield-3d" => {
                Ok(ModelKind::RenormalizedHopfield3D)
            }
            "layer" | "layer-2d" | "layer2d" => Ok(ModelKind::Layer2D),
            "dicke" | "dicke-like" => Ok(ModelKind::DickeLike),
            "bare-hopfield" | "hopfield" => Ok(ModelKind::BareHopfield),
            "condensed" | "condensed-3d" => Ok(ModelKind::Condensed3D),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    /// Photon modes that couple to the matter (all bulk photons).
    PhotonEven,
    /// Cavity modes with a node at the layer; they never couple.
    PhotonOdd,
    Matter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeLabel {
    pub kind: ModeKind,
    /// Polarization for photons, orientation for matter.
    pub index: usize,
    /// Cavity mode number for the layer.
    pub cavity: Option<usize>,
}

impl ModeLabel {
    pub fn photon(index: usize) -> Self {
        Self {
            kind: ModeKind::PhotonEven,
            index,
            cavity: None,
        }
    }

    pub fn matter(index: usize) -> Self {
        Self {
            kind: ModeKind::Matter,
            index,
            cavity: None,
        }
    }

    pub fn cavity(kind: ModeKind, index: usize, mode: usize) -> Self {
        Self {
            kind,
            index,
            cavity: Some(mode),
        }
    }

    pub fn is_photon(&self) -> bool {
        self.kind != ModeKind::Matter
    }
}

/// The bare matter Hamiltonian (frequency `omega0` plus the electrostatic
/// dipole term) that the two-step diagonalization removes first.
#[derive(Clone, Debug, PartialEq)]
pub struct MatterFrame {
    pub omega0: f64,
    /// Coefficients `c_ab` of `sum_ab c_ab (b_a + b_a^dag)(b_b + b_b^dag)`,
    /// indexed like the matter modes of the form.
    pub dipole: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticBosonForm {
    labels: Vec<ModeLabel>,
    a: DMatrix<Complex64>,
    b: DMatrix<Complex64>,
    c0: f64,
    matter_frame: Option<MatterFrame>,
}

impl QuadraticBosonForm {
    /// An all-zero form over the given modes.
    pub fn zeros(labels: Vec<ModeLabel>) -> Self {
        let n = labels.len();
        Self {
            labels,
            a: DMatrix::zeros(n, n),
            b: DMatrix::zeros(n, n),
            c0: 0.0,
            matter_frame: None,
        }
    }

    pub fn from_parts(
        labels: Vec<ModeLabel>,
        a: DMatrix<Complex64>,
        b: DMatrix<Complex64>,
        c0: f64,
    ) -> Result<Self> {
        let form = Self {
            labels,
            a,
            b,
            c0,
            matter_frame: None,
        };
        form.validate()?;
        Ok(form)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if self.a.shape() != (n, n) || self.b.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "{n} labels but A is {:?} and B is {:?}",
                self.a.shape(),
                self.b.shape()
            )));
        }
        let scale = self.scale().max(1.0);
        let herm = (&self.a - self.a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > FORM_TOL * scale {
            return Err(Error::MalformedForm(format!("A is not Hermitian ({herm:.3e})")));
        }
        let sym = (&self.b - self.b.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if sym > FORM_TOL * scale {
            return Err(Error::MalformedForm(format!("B is not symmetric ({sym:.3e})")));
        }
        if !self.c0.is_finite() || self.a.iter().chain(self.b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedForm("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn a(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<Complex64> {
        &self.b
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn matter_frame(&self) -> Option<&MatterFrame> {
        self.matter_frame.as_ref()
    }

    pub fn set_matter_frame(&mut self, frame: Option<MatterFrame>) {
        self.matter_frame = frame;
    }

    /// Largest coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn matter_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == ModeKind::Matter)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn index_of(&self, label: &ModeLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `[[A, B], [B*, A*]]`, so that `H = 1/2 xi^dag M xi - tr(A)/2 + c0`
    /// with `xi = (a, a^dag)`.
    pub fn bogoliubov_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, n)).copy_from(&self.b);
        m.view_mut((n, 0), (n, n)).copy_from(&self.b.map(|z| z.conj()));
        m.view_mut((n, n), (n, n)).copy_from(&self.a.map(|z| z.conj()));
        m
    }

    /// `[[A, B], [-B*, -A*]]`, the generator of the Heisenberg equations.
    pub fn dynamical_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = self.bogoliubov_matrix();
        m.view_mut((n, 0), (n, 2 * n)).neg_mut();
        m
    }

    /// Rebuild from a transformed Bogoliubov matrix, keeping the Hamiltonian
    /// (including its constant) unchanged.
    pub(crate) fn from_bogoliubov_matrix(
        labels: Vec<ModeLabel>,
        m: &DMatrix<Complex64>,
        previous_trace: f64,
        c0: f64,
    ) -> Self {
        let n = labels.len();
        let a = m.view((0, 0), (n, n)).into_owned();
        let b = m.view((0, n), (n, n)).into_owned();
        let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let b = (&b + b.transpose()) * Complex64::new(0.5, 0.0);
        let trace: f64 = a.diagonal().iter().map(|z| z.re).sum();
        Self {
            labels,
            a,
            b,
            c0: c0 + 0.5 * (trace - previous_trace),
            matter_frame: None,
        }
    }

    pub fn trace_a(&self) -> f64 {
        self.a.diagonal().iter().map(|z| z.re).sum()
    }

    /// `omega a_i^dag a_i`.
    pub fn number(&mut self, i: usize, omega: f64) -> &mut Self {
        self.a[(i, i)] += omega;
        self
    }

    /// `z a_i^dag a_j + h.c.`
    pub fn hopping(&mut self, i: usize, j: usize, z: Complex64) -> &mut Self {
        if i == j {
            self.a[(i, i)] += 2.0 * z.re;
        } else {
            self.a[(i, j)] += z;
            self.a[(j, i)] += z.conj();
        }
        self
    }

    /// `z a_i^dag a_j^dag + h.c.`
    pub fn pair(&mut self, i: usize, j: usize, z: Complex64) -> &mut Self {
        if i == j {
            self.b[(i, i)] += 2.0 * z;
        } else {
            self.b[(i, j)] += z;
            self.b[(j, i)] += z;
        }
        self
    }

    /// `c (a_i + a_i^dag)(a_j + a_j^dag)` for real `c`.
    pub fn x_x(&mut self, i: usize, j: usize, c: f64) -> &mut Self {
        let z = Complex64::new(c, 0.0);
        if i == j {
            self.a[(i, i)] += 2.0 * z;
            self.b[(i, i)] += 2.0 * z;
            self.c0 += c;
        } else {
            self.a[(i, j)] += z;
            self.a[(j, i)] += z;
            self.b[(i, j)] += z;
            self.b[(j, i)] += z;
        }
        self
    }

    /// `i g (a_i - a_i^dag)(a_j + a_j^dag)` for real `g` and `i != j`.
    pub fn p_x(&mut self, i: usize, j: usize, g: f64) -> &mut Self {
        let z = Complex64::new(0.0, -g);
        self.hopping(i, j, z);
        self.pair(i, j, z)
    }
}

fn bulk_labels() -> Vec<ModeLabel> {
    vec![
        ModeLabel::photon(0),
        ModeLabel::photon(1),
        ModeLabel::matter(0),
        ModeLabel::matter(1),
        ModeLabel::matter(2),
    ]
}

fn add_dipole_term(form: &mut QuadraticBosonForm, matter: &[usize], coeff: &Matrix3<f64>) {
    for (a, &ia) in matter.iter().enumerate() {
        for (b, &ib) in matter.iter().enumerate() {
            if coeff[(a, b)] != 0.0 {
                form.x_x(ia, ib, coeff[(a, b)]);
            }
        }
    }
}

fn frame_from(omega0: f64, coeff: &Matrix3<f64>) -> MatterFrame {
    MatterFrame {
        omega0,
        dipole: DMatrix::from_fn(3, 3, |i, j| coeff[(i, j)]),
    }
}

/// Multipolar Hamiltonian of a 3D dipole lattice for one wavevector: two
/// photon polarizations orthogonal to the propagation direction and three
/// matter orientations.
pub fn build_bulk_3d(params: &CouplingSet, f: &StructureFactor) -> Result<QuadraticBosonForm> {
    if params.omega_k.len() != 1 {
        return Err(Error::Shape(format!(
            "bulk model takes one photon frequency, got {}",
            params.omega_k.len()
        )));
    }
    if (f.f - f.f.transpose()).abs().max() > FORM_TOL {
        return Err(Error::Shape("structure factor is not symmetric".into()));
    }
    let wk = params.omega_k[0];
    let w0 = params.omega0;
    let pols = transverse_pair(&f.propagation());
    let mut form = QuadraticBosonForm::zeros(bulk_labels());
    let matter = [2, 3, 4];

    for (l, _) in pols.iter().enumerate() {
        form.number(l, wk);
    }
    for &m in &matter {
        form.number(m, w0);
    }
    let g = params.eta * (wk * w0).sqrt();
    for (l, pol) in pols.iter().enumerate() {
        for (a, &m) in matter.iter().enumerate() {
            let e = pol[a];
            if e.abs() > 1e-15 {
                form.p_x(l, m, g * e);
            }
        }
    }
    // P^2 self-term and electrostatic dipole coupling
    let overlap = Matrix3::from_fn(|a, b| pols.iter().map(|p| p[a] * p[b]).sum::<f64>());
    let p2 = overlap * (params.eta * params.eta * w0);
    let dipole = f.f * (params.chi * params.chi * w0);
    add_dipole_term(&mut form, &matter, &(p2 + dipole));
    form.set_matter_frame(Some(frame_from(w0, &dipole)));
    Ok(form)
}

/// Bulk form without dipole-dipole interactions.
pub fn build_bare_hopfield(params: &CouplingSet) -> Result<QuadraticBosonForm> {
    build_bulk_3d(params, &StructureFactor::uniaxial(0.0, 0.0))
}

/// Single-mode Dicke-like Hamiltonian
/// `omega0 b^dag b + omega_k a^dag a - i eta sqrt(omega_k omega0)(a^dag - a)(b^dag + b)`.
pub fn build_dicke_like(params: &CouplingSet) -> Result<QuadraticBosonForm> {
    let wk = params.first_omega_k();
    let mut form = QuadraticBosonForm::zeros(vec![ModeLabel::photon(0), ModeLabel::matter(0)]);
    form.number(0, wk)
        .number(1, params.omega0)
        .p_x(0, 1, params.eta * (wk * params.omega0).sqrt());
    Ok(form)
}

/// Cavity frequencies for the layer: the given ladder, or multiples of a
/// single fundamental.
pub fn cavity_ladder(params: &CouplingSet, k_max: usize) -> Result<Vec<f64>> {
    if k_max < 1 {
        return Err(Error::Domain("the layer needs at least one cavity mode".into()));
    }
    match params.omega_k.len() {
        n if n == k_max => Ok(params.omega_k.clone()),
        1 => Ok((1..=k_max).map(|n| n as f64 * params.omega_k[0]).collect()),
        n => Err(Error::Shape(format!("{n} cavity frequencies given for {k_max} modes"))),
    }
}

/// Dipole layer at the centre of a planar cavity, normal incidence. For each
/// cavity mode there are two polarizations of the even (coupled) and odd
/// (uncoupled) standing waves; the matter modes follow.
pub fn build_layer_2d(params: &CouplingSet, k_max: usize) -> Result<QuadraticBosonForm> {
    let ladder = cavity_ladder(params, k_max)?;
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("cavity frequencies must be strictly increasing".into()));
    }
    let mut labels = Vec::with_capacity(4 * k_max + 3);
    for n in 0..k_max {
        for kind in [ModeKind::PhotonEven, ModeKind::PhotonOdd] {
            for pol in 0..2 {
                labels.push(ModeLabel::cavity(kind, pol, n + 1));
            }
        }
    }
    let first_matter = labels.len();
    labels.extend((0..3).map(ModeLabel::matter));
    let matter = [first_matter, first_matter + 1, first_matter + 2];

    let w0 = params.omega0;
    let mut form = QuadraticBosonForm::zeros(labels);
    for (n, &wn) in ladder.iter().enumerate() {
        for slot in 0..4 {
            form.number(4 * n + slot, wn);
        }
        let g = params.eta * (w0 * wn).sqrt();
        for pol in 0..2 {
            form.p_x(4 * n + pol, matter[pol], g);
        }
    }
    for &m in &matter {
        form.number(m, w0);
    }
    let mut p2 = Matrix3::zeros();
    p2[(0, 0)] = k_max as f64 * params.eta * params.eta * w0;
    p2[(1, 1)] = p2[(0, 0)];
    let dipole = f_layer().f * (params.chi * params.chi * w0);
    add_dipole_term(&mut form, &matter, &(p2 + dipole));
    form.set_matter_frame(Some(frame_from(w0, &dipole)));
    Ok(form)
}

/// Transverse fraction of the matter excitation locked into the condensate,
/// `sum B^2 / N = (1 + 1/(4 eta^2 f_perp)) / 2`.
pub fn condensate_fraction(eta: f64, f_perp: f64) -> f64 {
    0.5 * (1.0 + 1.0 / (4.0 * eta * eta * f_perp))
}

/// Diagonal matter frequency of the condensed Hamiltonian,
/// `omega0 (1 - 4 eta^2 f_perp) / 2`.
pub fn condensed_matter_frequency(omega0: f64, eta: f64, f_perp: f64) -> f64 {
    0.5 * omega0 * (1.0 - 4.0 * eta * eta * f_perp)
}

/// Fluctuation Hamiltonian around the condensate for `eta > eta_c`, in the
/// thermodynamic limit. Only the transverse sector is kept: two photon
/// polarizations and the two transverse matter orientations, with the
/// condensate along the first orientation.
pub fn build_condensed_3d(params: &CouplingSet, f_perp: f64) -> Result<QuadraticBosonForm> {
    let eta = params.eta;
    let Some(eta_c) = soft_mode_coupling(f_perp) else {
        return Err(Error::PhaseDomain {
            eta,
            eta_c: f64::INFINITY,
        });
    };
    if eta <= eta_c {
        return Err(Error::PhaseDomain { eta, eta_c });
    }
    let wk = params.first_omega_k();
    let w0 = params.omega0;
    let s = condensate_fraction(eta, f_perp);
    let n_tilde = 1.0 - s;
    let g = eta * (w0 * wk).sqrt() * n_tilde.sqrt();
    let e2f = eta * eta * f_perp;

    let labels = vec![
        ModeLabel::photon(0),
        ModeLabel::photon(1),
        ModeLabel::matter(0),
        ModeLabel::matter(1),
    ];
    let mut form = QuadraticBosonForm::zeros(labels);
    form.number(0, wk).number(1, wk);
    let wm = condensed_matter_frequency(w0, eta, f_perp);
    form.number(2, wm).number(3, wm);
    form.p_x(0, 2, g * (1.0 - s / n_tilde));
    form.p_x(1, 3, g);

    let d1 = eta * eta * w0 * (1.0 + f_perp) * (4.0 * e2f - 1.0) / (8.0 * e2f);
    form.x_x(2, 2, d1).x_x(3, 3, d1);
    let d2 = eta * eta * w0 * ((12.0 * e2f - 1.0) / (4.0 * e2f - 1.0) - 4.0 * (1.0 + f_perp)) * s;
    form.x_x(2, 2, d2);
    Ok(form)
}

/// Physical constants and conversions to the dimensionless couplings.
pub mod units {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const EPSILON0: f64 = 8.854_187_8128e-12;
    pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;

    /// Angular frequency (rad/s) of a photon energy in eV.
    pub fn ev_to_angular(ev: f64) -> f64 {
        ev * ELECTRON_VOLT / HBAR
    }

    /// Bulk coupling `sqrt(d^2 rho / (2 hbar eps0 eps_m omega0))`.
    pub fn chi_bulk(dipole: f64, density: f64, eps_m: f64, omega0: f64) -> f64 {
        (dipole * dipole * density / (2.0 * HBAR * EPSILON0 * eps_m * omega0)).sqrt()
    }

    /// Layer dipole coupling `sqrt(d^2 mu / (hbar eps0 eps_m a^3 omega0))`.
    pub fn chi_layer(dipole: f64, mu: f64, a: f64, eps_m: f64, omega0: f64) -> f64 {
        (dipole * dipole * mu / (HBAR * EPSILON0 * eps_m * a.powi(3) * omega0)).sqrt()
    }

    /// Layer light-matter coupling `sqrt(d^2 N / (hbar eps0 eps_m S L omega0))`
    /// with `areal_density = N/S`.
    pub fn eta_layer(dipole: f64, areal_density: f64, cavity_length: f64, eps_m: f64, omega0: f64) -> f64 {
        (dipole * dipole * areal_density / (HBAR * EPSILON0 * eps_m * cavity_length * omega0)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::f_longwave_3d;
    use nalgebra::Vector3;

    #[test]
    fn renormalized_frequency_examples() {
        assert_eq!(renormalized_frequency(1.0, 0.0, -1.0 / 3.0).unwrap(), 1.0);
        let soft = renormalized_frequency(1.0, 3f64.sqrt() / 2.0, -1.0 / 3.0).unwrap();
        assert!(soft < 1e-7);
        let w = renormalized_frequency(1.0, 0.5, -1.0 / 3.0).unwrap();
        assert!((w - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(matches!(
            renormalized_frequency(1.0, 1.0, -1.0 / 3.0),
            Err(Error::SoftMode { .. })
        ));
    }

    #[test]
    fn eta_prime_relation() {
        let c = CouplingSet::bulk(1.0, 1.0, 0.5).unwrap();
        let ep = c.eta_prime(-1.0 / 3.0).unwrap();
        let w = c.omega_tilde(-1.0 / 3.0).unwrap();
        assert!((ep * w - c.eta * c.omega0).abs() < 1e-12);
        assert!((ep - 0.612_372_435_695_794_5).abs() < 1e-12);
        let back = eta_from_eta_prime(ep, -1.0 / 3.0).unwrap();
        assert!((back - 0.5).abs() < 1e-14);
    }

    #[test]
    fn builders_are_well_formed() {
        let c = CouplingSet::bulk(1.0, 1.3, 0.4).unwrap();
        let f = f_longwave_3d(&Vector3::z()).unwrap();
        build_bulk_3d(&c, &f).unwrap().validate().unwrap();
        build_bare_hopfield(&c).unwrap().validate().unwrap();
        build_dicke_like(&c).unwrap().validate().unwrap();
        let l = CouplingSet::layer(1.0, vec![0.8, 1.6, 2.4], 0.3, 0.2).unwrap();
        build_layer_2d(&l, 3).unwrap().validate().unwrap();
        let h = CouplingSet::bulk(1.0, 1.0, 1.0).unwrap();
        build_condensed_3d(&h, -1.0 / 3.0).unwrap().validate().unwrap();
    }

    #[test]
    fn longitudinal_matter_mode_decouples_from_light() {
        let c = CouplingSet::bulk(1.0, 0.9, 0.7).unwrap();
        let form = build_bulk_3d(&c, &f_longwave_3d(&Vector3::z()).unwrap()).unwrap();
        for photon in 0..2 {
            assert_eq!(form.a()[(photon, 4)].norm(), 0.0);
            assert_eq!(form.b()[(photon, 4)].norm(), 0.0);
        }
    }

    #[test]
    fn dicke_form_has_no_photon_squeezing() {
        let c = CouplingSet::bulk(1.0, 1.0, 0.3).unwrap();
        let form = build_dicke_like(&c).unwrap();
        assert_eq!(form.b()[(0, 0)].norm(), 0.0);
        assert_eq!(form.b()[(1, 1)].norm(), 0.0);
    }

    #[test]
    fn condensed_matter_diagonal() {
        let w = condensed_matter_frequency(1.0, 1.0, -1.0 / 3.0);
        assert!((w - 7.0 / 6.0).abs() < 1e-15);
        let low = CouplingSet::bulk(1.0, 1.0, 0.8).unwrap();
        assert!(matches!(
            build_condensed_3d(&low, -1.0 / 3.0),
            Err(Error::PhaseDomain { .. })
        ));
    }

    #[test]
    fn layer_ladder_from_fundamental() {
        let c = CouplingSet::layer(1.0, vec![0.5], 0.1, 0.1).unwrap();
        assert_eq!(cavity_ladder(&c, 3).unwrap(), vec![0.5, 1.0, 1.5]);
        assert!(build_layer_2d(&c, 0).is_err());
    }

    #[test]
    fn builder_primitives() {
        let mut form = QuadraticBosonForm::zeros(vec![ModeLabel::photon(0), ModeLabel::matter(0)]);
        form.x_x(1, 1, 0.25);
        assert_eq!(form.a()[(1, 1)].re, 0.5);
        assert_eq!(form.b()[(1, 1)].re, 0.5);
        assert_eq!(form.c0(), 0.25);
        form.p_x(0, 1, 1.0);
        assert_eq!(form.a()[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(form.a()[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(form.b()[(0, 1)], Complex64::new(0.0, -1.0));
        form.validate().unwrap();
    }

    #[test]
    fn model_names_round_trip() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.name().parse::<ModelKind>().unwrap(), kind);
        }
        assert!("superradiant".parse::<ModelKind>().is_err());
    }
}
