use nalgebra::{DMatrix, Matrix3, Rotation3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

use polariton::bogoliubov::{matter_prediagonalize, symplectic_spectrum};
use polariton::dispersion::{normal_branches, polariton_branches, transverse_branches};
use polariton::expdata::{model_residuals, synthesize, Metadata};
use polariton::lattice::{
    dipole_sum_3d, f_longwave_3d, mu_2d_partial, LatticeFamily, LatticeSpec, StructureFactor,
};
use polariton::meanfield::{condensate_parameters, field_expectations, order_parameter, stationarity_residual};
use polariton::model::{
    build_bulk_3d, build_layer_2d, eta_from_eta_prime, CouplingSet, ModeLabel, ModelKind, QuadraticBosonForm,
};

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI)
        .prop_map(|(t, p)| Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos()))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

// Random stable form: A = diag(w) + small Hermitian part, B small symmetric.
fn random_form(n: usize, seed: &[f64]) -> QuadraticBosonForm {
    let mut it = seed.iter().copied().cycle();
    let mut next = move || it.next().unwrap();
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(1.0 + 2.0 * next().abs(), 0.0);
        for j in 0..i {
            let z = Complex64::new(0.15 * next(), 0.15 * next());
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
        for j in 0..=i {
            let z = Complex64::new(0.15 * next(), 0.15 * next());
            b[(i, j)] = z;
            b[(j, i)] = z;
        }
    }
    let labels = (0..n).map(ModeLabel::matter).collect();
    QuadraticBosonForm::from_parts(labels, a, b, 0.0).unwrap()
}

fn permuted(form: &QuadraticBosonForm, perm: &[usize]) -> QuadraticBosonForm {
    let n = form.dim();
    let a = DMatrix::from_fn(n, n, |i, j| form.a()[(perm[i], perm[j])]);
    let b = DMatrix::from_fn(n, n, |i, j| form.b()[(perm[i], perm[j])]);
    QuadraticBosonForm::from_parts(form.labels().to_vec(), a, b, form.c0()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dipole_sums_are_traceless(k_hat in unit_vector(), k in 0.0..0.8f64, r_cut in 1.5..5.0f64) {
        let spec = LatticeSpec::new(LatticeFamily::Sc, 1.0).unwrap();
        let s = dipole_sum_3d(&spec, &(k_hat * k), r_cut).unwrap();
        prop_assert!(s.tensor.trace().abs() < 1e-12);
    }

    #[test]
    fn dipole_sums_respect_cubic_symmetry(k_hat in unit_vector(), k in 0.01..0.8f64, axis in 0usize..3, r_cut in 1.5..5.0f64) {
        let rot = Rotation3::from_axis_angle(&Vector3::ith_axis(axis), std::f64::consts::FRAC_PI_2);
        let plain = LatticeSpec::new(LatticeFamily::Sc, 1.0).unwrap();
        let basis = [rot * Vector3::x(), rot * Vector3::y(), rot * Vector3::z()];
        let rotated = LatticeSpec::with_basis(LatticeFamily::Sc, 1.0, basis).unwrap();
        let s0 = dipole_sum_3d(&plain, &(k_hat * k), r_cut).unwrap().tensor;
        let s1 = dipole_sum_3d(&rotated, &(rot * k_hat * k), r_cut).unwrap().tensor;
        prop_assert!((s0 - s1).abs().max() < 1e-10);
    }

    #[test]
    fn layer_constant_partial_sums_grow(m in 1usize..60) {
        prop_assert!(mu_2d_partial(m + 1) >= mu_2d_partial(m));
    }

    #[test]
    fn long_wave_eigenvalues(k_hat in unit_vector()) {
        let f = f_longwave_3d(&k_hat).unwrap();
        let mut ev: Vec<f64> = SymmetricEigen::new(f.f).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        prop_assert!((ev[0] + 1.0 / 3.0).abs() < 1e-14);
        prop_assert!((ev[1] + 1.0 / 3.0).abs() < 1e-14);
        prop_assert!((ev[2] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn branch_roots_satisfy_vieta(wk in 0.05..5.0f64, wt in 0.01..3.0f64, ep in 0.0..3.0f64) {
        let (lo, hi) = polariton_branches(wk, wt, ep);
        let (l2, h2) = (lo * lo, hi * hi);
        prop_assert!(rel(l2 * h2, wk * wk * wt * wt) < 1e-10);
        prop_assert!(rel(l2 + h2, wk * wk + wt * wt * (1.0 + 4.0 * ep * ep)) < 1e-10);
        prop_assert!(lo <= wk.min(wt) * (1.0 + 1e-12) && hi >= wk.max(wt) * (1.0 - 1e-12));
    }

    #[test]
    fn lower_branch_softens_with_coupling(wk in 0.1..3.0f64, e1 in 0.0..0.86f64, e2 in 0.0..0.86f64) {
        let (lo_eta, hi_eta) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (a, _) = normal_branches(wk, 1.0, lo_eta, -1.0 / 3.0).unwrap();
        let (b, _) = normal_branches(wk, 1.0, hi_eta, -1.0 / 3.0).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-13));
    }

    #[test]
    fn eta_prime_round_trip(eta in 0.001..0.86f64) {
        let ep = CouplingSet::bulk(1.0, 1.0, eta).unwrap().eta_prime(-1.0 / 3.0).unwrap();
        prop_assert!(rel(eta_from_eta_prime(ep, -1.0 / 3.0).unwrap(), eta) < 1e-12);
    }

    #[test]
    fn dynamical_eigenvalues_pair(seed in prop::collection::vec(-1.0..1.0f64, 40), n in 1usize..6) {
        let spec = symplectic_spectrum(&random_form(n, &seed)).unwrap();
        prop_assert!(spec.pairing_error < 1e-10);
        prop_assert!(spec.stable);
    }

    #[test]
    fn spectrum_ignores_mode_order(seed in prop::collection::vec(-1.0..1.0f64, 40), n in 2usize..6, shift in 1usize..5) {
        let form = random_form(n, &seed);
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let a = symplectic_spectrum(&form).unwrap();
        let b = symplectic_spectrum(&permuted(&form, &perm)).unwrap();
        for (x, y) in a.frequencies.iter().zip(&b.frequencies) {
            prop_assert!(rel(*x, *y) < 1e-10);
        }
    }

    #[test]
    fn free_modes_keep_identity_transform(mut w in prop::collection::vec(0.1..4.0f64, 1..6)) {
        w.sort_by(f64::total_cmp);
        w.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let n = w.len();
        let mut form = QuadraticBosonForm::zeros((0..n).map(ModeLabel::matter).collect());
        for (i, wi) in w.iter().enumerate() {
            form.number(i, *wi);
        }
        let spec = symplectic_spectrum(&form).unwrap();
        let t = spec.transform.unwrap();
        let id = DMatrix::<Complex64>::identity(2 * n, 2 * n);
        prop_assert!((t - id).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn bulk_forms_are_valid_and_two_step_equivalent(wk in 0.1..3.0f64, eta in 0.0..0.86f64, k_hat in unit_vector()) {
        let f = f_longwave_3d(&k_hat).unwrap();
        let form = build_bulk_3d(&CouplingSet::bulk(1.0, wk, eta).unwrap(), &f).unwrap();
        prop_assert!(form.validate().is_ok());
        let a = symplectic_spectrum(&form).unwrap();
        let pre = matter_prediagonalize(&form).unwrap();
        prop_assert!(pre.validate().is_ok());
        let b = symplectic_spectrum(&pre).unwrap();
        for (x, y) in a.frequencies.iter().zip(&b.frequencies) {
            prop_assert!(rel(*x, *y) < 1e-10);
        }
        let long = (1.0 + 4.0 * eta * eta * f.f_par).sqrt();
        prop_assert!(a.frequencies.iter().any(|w| rel(*w, long) < 1e-10));
    }

    #[test]
    fn swapping_transverse_axes_keeps_spectrum(wk in 0.1..3.0f64, eta in 0.0..0.86f64, theta in 0.0..std::f64::consts::PI) {
        let k1 = Vector3::new(theta.cos(), theta.sin(), 0.0);
        let k2 = Vector3::new(theta.sin(), theta.cos(), 0.0);
        let params = CouplingSet::bulk(1.0, wk, eta).unwrap();
        let a = symplectic_spectrum(&build_bulk_3d(&params, &f_longwave_3d(&k1).unwrap()).unwrap()).unwrap();
        let b = symplectic_spectrum(&build_bulk_3d(&params, &f_longwave_3d(&k2).unwrap()).unwrap()).unwrap();
        for (x, y) in a.frequencies.iter().zip(&b.frequencies) {
            prop_assert!(rel(*x, *y) < 1e-10);
        }
    }

    #[test]
    fn odd_cavity_modes_never_shift(w1 in 0.3..2.0f64, eta in 0.0..0.5f64, chi in 0.0..0.5f64, k_max in 1usize..5) {
        let params = CouplingSet::layer(1.0, vec![w1], eta, chi).unwrap();
        let form = build_layer_2d(&params, k_max).unwrap();
        prop_assert!(form.validate().is_ok());
        let spec = symplectic_spectrum(&form).unwrap();
        for n in 1..=k_max {
            let wn = w1 * n as f64;
            let hits = spec.frequencies.iter().filter(|w| (*w - wn).abs() < 1e-12 * wn.max(1.0)).count();
            prop_assert!(hits >= 2, "mode {wn} found {hits} times in {:?}", spec.frequencies);
        }
    }

    #[test]
    fn branches_continuous_at_critical_point(wk in 0.2..3.0f64, model in prop::sample::select(vec![ModelKind::RenormalizedHopfield3D, ModelKind::DickeLike])) {
        let f_perp = -1.0 / 3.0;
        let eta_c = if model == ModelKind::DickeLike { 0.5 } else { 3f64.sqrt() / 2.0 };
        let d = 1e-9;
        let below = transverse_branches(model, wk, 1.0, eta_c - d, f_perp).unwrap();
        let above = transverse_branches(model, wk, 1.0, eta_c + d, f_perp).unwrap();
        prop_assert!((below.0 - above.0).abs() < 1e-4);
        prop_assert!((below.1 - above.1).abs() < 1e-6);
    }

    #[test]
    fn condensate_is_stationary_with_zero_field(eta_frac in 0.0001..1.0f64, f_idx in 0usize..2) {
        let f_perp: f64 = [-1.0 / 3.0, -1.0][f_idx];
        let eta_c = 0.5 / (-f_perp).sqrt();
        let eta = eta_c + (3.0 - eta_c) * eta_frac;
        let coupling = CouplingSet::bulk(1.0, 1.0, eta).unwrap();
        let f = StructureFactor::uniaxial(f_perp, 0.0);
        let params = condensate_parameters(&coupling, f_perp);
        prop_assert!(stationarity_residual(&params, &coupling, &f) < 1e-10);
        let (_, _, e) = field_expectations(&params, &f);
        prop_assert!(e[0].abs() < 1e-12 && e[1].abs() < 1e-12);
    }

    #[test]
    fn order_parameter_grows(e1 in 0.0..3.0f64, e2 in 0.0..3.0f64) {
        let (a, b) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let f_perp = -1.0 / 3.0;
        let eta_c = 3f64.sqrt() / 2.0;
        let (oa, ob) = (order_parameter(a, f_perp), order_parameter(b, f_perp));
        if b > eta_c && a < b {
            prop_assert!(ob > oa);
        } else {
            prop_assert!(oa == 0.0 && ob == 0.0);
        }
    }

    #[test]
    fn residuals_scale_linearly_with_energy_unit(w0 in 0.5..3.0f64, shift in -0.05..0.05f64) {
        let meta = Metadata { omega0_ev: w0, ..Metadata::default() };
        let mut set = synthesize(ModelKind::RenormalizedHopfield3D, meta, 0.5 * w0, 1.5 * w0, 6).unwrap();
        let rows: Vec<_> = set.rows().iter().map(|r| polariton::expdata::Measurement { lower_ev: r.lower_ev * (1.0 + shift), ..*r }).collect();
        set = polariton::expdata::MeasurementSet::new(rows, meta).unwrap();
        for model in [ModelKind::RenormalizedHopfield3D, ModelKind::BareHopfield, ModelKind::DickeLike] {
            for p in model_residuals(&set, model).unwrap().points {
                prop_assert!((p.residual_ev - w0 * p.residual_reduced).abs() < 1e-13 * w0);
            }
        }
    }
}

#[test]
fn normal_form_turns_unstable_at_soft_mode_coupling() {
    let f = f_longwave_3d(&Vector3::z()).unwrap();
    let stable = |eta: f64| {
        let form = build_bulk_3d(&CouplingSet::bulk(1.0, 1.0, eta).unwrap(), &f).unwrap();
        symplectic_spectrum(&form).map(|s| s.stable).unwrap_or(false)
    };
    let (mut lo, mut hi) = (0.5, 1.2);
    assert!(stable(lo) && !stable(hi));
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - 3f64.sqrt() / 2.0).abs() < 1e-8, "onset at {lo}");
}

#[test]
fn structure_factor_of_rotated_frame_is_similar() {
    let rot = Rotation3::from_euler_angles(0.3, -0.7, 1.1);
    let k = Vector3::new(0.2, 0.5, 0.84).normalize();
    let f = f_longwave_3d(&k).unwrap().f;
    let g = f_longwave_3d(&(rot * k)).unwrap().f;
    let expected: Matrix3<f64> = rot.matrix() * f * rot.matrix().transpose();
    assert!((g - expected).abs().max() < 1e-14);
}
