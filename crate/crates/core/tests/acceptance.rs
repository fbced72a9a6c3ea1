//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use nalgebra::Vector3;

use polariton::bogoliubov::{matter_prediagonalize, symplectic_spectrum};
use polariton::cli;
use polariton::dispersion::{
    layer_roots, normal_branches, polariton_branches, scan, transverse_branches, Axis, Branch, ModelParams, ScanSpec,
};
use polariton::expdata::{infer_eta_from_eta_prime, model_residuals, Measurement, MeasurementSet, Metadata};
use polariton::hp_algebra;
use polariton::lattice::{
    dipole_sum_sequence, f_longwave_3d, mu_2d, tail_nulling_cutoffs, LatticeFamily, LatticeSpec, StructureFactor,
};
use polariton::meanfield::{condensate_parameters, field_expectations, multistart, stationarity_residual};
use polariton::model::{build_bulk_3d, build_layer_2d, CouplingSet, ModelKind};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn cli_out(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("polariton").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

// The 20 x 20 grid of photon frequency and coupling shared by two criteria.
fn grid() -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(400);
    for i in 0..20 {
        for j in 0..20 {
            pts.push((0.2 + 2.8 * i as f64 / 19.0, 0.86 * j as f64 / 19.0));
        }
    }
    pts
}

// Normal-phase branches straight from the quadratic in Omega^2.
fn oracle_normal(wk: f64, eta: f64, f_perp: f64) -> (f64, f64) {
    let wt2 = 1.0 + 4.0 * eta * eta * f_perp;
    let s = wk * wk + wt2 + 4.0 * eta * eta;
    let r = (s * s - 4.0 * wk * wk * wt2).sqrt();
    let hi2 = 0.5 * (s + r);
    ((wk * wk * wt2 / hi2).sqrt(), hi2.sqrt())
}

fn critical_couplings() -> Outcome {
    let mut worst = Duration::ZERO;
    let mut timed = |args: &[&str]| {
        let t = Instant::now();
        let r = cli_out(args);
        worst = worst.max(t.elapsed());
        r
    };
    let (c1, hop) = timed(&["critical", "--model", "renormalized-hopfield", "--f-perp", "-0.3333333333333333"]);
    let (c2, dicke) = timed(&["critical", "--model", "dicke"]);
    let (c3, bare) = timed(&["critical", "--model", "bare-hopfield"]);
    let hop_v: f64 = hop.trim().parse().unwrap_or(f64::NAN);
    let dicke_v: f64 = dicke.trim().parse().unwrap_or(f64::NAN);
    let ok = c1 == 0
        && c2 == 0
        && c3 == 0
        && (hop_v - 3f64.sqrt() / 2.0).abs() <= 1e-6
        && (dicke_v - 0.5).abs() <= 1e-6
        && bare.trim() == "none"
        && worst < Duration::from_secs(5);
    outcome(
        ok,
        format!("renormalized {hop_v:.8}, dicke {dicke_v:.8}, bare {}, slowest {worst:.2?}", bare.trim()),
    )
}

fn structure_constant() -> Outcome {
    let t = Instant::now();
    match mu_2d(1e-12) {
        Ok(mu) => {
            let v = 4.0 * std::f64::consts::PI * mu.value;
            let el = t.elapsed();
            outcome(
                (v - 6.78).abs() <= 0.01 && el < Duration::from_secs(10),
                format!("4 pi mu = {v:.6} (bound {:.1e}), {el:.2?}", mu.error_bound),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn parameter_relation() -> Outcome {
    match infer_eta_from_eta_prime(1.83, -1.0 / 3.0) {
        Ok(eta) => {
            // eta'^2 = eta^2 / (1 + 4 eta^2 f_perp) must hold for the returned eta
            let back = eta / (1.0 - 4.0 * eta * eta / 3.0).sqrt();
            outcome(
                (eta - 0.78).abs() <= 0.005 && rel(back, 1.83) < 1e-12,
                format!("eta = {eta:.6}, eta' recovered {back:.12}"),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn diagonalization_equivalence() -> Outcome {
    let t = Instant::now();
    let f = match f_longwave_3d(&Vector3::z()) {
        Ok(f) => f,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut one_step: f64 = 0.0;
    let mut two_step: f64 = 0.0;
    for (wk, eta) in grid() {
        let run = || -> polariton::Result<(Vec<f64>, Vec<f64>, (f64, f64))> {
            let form = build_bulk_3d(&CouplingSet::bulk(1.0, wk, eta)?, &f)?;
            let direct = symplectic_spectrum(&form)?.frequencies;
            let pre = symplectic_spectrum(&matter_prediagonalize(&form)?)?.frequencies;
            Ok((direct, pre, normal_branches(wk, 1.0, eta, f.f_perp)?))
        };
        let Ok((direct, pre, (lo, hi))) = run() else {
            return outcome(false, format!("failed at w_k = {wk}, eta = {eta}"));
        };
        let mut expected = vec![lo, lo, hi, hi, (1.0 + 4.0 * eta * eta * f.f_par).sqrt()];
        expected.sort_by(f64::total_cmp);
        for k in 0..5 {
            one_step = one_step.max(rel(direct[k], expected[k]));
            two_step = two_step.max(rel(pre[k], expected[k]));
        }
    }
    let el = t.elapsed();
    outcome(
        one_step < 1e-10 && two_step < 1e-10 && el < Duration::from_secs(30),
        format!("max rel dev full {one_step:.2e}, prediagonalized {two_step:.2e}, {el:.2?}"),
    )
}

fn phase_continuity() -> Outcome {
    let t = Instant::now();
    let f_perp = -1.0 / 3.0;
    let eta_c = 3f64.sqrt() / 2.0;
    let mut worst: f64 = 0.0;
    for wk in [0.6, 0.8, 1.0, 1.2, 1.5] {
        let mut last = f64::INFINITY;
        for m in 8..=14 {
            let d = 10f64.powi(-m);
            let below = transverse_branches(ModelKind::RenormalizedHopfield3D, wk, 1.0, eta_c - d, f_perp);
            let above = transverse_branches(ModelKind::RenormalizedHopfield3D, wk, 1.0, eta_c + d, f_perp);
            let (Ok(b), Ok(a)) = (below, above) else {
                return outcome(false, format!("branch evaluation failed at w_k = {wk}"));
            };
            let gap = (b.0 - a.0).abs().max((b.1 - a.1).abs());
            if gap > last * (1.0 + 1e-9) {
                return outcome(false, format!("jump at w_k = {wk} does not shrink toward eta_c"));
            }
            last = gap;
        }
        worst = worst.max(last);
    }
    let el = t.elapsed();
    outcome(
        worst < 1e-6 && el < Duration::from_secs(5),
        format!("largest jump across eta_c +- 1e-14: {worst:.2e}, {el:.2?}"),
    )
}

fn root_identities() -> Outcome {
    let f_perp = -1.0 / 3.0;
    let mut worst: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for (wk, eta) in grid() {
        let wt2 = 1.0 + 4.0 * eta * eta * f_perp;
        let ep2 = eta * eta / wt2;
        let (lo, hi) = polariton_branches(wk, wt2.sqrt(), ep2.sqrt());
        let (l2, h2) = (lo * lo, hi * hi);
        worst = worst.max(rel(l2 * h2, wk * wk * wt2));
        worst = worst.max(rel(l2 + h2, wk * wk + wt2 * (1.0 + 4.0 * ep2)));
        let (ol, oh) = oracle_normal(wk, eta, f_perp);
        oracle = oracle.max(rel(lo, ol)).max(rel(hi, oh));
    }
    outcome(
        worst < 1e-10 && oracle < 1e-10,
        format!("product/sum max rel dev {worst:.2e}, vs independent roots {oracle:.2e}"),
    )
}

fn longitudinal_invariance() -> Outcome {
    let mut worst_var: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    for eta in [0.1, 0.4, 0.78, 0.85] {
        let mut spec = match ScanSpec::new(Axis::OmegaK, 0.05, 3.0, 120) {
            Ok(s) => s,
            Err(e) => return outcome(false, e.to_string()),
        };
        spec.longitudinal = true;
        let curve = match scan(&ModelParams::new(ModelKind::RenormalizedHopfield3D, eta), &spec) {
            Ok(c) => c,
            Err(e) => return outcome(false, e.to_string()),
        };
        let long: Vec<f64> = curve.branch(Branch::Long).iter().map(|s| s.omega).collect();
        if long.len() != 120 {
            return outcome(false, format!("expected 120 longitudinal samples, got {}", long.len()));
        }
        let max = long.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = long.iter().copied().fold(f64::INFINITY, f64::min);
        worst_var = worst_var.max(max - min);
        worst_dev = worst_dev.max(rel(long[0], (1.0 + 4.0 * eta * eta * 2.0 / 3.0).sqrt()));
    }
    outcome(
        worst_var < 1e-12 && worst_dev < 1e-14,
        format!("variation across scan {worst_var:.2e}, dev from closed form {worst_dev:.2e}"),
    )
}

fn layer_model() -> Outcome {
    let (eta, chi, w1) = (0.3, 0.25, 0.8);
    let wt = (1.0 - 4.0 * chi * chi / 3.0f64).sqrt();
    let ep = eta / wt;
    let single = match layer_roots(wt, ep, &[w1]) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let (lo, hi) = polariton_branches(w1, wt, ep);
    let k1 = rel(single[0], lo).max(rel(single[1], hi));

    let ladder: Vec<f64> = (1..=5).map(|n| w1 * n as f64).collect();
    let roots = match layer_roots(wt, ep, &ladder) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let interlaced =
        roots.len() == 6 && roots[0] < ladder[0] && (0..5).all(|i| ladder[i] < roots[i + 1] && roots[i] < ladder[i]);

    let params = match CouplingSet::layer(1.0, ladder.clone(), eta, chi) {
        Ok(p) => p,
        Err(e) => return outcome(false, e.to_string()),
    };
    let spectrum = match build_layer_2d(&params, 5).and_then(|f| symplectic_spectrum(&f)) {
        Ok(s) => s.frequencies,
        Err(e) => return outcome(false, e.to_string()),
    };
    let odd_dev = ladder
        .iter()
        .map(|w| spectrum.iter().map(|s| (s - w).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    outcome(
        k1 < 1e-10 && interlaced && odd_dev < 1e-12,
        format!("K=1 vs closed form {k1:.2e}, K=5 interlacing {interlaced}, odd-mode shift {odd_dev:.2e}"),
    )
}

fn operator_algebra() -> Outcome {
    let t = Instant::now();
    let (code, text) = cli_out(&["verify-algebra"]);
    let report = hp_algebra::verify_all();
    let el = t.elapsed();
    match report {
        Ok(r) => {
            let collective = (1..=3).all(|n| r.entries.iter().any(|e| e.relation.starts_with(&format!("N={n}:"))));
            let c_pm = r.entries.iter().any(|e| e.relation.contains("sqrt(s(s+d_ab)"));
            let dev = r.max_deviation();
            outcome(
                code == 0 && !text.contains("FAIL") && dev <= 1e-13 && collective && c_pm && el < Duration::from_secs(5),
                format!(
                    "{} asserted relations, max deviation {dev:.2e}, {el:.2?}",
                    r.entries.iter().filter(|e| e.asserted).count()
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn mean_field() -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_e: f64 = 0.0;
    for f_perp in [-1.0 / 3.0, -1.0] {
        let f = StructureFactor::uniaxial(f_perp, 0.0);
        for eta in [0.9, 1.0, 1.5, 3.0] {
            let Ok(coupling) = CouplingSet::bulk(1.0, 1.0, eta) else {
                return outcome(false, "bad coupling");
            };
            let params = condensate_parameters(&coupling, f_perp);
            worst_res = worst_res.max(stationarity_residual(&params, &coupling, &f));
            let (_, _, e) = field_expectations(&params, &f);
            worst_e = worst_e.max(e[0].abs()).max(e[1].abs());
        }
    }
    let Ok(bare) = CouplingSet::bulk(1.0, 1.0, 0.9) else {
        return outcome(false, "bad coupling");
    };
    let report = multistart(&bare, &StructureFactor::uniaxial(0.0, 0.0), 50, 2024);
    let distinct = report.distinct(1e-8);
    let trivial_only = !distinct.is_empty()
        && distinct
            .iter()
            .all(|s| s.a.iter().chain(&s.b).all(|x| x.abs() < 1e-8));
    outcome(
        worst_res < 1e-10 && worst_e < 1e-12 && trivial_only,
        format!(
            "residual {worst_res:.2e}, |E| {worst_e:.2e}, bare multistart {} converged / {} distinct, trivial only {trivial_only}",
            report.converged.len(),
            distinct.len()
        ),
    )
}

fn model_ranking() -> Outcome {
    let meta = Metadata::default();
    let eta = 1.83 / (1.0 + 4.0 * 1.83f64.powi(2) / 3.0).sqrt();
    let rows: Vec<Measurement> = (0..30)
        .map(|i| {
            let photon_ev = 0.8 + 0.08 * i as f64;
            let (lo, _) = oracle_normal(photon_ev / meta.omega0_ev, eta, -1.0 / 3.0);
            Measurement {
                photon_ev,
                lower_ev: lo * meta.omega0_ev,
                sigma_ev: None,
            }
        })
        .collect();
    let Ok(set) = MeasurementSet::new(rows, meta) else {
        return outcome(false, "could not build data set");
    };
    let score = |m| model_residuals(&set, m).map(|r| r.rmse_ev);
    match (
        score(ModelKind::RenormalizedHopfield3D),
        score(ModelKind::DickeLike),
        score(ModelKind::BareHopfield),
    ) {
        (Ok(own), Ok(dicke), Ok(bare)) => outcome(
            own < dicke.min(bare),
            format!("RMSE renormalized {own:.2e} eV, dicke {dicke:.4} eV, bare {bare:.4} eV"),
        ),
        _ => outcome(false, "scoring failed"),
    }
}

fn lattice_sum() -> Outcome {
    let t = Instant::now();
    let run = || -> polariton::Result<(f64, f64)> {
        let spec = LatticeSpec::new(LatticeFamily::Sc, 1.0)?;
        let k = Vector3::z() * 0.05;
        let cutoffs = tail_nulling_cutoffs(k.norm(), 3, 0.0)?;
        let seq = dipole_sum_sequence(&spec, &k, &cutoffs)?;
        let s = seq.extrapolated;
        let perp = 0.5 * (s[(0, 0)] + s[(1, 1)]);
        Ok((perp / s[(2, 2)], s[(2, 2)] / (4.0 * std::f64::consts::PI / 3.0)))
    };
    match run() {
        Ok((ratio, zz)) => {
            // (3 k k - 1) along z: transverse -1, longitudinal 2
            let dev = rel(ratio, -0.5);
            let norm_dev = rel(zz, 2.0);
            let el = t.elapsed();
            outcome(
                dev < 0.02 && norm_dev < 0.02 && el < Duration::from_secs(60),
                format!("S_perp/S_par = {ratio:.6} (rel dev {dev:.2e}), S_zz/(4 pi/3) = {zz:.5}, {el:.2?}"),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("critical couplings", critical_couplings),
        ("layer structure constant", structure_constant),
        ("coupling from renormalized coupling", parameter_relation),
        ("diagonalization equivalence", diagonalization_equivalence),
        ("continuity at the critical coupling", phase_continuity),
        ("branch root identities", root_identities),
        ("longitudinal branch invariance", longitudinal_invariance),
        ("cavity layer roots", layer_model),
        ("operator algebra", operator_algebra),
        ("mean-field consistency", mean_field),
        ("model ranking on synthetic data", model_ranking),
        ("lattice sum long-wave limit", lattice_sum),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        if !result.passed {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if result.passed { "PASS" } else { "FAIL" },
            i + 1,
            result.detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
