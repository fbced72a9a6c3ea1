//! Finite-matrix checks of the two-level operator algebra with a threefold
//! degenerate excited state and of its Holstein-Primakoff bosonization.
//!
//! Site operators act on the basis `{|+1>, |+2>, |+3>, |->}`. Boson spaces
//! are truncated by total occupation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ASSERT_TOL: f64 = 1e-13;
const MAX_CHAIN: usize = 4;
const COLLECTIVE_MAX_TOTAL: usize = 2;

type Real = DMatrix<f64>;
type Cplx = DMatrix<Complex64>;

const GROUND: usize = 3;

/// `sigma` matrices of one site (`S = sigma` for the ladder operators and
/// `S^z = sigma^z / 2` with `hbar = 1`).
#[derive(Clone, Debug)]
pub struct SiteOperatorSet {
    pub lower: [Real; 3],
    pub raise: [Real; 3],
    pub x: [Real; 3],
    pub y: [Cplx; 3],
    pub z: Real,
}

impl SiteOperatorSet {
    pub fn s_z(&self) -> Real {
        &self.z * 0.5
    }
}

pub fn build_site_operators() -> SiteOperatorSet {
    let lower: [Real; 3] = std::array::from_fn(|a| {
        let mut m = Real::zeros(4, 4);
        m[(GROUND, a)] = 1.0;
        m
    });
    let raise = lower.clone().map(|m| m.transpose());
    let x = std::array::from_fn(|a| &lower[a] + &raise[a]);
    let y = std::array::from_fn(|a| {
        (&lower[a] - &raise[a]).map(|v| Complex64::new(0.0, v))
    });
    let z = Real::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
    SiteOperatorSet {
        lower,
        raise,
        x,
        y,
        z,
    }
}

#[derive(Clone, Debug)]
pub struct ReportEntry {
    pub relation: String,
    pub deviation: f64,
    /// Diagnostics are reported but never fail the report.
    pub asserted: bool,
}

impl ReportEntry {
    pub fn passed(&self) -> bool {
        !self.asserted || self.deviation <= ASSERT_TOL
    }
}

#[derive(Clone, Debug, Default)]
pub struct AlgebraReport {
    pub entries: Vec<ReportEntry>,
}

impl AlgebraReport {
    fn check(&mut self, relation: impl Into<String>, deviation: f64) {
        self.entries.push(ReportEntry {
            relation: relation.into(),
            deviation,
            asserted: true,
        });
    }

    fn diagnostic(&mut self, relation: impl Into<String>, deviation: f64) {
        self.entries.push(ReportEntry {
            relation: relation.into(),
            deviation,
            asserted: false,
        });
    }

    pub fn extend(&mut self, other: AlgebraReport) {
        self.entries.extend(other.entries);
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(ReportEntry::passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.asserted)
            .map(|e| e.deviation)
            .fold(0.0, f64::max)
    }

    /// The first failing relation as an error.
    pub fn into_result(self) -> Result<Self> {
        match self.entries.iter().find(|e| !e.passed()) {
            Some(e) => Err(Error::AlgebraViolation {
                relation: e.relation.clone(),
                deviation: e.deviation,
            }),
            None => Ok(self),
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let status = match (e.asserted, e.passed()) {
                (false, _) => "info",
                (true, true) => "pass",
                (true, false) => "FAIL",
            };
            out.push_str(&format!("{status:<5} {:>11.3e}  {}\n", e.deviation, e.relation));
        }
        out
    }
}

fn max_abs(m: &Real) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn max_abs_c(m: &Cplx) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

fn commutator(a: &Real, b: &Real) -> Real {
    a * b - b * a
}

fn basis_vec(i: usize, dim: usize) -> nalgebra::DVector<f64> {
    let mut v = nalgebra::DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// Check every single-site identity; fails with the first violated relation.
pub fn verify_site_algebra(ops: &SiteOperatorSet) -> Result<AlgebraReport> {
    let mut r = AlgebraReport::default();
    let sz = ops.s_z();
    let s = 0.5;
    for a in 0..3 {
        let n = a + 1;
        r.check(
            format!("[Sz, S+_{n}] - S+_{n} = 0"),
            max_abs(&(commutator(&sz, &ops.raise[a]) - &ops.raise[a])),
        );
        r.check(
            format!("[Sz, S-_{n}] + S-_{n} = 0"),
            max_abs(&(commutator(&sz, &ops.lower[a]) + &ops.lower[a])),
        );
        r.check(
            format!("S+_{n} = (S-_{n})^dag"),
            max_abs(&(&ops.raise[a] - ops.lower[a].transpose())),
        );
        r.check(format!("(S-_{n})^2 = 0"), max_abs(&(&ops.lower[a] * &ops.lower[a])));
        r.check(
            format!("sigma^x_{n} = sigma-_{n} + sigma+_{n}"),
            max_abs(&(&ops.x[a] - &ops.lower[a] - &ops.raise[a])),
        );
        let y_expected = (&ops.lower[a] - &ops.raise[a]).map(|v| Complex64::new(0.0, v));
        r.check(
            format!("sigma^y_{n} = i(sigma-_{n} - sigma+_{n}), Hermitian"),
            max_abs_c(&(&ops.y[a] - y_expected)).max(max_abs_c(&(&ops.y[a] - ops.y[a].adjoint()))),
        );
        for b in 0..3 {
            r.check(
                format!("S+_{n} S+_{} = 0", b + 1),
                max_abs(&(&ops.raise[a] * &ops.raise[b])),
            );
        }
    }
    let zdiag = ops.z.diagonal();
    r.check(
        "sigma^z = diag(1, 1, 1, -1)",
        max_abs(&(&ops.z - Real::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]))))
            .max((zdiag.sum() - 2.0).abs()),
    );

    // channel coefficients <m+-1_b| S+-_a |m_b> against
    // sqrt(s(s + d_ab) - m(m +- d_ab)), for m = -1/2 (|->) and m = +1/2 (|+_b>)
    let mut worst_c: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let d = if a == b { 1.0 } else { 0.0 };
            for (m, ket) in [(-0.5, GROUND), (0.5, b)] {
                for (sign, op) in [(1.0, &ops.raise[a]), (-1.0, &ops.lower[a])] {
                    let target_m: f64 = m + sign;
                    let expected = if target_m.abs() > 0.5 + 1e-12 {
                        0.0
                    } else {
                        (s * (s + d) - m * (m + sign * d)).max(0.0).sqrt()
                    };
                    let bra = if target_m > 0.0 { b } else { GROUND };
                    let actual = if target_m.abs() > 0.5 + 1e-12 {
                        (op * basis_vec(ket, 4)).norm()
                    } else {
                        (basis_vec(bra, 4).transpose() * op * basis_vec(ket, 4))[(0, 0)]
                    };
                    worst_c = worst_c.max((actual - expected).abs());
                    if a == b {
                        let other = if sign > 0.0 { &ops.lower[a] } else { &ops.raise[a] };
                        let expect = s * (s + d) - m * (m + sign * d);
                        let value = (basis_vec(ket, 4).transpose() * other * op * basis_vec(ket, 4))[(0, 0)];
                        worst_norm = worst_norm.max((value - expect).abs());
                    }
                }
            }
        }
    }
    r.check("<m+-1_b|S+-_a|m_b> = sqrt(s(s+d_ab) - m(m+-d_ab))", worst_c);
    r.check("<m_a|S-+_a S+-_a|m_a> = s(s+1) - m(m+-1)", worst_norm);
    r.into_result()
}

/// Occupation-number basis of `n_modes` bosons with total occupation at most
/// `max_total`, ordered by total and then lexicographically (descending).
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub n_modes: usize,
    pub max_total: usize,
    pub states: Vec<Vec<usize>>,
}

impl FockSpace {
    pub fn new(n_modes: usize, max_total: usize) -> Self {
        let mut states = Vec::new();
        for total in 0..=max_total {
            let mut current = vec![0; n_modes];
            compositions(total, 0, &mut current, &mut states);
        }
        Self {
            n_modes,
            max_total,
            states,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        self.states.iter().position(|s| s == occupation)
    }

    pub fn total(&self, i: usize) -> usize {
        self.states[i].iter().sum()
    }

    pub fn annihilate(&self, mode: usize) -> Real {
        let dim = self.dim();
        let mut m = Real::zeros(dim, dim);
        for (j, state) in self.states.iter().enumerate() {
            let n = state[mode];
            if n == 0 {
                continue;
            }
            let mut lowered = state.clone();
            lowered[mode] -= 1;
            let i = self.index_of(&lowered).expect("lowered state stays in the space");
            m[(i, j)] = (n as f64).sqrt();
        }
        m
    }

    pub fn number(&self) -> Real {
        Real::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| self.total(i) as f64),
        ))
    }

    /// Indices of states with total occupation below `limit`.
    pub fn below(&self, limit: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.total(i) < limit).collect()
    }
}

fn compositions(remaining: usize, mode: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if mode == current.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        current[mode] = k;
        compositions(remaining - k, mode + 1, current, out);
    }
    current[mode] = 0;
}

fn restrict(m: &Real, rows: &[usize], cols: &[usize]) -> Real {
    Real::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn restrict_c(m: &Cplx, rows: &[usize], cols: &[usize]) -> Cplx {
    Cplx::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Three boson modes (one per orientation) on a truncated space.
#[derive(Clone, Debug)]
pub struct TruncatedBosonSet {
    pub space: FockSpace,
    pub annihilate: [Real; 3],
}

impl TruncatedBosonSet {
    pub fn create(&self, mode: usize) -> Real {
        self.annihilate[mode].transpose()
    }
}

/// Bosonized spin operators on a truncated three-mode space.
#[derive(Clone, Debug)]
pub struct HpMap {
    pub bosons: TruncatedBosonSet,
    pub raise: [Real; 3],
    pub lower: [Real; 3],
    pub s_z: Real,
    /// Fock indices of `{|1_1>, |1_2>, |1_3>, |0>}`, matching the site basis.
    pub physical: [usize; 4],
}

/// `S+_a = b_a^dag sqrt(1 - sum b^dag b)`, `S-_a = sqrt(1 - sum b^dag b) b_a`,
/// `S^z = sum b^dag b - 1/2`, with the square root clamped to zero where its
/// argument is negative.
pub fn hp_map_matrices(n_max: usize) -> Result<HpMap> {
    if n_max < 1 {
        return Err(Error::Domain(format!("truncation must be at least 1, got {n_max}")));
    }
    let space = FockSpace::new(3, n_max);
    let annihilate: [Real; 3] = std::array::from_fn(|a| space.annihilate(a));
    let number = space.number();
    let root = number.map(|n| n).diagonal().map(|n| (1.0 - n).max(0.0).sqrt());
    let root = Real::from_diagonal(&root);
    let raise: [Real; 3] = std::array::from_fn(|a| annihilate[a].transpose() * &root);
    let lower: [Real; 3] = std::array::from_fn(|a| &root * &annihilate[a]);
    let s_z = &number - Real::identity(space.dim(), space.dim()) * 0.5;
    let physical = [
        space.index_of(&[1, 0, 0]).unwrap(),
        space.index_of(&[0, 1, 0]).unwrap(),
        space.index_of(&[0, 0, 1]).unwrap(),
        space.index_of(&[0, 0, 0]).unwrap(),
    ];
    Ok(HpMap {
        bosons: TruncatedBosonSet { space, annihilate },
        raise,
        lower,
        s_z,
        physical,
    })
}

/// Compare the bosonized operators with the site operators on the physical
/// subspace and check the boson algebra below the truncation edge.
pub fn verify_hp_map(map: &HpMap, ops: &SiteOperatorSet) -> Result<AlgebraReport> {
    let mut r = AlgebraReport::default();
    let n_max = map.bosons.space.max_total;
    let phys = map.physical.to_vec();
    let dim = map.bosons.space.dim();
    let all: Vec<usize> = (0..dim).collect();
    let outside: Vec<usize> = all.iter().copied().filter(|i| !phys.contains(i)).collect();
    let tag = format!("n_max={n_max}");

    for a in 0..3 {
        let n = a + 1;
        r.check(
            format!("{tag}: HP S+_{n} = site S+_{n} on physical states"),
            max_abs(&(restrict(&map.raise[a], &phys, &phys) - &ops.raise[a])),
        );
        r.check(
            format!("{tag}: HP S-_{n} = site S-_{n} on physical states"),
            max_abs(&(restrict(&map.lower[a], &phys, &phys) - &ops.lower[a])),
        );
        let leak = if outside.is_empty() {
            0.0
        } else {
            max_abs(&restrict(&map.raise[a], &outside, &phys)).max(max_abs(&restrict(&map.lower[a], &outside, &phys)))
        };
        r.check(format!("{tag}: S+-_{n} keep physical states physical"), leak);
        let linear_lower = &map.bosons.annihilate[a];
        let linear_raise = map.bosons.create(a);
        r.check(
            format!("{tag}: S-_{n} - b_{n} = 0 on <=1 excitation"),
            max_abs(&restrict(&(&map.lower[a] - linear_lower), &phys, &phys))
                .max(max_abs(&restrict(&(&map.raise[a] - linear_raise), &phys, &phys))),
        );
        if n_max >= 2 {
            let two = map.bosons.space.below(3);
            r.diagnostic(
                format!("{tag}: S-_{n} - b_{n} on <=2 excitations (low-excitation error)"),
                max_abs(&restrict(&(&map.lower[a] - linear_lower), &two, &two)),
            );
        }
    }
    r.check(
        format!("{tag}: HP Sz = site Sz on physical states"),
        max_abs(&(restrict(&map.s_z, &phys, &phys) - ops.s_z())),
    );
    let inner = map.bosons.space.below(n_max);
    let id = Real::identity(dim, dim);
    let mut worst: f64 = 0.0;
    let mut worst_aa: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let c = &map.bosons.annihilate[a] * map.bosons.create(b) - map.bosons.create(b) * &map.bosons.annihilate[a];
            let target = if a == b { id.clone() } else { Real::zeros(dim, dim) };
            worst = worst.max(max_abs(&restrict(&(c - target), &inner, &inner)));
            let cc = commutator(&map.bosons.annihilate[a], &map.bosons.annihilate[b]);
            worst_aa = worst_aa.max(max_abs(&cc));
        }
    }
    r.check(format!("{tag}: [b_a, b_b^dag] = d_ab below the truncation"), worst);
    r.check(format!("{tag}: [b_a, b_b] = 0"), worst_aa);
    for a in 0..3 {
        for b in 0..3 {
            r.check(
                format!("{tag}: HP S+_{} S+_{} = 0 on physical states", a + 1, b + 1),
                max_abs(&restrict(&(&map.raise[a] * &map.raise[b]), &all, &phys)),
            );
        }
    }
    // a two-level Hamiltonian fragment built from the mapped operators
    let h = &map.s_z * 1.3 + (&map.raise[0] + &map.lower[0]) * 0.7 + (&map.raise[1] * &map.lower[2]) * 0.2
        + (&map.raise[2] * &map.lower[1]) * 0.2;
    r.check(format!("{tag}: mapped Hamiltonian fragment is Hermitian"), max_abs(&(&h - h.transpose())));
    r.into_result()
}

/// Boson operators of an `N`-site periodic chain (three orientations per
/// site), with plane-wave modes at `k = 2 pi m / N`.
#[derive(Clone, Debug)]
pub struct CollectiveModes {
    pub n_sites: usize,
    pub space: FockSpace,
    /// `site[n][a]`.
    pub site: Vec<[Real; 3]>,
}

impl CollectiveModes {
    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * std::f64::consts::PI * m as f64 / self.n_sites as f64
    }

    /// `b_{k,a} = N^-1/2 sum_n exp(-i k n) b_{n,a}`.
    pub fn b_k(&self, m: usize, a: usize) -> Cplx {
        let k = self.wavenumber(m);
        let norm = (self.n_sites as f64).sqrt();
        let dim = self.space.dim();
        let mut out = Cplx::zeros(dim, dim);
        for (n, ops) in self.site.iter().enumerate() {
            let phase = Complex64::from_polar(1.0 / norm, -k * n as f64);
            out += ops[a].map(|v| phase * v);
        }
        out
    }
}

pub fn collective_mode_matrices(n_sites: usize) -> Result<CollectiveModes> {
    if n_sites == 0 {
        return Err(Error::Domain("the chain needs at least one site".into()));
    }
    if n_sites > MAX_CHAIN {
        return Err(Error::SizeLimit {
            requested: n_sites,
            limit: MAX_CHAIN,
        });
    }
    let space = FockSpace::new(3 * n_sites, COLLECTIVE_MAX_TOTAL);
    let site = (0..n_sites)
        .map(|n| std::array::from_fn(|a| space.annihilate(3 * n + a)))
        .collect();
    Ok(CollectiveModes {
        n_sites,
        space,
        site,
    })
}

/// Commutators of the plane-wave modes and the number-operator identity.
pub fn verify_collective(modes: &CollectiveModes) -> Result<AlgebraReport> {
    let mut r = AlgebraReport::default();
    let n = modes.n_sites;
    let dim = modes.space.dim();
    let inner = modes.space.below(modes.space.max_total);
    let id = Cplx::identity(dim, dim);
    let bk: Vec<[Cplx; 3]> = (0..n).map(|m| std::array::from_fn(|a| modes.b_k(m, a))).collect();
    let mut worst: f64 = 0.0;
    let mut worst_aa: f64 = 0.0;
    for m in 0..n {
        for mp in 0..n {
            for a in 0..3 {
                for b in 0..3 {
                    let x = &bk[m][a];
                    let y = &bk[mp][b];
                    let c = x * y.adjoint() - y.adjoint() * x;
                    let target = if m == mp && a == b { id.clone() } else { Cplx::zeros(dim, dim) };
                    worst = worst.max(max_abs_c(&restrict_c(&(c - target), &inner, &inner)));
                    worst_aa = worst_aa.max(max_abs_c(&(x * y - y * x)));
                }
            }
        }
    }
    r.check(format!("N={n}: [b_k,a, b_k',b^dag] = d_kk' d_ab below the truncation"), worst);
    r.check(format!("N={n}: [b_k,a, b_k',b] = 0"), worst_aa);
    let mut site_number = Cplx::zeros(dim, dim);
    let mut mode_number = Cplx::zeros(dim, dim);
    for a in 0..3 {
        for ops in &modes.site {
            site_number += (ops[a].transpose() * &ops[a]).map(|v| Complex64::new(v, 0.0));
        }
        for bk_m in &bk {
            mode_number += bk_m[a].adjoint() * &bk_m[a];
        }
    }
    r.check(
        format!("N={n}: sum_n b_n^dag b_n = sum_k b_k^dag b_k"),
        max_abs_c(&(site_number - mode_number)),
    );
    r.into_result()
}

/// The full suite: site algebra, the bosonization for `n_max` in 1..=3 and
/// plane-wave modes for chains of 1 to 3 sites.
pub fn verify_all() -> Result<AlgebraReport> {
    let ops = build_site_operators();
    let mut report = verify_site_algebra(&ops)?;
    for n_max in 1..=3 {
        report.extend(verify_hp_map(&hp_map_matrices(n_max)?, &ops)?);
    }
    for n in 1..=3 {
        report.extend(verify_collective(&collective_mode_matrices(n)?)?);
    }
    Ok(report)
}
