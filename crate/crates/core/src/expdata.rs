//! Lower-polariton measurements in energy units and their comparison with
//! the candidate models.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dispersion::transverse_branches;
use crate::error::{Error, Result};
use crate::model::{eta_from_eta_prime, ModelKind, Phase};

pub const TRANSVERSE_F_3D: f64 = -1.0 / 3.0;
pub const HEADER: [&str; 2] = ["omega_k_eV", "omega_LP_eV"];
pub const SIGMA_COLUMN: &str = "sigma_eV";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub photon_ev: f64,
    pub lower_ev: f64,
    pub sigma_ev: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metadata {
    pub omega0_ev: f64,
    pub eps_m: f64,
    pub eta_prime: f64,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            omega0_ev: 1.83,
            eps_m: 1.96,
            eta_prime: 1.83,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    rows: Vec<Measurement>,
    pub meta: Metadata,
}

impl MeasurementSet {
    /// Validates energies and sorts by photon energy.
    pub fn new(mut rows: Vec<Measurement>, meta: Metadata) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        if !(meta.omega0_ev > 0.0 && meta.omega0_ev.is_finite()) {
            return Err(Error::Validation(format!("omega0 must be positive, got {}", meta.omega0_ev)));
        }
        for (i, r) in rows.iter().enumerate() {
            if !(r.photon_ev > 0.0 && r.lower_ev > 0.0 && r.photon_ev.is_finite() && r.lower_ev.is_finite()) {
                return Err(Error::Validation(format!("row {} has a nonpositive energy", i + 1)));
            }
            if let Some(s) = r.sigma_ev {
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(Error::Validation(format!("row {} has a negative uncertainty", i + 1)));
                }
            }
        }
        rows.sort_by(|a, b| a.photon_ev.total_cmp(&b.photon_ev));
        Ok(Self { rows, meta })
    }

    pub fn rows(&self) -> &[Measurement] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `(omega_k / omega0, Omega_LP / omega0)` pairs.
    pub fn reduced(&self) -> Vec<(f64, f64)> {
        let w0 = self.meta.omega0_ev;
        self.rows.iter().map(|r| (r.photon_ev / w0, r.lower_ev / w0)).collect()
    }

    fn has_sigma(&self) -> bool {
        self.rows.iter().any(|r| r.sigma_ev.is_some())
    }
}

pub fn load_measurements(path: impl AsRef<Path>, meta: Metadata) -> Result<MeasurementSet> {
    let file = std::fs::File::open(path.as_ref())?;
    read_measurements(file, meta)
}

pub fn read_measurements(reader: impl std::io::Read, meta: Metadata) -> Result<MeasurementSet> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = csv.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let names: Vec<&str> = header.iter().collect();
    let with_sigma = match names.as_slice() {
        [a, b] if [*a, *b] == HEADER => false,
        [a, b, c] if [*a, *b] == HEADER && *c == SIGMA_COLUMN => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `omega_k_eV,omega_LP_eV[,sigma_eV]`, got `{}`", names.join(",")),
            })
        }
    };
    let mut rows = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing column {}", i + 1),
            })?;
            raw.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("`{raw}`: {e}"),
            })
        };
        let sigma = if with_sigma {
            match record.get(2) {
                Some("") | None => None,
                Some(_) => Some(field(2)?),
            }
        } else {
            None
        };
        rows.push(Measurement {
            photon_ev: field(0)?,
            lower_ev: field(1)?,
            sigma_ev: sigma,
        });
    }
    MeasurementSet::new(rows, meta)
}

/// Shortest round-trip formatting, so a saved set reloads bit-identically.
pub fn write_measurements(set: &MeasurementSet, writer: impl std::io::Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let sigma = set.has_sigma();
    if sigma {
        csv.write_record([HEADER[0], HEADER[1], SIGMA_COLUMN])?;
    } else {
        csv.write_record(HEADER)?;
    }
    for r in &set.rows {
        let mut rec = vec![format!("{}", r.photon_ev), format!("{}", r.lower_ev)];
        if sigma {
            rec.push(r.sigma_ev.map(|s| format!("{s}")).unwrap_or_default());
        }
        csv.write_record(&rec)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn save_measurements(set: &MeasurementSet, path: impl AsRef<Path>) -> Result<()> {
    write_measurements(set, std::fs::File::create(path.as_ref())?)
}

/// Bare coupling reproducing a given dipole-renormalized coupling.
pub fn infer_eta_from_eta_prime(eta_prime: f64, f_perp: f64) -> Result<f64> {
    if !(f_perp < 0.0) {
        return Err(Error::Domain(format!("f_perp must be negative, got {f_perp}")));
    }
    if !(eta_prime > 0.0) {
        return Err(Error::Domain(format!("eta' must be positive, got {eta_prime}")));
    }
    eta_from_eta_prime(eta_prime, f_perp)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointResidual {
    pub photon_ev: f64,
    pub measured_ev: f64,
    pub model_ev: f64,
    /// `measured - model`, in eV.
    pub residual_ev: f64,
    /// `measured - model`, in units of `omega0`.
    pub residual_reduced: f64,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub model: ModelKind,
    pub eta: f64,
    pub points: Vec<PointResidual>,
    pub rmse_ev: f64,
    pub max_abs_ev: f64,
}

#[derive(Serialize)]
struct Summary {
    rmse: f64,
    max_abs: f64,
    n: usize,
}

impl ResidualReport {
    pub fn table(&self) -> String {
        let mut out = String::from("omega_k_eV,measured_eV,model_eV,residual_eV,phase\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:.6},{:.6},{:.6},{:.6e},{}",
                p.photon_ev, p.measured_ev, p.model_ev, p.residual_ev, p.phase
            );
        }
        out
    }

    /// `{"rmse": .., "max_abs": .., "n": ..}` in eV.
    pub fn summary_json(&self) -> String {
        serde_json::to_string(&Summary {
            rmse: self.rmse_ev,
            max_abs: self.max_abs_ev,
            n: self.points.len(),
        })
        .expect("plain numbers serialize")
    }
}

/// Coupling at which each model is scored: the renormalized model and the
/// comparison models all use the bare coupling inferred from the set's `eta'`
/// with the cubic-lattice transverse factor.
pub fn scoring_eta(meta: &Metadata) -> Result<f64> {
    infer_eta_from_eta_prime(meta.eta_prime, TRANSVERSE_F_3D)
}

/// Lower branch of `model` in reduced units at `omega_k / omega0`.
pub fn model_lower_branch(model: ModelKind, wk: f64, eta: f64) -> Result<(f64, Phase)> {
    let (lo, _, phase) = transverse_branches(model, wk, 1.0, eta, TRANSVERSE_F_3D)?;
    Ok((lo, phase))
}

pub fn model_residuals(data: &MeasurementSet, model: ModelKind) -> Result<ResidualReport> {
    if matches!(model, ModelKind::Layer2D) {
        return Err(Error::Domain("the layer model has no single lower branch to score".into()));
    }
    let eta = scoring_eta(&data.meta)?;
    let w0 = data.meta.omega0_ev;
    let mut points = Vec::with_capacity(data.len());
    for (r, (wk, measured)) in data.rows.iter().zip(data.reduced()) {
        let (lo, phase) = model_lower_branch(model, wk, eta)?;
        let model_ev = lo * w0;
        points.push(PointResidual {
            photon_ev: r.photon_ev,
            measured_ev: r.lower_ev,
            model_ev,
            residual_ev: r.lower_ev - model_ev,
            residual_reduced: measured - lo,
            phase,
        });
    }
    let n = points.len() as f64;
    let rmse_ev = (points.iter().map(|p| p.residual_ev * p.residual_ev).sum::<f64>() / n).sqrt();
    let max_abs_ev = points.iter().map(|p| p.residual_ev.abs()).fold(0.0, f64::max);
    Ok(ResidualReport {
        model,
        eta,
        points,
        rmse_ev,
        max_abs_ev,
    })
}

/// Noise-free lower-polariton data from `model` on `n` photon energies
/// spanning `[lo_ev, hi_ev]`, built through the same path as the scoring.
pub fn synthesize(model: ModelKind, meta: Metadata, lo_ev: f64, hi_ev: f64, n: usize) -> Result<MeasurementSet> {
    if n < 2 || !(lo_ev > 0.0 && hi_ev > lo_ev) {
        return Err(Error::Domain("need at least two points on an increasing positive range".into()));
    }
    let eta = scoring_eta(&meta)?;
    let w0 = meta.omega0_ev;
    let rows = (0..n)
        .map(|i| {
            let photon_ev = lo_ev + (hi_ev - lo_ev) * i as f64 / (n - 1) as f64;
            let (lo, _) = model_lower_branch(model, photon_ev / w0, eta)?;
            Ok(Measurement {
                photon_ev,
                lower_ev: lo * w0,
                sigma_ev: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(rows, meta)
}
