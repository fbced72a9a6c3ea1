//! Command-line front end. `run` is the whole program; the binary only
//! forwards process arguments and standard streams.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde::Deserialize;

use crate::dispersion::{critical_coupling, scan, Axis, DispersionCurve, ModelParams, ScanSpec};
use crate::error::{Error, Result};
use crate::expdata::{self, Metadata};
use crate::lattice::{dipole_sum_sequence, tail_nulling_cutoffs, tensor_components, LatticeFamily, LatticeSpec};
use crate::model::{eta_from_eta_prime, soft_mode_coupling, ModelKind, Phase};
use crate::{hp_algebra, meanfield, plot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "polariton", version, about = "Polaritons of dipole lattices coupled to cavity light")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polariton branches against photon frequency.
    Dispersion(CurveArgs),
    /// Polariton branches against the light-matter coupling at fixed photon frequency.
    ScanCoupling(CurveArgs),
    /// Critical coupling of a model at resonance, or `none`.
    Critical {
        #[arg(long)]
        model: ModelKind,
        /// Transverse structure factor.
        #[arg(long, default_value_t = -1.0 / 3.0, allow_hyphen_values = true)]
        f_perp: f64,
    },
    /// Shell-by-shell dipole lattice sums and their extrapolation.
    LatticeSum(LatticeArgs),
    /// Order parameter and renormalized matter frequency against coupling.
    PhaseDiagram {
        #[arg(long, default_value_t = -1.0 / 3.0, allow_hyphen_values = true)]
        f_perp: f64,
        /// Coupling range `min:max:samples`.
        #[arg(long, default_value = "0:2:201")]
        eta: RangeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the operator algebra and the boson mapping on small matrices.
    VerifyAlgebra,
    /// Score a model against measured lower-polariton energies.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: ModelKind,
        #[arg(long, default_value_t = 1.83)]
        eta_prime: f64,
        #[arg(long = "omega0-ev", default_value_t = 1.83)]
        omega0_ev: f64,
        #[arg(long = "eps-m", default_value_t = 1.96)]
        eps_m: f64,
    },
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long, conflicts_with = "eta_prime")]
    pub eta: Option<String>,
    /// Dipole-renormalized coupling, converted with the transverse factor.
    #[arg(long)]
    pub eta_prime: Option<f64>,
    /// Photon frequency: a range `min:max:samples` for `dispersion`, a value for `scan-coupling`.
    #[arg(long)]
    pub wk: Option<String>,
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Layer dipole coupling.
    #[arg(long)]
    pub chi: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub f_perp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f_par: Option<f64>,
    /// Also emit the longitudinal branch.
    #[arg(long)]
    pub longitudinal: bool,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Never render SVG, even if a path is configured.
    #[arg(long)]
    pub csv_only: bool,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[arg(long, default_value = "sc")]
    pub lattice: LatticeFamily,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Wavevector magnitude in units of `1/a`.
    #[arg(long, default_value_t = 0.05)]
    pub k: f64,
    /// Propagation direction `x,y,z` (normalized).
    #[arg(long, default_value = "0,0,1")]
    pub direction: String,
    /// Explicit cutoff radii `r1,r2,..`; by default the first zeros of `j1(|k| r)`.
    #[arg(long)]
    pub cutoffs: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub shells: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `min:max:samples`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeArg {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl std::str::FromStr for RangeArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("expected `min:max:samples`, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let samples = parts[2].trim().parse().map_err(|_| bad())?;
        ScanSpec::new(Axis::OmegaK, min, max, samples)?;
        Ok(Self { min, max, samples })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

/// JSON run configuration for the curve commands.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<String>,
    pub eta: Option<f64>,
    pub eta_prime: Option<f64>,
    pub omega0: Option<f64>,
    pub omega_k: Option<OneOrMany>,
    pub chi: Option<f64>,
    pub k_max: Option<usize>,
    pub f_perp: Option<f64>,
    pub f_par: Option<f64>,
    pub axis: Option<AxisConfig>,
    pub longitudinal: Option<bool>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub csv_only: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

struct CurveJob {
    params: ModelParams,
    spec: ScanSpec,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
}

fn resolve_curve(args: &CurveArgs, axis: Axis) -> Result<CurveJob> {
    let cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let kind = match (&args.model, &cfg.model) {
        (Some(m), _) => *m,
        (None, Some(name)) => name.parse()?,
        (None, None) => ModelKind::RenormalizedHopfield3D,
    };
    let mut params = ModelParams::new(kind, 0.0);
    if let Some(w0) = args.omega0.or(cfg.omega0) {
        if !(w0 > 0.0) {
            return Err(Error::Config(format!("omega0 must be positive, got {w0}")));
        }
        params.omega0 = w0;
    }
    params.f_perp = args.f_perp.or(cfg.f_perp).unwrap_or(params.f_perp);
    params.f_par = args.f_par.or(cfg.f_par).unwrap_or(params.f_par);
    params.k_max = args.k_max.or(cfg.k_max).unwrap_or(params.k_max);
    params.chi = args.chi.or(cfg.chi);
    if let Some(OneOrMany::Many(ladder)) = &cfg.omega_k {
        if ladder.is_empty() {
            return Err(Error::Config("omega_k list is empty".into()));
        }
        params.omega_k = ladder.clone();
    }
    if let Some(OneOrMany::One(w)) = &cfg.omega_k {
        params.omega_k = vec![*w];
    }

    let eta_arg = args.eta.clone();
    let eta_prime = if args.eta.is_some() { None } else { args.eta_prime.or(cfg.eta_prime) };
    let explicit_eta = match (&eta_arg, args.eta_prime) {
        (Some(_), _) | (None, Some(_)) => None,
        (None, None) => cfg.eta,
    };

    let spec = match axis {
        Axis::OmegaK => {
            let range = match (&args.wk, cfg.axis) {
                (Some(text), _) => text.parse::<RangeArg>()?,
                (None, Some(a)) => RangeArg {
                    min: a.min,
                    max: a.max,
                    samples: a.samples,
                },
                (None, None) => RangeArg {
                    min: 0.05,
                    max: 3.0,
                    samples: 200,
                },
            };
            params.eta = match (&eta_arg, eta_prime, explicit_eta) {
                (Some(text), _, _) => parse_f64(text, "eta")?,
                (None, Some(ep), _) => eta_from_eta_prime(ep, params.f_perp).map_err(config)?,
                (None, None, Some(e)) => e,
                (None, None, None) => return Err(Error::Config("give --eta or --eta-prime".into())),
            };
            ScanSpec::new(axis, range.min, range.max, range.samples)?
        }
        Axis::Eta => {
            if let Some(text) = &args.wk {
                params.omega_k = vec![parse_f64(text, "wk")? * params.omega0];
            }
            let range = match (&eta_arg, cfg.axis) {
                (Some(text), _) => text.parse::<RangeArg>()?,
                (None, Some(a)) => RangeArg {
                    min: a.min,
                    max: a.max,
                    samples: a.samples,
                },
                (None, None) => RangeArg {
                    min: 0.0,
                    max: 1.5,
                    samples: 151,
                },
            };
            ScanSpec::new(axis, range.min, range.max, range.samples)?
        }
    };
    if !(params.eta >= 0.0) {
        return Err(Error::Config(format!("coupling must be nonnegative, got {}", params.eta)));
    }
    let mut spec = spec;
    spec.longitudinal = args.longitudinal || cfg.longitudinal.unwrap_or(false);
    let csv_only = args.csv_only || cfg.csv_only.unwrap_or(false);
    let svg = if csv_only { None } else { args.svg.clone().or(cfg.svg) };
    Ok(CurveJob {
        params,
        spec,
        out: args.out.clone().or(cfg.out),
        svg,
    })
}

fn config(e: Error) -> Error {
    Error::Config(e.to_string())
}

fn parse_f64(text: &str, what: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| Error::Config(format!("--{what} expects a number, got `{text}`")))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_curve(args: &CurveArgs, axis: Axis, out: &mut dyn Write) -> Result<()> {
    let job = resolve_curve(args, axis)?;
    let curve: DispersionCurve = scan(&job.params, &job.spec)?;
    emit(&curve.to_csv(), job.out.as_deref(), out)?;
    if let Some(path) = &job.svg {
        let title = format!("{} at eta = {:.4}", job.params.kind, job.params.eta);
        let title = if axis == Axis::Eta {
            format!("{} at omega_k = {:.4}", job.params.kind, job.params.omega_k[0])
        } else {
            title
        };
        plot::emit_plot(&curve, &title, path)?;
    }
    Ok(())
}

fn run_lattice(args: &LatticeArgs, out: &mut dyn Write) -> Result<()> {
    let spec = LatticeSpec::new(args.lattice, args.a)?;
    let dir: Vec<f64> = args
        .direction
        .split(',')
        .map(|s| parse_f64(s, "direction"))
        .collect::<Result<_>>()?;
    if dir.len() != 3 {
        return Err(Error::Config("--direction takes three components".into()));
    }
    let dir = Vector3::new(dir[0], dir[1], dir[2]);
    if dir.norm() == 0.0 {
        return Err(Error::Config("--direction must be nonzero".into()));
    }
    let k = dir.normalize() * (args.k / args.a);
    let cutoffs = match &args.cutoffs {
        Some(list) => list.split(',').map(|s| parse_f64(s, "cutoffs")).collect::<Result<Vec<_>>>()?,
        None if args.k > 0.0 => tail_nulling_cutoffs(k.norm(), args.shells.max(1), 0.0)?,
        None => return Err(Error::Config("at k = 0 give explicit --cutoffs".into())),
    };
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("cutoffs must increase".into()));
    }
    let seq = dipole_sum_sequence(&spec, &k, &cutoffs)?;
    let mut text = String::from("r_cut,S_xx,S_yy,S_zz,S_xy,S_xz,S_yz,extrapolated\n");
    let row = |r: &str, m: &nalgebra::Matrix3<f64>, extrapolated: bool| {
        let c = tensor_components(m);
        format!(
            "{r},{},{},{},{},{},{},{extrapolated}\n",
            c[0], c[1], c[2], c[3], c[4], c[5]
        )
    };
    for (r, m) in seq.cutoffs.iter().zip(&seq.partial) {
        text.push_str(&row(&format!("{r}"), m, false));
    }
    text.push_str(&row("inf", &seq.extrapolated, true));
    emit(&text, args.out.as_deref(), out)
}

fn run_phase_diagram(f_perp: f64, range: RangeArg, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let spec = ScanSpec::new(Axis::Eta, range.min, range.max, range.samples)?;
    if spec.min < 0.0 {
        return Err(Error::Config("couplings must be nonnegative".into()));
    }
    let eta_c = soft_mode_coupling(f_perp);
    let mut text = String::from("eta,order_parameter,omega_tilde_perp,phase\n");
    for eta in spec.points() {
        let condensed = eta_c.is_some_and(|c| eta > c);
        let (order, omega, phase) = if condensed {
            let w = (16.0 * eta.powi(4) * f_perp * f_perp - 1.0).sqrt();
            (meanfield::order_parameter(eta, f_perp), w, Phase::Condensed)
        } else {
            let w = (1.0 + 4.0 * eta * eta * f_perp).max(0.0).sqrt();
            (0.0, w, Phase::Normal)
        };
        text.push_str(&format!("{eta},{order},{omega},{phase}\n"));
    }
    emit(&text, path, out)
}

fn run_fit(
    data: &Path,
    model: ModelKind,
    meta: Metadata,
    out: &mut dyn Write,
) -> Result<()> {
    let set = expdata::load_measurements(data, meta)?;
    let report = expdata::model_residuals(&set, model)?;
    out.write_all(report.table().as_bytes())?;
    writeln!(out, "{}", report.summary_json())?;
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Dispersion(args) => run_curve(args, Axis::OmegaK, out),
        Command::ScanCoupling(args) => run_curve(args, Axis::Eta, out),
        Command::Critical { model, f_perp } => {
            match critical_coupling(*model, *f_perp)? {
                Some(eta) => writeln!(out, "{eta:.8}")?,
                None => writeln!(out, "none")?,
            }
            Ok(())
        }
        Command::LatticeSum(args) => run_lattice(args, out),
        Command::PhaseDiagram { f_perp, eta, out: path } => run_phase_diagram(*f_perp, *eta, path.as_deref(), out),
        Command::VerifyAlgebra => {
            let report = hp_algebra::verify_all()?;
            out.write_all(report.table().as_bytes())?;
            let asserted = report.entries.iter().filter(|e| e.asserted).count();
            writeln!(
                out,
                "all {asserted} relations hold (max deviation {:.3e})",
                report.max_deviation()
            )?;
            Ok(())
        }
        Command::Fit {
            data,
            model,
            eta_prime,
            omega0_ev,
            eps_m,
        } => {
            let meta = Metadata {
                omega0_ev: *omega0_ev,
                eps_m: *eps_m,
                eta_prime: *eta_prime,
            };
            run_fit(data, *model, meta, out)
        }
    }
}

/// Parse `args` (program name first) and run. Returns the exit status:
/// 0 on success, 2 for configuration errors, 3 for numerical failures.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_CONFIG
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERIC
            }
        }
    }
}
