use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use contactflow::dynamics::exact_linear_trajectory;
use contactflow::{
    damped_oscillator, damped_wave, damped_wave_source, fit_decay_rate, oneform_field, pde_residual,
    rank_tolerance, rk4_integrate, sphere_of_oneforms_at_level, wave_with_source, DecayFit, Grid, ModelBundle,
    ModelKind, ModelStructure, PdeResidual, Source, Trajectory,
};
use log::{debug, info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Integrator, ModelSection, ScenarioConfig};
use crate::error::{CliError, Result};

pub const RNG_NAME: &str = "chacha8";

pub fn build_model(m: &ModelSection) -> Result<ModelBundle> {
    let source = || -> Result<Source> {
        let grid = Grid::new(m.n, m.length, m.bc)?;
        Ok(Source::by_name(&m.source, &grid)?)
    };
    let model = match m.kind {
        ModelKind::DampedOscillator => damped_oscillator(m.kappa)?,
        ModelKind::OneformField => oneform_field(m.kappa, m.n)?,
        ModelKind::DampedWave => damped_wave(m.kappa, m.n, m.length, m.bc)?,
        ModelKind::WaveWithSource => wave_with_source(m.n, m.length, m.bc, source()?, m.potential)?,
        ModelKind::DampedWaveSource => damped_wave_source(m.kappa, m.n, m.length, m.bc, source()?)?,
        ModelKind::SphereOfOneforms => sphere_of_oneforms_at_level(m.n, m.level)?,
    };
    match m.corrupt {
        None => Ok(model),
        Some(c) => {
            warn!("structure corrupted with `{}`", c.as_str());
            Ok(model.corrupt(c)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationSummary {
    pub samples: usize,
    pub passed: usize,
    /// Samples where the equivalent characterisations gave the same verdict.
    pub conditions_agree: usize,
    /// Largest defining-equation residual of the field over passing samples.
    pub worst_residual: f64,
    pub tolerance: f64,
}

impl VerificationSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationSummary {
    pub integrator: Integrator,
    pub steps: usize,
    pub h_initial: f64,
    pub h_final: f64,
    pub decay: Option<DecayFit>,
    pub pde: Option<PdeResidual>,
    pub output: Option<PathBuf>,
    pub rows_written: usize,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub model: &'static str,
    pub structure: &'static str,
    pub dim: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub verification: VerificationSummary,
    /// `None` when verification failed or only verification was asked for.
    pub integration: Option<IntegrationSummary>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn verified(&self) -> bool {
        self.verification.all_passed()
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.verification;
        writeln!(f, "model          {} ({}, dim {})", self.model, self.structure, self.dim)?;
        writeln!(f, "rng            {} seed {}", self.rng, self.seed)?;
        writeln!(
            f,
            "verification   {}/{} passed, conditions agree on {}/{}, tol {:.3e}",
            v.passed, v.samples, v.conditions_agree, v.samples, v.tolerance
        )?;
        writeln!(f, "field residual {:.3e}", v.worst_residual)?;
        if let Some(i) = &self.integration {
            writeln!(f, "integrator     {} ({} steps)", i.integrator.as_str(), i.steps)?;
            writeln!(f, "H(0)           {:.12e}", i.h_initial)?;
            writeln!(f, "H(T)           {:.12e}", i.h_final)?;
            if let Some(d) = &i.decay {
                writeln!(f, "decay rate     {:.6} (r2 {:.6})", d.kappa, d.r2)?;
            }
            if let Some(p) = &i.pde {
                writeln!(f, "pde residual   {:.3e} (truncation {:.3e})", p.max_residual, p.truncation_scale)?;
            }
            match &i.output {
                Some(p) => writeln!(f, "output         {} ({} rows)", p.display(), i.rows_written)?,
                None => writeln!(f, "output         none")?,
            }
        }
        write!(f, "wall time      {:.3} s", self.wall_time.as_secs_f64())
    }
}

pub fn verify_model(model: &ModelBundle, sample_count: usize, seed: u64, tolerance: Option<f64>) -> Result<VerificationSummary> {
    let tol = tolerance.unwrap_or_else(|| rank_tolerance(model.dim()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = VerificationSummary {
        samples: sample_count,
        passed: 0,
        conditions_agree: 0,
        worst_residual: 0.0,
        tolerance: tol,
    };
    for i in 0..sample_count {
        let x = model.sample_state(&mut rng);
        let check = match model.verify_at(&x, tol) {
            Ok(c) => c,
            // the level-set restriction refuses a Y tangent to the level set
            Err(e @ contactflow::Error::TangentLiouville { .. }) => {
                debug!("sample {i}: {e}");
                summary.conditions_agree += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if check.conditions_agree() {
            summary.conditions_agree += 1;
        }
        if !check.passes() {
            debug!("sample {i} fails verification");
            continue;
        }
        summary.passed += 1;
        let v = model.vector_field(&x, tol)?;
        summary.worst_residual = summary.worst_residual.max(model.defining_residual(&x, &v)?);
    }
    Ok(summary)
}

pub fn integrate(model: &ModelBundle, cfg: &ScenarioConfig) -> Result<Trajectory> {
    let (dt, t_final) = (cfg.run.dt, cfg.run.t_final);
    let traj = match cfg.run.integrator {
        Integrator::Rk4 => {
            let field = model.flow_field()?;
            rk4_integrate(|x| field.eval(x), &model.initial, dt, t_final, &model.hamiltonian)?
        }
        Integrator::Exact => {
            let a = model.linear_generator.as_ref().ok_or_else(|| {
                contactflow::Error::InvalidParameter(format!("{} has no linear generator", model.name()))
            })?;
            exact_linear_trajectory(a, &model.initial, dt, t_final, &model.hamiltonian)?
        }
    };
    Ok(traj.with_model(model.name()))
}

/// Writes `t,H,residual,state_0..` rows, keeping every `thin_every`-th state.
pub fn write_csv<W: Write>(out: &mut W, traj: &Trajectory, model: &ModelBundle, thin_every: usize) -> Result<usize> {
    let io = |source| CliError::Io {
        path: PathBuf::from("<csv>"),
        source,
    };
    let field = model.flow_field()?;
    let mut header = String::from("t,H,residual");
    for i in 0..model.dim() {
        header.push_str(&format!(",state_{i}"));
    }
    writeln!(out, "{header}").map_err(io)?;
    let mut rows = 0;
    for (k, x) in traj.states.iter().enumerate().step_by(thin_every.max(1)) {
        let v = field.eval(x)?;
        let residual = model.defining_residual(x, &v)?;
        let mut line = format!("{:.16e},{:.16e},{:.16e}", traj.times[k], traj.h_trace[k], residual);
        for c in x.iter() {
            line.push_str(&format!(",{c:.16e}"));
        }
        writeln!(out, "{line}").map_err(io)?;
        rows += 1;
    }
    out.flush().map_err(io)?;
    Ok(rows)
}

fn write_csv_file(path: &Path, traj: &Trajectory, model: &ModelBundle, thin_every: usize) -> Result<usize> {
    let file = File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_csv(&mut out, traj, model, thin_every).map_err(|e| match e {
        CliError::Io { source, .. } => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

fn summarize(model: &ModelBundle, traj: &Trajectory, cfg: &ScenarioConfig) -> Result<IntegrationSummary> {
    let decay = match model.structure {
        ModelStructure::Contact(_) if traj.h_trace.iter().all(|&h| h > 0.0) => {
            Some(fit_decay_rate(&traj.times, &traj.h_trace)?)
        }
        _ => None,
    };
    let pde = match model.wave {
        Some(_) => Some(pde_residual(traj, model)?),
        None => None,
    };
    let (output, rows_written) = match &cfg.output.path {
        Some(p) => (Some(p.clone()), write_csv_file(p, traj, model, cfg.output.thin_every)?),
        None => (None, 0),
    };
    Ok(IntegrationSummary {
        integrator: cfg.run.integrator,
        steps: traj.len() - 1,
        h_initial: traj.h_trace[0],
        h_final: *traj.h_trace.last().expect("non-empty trajectory"),
        decay,
        pde,
        output,
        rows_written,
    })
}

/// Verify the structure on sampled states, then integrate if every sample passed
/// and `integrate_after` is set.
pub fn run_scenario(cfg: &ScenarioConfig, integrate_after: bool) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    let model = build_model(&cfg.model)?;
    info!("built {} ({}, dim {})", model.name(), model.structure.kind_name(), model.dim());
    let verification = verify_model(&model, cfg.verify.sample_count, cfg.verify.seed, cfg.verify.tolerance)?;
    info!("verification: {}/{} passed", verification.passed, verification.samples);
    let integration = if integrate_after && verification.all_passed() {
        let traj = integrate(&model, cfg)?;
        info!("integrated {} steps", traj.len() - 1);
        Some(summarize(&model, &traj, cfg)?)
    } else {
        None
    };
    Ok(RunReport {
        model: model.name(),
        structure: model.structure.kind_name(),
        dim: model.dim(),
        seed: cfg.verify.seed,
        rng: RNG_NAME,
        verification,
        integration,
        wall_time: start.elapsed(),
    })
}
