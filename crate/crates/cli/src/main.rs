//! Scenario runner: parses a sectioned TOML config whose physical
//! quantities carry unit suffixes, executes one named scenario, and writes
//! CSV/JSON artifacts into the output directory.
//!
//! Exit codes: 0 ok, 2 config error, 3 precondition failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use eitqc::blockade::{self, TrapConfig, TrapGeometry};
use eitqc::circuit::{self, CircuitState, GateProgram, RunContext};
use eitqc::consts::speed_of_light;
use eitqc::detector::{self, DetectorParams, Outcome};
use eitqc::diag::render_table;
use eitqc::medium::{self, MediumParams};
use eitqc::polariton::{self, DriveSchedule, PulseEnvelope};
use eitqc::qmemory::{self, PolarizationQubit};
use eitqc::scalar::C;
use eitqc::units;
use eitqc::xpm::{self, TripodParams, TwoPhotonState};

#[derive(Parser)]
#[command(name = "eitqc", about = "Driven atomic-ensemble quantum optics scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the scenario named in the config and write its artifacts.
    Run(Invocation),
    /// Check the config and report module diagnostics without simulating.
    Validate(Invocation),
}

#[derive(Args)]
struct Invocation {
    /// Scenario config (TOML).
    config: PathBuf,
    /// Override the RNG seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Precondition(String),
}

impl From<eitqc::Error> for Failure {
    fn from(e: eitqc::Error) -> Self {
        match e {
            eitqc::Error::Precondition(m) => Failure::Precondition(m),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(inv) => dispatch(&inv, false),
        Command::Validate(inv) => dispatch(&inv, true),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(m)) => {
            eprintln!("precondition failure: {m}");
            ExitCode::from(3)
        }
    }
}

// ---------------------------------------------------------------------------
// Raw config

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: RawScenario,
    medium: Option<RawMedium>,
    pulse: Option<RawPulse>,
    storage: Option<RawStorage>,
    memory: Option<RawMemory>,
    trap: Option<RawTrap>,
    source: Option<RawSource>,
    xpm: Option<RawXpm>,
    detector: Option<RawDetector>,
    detect: Option<RawDetect>,
    circuit: Option<RawCircuit>,
    spectra: Option<RawSpectra>,
    slowlight: Option<RawSlowlight>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    seed: Option<u64>,
    out: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    gamma_ge: String,
    gamma_e: Option<String>,
    gamma_r: String,
    omega: Option<String>,
    rabi_d: String,
    delta_d: Option<String>,
    kappa0: String,
    length: String,
    area: Option<String>,
    density: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    grid: Option<usize>,
    box_length: Option<String>,
    center: Option<String>,
    width: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStorage {
    /// Down/up ramp duration in units of the inverse transparency width.
    ramp_cycles: Option<f64>,
    /// Slow-light transit before the ramp starts.
    duration: Option<String>,
    /// Extra dark time between the ramps.
    hold_time: Option<String>,
    steps_per_ramp: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMemory {
    alpha: Option<[f64; 2]>,
    beta: Option<[f64; 2]>,
    gamma_r: String,
    hold_time: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrap {
    length: String,
    area: String,
    n_atoms: f64,
    density: Option<String>,
    rabi_r1: String,
    rabi_r2: Option<String>,
    gamma_r: String,
    rydberg_n: u32,
    geometry: Option<String>,
    delta_ref: Option<String>,
    prep_time: Option<String>,
    min_separation: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    samples: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawXpm {
    zeeman: String,
    zeeman_s: Option<String>,
    g_factor: Option<f64>,
    m_f: Option<f64>,
    delta_q: Option<String>,
    modes: usize,
    /// Mean thermal velocity (m/s) for the Doppler checks.
    v_bar: Option<f64>,
    grid: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    rabi_p: String,
    gamma_f: String,
    gamma_sf: String,
    gamma_s: String,
    quantum_efficiency: f64,
    integration_time: Option<String>,
    /// Dark counts per second.
    dark_rate: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetect {
    trials: Option<usize>,
    alpha: Option<[f64; 2]>,
    beta: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    qubits: usize,
    program: String,
    trials: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectra {
    points: Option<usize>,
    /// Scan half-width; defaults to 3 gamma_ge.
    span: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlowlight {
    start_position: Option<String>,
    time: Option<String>,
    delta_r: Option<String>,
}

// ---------------------------------------------------------------------------
// Config -> domain types

fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, Failure> {
    section
        .as_ref()
        .ok_or_else(|| Failure::Config(format!("missing [{name}] section")))
}

fn medium_params(raw: &RawMedium) -> Result<MediumParams<f64>, Failure> {
    let gamma_ge = units::parse_angular_frequency(&raw.gamma_ge)?;
    let p = MediumParams {
        gamma_ge,
        gamma_e: match &raw.gamma_e {
            Some(s) => units::parse_angular_frequency(s)?,
            None => 2.0 * gamma_ge,
        },
        gamma_r: units::parse_angular_frequency(&raw.gamma_r)?,
        omega: match &raw.omega {
            Some(s) => units::parse_angular_frequency(s)?,
            None => 2.415e15, // ~780 nm probe carrier
        },
        rabi_d: units::parse_angular_frequency(&raw.rabi_d)?,
        delta_d: match &raw.delta_d {
            Some(s) => units::parse_angular_frequency(s)?,
            None => 0.0,
        },
        kappa0: units::parse_wavenumber(&raw.kappa0)?,
        length: units::parse_length(&raw.length)?,
        area: match &raw.area {
            Some(s) => units::parse_area(s)?,
            None => 1e-6,
        },
        density: match &raw.density {
            Some(s) => units::parse_density(s)?,
            None => 1e17,
        },
        dipole_ge: None,
        n_atoms: None,
        coupling_g: None,
    };
    p.validate()?;
    Ok(p)
}

struct PulseSpec {
    grid: usize,
    box_length: f64,
    center: f64,
    width: f64,
}

fn pulse_spec(raw: &Option<RawPulse>, medium_length: f64) -> Result<PulseSpec, Failure> {
    let grid = raw.as_ref().and_then(|p| p.grid).unwrap_or(2048);
    let box_length = match raw.as_ref().and_then(|p| p.box_length.as_ref()) {
        Some(s) => units::parse_length(s)?,
        None => 16.0 * medium_length,
    };
    let center = match raw.as_ref().and_then(|p| p.center.as_ref()) {
        Some(s) => units::parse_length(s)?,
        None => 0.3125 * box_length,
    };
    let width = match raw.as_ref().and_then(|p| p.width.as_ref()) {
        Some(s) => units::parse_length(s)?,
        None => 0.01 * box_length,
    };
    Ok(PulseSpec {
        grid,
        box_length,
        center,
        width,
    })
}

fn trap_config(raw: &RawTrap, seed: u64) -> Result<TrapConfig<f64>, Failure> {
    let length = units::parse_length(&raw.length)?;
    let area = units::parse_area(&raw.area)?;
    let cfg = TrapConfig {
        length,
        area,
        density: match &raw.density {
            Some(s) => units::parse_density(s)?,
            None => raw.n_atoms / (area * length),
        },
        n_atoms: raw.n_atoms,
        rabi_r1: units::parse_angular_frequency(&raw.rabi_r1)?,
        rabi_r2: match &raw.rabi_r2 {
            Some(s) => units::parse_angular_frequency(s)?,
            None => 10.0 * units::parse_angular_frequency(&raw.rabi_r1)?,
        },
        gamma_r: units::parse_angular_frequency(&raw.gamma_r)?,
        rydberg_n: raw.rydberg_n,
        rng_seed: seed,
        geometry: match raw.geometry.as_deref() {
            None | Some("axial") => TrapGeometry::Axial,
            Some("cylinder") => TrapGeometry::Cylinder,
            Some(other) => {
                return Err(Failure::Config(format!("unknown geometry {other:?}")))
            }
        },
        delta_ref: match &raw.delta_ref {
            Some(s) => Some(units::parse_angular_frequency(s)?),
            None => None,
        },
        prep_time: match &raw.prep_time {
            Some(s) => Some(units::parse_time(s)?),
            None => None,
        },
        min_separation: match &raw.min_separation {
            Some(s) => Some(units::parse_length(s)?),
            None => None,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn tripod_params(raw: &RawXpm, m: MediumParams<f64>) -> Result<TripodParams<f64>, Failure> {
    let zeeman = units::parse_angular_frequency(&raw.zeeman)?;
    let p = TripodParams {
        delta_q: match &raw.delta_q {
            Some(s) => units::parse_wavenumber(s)?,
            // Default: quantization period equal to the medium length.
            None => 2.0 * std::f64::consts::PI * raw.modes as f64 / m.length,
        },
        medium: m,
        zeeman,
        zeeman_s: match &raw.zeeman_s {
            Some(s) => units::parse_angular_frequency(s)?,
            None => 0.9 * zeeman,
        },
        b_field: None,
        g_factor: raw.g_factor.unwrap_or(0.5),
        m_f: raw.m_f.unwrap_or(1.0),
        modes: raw.modes,
        v_bar: raw.v_bar.unwrap_or(0.0),
    };
    p.validate()?;
    Ok(p)
}

fn detector_params(raw: &RawDetector, seed: u64) -> Result<DetectorParams<f64>, Failure> {
    let d = DetectorParams {
        rabi_p: units::parse_angular_frequency(&raw.rabi_p)?,
        gamma_f: units::parse_angular_frequency(&raw.gamma_f)?,
        gamma_sf: units::parse_angular_frequency(&raw.gamma_sf)?,
        gamma_s_lifetime: units::parse_angular_frequency(&raw.gamma_s)?,
        quantum_efficiency: raw.quantum_efficiency,
        integration_time: match &raw.integration_time {
            Some(s) => Some(units::parse_time(s)?),
            None => None,
        },
        dark_rate: raw.dark_rate.unwrap_or(0.0),
        rng_seed: seed,
    };
    d.validate()?;
    Ok(d)
}

fn qubit(alpha: Option<[f64; 2]>, beta: Option<[f64; 2]>) -> Result<PolarizationQubit<f64>, Failure> {
    let a = alpha.unwrap_or([1.0, 0.0]);
    let b = beta.unwrap_or([0.0, 0.0]);
    Ok(PolarizationQubit::new(
        C::new(a[0], a[1]),
        C::new(b[0], b[1]),
    )?)
}

// ---------------------------------------------------------------------------
// Dispatch

fn dispatch(inv: &Invocation, validate_only: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(&inv.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", inv.config.display())))?;
    let cfg: RawConfig =
        toml::from_str(&text).map_err(|e| Failure::Config(format!("{e}")))?;
    let seed = inv.seed.or(cfg.scenario.seed).unwrap_or(0);
    let out_dir = inv
        .out
        .clone()
        .or_else(|| cfg.scenario.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let ctx = ScenarioCtx {
        cfg: &cfg,
        seed,
        out_dir,
        validate_only,
    };
    match cfg.scenario.name.as_str() {
        "spectra" => ctx.spectra(),
        "slowlight" => ctx.slowlight(),
        "store" => ctx.store(),
        "memory" => ctx.memory(),
        "source" => ctx.source(),
        "xpm" => ctx.xpm(),
        "detect" => ctx.detect(),
        "circuit" => ctx.circuit(),
        other => Err(Failure::Config(format!("unknown scenario {other:?}"))),
    }
}

struct ScenarioCtx<'a> {
    cfg: &'a RawConfig,
    seed: u64,
    out_dir: PathBuf,
    validate_only: bool,
}

impl ScenarioCtx<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        fs::write(&path, contents)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn write_json(&self, name: &str, value: &serde_json::Value) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::Config(format!("json: {e}")))?;
        text.push('\n');
        self.write(name, &text)
    }

    fn report(&self, checks: &[eitqc::diag::ConditionCheck<f64>]) {
        if !checks.is_empty() {
            print!("{}", render_table(checks));
        }
    }

    // -- spectra ------------------------------------------------------------

    fn spectra(&self) -> Result<(), Failure> {
        let p = medium_params(require(&self.cfg.medium, "medium")?)?;
        let points = self.cfg.spectra.as_ref().and_then(|s| s.points).unwrap_or(2001);
        let span = match self.cfg.spectra.as_ref().and_then(|s| s.span.as_ref()) {
            Some(s) => units::parse_angular_frequency(s)?,
            None => 3.0 * p.gamma_ge,
        };
        if points < 3 {
            return Err(Failure::Config("spectra.points must be at least 3".into()));
        }
        let w = medium::transparency_width(&p)?;
        if self.validate_only {
            let v = medium::eit_validity(&p, 10.0 / w)?;
            self.report(&v.checks);
            println!(
                "spectra config ok: optical depth {}, window {w:.3e} rad/s",
                p.optical_depth()
            );
            return Ok(());
        }
        let deltas: Vec<f64> = (0..points)
            .map(|i| -span + 2.0 * span * i as f64 / (points - 1) as f64)
            .collect();
        let rows = medium::spectrum_rows(&p, &deltas)?;
        self.write("spectra.csv", &medium::spectrum_csv(&rows))?;

        let chi0 = medium::susceptibility(&p, 0.0, 0.0)?;
        let two_level = medium::two_level_resonant_chi(&p);
        self.write_json(
            "spectra.json",
            &json!({
                "medium": p,
                "scan": { "points": points, "span": span },
                "derived": {
                    "optical_depth": p.optical_depth(),
                    "transparency_width": w,
                    "group_velocity": medium::group_velocity(&p)?,
                    "resonant_suppression": chi0.im / two_level.im,
                },
            }),
        )
    }

    // -- slowlight ----------------------------------------------------------

    fn slowlight(&self) -> Result<(), Failure> {
        let p = medium_params(require(&self.cfg.medium, "medium")?)?;
        let spec = pulse_spec(&self.cfg.pulse, p.length)?;
        let pulse = PulseEnvelope::gaussian(spec.grid, spec.box_length, spec.center, spec.width)?;
        let c = speed_of_light::<f64>();
        let vg = medium::group_velocity(&p)?;
        let sl = self.cfg.slowlight.as_ref();
        let z0 = match sl.and_then(|s| s.start_position.as_ref()) {
            Some(s) => units::parse_length(s)?,
            None => 0.375 * spec.box_length,
        };
        let t = match sl.and_then(|s| s.time.as_ref()) {
            Some(s) => units::parse_time(s)?,
            None => (z0 - spec.center + 0.3 * spec.box_length) / c + p.length / vg,
        };
        let delta_r = match sl.and_then(|s| s.delta_r.as_ref()) {
            Some(s) => units::parse_angular_frequency(s)?,
            None => 0.0,
        };
        if self.validate_only {
            let v = medium::eit_validity(&p, pulse.duration_estimate() / c)?;
            self.report(&v.checks);
            println!("slowlight config ok: v_g/c = {:.3e}", vg / c);
            return Ok(());
        }
        let out = polariton::propagate_constant_drive(&pulse, &p, delta_r, t, z0)?;
        self.write("envelope.csv", &out.envelope.to_csv())?;
        self.write_json(
            "slowlight.json",
            &json!({
                "medium": p,
                "pulse": {
                    "grid": spec.grid, "box_length": spec.box_length,
                    "center": spec.center, "width": spec.width,
                },
                "run": { "start_position": z0, "time": t, "delta_r": delta_r },
                "derived": {
                    "group_velocity": out.group_velocity,
                    "delay": out.delay,
                    "kappa": out.kappa,
                    "attenuation": out.attenuation,
                    "phase": out.phase,
                },
            }),
        )
    }

    // -- store --------------------------------------------------------------

    fn store(&self) -> Result<(), Failure> {
        let p = medium_params(require(&self.cfg.medium, "medium")?)?;
        let spec = pulse_spec(&self.cfg.pulse, p.length)?;
        let pulse = PulseEnvelope::gaussian(spec.grid, spec.box_length, spec.center, spec.width)?;
        let vg = medium::group_velocity(&p)?;
        let w = medium::transparency_width(&p)?;
        let st = self.cfg.storage.as_ref();
        let ramp_time = st.and_then(|s| s.ramp_cycles).unwrap_or(40.0) / w;
        let duration = match st.and_then(|s| s.duration.as_ref()) {
            Some(s) => units::parse_time(s)?,
            None => 0.7 * p.length / vg,
        };
        let hold_time = match st.and_then(|s| s.hold_time.as_ref()) {
            Some(s) => units::parse_time(s)?,
            None => 0.0,
        };
        let dt = ramp_time / st.and_then(|s| s.steps_per_ramp).unwrap_or(200) as f64;

        let feasibility = polariton::storage_feasibility(&p, duration)?;
        if self.validate_only {
            let v = medium::eit_validity(&p, pulse.duration_estimate() / speed_of_light::<f64>())?;
            self.report(&v.checks);
            self.report(&feasibility.checks);
            println!(
                "store config ok: feasible = {}, ramp adiabaticity = {:.1}",
                feasibility.pass,
                ramp_time * w
            );
            return Ok(());
        }

        let down = DriveSchedule::linear_ramp(p.rabi_d, 0.0, 0.0, ramp_time)?;
        let mut stored = polariton::store(&pulse, &p, &down, Some(duration), dt)?;
        if hold_time > 0.0 {
            polariton::hold_spin_wave(&mut stored.spin, p.gamma_r, hold_time);
            stored.stored_at += hold_time;
        }
        let spin_dump = PulseEnvelope::new(stored.spin.clone(), stored.domain_length, stored.stored_at)?;
        self.write("spinwave.csv", &spin_dump.to_csv())?;

        let up = DriveSchedule::linear_ramp(
            0.0,
            p.rabi_d,
            stored.stored_at,
            stored.stored_at + ramp_time,
        )?;
        let retrieved = polariton::retrieve(&stored, &p, &up, dt)?;
        self.write("retrieved.csv", &retrieved.envelope.to_csv())?;
        self.write_json(
            "store.json",
            &json!({
                "medium": p,
                "pulse": {
                    "grid": spec.grid, "box_length": spec.box_length,
                    "center": spec.center, "width": spec.width,
                },
                "schedule": {
                    "ramp_time": ramp_time, "duration": duration,
                    "hold_time": hold_time, "dt": dt,
                },
                "feasibility": feasibility,
                "derived": {
                    "group_velocity": vg,
                    "displacement": stored.displacement + retrieved.displacement,
                    "input_norm": pulse.norm(),
                    "retrieved_norm": retrieved.envelope.norm(),
                },
                "warnings": [stored.warnings, retrieved.warnings],
            }),
        )
    }

    // -- memory -------------------------------------------------------------

    fn memory(&self) -> Result<(), Failure> {
        let raw = require(&self.cfg.memory, "memory")?;
        let q = qubit(raw.alpha, raw.beta)?;
        let gamma_r = units::parse_angular_frequency(&raw.gamma_r)?;
        let hold_time = units::parse_time(&raw.hold_time)?;
        if self.validate_only {
            println!("memory config ok: expected success {:.6e}", (-2.0 * gamma_r * hold_time).exp());
            return Ok(());
        }
        let stored = qmemory::store_qubit(&q, 0.0, gamma_r)?;
        let held = qmemory::hold(&stored, hold_time)?;
        let (retrieved, success) = qmemory::retrieve_qubit(&held)?;
        self.write_json(
            "memory.json",
            &json!({
                "input": q,
                "gamma_r": gamma_r,
                "hold_time": hold_time,
                "retrieved": retrieved,
                "success_prob": success,
                "expected_success": (-2.0 * gamma_r * hold_time).exp(),
            }),
        )
    }

    // -- source -------------------------------------------------------------

    fn source(&self) -> Result<(), Failure> {
        let cfg = trap_config(require(&self.cfg.trap, "trap")?, self.seed)?;
        let samples = self
            .cfg
            .source
            .as_ref()
            .and_then(|s| s.samples)
            .unwrap_or(200_000);
        if self.validate_only {
            let report = blockade::source_fidelity(&cfg, 10_000)?;
            self.report(&report.checks);
            println!(
                "source config ok: pulse time {:.3e} s, pair shift {:.3e} rad/s",
                report.pulse_time,
                cfg.delta_at_length()?
            );
            return Ok(());
        }
        let report = blockade::source_fidelity(&cfg, samples)?;
        self.write_json(
            "source.json",
            &json!({
                "trap": cfg,
                "samples": samples,
                "report": report,
            }),
        )
    }

    // -- xpm ----------------------------------------------------------------

    fn xpm(&self) -> Result<(), Failure> {
        let m = medium_params(require(&self.cfg.medium, "medium")?)?;
        let raw = require(&self.cfg.xpm, "xpm")?;
        let p = tripod_params(raw, m)?;
        let coeff = xpm::xpm_coefficients(&p)?;
        let phi = xpm::conditional_phase(&p)?;
        let cond = xpm::pi_condition(&p)?;
        if self.validate_only {
            self.report(&coeff.checks);
            for w in &coeff.warnings {
                println!("warning: {w}");
            }
            println!(
                "xpm config ok: conditional phase {phi:.4} rad, condition ratio {:.4}",
                cond.ratio
            );
            return Ok(());
        }
        let modes = p.modes;
        let grid = raw.grid.unwrap_or(2 * modes);
        let width = (modes as f64 / 6.0).max(1.0);
        let xi = TwoPhotonState::gaussian_modes(modes, 0.0, width);
        let state = TwoPhotonState::product(&xi, &xi, 0.0)?;
        let dz = p.quantization_length() / grid as f64;
        let psi_in = xpm::psi_on_grid(&state, &p, grid)?;
        self.write("psi_in.csv", &xpm::psi_csv(&psi_in, dz, state.t))?;
        let psi_out = xpm::evolve_two_photon_grid(&state, &p, p.medium.length, grid)?;
        let evolved = xpm::evolve_two_photon(&state, &p, p.medium.length)?;
        self.write("psi_out.csv", &xpm::psi_csv(&psi_out, dz, evolved.t))?;
        self.write_json(
            "xpm.json",
            &json!({
                "medium": p.medium,
                "tripod": {
                    "zeeman": p.zeeman, "zeeman_s": p.zeeman_s,
                    "delta_q": p.delta_q, "modes": p.modes,
                },
                "coefficients": coeff,
                "conditional_phase": phi,
                "pi_condition": cond,
                "derived": {
                    "tan2_theta": p.tan2_theta(),
                    "group_velocity": p.group_velocity(),
                    "output_norm_sqr": evolved.norm_sqr(),
                },
            }),
        )
    }

    // -- detect -------------------------------------------------------------

    fn detect(&self) -> Result<(), Failure> {
        let d = detector_params(require(&self.cfg.detector, "detector")?, self.seed)?;
        let raw = self.cfg.detect.as_ref();
        let q = qubit(
            raw.and_then(|r| r.alpha),
            raw.and_then(|r| r.beta),
        )?;
        let signal = detector::signal(&d)?;
        let reliability = detector::reliability(&d)?;
        if self.validate_only {
            self.report(std::slice::from_ref(&reliability));
            println!("detect config ok: signal {signal:.4} photoelectrons");
            return Ok(());
        }
        let trials = raw.and_then(|r| r.trials).unwrap_or(10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(d.rng_seed);
        let mut outcomes = Vec::with_capacity(trials);
        for _ in 0..trials {
            outcomes.push(detector::measure_polarization(&q, &d, &mut rng)?.outcome);
        }
        self.write("outcomes.csv", &detector::outcomes_csv(&outcomes))?;
        let count = |o: Outcome| outcomes.iter().filter(|&&x| x == o).count();
        self.write_json(
            "detect.json",
            &json!({
                "detector": d,
                "qubit": q,
                "trials": trials,
                "signal": signal,
                "click_probability": detector::click_probability(&d)?,
                "fluorescence_rate": detector::fluorescence_rate(&d)?,
                "reliability": reliability,
                "counts": {
                    "V": count(Outcome::V),
                    "H": count(Outcome::H),
                    "none": count(Outcome::None),
                },
            }),
        )
    }

    // -- circuit ------------------------------------------------------------

    fn circuit(&self) -> Result<(), Failure> {
        let raw = require(&self.cfg.circuit, "circuit")?;
        let program = GateProgram::parse(&raw.program)?;
        program.validate(raw.qubits)?;
        // Optional physics attachments: auto CZ phase from a tripod section,
        // measurement clicks from a detector section.
        let auto_cz_phase = match (&self.cfg.medium, &self.cfg.xpm) {
            (Some(m), Some(x)) => {
                Some(xpm::conditional_phase(&tripod_params(x, medium_params(m)?)?)?)
            }
            _ => None,
        };
        let det = match &self.cfg.detector {
            Some(d) => Some(detector_params(d, self.seed)?),
            None => None,
        };
        if self.validate_only {
            println!(
                "circuit config ok: {} instructions, {} measurements, auto CZ phase {:?}",
                program.instructions.len(),
                program.width(),
                auto_cz_phase
            );
            return Ok(());
        }
        let trials = raw.trials.unwrap_or(1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let initial = CircuitState::<f64>::ground(raw.qubits)?;
        let mut rows: Vec<(Vec<Outcome>, f64)> = Vec::with_capacity(trials);
        let mut last_state = initial.clone();
        for _ in 0..trials {
            let mut ctx = RunContext {
                auto_cz_phase,
                detector: det.as_ref(),
                rng: &mut rng,
            };
            let (state, record) = circuit::run(&program, &initial, &mut ctx)?;
            rows.push((record.outcomes, state.success_prob));
            last_state = state;
        }
        self.write("results.csv", &circuit::results_csv(&rows))?;
        self.write_json(
            "circuit.json",
            &json!({
                "qubits": raw.qubits,
                "trials": trials,
                "seed": self.seed,
                "instructions": program.instructions.len(),
                "auto_cz_phase": auto_cz_phase,
                "final_success_prob": last_state.success_prob,
            }),
        )
    }
}
