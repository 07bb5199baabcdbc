//! Dark-state-polariton dynamics: slow-light propagation with a constant
//! drive, shape-preserving evolution under a time-dependent drive, and
//! storage/retrieval by rotating the mixing angle.

pub mod oracle;

pub use oracle::{hamiltonian_dark_oracle, DarkOracleConfig};

use serde::Serialize;

use crate::consts::speed_of_light;
use crate::diag::ConditionCheck;
use crate::error::{Error, Result};
use crate::medium::{group_velocity, transparency_width, MediumParams};
use crate::scalar::{real, Real, C};
use crate::spectral;

/// Complex spatial envelope f(z) of a single-photon wavepacket on a uniform
/// periodic grid of power-of-two size.
#[derive(Debug, Clone)]
pub struct PulseEnvelope<T> {
    samples: Vec<C<T>>,
    pub domain_length: T,
    pub origin_time: T,
}

impl<T: Real> PulseEnvelope<T> {
    pub fn new(samples: Vec<C<T>>, domain_length: T, origin_time: T) -> Result<Self> {
        spectral::check_power_of_two(samples.len())?;
        if !(domain_length > T::zero()) {
            return Err(Error::invalid("domain_length must be positive"));
        }
        Ok(PulseEnvelope {
            samples,
            domain_length,
            origin_time,
        })
    }

    /// Unit-norm Gaussian wavepacket centred at `center` with 1/e amplitude
    /// half-width `width`.
    pub fn gaussian(grid_size: usize, domain_length: T, center: T, width: T) -> Result<Self> {
        let n = grid_size;
        let dz = domain_length / real::<T>(n as f64);
        let samples: Vec<C<T>> = (0..n)
            .map(|j| {
                let z = dz * real::<T>(j as f64);
                let u = (z - center) / width;
                C::new((-u * u).exp(), T::zero())
            })
            .collect();
        let mut p = PulseEnvelope::new(samples, domain_length, T::zero())?;
        p.normalize();
        Ok(p)
    }

    pub fn samples(&self) -> &[C<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C<T>] {
        &mut self.samples
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn dz(&self) -> T {
        self.domain_length / real::<T>(self.samples.len() as f64)
    }

    /// L2 norm √(∫|f|² dz).
    pub fn norm(&self) -> T {
        spectral::l2_norm(&self.samples, self.dz())
    }

    /// Rescale to single-photon normalization ∫|f|²dz = 1.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            let inv = n.recip();
            for v in self.samples.iter_mut() {
                *v = v.scale(inv);
            }
        }
    }

    /// Check the single-photon normalization invariant.
    pub fn validate_normalized(&self) -> Result<()> {
        let n = self.norm();
        if ((n * n) - T::one()).abs() > real(1e-9) {
            return Err(Error::invalid(format!(
                "envelope norm^2 = {} deviates from single-photon normalization",
                n * n
            )));
        }
        Ok(())
    }

    /// Effective temporal duration of the free-space pulse, 2·rms width / c.
    pub fn duration_estimate(&self) -> T {
        let dz = self.dz();
        let mut w = T::zero();
        let mut m1 = T::zero();
        let mut m2 = T::zero();
        // Center via the intensity-weighted first moment; the envelope is
        // assumed not to straddle the periodic boundary.
        for (j, v) in self.samples.iter().enumerate() {
            let z = dz * real::<T>(j as f64);
            let p = v.norm_sqr();
            w = w + p;
            m1 = m1 + p * z;
            m2 = m2 + p * z * z;
        }
        let mean = m1 / w;
        let var = m2 / w - mean * mean;
        real::<T>(2.0) * var.max(T::zero()).sqrt() / speed_of_light::<T>()
    }

    /// Default periodic box length: 4x the larger of the pulse free-space
    /// length and the medium length.
    pub fn default_box_length(pulse_length: T, medium_length: T) -> T {
        real::<T>(4.0) * pulse_length.max(medium_length)
    }

    /// CSV dump `z_m, re_f, im_f, intensity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z_m,re_f,im_f,intensity\n");
        let dz = self.dz();
        for (j, v) in self.samples.iter().enumerate() {
            let z = dz * real::<T>(j as f64);
            out.push_str(&format!(
                "{:.11e},{:.11e},{:.11e},{:.11e}\n",
                z,
                v.re,
                v.im,
                v.norm_sqr()
            ));
        }
        out
    }
}

/// Piecewise-linear drive schedule Ω_d(t).
#[derive(Debug, Clone)]
pub struct DriveSchedule<T> {
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> DriveSchedule<T> {
    pub fn new(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::invalid(
                "schedule needs matching time/value arrays of length >= 2",
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("schedule times must be strictly increasing"));
        }
        if values.iter().any(|&v| v < T::zero() || !v.is_finite()) {
            return Err(Error::invalid("drive values must be finite and >= 0"));
        }
        Ok(DriveSchedule { times, values })
    }

    pub fn constant(rabi: T, t0: T, t1: T) -> Result<Self> {
        DriveSchedule::new(vec![t0, t1], vec![rabi, rabi])
    }

    pub fn linear_ramp(rabi_from: T, rabi_to: T, t0: T, t1: T) -> Result<Self> {
        DriveSchedule::new(vec![t0, t1], vec![rabi_from, rabi_to])
    }

    pub fn start_time(&self) -> T {
        self.times[0]
    }

    pub fn end_time(&self) -> T {
        *self.times.last().unwrap()
    }

    pub fn duration(&self) -> T {
        self.end_time() - self.start_time()
    }

    /// Ω_d(t), clamped to the end values outside the grid.
    pub fn sample(&self, t: T) -> T {
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.end_time() {
            return *self.values.last().unwrap();
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let f = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        self.values[i] + (self.values[i + 1] - self.values[i]) * f
    }

    /// Parse the two-column plain-text schedule format `t_s rabi_rad_per_s`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(t), Some(v)) = (cols.next(), cols.next()) else {
                return Err(Error::parse(format!("schedule line {}: need 2 columns", lineno + 1)));
            };
            times.push(real(t.parse::<f64>().map_err(|e| {
                Error::parse(format!("schedule line {}: {e}", lineno + 1))
            })?));
            values.push(real(v.parse::<f64>().map_err(|e| {
                Error::parse(format!("schedule line {}: {e}", lineno + 1))
            })?));
        }
        DriveSchedule::new(times, values)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{t:.11e} {v:.11e}\n"));
        }
        out
    }
}

/// Mixing angle θ = atan(g√N / |Ω_d|) ∈ [0, π/2].
pub fn mixing_angle<T: Real>(coupling_g: T, n_atoms: T, rabi_d: T) -> T {
    (coupling_g * n_atoms.sqrt()).atan2(rabi_d)
}

/// Binomial-weighted dark-state amplitudes over the spin-excitation number
/// m = 0..n: √C(n,m) (-sinθ)^m (cosθ)^(n-m).
pub fn dark_state_coefficients<T: Real>(n: u32, theta: T) -> Vec<T> {
    let (s, c) = (theta.sin(), theta.cos());
    (0..=n)
        .map(|m| {
            let binom = binomial(n, m);
            real::<T>(binom).sqrt() * (-s).powi(m as i32) * c.powi((n - m) as i32)
        })
        .collect()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Paired photonic/spin-wave fields with the current mixing angle.
///
/// The polariton field Ψ is stored directly; the components follow the
/// inverse relations photonic = cosθ·Ψ and spin = -sinθ·Ψ identically.
#[derive(Debug, Clone)]
pub struct PolaritonState<T> {
    pub psi: Vec<C<T>>,
    pub theta: T,
    pub domain_length: T,
    pub clock: T,
    pub medium: MediumParams<T>,
}

impl<T: Real> PolaritonState<T> {
    /// Start from a photonic envelope at the drive strength of `medium`.
    pub fn from_photonic(pulse: &PulseEnvelope<T>, medium: MediumParams<T>) -> Result<Self> {
        medium.validate()?;
        let theta = mixing_angle(medium.coupling(), medium.atom_count(), medium.rabi_d);
        let cos = theta.cos();
        if cos <= T::zero() {
            return Err(Error::precondition(
                "cannot build a photonic polariton at theta = pi/2 (zero drive)",
            ));
        }
        let psi = pulse.samples().iter().map(|v| v.scale(cos.recip())).collect();
        Ok(PolaritonState {
            psi,
            theta,
            domain_length: pulse.domain_length,
            clock: pulse.origin_time,
            medium,
        })
    }

    /// Start from a stored spin wave (θ = π/2).
    pub fn from_spin(spin: &[C<T>], domain_length: T, clock: T, medium: MediumParams<T>) -> Result<Self> {
        medium.validate()?;
        spectral::check_power_of_two(spin.len())?;
        let psi = spin.iter().map(|v| -*v).collect();
        Ok(PolaritonState {
            psi,
            theta: T::FRAC_PI_2(),
            domain_length,
            clock,
            medium,
        })
    }

    pub fn photonic(&self) -> Vec<C<T>> {
        let c = self.theta.cos();
        self.psi.iter().map(|v| v.scale(c)).collect()
    }

    pub fn spin(&self) -> Vec<C<T>> {
        let s = self.theta.sin();
        self.psi.iter().map(|v| v.scale(-s)).collect()
    }

    pub fn dz(&self) -> T {
        self.domain_length / real::<T>(self.psi.len() as f64)
    }

    pub fn norm(&self) -> T {
        spectral::l2_norm(&self.psi, self.dz())
    }

    fn g2n(&self) -> T {
        let g = self.medium.coupling();
        g * g * self.medium.atom_count()
    }
}

/// Result of a constant-drive transit computation.
#[derive(Debug, Clone)]
pub struct Propagated<T> {
    /// Field snapshot on the pulse grid at the requested time.
    pub envelope: PulseEnvelope<T>,
    /// Linear absorption coefficient κ (1/m).
    pub kappa: T,
    /// Phase-modulation coefficient s (s/m · rad... tan²θ/c, 1/(m·rad/s) units folded with δ_R).
    pub s_coefficient: T,
    /// Amplitude factor e^(-κL) for a full transit.
    pub attenuation: T,
    /// Phase s·δ_R·L for a full transit (rad).
    pub phase: T,
    /// Group velocity inside the medium (m/s).
    pub group_velocity: T,
    /// Transit delay L/v_g (s).
    pub delay: T,
}

// The initial envelope is compactly supported in its box; the retarded
// argument sweeps far outside the box inside the medium (factor c/v_g), so
// the periodic interpolant must not wrap around.
fn eval_supported<T: Real>(modes: &[C<T>], box_len: T, arg: T) -> C<T> {
    if arg < T::zero() || arg >= box_len {
        C::new(T::zero(), T::zero())
    } else {
        spectral::eval_interpolant(modes, box_len, arg)
    }
}

/// Closed-form constant-drive propagation: the field at time `t` given the
/// initial envelope at its `origin_time`, with the medium occupying
/// [medium_start, medium_start + L] inside the periodic box.
///
/// The retarded-time solution is evaluated exactly through the band-limited
/// interpolant of the initial envelope, with the attenuation e^(-κz) and
/// phase e^(i s δ_R z) factors applied per region.
pub fn propagate_constant_drive<T: Real>(
    pulse: &PulseEnvelope<T>,
    p: &MediumParams<T>,
    delta_r: T,
    t: T,
    medium_start: T,
) -> Result<Propagated<T>> {
    p.validate()?;
    let omega2 = p.rabi_d * p.rabi_d;
    if omega2 <= T::zero() {
        return Err(Error::precondition("constant-drive propagation needs a drive"));
    }
    let delta = delta_r + p.delta_d;
    if (delta_r * delta).abs() * real::<T>(10.0) > omega2 {
        return Err(Error::precondition(format!(
            "delta_R*Delta = {} is not small against |Omega_d|^2 = {omega2}",
            delta_r * delta
        )));
    }
    let c = speed_of_light::<T>();
    let vg = group_velocity(p)?;
    let tan2 = self::mixing_angle(p.coupling(), p.atom_count(), p.rabi_d).tan().powi(2);
    let s_coeff = tan2 / c;
    let kappa = s_coeff * (p.gamma_r + p.gamma_ge * delta_r * delta_r / omega2);
    let l = p.length;
    let z0 = medium_start;
    let elapsed = t - pulse.origin_time;

    let modes = spectral::mode_amplitudes(pulse.samples());
    let n = pulse.grid_size();
    let dz = pulse.dz();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let z = dz * real::<T>(j as f64);
        let (arg, depth) = if z < z0 {
            (z - c * elapsed, T::zero())
        } else if z < z0 + l {
            (z0 + (z - z0) * c / vg - c * elapsed, z - z0)
        } else {
            (z + l * (c / vg - T::one()) - c * elapsed, l)
        };
        let base = eval_supported(&modes, pulse.domain_length, arg);
        let factor = C::from_polar((-kappa * depth).exp(), s_coeff * delta_r * depth);
        out.push(base * factor);
    }
    Ok(Propagated {
        envelope: PulseEnvelope::new(out, pulse.domain_length, t)?,
        kappa,
        s_coefficient: s_coeff,
        attenuation: (-kappa * l).exp(),
        phase: s_coeff * delta_r * l,
        group_velocity: vg,
        delay: l / vg,
    })
}

/// Probe intensity ⟨I(z,t)⟩ = |f(retarded argument)|² in the lossless picture.
pub fn intensity<T: Real>(
    pulse: &PulseEnvelope<T>,
    p: &MediumParams<T>,
    medium_start: T,
    z: T,
    t: T,
) -> Result<T> {
    p.validate()?;
    let c = speed_of_light::<T>();
    let vg = group_velocity(p)?;
    let l = p.length;
    let z0 = medium_start;
    let elapsed = t - pulse.origin_time;
    let arg = if z < z0 {
        z - c * elapsed
    } else if z < z0 + l {
        z0 + (z - z0) * c / vg - c * elapsed
    } else {
        z + l * (c / vg - T::one()) - c * elapsed
    };
    let modes = spectral::mode_amplitudes(pulse.samples());
    Ok(eval_supported(&modes, pulse.domain_length, arg).norm_sqr())
}

/// Outcome of a time-dependent-drive evolution.
#[derive(Debug, Clone)]
pub struct Evolved<T> {
    pub state: PolaritonState<T>,
    /// Total advection distance ∫v_g dt (m).
    pub displacement: T,
    /// Non-fatal diagnostics (adiabaticity margin violations).
    pub warnings: Vec<String>,
}

/// Advect the polariton with the time-dependent group velocity of a drive
/// schedule. δ_R = 0 is assumed; the evolution is lossless by construction.
pub fn evolve_polariton<T: Real>(
    state: &PolaritonState<T>,
    schedule: &DriveSchedule<T>,
    dt: T,
) -> Result<Evolved<T>> {
    if !(dt > T::zero()) {
        return Err(Error::invalid("dt must be positive"));
    }
    let mut warnings = Vec::new();
    if let Ok(w) = transparency_width(&state.medium) {
        let margin = schedule.duration() * w;
        if margin < real(10.0) {
            warnings.push(format!(
                "ramp is not adiabatic: ramp_time * delta_omega_tw = {margin:.3e} < 10"
            ));
        }
    }
    let c = speed_of_light::<T>();
    let g2n = state.g2n();
    let vg = |t: T| {
        let om = schedule.sample(t);
        let om2 = om * om;
        c * om2 / (om2 + g2n)
    };

    let mut out = state.clone();
    let mut t = state.clock.max(schedule.start_time());
    let t_end = schedule.end_time();
    let mut total = T::zero();
    while t < t_end {
        let step = dt.min(t_end - t);
        // Simpson's rule on the piecewise-linear drive.
        let mid = t + step / real(2.0);
        let d = step / real::<T>(6.0) * (vg(t) + real::<T>(4.0) * vg(mid) + vg(t + step));
        spectral::spectral_shift(&mut out.psi, out.domain_length, d);
        total = total + d;
        t = t + step;
    }
    out.clock = t_end;
    let mut medium = out.medium.clone();
    medium.rabi_d = schedule.sample(t_end);
    out.theta = mixing_angle(medium.coupling(), medium.atom_count(), medium.rabi_d);
    out.medium = medium;
    Ok(Evolved {
        state: out,
        displacement: total,
        warnings,
    })
}

/// Feasibility of accommodating a pulse of the given duration in the medium.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport<T> {
    pub checks: Vec<ConditionCheck<T>>,
    pub pass: bool,
    pub compression_fraction: T,
}

/// Evaluate (2κ₀L)^(-1/2) << T·v_g/L < 1 with a factor-5 lower margin.
pub fn storage_feasibility<T: Real>(
    p: &MediumParams<T>,
    pulse_duration: T,
) -> Result<FeasibilityReport<T>> {
    p.validate()?;
    let vg = group_velocity(p)?;
    let frac = pulse_duration * vg / p.length;
    let checks = vec![
        ConditionCheck::less("containment: T*v_g/L < 1", frac, T::one()),
        ConditionCheck::greater(
            "bandwidth: T*v_g/L > 5*(2*kappa0*L)^-1/2",
            frac,
            real::<T>(5.0) / p.optical_depth().sqrt(),
        ),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(FeasibilityReport {
        checks,
        pass,
        compression_fraction: frac,
    })
}

/// Result of storing a pulse: the spin-wave field left in the medium.
#[derive(Debug, Clone)]
pub struct StoredPulse<T> {
    pub spin: Vec<C<T>>,
    pub domain_length: T,
    pub stored_at: T,
    pub displacement: T,
    pub warnings: Vec<String>,
}

/// Map a photonic envelope onto the spin wave by ramping the drive to zero.
///
/// The ramp must end at Ω_d = 0. The pulse is taken to be already
/// accommodated inside the medium; pass `pulse_duration` when the free-space
/// duration is known, otherwise it is estimated from the envelope.
pub fn store<T: Real>(
    pulse: &PulseEnvelope<T>,
    p: &MediumParams<T>,
    ramp: &DriveSchedule<T>,
    pulse_duration: Option<T>,
    dt: T,
) -> Result<StoredPulse<T>> {
    if ramp.sample(ramp.end_time()) != T::zero() {
        return Err(Error::invalid("storage ramp must end at zero drive"));
    }
    let duration = pulse_duration.unwrap_or_else(|| pulse.duration_estimate());
    let feas = storage_feasibility(p, duration)?;
    if !feas.pass {
        return Err(Error::precondition(format!(
            "storage infeasible: T*v_g/L = {:.3e}",
            feas.compression_fraction
        )));
    }
    let mut medium = p.clone();
    medium.rabi_d = ramp.sample(ramp.start_time());
    let state = PolaritonState::from_photonic(pulse, medium)?;
    let evolved = evolve_polariton(&state, ramp, dt)?;
    Ok(StoredPulse {
        spin: evolved.state.spin(),
        domain_length: evolved.state.domain_length,
        stored_at: evolved.state.clock,
        displacement: evolved.displacement,
        warnings: evolved.warnings,
    })
}

/// Apply the spin-coherence decay e^(-γ_R t_h) accumulated over a hold time.
pub fn hold_spin_wave<T: Real>(spin: &mut [C<T>], gamma_r: T, hold_time: T) {
    let f = (-gamma_r * hold_time).exp();
    for v in spin.iter_mut() {
        *v = v.scale(f);
    }
}

/// Result of retrieving a stored spin wave back into light.
#[derive(Debug, Clone)]
pub struct RetrievedPulse<T> {
    pub envelope: PulseEnvelope<T>,
    pub displacement: T,
    pub warnings: Vec<String>,
}

/// Convert a stored spin wave back to a photonic envelope by ramping the
/// drive up from zero.
pub fn retrieve<T: Real>(
    stored: &StoredPulse<T>,
    p: &MediumParams<T>,
    ramp: &DriveSchedule<T>,
    dt: T,
) -> Result<RetrievedPulse<T>> {
    if ramp.sample(ramp.start_time()) != T::zero() {
        return Err(Error::invalid("retrieval ramp must start at zero drive"));
    }
    let mut medium = p.clone();
    medium.rabi_d = T::zero();
    let state =
        PolaritonState::from_spin(&stored.spin, stored.domain_length, stored.stored_at, medium)?;
    let evolved = evolve_polariton(&state, ramp, dt)?;
    let envelope = PulseEnvelope::new(
        evolved.state.photonic(),
        evolved.state.domain_length,
        evolved.state.clock,
    )?;
    Ok(RetrievedPulse {
        envelope,
        displacement: evolved.displacement,
        warnings: evolved.warnings,
    })
}
