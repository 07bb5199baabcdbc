//! Dipole-blockade single-photon source: Stark-manifold selection,
//! dipole-dipole shifts, collective excitation errors, and Monte-Carlo
//! fidelity estimation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::consts::{bohr_radius, elementary_charge, hbar, vacuum_permittivity};
use crate::diag::ConditionCheck;
use crate::error::{Error, Result};
use crate::medium::MediumParams;
use crate::polariton::{retrieve, DriveSchedule, PulseEnvelope, StoredPulse};
use crate::scalar::{real, Real, C};

/// A Stark eigenstate |nqm⟩ of a Rydberg manifold in a static field.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RydbergStark<T> {
    pub n: u32,
    /// Parabolic quantum number q = n₁ - n₂.
    pub q_par: i32,
    pub m: i32,
    /// Static electric field (V/m).
    pub e_static: T,
}

impl<T: Real> RydbergStark<T> {
    pub fn validate(&self) -> Result<()> {
        let n = self.n as i32;
        if n < 1 {
            return Err(Error::invalid("principal quantum number must be >= 1"));
        }
        let top = n - 1 - self.m.abs();
        if self.m.abs() > n - 1 {
            return Err(Error::invalid("|m| must be <= n-1"));
        }
        if self.q_par.abs() > top || (top - self.q_par.abs()) % 2 != 0 {
            return Err(Error::invalid(format!(
                "q = {} not in the Stark ladder for n = {}, m = {}",
                self.q_par, self.n, self.m
            )));
        }
        if self.e_static < T::zero() {
            return Err(Error::invalid("static field must be >= 0"));
        }
        Ok(())
    }
}

/// Linear Stark splitting (3/2) n q e a₀ E_st / ħ (rad/s).
pub fn stark_shift<T: Real>(s: &RydbergStark<T>) -> Result<T> {
    s.validate()?;
    Ok(real::<T>(1.5)
        * real::<T>(s.n as f64)
        * real::<T>(s.q_par as f64)
        * elementary_charge::<T>()
        * bohr_radius::<T>()
        * s.e_static
        / hbar::<T>())
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Full tensor dipole-dipole interaction energy over ħ (rad/s):
/// [d₁·d₂ − 3(d₁·ê)(d₂·ê)] / (4πε₀ ħ R³) for dipoles in C·m.
pub fn dd_potential<T: Real>(d1: &[T; 3], d2: &[T; 3], r: &[T; 3]) -> Result<T> {
    let r2 = dot(r, r);
    if r2 <= T::zero() {
        return Err(Error::invalid("zero separation"));
    }
    let rn = r2.sqrt();
    let e = [r[0] / rn, r[1] / rn, r[2] / rn];
    let numerator = dot(d1, d2) - real::<T>(3.0) * dot(d1, &e) * dot(d2, &e);
    let four_pi_eps = real::<T>(4.0) * T::PI() * vacuum_permittivity::<T>();
    Ok(numerator / (four_pi_eps * hbar::<T>() * rn * rn * rn))
}

/// Order-of-magnitude pair shift −n⁴e²a₀²/(πħε₀R³) (rad/s, negative).
pub fn dd_shift<T: Real>(n: u32, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::invalid("separation must be positive"));
    }
    let ea0 = elementary_charge::<T>() * bohr_radius::<T>();
    let n4 = real::<T>((n as f64).powi(4));
    Ok(-n4 * ea0 * ea0 / (T::PI() * hbar::<T>() * vacuum_permittivity::<T>() * r * r * r))
}

/// Pair-distance sampling geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrapGeometry {
    /// Positions uniform along the trap axis (elongated-trap default).
    Axial,
    /// Positions uniform in a cylinder of the trap's cross-section.
    Cylinder,
}

/// Cold-atom trap hosting the source.
#[derive(Debug, Clone, Serialize)]
pub struct TrapConfig<T> {
    pub length: T,
    pub area: T,
    pub density: T,
    pub n_atoms: T,
    pub rabi_r1: T,
    pub rabi_r2: T,
    pub gamma_r: T,
    pub rydberg_n: u32,
    pub rng_seed: u64,
    pub geometry: TrapGeometry,
    /// Reference pair shift at separation = trap length; dd_shift estimate
    /// when absent.
    pub delta_ref: Option<T>,
    /// Total preparation time for the two-pulse sequence; the collective
    /// π-pulse time π/(2√N Ω) when absent.
    pub prep_time: Option<T>,
    /// Minimum pair distance; ρ^(-1/3)/2 when absent.
    pub min_separation: Option<T>,
}

impl<T: Real> TrapConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length", self.length),
            ("area", self.area),
            ("density", self.density),
            ("n_atoms", self.n_atoms),
        ] {
            if !(v > T::zero()) {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        for (name, v) in [
            ("rabi_r1", self.rabi_r1),
            ("rabi_r2", self.rabi_r2),
            ("gamma_r", self.gamma_r),
        ] {
            if v < T::zero() {
                return Err(Error::invalid(format!("{name} must be >= 0")));
            }
        }
        let derived = self.density * self.area * self.length;
        if ((derived - self.n_atoms) / self.n_atoms).abs() > real(0.01) {
            return Err(Error::invalid(format!(
                "n_atoms = {} disagrees with density*area*length = {derived}",
                self.n_atoms
            )));
        }
        Ok(())
    }

    /// Reference blockade shift |Δ(L)| at the trap length.
    pub fn delta_at_length(&self) -> Result<T> {
        match self.delta_ref {
            Some(d) => Ok(d.abs()),
            None => Ok(dd_shift(self.rydberg_n, self.length)?.abs()),
        }
    }

    /// Collective π-pulse time from √N Ω T = π/2.
    pub fn pi_pulse_time(&self) -> Result<T> {
        if self.rabi_r1 <= T::zero() {
            return Err(Error::precondition("pi-pulse time needs rabi_r1 > 0"));
        }
        Ok(T::PI() / (real::<T>(2.0) * self.n_atoms.sqrt() * self.rabi_r1))
    }

    /// Time used for dephasing estimates: configured preparation time, or
    /// the π-pulse time.
    pub fn effective_prep_time(&self) -> Result<T> {
        match self.prep_time {
            Some(t) => Ok(t),
            None => self.pi_pulse_time(),
        }
    }

    fn min_pair_distance(&self) -> T {
        self.min_separation
            .unwrap_or_else(|| self.density.powf(-T::one() / real(3.0)) / real(2.0))
    }
}

/// Monte-Carlo estimate of the double-excitation probability
/// N ⟨|Ω_r⁽¹⁾/Δ(R)|²⟩ over pair separations; returns (mean, standard error).
pub fn p_double_mc<T: Real>(cfg: &TrapConfig<T>, samples: usize) -> Result<(T, T)> {
    cfg.validate()?;
    if samples < 10_000 {
        return Err(Error::precondition("need at least 10^4 pair samples"));
    }
    if cfg.rabi_r1 == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    let delta_l = cfg.delta_at_length()?;
    if delta_l == T::zero() {
        return Err(Error::precondition("degenerate geometry: zero pair shift"));
    }
    let base = cfg.n_atoms * (cfg.rabi_r1 / delta_l) * (cfg.rabi_r1 / delta_l);
    let r_min = cfg.min_pair_distance() / cfg.length;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let radius = (cfg.area / T::PI()).sqrt() / cfg.length;

    let mut sum = T::zero();
    let mut sum_sq = T::zero();
    for _ in 0..samples {
        // Pair separation in units of the trap length; Δ(R) = Δ(L)(L/R)³,
        // so the per-pair weight is (R/L)⁶.
        let u = (r_min).max(match cfg.geometry {
            TrapGeometry::Axial => {
                let a: T = real(rng.gen::<f64>());
                let b: T = real(rng.gen::<f64>());
                (a - b).abs()
            }
            TrapGeometry::Cylinder => {
                let (p1, p2) = (
                    cylinder_point::<T>(&mut rng, radius),
                    cylinder_point::<T>(&mut rng, radius),
                );
                let d = [p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2]];
                dot(&d, &d).sqrt()
            }
        });
        let w = base * u.powi(6);
        sum = sum + w;
        sum_sq = sum_sq + w * w;
    }
    let n = real::<T>(samples as f64);
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(T::zero());
    Ok((mean, (var / n).sqrt()))
}

fn cylinder_point<T: Real>(rng: &mut ChaCha8Rng, radius: T) -> [T; 3] {
    // Uniform over the disk via rejection; axial coordinate uniform on [0,1].
    loop {
        let x = real::<T>(rng.gen::<f64>() * 2.0 - 1.0) * radius;
        let y = real::<T>(rng.gen::<f64>() * 2.0 - 1.0) * radius;
        if x * x + y * y <= radius * radius {
            return [x, y, real(rng.gen::<f64>())];
        }
    }
}

/// Dephasing error γ_r T over the preparation time.
pub fn p_dephase<T: Real>(cfg: &TrapConfig<T>) -> Result<T> {
    cfg.validate()?;
    if cfg.gamma_r == T::zero() {
        return Ok(T::zero());
    }
    Ok(cfg.gamma_r * cfg.effective_prep_time()?)
}

/// Error budget and fidelity of the single-photon preparation.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport<T> {
    pub p_double: T,
    pub p_dephase: T,
    pub fidelity: T,
    pub pulse_time: T,
    pub samples: usize,
    pub std_err: T,
    /// Effective mean blockade shift (N|Ω|²/P_double)^(1/2).
    pub delta_bar: T,
    pub checks: Vec<ConditionCheck<T>>,
}

/// Full fidelity estimate: 1 − P_double − P_deph, with blockade-condition
/// diagnostics.
pub fn source_fidelity<T: Real>(cfg: &TrapConfig<T>, samples: usize) -> Result<FidelityReport<T>> {
    let (p_double, std_err) = p_double_mc(cfg, samples)?;
    let p_deph = p_dephase(cfg)?;
    let pulse_time = cfg.effective_prep_time()?;
    let fidelity = (T::one() - p_double - p_deph).clamp(T::zero(), T::one());
    let delta_bar = if p_double > T::zero() {
        (cfg.n_atoms * cfg.rabi_r1 * cfg.rabi_r1 / p_double).sqrt()
    } else {
        T::infinity()
    };
    let delta_l = cfg.delta_at_length()?;
    let checks = vec![
        ConditionCheck::less(
            "blockade: sqrt(N)*Omega < delta_bar",
            cfg.n_atoms.sqrt() * cfg.rabi_r1,
            delta_bar,
        ),
        ConditionCheck::greater("pair shift: |Delta(L)| > Omega", delta_l, cfg.rabi_r1),
        ConditionCheck::greater("pair shift: |Delta(L)| > gamma_r", delta_l, cfg.gamma_r),
    ];
    Ok(FidelityReport {
        p_double,
        p_dephase: p_deph,
        fidelity,
        pulse_time,
        samples,
        std_err,
        delta_bar,
        checks,
    })
}

/// Convert the stored collective excitation into an outgoing photon by
/// ramping the drive on; the spin wave is uniform over the trap.
pub fn generate_photon<T: Real>(
    cfg: &TrapConfig<T>,
    medium: &MediumParams<T>,
    drive: &DriveSchedule<T>,
    samples: usize,
) -> Result<(PulseEnvelope<T>, FidelityReport<T>)> {
    let report = source_fidelity(cfg, samples)?;
    medium.validate()?;
    if medium.optical_depth() <= T::one() {
        return Err(Error::precondition(
            "photon generation needs an optically dense medium",
        ));
    }
    if !(drive.duration() > T::zero()) {
        return Err(Error::invalid("drive schedule has zero duration"));
    }
    let grid = 1024usize;
    let box_len = PulseEnvelope::default_box_length(medium.length, medium.length)
        .max(real::<T>(4.0) * cfg.length);
    let dz = box_len / real::<T>(grid as f64);
    let lo = box_len / real::<T>(2.0) - cfg.length / real::<T>(2.0);
    let hi = lo + cfg.length;
    let amp = cfg.length.sqrt().recip();
    let spin: Vec<C<T>> = (0..grid)
        .map(|j| {
            let z = dz * real::<T>(j as f64);
            if z >= lo && z < hi {
                C::new(amp, T::zero())
            } else {
                C::new(T::zero(), T::zero())
            }
        })
        .collect();
    let stored = StoredPulse {
        spin,
        domain_length: box_len,
        stored_at: drive.start_time(),
        displacement: T::zero(),
        warnings: Vec::new(),
    };
    let retrieved = retrieve(&stored, medium, drive, drive.duration() / real(256.0))?;
    Ok((retrieved.envelope, report))
}
