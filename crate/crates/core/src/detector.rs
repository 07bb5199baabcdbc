//! Single-photon detection by freezing the photon into a spin wave and
//! reading it out through electron shelving: fluorescence rate, integrated
//! signal and a Poisson click layer, plus polarization measurement through
//! a polarizing beam splitter.

use rand::Rng;
use serde::Serialize;

use crate::diag::ConditionCheck;
use crate::error::{Error, Result};
use crate::qmemory::PolarizationQubit;
use crate::scalar::{real, Real};

#[derive(Debug, Clone, Serialize)]
pub struct DetectorParams<T> {
    /// Pump Rabi frequency Ω_p on the shelving transition (rad/s).
    pub rabi_p: T,
    /// Decay rate Γ_f of the fluorescing state (rad/s).
    pub gamma_f: T,
    /// Coherence relaxation γ_sf of the shelving transition (rad/s).
    pub gamma_sf: T,
    /// Decay rate Γ_s limiting how long the spin wave survives (rad/s).
    pub gamma_s_lifetime: T,
    /// Photon collection efficiency η_q ∈ (0, 1].
    pub quantum_efficiency: T,
    /// Integration time (s); `None` means 1/Γ_s.
    pub integration_time: Option<T>,
    /// Dark-count rate (1/s); zero unless configured.
    pub dark_rate: T,
    pub rng_seed: u64,
}

impl<T: Real> DetectorParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_f", self.gamma_f),
            ("gamma_sf", self.gamma_sf),
            ("gamma_s_lifetime", self.gamma_s_lifetime),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be strictly positive")));
            }
        }
        if self.rabi_p < T::zero() {
            return Err(Error::invalid("rabi_p must be non-negative"));
        }
        if !(self.quantum_efficiency > T::zero()) || self.quantum_efficiency > T::one() {
            return Err(Error::invalid("quantum_efficiency must lie in (0, 1]"));
        }
        if let Some(t) = self.integration_time {
            if !(t > T::zero()) {
                return Err(Error::invalid("integration_time must be strictly positive"));
            }
        }
        if self.dark_rate < T::zero() {
            return Err(Error::invalid("dark_rate must be >= 0"));
        }
        Ok(())
    }

    /// Integration time, defaulting to the spin-wave lifetime 1/Γ_s.
    pub fn time(&self) -> T {
        self.integration_time
            .unwrap_or_else(|| self.gamma_s_lifetime.recip())
    }
}

/// Steady-state fluorescence rate R_f = Γ_f |Ω_p|² / (2|Ω_p|² + γ_sf²);
/// saturates to Γ_f/2.
pub fn fluorescence_rate<T: Real>(d: &DetectorParams<T>) -> Result<T> {
    d.validate()?;
    let w2 = d.rabi_p * d.rabi_p;
    Ok(d.gamma_f * w2 / (real::<T>(2.0) * w2 + d.gamma_sf * d.gamma_sf))
}

/// Mean collected-photon number S_f = η_q · R_f · t.
pub fn signal<T: Real>(d: &DetectorParams<T>) -> Result<T> {
    Ok(d.quantum_efficiency * fluorescence_rate(d)? * d.time())
}

/// The reliability condition S_f ≥ 1.
pub fn reliability<T: Real>(d: &DetectorParams<T>) -> Result<ConditionCheck<T>> {
    let s = signal(d)?;
    let mut check = ConditionCheck::greater("reliability: S_f >= 1", s, T::one());
    check.pass = s >= T::one();
    Ok(check)
}

/// Probability that at least one fluorescence photon is counted,
/// 1 − e^{−S_f} under Poisson statistics.
pub fn click_probability<T: Real>(d: &DetectorParams<T>) -> Result<T> {
    Ok(T::one() - (-signal(d)?).exp())
}

/// One stochastic detection attempt. With a photon present the shelving
/// cycle runs and clicks with probability 1 − e^{−S_f}; without one, only
/// dark counts (rate × integration time, Poisson) can fire.
pub fn click<T: Real>(d: &DetectorParams<T>, photon_present: bool, rng: &mut impl Rng) -> Result<bool> {
    let p = if photon_present {
        click_probability(d)?
    } else {
        d.validate()?;
        T::one() - (-d.dark_rate * d.time()).exp()
    };
    let draw: f64 = rng.gen();
    Ok(real::<T>(draw) < p)
}

/// Result of routing a polarization qubit through the PBS onto two shelving
/// detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    V,
    H,
    None,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::V => write!(f, "V"),
            Outcome::H => write!(f, "H"),
            Outcome::None => write!(f, "none"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Measurement<T> {
    pub outcome: Outcome,
    /// The post-branch qubit (the PBS collapse happens whether or not the
    /// detector behind it fires).
    pub collapsed: PolarizationQubit<T>,
}

/// Born-rule branch selection followed by a stochastic click on the chosen
/// arm; `Outcome::None` when that detector misses.
pub fn measure_polarization<T: Real>(
    q: &PolarizationQubit<T>,
    d: &DetectorParams<T>,
    rng: &mut impl Rng,
) -> Result<Measurement<T>> {
    q.validate()?;
    let p_v = q.alpha.norm_sqr();
    let draw: f64 = rng.gen();
    let vertical = real::<T>(draw) < p_v;
    let collapsed = if vertical {
        PolarizationQubit::vertical()
    } else {
        PolarizationQubit::horizontal()
    };
    let fired = click(d, true, rng)?;
    let outcome = match (vertical, fired) {
        (_, false) => Outcome::None,
        (true, true) => Outcome::V,
        (false, true) => Outcome::H,
    };
    Ok(Measurement { outcome, collapsed })
}

/// CSV export of a measurement record: `trial,outcome`.
pub fn outcomes_csv(outcomes: &[Outcome]) -> String {
    let mut out = String::from("trial,outcome\n");
    for (i, o) in outcomes.iter().enumerate() {
        out.push_str(&format!("{i},{o}\n"));
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // The reference operating point: saturated pump, eta 1e-3,
    // Gamma_f/Gamma_s = 1e4, t = 1/Gamma_s.
    pub(crate) fn reference() -> DetectorParams<f64> {
        let gamma_s = 2.0 * std::f64::consts::PI * 1e3;
        DetectorParams {
            rabi_p: 1e6,
            gamma_f: 1e4 * gamma_s,
            gamma_sf: 1e-3, // effectively fully saturated
            gamma_s_lifetime: gamma_s,
            quantum_efficiency: 1e-3,
            integration_time: None,
            dark_rate: 0.0,
            rng_seed: 11,
        }
    }

    #[test]
    fn fluorescence_rate_limits() {
        let mut d = reference();
        // Saturation: R_f -> Gamma_f/2.
        assert_relative_eq!(
            fluorescence_rate(&d).unwrap(),
            d.gamma_f / 2.0,
            max_relative = 1e-12
        );
        // Omega_p = gamma_sf -> Gamma_f/3.
        d.gamma_sf = d.rabi_p;
        assert_relative_eq!(
            fluorescence_rate(&d).unwrap(),
            d.gamma_f / 3.0,
            max_relative = 1e-12
        );
        d.rabi_p = 0.0;
        assert_eq!(fluorescence_rate(&d).unwrap(), 0.0);
    }

    #[test]
    fn rate_bounded_and_monotone() {
        let d0 = reference();
        let mut last = 0.0;
        for i in 0..60 {
            let mut d = d0.clone();
            d.gamma_sf = 1e5;
            d.rabi_p = 10.0f64.powf(i as f64 / 6.0);
            let r = fluorescence_rate(&d).unwrap();
            assert!(r <= d.gamma_f / 2.0);
            assert!(r >= last, "not monotone at {}", d.rabi_p);
            last = r;
        }
    }

    #[test]
    fn reference_signal_is_five() {
        let d = reference();
        assert_relative_eq!(signal(&d).unwrap(), 5.0, max_relative = 1e-6);
        assert!(reliability(&d).unwrap().pass);
        assert_relative_eq!(
            click_probability(&d).unwrap(),
            1.0 - (-5.0f64).exp(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn signal_linear_in_time() {
        let mut d = reference();
        d.quantum_efficiency = 1.0;
        let t0 = d.time();
        let s1 = signal(&d).unwrap();
        d.integration_time = Some(3.0 * t0);
        assert_relative_eq!(signal(&d).unwrap(), 3.0 * s1, max_relative = 1e-12);
    }

    #[test]
    fn click_statistics_match_poisson_model() {
        let d = reference();
        let p = click_probability(&d).unwrap();
        let n = 1_000_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(d.rng_seed);
        let hits = (0..n)
            .filter(|_| click(&d, true, &mut rng).unwrap())
            .count();
        let freq = hits as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (freq - p).abs() < 4.0 * sigma,
            "freq {freq}, p {p}, sigma {sigma}"
        );
    }

    #[test]
    fn no_photon_no_dark_counts_never_clicks() {
        let d = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..10_000).all(|_| !click(&d, false, &mut rng).unwrap()));
    }

    #[test]
    fn dark_counts_fire_at_configured_rate() {
        let mut d = reference();
        d.dark_rate = 0.5 * d.gamma_s_lifetime; // p = 1 - e^{-0.5}
        let p = 1.0 - (-0.5f64).exp();
        let n = 200_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let hits = (0..n)
            .filter(|_| click(&d, false, &mut rng).unwrap())
            .count();
        let freq = hits as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * sigma);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let d = reference();
        let seq = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..1000)
                .map(|_| click(&d, true, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(seq(99), seq(99));
        assert_ne!(seq(99), seq(100));
    }

    #[test]
    fn vertical_input_ideal_detector_always_v() {
        let mut d = reference();
        d.quantum_efficiency = 1.0; // S_f = 5000: e^{-S} underflows to 0
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = PolarizationQubit::<f64>::vertical();
        for _ in 0..1000 {
            let m = measure_polarization(&q, &d, &mut rng).unwrap();
            assert_eq!(m.outcome, Outcome::V);
            assert_eq!(m.collapsed.alpha.norm_sqr(), 1.0);
        }
    }

    #[test]
    fn superposition_statistics() {
        let d = reference();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = PolarizationQubit::new(
            crate::scalar::C::new(s, 0.0),
            crate::scalar::C::new(s, 0.0),
        )
        .unwrap();
        let n = 100_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(d.rng_seed);
        let mut counts = [0usize; 3];
        for _ in 0..n {
            match measure_polarization(&q, &d, &mut rng).unwrap().outcome {
                Outcome::V => counts[0] += 1,
                Outcome::H => counts[1] += 1,
                Outcome::None => counts[2] += 1,
            }
        }
        let p_click = click_probability(&d).unwrap();
        // V and H each at 0.5 * p_click; misses at e^{-S_f}.
        for (freq, p) in [
            (counts[0] as f64 / n as f64, 0.5 * p_click),
            (counts[1] as f64 / n as f64, 0.5 * p_click),
            (counts[2] as f64 / n as f64, 1.0 - p_click),
        ] {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * sigma, "freq {freq} vs p {p}");
        }
    }

    #[test]
    fn csv_layout() {
        let rec = [Outcome::V, Outcome::None, Outcome::H];
        let csv = outcomes_csv(&rec);
        assert_eq!(csv, "trial,outcome\n0,V\n1,none\n2,H\n");
    }

    #[test]
    fn parameter_validation() {
        let mut d = reference();
        d.quantum_efficiency = 0.0;
        assert!(d.validate().is_err());
        d.quantum_efficiency = 1.5;
        assert!(d.validate().is_err());
        let mut d = reference();
        d.integration_time = Some(0.0);
        assert!(d.validate().is_err());
    }
}
