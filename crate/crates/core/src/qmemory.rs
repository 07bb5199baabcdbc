//! Reversible polarization-qubit memory: waveplate basis change into
//! circular polarizations, mapping onto the two collective spin waves, hold
//! decoherence, and retrieval.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{real, Real, C};

/// α|V⟩ + β|H⟩ with |α|² + |β|² = 1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolarizationQubit<T> {
    pub alpha: C<T>,
    pub beta: C<T>,
}

impl<T: Real> PolarizationQubit<T> {
    pub fn new(alpha: C<T>, beta: C<T>) -> Result<Self> {
        let q = PolarizationQubit { alpha, beta };
        q.validate()?;
        Ok(q)
    }

    pub fn vertical() -> Self {
        PolarizationQubit {
            alpha: C::new(T::one(), T::zero()),
            beta: C::new(T::zero(), T::zero()),
        }
    }

    pub fn horizontal() -> Self {
        PolarizationQubit {
            alpha: C::new(T::zero(), T::zero()),
            beta: C::new(T::one(), T::zero()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (n - T::one()).abs() > real(1e-9) {
            return Err(Error::invalid(format!(
                "qubit norm^2 = {n} is not 1 within 1e-9"
            )));
        }
        Ok(())
    }
}

/// Circular-basis amplitudes after the waveplate: l on |L⟩, r on |R⟩.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CircularAmplitudes<T> {
    pub l: C<T>,
    pub r: C<T>,
}

/// Quarter-wave plate at 45°: |V⟩ → |R⟩ = (|V⟩+i|H⟩)/√2, |H⟩ → |L⟩ = (|V⟩−i|H⟩)/√2.
pub fn quarter_wave_45<T: Real>(q: &PolarizationQubit<T>) -> CircularAmplitudes<T> {
    CircularAmplitudes {
        l: q.beta,
        r: q.alpha,
    }
}

/// Inverse waveplate: circular amplitudes back to the linear basis.
pub fn quarter_wave_45_inverse<T: Real>(c: &CircularAmplitudes<T>) -> PolarizationQubit<T> {
    PolarizationQubit {
        alpha: c.r,
        beta: c.l,
    }
}

/// Photonic qubit frozen onto the two spin waves of the double-storage scheme.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StoredQubit<T> {
    pub amp_s1: C<T>,
    pub amp_s2: C<T>,
    pub stored_at: T,
    pub gamma_r: T,
    pub norm_remaining: T,
}

impl<T: Real> StoredQubit<T> {
    pub fn validate(&self) -> Result<()> {
        let n = self.amp_s1.norm_sqr() + self.amp_s2.norm_sqr();
        if (n - self.norm_remaining).abs() > real(1e-9) {
            return Err(Error::invalid(format!(
                "stored norm {n} disagrees with norm_remaining {}",
                self.norm_remaining
            )));
        }
        Ok(())
    }
}

/// Map circular amplitudes onto the spin waves: L → s₁, R → s₂.
pub fn store_circular<T: Real>(
    c: &CircularAmplitudes<T>,
    t: T,
    gamma_r: T,
) -> Result<StoredQubit<T>> {
    if gamma_r < T::zero() {
        return Err(Error::invalid("gamma_r must be >= 0"));
    }
    Ok(StoredQubit {
        amp_s1: c.l,
        amp_s2: c.r,
        stored_at: t,
        gamma_r,
        norm_remaining: c.l.norm_sqr() + c.r.norm_sqr(),
    })
}

/// Full write path: waveplate into circular components, then the spin-wave
/// map (the left-circular component lands on s₁).
pub fn store_qubit<T: Real>(q: &PolarizationQubit<T>, t: T, gamma_r: T) -> Result<StoredQubit<T>> {
    q.validate()?;
    store_circular(&quarter_wave_45(q), t, gamma_r)
}

/// Common-mode spin decoherence over `dt`: both amplitudes × e^(-γ_R dt);
/// the relative phase is untouched.
pub fn hold<T: Real>(sq: &StoredQubit<T>, dt: T) -> Result<StoredQubit<T>> {
    if dt < T::zero() {
        return Err(Error::invalid("hold time must be >= 0"));
    }
    let f = (-sq.gamma_r * dt).exp();
    Ok(StoredQubit {
        amp_s1: sq.amp_s1.scale(f),
        amp_s2: sq.amp_s2.scale(f),
        stored_at: sq.stored_at + dt,
        gamma_r: sq.gamma_r,
        norm_remaining: sq.norm_remaining * f * f,
    })
}

/// Release the qubit: inverse spin-wave map, inverse waveplate, renormalize.
/// The success probability is the surviving norm.
pub fn retrieve_qubit<T: Real>(sq: &StoredQubit<T>) -> Result<(PolarizationQubit<T>, T)> {
    if sq.norm_remaining < real(1e-12) {
        return Err(Error::precondition(
            "stored amplitude fully decayed; nothing to retrieve",
        ));
    }
    let scale = sq.norm_remaining.sqrt().recip();
    let circ = CircularAmplitudes {
        l: sq.amp_s1.scale(scale),
        r: sq.amp_s2.scale(scale),
    };
    Ok((quarter_wave_45_inverse(&circ), sq.norm_remaining))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn close(a: C<f64>, b: C<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn waveplate_basis_states() {
        // |V> becomes purely right-circular, |H> purely left-circular.
        let v = quarter_wave_45(&PolarizationQubit::<f64>::vertical());
        assert!(close(v.r, C::new(1.0, 0.0)) && close(v.l, C::new(0.0, 0.0)));
        let h = quarter_wave_45(&PolarizationQubit::<f64>::horizontal());
        assert!(close(h.l, C::new(1.0, 0.0)) && close(h.r, C::new(0.0, 0.0)));
    }

    #[test]
    fn waveplate_linearity_and_inverse() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = PolarizationQubit::new(C::new(s, 0.0), C::new(0.0, s)).unwrap();
        let c = quarter_wave_45(&q);
        assert_relative_eq!(c.l.norm_sqr() + c.r.norm_sqr(), 1.0, max_relative = 1e-12);
        let back = quarter_wave_45_inverse(&c);
        assert!(close(back.alpha, q.alpha) && close(back.beta, q.beta));
    }

    #[test]
    fn left_component_lands_on_s1() {
        // |H> is all left-circular after the waveplate, hence all on s1.
        let sq = store_qubit(&PolarizationQubit::<f64>::horizontal(), 0.0, 1.0).unwrap();
        assert!(close(sq.amp_s1, C::new(1.0, 0.0)));
        assert!(close(sq.amp_s2, C::new(0.0, 0.0)));
        assert_eq!(sq.norm_remaining, 1.0);
        sq.validate().unwrap();
    }

    #[test]
    fn hold_decay_arithmetic() {
        let gamma = 2.0 * std::f64::consts::PI * 1e3;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = PolarizationQubit::new(C::new(s, 0.0), C::new(s, 0.0)).unwrap();
        let sq = store_qubit(&q, 0.0, gamma).unwrap();
        let same = hold(&sq, 0.0).unwrap();
        assert_relative_eq!(same.norm_remaining, 1.0, max_relative = 1e-12);

        let later = hold(&sq, 1.0 / gamma).unwrap();
        assert_relative_eq!(later.norm_remaining, (-2.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(later.amp_s1.norm(), s * (-1.0f64).exp(), max_relative = 1e-12);
        // Relative phase between the two spin waves is untouched.
        let before = (sq.amp_s2 / sq.amp_s1).arg();
        let after = (later.amp_s2 / later.amp_s1).arg();
        assert_relative_eq!(before, after, epsilon = 1e-12);
        later.validate().unwrap();
    }

    #[test]
    fn success_probability_law() {
        let gamma = 1e4;
        let sq = store_qubit(&PolarizationQubit::<f64>::vertical(), 0.0, gamma).unwrap();
        for &t in &[0.0, 1e-5, 7e-5, 3e-4] {
            let (_, p) = retrieve_qubit(&hold(&sq, t).unwrap()).unwrap();
            assert_relative_eq!(p, (-2.0 * gamma * t).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn fully_decayed_store_is_degenerate() {
        let sq = store_qubit(&PolarizationQubit::<f64>::vertical(), 0.0, 1.0).unwrap();
        let dead = hold(&sq, 20.0).unwrap();
        assert!(retrieve_qubit(&dead).is_err());
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(PolarizationQubit::new(C::new(1.0, 0.0), C::new(0.5, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_identity(re_a in -1.0f64..1.0, im_a in -1.0f64..1.0,
                               re_b in -1.0f64..1.0, im_b in -1.0f64..1.0,
                               t in 0.0f64..2.0) {
            let a = C::new(re_a, im_a);
            let b = C::new(re_b, im_b);
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            prop_assume!(n > 1e-3);
            let q = PolarizationQubit::new(a.scale(1.0 / n), b.scale(1.0 / n)).unwrap();
            let sq = store_qubit(&q, 0.0, 1.0).unwrap();
            let (out, p) = retrieve_qubit(&hold(&sq, t).unwrap()).unwrap();
            prop_assert!((out.alpha - q.alpha).norm() < 1e-12);
            prop_assert!((out.beta - q.beta).norm() < 1e-12);
            prop_assert!((p - (-2.0 * t).exp()).abs() < 1e-12);
        }
    }
}
