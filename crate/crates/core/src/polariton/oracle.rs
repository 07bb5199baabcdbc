//! Brute-force many-body check of the dark state: build the full
//! light-atoms state space for N atoms and up to n photons, apply the
//! interaction Hamiltonian directly, and measure the residual on the
//! binomially weighted superposition with mixing angle θ.

use crate::error::{Error, Result};
use crate::scalar::{real, Real, C};

use super::{binomial, dark_state_coefficients};

/// Parameters of the exact-diagonalization dark-state check.
///
/// Couplings are dimensionless (g = 1 unless θ is 0); the drive is chosen as
/// Ω = √N / tanθ so the target mixing angle is exact.
#[derive(Debug, Clone)]
pub struct DarkOracleConfig<T> {
    pub n_atoms: usize,
    pub n_photons: u32,
    pub theta: T,
    /// One-photon detuning of the excited level (does not affect the residual).
    pub delta: T,
    /// Two-photon detuning of the storage level (0 for an exact dark state).
    pub delta_r: T,
    /// Atom positions (m); pseudo-random defaults when empty.
    pub positions: Vec<T>,
    pub k_probe: T,
    pub q_mode: T,
    pub k_drive: T,
}

impl<T: Real> DarkOracleConfig<T> {
    pub fn new(n_atoms: usize, n_photons: u32, theta: T) -> Self {
        DarkOracleConfig {
            n_atoms,
            n_photons,
            theta,
            delta: real(0.3),
            delta_r: T::zero(),
            positions: Vec::new(),
            k_probe: real(1.3),
            q_mode: real(0.21),
            k_drive: real(0.9),
        }
    }
}

/// Residual report of the dark-state check.
#[derive(Debug, Clone)]
pub struct DarkOracleReport<T> {
    pub dimension: usize,
    /// ‖H|D⟩‖ / ‖|D⟩‖.
    pub residual: T,
}

const DIMENSION_CAP: usize = 4096;

/// Apply the full interaction Hamiltonian to the θ-angle dark state and
/// return the relative residual (zero up to roundoff on two-photon
/// resonance).
pub fn hamiltonian_dark_oracle<T: Real>(cfg: &DarkOracleConfig<T>) -> Result<DarkOracleReport<T>> {
    let n_at = cfg.n_atoms;
    if n_at == 0 || n_at > 12 {
        return Err(Error::invalid("n_atoms must be in 1..=12"));
    }
    if cfg.n_photons as usize > n_at {
        return Err(Error::invalid(
            "n_photons must not exceed n_atoms (spin excitations saturate)",
        ));
    }
    if cfg.theta < T::zero() || cfg.theta > T::FRAC_PI_2() {
        return Err(Error::invalid("theta must lie in [0, pi/2]"));
    }
    let pow3 = 3usize.checked_pow(n_at as u32).ok_or_else(|| {
        Error::dimension("atomic state space overflows")
    })?;
    let dim = (cfg.n_photons as usize + 1) * pow3;
    if dim > DIMENSION_CAP {
        return Err(Error::dimension(format!(
            "state space dimension {dim} exceeds cap {DIMENSION_CAP}"
        )));
    }

    let positions: Vec<T> = if cfg.positions.is_empty() {
        (0..n_at).map(|j| real::<T>(0.618 * (j + 1) as f64)).collect()
    } else {
        if cfg.positions.len() != n_at {
            return Err(Error::dimension("positions length must equal n_atoms"));
        }
        cfg.positions.clone()
    };

    // Couplings realizing the requested mixing angle tanθ = g√N/Ω.
    let sqrt_n = real::<T>(n_at as f64).sqrt();
    let (g, omega) = if cfg.theta == T::zero() {
        (T::zero(), T::one())
    } else if cfg.theta == T::FRAC_PI_2() {
        (T::one(), T::zero())
    } else {
        (T::one(), sqrt_n / cfg.theta.tan())
    };

    let dark = dark_state_vector(cfg, &positions, dim, pow3);
    let hd = apply_hamiltonian(cfg, &positions, g, omega, pow3, &dark);

    let norm = |v: &[C<T>]| v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    Ok(DarkOracleReport {
        dimension: dim,
        residual: norm(&hd) / norm(&dark),
    })
}

// Basis encoding: index = n_ph * 3^N + Σ_j digit_j 3^j with digits
// 0 = ground, 1 = storage, 2 = excited.
fn atom_digit(code: usize, j: usize) -> usize {
    (code / 3usize.pow(j as u32)) % 3
}

fn with_digit(code: usize, j: usize, digit: usize) -> usize {
    let p = 3usize.pow(j as u32);
    code - atom_digit(code, j) * p + digit * p
}

fn dark_state_vector<T: Real>(
    cfg: &DarkOracleConfig<T>,
    positions: &[T],
    dim: usize,
    pow3: usize,
) -> Vec<C<T>> {
    let n_at = cfg.n_atoms;
    let n = cfg.n_photons;
    let dk = cfg.k_probe + cfg.q_mode - cfg.k_drive;
    let coeffs = dark_state_coefficients(n, cfg.theta);
    let mut v = vec![C::new(T::zero(), T::zero()); dim];
    for m in 0..=n {
        // The binomial amplitudes are the N >> n limit; the exact dark state
        // of the finite ensemble carries the bosonic-approximation correction
        // √(N(N-1)···(N-m+1)/N^m) on the m-spin-excitation sector.
        let finite_n: f64 = (0..m)
            .map(|i| (n_at as f64 - i as f64) / n_at as f64)
            .product();
        let weight = coeffs[m as usize] * real::<T>(finite_n).sqrt()
            / real::<T>(binomial(n_at as u32, m)).sqrt();
        if weight == T::zero() {
            continue;
        }
        let n_ph = (n - m) as usize;
        // All subsets of m atoms carrying the storage excitation.
        for mask in 0..(1usize << n_at) {
            if mask.count_ones() != m {
                continue;
            }
            let mut code = 0usize;
            let mut phase = T::zero();
            for j in 0..n_at {
                if mask & (1 << j) != 0 {
                    code = with_digit(code, j, 1);
                    phase = phase + dk * positions[j];
                }
            }
            v[n_ph * pow3 + code] = v[n_ph * pow3 + code]
                + C::from_polar(T::one(), phase).scale(weight);
        }
    }
    v
}

// Matrix-free application of
//   H = Δ Σ_j |e><e|_j + δ_R Σ_j |s><s|_j
//     - Σ_j [ g e^{i(k+q)z_j} â |e><g|_j + Ω e^{i k_d z_j} |e><s|_j + h.c. ]
fn apply_hamiltonian<T: Real>(
    cfg: &DarkOracleConfig<T>,
    positions: &[T],
    g: T,
    omega: T,
    pow3: usize,
    v: &[C<T>],
) -> Vec<C<T>> {
    let n_at = cfg.n_atoms;
    let n_max = cfg.n_photons as usize;
    let kq = cfg.k_probe + cfg.q_mode;
    let mut out = vec![C::new(T::zero(), T::zero()); v.len()];
    for (idx, &amp) in v.iter().enumerate() {
        if amp == C::new(T::zero(), T::zero()) {
            continue;
        }
        let n_ph = idx / pow3;
        let code = idx % pow3;
        let mut diag = T::zero();
        for j in 0..n_at {
            let a = C::from_polar(-g, kq * positions[j]);
            let b = C::from_polar(-omega, cfg.k_drive * positions[j]);
            match atom_digit(code, j) {
                0 => {
                    if n_ph > 0 {
                        let tgt = (n_ph - 1) * pow3 + with_digit(code, j, 2);
                        out[tgt] = out[tgt] + a.scale(real::<T>(n_ph as f64).sqrt()) * amp;
                    }
                }
                1 => {
                    diag = diag + cfg.delta_r;
                    let tgt = n_ph * pow3 + with_digit(code, j, 2);
                    out[tgt] = out[tgt] + b * amp;
                }
                _ => {
                    diag = diag + cfg.delta;
                    if n_ph < n_max {
                        let tgt = (n_ph + 1) * pow3 + with_digit(code, j, 0);
                        out[tgt] =
                            out[tgt] + a.conj().scale(real::<T>((n_ph + 1) as f64).sqrt()) * amp;
                    }
                    let tgt = n_ph * pow3 + with_digit(code, j, 1);
                    out[tgt] = out[tgt] + b.conj() * amp;
                }
            }
        }
        out[idx] = out[idx] + amp.scale(diag);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dark_state_annihilated_across_angles() {
        for &theta in &[0.0, 0.3, std::f64::consts::FRAC_PI_4, 1.2, std::f64::consts::FRAC_PI_2] {
            let cfg = DarkOracleConfig::new(4, 2, theta);
            let rep = hamiltonian_dark_oracle(&cfg).unwrap();
            assert_eq!(rep.dimension, 243);
            assert!(
                rep.residual < 1e-12,
                "theta={theta}: residual {}",
                rep.residual
            );
        }
    }

    #[test]
    fn single_excitation_small_ensembles() {
        for n_at in 1..=6 {
            let cfg = DarkOracleConfig::new(n_at, 1, 0.9);
            let rep = hamiltonian_dark_oracle(&cfg).unwrap();
            assert!(rep.residual < 1e-13, "N={n_at}: residual {}", rep.residual);
        }
    }

    #[test]
    fn bright_two_photon_detuning_breaks_darkness() {
        let mut cfg = DarkOracleConfig::new(3, 1, 0.8);
        cfg.delta_r = 0.5;
        let rep = hamiltonian_dark_oracle(&cfg).unwrap();
        assert!(rep.residual > 0.1);
    }

    #[test]
    fn one_photon_detuning_is_irrelevant() {
        let mut cfg = DarkOracleConfig::new(3, 2, 1.0);
        cfg.delta = 17.0;
        let rep = hamiltonian_dark_oracle(&cfg).unwrap();
        assert!(rep.residual < 1e-12);
    }

    #[test]
    fn rejects_oversized_spaces() {
        assert!(hamiltonian_dark_oracle(&DarkOracleConfig::<f64>::new(9, 2, 0.5)).is_err());
        assert!(hamiltonian_dark_oracle(&DarkOracleConfig::<f64>::new(2, 3, 0.5)).is_err());
    }
}
