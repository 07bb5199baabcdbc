//! FFT-based helpers for periodic grids: exact translation by Fourier phase
//! shifts and trigonometric (band-limited) interpolation.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::{real, Real, C};

/// Signed FFT-ordered wavenumbers 2π/L · {0, 1, ..., -1} for an n-point grid.
pub fn wavenumbers<T: Real>(n: usize, domain_length: T) -> Vec<T> {
    let base = real::<T>(2.0) * T::PI() / domain_length;
    (0..n)
        .map(|i| {
            let k = if i <= n / 2 {
                i as isize
            } else {
                i as isize - n as isize
            };
            base * real(k as f64)
        })
        .collect()
}

/// Forward FFT (unnormalized, in place).
pub fn fft_forward<T: Real>(samples: &mut [C<T>]) {
    let fft = FftPlanner::new().plan_fft_forward(samples.len());
    fft.process(samples);
}

/// Inverse FFT including the 1/n normalization (in place).
pub fn fft_inverse<T: Real>(samples: &mut [C<T>]) {
    let n = samples.len();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    fft.process(samples);
    let scale = T::one() / real::<T>(n as f64);
    for v in samples.iter_mut() {
        *v = v.scale(scale);
    }
}

/// Translate a periodic field by `shift` metres: f(z) -> f(z - shift).
///
/// Implemented as multiplication by e^{-i q shift} in Fourier space, which is
/// exact for band-limited data (no numerical diffusion).
pub fn spectral_shift<T: Real>(samples: &mut [C<T>], domain_length: T, shift: T) {
    let n = samples.len();
    fft_forward(samples);
    for (v, q) in samples.iter_mut().zip(wavenumbers(n, domain_length)) {
        let phase = -q * shift;
        *v = *v * C::from_polar(T::one(), phase);
    }
    fft_inverse(samples);
}

/// Fourier mode amplitudes F_k = (1/n) Σ_j f_j e^{-i q_k z_j}.
pub fn mode_amplitudes<T: Real>(samples: &[C<T>]) -> Vec<C<T>> {
    let mut modes = samples.to_vec();
    fft_forward(&mut modes);
    let scale = T::one() / real::<T>(samples.len() as f64);
    for m in modes.iter_mut() {
        *m = m.scale(scale);
    }
    modes
}

/// Evaluate the trigonometric interpolant of a periodic field at arbitrary z.
///
/// `modes` are the normalized amplitudes from [`mode_amplitudes`]. The cost is
/// O(n) per point; use the FFT shift when the target points form the same grid.
pub fn eval_interpolant<T: Real>(modes: &[C<T>], domain_length: T, z: T) -> C<T> {
    let qs = wavenumbers(modes.len(), domain_length);
    let mut acc = C::new(T::zero(), T::zero());
    for (m, q) in modes.iter().zip(qs) {
        acc = acc + *m * C::from_polar(T::one(), q * z);
    }
    acc
}

/// L2 norm of a sampled field, √(Σ|f|² dz).
pub fn l2_norm<T: Real>(samples: &[C<T>], dz: T) -> T {
    (samples.iter().map(|v| v.norm_sqr()).sum::<T>() * dz).sqrt()
}

/// Require a power-of-two grid (spectral shifts assume it).
pub fn check_power_of_two(n: usize) -> Result<()> {
    if n == 0 || n & (n - 1) != 0 {
        return Err(Error::dimension(format!(
            "grid size {n} must be a power of two"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_grid(n: usize, l: f64, center: f64, width: f64) -> Vec<C<f64>> {
        (0..n)
            .map(|j| {
                let z = l * j as f64 / n as f64;
                C::new((-((z - center) / width).powi(2)).exp(), 0.0)
            })
            .collect()
    }

    #[test]
    fn shift_matches_analytic_translation() {
        let n = 256;
        let l = 10.0;
        let mut f = gaussian_grid(n, l, 3.0, 0.5);
        spectral_shift(&mut f, l, 1.25);
        let expect = gaussian_grid(n, l, 4.25, 0.5);
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn shift_preserves_norm_exactly() {
        let n = 512;
        let l = 4.0;
        let mut f = gaussian_grid(n, l, 1.5, 0.2);
        let before = l2_norm(&f, l / n as f64);
        for _ in 0..1000 {
            spectral_shift(&mut f, l, 0.013);
        }
        let after = l2_norm(&f, l / n as f64);
        assert!((after - before).abs() / before < 1e-10);
    }

    #[test]
    fn interpolant_hits_grid_points() {
        let n = 64;
        let l = 2.0;
        let f = gaussian_grid(n, l, 0.7, 0.15);
        let modes = mode_amplitudes(&f);
        for j in (0..n).step_by(7) {
            let z = l * j as f64 / n as f64;
            let v = eval_interpolant(&modes, l, z);
            assert!((v - f[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn power_of_two_check() {
        assert!(check_power_of_two(1024).is_ok());
        assert!(check_power_of_two(1000).is_err());
        assert!(check_power_of_two(0).is_err());
    }
}
