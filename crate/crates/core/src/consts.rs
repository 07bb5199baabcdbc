//! CODATA physical constants, exposed as generic scalar getters.

use crate::scalar::{real, Real};

/// Speed of light in vacuum, m/s.
#[inline]
pub fn speed_of_light<T: Real>() -> T {
    real(2.997_924_58e8)
}

/// Reduced Planck constant, J s.
#[inline]
pub fn hbar<T: Real>() -> T {
    real(1.054_571_817e-34)
}

/// Elementary charge, C.
#[inline]
pub fn elementary_charge<T: Real>() -> T {
    real(1.602_176_634e-19)
}

/// Bohr radius, m.
#[inline]
pub fn bohr_radius<T: Real>() -> T {
    real(5.291_772_109e-11)
}

/// Vacuum permittivity, F/m.
#[inline]
pub fn vacuum_permittivity<T: Real>() -> T {
    real(8.854_187_8128e-12)
}

/// Bohr magneton, J/T.
#[inline]
pub fn bohr_magneton<T: Real>() -> T {
    real(9.274_010_0783e-24)
}
