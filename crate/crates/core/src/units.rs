//! Unit system: Å, fs, amu, eV, K.

/// Boltzmann constant in eV/K.
pub const BOLTZMANN: f64 = 8.617_333_262e-5;

/// Kinetic energy of 1 amu moving at 1 Å/fs, in eV.
pub const MVV_TO_EV: f64 = 103.642_696_526_8;

/// Converts force/mass (eV/Å/amu) into acceleration (Å/fs²).
pub const FORCE_TO_ACCEL: f64 = 1.0 / MVV_TO_EV;
