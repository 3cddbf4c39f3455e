#pragma once

namespace qsnom::units {

// Energies are carried in eV, lengths in nm. Frequencies are reported as E/hbar
// with hbar = 1 internally, so an angular frequency "in eV/hbar" has the same
// numerical value as the energy it came from.
inline constexpr double hbar_c_eV_nm = 197.3269804;
inline constexpr double hbar = 1.0;

constexpr double energy_to_frequency(double energy_eV) { return energy_eV / hbar; }
constexpr double frequency_to_energy(double frequency) { return frequency * hbar; }

// lambda-bar = hbar c / E, in nm.
constexpr double reduced_wavelength_nm(double energy_eV) { return hbar_c_eV_nm / energy_eV; }

} // namespace qsnom::units
