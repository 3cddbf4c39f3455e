#pragma once

// Tip dipole above a lossless dielectric half-space and its image dipole.

#include <algorithm>
#include <cmath>
#include <string>

#include "qsnom/error.hpp"
#include "qsnom/units.hpp"

namespace qsnom {

struct DielectricSample {
    double epsilon_d = 1.0;
};

struct TipDipole {
    double omega = 1.0;          // gap E'_a - E_a, eV
    double moment_scale = 1.0;   // d_aa' in model units
    double height_R = 1.0;       // tip-surface distance, nm
    double ground_energy = 0.0;  // E_a, eV

    double excited_energy() const { return ground_energy + omega; }
};

struct ImageDipole {
    double omega_image = 0.0;         // alpha^2 * omega
    double moment_scale_image = 0.0;  // alpha * d_bb'
    double ground_energy = 0.0;       // E_b = alpha^2 E_a
    double excited_energy = 0.0;      // E'_b = alpha^2 E'_a
};

struct NearFieldCheck {
    bool pass = true;
    double ratio = 0.0;  // separation / shortest reduced wavelength
};

inline void validate(const TipDipole& tip)
{
    if (!(tip.omega > 0.0) || !std::isfinite(tip.omega))
        throw Error(ErrorKind::InvalidParameter, "omega must be > 0, got " + std::to_string(tip.omega));
    if (!(tip.height_R > 0.0) || !std::isfinite(tip.height_R))
        throw Error(ErrorKind::InvalidParameter, "R must be > 0, got " + std::to_string(tip.height_R));
    if (!(tip.moment_scale > 0.0) || !std::isfinite(tip.moment_scale))
        throw Error(ErrorKind::InvalidParameter,
                    "moment_scale must be > 0, got " + std::to_string(tip.moment_scale));
    if (!std::isfinite(tip.ground_energy))
        throw Error(ErrorKind::InvalidParameter, "ground_energy must be finite");
}

// Image-charge coefficient (eps - 1) / (eps + 1).
inline double image_alpha(const DielectricSample& sample)
{
    const double eps = sample.epsilon_d;
    if (!(eps >= 1.0) || std::isinf(eps))
        throw Error(ErrorKind::UnsupportedPermittivity,
                    "epsilon_d must be a finite value >= 1, got " + std::to_string(eps));
    return (eps - 1.0) / (eps + 1.0);
}

// Inverse of image_alpha on [0, 1).
inline double permittivity_from_alpha(double alpha)
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw Error(ErrorKind::InvalidParameter, "alpha must lie in [0, 1), got " + std::to_string(alpha));
    return (1.0 + alpha) / (1.0 - alpha);
}

inline ImageDipole derive_image(const TipDipole& tip, const DielectricSample& sample)
{
    validate(tip);
    const double alpha = image_alpha(sample);
    const double a2 = alpha * alpha;
    ImageDipole image;
    image.omega_image = a2 * tip.omega;
    image.moment_scale_image = alpha * tip.moment_scale;
    image.ground_energy = a2 * tip.ground_energy;
    image.excited_energy = a2 * tip.excited_energy();
    return image;
}

// The image sits at depth R, so the dipoles are 2R apart.
inline double dipole_separation(const TipDipole& tip) { return 2.0 * tip.height_R; }

inline NearFieldCheck near_field_check(const TipDipole& tip, const ImageDipole& image, double factor = 0.1)
{
    if (!(factor > 0.0))
        throw Error(ErrorKind::InvalidParameter, "near-field factor must be > 0");
    double lambda_bar = units::reduced_wavelength_nm(tip.omega);
    if (image.omega_image > 0.0)
        lambda_bar = std::min(lambda_bar, units::reduced_wavelength_nm(image.omega_image));
    NearFieldCheck check;
    check.ratio = dipole_separation(tip) / lambda_bar;
    check.pass = check.ratio < factor;
    return check;
}

} // namespace qsnom
