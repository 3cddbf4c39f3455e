#pragma once

// Unperturbed Hamiltonian and dipole-dipole perturbation on the composite space
// tip (2) x image (2) x photon (n_max + 1). Level index 0 is the ground state.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qsnom/dipole_model.hpp"
#include "qsnom/error.hpp"
#include "qsnom/tensor.hpp"

namespace qsnom {

struct ModelConfig {
    std::size_t n_max = 1;
    std::optional<double> photon_energy;  // hbar*omega_ph in eV; resonant with the tip gap when unset
    double kappa = 0.05;                  // d_aa' d_bb' / eps0 incl. geometry factor, eV nm^3
    double regime_factor = 0.1;           // warn when g exceeds this fraction of a coupled gap

    double photon_energy_for(const TipDipole& tip) const { return photon_energy.value_or(tip.omega); }
};

inline void validate(const ModelConfig& cfg)
{
    if (cfg.n_max < 1)
        throw Error(ErrorKind::InvalidParameter, "n_max must be >= 1");
    if (cfg.photon_energy && !(*cfg.photon_energy > 0.0))
        throw Error(ErrorKind::InvalidParameter, "photon_energy must be > 0");
    if (!(cfg.kappa > 0.0) || !std::isfinite(cfg.kappa))
        throw Error(ErrorKind::InvalidParameter, "kappa must be > 0, got " + std::to_string(cfg.kappa));
}

inline Dims pair_dims() { return {2, 2}; }
inline Dims model_dims(const ModelConfig& cfg) { return {2, 2, cfg.n_max + 1}; }

// Flat index of |i_a, i_b, n>.
inline std::size_t basis_index(std::size_t i_a, std::size_t i_b, std::size_t n, std::size_t n_max)
{
    return (i_a * 2 + i_b) * (n_max + 1) + n;
}

struct BasisLabel {
    std::size_t i_a, i_b, n;
};

inline BasisLabel basis_label(std::size_t index, std::size_t n_max)
{
    const std::size_t pair = index / (n_max + 1);
    return {pair / 2, pair % 2, index % (n_max + 1)};
}

namespace ops {

inline OperatorMatrix qubit(Complex m00, Complex m01, Complex m10, Complex m11)
{
    Eigen::Matrix2cd m;
    m << m00, m01, m10, m11;
    return {{2}, m};
}

// sigma_+ = |excited><ground|, sigma_- = |ground><excited|
inline OperatorMatrix sigma_plus() { return qubit(0, 0, 1, 0); }
inline OperatorMatrix sigma_minus() { return qubit(0, 1, 0, 0); }
inline OperatorMatrix sigma_x() { return qubit(0, 1, 1, 0); }
inline OperatorMatrix projector_excited() { return qubit(0, 0, 0, 1); }

inline OperatorMatrix photon_number(std::size_t n_max)
{
    Eigen::VectorXd n(static_cast<Eigen::Index>(n_max + 1));
    for (Eigen::Index k = 0; k < n.size(); ++k)
        n(k) = static_cast<double>(k);
    return OperatorMatrix::diagonal({n_max + 1}, n);
}

} // namespace ops

// g = kappa * alpha / (2R)^3
inline double coupling_constant(const TipDipole& tip, const DielectricSample& sample, const ModelConfig& cfg)
{
    validate(tip);
    const double alpha = image_alpha(sample);
    const double sep = dipole_separation(tip);
    return cfg.kappa * alpha / (sep * sep * sep);
}

// Dipole-pair energies only, dims {2,2}.
inline OperatorMatrix build_pair_h0(const TipDipole& tip, const ImageDipole& image)
{
    const auto q2 = OperatorMatrix::identity({2});
    const double offset = tip.ground_energy + image.ground_energy;
    return kron(tip.omega * ops::projector_excited(), q2) + kron(q2, image.omega_image * ops::projector_excited()) +
           Complex(offset) * OperatorMatrix::identity(pair_dims());
}

inline OperatorMatrix build_h0(const TipDipole& tip, const ImageDipole& image, const ModelConfig& cfg)
{
    validate(cfg);
    const auto photon = cfg.photon_energy_for(tip) * ops::photon_number(cfg.n_max);
    return kron(build_pair_h0(tip, image), OperatorMatrix::identity({cfg.n_max + 1})) +
           kron(OperatorMatrix::identity(pair_dims()), photon);
}

// -g (s+a s+b + s+a s-b + s-a s+b + s-a s-b), dims {2,2}.
inline OperatorMatrix build_pair_delta_h(double g)
{
    using namespace ops;
    const auto ladder = kron(sigma_plus(), sigma_plus()) + kron(sigma_plus(), sigma_minus()) +
                        kron(sigma_minus(), sigma_plus()) + kron(sigma_minus(), sigma_minus());
    return Complex(-g) * ladder;
}

// Acts as the identity on the photon register.
inline OperatorMatrix build_delta_h(double g, const ModelConfig& cfg)
{
    validate(cfg);
    return kron(build_pair_delta_h(g), OperatorMatrix::identity({cfg.n_max + 1}));
}

struct HamiltonianPair {
    OperatorMatrix h0;
    OperatorMatrix delta_h;
    double g = 0.0;
    std::vector<std::string> warnings;
};

// Smallest |E_n - E_m| over pairs of basis states that v couples; +inf when none.
inline double min_coupled_gap(const OperatorMatrix& h0, const OperatorMatrix& v)
{
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < v.size(); ++r)
        for (std::size_t c = r + 1; c < v.size(); ++c)
            if (v(r, c) != Complex(0.0))
                gap = std::min(gap, std::abs(h0(r, r).real() - h0(c, c).real()));
    return gap;
}

inline std::optional<std::string> regime_warning(const OperatorMatrix& h0, const OperatorMatrix& v, double g,
                                                 double factor)
{
    const double gap = min_coupled_gap(h0, v);
    if (std::isfinite(gap) && std::abs(g) > factor * gap)
        return "non_perturbative: g=" + std::to_string(g) + " eV exceeds " + std::to_string(factor) +
               " x coupled gap " + std::to_string(gap) + " eV";
    return std::nullopt;
}

inline HamiltonianPair build_hamiltonian(const TipDipole& tip, const DielectricSample& sample,
                                         const ModelConfig& cfg)
{
    const auto image = derive_image(tip, sample);
    const double g = coupling_constant(tip, sample, cfg);
    HamiltonianPair out{build_h0(tip, image, cfg), build_delta_h(g, cfg), g, {}};
    if (auto w = regime_warning(out.h0, out.delta_h, g, cfg.regime_factor))
        out.warnings.push_back(*w);
    return out;
}

} // namespace qsnom
