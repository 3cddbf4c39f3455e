#pragma once

// Forward model eps_d -> (delta_e, omega_s, amplitude), its inversion from an
// observed scattered frequency, and one-dimensional parameter sweeps.

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsnom/closed_forms.hpp"
#include "qsnom/dipole_model.hpp"
#include "qsnom/error.hpp"
#include "qsnom/hamiltonian.hpp"
#include "qsnom/perturbation.hpp"

namespace qsnom {

enum class ShiftModel { Paper, Oracle };

inline std::string_view to_string(ShiftModel m) { return m == ShiftModel::Paper ? "paper" : "oracle"; }

struct ForwardParams {
    double epsilon_d = 1.0;
    double R = 1.0;
    double omega = 1.0;
    double kappa = 0.05;
    std::size_t n_max = 1;
    std::optional<double> photon_energy;
    double near_field_factor = 0.1;
    ShiftModel model = ShiftModel::Paper;
};

struct ForwardResult {
    double alpha = 0.0;
    double g = 0.0;
    double delta_e_paper = 0.0;
    double delta_e_oracle = 0.0;
    double delta_e = 0.0;  // the one selected by ForwardParams::model
    double omega_s = 0.0;
    double amplitude = 0.0;
    BetaCoefficients beta;
    NearFieldCheck near_field;
    std::vector<std::string> warnings;
};

// Ground-state initialization a = (1,0,0,0). The oracle shift runs the generic
// engine on the full composite Hamiltonian.
inline ForwardResult forward(const ForwardParams& fp)
{
    const TipDipole tip{fp.omega, 1.0, fp.R, 0.0};
    const DielectricSample sample{fp.epsilon_d};
    const ModelConfig model{fp.n_max, fp.photon_energy, fp.kappa, 0.1};
    validate(tip);
    validate(model);

    ForwardResult out;
    out.alpha = image_alpha(sample);
    const auto image = derive_image(tip, sample);
    out.near_field = near_field_check(tip, image, fp.near_field_factor);
    if (!out.near_field.pass)
        out.warnings.push_back("near_field: 2R / lambda_bar = " + std::to_string(out.near_field.ratio));

    const auto ham = build_hamiltonian(tip, sample, model);
    out.g = ham.g;
    out.warnings.insert(out.warnings.end(), ham.warnings.begin(), ham.warnings.end());

    const ClosedFormParams p{fp.R, out.alpha, fp.omega, fp.kappa};
    out.delta_e_paper = paper_energy_shift(1.0, p);
    out.beta = paper_beta(InitialCoefficients::ground(), p);

    const auto pt = rs_pt2(ham.h0, ham.delta_h, basis_index(0, 0, 1, fp.n_max));
    out.delta_e_oracle = pt.e2 == 0.0 ? 0.0 : pt.e2;

    if (fp.model == ShiftModel::Paper) {
        out.delta_e = out.delta_e_paper;
        out.amplitude = paper_scattered_amplitude(out.beta);
    } else {
        out.delta_e = out.delta_e_oracle;
        out.amplitude = 1.0 / pt.corrected_coefficients.norm();
    }
    out.omega_s = scattered_frequency(fp.omega, out.delta_e);
    return out;
}

// |delta_e| alone, skipping diagnostics; used inside the root finder.
inline double shift_magnitude(const ForwardParams& fp)
{
    const double alpha = image_alpha({fp.epsilon_d});
    if (fp.model == ShiftModel::Paper)
        return std::abs(paper_energy_shift(1.0, {fp.R, alpha, fp.omega, fp.kappa}));
    // Only |a,b,1> <-> |a',b',1> is coupled, across omega (1 + alpha^2).
    const double sep = 2.0 * fp.R;
    const double g = fp.kappa * alpha / (sep * sep * sep);
    return g * g / (fp.omega * (1.0 + alpha * alpha));
}

struct InversionProblem {
    double observed_omega_s = 1.0;
    double R = 1.0;
    double omega = 1.0;
    double kappa = 0.05;
    double eps_lo = 1.0 + 1e-9;
    double eps_hi = 1e6;
    double tol_rel = 1e-10;
    std::uintmax_t max_iter = 200;
    ShiftModel model = ShiftModel::Paper;

    ForwardParams at(double eps) const
    {
        ForwardParams fp;
        fp.epsilon_d = eps;
        fp.R = R;
        fp.omega = omega;
        fp.kappa = kappa;
        fp.model = model;
        return fp;
    }
};

struct InversionResult {
    double epsilon_d = 0.0;
    std::uintmax_t iterations = 0;
    double residual = 0.0;  // |omega_s(eps) - observed| / omega
};

inline void validate(const InversionProblem& p)
{
    if (!(p.eps_lo > 1.0) || !(p.eps_hi > p.eps_lo) || !std::isfinite(p.eps_hi))
        throw Error(ErrorKind::InvalidParameter, "bracket must satisfy 1 < eps_lo < eps_hi < inf");
    if (!(p.tol_rel > 0.0))
        throw Error(ErrorKind::InvalidParameter, "tol_rel must be > 0");
    if (p.max_iter == 0)
        throw Error(ErrorKind::InvalidParameter, "max_iter must be >= 1");
    if (!std::isfinite(p.observed_omega_s))
        throw Error(ErrorKind::InvalidParameter, "observed_omega_s must be finite");
    validate(TipDipole{p.omega, 1.0, p.R, 0.0});
    if (!(p.kappa > 0.0))
        throw Error(ErrorKind::InvalidParameter, "kappa must be > 0");
}

// Solves |delta_e(eps)| = omega - observed on log(eps) with TOMS 748, a bracketing
// method that never leaves the sign-changing interval.
inline InversionResult invert_permittivity(const InversionProblem& p)
{
    validate(p);
    const double omega_at_lo = scattered_frequency(p.omega, -shift_magnitude(p.at(p.eps_lo)));
    const double omega_at_hi = scattered_frequency(p.omega, -shift_magnitude(p.at(p.eps_hi)));
    auto residual = [&](double eps) {
        return std::abs(scattered_frequency(p.omega, -shift_magnitude(p.at(eps))) - p.observed_omega_s) / p.omega;
    };

    if (p.observed_omega_s > omega_at_lo || p.observed_omega_s < omega_at_hi)
        throw Error(ErrorKind::OutOfBracket, "observed omega_s " + std::to_string(p.observed_omega_s) +
                                                 " outside attainable range [" + std::to_string(omega_at_hi) + ", " +
                                                 std::to_string(omega_at_lo) + "]");
    if (p.observed_omega_s == omega_at_lo)
        return {p.eps_lo, 0, residual(p.eps_lo)};
    if (p.observed_omega_s == omega_at_hi)
        return {p.eps_hi, 0, residual(p.eps_hi)};

    const double target = p.omega - p.observed_omega_s;
    auto f = [&](double log_eps) { return shift_magnitude(p.at(std::exp(log_eps))) - target; };

    double lo = std::log(p.eps_lo), hi = std::log(p.eps_hi);
    double f_lo = f(lo), f_hi = f(hi);
    if (f_lo >= 0.0)
        return {p.eps_lo, 0, residual(p.eps_lo)};
    if (f_hi <= 0.0)
        return {p.eps_hi, 0, residual(p.eps_hi)};

    std::uintmax_t iters = p.max_iter;
    // Width in log(eps) is the relative width in eps.
    const auto tol = [&](double a, double b) { return std::abs(b - a) <= p.tol_rel; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);

    InversionResult out;
    out.iterations = iters;
    // Pick the bracket end with the smaller frequency residual.
    const double ea = std::exp(a), eb = std::exp(b);
    const double ra = residual(ea), rb = residual(eb);
    out.epsilon_d = ra <= rb ? ea : eb;
    out.residual = std::min(ra, rb);
    if (out.residual >= p.tol_rel || !tol(a, b))
        throw Error(ErrorKind::NoConvergence, "no convergence after " + std::to_string(iters) +
                                                  " iterations; frequency residual " + std::to_string(out.residual));
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class SweepAxis { EpsilonD, R, Omega, Kappa };

inline std::string_view axis_name(SweepAxis a)
{
    switch (a) {
    case SweepAxis::EpsilonD: return "epsilon_d";
    case SweepAxis::R: return "R_nm";
    case SweepAxis::Omega: return "omega_eV";
    case SweepAxis::Kappa: return "kappa";
    }
    return "";
}

inline std::optional<SweepAxis> parse_axis(std::string_view s)
{
    for (auto a : {SweepAxis::EpsilonD, SweepAxis::R, SweepAxis::Omega, SweepAxis::Kappa})
        if (s == axis_name(a))
            return a;
    if (s == "R")
        return SweepAxis::R;
    if (s == "omega")
        return SweepAxis::Omega;
    return std::nullopt;
}

// Every column after the axis value, in output order.
inline const std::vector<std::string>& sweep_output_columns()
{
    static const std::vector<std::string> cols{"alpha",    "g_eV",      "delta_e_paper_eV", "delta_e_oracle_eV",
                                               "omega_s",  "amplitude", "near_field_ratio", "warnings",
                                               "error"};
    return cols;
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::EpsilonD;
    std::vector<double> values;
    ForwardParams fixed;
    std::vector<std::string> outputs = sweep_output_columns();
};

inline std::vector<double> linspace(double start, double stop, std::size_t count)
{
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    if (count > 1)
        v.back() = stop;
    return v;
}

inline std::vector<double> logspace(double start, double stop, std::size_t count)
{
    if (!(start > 0.0 && stop > 0.0))
        throw Error(ErrorKind::InvalidParameter, "log-spaced sweep needs positive endpoints");
    auto v = linspace(std::log(start), std::log(stop), count);
    for (auto& x : v)
        x = std::exp(x);
    v.front() = start;
    v.back() = stop;
    return v;
}

inline void validate(const SweepSpec& s)
{
    if (s.values.size() < 2)
        throw Error(ErrorKind::InvalidParameter, "sweep needs at least 2 values");
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < s.values.size(); ++i) {
        inc = inc && s.values[i] > s.values[i - 1];
        dec = dec && s.values[i] < s.values[i - 1];
    }
    if (!inc && !dec)
        throw Error(ErrorKind::InvalidParameter, "sweep values must be strictly monotone");
    if (s.outputs.empty())
        throw Error(ErrorKind::InvalidParameter, "sweep output selection is empty");
    const auto& known = sweep_output_columns();
    for (const auto& o : s.outputs)
        if (std::find(known.begin(), known.end(), o) == known.end())
            throw Error(ErrorKind::InvalidParameter, "unknown sweep output column '" + o + "'");
}

struct SweepRow {
    double axis_value = 0.0;
    std::optional<ForwardResult> result;
    std::string error;
};

inline ForwardParams with_axis(ForwardParams fp, SweepAxis axis, double v)
{
    switch (axis) {
    case SweepAxis::EpsilonD: fp.epsilon_d = v; break;
    case SweepAxis::R: fp.R = v; break;
    case SweepAxis::Omega: fp.omega = v; break;
    case SweepAxis::Kappa: fp.kappa = v; break;
    }
    return fp;
}

// Rows follow the order of s.values; a failing point carries its error text.
inline std::vector<SweepRow> run_sweep(const SweepSpec& s)
{
    validate(s);
    std::vector<SweepRow> rows;
    rows.reserve(s.values.size());
    for (double v : s.values) {
        SweepRow row;
        row.axis_value = v;
        try {
            row.result = forward(with_axis(s.fixed, s.axis, v));
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace qsnom
