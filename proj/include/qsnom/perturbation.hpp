#pragma once

// Rayleigh-Schroedinger perturbation theory through second order for a diagonal
// H0 and a Hermitian perturbation V, plus exact diagonalization as a cross-check.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qsnom/error.hpp"
#include "qsnom/tensor.hpp"

namespace qsnom {

struct PerturbationOptions {
    double tol_deg = 1e-12;        // degeneracy threshold relative to max|h0|
    double min_overlap = 0.5;      // state-tracking threshold for exact matching
    Tolerances tensor{};
};

struct GapEntry {
    std::size_t index;
    double gap;  // E_n - E_m
};

struct PerturbationResult {
    std::size_t state_index = 0;
    double e0 = 0.0;
    double e1 = 0.0;  // <n|V|n>
    double e2 = 0.0;
    Eigen::VectorXcd corrected_coefficients;  // c_n = 1, c_m = V_mn / (E_n - E_m)
    std::vector<GapEntry> gap_report;

    double energy() const { return e0 + e1 + e2; }
};

inline void check_engine_inputs(const OperatorMatrix& h0, const OperatorMatrix& v, std::size_t state_index,
                                const PerturbationOptions& opt)
{
    if (h0.dims() != v.dims())
        throw Error(ErrorKind::DimensionMismatch, "h0 " + dims_to_string(h0.dims()) + " vs v " +
                                                      dims_to_string(v.dims()));
    if (!h0.is_diagonal())
        throw Error(ErrorKind::NotDiagonal, "h0 must arrive diagonal in its eigenbasis");
    if (!h0.is_hermitian(opt.tensor.hermitian_rel))
        throw Error(ErrorKind::NotHermitian, "h0 has non-real diagonal");
    if (!v.is_hermitian(opt.tensor.hermitian_rel))
        throw Error(ErrorKind::NotHermitian, "perturbation is not Hermitian");
    if (state_index >= h0.size())
        throw Error(ErrorKind::InvalidParameter,
                    "state index " + std::to_string(state_index) + " outside dimension " + std::to_string(h0.size()));
}

inline PerturbationResult rs_pt2(const OperatorMatrix& h0, const OperatorMatrix& v, std::size_t state_index,
                                 const PerturbationOptions& opt = {})
{
    check_engine_inputs(h0, v, state_index, opt);

    const std::size_t dim = h0.size();
    const double tol = opt.tol_deg * h0.max_abs();
    PerturbationResult res;
    res.state_index = state_index;
    res.e0 = h0(state_index, state_index).real();
    res.e1 = v(state_index, state_index).real();
    res.corrected_coefficients = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    res.corrected_coefficients(static_cast<Eigen::Index>(state_index)) = 1.0;

    for (std::size_t m = 0; m < dim; ++m) {
        if (m == state_index)
            continue;
        const Complex vmn = v(m, state_index);
        if (vmn == Complex(0.0))
            continue;
        const double gap = res.e0 - h0(m, m).real();
        if (std::abs(gap) <= tol)
            throw Error(ErrorKind::DegenerateGap, "states " + std::to_string(state_index) + " and " +
                                                      std::to_string(m) + " are coupled across gap " +
                                                      std::to_string(gap));
        res.gap_report.push_back({m, gap});
        res.e2 += std::norm(vmn) / gap;
        res.corrected_coefficients(static_cast<Eigen::Index>(m)) = vmn / gap;
    }
    return res;
}

struct ExactComparison {
    double pt2_energy = 0.0;    // e0 + e1 + e2
    double exact_energy = 0.0;
    double residual = 0.0;
    double overlap = 0.0;       // |<n|eigvec>|^2 of the matched eigenvector
    std::size_t eigen_index = 0;
};

inline ExactComparison validate_against_exact(const OperatorMatrix& h0, const OperatorMatrix& v,
                                              std::size_t state_index, const PerturbationOptions& opt = {})
{
    const auto pt = rs_pt2(h0, v, state_index, opt);
    const auto eig = eigh(h0 + v, opt.tensor);

    const auto row = static_cast<Eigen::Index>(state_index);
    Eigen::Index best = 0;
    double best_overlap = -1.0;
    for (Eigen::Index k = 0; k < eig.eigenvectors.cols(); ++k) {
        const double ov = std::norm(eig.eigenvectors(row, k));
        if (ov > best_overlap) {
            best_overlap = ov;
            best = k;
        }
    }
    if (best_overlap < opt.min_overlap)
        throw Error(ErrorKind::AmbiguousMatching, "maximal overlap " + std::to_string(best_overlap) +
                                                      " for state " + std::to_string(state_index));

    ExactComparison out;
    out.pt2_energy = pt.energy();
    out.exact_energy = eig.eigenvalues(best);
    out.residual = std::abs(out.exact_energy - out.pt2_energy);
    out.overlap = best_overlap;
    out.eigen_index = static_cast<std::size_t>(best);
    return out;
}

} // namespace qsnom
