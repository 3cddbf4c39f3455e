#pragma once

// Dense complex linear algebra on small composite Hilbert spaces.
//
// Subsystem ordering follows the usual Kronecker convention: the first entry of
// `dims` is the most significant digit of the flat basis index.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "qsnom/error.hpp"

namespace qsnom {

using Complex = std::complex<double>;
using Dims = std::vector<std::size_t>;

struct Tolerances {
    double hermitian_rel = 1e-12;  // max|M - M^H| relative to max|M|
    double normalization = 1e-9;   // accepted deviation of <psi|psi> from 1
};

inline std::size_t total_dim(const Dims& dims)
{
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string dims_to_string(const Dims& dims)
{
    std::string s = "[";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(dims[i]);
    }
    return s + "]";
}

class StateVector {
public:
    StateVector(Dims dims, Eigen::VectorXcd amplitudes)
        : dims_(std::move(dims)), amplitudes_(std::move(amplitudes))
    {
        if (dims_.empty() || static_cast<std::size_t>(amplitudes_.size()) != total_dim(dims_))
            throw Error(ErrorKind::DimensionMismatch,
                        "state of length " + std::to_string(amplitudes_.size()) +
                            " does not match dims " + dims_to_string(dims_));
    }

    static StateVector basis(const Dims& dims, std::size_t index)
    {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total_dim(dims)));
        if (index >= static_cast<std::size_t>(v.size()))
            throw Error(ErrorKind::InvalidParameter, "basis index out of range");
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return {dims, std::move(v)};
    }

    const Dims& dims() const { return dims_; }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }

    double squared_norm() const { return amplitudes_.squaredNorm(); }
    bool is_normalized(double tol = 1e-12) const { return std::abs(squared_norm() - 1.0) <= tol; }

    StateVector normalized() const
    {
        const double n = amplitudes_.norm();
        if (n == 0.0)
            throw Error(ErrorKind::ZeroState, "cannot normalize the zero vector");
        return {dims_, amplitudes_ / n};
    }

private:
    Dims dims_;
    Eigen::VectorXcd amplitudes_;
};

class OperatorMatrix {
public:
    OperatorMatrix(Dims dims, Eigen::MatrixXcd entries)
        : dims_(std::move(dims)), entries_(std::move(entries))
    {
        const auto n = total_dim(dims_);
        if (dims_.empty() || static_cast<std::size_t>(entries_.rows()) != n ||
            static_cast<std::size_t>(entries_.cols()) != n)
            throw Error(ErrorKind::DimensionMismatch,
                        "matrix of shape " + std::to_string(entries_.rows()) + "x" +
                            std::to_string(entries_.cols()) + " does not match dims " +
                            dims_to_string(dims_));
    }

    static OperatorMatrix identity(const Dims& dims)
    {
        const auto n = static_cast<Eigen::Index>(total_dim(dims));
        return {dims, Eigen::MatrixXcd::Identity(n, n)};
    }

    static OperatorMatrix zero(const Dims& dims)
    {
        const auto n = static_cast<Eigen::Index>(total_dim(dims));
        return {dims, Eigen::MatrixXcd::Zero(n, n)};
    }

    static OperatorMatrix diagonal(const Dims& dims, const Eigen::VectorXd& diag)
    {
        return {dims, diag.cast<Complex>().asDiagonal().toDenseMatrix()};
    }

    const Dims& dims() const { return dims_; }
    const Eigen::MatrixXcd& entries() const { return entries_; }
    std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

    Complex operator()(std::size_t row, std::size_t col) const
    {
        return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    double max_abs() const { return entries_.size() == 0 ? 0.0 : entries_.cwiseAbs().maxCoeff(); }
    Complex trace() const { return entries_.trace(); }

    double hermiticity_defect() const
    {
        return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    }

    bool is_hermitian(double tol_rel = Tolerances{}.hermitian_rel) const
    {
        return hermiticity_defect() <= tol_rel * max_abs();
    }

    bool is_diagonal(double tol_rel = 0.0) const
    {
        Eigen::MatrixXcd off = entries_;
        off.diagonal().setZero();
        return off.cwiseAbs().maxCoeff() <= tol_rel * max_abs();
    }

    OperatorMatrix operator+(const OperatorMatrix& other) const
    {
        require_same_dims(other);
        return {dims_, entries_ + other.entries_};
    }

    OperatorMatrix operator-(const OperatorMatrix& other) const
    {
        require_same_dims(other);
        return {dims_, entries_ - other.entries_};
    }

    OperatorMatrix operator*(const OperatorMatrix& other) const
    {
        require_same_dims(other);
        return {dims_, entries_ * other.entries_};
    }

    friend OperatorMatrix operator*(Complex s, const OperatorMatrix& m) { return {m.dims_, s * m.entries_}; }

    StateVector apply(const StateVector& psi) const
    {
        if (psi.dims() != dims_)
            throw Error(ErrorKind::DimensionMismatch, "operator and state dims differ");
        return {dims_, entries_ * psi.amplitudes()};
    }

private:
    void require_same_dims(const OperatorMatrix& other) const
    {
        if (other.dims_ != dims_)
            throw Error(ErrorKind::DimensionMismatch,
                        dims_to_string(dims_) + " vs " + dims_to_string(other.dims_));
    }

    Dims dims_;
    Eigen::MatrixXcd entries_;
};

struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // column k belongs to eigenvalues(k)
};

inline OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b)
{
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    Eigen::MatrixXcd k = Eigen::kroneckerProduct(a.entries(), b.entries());
    return {std::move(dims), std::move(k)};
}

inline StateVector kron(const StateVector& a, const StateVector& b)
{
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    Eigen::VectorXcd k = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
    return {std::move(dims), std::move(k)};
}

// Direct dense solver; intended for dimensions up to a few dozen.
inline EigenDecomposition eigh(const OperatorMatrix& m, const Tolerances& tol = {})
{
    if (!m.is_hermitian(tol.hermitian_rel))
        throw Error(ErrorKind::NotHermitian,
                    "hermiticity defect " + std::to_string(m.hermiticity_defect()) +
                        " exceeds tolerance relative to max|M| = " + std::to_string(m.max_abs()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m.entries());
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NoConvergence, "Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline OperatorMatrix outer(const StateVector& psi, const Tolerances& tol = {})
{
    const double n2 = psi.squared_norm();
    if (std::abs(n2 - 1.0) > tol.normalization)
        throw Error(ErrorKind::NotNormalized, "squared norm " + std::to_string(n2) + " is not 1");
    const auto& v = psi.amplitudes();
    return {psi.dims(), v * v.adjoint()};
}

// Traces out every subsystem not listed in `keep`. Kept subsystems appear in the
// result in ascending index order regardless of the order given.
inline OperatorMatrix partial_trace(const OperatorMatrix& rho, std::vector<std::size_t> keep)
{
    const Dims& dims = rho.dims();
    if (keep.empty())
        throw Error(ErrorKind::BadSubsystemIndex, "keep set is empty");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (auto k : keep)
        if (k >= dims.size())
            throw Error(ErrorKind::BadSubsystemIndex,
                        "subsystem " + std::to_string(k) + " does not exist in dims " +
                            dims_to_string(dims));

    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep)
        kept[k] = true;

    Dims kept_dims;
    for (auto k : keep)
        kept_dims.push_back(dims[k]);

    // Split a flat index into (kept index, traced index) using per-subsystem digits.
    const std::size_t n = total_dim(dims);
    std::vector<std::size_t> kept_of(n), traced_of(n);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t rem = flat, kept_idx = 0, traced_idx = 0, kept_stride = 1, traced_stride = 1;
        for (std::size_t s = dims.size(); s-- > 0;) {
            const std::size_t digit = rem % dims[s];
            rem /= dims[s];
            if (kept[s]) {
                kept_idx += digit * kept_stride;
                kept_stride *= dims[s];
            } else {
                traced_idx += digit * traced_stride;
                traced_stride *= dims[s];
            }
        }
        kept_of[flat] = kept_idx;
        traced_of[flat] = traced_idx;
    }

    const auto m = static_cast<Eigen::Index>(total_dim(kept_dims));
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
    const auto& e = rho.entries();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (traced_of[r] == traced_of[c])
                out(static_cast<Eigen::Index>(kept_of[r]), static_cast<Eigen::Index>(kept_of[c])) +=
                    e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return {std::move(kept_dims), std::move(out)};
}

inline double purity(const OperatorMatrix& rho)
{
    return (rho.entries() * rho.entries()).trace().real();
}

} // namespace qsnom
