#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mechlab/core.hpp"

namespace mechlab {

/// Dense row-major square matrix. Sizes here are tiny (n_agents *
/// n_alternatives), so no effort is spent on blocking or vectorization.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    static SquareMatrix identity(int n) {
        SquareMatrix m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        const int n = static_cast<int>(rows.size());
        SquareMatrix m(n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
                throw DimensionError("SquareMatrix: ragged rows");
            for (int j = 0; j < n; ++j)
                m.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return m;
    }

    int size() const { return n_; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    bool symmetric_within(double tol) const {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (std::abs(at(i, j) - at(j, i)) > tol) return false;
        return true;
    }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    int n_ = 0;
    std::vector<double> a_;
};

struct PsdFactor {
    SquareMatrix lower;  // A = L L^T, columns with zero pivot are zeroed
    int rank = 0;
    bool full_rank() const { return rank == lower.size(); }
};

/// Cholesky factorization accepting positive semidefinite input. A zero pivot
/// (within tol) produces a zero column, which keeps degenerate correlation
/// structures (e.g. perfectly correlated coordinates) exactly reproducible.
/// Throws ParameterError on pivots below -tol.
inline PsdFactor psd_cholesky(const SquareMatrix& a, double tol = 1e-10) {
    const int n = a.size();
    PsdFactor f{SquareMatrix(n), 0};
    SquareMatrix& L = f.lower;
    for (int j = 0; j < n; ++j) {
        double d = a.at(j, j);
        for (int k = 0; k < j; ++k) d -= L.at(j, k) * L.at(j, k);
        if (d > tol) {
            L.at(j, j) = std::sqrt(d);
            ++f.rank;
            for (int i = j + 1; i < n; ++i) {
                double s = a.at(i, j);
                for (int k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
                L.at(i, j) = s / L.at(j, j);
            }
        } else if (d >= -tol) {
            // Semidefinite direction: the whole column is linearly dependent.
            for (int i = j; i < n; ++i) L.at(i, j) = 0.0;
        } else {
            throw ParameterError("psd_cholesky: matrix is not positive semidefinite (pivot " +
                                 std::to_string(d) + " at index " + std::to_string(j) + ")");
        }
    }
    return f;
}

/// Solve L y = b in place. Requires a full-rank lower factor.
inline void solve_lower(const SquareMatrix& L, std::vector<double>& b) {
    const int n = L.size();
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= L.at(i, k) * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / L.at(i, i);
    }
}

/// Solve L^T x = b in place. Requires a full-rank lower factor.
inline void solve_lower_transposed(const SquareMatrix& L, std::vector<double>& b) {
    const int n = L.size();
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= L.at(k, i) * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / L.at(i, i);
    }
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
/// Used for validation diagnostics, not in any sampling path.
inline double min_eigenvalue_symmetric(SquareMatrix a, int max_sweeps = 64) {
    const int n = a.size();
    if (n == 1) return a.at(0, 0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a.at(k, p);
                    const double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a.at(p, k);
                    const double aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double mn = a.at(0, 0);
    for (int i = 1; i < n; ++i) mn = std::min(mn, a.at(i, i));
    return mn;
}

}  // namespace mechlab
