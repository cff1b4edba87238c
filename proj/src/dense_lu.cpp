#include "splitadj/dense_lu.hpp"

#include <cmath>
#include <utility>

#include "splitadj/error.hpp"

namespace splitadj {

void DenseLU::factor(std::span<const double> a, std::size_t m) {
    if (m == 0 || a.size() < m * m) {
        throw InvalidArgument("DenseLU::factor: bad dimensions");
    }
    m_ = 0;
    lu_.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(m * m));
    piv_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t p = k;
        double best = std::fabs(lu_[k * m + k]);
        for (std::size_t i = k + 1; i < m; ++i) {
            const double v = std::fabs(lu_[i * m + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best >= 1e-300)) {
            throw SingularMatrix(k, best);
        }
        piv_[k] = p;
        if (p != k) {
            for (std::size_t j = 0; j < m; ++j) {
                std::swap(lu_[k * m + j], lu_[p * m + j]);
            }
        }
        const double inv = 1.0 / lu_[k * m + k];
        for (std::size_t i = k + 1; i < m; ++i) {
            const double l = lu_[i * m + k] * inv;
            lu_[i * m + k] = l;
            if (l != 0.0) {
                for (std::size_t j = k + 1; j < m; ++j) {
                    lu_[i * m + j] -= l * lu_[k * m + j];
                }
            }
        }
    }
    m_ = m;
}

void DenseLU::solve(std::span<double> x) const {
    const std::size_t m = m_;
    if (m == 0 || x.size() < m) {
        throw InvalidArgument("DenseLU::solve: not factored or bad size");
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (piv_[k] != k) {
            std::swap(x[k], x[piv_[k]]);
        }
    }
    for (std::size_t i = 1; i < m; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) {
            s -= lu_[i * m + j] * x[j];
        }
        x[i] = s;
    }
    for (std::size_t i = m; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < m; ++j) {
            s -= lu_[i * m + j] * x[j];
        }
        x[i] = s / lu_[i * m + i];
    }
}

void DenseLU::solve_transpose(std::span<double> x) const {
    // A = P^T L U, so A^T = U^T L^T P.
    const std::size_t m = m_;
    if (m == 0 || x.size() < m) {
        throw InvalidArgument("DenseLU::solve_transpose: not factored or bad size");
    }
    for (std::size_t i = 0; i < m; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) {
            s -= lu_[j * m + i] * x[j];
        }
        x[i] = s / lu_[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < m; ++j) {
            s -= lu_[j * m + i] * x[j];
        }
        x[i] = s;
    }
    for (std::size_t k = m; k-- > 0;) {
        if (piv_[k] != k) {
            std::swap(x[k], x[piv_[k]]);
        }
    }
}

} // namespace splitadj
