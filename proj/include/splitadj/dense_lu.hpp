#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace splitadj {

/// Largest system the dense Newton path accepts.
inline constexpr std::size_t kDenseSizeCap = 64;

/// Partial-pivoting LU of a small dense row-major matrix.
class DenseLU {
public:
    /// Throws SingularMatrix when a pivot magnitude falls below 1e-300.
    void factor(std::span<const double> a, std::size_t m);

    /// Solves A x = b in place.
    void solve(std::span<double> x) const;
    /// Solves A^T x = b in place.
    void solve_transpose(std::span<double> x) const;

    std::size_t size() const { return m_; }
    bool factored() const { return m_ != 0; }

private:
    std::vector<double> lu_;
    std::vector<std::size_t> piv_;
    std::size_t m_ = 0;
};

} // namespace splitadj
