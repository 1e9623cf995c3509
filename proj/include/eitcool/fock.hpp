// fock.hpp — Small utilities on Fock-space population vectors.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace eitcool::fock {

// Thermal (geometric) distribution with mean occupation nbar, truncated and
// renormalized on dim states. nbar = 0 gives the ground state.
inline Eigen::VectorXd thermal_distribution(double nbar, int dim) {
    if (dim < 1) throw std::invalid_argument("thermal_distribution: dim must be >= 1");
    if (nbar < 0.0) throw std::invalid_argument("thermal_distribution: nbar must be >= 0");
    Eigen::VectorXd p(dim);
    if (nbar == 0.0) {
        p.setZero();
        p(0) = 1.0;
        return p;
    }
    const double q = nbar / (nbar + 1.0);
    for (int n = 0; n < dim; ++n) p(n) = std::pow(q, n);
    p /= p.sum();
    return p;
}

inline double nbar_of(const Eigen::VectorXd& populations) {
    double total = 0.0;
    for (int n = 0; n < populations.size(); ++n) total += n * populations(n);
    return total;
}

} // namespace eitcool::fock
