#pragma once

#include <random>

#include "vqclab/sim.hpp"

namespace vqc::test {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    }
    return (a + a.adjoint()) / 2.0;
}

inline Matrix random_density(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    }
    Matrix r = a * a.adjoint();
    return r / r.trace().real();
}

inline Matrix dm(const Vector& psi) { return psi * psi.adjoint(); }

inline Vector ket(int n, std::uint64_t index) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim_for_qubits(n)));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return v;
}

}  // namespace vqc::test
