#pragma once

#include <random>

#include <Eigen/QR>

namespace vqc {

template <class Rng>
Matrix haar_unitary(Eigen::Index d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix z(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) z(r, c) = cplx(g(rng), g(rng));
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        const cplx di = r(i, i);
        const double a = std::abs(di);
        q.col(i) *= (a > 0 ? di / a : cplx(1.0));
    }
    return q;
}

template <class Rng>
Vector haar_state(Eigen::Index d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

}  // namespace vqc
