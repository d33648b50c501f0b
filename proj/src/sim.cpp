#include "vqclab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "vqclab/channels.hpp"

namespace vqc {

Embedding::Embedding(int n, std::span<const int> targets)
    : n_(n), k_(static_cast<int>(targets.size())), targets_(targets.begin(), targets.end()) {
    if (targets.empty()) throw DimensionError("empty target list");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const int t = targets[i];
        if (t < 0 || t >= n) throw DimensionError("target " + std::to_string(t) + " out of range");
        const std::uint64_t b = std::uint64_t{1} << (n - 1 - t);
        if (mask_ & b) throw DimensionError("repeated target " + std::to_string(t));
        mask_ |= b;
    }
    offsets_.assign(std::size_t{1} << k_, 0);
    for (std::uint64_t a = 0; a < offsets_.size(); ++a) {
        std::uint64_t off = 0;
        for (int j = 0; j < k_; ++j) {
            if ((a >> (k_ - 1 - j)) & 1U) off |= std::uint64_t{1} << (n - 1 - targets[static_cast<std::size_t>(j)]);
        }
        offsets_[a] = off;
    }
    const std::uint64_t d = dim_for_qubits(n);
    bases_.reserve(d >> k_);
    for (std::uint64_t i = 0; i < d; ++i) {
        if ((i & mask_) == 0) bases_.push_back(i);
    }
}

namespace kernel {

namespace {

using Idx = Eigen::Index;

inline Idx ix(std::uint64_t v) { return static_cast<Idx>(v); }

void check_local(const Matrix& u, const Embedding& e) {
    if (u.rows() != static_cast<Idx>(e.local_dim()) || u.cols() != u.rows()) {
        throw DimensionError("gate size does not match its targets");
    }
}

}  // namespace

void left_apply(Matrix& m, const Matrix& u, const Embedding& e) {
    check_local(u, e);
    const auto& off = e.offsets();
    const std::size_t ld = off.size();
    if (ld == 2) {
        const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
        const std::uint64_t o = off[1];
        for (Idx c = 0; c < m.cols(); ++c) {
            cplx* col = m.col(c).data();
            for (std::uint64_t b : e.bases()) {
                const cplx a0 = col[b];
                const cplx a1 = col[b | o];
                col[b] = u00 * a0 + u01 * a1;
                col[b | o] = u10 * a0 + u11 * a1;
            }
        }
        return;
    }
    Vector in(static_cast<Idx>(ld));
    Vector out(static_cast<Idx>(ld));
    for (Idx c = 0; c < m.cols(); ++c) {
        cplx* col = m.col(c).data();
        for (std::uint64_t b : e.bases()) {
            for (std::size_t a = 0; a < ld; ++a) in(ix(a)) = col[b | off[a]];
            out.noalias() = u * in;
            for (std::size_t a = 0; a < ld; ++a) col[b | off[a]] = out(ix(a));
        }
    }
}

void right_apply_adjoint(Matrix& m, const Matrix& u, const Embedding& e) {
    check_local(u, e);
    const auto& off = e.offsets();
    const std::size_t ld = off.size();
    if (ld == 2) {
        const cplx u00 = std::conj(u(0, 0)), u01 = std::conj(u(0, 1));
        const cplx u10 = std::conj(u(1, 0)), u11 = std::conj(u(1, 1));
        const std::uint64_t o = off[1];
        for (std::uint64_t b : e.bases()) {
            cplx* c0 = m.col(ix(b)).data();
            cplx* c1 = m.col(ix(b | o)).data();
            for (Idx r = 0; r < m.rows(); ++r) {
                const cplx a0 = c0[r];
                const cplx a1 = c1[r];
                c0[r] = a0 * u00 + a1 * u01;
                c1[r] = a0 * u10 + a1 * u11;
            }
        }
        return;
    }
    const Matrix uc = u.conjugate();
    Matrix block(m.rows(), static_cast<Idx>(ld));
    for (std::uint64_t b : e.bases()) {
        for (std::size_t a = 0; a < ld; ++a) block.col(ix(a)) = m.col(ix(b | off[a]));
        const Matrix res = block * uc.transpose();
        for (std::size_t a = 0; a < ld; ++a) m.col(ix(b | off[a])) = res.col(ix(a));
    }
}

void conjugate(Matrix& m, const Matrix& u, const Embedding& e) {
    left_apply(m, u, e);
    right_apply_adjoint(m, u, e);
}

void adjoint_conjugate(Matrix& m, const Matrix& u, const Embedding& e) {
    const Matrix ud = u.adjoint();
    conjugate(m, ud, e);
}

void pauli_conjugate(const Matrix& m, Matrix& out, std::uint64_t x_global, std::uint64_t z_global,
                     cplx weight) {
    const auto d = static_cast<std::uint64_t>(m.rows());
    for (std::uint64_t c = 0; c < d; ++c) {
        const bool sc = std::popcount(z_global & (c ^ x_global)) & 1;
        const cplx* src = m.col(ix(c ^ x_global)).data();
        cplx* dst = out.col(ix(c)).data();
        for (std::uint64_t r = 0; r < d; ++r) {
            const bool sr = std::popcount(z_global & (r ^ x_global)) & 1;
            const cplx v = src[r ^ x_global];
            dst[r] += (sr != sc) ? -weight * v : weight * v;
        }
    }
}

void depolarize(Matrix& m, double p, const Embedding& e) {
    if (p == 1.0) return;
    const auto& off = e.offsets();
    const double mix = (1.0 - p) / static_cast<double>(off.size());
    for (std::uint64_t bc : e.bases()) {
        for (std::uint64_t br : e.bases()) {
            cplx s{};
            for (std::uint64_t o : off) s += m(ix(br | o), ix(bc | o));
            for (std::uint64_t oc : off) {
                for (std::uint64_t orow : off) m(ix(br | orow), ix(bc | oc)) *= p;
            }
            for (std::uint64_t o : off) m(ix(br | o), ix(bc | o)) += mix * s;
        }
    }
}

}  // namespace kernel

DensityState::DensityState(int n, Matrix mat, std::vector<std::string> labels)
    : n_(n), mat_(std::move(mat)), labels_(std::move(labels)) {
    if (labels_.empty()) {
        for (int q = 0; q < n_; ++q) labels_.push_back("q" + std::to_string(q));
    }
    if (static_cast<int>(labels_.size()) != n_) throw DimensionError("label count differs from qubit count");
}

DensityState DensityState::zero(int n, std::vector<std::string> labels) {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    Matrix m = Matrix::Zero(d, d);
    m(0, 0) = 1.0;
    return DensityState(n, std::move(m), std::move(labels));
}

DensityState DensityState::from_matrix(Matrix mat, std::vector<std::string> labels) {
    if (mat.rows() != mat.cols()) throw DimensionError("density matrix must be square");
    const int n = qubits_for_dim(mat.rows());
    return DensityState(n, std::move(mat), std::move(labels));
}

DensityState DensityState::from_pure(const Vector& psi, std::vector<std::string> labels) {
    const int n = qubits_for_dim(psi.size());
    return DensityState(n, psi * psi.adjoint(), std::move(labels));
}

void DensityState::validate(double herm_tol, double eig_tol) const {
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > herm_tol) throw NumericalError("state is not Hermitian");
    if (std::abs(mat_.trace() - cplx(1.0)) > herm_tol) throw NumericalError("state trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -eig_tol) throw NumericalError("state has a negative eigenvalue");
}

PovmEffect PovmEffect::make(Matrix m, std::string label) {
    if (m.rows() != m.cols()) throw DimensionError("effect must be square");
    qubits_for_dim(m.rows());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("effect is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 || es.eigenvalues().maxCoeff() > 1.0 + 1e-10) {
        throw ValidationError("effect eigenvalues outside [0, 1]");
    }
    return PovmEffect{std::move(m), std::move(label)};
}

DensityState apply_unitary(DensityState state, const Matrix& u, std::span<const int> targets) {
    if (!is_unitary(u)) throw ValidationError("gate is not unitary");
    const Embedding e(state.num_qubits(), targets);
    kernel::conjugate(state.mutable_matrix(), u, e);
    return state;
}

DensityState apply_channel(DensityState state, const Channel& ch, std::span<const int> targets) {
    if (static_cast<int>(targets.size()) != ch.arity()) throw DimensionError("channel arity differs from targets");
    const Embedding e(state.num_qubits(), targets);
    ch.apply(state.mutable_matrix(), e);
    return state;
}

double checked_probability(cplx value) {
    const double v = value.real();
    if (v < -1e-9 || v > 1.0 + 1e-9 || std::abs(value.imag()) > 1e-9) {
        throw NumericalError("probability outside [0, 1]: " + std::to_string(v));
    }
    return std::clamp(v, 0.0, 1.0);
}

double povm_probability(const DensityState& state, const PovmEffect& effect) {
    if (effect.matrix.rows() != state.matrix().rows()) throw DimensionError("effect and state sizes differ");
    return checked_probability((effect.matrix.cwiseProduct(state.matrix().transpose())).sum());
}

DensityState partial_trace(const DensityState& state, std::span<const int> keep) {
    if (keep.empty()) throw ValidationError("partial trace needs at least one kept qubit");
    const int n = state.num_qubits();
    const Embedding kept(n, keep);
    std::vector<int> traced;
    for (int q = 0; q < n; ++q) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
    }
    const auto kd = static_cast<Eigen::Index>(kept.local_dim());
    Matrix out = Matrix::Zero(kd, kd);
    const Matrix& m = state.matrix();
    for (std::uint64_t b : kept.bases()) {
        for (Eigen::Index c = 0; c < kd; ++c) {
            for (Eigen::Index r = 0; r < kd; ++r) {
                out(r, c) += m(static_cast<Eigen::Index>(b | kept.spread(static_cast<std::uint64_t>(r))),
                               static_cast<Eigen::Index>(b | kept.spread(static_cast<std::uint64_t>(c))));
            }
        }
    }
    std::vector<std::string> labels;
    for (int q : keep) labels.push_back(state.labels()[static_cast<std::size_t>(q)]);
    return DensityState::from_matrix(std::move(out), std::move(labels));
}

std::vector<std::uint64_t> sample_counts(std::span<const double> probs, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw ValidationError("shots must be at least 1");
    double total = 0.0;
    for (double p : probs) {
        if (p < -1e-9) throw ValidationError("negative probability");
        total += std::max(p, 0.0);
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("probabilities do not sum to 1");
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> counts(probs.size(), 0);
    std::uint64_t left = shots;
    double mass = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
        const double p = std::max(probs[i], 0.0);
        const double frac = mass > 0 ? std::clamp(p / mass, 0.0, 1.0) : 1.0;
        std::binomial_distribution<std::uint64_t> bin(left, frac);
        counts[i] = bin(rng);
        left -= counts[i];
        mass -= p;
    }
    if (!counts.empty()) counts.back() += left;
    return counts;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace vqc
