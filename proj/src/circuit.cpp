#include "vqclab/circuit.hpp"

#include <algorithm>
#include <cmath>

#include "vqclab/sim.hpp"

namespace vqc {

namespace gates {

namespace {
Matrix m2(cplx a, cplx b, cplx c, cplx d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}
const cplx I{0.0, 1.0};
}  // namespace

Matrix id2() { return Matrix::Identity(2, 2); }
Matrix h() {
    const double r = 1.0 / std::sqrt(2.0);
    return m2(r, r, r, -r);
}
Matrix x() { return m2(0, 1, 1, 0); }
Matrix y() { return m2(0, -I, I, 0); }
Matrix z() { return m2(1, 0, 0, -1); }
Matrix s() { return m2(1, 0, 0, I); }
Matrix sdg() { return m2(1, 0, 0, -I); }
Matrix t() { return phase(kPi / 4); }
Matrix tdg() { return phase(-kPi / 4); }
Matrix cnot() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}
Matrix swap() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}
Matrix phase(double phi) { return m2(1, 0, 0, std::exp(I * phi)); }
Matrix rx(double th) { return m2(std::cos(th / 2), -I * std::sin(th / 2), -I * std::sin(th / 2), std::cos(th / 2)); }
Matrix ry(double th) { return m2(std::cos(th / 2), -std::sin(th / 2), std::sin(th / 2), std::cos(th / 2)); }
Matrix rz(double th) { return m2(std::exp(-I * th / 2.0), 0, 0, std::exp(I * th / 2.0)); }
Matrix yzy(double a1, double a2, double a3) { return ry(a3) * rz(a2) * ry(a1); }

}  // namespace gates

Matrix GateOp::matrix_at(std::span<const double> params) const {
    if (!slots) return matrix;
    const auto& s = *slots;
    if (std::max({s[0], s[1], s[2]}) >= params.size()) throw DimensionError("parameter vector too short");
    Matrix m = gates::yzy(params[s[0]], params[s[1]], params[s[2]]);
    if (inverse) return m.adjoint();
    return m;
}

GateSequence::GateSequence(int n) : n_(n) {
    if (n < 1) throw DimensionError("sequence needs at least one qubit");
}

namespace {
void check_targets(const std::vector<int>& targets, int n) {
    if (targets.empty()) throw DimensionError("gate without targets");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= n) throw DimensionError("gate target out of range");
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) throw DimensionError("repeated gate target");
        }
    }
}
}  // namespace

GateSequence& GateSequence::add(std::string name, Matrix m, std::vector<int> targets) {
    check_targets(targets, n_);
    if (m.rows() != static_cast<Eigen::Index>(dim_for_qubits(static_cast<int>(targets.size())))) {
        throw DimensionError("gate size does not match its targets");
    }
    if (!is_unitary(m)) throw ValidationError("gate '" + name + "' is not unitary");
    ops_.push_back(GateOp{std::move(name), std::move(m), std::move(targets), std::nullopt, false});
    return *this;
}

GateSequence& GateSequence::add_param(SlotTriple slots, int qubit) {
    std::vector<int> targets{qubit};
    check_targets(targets, n_);
    ops_.push_back(GateOp{"yzy", Matrix(), std::move(targets), slots, false});
    return *this;
}

GateSequence& GateSequence::append(const GateSequence& other) {
    if (other.n_ != n_) throw DimensionError("sequences act on different registers");
    ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
    return *this;
}

std::size_t GateSequence::param_count() const {
    std::size_t count = 0;
    for (const auto& op : ops_) {
        if (op.slots) count = std::max(count, std::max({(*op.slots)[0], (*op.slots)[1], (*op.slots)[2]}) + 1);
    }
    return count;
}

std::size_t GateSequence::count(const std::string& name) const {
    return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [&](const GateOp& g) { return g.name == name; }));
}

Matrix GateSequence::unitary(std::span<const double> params) const {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n_));
    Matrix u = Matrix::Identity(d, d);
    for (const auto& op : ops_) {
        kernel::left_apply(u, op.matrix_at(params), Embedding(n_, op.targets));
    }
    return u;
}

GateSequence GateSequence::adjoint() const {
    GateSequence out(n_);
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
        GateOp g = *it;
        if (g.slots) {
            g.inverse = !g.inverse;
        } else {
            g.matrix = g.matrix.adjoint().eval();
            g.name = g.name + "_dg";
        }
        out.ops_.push_back(std::move(g));
    }
    return out;
}

GateSequence GateSequence::bind(std::span<const double> params) const {
    if (params.size() < param_count()) throw DimensionError("parameter vector too short");
    GateSequence out(n_);
    for (const auto& op : ops_) {
        if (!op.slots) {
            out.ops_.push_back(op);
            continue;
        }
        out.ops_.push_back(GateOp{op.inverse ? "yzy_dg" : "yzy", op.matrix_at(params), op.targets, std::nullopt, false});
    }
    return out;
}

Matrix embed(const Matrix& u, std::span<const int> targets, int n) {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    Matrix full = Matrix::Identity(d, d);
    kernel::left_apply(full, u, Embedding(n, targets));
    return full;
}

}  // namespace vqc
