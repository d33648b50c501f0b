#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vqclab/types.hpp"

namespace vqc {

namespace gates {
Matrix id2();
Matrix h();
Matrix x();
Matrix y();
Matrix z();
Matrix s();
Matrix sdg();
Matrix t();
Matrix tdg();
Matrix cnot();
Matrix swap();
Matrix phase(double phi);
Matrix rx(double theta);
Matrix ry(double theta);
Matrix rz(double theta);
// Ry(a3) Rz(a2) Ry(a1).
Matrix yzy(double a1, double a2, double a3);
}  // namespace gates

using SlotTriple = std::array<std::size_t, 3>;

struct GateOp {
    std::string name;
    Matrix matrix;  // empty for parameterized gates
    std::vector<int> targets;
    std::optional<SlotTriple> slots;
    bool inverse = false;

    bool parameterized() const { return slots.has_value(); }
    int arity() const { return static_cast<int>(targets.size()); }
    Matrix matrix_at(std::span<const double> params) const;
};

class GateSequence {
 public:
    explicit GateSequence(int n);

    int num_qubits() const { return n_; }
    const std::vector<GateOp>& ops() const { return ops_; }
    std::size_t size() const { return ops_.size(); }

    GateSequence& add(std::string name, Matrix m, std::vector<int> targets);
    GateSequence& add_param(SlotTriple slots, int qubit);
    GateSequence& append(const GateSequence& other);

    GateSequence& h(int q) { return add("h", gates::h(), {q}); }
    GateSequence& x(int q) { return add("x", gates::x(), {q}); }
    GateSequence& t(int q) { return add("t", gates::t(), {q}); }
    GateSequence& tdg(int q) { return add("tdg", gates::tdg(), {q}); }
    GateSequence& ry(int q, double th) { return add("ry", gates::ry(th), {q}); }
    GateSequence& rz(int q, double th) { return add("rz", gates::rz(th), {q}); }
    GateSequence& phase(int q, double phi) { return add("p", gates::phase(phi), {q}); }
    GateSequence& cx(int c, int t) { return add("cx", gates::cnot(), {c, t}); }

    // One past the largest slot id in use.
    std::size_t param_count() const;
    std::size_t count(const std::string& name) const;

    Matrix unitary(std::span<const double> params = {}) const;
    GateSequence adjoint() const;
    GateSequence bind(std::span<const double> params) const;

 private:
    int n_;
    std::vector<GateOp> ops_;
};

// Matrix of a sequence acting on `targets` of a larger register is handled by
// the simulator; this helper gives the dense product for small checks.
Matrix embed(const Matrix& u, std::span<const int> targets, int n);

}  // namespace vqc
