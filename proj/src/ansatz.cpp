#include "vqclab/ansatz.hpp"

#include <cmath>
#include <map>
#include <optional>

namespace vqc {

Matrix single_qubit_gate(double a1, double a2, double a3) { return gates::yzy(a1, a2, a3); }

std::array<double, 3> yzy_angles(const Matrix& u) {
    if (u.rows() != 2 || u.cols() != 2) throw DimensionError("yzy_angles needs a 2x2 unitary");
    // K swaps Y and Z under conjugation, turning the YZY form into ZYZ.
    const Matrix k = (gates::y() + gates::z()) / std::sqrt(2.0);
    Matrix w = k * u * k;
    w /= std::sqrt(w.determinant());
    const double gamma = 2.0 * std::atan2(std::abs(w(1, 0)), std::abs(w(0, 0)));
    const double sum = std::abs(w(1, 1)) > 1e-12 ? 2.0 * std::arg(w(1, 1)) : 0.0;
    const double diff = std::abs(w(1, 0)) > 1e-12 ? 2.0 * std::arg(w(1, 0)) : 0.0;
    const double beta = (sum + diff) / 2.0;
    const double delta = (sum - diff) / 2.0;
    return {delta, gamma, beta};
}

GateSequence dressed_cnot(int n, int control, int target, std::size_t base) {
    if (control == target) throw DimensionError("dressed CNOT needs two distinct qubits");
    GateSequence s(n);
    s.add_param({base, base + 1, base + 2}, control);
    s.add_param({base + 3, base + 4, base + 5}, target);
    s.cx(control, target);
    s.add_param({base + 6, base + 7, base + 8}, control);
    s.add_param({base + 9, base + 10, base + 11}, target);
    return s;
}

std::string to_string(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::alternating_pair: return "alternating_pair";
        case AnsatzKind::target_inspired: return "target_inspired";
        case AnsatzKind::custom: return "custom";
    }
    return "custom";
}

AnsatzKind ansatz_kind_from_string(const std::string& s) {
    if (s == "alternating_pair") return AnsatzKind::alternating_pair;
    if (s == "target_inspired") return AnsatzKind::target_inspired;
    if (s == "custom") return AnsatzKind::custom;
    throw ValidationError("unknown ansatz '" + s + "'");
}

Ansatz alternating_pair(int n, int layers, bool flip_orientation) {
    if (n < 2) throw DimensionError("alternating-pair ansatz needs at least 2 qubits");
    if (layers < 1) throw ValidationError("alternating-pair ansatz needs at least one layer");
    std::vector<std::pair<int, int>> pairs;
    if (n == 2) {
        pairs.emplace_back(0, 1);
    } else {
        for (int a = 0; a + 1 < n; a += 2) pairs.emplace_back(a, a + 1);
        for (int a = 1; a + 1 < n; a += 2) pairs.emplace_back(a, a + 1);
        pairs.emplace_back(0, n - 1);
    }
    Ansatz out{GateSequence(n), 0, AnsatzKind::alternating_pair, layers, 0, {}};
    std::size_t base = 0;
    for (int l = 0; l < layers; ++l) {
        for (auto [lo, hi] : pairs) {
            const int c = flip_orientation ? hi : lo;
            const int t = flip_orientation ? lo : hi;
            out.templ.append(dressed_cnot(n, c, t, base));
            base += kDressedCnotParams;
            ++out.dressed_cnots;
        }
    }
    out.param_count = base;
    return out;
}

namespace {

bool is_cnot(const GateOp& g) {
    if (g.name == "cx") return true;
    return g.arity() == 2 && !g.slots && (g.matrix - gates::cnot()).norm() < 1e-12;
}

double phase_free_overlap(const Matrix& a, const Matrix& b) {
    return std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

}  // namespace

Ansatz target_inspired(const GateSequence& u) {
    const int n = u.num_qubits();
    std::vector<bool> has_cnot(static_cast<std::size_t>(n), false);
    for (const auto& g : u.ops()) {
        if (g.slots) throw ValidationError("target-inspired ansatz needs a fully bound circuit");
        if (g.arity() == 1) continue;
        if (!is_cnot(g)) throw ValidationError("gate '" + g.name + "' is neither single-qubit nor a CNOT");
        for (int q : g.targets) has_cnot[static_cast<std::size_t>(q)] = true;
    }

    Ansatz out{GateSequence(n), 0, AnsatzKind::target_inspired, 0, 0, {}};
    std::size_t base = 0;
    std::vector<std::optional<std::size_t>> slot_of(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        if (has_cnot[static_cast<std::size_t>(q)]) continue;
        out.templ.add_param({base, base + 1, base + 2}, q);
        slot_of[static_cast<std::size_t>(q)] = base;
        base += 3;
    }

    std::map<std::size_t, Matrix> folded;
    std::vector<Matrix> pending(static_cast<std::size_t>(n), Matrix::Identity(2, 2));
    for (const auto& g : u.ops()) {
        if (g.arity() == 1) {
            auto& p = pending[static_cast<std::size_t>(g.targets[0])];
            p = (g.matrix * p).eval();
            continue;
        }
        const int c = g.targets[0];
        const int t = g.targets[1];
        out.templ.append(dressed_cnot(n, c, t, base));
        ++out.dressed_cnots;
        for (int role = 0; role < 2; ++role) {
            const auto w = static_cast<std::size_t>(role == 0 ? c : t);
            const std::size_t pre = base + 3 * static_cast<std::size_t>(role);
            folded[slot_of[w].value_or(pre)] = pending[w];
            pending[w] = Matrix::Identity(2, 2);
            slot_of[w] = pre + 6;
        }
        base += kDressedCnotParams;
    }
    for (int q = 0; q < n; ++q) folded[*slot_of[static_cast<std::size_t>(q)]] = pending[static_cast<std::size_t>(q)];

    out.param_count = base;
    out.witness.assign(base, 0.0);
    for (const auto& [slot, m] : folded) {
        const auto a = yzy_angles(m);
        for (std::size_t i = 0; i < 3; ++i) out.witness[slot + i] = a[i];
    }
    if (phase_free_overlap(out.templ.unitary(out.witness), u.unitary()) < 1.0 - 1e-10) {
        throw NumericalError("target-inspired witness does not reproduce the target");
    }
    return out;
}

Ansatz custom_ansatz(GateSequence templ) {
    std::vector<int> uses(templ.param_count(), 0);
    for (const auto& g : templ.ops()) {
        if (!g.slots) continue;
        for (std::size_t s : *g.slots) ++uses[s];
    }
    for (int u : uses) {
        if (u != 1) throw ValidationError("every ansatz slot must be used exactly once");
    }
    const std::size_t count = uses.size();
    return Ansatz{std::move(templ), count, AnsatzKind::custom, 0, 0, {}};
}

GateSequence bind_ansatz(const Ansatz& a, std::span<const double> params) {
    if (params.size() != a.param_count) {
        throw DimensionError("expected " + std::to_string(a.param_count) + " parameters, got " +
                             std::to_string(params.size()));
    }
    for (double p : params) {
        if (!std::isfinite(p)) throw ValidationError("non-finite parameter");
    }
    return a.templ.bind(params);
}

std::vector<double> extract_parameters(const Ansatz& a, const GateSequence& bound) {
    const auto& t = a.templ.ops();
    const auto& b = bound.ops();
    if (t.size() != b.size()) throw DimensionError("sequence does not come from this ansatz");
    std::vector<double> out(a.param_count, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!t[i].slots) continue;
        const Matrix m = t[i].inverse ? Matrix(b[i].matrix.adjoint()) : b[i].matrix;
        const auto angles = yzy_angles(m);
        for (std::size_t k = 0; k < 3; ++k) out[(*t[i].slots)[k]] = angles[k];
    }
    return out;
}

}  // namespace vqc
