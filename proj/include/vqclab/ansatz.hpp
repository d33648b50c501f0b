#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "vqclab/circuit.hpp"

namespace vqc {

// e^{-i a3 Y/2} e^{-i a2 Z/2} e^{-i a1 Y/2}.
Matrix single_qubit_gate(double a1, double a2, double a3);

// Angles (a1, a2, a3) with single_qubit_gate(a1, a2, a3) equal to u up to a global phase.
std::array<double, 3> yzy_angles(const Matrix& u);

// Parameterized gates on both wires, a CNOT, then parameterized gates on both
// wires again. Slots base .. base+11 in the order pre control, pre target,
// post control, post target.
GateSequence dressed_cnot(int n, int control, int target, std::size_t base);
inline constexpr std::size_t kDressedCnotParams = 12;

enum class AnsatzKind { alternating_pair, target_inspired, custom };

std::string to_string(AnsatzKind kind);
AnsatzKind ansatz_kind_from_string(const std::string& s);

struct Ansatz {
    GateSequence templ;
    std::size_t param_count = 0;
    AnsatzKind kind = AnsatzKind::custom;
    int layers = 0;
    std::size_t dressed_cnots = 0;
    // Parameters that reproduce the target, set by target_inspired.
    std::vector<double> witness;
};

// Each layer dresses the pairs (0,1),(2,3),... then (1,2),(3,4),... then the
// wraparound pair (n-1,0), which gives n dressed CNOTs per layer for n >= 3.
// For n = 2 a layer is one dressed CNOT. The control is the lower index
// unless flip_orientation is set.
Ansatz alternating_pair(int n, int layers, bool flip_orientation = false);

// Dresses every CNOT of u and folds its single-qubit gates into the dressed
// slots. Wires that carry no CNOT get one parameterized gate each.
Ansatz target_inspired(const GateSequence& u);

// Wraps a template whose slots are used exactly once.
Ansatz custom_ansatz(GateSequence templ);

GateSequence bind_ansatz(const Ansatz& a, std::span<const double> params);

// Reads the angles back from a sequence produced by bind_ansatz. Angles are
// recovered up to the usual Euler ambiguities, so bind_ansatz(extract(bind_ansatz(p)))
// reproduces every gate of bind(p) up to phase.
std::vector<double> extract_parameters(const Ansatz& a, const GateSequence& bound);

}  // namespace vqc
