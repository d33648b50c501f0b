#pragma once

#include "vqclab/circuit.hpp"

namespace vqc {

// Three-qubit Toffoli with controls q0, q1 and target q2: six CNOTs and nine
// single-qubit gates.
GateSequence toffoli();

// Textbook QFT with the final qubit reversal, expanded into single-qubit
// gates and CNOTs. Qubit 0 is the most significant bit, so the product is
// F_jk = w^{jk}/sqrt(2^n).
GateSequence qft(int n);

// Maps |000> to (|100> + |010> + |001>)/sqrt(3).
GateSequence w_state_prep();

// Controlled phase diag(1,1,1,e^{i phi}) from two CNOTs and phase gates.
void append_controlled_phase(GateSequence& s, int control, int target, double phi);

}  // namespace vqc
