#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vqclab/types.hpp"

namespace vqc {

// phase * X^x Z^z with phase = i^phase_exp. Qubit 0 is the most significant
// bit of the basis index, so bit (n-1-q) of each mask belongs to qubit q.
class PauliString {
 public:
    static constexpr int kMaxQubits = 16;

    PauliString(int n, std::uint64_t x_bits, std::uint64_t z_bits, int phase_exp = 0);

    static PauliString identity(int n) { return PauliString(n, 0, 0, 0); }

    // Hermitian Pauli with the given exponent masks: one factor of i per Y site.
    static PauliString hermitian(int n, std::uint64_t x_bits, std::uint64_t z_bits);

    // Letters I, X, Y, Z (Y is the Hermitian Pauli), optional prefix "+", "-", "i", "+i", "-i".
    static PauliString parse(std::string_view text);

    // Single-qubit X or Z on `qubit` of an n-qubit register.
    static PauliString x_on(int n, int qubit);
    static PauliString z_on(int n, int qubit);

    int num_qubits() const { return n_; }
    std::uint64_t x_bits() const { return x_; }
    std::uint64_t z_bits() const { return z_; }
    int phase_exp() const { return phase_; }
    cplx phase() const;

    bool x_at(int qubit) const { return (x_ >> bit(qubit)) & 1U; }
    bool z_at(int qubit) const { return (z_ >> bit(qubit)) & 1U; }

    bool is_identity_word() const { return x_ == 0 && z_ == 0; }

    // Same word with phase reset to +1.
    PauliString unsigned_word() const { return PauliString(n_, x_, z_, 0); }

    Matrix dense() const;

    // Written with Hermitian letters (Y for the XZ site) and the compensating phase.
    std::string to_string() const;

    bool commutes_with(const PauliString& other) const;

    friend bool operator==(const PauliString& a, const PauliString& b) = default;

 private:
    int bit(int qubit) const { return n_ - 1 - qubit; }

    int n_;
    std::uint64_t x_;
    std::uint64_t z_;
    int phase_;
};

PauliString pauli_mul(const PauliString& a, const PauliString& b);

// Coefficients of an operator in the X^l Z^k basis, coeff = Tr[(X^l Z^k)^dag op] / 2^n.
class PauliExpansion {
 public:
    PauliExpansion(int n, std::vector<cplx> coeffs);

    int num_qubits() const { return n_; }
    cplx coeff(std::uint64_t x_bits, std::uint64_t z_bits) const;
    const std::vector<cplx>& raw() const { return coeffs_; }

    struct Term {
        std::uint64_t x_bits;
        std::uint64_t z_bits;
        cplx value;
    };
    std::vector<Term> nonzero(double tol = 1e-14) const;

    Matrix reconstruct() const;

 private:
    int n_;
    std::vector<cplx> coeffs_;  // index (x << n) | z
};

PauliExpansion pauli_expand(const Matrix& op);

// Pauli word for c p c^dag, with phase. Throws NotCliffordError when some
// generator image is not a phase times a Pauli word.
PauliString clifford_conjugate(const Matrix& c, const PauliString& p);

bool is_clifford(const Matrix& c, double tol = 1e-10);

}  // namespace vqc
