#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vqclab/pauli.hpp"
#include "vqclab/sim.hpp"
#include "vqclab/types.hpp"

namespace vqc {

enum class ChannelKind { depolarizing, pauli, nonunital_pauli, unitary, thermal, general };

std::string to_string(ChannelKind kind);

struct PauliTerm {
    PauliString word;  // unsigned word
    double prob;
};

// Transfer-matrix entries are taken in the Hermitian Pauli basis (Y rather
// than XZ on each site). Diagonal entries coincide with the X^l Z^k
// coefficients; affine entries are real in this basis.
class Channel {
 public:
    static Channel identity(int arity);
    static Channel from_unitary(const Matrix& u);
    static Channel from_kraus(std::vector<Matrix> kraus, ChannelKind kind = ChannelKind::general);

    int arity() const { return arity_; }
    ChannelKind kind() const { return kind_; }
    // Weight on the state for depolarizing channels.
    double depolarizing_p() const { return depol_p_; }
    const std::vector<PauliTerm>& pauli_terms() const { return terms_; }
    const std::vector<Channel>& local_factors() const { return locals_; }

    std::vector<Matrix> kraus() const;

    // Diagonal transfer coefficient c for a word (phase ignored).
    double transfer(const PauliString& word) const;
    // Coefficient of the word in the image of the identity.
    double affine(const PauliString& word) const;
    // R_ab = Tr[s_a N(s_b)] / 2^k, index (x << k) | z.
    RealMatrix transfer_matrix() const;

    // Column-stacking convention: vec(N(rho)) = S vec(rho). Arity <= 4.
    Matrix superoperator() const;
    Matrix choi() const;

    bool is_unital(double tol = 1e-10) const;
    bool is_identity(double tol = 1e-14) const;
    // Largest transfer-matrix entry outside the allowed pattern: the diagonal
    // plus, when non-unital, the identity column.
    double pauli_structure_defect() const;

    void apply(Matrix& m, const Embedding& e) const;
    void apply_adjoint(Matrix& m, const Embedding& e) const;

    Matrix apply_dense(const Matrix& rho) const;

    std::string describe() const;

 private:
    friend Channel depolarizing(double p, int arity);
    friend Channel pauli_channel(std::vector<PauliTerm> probs, bool strict);
    friend Channel nonunital_pauli_from_locals(std::vector<Channel> locals);
    friend Channel thermal_relaxation(double t1, double t2, double gate_time);

    Channel() = default;
    void validate_cptp() const;
    void cache_transfer();

    int arity_ = 0;
    ChannelKind kind_ = ChannelKind::general;
    double depol_p_ = 1.0;
    std::vector<Matrix> kraus_;         // empty for depolarizing and product channels
    std::vector<PauliTerm> terms_;      // Pauli and depolarizing channels
    std::vector<Channel> locals_;       // product channels, one per qubit
    std::shared_ptr<const RealMatrix> ptm_;  // cached for arity <= 2
};

Channel depolarizing(double p, int arity);
Channel pauli_channel(std::vector<PauliTerm> probs, bool strict = false);
Channel amplitude_damping(double gamma);
// Pauli channel {I: (1+c)/2, Z: (1-c)/2}: off-diagonals scale by c.
Channel dephasing(double c);
Channel nonunital_pauli_from_locals(std::vector<Channel> locals);
Channel thermal_relaxation(double t1, double t2, double gate_time);
Channel commute_through_clifford(const Channel& p, const Matrix& w);
// Pauli channel equal to applying a then b.
Channel compose_pauli(const Channel& a, const Channel& b);
// Pauli channel whose probabilities come from the given transfer coefficients.
Channel pauli_channel_from_transfer(int arity, std::span<const double> c_by_word);

double transfer_of_terms(const std::vector<PauliTerm>& terms, const PauliString& word);

struct ReadoutRow {
    double p00;
    double p11;
};

class NoisyPovm {
 public:
    explicit NoisyPovm(std::vector<ReadoutRow> rows);

    static NoisyPovm ideal(int n) { return NoisyPovm(std::vector<ReadoutRow>(static_cast<std::size_t>(n), {1.0, 1.0})); }

    int num_qubits() const { return static_cast<int>(rows_.size()); }
    const std::vector<ReadoutRow>& rows() const { return rows_; }
    // Probability of reading k given input l on qubit j.
    double p(int j, int k, int l) const;
    // Diagonal of the effect for outcome bit string z on the measured qubits.
    RealVector effect_diagonal(std::uint64_t outcome) const;
    Matrix effect(std::uint64_t outcome) const;
    // Effect for reading 0 on a single qubit: diag(p00, p01).
    std::pair<double, double> zero_effect(int j) const { return {p(j, 0, 0), p(j, 0, 1)}; }
    NoisyPovm subset(std::span<const int> qubits) const;
    bool is_ideal() const;

 private:
    std::vector<ReadoutRow> rows_;
};

NoisyPovm measurement_noise(std::vector<ReadoutRow> rows);
Matrix effective_z(const NoisyPovm& noisy, int qubit);

}  // namespace vqc
