#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vqclab/types.hpp"

namespace vqc {

class Channel;

// Index bookkeeping for an operator on `targets` inside an n-qubit register.
// The first target is the most significant bit of the local index.
class Embedding {
 public:
    Embedding(int n, std::span<const int> targets);

    int num_qubits() const { return n_; }
    int arity() const { return k_; }
    const std::vector<int>& targets() const { return targets_; }
    std::size_t local_dim() const { return offsets_.size(); }
    std::uint64_t target_mask() const { return mask_; }
    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    // Every register index whose target bits are all zero.
    const std::vector<std::uint64_t>& bases() const { return bases_; }
    // Global mask for a local bit pattern.
    std::uint64_t spread(std::uint64_t local) const { return offsets_[local]; }

 private:
    int n_;
    int k_;
    std::vector<int> targets_;
    std::uint64_t mask_ = 0;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint64_t> bases_;
};

namespace kernel {

// m <- U m, U embedded.
void left_apply(Matrix& m, const Matrix& u, const Embedding& e);
// m <- m U^dag, U embedded.
void right_apply_adjoint(Matrix& m, const Matrix& u, const Embedding& e);
// m <- U m U^dag.
void conjugate(Matrix& m, const Matrix& u, const Embedding& e);
// m <- U^dag m U.
void adjoint_conjugate(Matrix& m, const Matrix& u, const Embedding& e);
// m <- P m P^dag for the word X^x Z^z given by global masks.
void pauli_conjugate(const Matrix& m, Matrix& out, std::uint64_t x_global, std::uint64_t z_global,
                     cplx weight);
// m <- p m + (1 - p) (1/2^k on targets) (x) Tr_targets m.
void depolarize(Matrix& m, double p, const Embedding& e);

}  // namespace kernel

class DensityState {
 public:
    static DensityState zero(int n, std::vector<std::string> labels = {});
    static DensityState from_matrix(Matrix mat, std::vector<std::string> labels = {});
    static DensityState from_pure(const Vector& psi, std::vector<std::string> labels = {});

    int num_qubits() const { return n_; }
    const Matrix& matrix() const { return mat_; }
    Matrix& mutable_matrix() { return mat_; }
    const std::vector<std::string>& labels() const { return labels_; }
    cplx trace() const { return mat_.trace(); }

    // Throws NumericalError unless Hermitian, unit trace and PSD at the given tolerances.
    void validate(double herm_tol = 1e-10, double eig_tol = 1e-9) const;

 private:
    DensityState(int n, Matrix mat, std::vector<std::string> labels);

    int n_;
    Matrix mat_;
    std::vector<std::string> labels_;
};

struct PovmEffect {
    Matrix matrix;
    std::string label;

    static PovmEffect make(Matrix m, std::string label);
};

DensityState apply_unitary(DensityState state, const Matrix& u, std::span<const int> targets);
DensityState apply_channel(DensityState state, const Channel& ch, std::span<const int> targets);
double povm_probability(const DensityState& state, const PovmEffect& effect);
DensityState partial_trace(const DensityState& state, std::span<const int> keep);

// Tr[effect rho], clamped to [0,1] when within 1e-9, otherwise NumericalError.
double checked_probability(cplx value);

std::vector<std::uint64_t> sample_counts(std::span<const double> probs, std::uint64_t shots,
                                         std::uint64_t seed);

// Haar-random unitary of dimension d and Haar-random pure state.
template <class Rng>
Matrix haar_unitary(Eigen::Index d, Rng& rng);
template <class Rng>
Vector haar_state(Eigen::Index d, Rng& rng);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace vqc

#include "vqclab/sim_random.hpp"
