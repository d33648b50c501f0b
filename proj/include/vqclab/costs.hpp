#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vqclab/circuit.hpp"
#include "vqclab/noise.hpp"
#include "vqclab/sim.hpp"

namespace vqc {

enum class CostKind { hst, lhst, let, llet };

std::string to_string(CostKind kind);
CostKind cost_kind_from_string(const std::string& s);
inline bool is_fumc(CostKind k) { return k == CostKind::hst || k == CostKind::lhst; }

// A compiled cost-evaluation circuit: the shared part up to the measurement
// stage, then one branch per measured pair or qubit for the local costs.
// Parameterized gates of V^dag are read from the parameter vector at
// evaluation time.
class CostCircuit {
 public:
    CostCircuit(CostKind kind, const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise,
                std::optional<int> branch = std::nullopt);

    CostKind kind() const { return kind_; }
    int num_qubits() const { return n_; }
    int register_qubits() const { return reg_; }
    std::size_t param_count() const { return param_count_; }
    std::size_t branch_count() const { return branches_.size(); }
    // Global depolarizing layers met on the way through each branch.
    std::vector<std::size_t> depol_layers() const;
    // Product of every global depolarizing weight met by each branch, counting
    // depolarizing channels that span the whole register.
    std::vector<double> global_depol_weight() const;
    double branch_weight(std::size_t b) const { return branches_.at(b).weight; }
    // Tr[effect] / 2^register for a branch.
    double effect_fraction(std::size_t b) const;

    // Weighted success probability, i.e. 1 - cost.
    double fidelity(std::span<const double> params = {}) const;
    std::vector<double> branch_fidelities(std::span<const double> params = {}) const;
    // Same circuit with every global depolarizing layer skipped.
    std::vector<double> branch_fidelities_without_global_depol(std::span<const double> params = {}) const;
    // State right before the measurement of the given branch.
    Matrix final_state(std::span<const double> params, std::size_t branch = 0) const;

    struct Shifted {
        double value;
        std::vector<double> plus;   // fidelity with slot s moved by +shift
        std::vector<double> minus;  // and by -shift
    };
    Shifted shifted_fidelities(std::span<const double> params, double shift) const;

 private:
    struct Step {
        enum class Kind { gate, channel, depol } kind;
        GateOp gate;
        std::shared_ptr<const Channel> channel;
        double depol_p = 1.0;
        Embedding emb;
    };
    struct Branch {
        std::vector<Step> steps;
        RealVector effect;  // diagonal
        double weight;
    };

    void run(Matrix& m, const std::vector<Step>& steps, std::size_t begin, std::size_t end,
             std::span<const double> params, bool skip_global_depol = false) const;
    bool is_global_depol(const Step& s) const;
    static void run_adjoint(Matrix& m, const Step& s, std::span<const double> params);
    double branch_value(const Matrix& rho, const Branch& b, std::span<const double> params) const;

    CostKind kind_;
    int n_;
    int reg_;
    std::size_t param_count_ = 0;
    bool unique_slots_ = true;
    std::vector<Step> prefix_;
    std::vector<Branch> branches_;
    std::size_t first_param_ = 0;
    Matrix cached_;         // state before prefix_[first_param_]
    Matrix heisenberg_;     // weighted effect pulled back through the branches
};

enum class EvalModeKind { exact, sampled };

struct EvalMode {
    EvalModeKind kind = EvalModeKind::exact;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    static EvalMode exact() { return {}; }
    static EvalMode sampled(std::uint64_t shots, std::uint64_t seed) { return {EvalModeKind::sampled, shots, seed}; }
};

struct CostEstimate {
    double value = 0.0;
    EvalModeKind mode = EvalModeKind::exact;
    std::uint64_t shots_used = 0;
    std::optional<double> std_error;
};

CostEstimate evaluate_cost(CostKind kind, const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise,
                           EvalMode mode, std::optional<int> j = std::nullopt);

CostEstimate hst_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise = NoiseSchedule::none(),
                      EvalMode mode = EvalMode::exact());
CostEstimate lhst_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise = NoiseSchedule::none(),
                       EvalMode mode = EvalMode::exact(), std::optional<int> j = std::nullopt);
CostEstimate let_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise = NoiseSchedule::none(),
                      EvalMode mode = EvalMode::exact());
CostEstimate llet_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise = NoiseSchedule::none(),
                       EvalMode mode = EvalMode::exact(), std::optional<int> j = std::nullopt);

// Sampled estimate of 1 - f from a Bernoulli(f) experiment.
CostEstimate sample_cost(double fidelity, std::uint64_t shots, std::uint64_t seed);

CostEstimate weighted_cost(double q, const CostEstimate& a, const CostEstimate& b);

struct FidelityEstimate {
    double mean;
    double std_error;
};
FidelityEstimate average_fidelity(const Matrix& u, const Matrix& v, std::size_t samples, std::uint64_t seed);

// Closed forms used as oracles and for the effective-Hamiltonian view.
double hst_closed_form(const Matrix& u, const Matrix& v);
double let_closed_form(const Matrix& u, const Matrix& v);

// <chi_V|H|chi_V> is the cost of V for hst, lhst and let. The llet form
// measures on U^dag V|0>, so it returns the llet cost with U and V exchanged.
Matrix effective_hamiltonian(CostKind kind, const Matrix& u);
// |psi> = V|0> for the fixed-input kinds, (V (x) 1)|Phi> otherwise.
Vector expectation_state(CostKind kind, const Matrix& v);

// A single sequence wrapping a dense unitary, for callers that hold matrices.
GateSequence as_sequence(const Matrix& u, const std::string& name = "u");

}  // namespace vqc
