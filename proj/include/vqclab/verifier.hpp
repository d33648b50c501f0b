#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vqclab/costs.hpp"

namespace vqc {

struct AffineReport {
    bool pass = false;
    double residual = 0.0;
    double noisy_cost = 0.0;
    double clean_cost = 0.0;  // same circuit with the global depolarizing layers removed
    double predicted = 0.0;
    std::vector<double> p_total;       // per branch
    std::vector<double> trace_fraction;  // Tr[effect] / 2^register per branch
};

// Noisy cost against p_tot C + (1 - p_tot)(1 - Tr[effect]/2^m), branch by branch.
// Throws ValidationError when the schedule holds a non-unital channel.
AffineReport check_depolarizing_affine(CostKind kind, const GateSequence& u, const GateSequence& v,
                                       const NoiseSchedule& noise, double tol = 1e-10);

enum class OprMode { strong, weak };

struct SliceResult {
    double noiseless_argmin;
    double noisy_argmin;
};

struct Counterexample {
    std::string description;
    double noiseless_cost;
    double noisy_cost;
    std::vector<double> params;
};

struct OprReport {
    OprMode mode = OprMode::strong;
    std::string verdict = "consistent";  // or "violated"
    double worst_margin = 0.0;
    double tolerance = 0.0;
    std::vector<SliceResult> slices;
    std::vector<double> noisy_optimum_sample;  // noisy costs at the claimed optima
    std::optional<Counterexample> counterexample;
    // Fixed-input checks only.
    std::optional<double> bound;
    std::optional<double> max_value;
    std::optional<double> llet_bound;
    std::optional<double> llet_max;
    bool degenerate = false;
    std::size_t maximizers = 0;
    bool consistent() const { return verdict == "consistent"; }
};

struct StrongOprOptions {
    std::size_t trials = 200;
    std::size_t slices = 10;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    double angle_tol = 1e-3;
    std::vector<CostKind> kinds{CostKind::hst, CostKind::lhst};
};

// Consequence checks of strong OPR for the full-unitary costs: the noisy
// fidelity at U (and at a random phase times U) beats random unitaries, and
// along random slices V(t) = U exp(-i t G) the noisy argmin sits at t = 0.
OprReport check_strong_opr_fumc(int theorem, const Matrix& u, const NoiseSchedule& noise,
                                const StrongOprOptions& opt = {});

struct WeakOprOptions {
    double tol = 1e-12;
    double member_tol = 1e-9;
    std::size_t samples = 200;  // Haar draws for the continuous probe
    std::uint64_t seed = 0;
};

// Enumerates every permutation unitary W for the fixed-input costs and
// compares the noisy maximum with the rearrangement bound.
OprReport check_weak_opr_fisc(int n, const NoiseSchedule& noise, const WeakOprOptions& opt = {});

enum class CorollaryMode { pauli_conj, clifford, tensor_depol, nonunital_conj, ricochet };

std::string to_string(CorollaryMode m);
CorollaryMode corollary_mode_from_string(const std::string& s);

struct CorollaryCase {
    CorollaryMode mode = CorollaryMode::clifford;
    std::vector<Matrix> w_layers;   // applied in order; ricochet uses w_layers[0] as M
    std::vector<Channel> channels;  // one per layer; tensor_depol takes two per layer (A' then A'')
    int split = 0;                  // qubits in A' for tensor_depol
};

struct CorollaryReport {
    bool pass = false;
    double residual = 0.0;
    std::optional<Channel> channel;     // the channel moved in front of W
    std::optional<RealMatrix> transfer;  // its transfer matrix
};

CorollaryReport check_corollary_condition(const CorollaryCase& c, double tol = 1e-12);

// Superoperator of a map on d x d matrices, column stacking.
Matrix superoperator_of(const std::function<void(Matrix&)>& map, Eigen::Index d);
// Transfer matrix in the Hermitian Pauli basis from a superoperator.
RealMatrix transfer_from_superoperator(const Matrix& s);

struct LocalTerm {
    double coeff;      // c^{(j)} >= 0
    Matrix rotation;   // U_w(j), maps Z to the local direction w(j)
};

struct WarmupReport {
    bool pass = false;
    double fidelity_noisy = 0.0;  // ground state of H~ against the product state
    double fidelity_clean = 0.0;  // ground state of H against the product state
    double fidelity_between = 0.0;
};

// H = -sum_j c_j U_j Z_j U_j^dag and H~ with Z_j replaced by the effective
// readout observable. Throws ValidationError when a row breaks dominance.
WarmupReport vqe_warmup_check(const std::vector<LocalTerm>& terms, const std::vector<ReadoutRow>& rows,
                              double tol = 1e-10);

struct SandwichReport {
    bool pass = true;
    std::size_t trials = 0;
    double worst_fumc_slack = 0.0;
    double worst_fisc_slack = 0.0;
};

// Random (U, V) pairs with n in {2, 3}: C_LHST <= C_HST <= n C_LHST and
// C_LLET <= C_LET <= n C_LLET.
SandwichReport check_cost_sandwiches(std::size_t trials, std::uint64_t seed, double slack = -1e-12);

// Random strict instances: Pauli layers with identity weight in [0.5, 0.95],
// readout rows in [0.85, 0.99], global depolarizing in [0.95, 0.999],
// depolarizing on A in [0.9, 0.99], damping rates in [0, 0.2].
NoiseSchedule random_nm1(int n, std::uint64_t seed);
NoiseSchedule random_nm2(int n, std::uint64_t seed);
NoiseSchedule random_nm3(int n, std::uint64_t seed);
Channel random_pauli_channel(int arity, std::uint64_t seed, std::size_t words = 3);

nlohmann::json to_json(const AffineReport& r);
nlohmann::json to_json(const OprReport& r);
nlohmann::json to_json(const CorollaryReport& r);
nlohmann::json to_json(const WarmupReport& r);
nlohmann::json to_json(const SandwichReport& r);

}  // namespace vqc
