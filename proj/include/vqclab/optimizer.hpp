#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vqclab/costs.hpp"

namespace vqc {

// A cost built from one or more binary experiments. Experiment k succeeds with
// probability F_k(theta) and the cost is sum_k w_k (1 - F_k).
class Objective {
 public:
    virtual ~Objective() = default;

    virtual std::size_t param_count() const = 0;
    virtual const std::vector<double>& weights() const = 0;
    virtual std::vector<double> fidelities(std::span<const double> params) const = 0;

    struct Shifted {
        std::vector<double> value;               // per experiment
        std::vector<std::vector<double>> plus;   // [experiment][slot]
        std::vector<std::vector<double>> minus;
    };
    // Default: two fidelity evaluations per slot.
    virtual Shifted shifted(std::span<const double> params, double shift) const;

    double exact_cost(std::span<const double> params) const;
    std::size_t active_experiments() const;
};

// Weighted sum of cost circuits, e.g. q C_HST + (1 - q) C_LHST.
class CircuitObjective final : public Objective {
 public:
    struct Term {
        double weight;
        std::shared_ptr<const CostCircuit> circuit;
    };
    explicit CircuitObjective(std::vector<Term> terms);
    static CircuitObjective single(CostCircuit c);

    std::size_t param_count() const override { return params_; }
    const std::vector<double>& weights() const override { return weights_; }
    std::vector<double> fidelities(std::span<const double> params) const override;
    Shifted shifted(std::span<const double> params, double shift) const override;

 private:
    std::vector<Term> terms_;
    std::vector<double> weights_;
    std::size_t params_ = 0;
};

// Single experiment given by a closure, for tests and custom costs.
class FunctionObjective final : public Objective {
 public:
    FunctionObjective(std::size_t params, std::function<double(std::span<const double>)> fidelity);

    std::size_t param_count() const override { return params_; }
    const std::vector<double>& weights() const override { return weights_; }
    std::vector<double> fidelities(std::span<const double> params) const override;

 private:
    std::size_t params_;
    std::function<double(std::span<const double>)> fidelity_;
    std::vector<double> weights_{1.0};
};

struct GradientEstimate {
    std::vector<double> gradient;
    // Variance of a single-shot estimate of each component (zero when exact).
    std::vector<double> shot_variance;
    std::uint64_t shots = 0;
};

// Parameter-shift gradient. With `shots` absent the exact value is returned;
// otherwise component i spends shots[i] on each shift term of each experiment.
// Draws come from streams keyed by (seed, iteration, component, sign, experiment).
GradientEstimate parameter_shift_gradient(const Objective& cost, std::span<const double> params,
                                          std::optional<std::vector<std::uint64_t>> shots, std::uint64_t seed,
                                          std::uint64_t iteration = 0, double shift = kPi / 2);

struct OptimizerConfig {
    double learning_rate = 0.1;
    std::size_t lr_patience = 20;     // halve after this many non-improving iterations
    std::size_t max_iterations = 1000;
    bool exact = false;               // infinite-shot gradients
    std::uint64_t shots = 50000;      // fixed-shot mode, per shift term
    std::uint64_t monitor_shots = 0;  // 0 records the exact noisy cost without charging shots
    std::uint64_t n_min = 2;
    std::optional<std::size_t> n_min_raise_iteration;
    std::uint64_t n_min_raised = 250;
    std::uint64_t budget = 0;         // 0 means unlimited in fixed-shot mode
    std::size_t window = 50;          // 0 disables the window test
    double rel_tol = 1e-3;
    double lipschitz = 1.0;
    double running_decay = 0.99;
    double regularizer = 1e-6;
    std::uint64_t seed = 0;

    void validate(bool adaptive) const;
};

struct IterationRecord {
    std::size_t iteration;
    std::vector<double> params;
    double noisy_cost;
    std::optional<double> noiseless_cost;
    std::uint64_t shots;
    std::uint64_t cumulative_shots;
    double learning_rate;
    std::uint64_t n_min;
};

struct OptimizerTrace {
    std::vector<IterationRecord> records;
    std::string termination;
    const std::vector<double>& final_params() const { return records.back().params; }
};

struct TrainingHooks {
    std::function<double(std::span<const double>)> noiseless;
    std::function<void(const IterationRecord&)> on_record;
};

OptimizerTrace gradient_descent(const Objective& cost, std::vector<double> init, const OptimizerConfig& cfg,
                                const TrainingHooks& hooks = {});

// Adaptive shot allocation in the style of iCANS.
OptimizerTrace adaptive_shot_descent(const Objective& cost, std::vector<double> init, const OptimizerConfig& cfg,
                                     const TrainingHooks& hooks = {});

}  // namespace vqc
