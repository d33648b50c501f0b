#include "vqclab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vqclab/rng.hpp"

namespace vqc {

Objective::Shifted Objective::shifted(std::span<const double> params, double shift) const {
    const std::size_t e = weights().size();
    Shifted out{fidelities(params), std::vector<std::vector<double>>(e, std::vector<double>(param_count())),
                std::vector<std::vector<double>>(e, std::vector<double>(param_count()))};
    std::vector<double> p(params.begin(), params.end());
    for (std::size_t i = 0; i < param_count(); ++i) {
        const double keep = p[i];
        p[i] = keep + shift;
        const auto fp = fidelities(p);
        p[i] = keep - shift;
        const auto fm = fidelities(p);
        p[i] = keep;
        for (std::size_t k = 0; k < e; ++k) {
            out.plus[k][i] = fp[k];
            out.minus[k][i] = fm[k];
        }
    }
    return out;
}

double Objective::exact_cost(std::span<const double> params) const {
    const auto f = fidelities(params);
    double c = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) c += weights()[k] * (1.0 - f[k]);
    return c;
}

std::size_t Objective::active_experiments() const {
    return static_cast<std::size_t>(std::count_if(weights().begin(), weights().end(), [](double w) { return w > 0; }));
}

CircuitObjective::CircuitObjective(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw ValidationError("objective needs at least one circuit");
    double total = 0.0;
    for (const auto& t : terms_) {
        if (!(t.weight >= 0.0)) throw ValidationError("negative cost weight");
        if (!t.circuit) throw ValidationError("missing cost circuit");
        total += t.weight;
        weights_.push_back(t.weight);
        params_ = std::max(params_, t.circuit->param_count());
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("cost weights must sum to 1");
}

CircuitObjective CircuitObjective::single(CostCircuit c) {
    return CircuitObjective({Term{1.0, std::make_shared<const CostCircuit>(std::move(c))}});
}

std::vector<double> CircuitObjective::fidelities(std::span<const double> params) const {
    std::vector<double> out;
    for (const auto& t : terms_) out.push_back(t.weight > 0 ? t.circuit->fidelity(params) : 0.0);
    return out;
}

Objective::Shifted CircuitObjective::shifted(std::span<const double> params, double shift) const {
    Shifted out;
    for (const auto& t : terms_) {
        if (t.weight == 0.0) {
            out.value.push_back(0.0);
            out.plus.emplace_back(params_, 0.0);
            out.minus.emplace_back(params_, 0.0);
            continue;
        }
        auto s = t.circuit->shifted_fidelities(params, shift);
        s.plus.resize(params_, 0.0);
        s.minus.resize(params_, 0.0);
        out.value.push_back(s.value);
        out.plus.push_back(std::move(s.plus));
        out.minus.push_back(std::move(s.minus));
    }
    return out;
}

FunctionObjective::FunctionObjective(std::size_t params, std::function<double(std::span<const double>)> fidelity)
    : params_(params), fidelity_(std::move(fidelity)) {}

std::vector<double> FunctionObjective::fidelities(std::span<const double> params) const {
    return {fidelity_(params)};
}

namespace {

std::uint64_t binomial(std::uint64_t n, double p, std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    auto rng = make_stream(seed, path);
    std::binomial_distribution<std::uint64_t> dist(n, std::clamp(p, 0.0, 1.0));
    return dist(rng);
}

}  // namespace

GradientEstimate parameter_shift_gradient(const Objective& cost, std::span<const double> params,
                                          std::optional<std::vector<std::uint64_t>> shots, std::uint64_t seed,
                                          std::uint64_t iteration, double shift) {
    const std::size_t p = cost.param_count();
    if (params.size() != p) throw DimensionError("parameter vector length does not match the cost");
    if (shots && shots->size() != p) throw DimensionError("one shot count per component expected");
    const auto s = cost.shifted(params, shift);
    const auto& w = cost.weights();
    GradientEstimate out{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0), 0};
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] == 0.0) continue;
            if (!shots) {
                out.gradient[i] += w[k] * (s.minus[k][i] - s.plus[k][i]) / 2.0;
                continue;
            }
            const std::uint64_t n = (*shots)[i];
            if (n < 2) throw ValidationError("need at least two shots per shift term");
            const double nd = static_cast<double>(n);
            const double fp = static_cast<double>(binomial(n, s.plus[k][i], seed,
                                                           {tag(StreamTag::gradient), iteration, i, 0, k})) / nd;
            const double fm = static_cast<double>(binomial(n, s.minus[k][i], seed,
                                                           {tag(StreamTag::gradient), iteration, i, 1, k})) / nd;
            out.gradient[i] += w[k] * (fm - fp) / 2.0;
            const double vp = fp * (1.0 - fp) * nd / (nd - 1.0);
            const double vm = fm * (1.0 - fm) * nd / (nd - 1.0);
            out.shot_variance[i] += w[k] * w[k] * (vp + vm) / 4.0;
            out.shots += 2 * n;
        }
    }
    return out;
}

void OptimizerConfig::validate(bool adaptive) const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be positive");
    if (max_iterations < 1) throw ValidationError("max_iterations must be positive");
    if (lr_patience < 1) throw ValidationError("lr_patience must be positive");
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
    if (!exact && !adaptive && shots < 2) throw ValidationError("need at least two shots per term");
    if (adaptive) {
        if (n_min < 2 || n_min_raised < 2) throw ValidationError("N_min must be at least 2");
        if (!exact && budget == 0) throw ValidationError("adaptive descent needs a shot budget");
        if (!(lipschitz > 0.0) || lipschitz * learning_rate >= 2.0) {
            throw ValidationError("adaptive descent needs 0 < lipschitz * learning_rate < 2");
        }
        if (!(running_decay > 0.0 && running_decay < 1.0)) throw ValidationError("running_decay must lie in (0, 1)");
    }
}

namespace {

// Bookkeeping shared by both trainers: cost monitor, records, learning-rate
// halving and the stop tests.
class Trainer {
 public:
    Trainer(const Objective& cost, std::vector<double> init, const OptimizerConfig& cfg, const TrainingHooks& hooks)
        : cost_(cost), cfg_(cfg), hooks_(hooks), params_(std::move(init)), lr_(cfg.learning_rate) {
        if (params_.size() != cost_.param_count()) throw DimensionError("initial parameters do not match the cost");
    }

    std::size_t iteration() const { return iter_; }
    const std::vector<double>& params() const { return params_; }
    double lr() const { return lr_; }
    std::uint64_t spent() const { return cumulative_; }
    OptimizerTrace& trace() { return trace_; }

    std::uint64_t monitor_cost() const {
        return cfg_.exact ? 0 : cfg_.monitor_shots * cost_.active_experiments();
    }

    // Noisy cost at the current parameters, charged to this iteration.
    void observe() {
        pending_shots_ = 0;
        if (cfg_.exact || cfg_.monitor_shots == 0) {
            current_ = cost_.exact_cost(params_);
            return;
        }
        const auto f = cost_.fidelities(params_);
        const auto& w = cost_.weights();
        current_ = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            if (w[k] == 0.0) continue;
            const auto hits = binomial(cfg_.monitor_shots, f[k], cfg_.seed, {tag(StreamTag::monitor), iter_, k});
            current_ += w[k] * (1.0 - static_cast<double>(hits) / static_cast<double>(cfg_.monitor_shots));
            pending_shots_ += cfg_.monitor_shots;
        }
    }

    bool window_stalled() const {
        if (cfg_.window == 0 || best_history_.size() <= cfg_.window) return false;
        const double before = best_history_[best_history_.size() - 1 - cfg_.window];
        const double now = best_history_.back();
        return before - now <= cfg_.rel_tol * std::abs(before);
    }

    void record(std::uint64_t gradient_shots, std::uint64_t n_min) {
        const std::uint64_t shots = pending_shots_ + gradient_shots;
        cumulative_ += shots;
        IterationRecord r{iter_, params_, current_, std::nullopt, shots, cumulative_, lr_, n_min};
        if (hooks_.noiseless) r.noiseless_cost = hooks_.noiseless(params_);
        if (hooks_.on_record) hooks_.on_record(r);
        trace_.records.push_back(std::move(r));
        if (current_ < best_) {
            best_ = current_;
            stale_ = 0;
        } else if (++stale_ >= cfg_.lr_patience) {
            lr_ /= 2.0;
            stale_ = 0;
        }
        best_history_.push_back(best_);
    }

    void step(const std::vector<double>& gradient) {
        for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= lr_ * gradient[i];
        ++iter_;
    }

    std::uint64_t pending() const { return pending_shots_; }

 private:
    const Objective& cost_;
    const OptimizerConfig& cfg_;
    const TrainingHooks& hooks_;
    std::vector<double> params_;
    double lr_;
    std::size_t iter_ = 0;
    double current_ = 0.0;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t stale_ = 0;
    std::vector<double> best_history_;
    std::uint64_t pending_shots_ = 0;
    std::uint64_t cumulative_ = 0;
    OptimizerTrace trace_;
};

}  // namespace

OptimizerTrace gradient_descent(const Objective& cost, std::vector<double> init, const OptimizerConfig& cfg,
                                const TrainingHooks& hooks) {
    cfg.validate(false);
    Trainer t(cost, std::move(init), cfg, hooks);
    const std::size_t p = cost.param_count();
    const std::uint64_t per_iter = cfg.exact ? 0 : 2 * cfg.shots * p * cost.active_experiments();
    std::optional<std::vector<std::uint64_t>> shots;
    if (!cfg.exact) shots = std::vector<std::uint64_t>(p, cfg.shots);
    while (true) {
        t.observe();
        std::string stop;
        if (t.iteration() >= cfg.max_iterations) stop = "max_iterations";
        if (stop.empty() && t.window_stalled()) stop = "converged";
        if (stop.empty() && cfg.budget > 0 && t.spent() + t.pending() + per_iter + t.monitor_cost() > cfg.budget) {
            stop = "budget";
        }
        if (!stop.empty()) {
            t.record(0, 0);
            t.trace().termination = stop;
            break;
        }
        const auto g = parameter_shift_gradient(cost, t.params(), shots, cfg.seed, t.iteration());
        t.record(g.shots, 0);
        t.step(g.gradient);
    }
    return std::move(t.trace());
}

OptimizerTrace adaptive_shot_descent(const Objective& cost, std::vector<double> init, const OptimizerConfig& cfg,
                                     const TrainingHooks& hooks) {
    cfg.validate(true);
    const std::size_t p = cost.param_count();
    const std::uint64_t experiments = cost.active_experiments();
    if (!cfg.exact && cfg.budget < 2 * cfg.n_min * p * experiments + cfg.monitor_shots * experiments) {
        throw ValidationError("shot budget is smaller than one minimal iteration");
    }
    Trainer t(cost, std::move(init), cfg, hooks);
    const double mu = cfg.running_decay;
    std::vector<double> chi(p, 0.0);
    std::vector<double> xi(p, 0.0);
    std::vector<std::uint64_t> s(p, cfg.n_min);
    double mu_pow = 1.0;
    while (true) {
        const std::uint64_t n_min =
            cfg.n_min_raise_iteration && t.iteration() >= *cfg.n_min_raise_iteration ? cfg.n_min_raised : cfg.n_min;
        for (auto& si : s) si = std::max(si, n_min);
        t.observe();
        std::uint64_t need = 0;
        for (auto si : s) need += 2 * si * experiments;
        std::string stop;
        if (t.iteration() >= cfg.max_iterations) stop = "max_iterations";
        if (stop.empty() && !cfg.exact && t.spent() + t.pending() + need + t.monitor_cost() > cfg.budget) {
            stop = "budget";
        }
        if (!stop.empty()) {
            t.record(0, n_min);
            t.trace().termination = stop;
            break;
        }
        std::optional<std::vector<std::uint64_t>> shots;
        if (!cfg.exact) shots = s;
        const auto g = parameter_shift_gradient(cost, t.params(), shots, cfg.seed, t.iteration());
        t.record(g.shots, n_min);
        const double lr = t.lr();
        t.step(g.gradient);

        mu_pow *= mu;
        const double l = cfg.lipschitz;
        std::vector<double> gain(p, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            chi[i] = mu * chi[i] + (1.0 - mu) * g.gradient[i];
            xi[i] = mu * xi[i] + (1.0 - mu) * g.shot_variance[i];
            const double chi_hat = chi[i] / (1.0 - mu_pow);
            const double xi_hat = xi[i] / (1.0 - mu_pow);
            const double want = 2.0 * l * lr / (2.0 - l * lr) * xi_hat / (chi_hat * chi_hat + cfg.regularizer * mu_pow);
            const double si = std::clamp(std::ceil(want), 1.0, 1e12);
            s[i] = static_cast<std::uint64_t>(si);
            gain[i] = ((lr - l * lr * lr / 2.0) * chi_hat * chi_hat - l * lr * lr / (2.0 * si) * xi_hat) / si;
        }
        const std::size_t best = static_cast<std::size_t>(std::max_element(gain.begin(), gain.end()) - gain.begin());
        const std::uint64_t cap = s[best];
        for (auto& si : s) si = std::clamp(si, n_min, std::max(cap, n_min));
    }
    return std::move(t.trace());
}

}  // namespace vqc
