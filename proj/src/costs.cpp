#include "vqclab/costs.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "vqclab/rng.hpp"

namespace vqc {

namespace {

std::vector<int> range(int begin, int end) {
    std::vector<int> r(static_cast<std::size_t>(end - begin));
    std::iota(r.begin(), r.end(), begin);
    return r;
}

double trace_product(const Matrix& a, const Matrix& b) { return (a.cwiseProduct(b.transpose())).sum().real(); }

double diag_expectation(const RealVector& effect, const Matrix& rho) {
    return (effect.array() * rho.diagonal().real().array()).sum();
}

}  // namespace

std::string to_string(CostKind kind) {
    switch (kind) {
        case CostKind::hst: return "hst";
        case CostKind::lhst: return "lhst";
        case CostKind::let: return "let";
        case CostKind::llet: return "llet";
    }
    return "hst";
}

CostKind cost_kind_from_string(const std::string& s) {
    if (s == "hst" || s == "HST") return CostKind::hst;
    if (s == "lhst" || s == "LHST") return CostKind::lhst;
    if (s == "let" || s == "LET") return CostKind::let;
    if (s == "llet" || s == "LLET") return CostKind::llet;
    throw ValidationError("unknown cost kind '" + s + "'");
}

CostCircuit::CostCircuit(CostKind kind, const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise,
                         std::optional<int> branch)
    : kind_(kind), n_(u.num_qubits()) {
    if (v.num_qubits() != n_) throw DimensionError("U and V act on different registers");
    if (n_ > 3) throw DimensionError("cost circuits support at most 3 qubits per register half");
    const bool fumc = is_fumc(kind);
    reg_ = fumc ? 2 * n_ : n_;
    validate_schedule(noise, n_, fumc, false);
    if (branch && (*branch < 0 || *branch >= n_)) throw DimensionError("branch index out of range");
    if (!fumc && noise.gate_noise.count(kEntanglerClass) && noise.tag != ModelTag::custom) {
        throw ValidationError("entangler noise has no place in a fixed-input test");
    }

    const std::vector<int> all = range(0, reg_);
    const std::vector<int> qa = range(0, n_);
    const std::vector<int> qb = fumc ? range(n_, 2 * n_) : std::vector<int>{};
    auto qubits_of = [&](Subsystem s) -> const std::vector<int>& {
        if (!fumc) return qa;
        if (s == Subsystem::a) return qa;
        if (s == Subsystem::b) return qb;
        return all;
    };
    auto channel_step = [&](const Channel& c, std::vector<int> targets) {
        return Step{Step::Kind::channel, GateOp{}, std::make_shared<const Channel>(c), 1.0, Embedding(reg_, targets)};
    };
    auto place = [&](std::vector<Step>& out, const Channel& c, const std::vector<int>& touched) {
        if (c.is_identity()) return;
        if (c.arity() == reg_) {
            out.push_back(channel_step(c, all));
        } else if (c.arity() == static_cast<int>(touched.size())) {
            out.push_back(channel_step(c, touched));
        } else if (c.arity() == 1) {
            for (int q : touched) out.push_back(channel_step(c, {q}));
        } else {
            throw DimensionError("gate noise arity " + std::to_string(c.arity()) + " fits neither the gate nor the register");
        }
    };
    auto add_gate = [&](std::vector<Step>& out, const GateOp& g, bool entangler, bool in_w) {
        const GateNoiseRule* rule = nullptr;
        const std::string cls = entangler && noise.gate_noise.count(kEntanglerClass) ? kEntanglerClass
                                                                                      : gate_class_for_arity(g.arity());
        if (auto it = noise.gate_noise.find(cls); it != noise.gate_noise.end()) rule = &it->second;
        if (entangler && cls != kEntanglerClass && noise.tag != ModelTag::hardware && noise.tag != ModelTag::custom) {
            rule = nullptr;
        }
        if (!entangler && cls == kEntanglerClass) rule = nullptr;
        if (!entangler && (noise.tag == ModelTag::nm1 || noise.tag == ModelTag::nm2)) rule = nullptr;
        if (rule) {
            for (const Channel& c : rule->pre) place(out, c, g.targets);
        }
        out.push_back(Step{Step::Kind::gate, g, nullptr, 1.0, Embedding(reg_, g.targets)});
        if (rule) {
            for (const Channel& c : rule->post) place(out, c, g.targets);
        }
        if (in_w) {
            for (const auto& p : noise.during_w) {
                if (!p.channel.is_identity()) out.push_back(channel_step(p.channel, qubits_of(p.where)));
            }
        }
        if (noise.continuous_global_depol < 1.0) {
            out.push_back(Step{Step::Kind::depol, GateOp{}, nullptr, noise.continuous_global_depol, Embedding(reg_, all)});
        }
    };
    auto fixed = [](std::string name, Matrix m, std::vector<int> t) {
        return GateOp{std::move(name), std::move(m), std::move(t), std::nullopt, false};
    };

    if (fumc) {
        for (int j = 0; j < n_; ++j) add_gate(prefix_, fixed("h", gates::h(), {j}), true, false);
        for (int j = 0; j < n_; ++j) add_gate(prefix_, fixed("cx", gates::cnot(), {j, n_ + j}), true, false);
    }
    for (const auto& p : noise.tau1) {
        if (!p.channel.is_identity()) prefix_.push_back(channel_step(p.channel, qubits_of(p.where)));
    }
    for (const auto& g : u.ops()) add_gate(prefix_, g, false, true);
    const GateSequence vd = v.adjoint();
    for (const auto& g : vd.ops()) add_gate(prefix_, g, false, true);
    for (const auto& p : noise.tau2) {
        if (!p.channel.is_identity()) prefix_.push_back(channel_step(p.channel, qubits_of(p.where)));
    }

    NoisyPovm readout = noise.readout ? *noise.readout : NoisyPovm::ideal(1);
    auto row_index = [&](int q) { return readout.num_qubits() == 1 ? 0 : q; };
    auto effect_on = [&](const std::vector<int>& measured) {
        const auto d = static_cast<Eigen::Index>(dim_for_qubits(reg_));
        RealVector e(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            double v = 1.0;
            for (int q : measured) {
                const int bit = static_cast<int>((static_cast<std::uint64_t>(i) >> (reg_ - 1 - q)) & 1U);
                v *= readout.p(row_index(q), 0, bit);
            }
            e(i) = v;
        }
        return e;
    };

    std::vector<int> js;
    if (branch) {
        js.push_back(*branch);
    } else {
        js = range(0, n_);
    }
    switch (kind) {
        case CostKind::hst: {
            Branch b{{}, effect_on(all), 1.0};
            for (int j = n_ - 1; j >= 0; --j) add_gate(b.steps, fixed("cx", gates::cnot(), {j, n_ + j}), true, false);
            for (int j = n_ - 1; j >= 0; --j) add_gate(b.steps, fixed("h", gates::h(), {j}), true, false);
            branches_.push_back(std::move(b));
            break;
        }
        case CostKind::lhst:
            for (int j : js) {
                Branch b{{}, effect_on({j, n_ + j}), 1.0 / static_cast<double>(js.size())};
                add_gate(b.steps, fixed("cx", gates::cnot(), {j, n_ + j}), true, false);
                add_gate(b.steps, fixed("h", gates::h(), {j}), true, false);
                branches_.push_back(std::move(b));
            }
            break;
        case CostKind::let: branches_.push_back(Branch{{}, effect_on(all), 1.0}); break;
        case CostKind::llet:
            for (int j : js) branches_.push_back(Branch{{}, effect_on({j}), 1.0 / static_cast<double>(js.size())});
            break;
    }

    std::map<std::size_t, int> slot_uses;
    first_param_ = prefix_.size();
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
        const auto& s = prefix_[i];
        if (s.kind != Step::Kind::gate || !s.gate.slots) continue;
        first_param_ = std::min(first_param_, i);
        for (std::size_t slot : *s.gate.slots) {
            ++slot_uses[slot];
            param_count_ = std::max(param_count_, slot + 1);
        }
    }
    for (const auto& [slot, uses] : slot_uses) {
        if (uses != 1) unique_slots_ = false;
    }

    const auto d = static_cast<Eigen::Index>(dim_for_qubits(reg_));
    cached_ = Matrix::Zero(d, d);
    cached_(0, 0) = 1.0;
    run(cached_, prefix_, 0, first_param_, {});

    heisenberg_ = Matrix::Zero(d, d);
    for (const auto& b : branches_) {
        Matrix m = b.effect.cast<cplx>().asDiagonal();
        for (auto it = b.steps.rbegin(); it != b.steps.rend(); ++it) run_adjoint(m, *it, {});
        heisenberg_ += b.weight * m;
    }
}

bool CostCircuit::is_global_depol(const Step& s) const {
    if (s.kind == Step::Kind::depol) return true;
    return s.kind == Step::Kind::channel && s.channel->kind() == ChannelKind::depolarizing && s.channel->arity() == reg_;
}

void CostCircuit::run(Matrix& m, const std::vector<Step>& steps, std::size_t begin, std::size_t end,
                      std::span<const double> params, bool skip_global_depol) const {
    for (std::size_t i = begin; i < end; ++i) {
        const Step& s = steps[i];
        if (skip_global_depol && is_global_depol(s)) continue;
        switch (s.kind) {
            case Step::Kind::gate: kernel::conjugate(m, s.gate.matrix_at(params), s.emb); break;
            case Step::Kind::channel: s.channel->apply(m, s.emb); break;
            case Step::Kind::depol: kernel::depolarize(m, s.depol_p, s.emb); break;
        }
    }
}

void CostCircuit::run_adjoint(Matrix& m, const Step& s, std::span<const double> params) {
    switch (s.kind) {
        case Step::Kind::gate: kernel::adjoint_conjugate(m, s.gate.matrix_at(params), s.emb); break;
        case Step::Kind::channel: s.channel->apply_adjoint(m, s.emb); break;
        case Step::Kind::depol: kernel::depolarize(m, s.depol_p, s.emb); break;
    }
}

std::vector<std::size_t> CostCircuit::depol_layers() const {
    auto count = [](const std::vector<Step>& steps) {
        return static_cast<std::size_t>(
            std::count_if(steps.begin(), steps.end(), [](const Step& s) { return s.kind == Step::Kind::depol; }));
    };
    const std::size_t shared = count(prefix_);
    std::vector<std::size_t> out;
    for (const auto& b : branches_) out.push_back(shared + count(b.steps));
    return out;
}

std::vector<double> CostCircuit::global_depol_weight() const {
    auto weight = [&](const std::vector<Step>& steps) {
        double w = 1.0;
        for (const auto& s : steps) {
            if (s.kind == Step::Kind::depol) w *= s.depol_p;
            else if (is_global_depol(s)) w *= s.channel->depolarizing_p();
        }
        return w;
    };
    const double shared = weight(prefix_);
    std::vector<double> out;
    for (const auto& b : branches_) out.push_back(shared * weight(b.steps));
    return out;
}

double CostCircuit::effect_fraction(std::size_t b) const {
    const RealVector& e = branches_.at(b).effect;
    return e.sum() / static_cast<double>(e.size());
}

std::vector<double> CostCircuit::branch_fidelities_without_global_depol(std::span<const double> params) const {
    if (params.size() < param_count_) throw DimensionError("parameter vector too short");
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(reg_));
    Matrix rho = Matrix::Zero(d, d);
    rho(0, 0) = 1.0;
    run(rho, prefix_, 0, prefix_.size(), params, true);
    std::vector<double> out;
    for (const auto& b : branches_) {
        Matrix m = rho;
        run(m, b.steps, 0, b.steps.size(), params, true);
        out.push_back(checked_probability(diag_expectation(b.effect, m)));
    }
    return out;
}

double CostCircuit::branch_value(const Matrix& rho, const Branch& b, std::span<const double> params) const {
    if (b.steps.empty()) return diag_expectation(b.effect, rho);
    Matrix m = rho;
    run(m, b.steps, 0, b.steps.size(), params);
    return diag_expectation(b.effect, m);
}

std::vector<double> CostCircuit::branch_fidelities(std::span<const double> params) const {
    if (params.size() < param_count_) throw DimensionError("parameter vector too short");
    Matrix rho = cached_;
    run(rho, prefix_, first_param_, prefix_.size(), params);
    std::vector<double> out;
    for (const auto& b : branches_) out.push_back(checked_probability(branch_value(rho, b, params)));
    return out;
}

double CostCircuit::fidelity(std::span<const double> params) const {
    const auto f = branch_fidelities(params);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += branches_[i].weight * f[i];
    return checked_probability(acc);
}

Matrix CostCircuit::final_state(std::span<const double> params, std::size_t branch) const {
    Matrix rho = cached_;
    run(rho, prefix_, first_param_, prefix_.size(), params);
    const Branch& b = branches_.at(branch);
    run(rho, b.steps, 0, b.steps.size(), params);
    return rho;
}

CostCircuit::Shifted CostCircuit::shifted_fidelities(std::span<const double> params, double shift) const {
    if (params.size() < param_count_) throw DimensionError("parameter vector too short");
    Shifted out{0.0, std::vector<double>(param_count_, 0.0), std::vector<double>(param_count_, 0.0)};
    if (!unique_slots_) {
        out.value = fidelity(params);
        std::vector<double> p(params.begin(), params.end());
        for (std::size_t s = 0; s < param_count_; ++s) {
            const double keep = p[s];
            p[s] = keep + shift;
            out.plus[s] = fidelity(p);
            p[s] = keep - shift;
            out.minus[s] = fidelity(p);
            p[s] = keep;
        }
        return out;
    }

    std::vector<std::size_t> param_steps;
    std::vector<Matrix> before;
    Matrix rho = cached_;
    for (std::size_t i = first_param_; i < prefix_.size(); ++i) {
        const Step& s = prefix_[i];
        if (s.kind == Step::Kind::gate && s.gate.slots) {
            param_steps.push_back(i);
            before.push_back(rho);
        }
        run(rho, prefix_, i, i + 1, params);
    }
    out.value = checked_probability(trace_product(heisenberg_, rho));

    std::vector<Matrix> after(param_steps.size());
    Matrix m = heisenberg_;
    std::size_t k = param_steps.size();
    for (std::size_t i = prefix_.size(); i-- > first_param_;) {
        const Step& s = prefix_[i];
        if (k > 0 && param_steps[k - 1] == i) after[--k] = m;
        run_adjoint(m, s, params);
    }

    std::vector<double> p(params.begin(), params.end());
    for (std::size_t idx = 0; idx < param_steps.size(); ++idx) {
        const Step& s = prefix_[param_steps[idx]];
        for (std::size_t slot : *s.gate.slots) {
            const double keep = p[slot];
            for (int sign : {+1, -1}) {
                p[slot] = keep + sign * shift;
                Matrix r = before[idx];
                kernel::conjugate(r, s.gate.matrix_at(p), s.emb);
                const double f = trace_product(after[idx], r);
                (sign > 0 ? out.plus : out.minus)[slot] = f;
            }
            p[slot] = keep;
        }
    }
    return out;
}

CostEstimate sample_cost(double fidelity, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw ValidationError("sampled mode needs at least one shot");
    const double f = std::clamp(fidelity, 0.0, 1.0);
    const std::vector<double> probs{f, 1.0 - f};
    const auto counts = sample_counts(probs, shots, seed);
    const double freq = static_cast<double>(counts[0]) / static_cast<double>(shots);
    CostEstimate e;
    e.value = 1.0 - freq;
    e.mode = EvalModeKind::sampled;
    e.shots_used = shots;
    e.std_error = std::sqrt(freq * (1.0 - freq) / static_cast<double>(shots));
    return e;
}

CostEstimate evaluate_cost(CostKind kind, const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise,
                           EvalMode mode, std::optional<int> j) {
    if (v.param_count() > 0) throw ValidationError("bind V before evaluating a cost");
    const CostCircuit circuit(kind, u, v, noise, j);
    const double f = circuit.fidelity();
    if (mode.kind == EvalModeKind::sampled) return sample_cost(f, mode.shots, mode.seed);
    CostEstimate e;
    e.value = 1.0 - f;
    return e;
}

CostEstimate hst_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise, EvalMode mode) {
    return evaluate_cost(CostKind::hst, u, v, noise, mode);
}

CostEstimate lhst_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise, EvalMode mode,
                       std::optional<int> j) {
    return evaluate_cost(CostKind::lhst, u, v, noise, mode, j);
}

CostEstimate let_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise, EvalMode mode) {
    return evaluate_cost(CostKind::let, u, v, noise, mode);
}

CostEstimate llet_cost(const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise, EvalMode mode,
                       std::optional<int> j) {
    return evaluate_cost(CostKind::llet, u, v, noise, mode, j);
}

CostEstimate weighted_cost(double q, const CostEstimate& a, const CostEstimate& b) {
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("weight q must lie in [0, 1]");
    CostEstimate e;
    e.value = q * a.value + (1.0 - q) * b.value;
    const bool sampled = a.mode == EvalModeKind::sampled || b.mode == EvalModeKind::sampled;
    e.mode = sampled ? EvalModeKind::sampled : EvalModeKind::exact;
    e.shots_used = a.shots_used + b.shots_used;
    if (a.std_error || b.std_error) {
        const double sa = q * a.std_error.value_or(0.0);
        const double sb = (1.0 - q) * b.std_error.value_or(0.0);
        e.std_error = std::sqrt(sa * sa + sb * sb);
    }
    return e;
}

FidelityEstimate average_fidelity(const Matrix& u, const Matrix& v, std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw ValidationError("need at least one sample");
    if (u.rows() != v.rows()) throw DimensionError("U and V sizes differ");
    const Matrix w = v.adjoint() * u;
    auto rng = make_stream(seed, {tag(StreamTag::haar)});
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const Vector psi = haar_state(u.rows(), rng);
        const double f = std::norm(psi.dot(w * psi));
        sum += f;
        sum_sq += f * f;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

double hst_closed_form(const Matrix& u, const Matrix& v) {
    const double d = static_cast<double>(u.rows());
    return 1.0 - std::norm((v.adjoint() * u).trace()) / (d * d);
}

double let_closed_form(const Matrix& u, const Matrix& v) { return 1.0 - std::norm((v.adjoint() * u)(0, 0)); }

namespace {

// |Phi> over A (x) B with A the first half: (1/sqrt d) sum_i |i>|i>.
Vector bell_state(int n) {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    Vector phi = Vector::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    return phi;
}

}  // namespace

Matrix effective_hamiltonian(CostKind kind, const Matrix& u) {
    const int n = qubits_for_dim(u.rows());
    if (n > 3) throw DimensionError("effective Hamiltonians limited to 3-qubit targets");
    const auto d = u.rows();
    switch (kind) {
        case CostKind::let: {
            const Vector psi = u.col(0);
            return Matrix::Identity(d, d) - psi * psi.adjoint();
        }
        case CostKind::llet: {
            Matrix acc = Matrix::Zero(d, d);
            for (int j = 0; j < n; ++j) {
                Matrix p0 = Matrix::Zero(2, 2);
                p0(0, 0) = 1.0;
                const std::vector<int> t{j};
                acc += u * embed(p0, t, n) * u.adjoint();
            }
            return Matrix::Identity(d, d) - acc / static_cast<double>(n);
        }
        case CostKind::hst: {
            const Matrix ua = kron(u, Matrix::Identity(d, d));
            const Vector chi = ua * bell_state(n);
            return Matrix::Identity(d * d, d * d) - chi * chi.adjoint();
        }
        case CostKind::lhst: {
            const Matrix ua = kron(u, Matrix::Identity(d, d));
            Matrix acc = Matrix::Zero(d * d, d * d);
            const Vector pair = bell_state(1);
            const Matrix proj = pair * pair.adjoint();
            for (int j = 0; j < n; ++j) {
                const std::vector<int> t{j, n + j};
                acc += embed(proj, t, 2 * n);
            }
            return Matrix::Identity(d * d, d * d) - ua * acc * ua.adjoint() / static_cast<double>(n);
        }
    }
    return {};
}

Vector expectation_state(CostKind kind, const Matrix& v) {
    const int n = qubits_for_dim(v.rows());
    if (!is_fumc(kind)) return v.col(0);
    return kron(v, Matrix::Identity(v.rows(), v.rows())) * bell_state(n);
}

GateSequence as_sequence(const Matrix& u, const std::string& name) {
    const int n = qubits_for_dim(u.rows());
    GateSequence s(n);
    std::vector<int> t(static_cast<std::size_t>(n));
    std::iota(t.begin(), t.end(), 0);
    s.add(name, u, t);
    return s;
}

}  // namespace vqc
