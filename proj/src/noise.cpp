#include "vqclab/noise.hpp"

#include <algorithm>

namespace vqc {

namespace {

bool is_pauli_like(const Channel& c) {
    return c.is_identity() || c.kind() == ChannelKind::pauli || c.kind() == ChannelKind::depolarizing;
}

bool is_depolarizing_like(const Channel& c) { return c.is_identity() || c.kind() == ChannelKind::depolarizing; }

bool is_nupn_like(const Channel& c) { return is_pauli_like(c) || c.kind() == ChannelKind::nonunital_pauli; }

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

void require_strict_pauli(const Channel& c, const std::string& where) {
    if (c.kind() != ChannelKind::pauli) return;
    const std::uint64_t d = dim_for_qubits(c.arity());
    for (std::uint64_t x = 0; x < d; ++x) {
        for (std::uint64_t z = 0; z < d; ++z) {
            require(c.transfer(PauliString(c.arity(), x, z)) >= -1e-15, where + ": negative transfer coefficient");
        }
    }
}

void require_strict_nupn(const Channel& c, const std::string& where) {
    if (c.kind() == ChannelKind::pauli) {
        require_strict_pauli(c, where);
        return;
    }
    if (c.kind() != ChannelKind::nonunital_pauli) return;
    if (!c.local_factors().empty()) {
        for (const Channel& l : c.local_factors()) {
            for (const char* w : {"X", "Y", "Z"}) {
                require(l.transfer(PauliString::parse(w)) >= -1e-15, where + ": negative transfer coefficient");
            }
        }
        return;
    }
    const std::uint64_t d = dim_for_qubits(c.arity());
    for (std::uint64_t x = 0; x < d; ++x) {
        for (std::uint64_t z = 0; z < d; ++z) {
            require(c.transfer(PauliString(c.arity(), x, z)) >= -1e-15, where + ": negative transfer coefficient");
        }
    }
}

int subsystem_size(Subsystem s, int n, bool fumc) {
    if (!fumc) {
        require(s != Subsystem::b, "fixed-input registers have no B subsystem");
        return n;
    }
    return s == Subsystem::ab ? 2 * n : n;
}

const Placement* find_placement(const std::vector<Placement>& list, Subsystem where) {
    for (const auto& p : list) {
        if (p.where == where) return &p;
    }
    return nullptr;
}

Channel or_identity(const std::optional<Channel>& c, int arity) { return c ? *c : Channel::identity(arity); }

void check_arity(const std::optional<Channel>& c, int arity, const std::string& what) {
    if (c && c->arity() != arity) throw DimensionError(what + " must act on " + std::to_string(arity) + " qubits");
}

GateNoiseRule entangler_rule(const std::optional<Channel>& pre, const std::optional<Channel>& post) {
    GateNoiseRule r;
    if (pre) r.pre.push_back(*pre);
    if (post) r.post.push_back(*post);
    return r;
}

void validate_entangler_rule(const NoiseSchedule& s, int n, bool strict) {
    for (const auto& [key, rule] : s.gate_noise) {
        require(key == kEntanglerClass, "gate noise is restricted to the entangling layers under this tag");
        for (const auto* list : {&rule.pre, &rule.post}) {
            require(list->size() <= 1, "one channel before and after each entangling gate");
            for (const Channel& c : *list) {
                require(c.arity() == 2 * n, "entangling-gate noise must be global");
                require(is_pauli_like(c), "entangling-gate noise must be a Pauli channel");
                if (strict) require_strict_pauli(c, "entangling-gate noise");
            }
        }
    }
}

}  // namespace

std::string to_string(ModelTag tag) {
    switch (tag) {
        case ModelTag::nm1: return "nm1";
        case ModelTag::nm2: return "nm2";
        case ModelTag::nm3: return "nm3";
        case ModelTag::hardware: return "hardware";
        case ModelTag::custom: return "custom";
    }
    return "custom";
}

ModelTag model_tag_from_string(const std::string& s) {
    if (s == "nm1") return ModelTag::nm1;
    if (s == "nm2") return ModelTag::nm2;
    if (s == "nm3") return ModelTag::nm3;
    if (s == "hardware") return ModelTag::hardware;
    if (s == "custom") return ModelTag::custom;
    throw ValidationError("unknown noise model tag '" + s + "'");
}

std::string to_string(Subsystem s) {
    switch (s) {
        case Subsystem::a: return "A";
        case Subsystem::b: return "B";
        case Subsystem::ab: return "AB";
    }
    return "AB";
}

std::string gate_class_for_arity(int arity) { return std::to_string(arity) + "q"; }

bool NoiseSchedule::is_noiseless() const {
    auto quiet = [](const std::vector<Placement>& l) {
        return std::all_of(l.begin(), l.end(), [](const Placement& p) { return p.channel.is_identity(); });
    };
    for (const auto& [key, rule] : gate_noise) {
        for (const auto* list : {&rule.pre, &rule.post}) {
            for (const Channel& c : *list) {
                if (!c.is_identity()) return false;
            }
        }
    }
    return continuous_global_depol == 1.0 && quiet(tau1) && quiet(tau2) && quiet(during_w) &&
           (!readout || readout->is_ideal());
}

bool NoiseSchedule::has_nonunital() const {
    auto unital = [](const std::vector<Placement>& l) {
        return std::all_of(l.begin(), l.end(), [](const Placement& p) { return p.channel.is_unital(); });
    };
    for (const auto& [key, rule] : gate_noise) {
        for (const auto* list : {&rule.pre, &rule.post}) {
            for (const Channel& c : *list) {
                if (!c.is_unital()) return true;
            }
        }
    }
    return !(unital(tau1) && unital(tau2) && unital(during_w));
}

NoiseSchedule NoiseSchedule::without_global_depolarizing() const {
    NoiseSchedule out = *this;
    out.continuous_global_depol = 1.0;
    auto strip = [](std::vector<Placement>& l) {
        std::erase_if(l, [](const Placement& p) {
            return p.where == Subsystem::ab && p.channel.kind() == ChannelKind::depolarizing;
        });
    };
    strip(out.tau1);
    strip(out.tau2);
    strip(out.during_w);
    return out;
}

void validate_schedule(const NoiseSchedule& s, int n, bool fumc, bool strict) {
    require(s.continuous_global_depol >= 0.0 && s.continuous_global_depol <= 1.0, "depolarizing weight outside [0, 1]");
    // a model built for the other approach is a tag error before it is a shape error
    if (s.tag == ModelTag::nm1 || s.tag == ModelTag::nm2) require(fumc, "Noise Models 1 and 2 apply to the Hilbert-Schmidt tests");
    if (s.tag == ModelTag::nm3) require(!fumc, "Noise Model 3 applies to the Loschmidt echo tests");
    for (const auto* list : {&s.tau1, &s.tau2, &s.during_w}) {
        for (const auto& p : *list) {
            if (p.channel.arity() != subsystem_size(p.where, n, fumc)) {
                throw DimensionError("channel on " + to_string(p.where) + " has arity " +
                                     std::to_string(p.channel.arity()));
            }
        }
    }
    const int reg = fumc ? 2 * n : n;
    if (s.readout) {
        const int rows = s.readout->num_qubits();
        if (rows != 1 && rows != reg) throw DimensionError("readout rows must cover the register or be a single row");
    }

    switch (s.tag) {
        case ModelTag::custom:
        case ModelTag::hardware:
            if (s.tag == ModelTag::hardware) {
                require(!s.gate_noise.count(kEntanglerClass), "hardware noise is keyed by gate arity");
                require(s.readout.has_value(), "hardware model needs readout noise");
            }
            return;
        case ModelTag::nm1: {
            require(fumc, "Noise Model 1 applies to the Hilbert-Schmidt tests");
            require(s.tau1.size() == 1 && s.tau1[0].where == Subsystem::ab && is_pauli_like(s.tau1[0].channel),
                    "NM1 needs one global Pauli channel at tau1");
            require(s.tau2.size() == 1 && s.tau2[0].where == Subsystem::ab && is_pauli_like(s.tau2[0].channel),
                    "NM1 needs one global Pauli channel at tau2");
            require(s.during_w.size() == 2, "NM1 needs depolarizing noise on A and non-unital Pauli noise on B");
            const Placement* a = find_placement(s.during_w, Subsystem::a);
            const Placement* b = find_placement(s.during_w, Subsystem::b);
            require(a && is_depolarizing_like(a->channel), "NM1 needs depolarizing noise on A between tau1 and tau2");
            require(b && is_nupn_like(b->channel), "NM1 needs non-unital Pauli noise on B between tau1 and tau2");
            validate_entangler_rule(s, n, strict);
            require(s.readout.has_value(), "NM1 needs measurement noise");
            if (strict) {
                require_strict_pauli(s.tau1[0].channel, "tau1 Pauli");
                require_strict_pauli(s.tau2[0].channel, "tau2 Pauli");
                require_strict_nupn(b->channel, "B noise");
            }
            return;
        }
        case ModelTag::nm2: {
            require(fumc, "Noise Model 2 applies to the Hilbert-Schmidt tests");
            require(s.tau1.size() == 2 && s.tau1[0].where == Subsystem::ab && is_pauli_like(s.tau1[0].channel),
                    "NM2 needs a global Pauli channel at tau1");
            require(s.tau1[1].where == Subsystem::a && is_nupn_like(s.tau1[1].channel),
                    "NM2 needs non-unital Pauli noise on A at tau1");
            require(s.tau2.size() == 1 && s.tau2[0].where == Subsystem::ab && is_pauli_like(s.tau2[0].channel),
                    "NM2 needs one global Pauli channel at tau2");
            require(s.during_w.size() == 2, "NM2 needs depolarizing noise on A and Pauli noise on B");
            const Placement* a = find_placement(s.during_w, Subsystem::a);
            const Placement* b = find_placement(s.during_w, Subsystem::b);
            require(a && is_depolarizing_like(a->channel), "NM2 allows only depolarizing noise on A between tau1 and tau2");
            require(b && is_pauli_like(b->channel), "NM2 needs Pauli noise on B between tau1 and tau2");
            validate_entangler_rule(s, n, strict);
            require(s.readout.has_value(), "NM2 needs measurement noise");
            if (strict) {
                require_strict_pauli(s.tau1[0].channel, "tau1 Pauli");
                require_strict_nupn(s.tau1[1].channel, "A noise at tau1");
                require_strict_pauli(s.tau2[0].channel, "tau2 Pauli");
                require_strict_pauli(b->channel, "B noise");
            }
            return;
        }
        case ModelTag::nm3: {
            require(!fumc, "Noise Model 3 applies to the Loschmidt echo tests");
            require(s.tau2.empty(), "NM3 has no tau2 epoch: measurement follows V^dag U immediately");
            require(s.tau1.size() == 1 && is_pauli_like(s.tau1[0].channel), "NM3 needs one Pauli channel at tau1");
            require(s.during_w.empty() && s.gate_noise.empty(), "NM3 allows only depolarizing, tau1 Pauli and readout noise");
            require(s.readout.has_value(), "NM3 needs measurement noise");
            if (strict) require_strict_pauli(s.tau1[0].channel, "tau1 Pauli");
            return;
        }
    }
}

NoiseSchedule noise_model_1(int n, const Nm1Params& p) {
    check_arity(p.tau1_pauli, 2 * n, "tau1 Pauli channel");
    check_arity(p.tau2_pauli, 2 * n, "tau2 Pauli channel");
    check_arity(p.b_nupn, n, "B channel");
    check_arity(p.gate_pre, 2 * n, "gate noise");
    check_arity(p.gate_post, 2 * n, "gate noise");
    NoiseSchedule s;
    s.tag = ModelTag::nm1;
    s.continuous_global_depol = p.global_depol;
    s.tau1.push_back({or_identity(p.tau1_pauli, 2 * n), Subsystem::ab});
    s.tau2.push_back({or_identity(p.tau2_pauli, 2 * n), Subsystem::ab});
    s.during_w.push_back({depolarizing(p.a_depol, n), Subsystem::a});
    s.during_w.push_back({or_identity(p.b_nupn, n), Subsystem::b});
    s.gate_noise[kEntanglerClass] = entangler_rule(p.gate_pre, p.gate_post);
    s.readout = p.readout ? *p.readout : NoisyPovm::ideal(1);
    validate_schedule(s, n, true, p.strict);
    return s;
}

NoiseSchedule noise_model_2(int n, const Nm2Params& p) {
    check_arity(p.tau1_pauli, 2 * n, "tau1 Pauli channel");
    check_arity(p.tau2_pauli, 2 * n, "tau2 Pauli channel");
    check_arity(p.a_nupn_tau1, n, "A channel at tau1");
    check_arity(p.b_pauli, n, "B channel");
    check_arity(p.gate_pre, 2 * n, "gate noise");
    check_arity(p.gate_post, 2 * n, "gate noise");
    NoiseSchedule s;
    s.tag = ModelTag::nm2;
    s.continuous_global_depol = p.global_depol;
    s.tau1.push_back({or_identity(p.tau1_pauli, 2 * n), Subsystem::ab});
    s.tau1.push_back({or_identity(p.a_nupn_tau1, n), Subsystem::a});
    s.tau2.push_back({or_identity(p.tau2_pauli, 2 * n), Subsystem::ab});
    s.during_w.push_back({depolarizing(p.a_depol, n), Subsystem::a});
    s.during_w.push_back({or_identity(p.b_pauli, n), Subsystem::b});
    s.gate_noise[kEntanglerClass] = entangler_rule(p.gate_pre, p.gate_post);
    s.readout = p.readout ? *p.readout : NoisyPovm::ideal(1);
    validate_schedule(s, n, true, p.strict);
    return s;
}

NoiseSchedule noise_model_3(int n, const Nm3Params& p) {
    check_arity(p.tau1_pauli, n, "tau1 Pauli channel");
    NoiseSchedule s;
    s.tag = ModelTag::nm3;
    s.continuous_global_depol = p.global_depol;
    s.tau1.push_back({or_identity(p.tau1_pauli, n), Subsystem::ab});
    s.readout = p.readout ? *p.readout : NoisyPovm::ideal(1);
    validate_schedule(s, n, false, p.strict);
    return s;
}

NoiseSchedule hardware_like(const HardwareParams& p) {
    if (!(p.depol_1q >= 0.0 && p.depol_1q <= 1.0 && p.depol_2q >= 0.0 && p.depol_2q <= 1.0)) {
        throw ValidationError("gate error rates must lie in [0, 1]");
    }
    NoiseSchedule s;
    s.tag = ModelTag::hardware;
    GateNoiseRule one;
    one.post.push_back(depolarizing(1.0 - p.depol_1q, 1));
    one.post.push_back(thermal_relaxation(p.t1, p.t2, p.time_1q));
    GateNoiseRule two;
    two.post.push_back(depolarizing(1.0 - p.depol_2q, 2));
    two.post.push_back(thermal_relaxation(p.t1, p.t2, p.time_2q));
    s.gate_noise["1q"] = std::move(one);
    s.gate_noise["2q"] = std::move(two);
    s.readout = NoisyPovm({p.readout});
    return s;
}

}  // namespace vqc
