#include "vqclab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "vqclab/rng.hpp"
#include "vqclab/sim_random.hpp"
#include "vqclab/targets.hpp"
#include "vqclab/verifier.hpp"

namespace vqc {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T get_req(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + where);
    return get_or<T>(j, key, T{});
}

cplx parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("complex entries are numbers or [re, im] pairs");
}

Matrix parse_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) throw DimensionError("matrix must be square");
        for (Eigen::Index c = 0; c < rows; ++c) m(r, c) = parse_complex(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

std::vector<ReadoutRow> parse_rows(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("readout must be a list of [p00, p11] rows");
    // a single flat pair is one row for every qubit
    if (j[0].is_number()) return {{j.at(0).get<double>(), j.at(1).get<double>()}};
    std::vector<ReadoutRow> rows;
    for (const auto& r : j) rows.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    return rows;
}

Subsystem parse_subsystem(const std::string& s) {
    if (s == "a") return Subsystem::a;
    if (s == "b") return Subsystem::b;
    if (s == "ab") return Subsystem::ab;
    throw ConfigError("subsystem must be a, b or ab");
}

std::vector<Placement> parse_placements(const json& j) {
    std::vector<Placement> out;
    for (const auto& p : j) {
        check_keys(p, {"channel", "on"}, "placement");
        out.push_back({parse_channel(p.at("channel")), parse_subsystem(get_or<std::string>(p, "on", "ab"))});
    }
    return out;
}

std::optional<Channel> opt_channel(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return parse_channel(j.at(key));
}

std::optional<NoisyPovm> opt_readout(const json& j) {
    if (!j.contains("readout") || j.at("readout").is_null()) return std::nullopt;
    return measurement_noise(parse_rows(j.at("readout")));
}

}  // namespace

Channel parse_channel(const json& j) {
    const auto type = get_req<std::string>(j, "type", "channel");
    if (type == "identity") {
        check_keys(j, {"type", "arity"}, "identity channel");
        return Channel::identity(get_or<int>(j, "arity", 1));
    }
    if (type == "depolarizing") {
        check_keys(j, {"type", "p", "arity"}, "depolarizing channel");
        return depolarizing(get_req<double>(j, "p", "depolarizing channel"), get_or<int>(j, "arity", 1));
    }
    if (type == "pauli") {
        check_keys(j, {"type", "terms", "strict"}, "pauli channel");
        const auto& t = j.at("terms");
        if (!t.is_object() || t.empty()) throw ConfigError("pauli terms map words to probabilities");
        std::vector<PauliTerm> terms;
        double total = 0.0;
        int arity = -1;
        bool has_identity = false;
        for (const auto& [word, prob] : t.items()) {
            const PauliString w = PauliString::parse(word);
            if (arity >= 0 && w.num_qubits() != arity) throw DimensionError("pauli words of different lengths");
            arity = w.num_qubits();
            has_identity = has_identity || w.is_identity_word();
            terms.push_back({w, prob.get<double>()});
            total += prob.get<double>();
        }
        // the identity weight defaults to whatever the listed words leave
        if (!has_identity) terms.push_back({PauliString::identity(arity), 1.0 - total});
        return pauli_channel(std::move(terms), get_or<bool>(j, "strict", false));
    }
    if (type == "dephasing") {
        check_keys(j, {"type", "c"}, "dephasing channel");
        return dephasing(get_req<double>(j, "c", "dephasing channel"));
    }
    if (type == "amplitude_damping") {
        check_keys(j, {"type", "gamma"}, "amplitude damping channel");
        return amplitude_damping(get_req<double>(j, "gamma", "amplitude damping channel"));
    }
    if (type == "thermal") {
        check_keys(j, {"type", "t1", "t2", "time"}, "thermal channel");
        return thermal_relaxation(get_req<double>(j, "t1", "thermal"), get_req<double>(j, "t2", "thermal"),
                                  get_req<double>(j, "time", "thermal"));
    }
    if (type == "product") {
        check_keys(j, {"type", "factors"}, "product channel");
        std::vector<Channel> locals;
        for (const auto& f : j.at("factors")) locals.push_back(parse_channel(f));
        return nonunital_pauli_from_locals(std::move(locals));
    }
    if (type == "kraus") {
        check_keys(j, {"type", "ops"}, "kraus channel");
        std::vector<Matrix> ops;
        for (const auto& k : j.at("ops")) ops.push_back(parse_matrix(k));
        return Channel::from_kraus(std::move(ops));
    }
    throw ConfigError("unknown channel type '" + type + "'");
}

json channel_to_json(const Channel& c) {
    switch (c.kind()) {
        case ChannelKind::depolarizing:
            return {{"type", "depolarizing"}, {"p", c.depolarizing_p()}, {"arity", c.arity()}};
        case ChannelKind::pauli: {
            json terms = json::object();
            for (const auto& t : c.pauli_terms()) terms[t.word.to_string()] = t.prob;
            return {{"type", "pauli"}, {"terms", terms}};
        }
        case ChannelKind::nonunital_pauli:
            if (!c.local_factors().empty()) {
                json f = json::array();
                for (const auto& l : c.local_factors()) f.push_back(channel_to_json(l));
                return {{"type", "product"}, {"factors", f}};
            }
            break;
        default: break;
    }
    json ops = json::array();
    for (const auto& k : c.kraus()) ops.push_back(matrix_to_json(k));
    return {{"type", "kraus"}, {"ops", ops}};
}

GateSequence named_target(const std::string& name) {
    if (name == "toffoli") return toffoli();
    if (name == "w_state") return w_state_prep();
    if (name == "qft") return qft(3);
    if (name.rfind("qft", 0) == 0 && name.size() > 3) {
        const int n = std::atoi(name.c_str() + 3);
        if (n < 1 || n > 6) throw ValidationError("qft size must be between 1 and 6");
        return qft(n);
    }
    throw ConfigError("unknown target '" + name + "'");
}

GateSequence parse_circuit(const json& j) {
    check_keys(j, {"qubits", "gates"}, "circuit");
    const int n = get_req<int>(j, "qubits", "circuit");
    if (n < 1 || n > 8) throw ValidationError("circuit qubit count must be between 1 and 8");
    GateSequence s(n);
    for (const auto& g : j.at("gates")) {
        check_keys(g, {"gate", "qubits", "angle", "angles", "matrix", "slots"}, "gate");
        const auto name = get_req<std::string>(g, "gate", "gate");
        const auto q = get_req<std::vector<int>>(g, "qubits", "gate " + name);
        for (int t : q) {
            if (t < 0 || t >= n) throw DimensionError("gate " + name + " touches qubit " + std::to_string(t));
        }
        auto arity = [&](std::size_t k) {
            if (q.size() != k) throw DimensionError("gate " + name + " takes " + std::to_string(k) + " qubit(s)");
        };
        const double angle = get_or<double>(g, "angle", 0.0);
        if (name == "h" || name == "x" || name == "y" || name == "z" || name == "s" || name == "sdg" || name == "t" ||
            name == "tdg") {
            arity(1);
            static const std::map<std::string, Matrix (*)()> fixed{{"h", gates::h},     {"x", gates::x},
                                                                   {"y", gates::y},     {"z", gates::z},
                                                                   {"s", gates::s},     {"sdg", gates::sdg},
                                                                   {"t", gates::t},     {"tdg", gates::tdg}};
            s.add(name, fixed.at(name)(), q);
        } else if (name == "rx" || name == "ry" || name == "rz" || name == "p") {
            arity(1);
            if (!g.contains("angle")) throw ConfigError("gate " + name + " needs an angle");
            const Matrix m = name == "rx" ? gates::rx(angle) : name == "ry" ? gates::ry(angle)
                           : name == "rz" ? gates::rz(angle) : gates::phase(angle);
            s.add(name, m, q);
        } else if (name == "yzy") {
            arity(1);
            const auto a = get_req<std::vector<double>>(g, "angles", "gate yzy");
            if (a.size() != 3) throw ConfigError("yzy takes three angles");
            s.add(name, gates::yzy(a[0], a[1], a[2]), q);
        } else if (name == "cx" || name == "cnot") {
            arity(2);
            s.cx(q[0], q[1]);
        } else if (name == "swap") {
            arity(2);
            s.add("swap", gates::swap(), q);
        } else if (name == "unitary") {
            const Matrix m = parse_matrix(g.at("matrix"));
            if (m.rows() != static_cast<Eigen::Index>(dim_for_qubits(static_cast<int>(q.size())))) {
                throw DimensionError("unitary size does not match its qubits");
            }
            if (!is_unitary(m)) throw ValidationError("gate matrix is not unitary");
            s.add("u", m, q);
        } else if (name == "param") {
            arity(1);
            const auto sl = get_req<std::vector<std::size_t>>(g, "slots", "gate param");
            if (sl.size() != 3) throw ConfigError("param gates take three slots");
            s.add_param({sl[0], sl[1], sl[2]}, q[0]);
        } else {
            throw ConfigError("unknown gate '" + name + "'");
        }
    }
    return s;
}

NoiseSchedule parse_noise(const json& j, int n, bool fumc) {
    const auto model = get_req<std::string>(j, "model", "noise");
    if (model == "none") {
        check_keys(j, {"model"}, "noise");
        return NoiseSchedule::none();
    }
    if (model == "hardware_like") {
        check_keys(j, {"model", "depol_1q", "depol_2q", "t1", "t2", "time_1q", "time_2q", "readout"}, "noise");
        HardwareParams p;
        p.depol_1q = get_or(j, "depol_1q", p.depol_1q);
        p.depol_2q = get_or(j, "depol_2q", p.depol_2q);
        p.t1 = get_or(j, "t1", p.t1);
        p.t2 = get_or(j, "t2", p.t2);
        p.time_1q = get_or(j, "time_1q", p.time_1q);
        p.time_2q = get_or(j, "time_2q", p.time_2q);
        if (j.contains("readout")) p.readout = parse_rows(j.at("readout")).front();
        NoiseSchedule s = hardware_like(p);
        validate_schedule(s, n, fumc, false);
        return s;
    }
    const bool strict = get_or<bool>(j, "strict", true);
    if (j.contains("random_instance")) {
        check_keys(j, {"model", "random_instance"}, "noise");
        const auto seed = get_or<std::uint64_t>(j, "random_instance", 0);
        if (model == "nm1") return random_nm1(n, seed);
        if (model == "nm2") return random_nm2(n, seed);
        if (model == "nm3") return random_nm3(n, seed);
        throw ConfigError("random instances exist for nm1, nm2 and nm3");
    }
    if (model == "nm1") {
        check_keys(j, {"model", "strict", "global_depol", "tau1_pauli", "tau2_pauli", "a_depol", "b_nupn", "gate_pre",
                       "gate_post", "readout"},
                   "noise");
        Nm1Params p;
        p.strict = strict;
        p.global_depol = get_or(j, "global_depol", 1.0);
        p.tau1_pauli = opt_channel(j, "tau1_pauli");
        p.tau2_pauli = opt_channel(j, "tau2_pauli");
        p.a_depol = get_or(j, "a_depol", 1.0);
        p.b_nupn = opt_channel(j, "b_nupn");
        p.gate_pre = opt_channel(j, "gate_pre");
        p.gate_post = opt_channel(j, "gate_post");
        p.readout = opt_readout(j);
        return noise_model_1(n, p);
    }
    if (model == "nm2") {
        check_keys(j, {"model", "strict", "global_depol", "tau1_pauli", "tau2_pauli", "a_nupn_tau1", "a_depol", "b_pauli",
                       "gate_pre", "gate_post", "readout"},
                   "noise");
        Nm2Params p;
        p.strict = strict;
        p.global_depol = get_or(j, "global_depol", 1.0);
        p.tau1_pauli = opt_channel(j, "tau1_pauli");
        p.tau2_pauli = opt_channel(j, "tau2_pauli");
        p.a_nupn_tau1 = opt_channel(j, "a_nupn_tau1");
        p.a_depol = get_or(j, "a_depol", 1.0);
        p.b_pauli = opt_channel(j, "b_pauli");
        p.gate_pre = opt_channel(j, "gate_pre");
        p.gate_post = opt_channel(j, "gate_post");
        p.readout = opt_readout(j);
        return noise_model_2(n, p);
    }
    if (model == "nm3") {
        check_keys(j, {"model", "strict", "global_depol", "tau1_pauli", "readout"}, "noise");
        Nm3Params p;
        p.strict = strict;
        p.global_depol = get_or(j, "global_depol", 1.0);
        p.tau1_pauli = opt_channel(j, "tau1_pauli");
        p.readout = opt_readout(j);
        return noise_model_3(n, p);
    }
    if (model == "custom") {
        check_keys(j, {"model", "strict", "continuous_global_depol", "tau1", "tau2", "during_w", "gate_noise", "readout"},
                   "noise");
        NoiseSchedule s;
        s.tag = ModelTag::custom;
        s.continuous_global_depol = get_or(j, "continuous_global_depol", 1.0);
        if (j.contains("tau1")) s.tau1 = parse_placements(j.at("tau1"));
        if (j.contains("tau2")) s.tau2 = parse_placements(j.at("tau2"));
        if (j.contains("during_w")) s.during_w = parse_placements(j.at("during_w"));
        if (j.contains("gate_noise")) {
            for (const auto& [cls, rule] : j.at("gate_noise").items()) {
                check_keys(rule, {"pre", "post"}, "gate noise rule");
                GateNoiseRule r;
                if (rule.contains("pre")) for (const auto& c : rule.at("pre")) r.pre.push_back(parse_channel(c));
                if (rule.contains("post")) for (const auto& c : rule.at("post")) r.post.push_back(parse_channel(c));
                s.gate_noise[cls] = std::move(r);
            }
        }
        s.readout = opt_readout(j);
        validate_schedule(s, n, fumc, strict);
        return s;
    }
    throw ConfigError("unknown noise model '" + model + "'");
}

ExperimentConfig parse_experiment(const json& j) {
    check_keys(j, {"name", "target", "approach", "cost", "ansatz", "noise", "optimizer", "init", "seed", "output_dir"},
               "experiment");
    ExperimentConfig c;
    c.raw = j;
    c.name = get_or<std::string>(j, "name", "experiment");
    if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
        throw ConfigError("experiment needs a non-negative integer seed");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
    c.output_dir = get_or<std::string>(j, "output_dir", "out");

    if (!j.contains("target")) throw ConfigError("missing 'target'");
    const auto& t = j.at("target");
    if (t.is_string()) {
        c.target_name = t.get<std::string>();
        c.target = named_target(c.target_name);
    } else {
        c.target_name = "inline";
        c.target = parse_circuit(t);
    }
    const int n = c.target.num_qubits();

    const auto approach = get_or<std::string>(j, "approach", "fumc");
    if (approach != "fumc" && approach != "fisc") throw ConfigError("approach must be fumc or fisc");
    c.fumc = approach == "fumc";

    const json cost = j.value("cost", json::object());
    check_keys(cost, {"q", "kind"}, "cost");
    if (cost.contains("kind")) {
        if (cost.contains("q")) throw ConfigError("give either a cost kind or a q weight");
        const CostKind k = cost_kind_from_string(cost.at("kind").get<std::string>());
        if (is_fumc(k) != c.fumc) throw ValidationError("cost kind does not belong to the chosen approach");
        c.q = (k == CostKind::hst || k == CostKind::let) ? 1.0 : 0.0;
    } else {
        c.q = get_or(cost, "q", 0.0);
    }
    if (!(c.q >= 0.0 && c.q <= 1.0)) throw ValidationError("q must lie in [0, 1]");

    const json an = j.value("ansatz", json{{"kind", "target_inspired"}});
    check_keys(an, {"kind", "layers", "flip_orientation", "circuit"}, "ansatz");
    c.ansatz.kind = ansatz_kind_from_string(get_req<std::string>(an, "kind", "ansatz"));
    c.ansatz.layers = get_or(an, "layers", 1);
    c.ansatz.flip_orientation = get_or(an, "flip_orientation", false);
    if (c.ansatz.kind == AnsatzKind::custom) {
        if (!an.contains("circuit")) throw ConfigError("custom ansatz needs a circuit");
    }

    c.noise = parse_noise(j.value("noise", json{{"model", "none"}}), n, c.fumc);

    const json op = j.value("optimizer", json::object());
    check_keys(op, {"method", "learning_rate", "lr_patience", "max_iterations", "exact", "shots", "monitor_shots",
                    "n_min", "n_min_raise_iteration", "n_min_raised", "budget", "window", "rel_tol", "lipschitz",
                    "running_decay", "regularizer"},
               "optimizer");
    const auto method = get_or<std::string>(op, "method", "adaptive");
    if (method != "adaptive" && method != "fixed") throw ConfigError("optimizer method must be adaptive or fixed");
    c.adaptive = method == "adaptive";
    auto& o = c.optimizer;
    o.learning_rate = get_or(op, "learning_rate", o.learning_rate);
    o.lr_patience = get_or(op, "lr_patience", o.lr_patience);
    o.max_iterations = get_or(op, "max_iterations", o.max_iterations);
    o.exact = get_or(op, "exact", o.exact);
    o.shots = get_or(op, "shots", o.shots);
    o.monitor_shots = get_or(op, "monitor_shots", o.monitor_shots);
    o.n_min = get_or(op, "n_min", o.n_min);
    if (op.contains("n_min_raise_iteration") && !op.at("n_min_raise_iteration").is_null()) {
        o.n_min_raise_iteration = op.at("n_min_raise_iteration").get<std::size_t>();
    }
    o.n_min_raised = get_or(op, "n_min_raised", o.n_min_raised);
    o.budget = get_or(op, "budget", o.budget);
    o.window = get_or(op, "window", o.window);
    o.rel_tol = get_or(op, "rel_tol", o.rel_tol);
    o.lipschitz = get_or(op, "lipschitz", o.lipschitz);
    o.running_decay = get_or(op, "running_decay", o.running_decay);
    o.regularizer = get_or(op, "regularizer", o.regularizer);
    o.seed = c.seed;
    o.validate(c.adaptive);

    const json in = j.value("init", json::object());
    check_keys(in, {"kind", "scale"}, "init");
    const auto ik = get_or<std::string>(in, "kind", "uniform");
    if (ik == "uniform") {
        c.init.kind = InitKind::uniform;
        c.init.scale = get_or(in, "scale", kPi);
    } else if (ik == "normal") {
        c.init.kind = InitKind::normal;
        c.init.scale = get_or(in, "scale", 0.1);
    } else if (ik == "zero") {
        c.init.kind = InitKind::zero;
        c.init.scale = 0.0;
    } else if (ik == "witness") {
        c.init.kind = InitKind::witness;
        c.init.scale = get_or(in, "scale", 0.0);
    } else {
        throw ConfigError("init kind must be uniform, normal, zero or witness");
    }
    if (!(c.init.scale >= 0.0)) throw ValidationError("init scale must be non-negative");
    if (c.init.kind == InitKind::witness && c.ansatz.kind != AnsatzKind::target_inspired) {
        throw ValidationError("witness init needs the target-inspired ansatz");
    }
    return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_experiment(j);
}

Ansatz build_ansatz(const ExperimentConfig& c) {
    switch (c.ansatz.kind) {
        case AnsatzKind::alternating_pair:
            return alternating_pair(c.target.num_qubits(), c.ansatz.layers, c.ansatz.flip_orientation);
        case AnsatzKind::target_inspired: return target_inspired(c.target);
        case AnsatzKind::custom: {
            GateSequence t = parse_circuit(c.raw.at("ansatz").at("circuit"));
            if (t.num_qubits() != c.target.num_qubits()) throw DimensionError("ansatz and target sizes differ");
            return custom_ansatz(std::move(t));
        }
    }
    throw ValidationError("unknown ansatz kind");
}

CircuitObjective build_objective(const ExperimentConfig& c, const Ansatz& a, const NoiseSchedule& noise) {
    const CostKind global = c.fumc ? CostKind::hst : CostKind::let;
    const CostKind local = c.fumc ? CostKind::lhst : CostKind::llet;
    std::vector<CircuitObjective::Term> terms;
    if (c.q > 0.0) terms.push_back({c.q, std::make_shared<const CostCircuit>(global, c.target, a.templ, noise)});
    if (c.q < 1.0) terms.push_back({1.0 - c.q, std::make_shared<const CostCircuit>(local, c.target, a.templ, noise)});
    return CircuitObjective(std::move(terms));
}

std::vector<double> initial_parameters(const InitSpec& init, const Ansatz& a, std::uint64_t seed) {
    auto rng = make_stream(seed, {tag(StreamTag::init)});
    std::vector<double> x(a.param_count, 0.0);
    switch (init.kind) {
        case InitKind::zero: break;
        case InitKind::uniform: {
            std::uniform_real_distribution<double> d(-init.scale, init.scale);
            for (auto& v : x) v = d(rng);
            break;
        }
        case InitKind::normal: {
            std::normal_distribution<double> d(0.0, init.scale);
            for (auto& v : x) v = d(rng);
            break;
        }
        case InitKind::witness: {
            if (a.witness.size() != x.size()) throw ValidationError("ansatz has no witness parameters");
            std::normal_distribution<double> d(0.0, 1.0);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = a.witness[i] + init.scale * d(rng);
            break;
        }
    }
    return x;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const OptimizerTrace& trace) {
    os << "iteration,noisy_cost,noiseless_cost_at_params,shots_this_iter,cumulative_shots";
    const std::size_t p = trace.records.empty() ? 0 : trace.records.front().params.size();
    for (std::size_t i = 0; i < p; ++i) os << ",theta_" << i;
    os << '\n';
    for (const auto& r : trace.records) {
        os << r.iteration << ',' << fmt(r.noisy_cost) << ',' << (r.noiseless_cost ? fmt(*r.noiseless_cost) : "")
           << ',' << r.shots << ',' << r.cumulative_shots;
        for (double v : r.params) os << ',' << fmt(v);
        os << '\n';
    }
}

json summary_json(const ExperimentConfig& c, const CompileResult& r) {
    const auto& last = r.trace.records.back();
    return {{"name", c.name},
            {"seed", c.seed},
            {"target", c.target_name},
            {"approach", c.fumc ? "fumc" : "fisc"},
            {"q", c.q},
            {"param_count", r.param_count},
            {"iterations", last.iteration},
            {"total_shots", last.cumulative_shots},
            {"final_params", last.params},
            {"final_noisy_cost", r.final_noisy_cost},
            {"final_noiseless_cost", r.final_noiseless_cost},
            {"termination", r.trace.termination},
            {"wall_time_s", r.wall_seconds},
            {"config", c.raw}};
}

CompileResult run_compile(const ExperimentConfig& c, bool write) {
    const auto t0 = std::chrono::steady_clock::now();
    const Ansatz a = build_ansatz(c);
    const CircuitObjective noisy = build_objective(c, a, c.noise);
    const CircuitObjective clean = build_objective(c, a, NoiseSchedule::none());
    TrainingHooks hooks;
    hooks.noiseless = [&](std::span<const double> p) { return clean.exact_cost(p); };
    std::vector<double> x0 = initial_parameters(c.init, a, c.seed);

    CompileResult r;
    r.param_count = a.param_count;
    r.trace = c.adaptive ? adaptive_shot_descent(noisy, std::move(x0), c.optimizer, hooks)
                         : gradient_descent(noisy, std::move(x0), c.optimizer, hooks);
    const auto& fin = r.trace.final_params();
    r.final_noisy_cost = noisy.exact_cost(fin);
    r.final_noiseless_cost = clean.exact_cost(fin);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (write) {
        std::filesystem::create_directories(c.output_dir);
        std::ofstream csv(c.output_dir / "trace.csv");
        write_trace_csv(csv, r.trace);
        std::ofstream js(c.output_dir / "summary.json");
        js << summary_json(c, r).dump(2) << '\n';
        if (!csv || !js) throw Error("failed to write artifacts to " + c.output_dir.string());
    }
    return r;
}

// ---- verification suites

namespace {

double uni(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

struct Tally {
    bool pass = true;
    json checks = json::array();
    void add(json check, bool ok) {
        check["pass"] = ok;
        pass = pass && ok;
        checks.push_back(std::move(check));
    }
};

json finish(const std::string& suite, Tally& t, json extra = json::object()) {
    extra["suite"] = suite;
    extra["pass"] = t.pass;
    extra["checks"] = std::move(t.checks);
    return extra;
}

// Depolarizing layers at tau1, tau2, inside W and after the entangler, with
// a unital Pauli layer in W so that the clean part is not trivial.
NoiseSchedule layered_depolarizing(int n, int reg, std::mt19937_64& rng) {
    NoiseSchedule s;
    s.tag = ModelTag::custom;
    s.continuous_global_depol = uni(rng, 0.9, 0.99);
    s.tau1.push_back({depolarizing(uni(rng, 0.8, 0.99), reg), Subsystem::ab});
    s.tau2.push_back({depolarizing(uni(rng, 0.8, 0.99), reg), Subsystem::ab});
    s.during_w.push_back({depolarizing(uni(rng, 0.9, 0.99), reg), Subsystem::ab});
    s.during_w.push_back({random_pauli_channel(n, rng()), Subsystem::a});
    s.gate_noise[kEntanglerClass].post.push_back(depolarizing(uni(rng, 0.9, 0.99), reg));
    return s;
}

json suite_affine(const json& o) {
    const auto seed = get_or<std::uint64_t>(o, "seed", 0);
    const auto instances = get_or<std::size_t>(o, "instances", 5);
    const double tol = get_or(o, "tol", 1e-10);
    Tally t;
    for (int n : {1, 2}) {
        for (std::size_t i = 0; i < instances; ++i) {
            auto rng = make_stream(seed, {tag(StreamTag::verifier), 31, static_cast<std::uint64_t>(n), i});
            const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
            const GateSequence u = as_sequence(haar_unitary(d, rng), "u");
            const GateSequence v = as_sequence(haar_unitary(d, rng), "v");
            for (CostKind k : {CostKind::hst, CostKind::lhst, CostKind::let, CostKind::llet}) {
                const int reg = is_fumc(k) ? 2 * n : n;
                const NoiseSchedule s = layered_depolarizing(n, reg, rng);
                const AffineReport r = check_depolarizing_affine(k, u, v, s, tol);
                json j = to_json(r);
                j["kind"] = to_string(k);
                j["n"] = n;
                j["register_dim"] = dim_for_qubits(reg);
                t.add(std::move(j), r.pass);
            }
        }
    }
    return finish("affine", t);
}

json suite_strong(int theorem, const json& o) {
    const auto seed = get_or<std::uint64_t>(o, "seed", 0);
    const auto instances = get_or<std::size_t>(o, "instances", 20);
    const int n = get_or(o, "n", 2);
    StrongOprOptions opt;
    opt.trials = get_or(o, "trials", opt.trials);
    opt.slices = get_or(o, "slices", opt.slices);
    opt.tol = get_or(o, "tol", opt.tol);
    opt.angle_tol = get_or(o, "angle_tol", opt.angle_tol);
    Tally t;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < instances; ++i) {
        const std::uint64_t inst = derive_seed(seed, {static_cast<std::uint64_t>(theorem), i});
        auto rng = make_stream(inst, {tag(StreamTag::verifier), 32});
        const Matrix u = haar_unitary(static_cast<Eigen::Index>(dim_for_qubits(n)), rng);
        const NoiseSchedule noise = theorem == 1 ? random_nm1(n, inst) : random_nm2(n, inst);
        opt.seed = inst;
        const OprReport r = check_strong_opr_fumc(theorem, u, noise, opt);
        worst = std::min(worst, r.worst_margin);
        json j = to_json(r);
        j["instance"] = i;
        t.add(std::move(j), r.consistent());
    }
    return finish("thm" + std::to_string(theorem), t, {{"worst_margin", worst}});
}

json suite_thm3(const json& o) {
    const auto seed = get_or<std::uint64_t>(o, "seed", 0);
    const auto instances = get_or<std::size_t>(o, "instances", 20);
    const auto ns = get_or<std::vector<int>>(o, "n", {1, 2});
    WeakOprOptions opt;
    opt.tol = get_or(o, "tol", opt.tol);
    opt.member_tol = get_or(o, "member_tol", opt.member_tol);
    opt.samples = get_or(o, "samples", opt.samples);
    Tally t;
    for (int n : ns) {
        if (n < 1 || n > 2) throw ValidationError("exhaustive permutation check runs for n = 1 or 2");
        for (std::size_t i = 0; i < instances; ++i) {
            const std::uint64_t inst = derive_seed(seed, {3, static_cast<std::uint64_t>(n), i});
            opt.seed = inst;
            const OprReport r = check_weak_opr_fisc(n, random_nm3(n, inst), opt);
            json j = to_json(r);
            j["n"] = n;
            j["instance"] = i;
            t.add(std::move(j), r.consistent());
        }
    }
    return finish("thm3", t);
}

Matrix random_clifford(int n, std::mt19937_64& rng, int depth = 20) {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    Matrix c = Matrix::Identity(d, d);
    std::uniform_int_distribution<int> pick(0, n > 1 ? 2 : 1);
    std::uniform_int_distribution<int> qubit(0, n - 1);
    for (int k = 0; k < depth; ++k) {
        const int g = pick(rng);
        const int a = qubit(rng);
        if (g == 2) {
            int b = qubit(rng);
            if (b == a) b = (a + 1) % n;
            const std::vector<int> q{a, b};
            c = embed(gates::cnot(), q, n) * c;
        } else {
            const std::vector<int> q{a};
            c = embed(g == 0 ? gates::h() : gates::s(), q, n) * c;
        }
    }
    return c;
}

json suite_corollaries(const json& o) {
    const auto seed = get_or<std::uint64_t>(o, "seed", 0);
    const auto pairs = get_or<std::size_t>(o, "pairs", 50);
    const auto ricochets = get_or<std::size_t>(o, "ricochet", 20);
    const double tol = get_or(o, "tol", 1e-12);
    Tally t;
    double worst = 0.0;
    auto record = [&](const std::string& mode, std::size_t i, const CorollaryReport& r, bool expect) {
        worst = expect ? std::max(worst, r.residual) : worst;
        t.add({{"mode", mode}, {"case", i}, {"residual", r.residual}, {"expected_pass", expect}}, r.pass == expect);
    };
    for (std::size_t i = 0; i < pairs; ++i) {
        auto rng = make_stream(seed, {tag(StreamTag::verifier), 41, i});
        CorollaryCase c;
        c.mode = CorollaryMode::clifford;
        const std::size_t layers = 1 + i % 3;
        for (std::size_t l = 0; l < layers; ++l) {
            c.w_layers.push_back(random_clifford(2, rng));
            c.channels.push_back(random_pauli_channel(2, rng()));
        }
        record("clifford", i, check_corollary_condition(c, tol), true);
    }
    for (std::size_t i = 0; i < pairs; ++i) {
        auto rng = make_stream(seed, {tag(StreamTag::verifier), 42, i});
        CorollaryCase c;
        c.mode = CorollaryMode::tensor_depol;
        c.split = 1 + static_cast<int>(i % 2);
        const int n = 3;
        for (int l = 0; l < 2; ++l) {
            const Matrix w1 = haar_unitary(static_cast<Eigen::Index>(dim_for_qubits(c.split)), rng);
            const Matrix w2 = haar_unitary(static_cast<Eigen::Index>(dim_for_qubits(n - c.split)), rng);
            c.w_layers.push_back(kron(w1, w2));
            c.channels.push_back(depolarizing(uni(rng, 0.8, 0.99), c.split));
            c.channels.push_back(depolarizing(uni(rng, 0.8, 0.99), n - c.split));
        }
        record("tensor_depol", i, check_corollary_condition(c, tol), true);
    }
    for (std::size_t i = 0; i < ricochets; ++i) {
        auto rng = make_stream(seed, {tag(StreamTag::verifier), 43, i});
        std::normal_distribution<double> g(0.0, 1.0);
        const auto d = static_cast<Eigen::Index>(dim_for_qubits(1 + static_cast<int>(i % 3)));
        Matrix m(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index k = 0; k < d; ++k) m(r, k) = cplx(g(rng), g(rng));
        }
        CorollaryCase c;
        c.mode = CorollaryMode::ricochet;
        c.w_layers.push_back(m);
        record("ricochet", i, check_corollary_condition(c, tol), true);
    }
    // Pauli noise does not survive a generic rotation: the clifford mode must refuse it.
    {
        auto rng = make_stream(seed, {tag(StreamTag::verifier), 44});
        CorollaryCase c;
        c.mode = CorollaryMode::clifford;
        c.w_layers.push_back(haar_unitary(4, rng));
        c.channels.push_back(random_pauli_channel(2, rng()));
        record("clifford_non_clifford_layer", 0, check_corollary_condition(c, tol), false);
        c.mode = CorollaryMode::pauli_conj;
        const CorollaryReport r = check_corollary_condition(c, tol);
        t.add({{"mode", "pauli_conj_non_clifford_layer"}, {"residual", r.residual}, {"expected_pass", false}},
              !r.pass && r.residual > 1e-6);
    }
    return finish("corollaries", t, {{"worst_residual", worst}});
}

json suite_warmup(const json& o) {
    const auto seed = get_or<std::uint64_t>(o, "seed", 0);
    const auto instances = get_or<std::size_t>(o, "instances", 20);
    const double tol = get_or(o, "tol", 1e-10);
    std::optional<std::vector<ReadoutRow>> fixed_rows;
    if (o.contains("rows")) fixed_rows = parse_rows(o.at("rows"));
    Tally t;
    for (std::size_t i = 0; i < instances; ++i) {
        auto rng = make_stream(seed, {tag(StreamTag::verifier), 51, i});
        const int n = 2 + static_cast<int>(i % 2);
        std::vector<LocalTerm> terms;
        for (int q = 0; q < n; ++q) terms.push_back({uni(rng, 0.1, 1.0), haar_unitary(2, rng)});
        std::vector<ReadoutRow> rows;
        if (fixed_rows) {
            rows = *fixed_rows;
        } else {
            for (int q = 0; q < n; ++q) rows.push_back({uni(rng, 0.6, 0.99), uni(rng, 0.6, 0.99)});
        }
        const WarmupReport r = vqe_warmup_check(terms, rows, tol);
        json j = to_json(r);
        j["n"] = n;
        j["instance"] = i;
        t.add(std::move(j), r.pass);
    }
    return finish("warmup", t);
}

json suite_sandwiches(const json& o) {
    const auto seed = get_or<std::uint64_t>(o, "seed", 0);
    const auto trials = get_or<std::size_t>(o, "trials", 200);
    const double slack = get_or(o, "slack", -1e-12);
    Tally t;
    const SandwichReport r = check_cost_sandwiches(trials, seed, slack);
    t.add(to_json(r), r.pass);
    return finish("sandwiches", t);
}

}  // namespace

VerifyResult run_verify(const std::string& suite, const json& opts) {
    if (!opts.is_object()) throw ConfigError("verify options must be an object");
    auto section = [&](const std::string& name) {
        // options may be flat or keyed by suite name
        if (opts.contains(name) && opts.at(name).is_object()) return opts.at(name);
        json flat = json::object();
        for (const auto& [k, v] : opts.items()) {
            if (std::find(kVerifySuites.begin(), kVerifySuites.end(), k) == kVerifySuites.end()) flat[k] = v;
        }
        return flat;
    };
    auto one = [&](const std::string& name) -> json {
        const json o = section(name);
        if (name == "affine") return suite_affine(o);
        if (name == "thm1") return suite_strong(1, o);
        if (name == "thm2") return suite_strong(2, o);
        if (name == "thm3") return suite_thm3(o);
        if (name == "corollaries") return suite_corollaries(o);
        if (name == "warmup") return suite_warmup(o);
        if (name == "sandwiches") return suite_sandwiches(o);
        throw ConfigError("unknown verify suite '" + name + "'");
    };
    VerifyResult r;
    if (suite == "all") {
        r.pass = true;
        r.report = {{"suite", "all"}, {"suites", json::object()}};
        for (const auto& s : kVerifySuites) {
            json rep = one(s);
            r.pass = r.pass && rep.at("pass").get<bool>();
            r.report["suites"][s] = std::move(rep);
        }
        r.report["pass"] = r.pass;
        return r;
    }
    r.report = one(suite);
    r.pass = r.report.at("pass").get<bool>();
    return r;
}

unsigned worker_count() {
    const char* env = std::getenv("VQCLAB_WORKERS");
    if (env == nullptr) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 1;
    return static_cast<unsigned>(std::min(v, 256L));
}

}  // namespace vqc
