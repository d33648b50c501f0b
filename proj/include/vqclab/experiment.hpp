#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vqclab/ansatz.hpp"
#include "vqclab/optimizer.hpp"

namespace vqc {

// Malformed or incomplete configuration (exit code 2).
class ConfigError : public Error {
 public:
    using Error::Error;
};

// witness: the target-inspired witness plus normal noise of width scale.
enum class InitKind { uniform, normal, zero, witness };

struct InitSpec {
    InitKind kind = InitKind::uniform;
    double scale = kPi;  // half-width for uniform, standard deviation for normal
};

struct AnsatzSpec {
    AnsatzKind kind = AnsatzKind::target_inspired;
    int layers = 1;
    bool flip_orientation = false;
};

struct ExperimentConfig {
    nlohmann::json raw;  // as read, for the summary echo
    std::string name;
    std::string target_name;
    GateSequence target{1};
    bool fumc = true;
    double q = 0.0;  // weight of the global cost
    AnsatzSpec ansatz;
    NoiseSchedule noise;
    bool adaptive = true;
    OptimizerConfig optimizer;
    InitSpec init;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
};

ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& file);

// Channel specs, e.g. {"type": "depolarizing", "p": 0.99, "arity": 2}.
Channel parse_channel(const nlohmann::json& j);
nlohmann::json channel_to_json(const Channel& c);

GateSequence parse_circuit(const nlohmann::json& j);
GateSequence named_target(const std::string& name);
NoiseSchedule parse_noise(const nlohmann::json& j, int n, bool fumc);

Ansatz build_ansatz(const ExperimentConfig& c);
// Weighted objective q C_global + (1 - q) C_local on the given schedule.
CircuitObjective build_objective(const ExperimentConfig& c, const Ansatz& a, const NoiseSchedule& noise);
std::vector<double> initial_parameters(const InitSpec& init, const Ansatz& a, std::uint64_t seed);

struct CompileResult {
    OptimizerTrace trace;
    std::size_t param_count = 0;
    double final_noisy_cost = 0.0;
    double final_noiseless_cost = 0.0;
    double wall_seconds = 0.0;
};

// Trains the ansatz; writes trace.csv and summary.json into the output
// directory when `write` is set.
CompileResult run_compile(const ExperimentConfig& c, bool write = true);

void write_trace_csv(std::ostream& os, const OptimizerTrace& trace);
nlohmann::json summary_json(const ExperimentConfig& c, const CompileResult& r);

struct VerifyResult {
    bool pass = false;
    nlohmann::json report;
};

inline const std::vector<std::string> kVerifySuites{"affine", "thm1",   "thm2",      "thm3",
                                                    "corollaries", "warmup", "sandwiches"};

// One suite or "all". Options are read from `opts` with per-suite defaults.
VerifyResult run_verify(const std::string& suite, const nlohmann::json& opts = nlohmann::json::object());

// Worker count from VQCLAB_WORKERS, at least 1.
unsigned worker_count();

}  // namespace vqc
