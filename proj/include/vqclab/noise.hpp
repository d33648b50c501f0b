#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vqclab/channels.hpp"

namespace vqc {

enum class ModelTag { nm1, nm2, nm3, hardware, custom };

std::string to_string(ModelTag tag);
ModelTag model_tag_from_string(const std::string& s);

// Where a channel acts inside the cost register. For the n-qubit registers
// of the fixed-input tests, `a` and `ab` both mean the whole register.
enum class Subsystem { a, b, ab };

std::string to_string(Subsystem s);

struct Placement {
    Channel channel;
    Subsystem where;
};

// Noise around one gate. A channel whose arity equals the gate arity acts on
// the touched qubits, a 1-qubit channel on a multi-qubit gate acts on each
// touched qubit, and a channel spanning the register acts globally.
struct GateNoiseRule {
    std::vector<Channel> pre;
    std::vector<Channel> post;
};

// Gate-class keys: "entangler" for gates of E and its inverse, otherwise
// "1q", "2q", "3q" by gate arity.
inline const std::string kEntanglerClass = "entangler";
std::string gate_class_for_arity(int arity);

struct NoiseSchedule {
    ModelTag tag = ModelTag::custom;
    // Global depolarizing layer after every gate step, weight on the state.
    double continuous_global_depol = 1.0;
    std::vector<Placement> tau1;
    std::vector<Placement> tau2;
    // Applied after each gate step of V^dag U.
    std::vector<Placement> during_w;
    std::map<std::string, GateNoiseRule> gate_noise;
    // One row per measured qubit in register order, or a single row for all.
    std::optional<NoisyPovm> readout;

    static NoiseSchedule none() { return NoiseSchedule{}; }
    bool is_noiseless() const;
    bool has_nonunital() const;
    // Schedule with the global depolarizing layers and depolarizing placements removed.
    NoiseSchedule without_global_depolarizing() const;
};

// Throws ValidationError when the schedule does not match its tag, or when a
// channel arity disagrees with its slot, for a cost register built on n qubits.
void validate_schedule(const NoiseSchedule& s, int n, bool fumc, bool strict);

struct Nm1Params {
    double global_depol = 1.0;
    std::optional<Channel> tau1_pauli;  // arity 2n
    std::optional<Channel> tau2_pauli;  // arity 2n
    double a_depol = 1.0;               // per step on A
    std::optional<Channel> b_nupn;      // arity n, per step on B
    std::optional<Channel> gate_pre;    // arity 2n, around every entangler gate
    std::optional<Channel> gate_post;
    std::optional<NoisyPovm> readout;   // identity readout when absent
    bool strict = true;
};

struct Nm2Params {
    double global_depol = 1.0;
    std::optional<Channel> tau1_pauli;
    std::optional<Channel> tau2_pauli;
    std::optional<Channel> a_nupn_tau1;  // arity n, once at tau1 after the Pauli layer
    double a_depol = 1.0;
    std::optional<Channel> b_pauli;      // arity n, per step on B
    std::optional<Channel> gate_pre;
    std::optional<Channel> gate_post;
    std::optional<NoisyPovm> readout;
    bool strict = true;
};

struct Nm3Params {
    double global_depol = 1.0;
    std::optional<Channel> tau1_pauli;  // arity n
    std::optional<NoisyPovm> readout;
    bool strict = true;
};

struct HardwareParams {
    double depol_1q = 1e-3;  // error rate: state weight is 1 - error
    double depol_2q = 2e-2;
    double t1 = 50e-6;
    double t2 = 70e-6;
    double time_1q = 100e-9;
    double time_2q = 300e-9;
    ReadoutRow readout{0.97, 0.97};
};

NoiseSchedule noise_model_1(int n, const Nm1Params& p);
NoiseSchedule noise_model_2(int n, const Nm2Params& p);
NoiseSchedule noise_model_3(int n, const Nm3Params& p);
NoiseSchedule hardware_like(const HardwareParams& p);

}  // namespace vqc
