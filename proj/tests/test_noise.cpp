#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "vqclab/ansatz.hpp"
#include "vqclab/costs.hpp"
#include "vqclab/rng.hpp"
#include "vqclab/targets.hpp"
#include "vqclab/verifier.hpp"

using namespace vqc;

namespace {

GateSequence seq(const Matrix& m) { return as_sequence(m); }

Matrix haar(int n, std::mt19937_64& rng) { return haar_unitary(static_cast<Eigen::Index>(dim_for_qubits(n)), rng); }

double fid(CostKind k, const GateSequence& u, const GateSequence& v, const NoiseSchedule& s) {
    return CostCircuit(k, u, v, s).fidelity();
}

PauliString w(const char* s) { return PauliString::parse(s); }

}  // namespace

TEST_SUITE("noise_models") {

TEST_CASE("identity components leave costs unchanged") {
    auto rng = make_stream(51, {1});
    const GateSequence u = seq(haar(2, rng));
    const GateSequence v = seq(haar(2, rng));
    const auto nm1 = noise_model_1(2, Nm1Params{});
    const auto nm2 = noise_model_2(2, Nm2Params{});
    const auto nm3 = noise_model_3(2, Nm3Params{});
    for (CostKind k : {CostKind::hst, CostKind::lhst}) {
        const double clean = fid(k, u, v, NoiseSchedule::none());
        CHECK(std::abs(fid(k, u, v, nm1) - clean) <= 1e-12);
        CHECK(std::abs(fid(k, u, v, nm2) - clean) <= 1e-12);
    }
    for (CostKind k : {CostKind::let, CostKind::llet}) {
        CHECK(std::abs(fid(k, u, v, nm3) - fid(k, u, v, NoiseSchedule::none())) <= 1e-12);
    }
    HardwareParams off;
    off.depol_1q = off.depol_2q = 0.0;
    off.t1 = off.t2 = std::numeric_limits<double>::infinity();
    off.readout = {1.0, 1.0};
    const GateSequence t = toffoli();
    auto angles = make_stream(52, {1});
    const Ansatz a = target_inspired(t);
    std::vector<double> x(a.param_count);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& e : x) e = d(angles);
    const CostCircuit noisy(CostKind::lhst, t, a.templ, hardware_like(off));
    const CostCircuit clean(CostKind::lhst, t, a.templ, NoiseSchedule::none());
    CHECK(std::abs(noisy.fidelity(x) - clean.fidelity(x)) <= 1e-12);
}

TEST_CASE("continuous depolarizing gives the affine law") {
    auto rng = make_stream(53, {1});
    for (int n = 1; n <= 2; ++n) {
        const GateSequence u = seq(haar(n, rng));
        const GateSequence v = seq(haar(n, rng));
        NoiseSchedule s;
        s.continuous_global_depol = 0.93;
        const CostCircuit c(CostKind::hst, u, v, s);
        const auto k = static_cast<double>(c.depol_layers().front());
        CHECK(k >= 1.0);
        const double pt = std::pow(0.93, k);
        const double clean = fid(CostKind::hst, u, v, NoiseSchedule::none());
        CHECK(std::abs(c.fidelity() - (pt * clean + (1 - pt) / std::pow(2.0, 2 * n))) <= 1e-12);

        Nm3Params p;
        p.global_depol = 0.93;
        const CostCircuit l(CostKind::let, u, v, noise_model_3(n, p));
        const double pl = std::pow(0.93, static_cast<double>(l.depol_layers().front()));
        const double g = fid(CostKind::let, u, v, NoiseSchedule::none());
        CHECK(std::abs(l.fidelity() - (pl * g + (1 - pl) / std::pow(2.0, n))) <= 1e-12);
    }
}

TEST_CASE("random strict NM1 instance keeps U optimal") {
    auto rng = make_stream(54, {1});
    const Matrix u = haar(2, rng);
    const NoiseSchedule s = random_nm1(2, 7);
    const double at_u = fid(CostKind::hst, seq(u), seq(u), s);
    for (int t = 0; t < 200; ++t) CHECK(fid(CostKind::hst, seq(u), seq(haar(2, rng)), s) <= at_u + 1e-10);
}

TEST_CASE("NM2 with damping on A at tau1") {
    Nm2Params p;
    p.a_nupn_tau1 = nonunital_pauli_from_locals({amplitude_damping(0.2)});
    const NoiseSchedule s = noise_model_2(1, p);
    auto rng = make_stream(55, {1});
    const Matrix u = haar(1, rng);
    const double at_u = fid(CostKind::hst, seq(u), seq(u), s);
    for (int t = 0; t < 200; ++t) CHECK(fid(CostKind::hst, seq(u), seq(haar(1, rng)), s) <= at_u + 1e-10);

    NoiseSchedule moved = s;
    moved.during_w.push_back({nonunital_pauli_from_locals({amplitude_damping(0.2)}), Subsystem::a});
    CHECK_THROWS_AS(validate_schedule(moved, 1, true, true), ValidationError);
}

TEST_CASE("NM3 rearrangement bound") {
    Nm3Params p;
    p.tau1_pauli = pauli_channel({{w("I"), 0.7}, {w("X"), 0.3}}, true);
    p.readout = measurement_noise({{0.95, 0.95}});
    const NoiseSchedule s = noise_model_3(1, p);
    auto rng = make_stream(56, {1});
    const Matrix u = haar(1, rng);
    const double bound = 0.95 * 0.7 + 0.05 * 0.3;
    CHECK(std::abs(fid(CostKind::let, seq(u), seq(u), s) - bound) <= 1e-12);
    for (int t = 0; t < 100; ++t) CHECK(fid(CostKind::let, seq(u), seq(haar(1, rng)), s) <= bound + 1e-12);
}

TEST_CASE("tag validation") {
    Nm1Params bad;
    bad.tau1_pauli = depolarizing(0.9, 1);
    CHECK_THROWS_AS(noise_model_1(2, bad), DimensionError);
    Nm1Params neg;
    neg.tau1_pauli = pauli_channel({{w("II"), 0.2}, {w("XI"), 0.8}});
    CHECK_THROWS_AS(noise_model_1(1, neg), ValidationError);
    neg.strict = false;
    CHECK_NOTHROW(noise_model_1(1, neg));
    CHECK_THROWS_AS(validate_schedule(noise_model_3(1, {}), 1, true, true), ValidationError);
    CHECK_THROWS_AS(validate_schedule(noise_model_1(1, {}), 1, false, true), ValidationError);
    CHECK(model_tag_from_string(to_string(ModelTag::nm2)) == ModelTag::nm2);
}

TEST_CASE("hardware defaults") {
    const HardwareParams d;
    CHECK(d.depol_1q == 1e-3);
    CHECK(d.depol_2q == 2e-2);
    CHECK(d.t1 == 50e-6);
    CHECK(d.t2 == 70e-6);
    CHECK(d.time_1q == 100e-9);
    CHECK(d.time_2q == 300e-9);
    CHECK(d.readout.p00 == 0.97);
    CHECK(d.readout.p11 == 0.97);
    const NoiseSchedule s = hardware_like(d);
    CHECK_NOTHROW(validate_schedule(s, 3, true, false));
    GateSequence ident(2);
    ident.h(0).h(0);
    CHECK(hst_cost(ident, ident, s).value > 0.0);
    CHECK(let_cost(ident, ident, s).value > 0.0);
}

TEST_CASE("schedules keep states physical") {
    auto rng = make_stream(57, {1});
    const GateSequence u = seq(haar(2, rng));
    const GateSequence v = seq(haar(2, rng));
    for (const auto& s : {random_nm1(2, 1), random_nm2(2, 2), hardware_like({})}) {
        const CostCircuit c(CostKind::lhst, u, v, s);
        for (std::size_t b = 0; b < c.branch_count(); ++b) {
            const Matrix rho = c.final_state({}, b);
            CHECK_NOTHROW(DensityState::from_matrix(rho).validate());
        }
    }
}
}
