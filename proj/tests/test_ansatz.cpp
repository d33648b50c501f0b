#include "doctest.h"
#include "helpers.hpp"
#include "vqclab/ansatz.hpp"
#include "vqclab/costs.hpp"
#include "vqclab/rng.hpp"
#include "vqclab/targets.hpp"

using namespace vqc;

namespace {

double phase_free_distance(const Matrix& a, const Matrix& b) {
    const cplx ov = (a.adjoint() * b).trace();
    const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
    return test::max_abs(a * ph - b);
}

std::vector<double> random_angles(std::size_t k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-kPi, kPi);
    std::vector<double> x(k);
    for (auto& v : x) v = d(rng);
    return x;
}

}  // namespace

TEST_SUITE("ansatz") {

TEST_CASE("single-qubit gate") {
    CHECK(test::max_abs(single_qubit_gate(0, 0, 0) - Matrix::Identity(2, 2)) <= 1e-15);
    CHECK(test::max_abs(single_qubit_gate(0, 0.7, 0) - gates::rz(0.7)) <= 1e-15);
    const double b = 2 * std::acos(std::sqrt(1.0 / 3.0));
    CHECK(test::max_abs(single_qubit_gate(b, 0, 0) - gates::ry(b)) <= 1e-15);
    auto rng = make_stream(61, {1});
    for (int t = 0; t < 20; ++t) {
        const Matrix u = haar_unitary(2, rng);
        const auto a = yzy_angles(u);
        CHECK(phase_free_distance(single_qubit_gate(a[0], a[1], a[2]), u) <= 1e-10);
    }
}

TEST_CASE("dressed CNOT") {
    const GateSequence d = dressed_cnot(2, 0, 1, 0);
    CHECK(d.param_count() == kDressedCnotParams);
    const std::vector<double> zero(12, 0.0);
    CHECK(test::max_abs(d.unitary(zero) - gates::cnot()) <= 1e-15);
    auto rng = make_stream(62, {1});
    const Ansatz a = custom_ansatz(d);
    const auto x = random_angles(12, rng);
    const GateSequence bound = bind_ansatz(a, x);
    const auto back = extract_parameters(a, bound);
    CHECK(test::max_abs(bind_ansatz(a, back).unitary() - bound.unitary()) <= 1e-10);
}

TEST_CASE("alternating pair shapes") {
    const Ansatz a3 = alternating_pair(3, 2);
    CHECK(a3.dressed_cnots == 6);
    CHECK(a3.param_count == 72);
    CHECK(a3.templ.count("cx") == 6);
    const Ansatz a2 = alternating_pair(2, 1);
    CHECK(a2.dressed_cnots == 1);
    CHECK(a2.param_count == 12);
    const std::vector<double> zero(24, 0.0);
    CHECK(test::max_abs(bind_ansatz(alternating_pair(2, 2), zero).unitary() - Matrix::Identity(4, 4)) <= 1e-15);
    CHECK_THROWS_AS(alternating_pair(1, 1), DimensionError);
    CHECK_THROWS_AS(alternating_pair(3, 0), ValidationError);
}

TEST_CASE("zero angles give the bare CNOT product") {
    const Ansatz a = alternating_pair(3, 2, true);
    const std::vector<double> zero(a.param_count, 0.0);
    GateSequence bare(3);
    for (const auto& op : a.templ.ops()) {
        if (op.name == "cx") bare.cx(op.targets[0], op.targets[1]);
    }
    CHECK(test::max_abs(bind_ansatz(a, zero).unitary() - bare.unitary()) <= 1e-15);
}

TEST_CASE("bound ansatz is unitary and slots are local") {
    auto rng = make_stream(63, {1});
    const Ansatz a = alternating_pair(3, 1);
    const auto x = random_angles(a.param_count, rng);
    const GateSequence b0 = bind_ansatz(a, x);
    CHECK(is_unitary(b0.unitary()));
    auto y = x;
    y[5] += 0.3;
    const GateSequence b1 = bind_ansatz(a, y);
    for (std::size_t i = 0; i < a.templ.size(); ++i) {
        const auto& op = a.templ.ops()[i];
        const bool reads = op.slots && ((*op.slots)[0] == 5 || (*op.slots)[1] == 5 || (*op.slots)[2] == 5);
        const double diff = test::max_abs(b0.ops()[i].matrix - b1.ops()[i].matrix);
        CHECK((reads ? diff > 1e-6 : diff == 0.0));
    }
    CHECK_THROWS_AS(bind_ansatz(a, std::vector<double>(a.param_count + 1, 0.0)), DimensionError);
}

TEST_CASE("target inspired on a bare CNOT") {
    GateSequence cx(2);
    cx.cx(0, 1);
    const Ansatz a = target_inspired(cx);
    CHECK(a.dressed_cnots == 1);
    CHECK(a.param_count == 12);
    for (double v : a.witness) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("target inspired witnesses compile their targets") {
    for (const auto& [u, cnots] : {std::pair{toffoli(), 6}, std::pair{qft(3), 9}, std::pair{w_state_prep(), 4}}) {
        const Ansatz a = target_inspired(u);
        CHECK(a.dressed_cnots == static_cast<std::size_t>(cnots));
        CHECK(hst_cost(u, bind_ansatz(a, a.witness)).value <= 1e-10);
    }
    CHECK(target_inspired(toffoli()).param_count == 72);
}

TEST_CASE("target inspired completeness on random circuits") {
    auto rng = make_stream(64, {1});
    std::uniform_int_distribution<int> coin(0, 3);
    for (int t = 0; t < 20; ++t) {
        GateSequence u(2);
        for (int k = 0; k < 6; ++k) {
            const int c = coin(rng);
            if (c == 0) {
                u.cx(0, 1);
            } else if (c == 1) {
                u.cx(1, 0);
            } else {
                u.add("u", haar_unitary(2, rng), {c - 2});
            }
        }
        const Ansatz a = target_inspired(u);
        CHECK(hst_cost(u, bind_ansatz(a, a.witness)).value <= 1e-10);
    }
}

TEST_CASE("kind names round trip") {
    for (auto k : {AnsatzKind::alternating_pair, AnsatzKind::target_inspired, AnsatzKind::custom}) {
        CHECK(ansatz_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS(ansatz_kind_from_string("ladder"));
}
}
