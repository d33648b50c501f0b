#include "doctest.h"
#include "helpers.hpp"
#include "vqclab/costs.hpp"
#include "vqclab/rng.hpp"

using namespace vqc;

namespace {

GateSequence seq(const Matrix& m) { return as_sequence(m); }

Matrix id(int n) {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    return Matrix::Identity(d, d);
}

Matrix haar(int n, std::mt19937_64& rng) { return haar_unitary(static_cast<Eigen::Index>(dim_for_qubits(n)), rng); }

}  // namespace

TEST_SUITE("costs") {

TEST_CASE("HST examples") {
    auto rng = make_stream(41, {1});
    const Matrix u = haar(2, rng);
    CHECK(hst_cost(seq(u), seq(u)).value <= 1e-12);
    CHECK(hst_cost(seq(id(1)), seq(gates::rz(kPi))).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hst_cost(seq(id(1)), seq(gates::x())).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("LHST examples") {
    const GateSequence u = seq(id(2));
    const GateSequence v = seq(kron(gates::x(), gates::id2()));
    CHECK(lhst_cost(u, v).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lhst_cost(u, v, NoiseSchedule::none(), EvalMode::exact(), 0).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(lhst_cost(u, v, NoiseSchedule::none(), EvalMode::exact(), 1).value) <= 1e-12);
    CHECK(std::abs(lhst_cost(v, v).value) <= 1e-12);
    CHECK_THROWS_AS(lhst_cost(u, v, NoiseSchedule::none(), EvalMode::exact(), 2), DimensionError);
}

TEST_CASE("LET examples") {
    auto rng = make_stream(42, {1});
    const Matrix u = haar(3, rng);
    CHECK(let_cost(seq(u), seq(u)).value <= 1e-12);
    CHECK(let_cost(seq(id(1)), seq(gates::x())).value == doctest::Approx(1.0).epsilon(1e-12));
    for (double phi : {0.3, 1.7, -2.4}) CHECK(std::abs(let_cost(seq(id(1)), seq(gates::phase(phi))).value) <= 1e-12);
}

TEST_CASE("LLET examples") {
    const GateSequence u = seq(id(2));
    const GateSequence v = seq(kron(gates::x(), gates::id2()));
    CHECK(llet_cost(u, v).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(llet_cost(u, v, NoiseSchedule::none(), EvalMode::exact(), 0).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(llet_cost(u, v, NoiseSchedule::none(), EvalMode::exact(), 1).value) <= 1e-12);
    CHECK(hst_cost(u, v).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("faithfulness and phase invariance") {
    auto rng = make_stream(43, {1});
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    for (int n = 1; n <= 3; ++n) {
        for (int t = 0; t < 4; ++t) {
            const Matrix u = haar(n, rng);
            const Matrix v = haar(n, rng);
            const cplx phase = std::polar(1.0, ph(rng));
            for (CostKind k : {CostKind::hst, CostKind::lhst, CostKind::let, CostKind::llet}) {
                const double c0 = evaluate_cost(k, seq(u), seq(v), NoiseSchedule::none(), EvalMode::exact()).value;
                const double c1 =
                    evaluate_cost(k, seq(u), seq(phase * v), NoiseSchedule::none(), EvalMode::exact()).value;
                CHECK(std::abs(c0 - c1) <= 1e-12);
                CHECK(evaluate_cost(k, seq(u), seq(phase * u), NoiseSchedule::none(), EvalMode::exact()).value <= 1e-10);
            }
            // cost zero only at the target: a random V is far from U
            CHECK(hst_cost(seq(u), seq(v)).value > 1e-9);
        }
    }
}

TEST_CASE("closed forms agree with the circuits") {
    auto rng = make_stream(44, {1});
    for (int n = 1; n <= 3; ++n) {
        const Matrix u = haar(n, rng);
        const Matrix v = haar(n, rng);
        CHECK(std::abs(hst_cost(seq(u), seq(v)).value - hst_closed_form(u, v)) <= 1e-12);
        CHECK(std::abs(let_cost(seq(u), seq(v)).value - let_closed_form(u, v)) <= 1e-12);
    }
}

TEST_CASE("sandwich inequalities") {
    auto rng = make_stream(45, {1});
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + t % 2;
        const GateSequence u = seq(haar(n, rng));
        const GateSequence v = seq(haar(n, rng));
        const double h = hst_cost(u, v).value, lh = lhst_cost(u, v).value;
        const double l = let_cost(u, v).value, ll = llet_cost(u, v).value;
        CHECK(lh <= h + 1e-12);
        CHECK(h <= n * lh + 1e-12);
        CHECK(ll <= l + 1e-12);
        CHECK(l <= n * ll + 1e-12);
    }
}

TEST_CASE("sampled estimates") {
    auto rng = make_stream(46, {1});
    const GateSequence u = seq(haar(2, rng));
    const GateSequence v = seq(haar(2, rng));
    const std::uint64_t shots = 100000;
    for (CostKind k : {CostKind::hst, CostKind::lhst, CostKind::let, CostKind::llet}) {
        const double exact = evaluate_cost(k, u, v, NoiseSchedule::none(), EvalMode::exact()).value;
        const auto s = evaluate_cost(k, u, v, NoiseSchedule::none(), EvalMode::sampled(shots, 3));
        CHECK(s.shots_used == shots);
        CHECK(s.mode == EvalModeKind::sampled);
        const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(shots));
        CHECK(std::abs(s.value - exact) <= 5 * sigma);
        CHECK(evaluate_cost(k, u, v, NoiseSchedule::none(), EvalMode::sampled(shots, 3)).value == s.value);
    }
    CHECK_THROWS_AS(sample_cost(0.5, 0, 1), ValidationError);
}

TEST_CASE("weighted cost") {
    CostEstimate a, b;
    a.value = 0.2;
    b.value = 0.4;
    CHECK(weighted_cost(1.0, a, b).value == doctest::Approx(0.2));
    CHECK(weighted_cost(0.0, a, b).value == doctest::Approx(0.4));
    CHECK(weighted_cost(0.5, a, b).value == doctest::Approx(0.3));
    CHECK_THROWS_AS(weighted_cost(1.5, a, b), ValidationError);
}

TEST_CASE("average fidelity") {
    auto rng = make_stream(47, {1});
    const Matrix u = haar(2, rng);
    const auto same = average_fidelity(u, u, 100, 1);
    CHECK(same.mean == doctest::Approx(1.0).epsilon(1e-12));
    const auto fx = average_fidelity(id(1), gates::x(), 100000, 2);
    CHECK(std::abs(fx.mean - 1.0 / 3.0) <= 0.01);
    // (d+1)/d (1 - F) against C_HST
    const Matrix v = haar(1, rng);
    const auto f = average_fidelity(id(1), v, 100000, 3);
    const double pred = 1.5 * (1.0 - f.mean);
    CHECK(std::abs(pred - hst_cost(seq(id(1)), seq(v)).value) <= 3 * 1.5 * f.std_error);
}

TEST_CASE("effective Hamiltonians") {
    Matrix one = Matrix::Zero(2, 2);
    one(1, 1) = 1.0;
    CHECK(test::max_abs(effective_hamiltonian(CostKind::let, id(1)) - one) <= 1e-15);

    auto rng = make_stream(48, {1});
    for (CostKind k : {CostKind::hst, CostKind::lhst, CostKind::let, CostKind::llet}) {
        const Matrix u = haar(2, rng);
        const Matrix h = effective_hamiltonian(k, u);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        CHECK(std::abs(es.eigenvalues().minCoeff()) <= 1e-12);
        // U itself sits in the ground space
        const Vector at_u = expectation_state(k, u);
        CHECK(std::abs(at_u.dot(h * at_u)) <= 1e-12);
        for (int t = 0; t < 5; ++t) {
            const Matrix v = haar(2, rng);
            const Vector chi = expectation_state(k, v);
            const double e = chi.dot(h * chi).real();
            // the local fixed-input Hamiltonian measures on U^dag V |0>, i.e. the echo with U and V exchanged
            const bool swapped = k == CostKind::llet;
            const double c = swapped ? evaluate_cost(k, seq(v), seq(u), NoiseSchedule::none(), EvalMode::exact()).value
                                     : evaluate_cost(k, seq(u), seq(v), NoiseSchedule::none(), EvalMode::exact()).value;
            CHECK(std::abs(e - c) <= 1e-10);
        }
    }
}
}
