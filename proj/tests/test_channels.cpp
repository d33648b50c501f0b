#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "vqclab/channels.hpp"
#include "vqclab/circuit.hpp"
#include "vqclab/rng.hpp"
#include "vqclab/verifier.hpp"

using namespace vqc;

namespace {

PauliString w(const char* s) { return PauliString::parse(s); }

Matrix unitary_superop(const Matrix& u) { return kron(u.conjugate(), u); }

// Diagonal transfer coefficient from the dense action, Tr[P N(P)] / 2^k.
double dense_transfer(const Channel& c, const PauliString& p) {
    const Matrix s = p.unsigned_word().dense();
    return (s.adjoint() * c.apply_dense(s)).trace().real() / static_cast<double>(s.rows());
}

}  // namespace

TEST_SUITE("channels") {

TEST_CASE("depolarizing examples") {
    CHECK(depolarizing(1.0, 1).is_identity());
    const Channel d0 = depolarizing(0.0, 1);
    for (const char* s : {"X", "Y", "Z"}) CHECK(std::abs(d0.transfer(w(s))) <= 1e-15);
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    CHECK(test::max_abs(d0.apply_dense(rho) - Matrix::Identity(2, 2) / 2.0) <= 1e-15);
    CHECK(depolarizing(0.9, 2).transfer(w("XZ")) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK_THROWS_AS(depolarizing(1.2, 1), ValidationError);
}

TEST_CASE("depolarizing equals the uniform Pauli channel") {
    for (int k = 1; k <= 2; ++k) {
        const double p = 0.7;
        const auto words = std::uint64_t{1} << (2 * k);
        std::vector<PauliTerm> terms;
        for (std::uint64_t x = 0; x < words; ++x) {
            const PauliString s(k, x >> k, x & ((1U << k) - 1));
            terms.push_back({s, x == 0 ? p + (1 - p) / static_cast<double>(words) : (1 - p) / static_cast<double>(words)});
        }
        const Channel a = depolarizing(p, k);
        const Channel b = pauli_channel(terms);
        CHECK(test::max_abs(a.superoperator() - b.superoperator()) <= 1e-12);
    }
}

TEST_CASE("pauli channel examples") {
    const Channel id = pauli_channel({{w("I"), 1.0}});
    for (const char* s : {"X", "Y", "Z"}) CHECK(id.transfer(w(s)) == doctest::Approx(1.0));
    const Channel px = pauli_channel({{w("I"), 0.8}, {w("X"), 0.2}});
    CHECK(px.transfer(w("Z")) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(px.transfer(w("X")) == doctest::Approx(1.0).epsilon(1e-15));
    const Channel full = pauli_channel({{w("I"), 0.25}, {w("X"), 0.25}, {w("Z"), 0.25}, {PauliString(1, 1, 1), 0.25}});
    for (const char* s : {"X", "Y", "Z"}) CHECK(std::abs(full.transfer(w(s))) <= 1e-15);
    CHECK(test::max_abs(full.superoperator() - depolarizing(0.0, 1).superoperator()) <= 1e-12);
}

TEST_CASE("pauli channel validation") {
    CHECK_THROWS_AS(pauli_channel({{w("I"), 0.5}, {w("X"), 0.2}}), ValidationError);
    CHECK_THROWS_AS(pauli_channel({{w("I"), 1.1}, {w("X"), -0.1}}), ValidationError);
    // negative transfer coefficient: fine when lenient, rejected when strict
    const std::vector<PauliTerm> flip{{w("I"), 0.2}, {w("X"), 0.8}};
    CHECK_NOTHROW(pauli_channel(flip, false));
    CHECK_THROWS_AS(pauli_channel(flip, true), ValidationError);
}

TEST_CASE("transfer coefficients match dense action") {
    auto rng = make_stream(31, {1});
    for (int k = 1; k <= 2; ++k) {
        for (int t = 0; t < 5; ++t) {
            const Channel c = random_pauli_channel(k, rng());
            const auto words = std::uint64_t{1} << (2 * k);
            for (std::uint64_t x = 0; x < words; ++x) {
                const PauliString p = PauliString::hermitian(k, x >> k, x & ((1U << k) - 1));
                CHECK(std::abs(c.transfer(p) - dense_transfer(c, p)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("amplitude damping and products") {
    CHECK(amplitude_damping(0.0).is_identity());
    const double g = 0.3;
    const Channel ad = amplitude_damping(g);
    CHECK(ad.transfer(w("X")) == doctest::Approx(std::sqrt(1 - g)).epsilon(1e-14));
    CHECK(ad.transfer(w("Z")) == doctest::Approx(1 - g).epsilon(1e-14));
    CHECK(ad.affine(w("Z")) == doctest::Approx(g).epsilon(1e-14));
    CHECK_FALSE(ad.is_unital());

    const Channel two = nonunital_pauli_from_locals({amplitude_damping(0.1), amplitude_damping(0.1)});
    CHECK(two.kind() == ChannelKind::nonunital_pauli);
    CHECK(two.affine(w("ZZ")) == doctest::Approx(0.01).epsilon(1e-14));

    // identity image against 1 + sum d P
    const Matrix img = two.apply_dense(Matrix::Identity(4, 4));
    Matrix rec = Matrix::Identity(4, 4);
    for (const char* s : {"IZ", "ZI", "ZZ", "IX", "XI", "XX"}) rec += two.affine(w(s)) * w(s).dense();
    CHECK(test::max_abs(img - rec) <= 1e-12);
}

TEST_CASE("constructed channels are CPTP") {
    auto rng = make_stream(32, {1});
    const std::vector<Channel> all{depolarizing(0.3, 2), random_pauli_channel(2, rng()), amplitude_damping(0.4),
                                   dephasing(0.2), thermal_relaxation(50e-6, 70e-6, 300e-9),
                                   nonunital_pauli_from_locals({amplitude_damping(0.2), dephasing(0.5)})};
    for (const auto& c : all) {
        const auto d = static_cast<Eigen::Index>(dim_for_qubits(c.arity()));
        Matrix sum = Matrix::Zero(d, d);
        for (const auto& k : c.kraus()) sum += k.adjoint() * k;
        CHECK(test::max_abs(sum - Matrix::Identity(d, d)) <= 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> es(c.choi());
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
    Matrix bad = Matrix::Identity(2, 2) * 0.5;
    CHECK_THROWS_AS(Channel::from_kraus({bad}), ValidationError);
}

TEST_CASE("measurement noise") {
    const NoisyPovm ideal = measurement_noise({{1.0, 1.0}});
    CHECK(ideal.is_ideal());
    const NoisyPovm m = measurement_noise({{0.95, 0.9}});
    const Matrix e0 = m.effect(0);
    CHECK(std::abs(e0(0, 0) - 0.95) <= 1e-15);
    CHECK(std::abs(e0(1, 1) - 0.1) <= 1e-15);

    const NoisyPovm two = measurement_noise({{0.95, 0.9}, {0.8, 0.85}});
    Matrix sum = Matrix::Zero(4, 4);
    for (std::uint64_t z = 0; z < 4; ++z) sum += two.effect(z);
    CHECK(test::max_abs(sum - Matrix::Identity(4, 4)) <= 1e-15);

    CHECK_THROWS_AS(measurement_noise({{1.2, 0.9}}), ValidationError);
}

TEST_CASE("effective Z") {
    CHECK(test::max_abs(effective_z(NoisyPovm::ideal(1), 0) - gates::z()) <= 1e-15);
    const Matrix ez = effective_z(measurement_noise({{0.9, 0.8}}), 0);
    CHECK(std::abs(ez(0, 0) - 0.8) <= 1e-15);
    CHECK(std::abs(ez(1, 1) + 0.6) <= 1e-15);
    auto rng = make_stream(33, {1});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        const double p00 = 0.3 + 0.7 * u(rng);
        const double p11 = (1.0 - p00) + 1e-3 + (p00 - 1e-3) * u(rng);
        const Matrix z = effective_z(measurement_noise({{p00, p11}}), 0);
        CHECK(z(0, 0).real() > z(1, 1).real());
    }
}

TEST_CASE("thermal relaxation") {
    CHECK(thermal_relaxation(50e-6, 70e-6, 0.0).is_identity());
    const double t1 = 40e-6, t = 1e-6;
    const Channel ad = thermal_relaxation(t1, 2 * t1, t);
    CHECK(test::max_abs(ad.superoperator() - amplitude_damping(1 - std::exp(-t / t1)).superoperator()) <= 1e-12);
    const double t2 = 30e-6;
    const Channel ph = thermal_relaxation(std::numeric_limits<double>::infinity(), t2, t);
    CHECK(ph.is_unital());
    CHECK(ph.transfer(w("X")) == doctest::Approx(std::exp(-t / t2)).epsilon(1e-12));
    CHECK(ph.transfer(w("Z")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(thermal_relaxation(10e-6, 30e-6, t), ValidationError);
}

TEST_CASE("commuting Pauli noise through Cliffords") {
    const Channel px = pauli_channel({{w("I"), 0.8}, {w("X"), 0.2}});
    CHECK(test::max_abs(commute_through_clifford(px, Matrix::Identity(2, 2)).superoperator() - px.superoperator()) <=
          1e-12);
    const Channel hz = commute_through_clifford(px, gates::h());
    CHECK(test::max_abs(hz.superoperator() - pauli_channel({{w("I"), 0.8}, {w("Z"), 0.2}}).superoperator()) <= 1e-12);
    const Channel cx = commute_through_clifford(pauli_channel({{w("II"), 0.9}, {w("XI"), 0.1}}), gates::cnot());
    CHECK(test::max_abs(cx.superoperator() - pauli_channel({{w("II"), 0.9}, {w("XX"), 0.1}}).superoperator()) <=
          1e-12);
    CHECK_THROWS_AS(commute_through_clifford(px, gates::t()), NotCliffordError);
}

TEST_CASE("Lemma equality on random Clifford pairs") {
    const std::vector<int> q0{0}, q1{1}, q01{0, 1}, q10{1, 0};
    const std::vector<Matrix> gens{embed(gates::h(), q0, 2), embed(gates::h(), q1, 2), embed(gates::s(), q0, 2),
                                   embed(gates::s(), q1, 2), embed(gates::cnot(), q01, 2),
                                   embed(gates::cnot(), q10, 2)};
    auto rng = make_stream(34, {1});
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    for (int t = 0; t < 50; ++t) {
        Matrix c = Matrix::Identity(4, 4);
        for (int k = 0; k < 10; ++k) c = gens[pick(rng)] * c;
        const Channel p = random_pauli_channel(2, rng());
        const Channel q = commute_through_clifford(p, c);
        // W P = Q W as superoperators
        const Matrix lhs = unitary_superop(c) * p.superoperator();
        const Matrix rhs = q.superoperator() * unitary_superop(c);
        CHECK(test::max_abs(lhs - rhs) <= 1e-12);
    }
}
}
