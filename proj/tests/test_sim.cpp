#include "doctest.h"
#include "helpers.hpp"
#include "vqclab/channels.hpp"
#include "vqclab/circuit.hpp"
#include "vqclab/rng.hpp"

using namespace vqc;

namespace {
const std::vector<int> q0{0}, q1{1}, q01{0, 1};
}

TEST_SUITE("linalg_sim") {

TEST_CASE("apply_unitary examples") {
    const auto one = apply_unitary(DensityState::zero(1), gates::x(), q0);
    CHECK(std::abs(one.matrix()(1, 1) - 1.0) <= 1e-15);

    auto bell = apply_unitary(DensityState::zero(2), gates::h(), q0);
    bell = apply_unitary(bell, gates::cnot(), q01);
    Vector phi = Vector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    CHECK(test::max_abs(bell.matrix() - test::dm(phi)) <= 1e-15);

    auto rng = make_stream(21, {1});
    const Matrix rho = test::random_density(4, rng);
    const auto same = apply_unitary(DensityState::from_matrix(rho), Matrix::Identity(2, 2), q1);
    CHECK(test::max_abs(same.matrix() - rho) <= 1e-15);
}

TEST_CASE("apply_channel examples") {
    const auto mixed = apply_channel(DensityState::zero(1), depolarizing(0.0, 1), q0);
    CHECK(test::max_abs(mixed.matrix() - Matrix::Identity(2, 2) / 2.0) <= 1e-15);

    auto rng = make_stream(22, {1});
    const Matrix rho = test::random_density(2, rng);
    CHECK(test::max_abs(apply_channel(DensityState::from_matrix(rho), Channel::identity(1), q0).matrix() - rho) <= 1e-15);

    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const Channel deph = pauli_channel({{PauliString::parse("I"), 0.8}, {PauliString::parse("Z"), 0.2}});
    const auto out = apply_channel(DensityState::from_pure(plus), deph, q0);
    CHECK(std::abs(out.matrix()(0, 1) - 0.5 * 0.6) <= 1e-15);
    CHECK(std::abs(out.matrix()(0, 0) - 0.5) <= 1e-15);
}

TEST_CASE("povm probabilities") {
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    const auto e0 = PovmEffect::make(p0, "0");
    CHECK(povm_probability(DensityState::zero(1), e0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(povm_probability(DensityState::from_matrix(Matrix::Identity(2, 2) / 2.0), e0) ==
          doctest::Approx(0.5).epsilon(1e-15));
    Matrix noisy = Matrix::Zero(2, 2);
    noisy(0, 0) = 0.9;
    noisy(1, 1) = 0.1;
    const auto one = apply_unitary(DensityState::zero(1), gates::x(), q0);
    CHECK(povm_probability(one, PovmEffect::make(noisy, "0~")) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("partial trace") {
    Vector phi = Vector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const auto a = partial_trace(DensityState::from_pure(phi), q0);
    CHECK(test::max_abs(a.matrix() - Matrix::Identity(2, 2) / 2.0) <= 1e-15);

    auto rng = make_stream(23, {1});
    const Matrix rho = test::random_density(4, rng);
    CHECK(test::max_abs(partial_trace(DensityState::from_matrix(rho), q01).matrix() - rho) <= 1e-15);

    const auto kept = partial_trace(DensityState::from_pure(test::ket(2, 0b01)), q0);
    CHECK(std::abs(kept.matrix()(0, 0) - 1.0) <= 1e-15);
}

TEST_CASE("partial trace commutes with unitaries on kept qubits") {
    auto rng = make_stream(24, {1});
    for (int t = 0; t < 10; ++t) {
        const Matrix rho = test::random_density(8, rng);
        const Matrix u = haar_unitary(2, rng);
        const std::vector<int> keep{0, 2};
        const std::vector<int> target{2};
        const std::vector<int> local{1};
        const auto lhs = partial_trace(apply_unitary(DensityState::from_matrix(rho), u, target), keep);
        const auto rhs = apply_unitary(partial_trace(DensityState::from_matrix(rho), keep), u, local);
        CHECK(test::max_abs(lhs.matrix() - rhs.matrix()) <= 1e-12);
    }
}

TEST_CASE("unitary channel equals unitary application") {
    auto rng = make_stream(25, {1});
    for (int n = 1; n <= 3; ++n) {
        const Matrix rho = test::random_density(static_cast<Eigen::Index>(dim_for_qubits(n)), rng);
        const Matrix u = haar_unitary(2, rng);
        const std::vector<int> t{n - 1};
        const auto a = apply_unitary(DensityState::from_matrix(rho), u, t);
        const auto b = apply_channel(DensityState::from_matrix(rho), Channel::from_unitary(u), t);
        CHECK(test::max_abs(a.matrix() - b.matrix()) <= 1e-12);
        CHECK(std::abs(b.trace() - 1.0) <= 1e-10);
        CHECK(test::max_abs(b.matrix() - b.matrix().adjoint()) <= 1e-10);
        CHECK_NOTHROW(b.validate());
    }
}

TEST_CASE("state validation rejects non-states") {
    Matrix bad = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityState::from_matrix(bad).validate(), NumericalError);
    CHECK_THROWS_AS(DensityState::from_matrix(Matrix::Identity(3, 3) / 3.0), DimensionError);
}

TEST_CASE("sample_counts") {
    const std::vector<double> certain{1.0, 0.0};
    const auto c = sample_counts(certain, 1000, 1);
    CHECK(c[0] == 1000);
    CHECK(c[1] == 0);

    const std::vector<double> fair{0.5, 0.5};
    const auto f = sample_counts(fair, 1000000, 7);
    CHECK(std::abs(static_cast<double>(f[0]) / 1e6 - 0.5) <= 0.002);
    CHECK(sample_counts(fair, 1000, 9) == sample_counts(fair, 1000, 9));
}
}
