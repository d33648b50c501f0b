#include "doctest.h"
#include "helpers.hpp"
#include "vqclab/circuit.hpp"
#include "vqclab/pauli.hpp"
#include "vqclab/rng.hpp"

using namespace vqc;

TEST_SUITE("pauli_core") {

TEST_CASE("multiplication examples") {
    const PauliString x(1, 1, 0), z(1, 0, 1), xz(1, 1, 1);
    const PauliString xi(2, 0b10, 0), ii = PauliString::identity(2);
    CHECK(pauli_mul(xi, ii) == xi);

    const PauliString zx = pauli_mul(z, x);
    CHECK(zx.x_bits() == 1);
    CHECK(zx.z_bits() == 1);
    CHECK(zx.phase() == cplx(-1.0, 0.0));

    const PauliString sq = pauli_mul(xz, xz);
    CHECK(sq.is_identity_word());
    CHECK(sq.phase() == cplx(-1.0, 0.0));
}

TEST_CASE("multiplication matches dense products") {
    for (std::uint64_t a = 0; a < 16; ++a) {
        for (std::uint64_t b = 0; b < 16; ++b) {
            const PauliString p(1, a >> 1 & 1, a & 1, static_cast<int>(a >> 2));
            const PauliString q(1, b >> 1 & 1, b & 1, static_cast<int>(b >> 2));
            CHECK(test::max_abs(pauli_mul(p, q).dense() - p.dense() * q.dense()) <= 1e-12);
        }
    }
    auto rng = make_stream(11, {1});
    std::uniform_int_distribution<std::uint64_t> bits(0, 7);
    std::uniform_int_distribution<int> ph(0, 3);
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 3;
        const std::uint64_t mask = (1U << n) - 1;
        const PauliString p(n, bits(rng) & mask, bits(rng) & mask, ph(rng));
        const PauliString q(n, bits(rng) & mask, bits(rng) & mask, ph(rng));
        CHECK(test::max_abs(pauli_mul(p, q).dense() - p.dense() * q.dense()) <= 1e-12);
    }
}

TEST_CASE("expansion examples") {
    const PauliExpansion id = pauli_expand(Matrix::Identity(2, 2));
    REQUIRE(id.nonzero().size() == 1);
    CHECK(std::abs(id.coeff(0, 0) - 1.0) <= 1e-15);

    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    const PauliExpansion e0 = pauli_expand(zero);
    CHECK(std::abs(e0.coeff(0, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(e0.coeff(0, 1) - 0.5) <= 1e-15);
    CHECK(e0.nonzero().size() == 2);

    Vector phi = Vector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const PauliExpansion ep = pauli_expand(test::dm(phi));
    CHECK(ep.nonzero().size() == 4);
    for (std::uint64_t l = 0; l < 2; ++l) {
        for (std::uint64_t k = 0; k < 2; ++k) {
            CHECK(std::abs(ep.coeff(l * 3, k * 3) - 0.25) <= 1e-15);
        }
    }
}

TEST_CASE("expansion round trip on random Hermitian operators") {
    auto rng = make_stream(12, {1});
    for (int n = 1; n <= 3; ++n) {
        for (int t = 0; t < 5; ++t) {
            const Matrix h = test::random_hermitian(static_cast<Eigen::Index>(dim_for_qubits(n)), rng);
            CHECK(test::max_abs(pauli_expand(h).reconstruct() - h) <= 1e-12);
        }
    }
}

TEST_CASE("Clifford conjugation") {
    const PauliString x(1, 1, 0);
    const PauliString hx = clifford_conjugate(gates::h(), x);
    CHECK(hx == PauliString(1, 0, 1));

    const PauliString xi(2, 0b10, 0);
    CHECK(clifford_conjugate(gates::cnot(), xi) == PauliString(2, 0b11, 0));

    const PauliString sx = clifford_conjugate(gates::s(), x);
    CHECK(sx.x_bits() == 1);
    CHECK(sx.z_bits() == 1);
    CHECK(sx.phase() == cplx(0.0, 1.0));
    CHECK(sx == PauliString::parse("Y"));

    CHECK_THROWS_AS(clifford_conjugate(gates::t(), x), NotCliffordError);
    CHECK_FALSE(is_clifford(gates::t()));
}

TEST_CASE("Clifford conjugation agrees with dense conjugation") {
    const std::vector<int> q0{0}, q1{1}, q01{0, 1}, q10{1, 0};
    const std::vector<Matrix> gens{embed(gates::h(), q0, 2), embed(gates::h(), q1, 2), embed(gates::s(), q0, 2),
                                   embed(gates::s(), q1, 2), embed(gates::cnot(), q01, 2),
                                   embed(gates::cnot(), q10, 2)};
    auto rng = make_stream(13, {1});
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    for (int t = 0; t < 30; ++t) {
        Matrix c = Matrix::Identity(4, 4);
        for (int k = 0; k < 8; ++k) c = gens[pick(rng)] * c;
        CHECK(is_clifford(c));
        for (int q = 0; q < 2; ++q) {
            for (const auto& p : {PauliString::x_on(2, q), PauliString::z_on(2, q)}) {
                const Matrix want = c * p.dense() * c.adjoint();
                CHECK(test::max_abs(clifford_conjugate(c, p).dense() - want) <= 1e-10);
            }
        }
    }
}

TEST_CASE("parse and print") {
    CHECK(PauliString::parse("XZ").to_string() == "+XZ");
    CHECK(PauliString::parse("-iY").to_string() == "-iY");
    CHECK(PauliString::parse(PauliString::parse("iXZ").to_string()) == PauliString::parse("iXZ"));
    CHECK(PauliString::parse("-iY").phase() == cplx(0.0, -1.0) * PauliString::parse("Y").phase());
    CHECK_THROWS(PauliString::parse("XQ"));
}
}
