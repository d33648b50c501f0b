#include "vqclab/pauli.hpp"

#include <bit>
#include <cmath>

namespace vqc {

namespace {

std::uint64_t mask_for(int n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

const cplx kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int phase_exp_of(cplx v, double tol) {
    for (int e = 0; e < 4; ++e) {
        if (std::abs(v - kPhases[e]) <= tol) return e;
    }
    return -1;
}

}  // namespace

int qubits_for_dim(Eigen::Index dim) {
    if (dim <= 0 || (dim & (dim - 1)) != 0) {
        throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    return std::countr_zero(static_cast<std::uint64_t>(dim));
}

bool is_unitary(const Matrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    const Matrix prod = u.adjoint() * u;
    return (prod - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

PauliString::PauliString(int n, std::uint64_t x_bits, std::uint64_t z_bits, int phase_exp)
    : n_(n), x_(x_bits), z_(z_bits), phase_(((phase_exp % 4) + 4) % 4) {
    if (n < 1 || n > kMaxQubits) throw DimensionError("Pauli word length must be in [1, 16]");
    if ((x_bits | z_bits) & ~mask_for(n)) throw DimensionError("Pauli bits exceed word length");
}

PauliString PauliString::hermitian(int n, std::uint64_t x_bits, std::uint64_t z_bits) {
    return PauliString(n, x_bits, z_bits, std::popcount(x_bits & z_bits));
}

PauliString PauliString::parse(std::string_view text) {
    int phase = 0;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        if (text.front() == '-') phase += 2;
        text.remove_prefix(1);
    }
    if (!text.empty() && text.front() == 'i') {
        phase += 1;
        text.remove_prefix(1);
    }
    const int n = static_cast<int>(text.size());
    if (n < 1) throw ValidationError("empty Pauli word");
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    for (int q = 0; q < n; ++q) {
        const std::uint64_t b = std::uint64_t{1} << (n - 1 - q);
        switch (text[q]) {
            case 'I': break;
            case 'X': x |= b; break;
            case 'Z': z |= b; break;
            case 'Y': x |= b; z |= b; break;
            default: throw ValidationError("bad Pauli letter '" + std::string(1, text[q]) + "'");
        }
    }
    return PauliString(n, x, z, phase + std::popcount(x & z));
}

PauliString PauliString::x_on(int n, int qubit) {
    return PauliString(n, std::uint64_t{1} << (n - 1 - qubit), 0);
}

PauliString PauliString::z_on(int n, int qubit) {
    return PauliString(n, 0, std::uint64_t{1} << (n - 1 - qubit));
}

cplx PauliString::phase() const { return kPhases[phase_]; }

Matrix PauliString::dense() const {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n_));
    Matrix m = Matrix::Zero(d, d);
    const cplx ph = phase();
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto row = static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) ^ x_);
        m(row, i) = parity(z_ & static_cast<std::uint64_t>(i)) ? -ph : ph;
    }
    return m;
}

std::string PauliString::to_string() const {
    static const char* kPrefix[4] = {"+", "+i", "-", "-i"};
    const int shown = ((phase_ - std::popcount(x_ & z_)) % 4 + 4) % 4;
    std::string out = kPrefix[shown];
    for (int q = 0; q < n_; ++q) {
        const bool xb = x_at(q);
        const bool zb = z_at(q);
        out += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }
    return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
    return parity(x_ & other.z_) == parity(z_ & other.x_);
}

PauliString pauli_mul(const PauliString& a, const PauliString& b) {
    if (a.num_qubits() != b.num_qubits()) throw DimensionError("Pauli length mismatch");
    // Z^ka X^lb = (-1)^{ka.lb} X^lb Z^ka
    const int sign = parity(a.z_bits() & b.x_bits());
    return PauliString(a.num_qubits(), a.x_bits() ^ b.x_bits(), a.z_bits() ^ b.z_bits(),
                       a.phase_exp() + b.phase_exp() + 2 * sign);
}

PauliExpansion::PauliExpansion(int n, std::vector<cplx> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != (std::size_t{1} << (2 * n))) throw DimensionError("expansion size mismatch");
}

cplx PauliExpansion::coeff(std::uint64_t x_bits, std::uint64_t z_bits) const {
    return coeffs_.at((x_bits << n_) | z_bits);
}

std::vector<PauliExpansion::Term> PauliExpansion::nonzero(double tol) const {
    std::vector<Term> out;
    const std::uint64_t d = dim_for_qubits(n_);
    for (std::uint64_t x = 0; x < d; ++x) {
        for (std::uint64_t z = 0; z < d; ++z) {
            const cplx c = coeffs_[(x << n_) | z];
            if (std::abs(c) > tol) out.push_back({x, z, c});
        }
    }
    return out;
}

Matrix PauliExpansion::reconstruct() const {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n_));
    Matrix m = Matrix::Zero(d, d);
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(d); ++x) {
        for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(d); ++z) {
            const cplx c = coeffs_[(x << n_) | z];
            if (c == cplx{}) continue;
            for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(d); ++i) {
                m(static_cast<Eigen::Index>(i ^ x), static_cast<Eigen::Index>(i)) += parity(z & i) ? -c : c;
            }
        }
    }
    return m;
}

PauliExpansion pauli_expand(const Matrix& op) {
    if (op.rows() != op.cols()) throw DimensionError("operator must be square");
    const int n = qubits_for_dim(op.rows());
    const std::uint64_t d = dim_for_qubits(n);
    std::vector<cplx> coeffs(std::size_t{1} << (2 * n));
    const double norm = 1.0 / static_cast<double>(d);
    for (std::uint64_t x = 0; x < d; ++x) {
        for (std::uint64_t z = 0; z < d; ++z) {
            cplx acc{};
            for (std::uint64_t i = 0; i < d; ++i) {
                const cplx v = op(static_cast<Eigen::Index>(i ^ x), static_cast<Eigen::Index>(i));
                acc += parity(z & i) ? -v : v;
            }
            coeffs[(x << n) | z] = acc * norm;
        }
    }
    return PauliExpansion(n, std::move(coeffs));
}

namespace {

// Reads m as phase * X^x Z^z, or throws.
PauliString as_pauli(const Matrix& m, int n, double tol) {
    Eigen::Index row = 0;
    m.col(0).cwiseAbs().maxCoeff(&row);
    const auto x = static_cast<std::uint64_t>(row);
    const int e = phase_exp_of(m(row, 0), tol);
    if (e < 0) throw NotCliffordError("conjugated generator is not a Pauli word");
    const cplx ph = kPhases[e];
    std::uint64_t z = 0;
    for (int b = 0; b < n; ++b) {
        const std::uint64_t col = std::uint64_t{1} << b;
        const cplx v = m(static_cast<Eigen::Index>(col ^ x), static_cast<Eigen::Index>(col));
        if (std::abs(v + ph) <= tol) z |= col;
    }
    PauliString p(n, x, z, e);
    if ((p.dense() - m).cwiseAbs().maxCoeff() > tol) {
        throw NotCliffordError("conjugated generator is not a Pauli word");
    }
    return p;
}

struct GeneratorImages {
    std::vector<PauliString> x_images;
    std::vector<PauliString> z_images;
};

GeneratorImages generator_images(const Matrix& c, int n, double tol) {
    if (!is_unitary(c, tol)) throw NotCliffordError("Clifford input is not unitary");
    GeneratorImages g;
    for (int q = 0; q < n; ++q) {
        g.x_images.push_back(as_pauli(c * PauliString::x_on(n, q).dense() * c.adjoint(), n, tol));
        g.z_images.push_back(as_pauli(c * PauliString::z_on(n, q).dense() * c.adjoint(), n, tol));
    }
    return g;
}

}  // namespace

PauliString clifford_conjugate(const Matrix& c, const PauliString& p) {
    if (c.rows() != c.cols()) throw DimensionError("Clifford must be square");
    const int n = qubits_for_dim(c.rows());
    if (n != p.num_qubits()) throw DimensionError("Clifford and Pauli sizes differ");
    const GeneratorImages g = generator_images(c, n, 1e-10);
    PauliString out(n, 0, 0, p.phase_exp());
    for (int q = 0; q < n; ++q) {
        if (p.x_at(q)) out = pauli_mul(out, g.x_images[static_cast<std::size_t>(q)]);
    }
    for (int q = 0; q < n; ++q) {
        if (p.z_at(q)) out = pauli_mul(out, g.z_images[static_cast<std::size_t>(q)]);
    }
    return out;
}

bool is_clifford(const Matrix& c, double tol) {
    if (c.rows() != c.cols()) return false;
    try {
        generator_images(c, qubits_for_dim(c.rows()), tol);
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace vqc
