#include "vqclab/channels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace vqc {

namespace {

std::vector<int> iota_targets(int k) {
    std::vector<int> t(static_cast<std::size_t>(k));
    std::iota(t.begin(), t.end(), 0);
    return t;
}

Matrix hermitian_pauli(int k, std::uint64_t x, std::uint64_t z) { return PauliString::hermitian(k, x, z).dense(); }

std::pair<std::uint64_t, std::uint64_t> split_index(std::uint64_t a, int k) {
    return {a >> k, a & ((std::uint64_t{1} << k) - 1)};
}

bool is_anticommuting(const PauliString& a, std::uint64_t x, std::uint64_t z) {
    return ((std::popcount(a.x_bits() & z) + std::popcount(a.z_bits() & x)) & 1) != 0;
}

std::vector<PauliTerm> merge_terms(std::vector<PauliTerm> terms) {
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> acc;
    int n = 0;
    for (const auto& t : terms) {
        if (n == 0) n = t.word.num_qubits();
        if (t.word.num_qubits() != n) throw DimensionError("Pauli channel words differ in length");
        acc[{t.word.x_bits(), t.word.z_bits()}] += t.prob;
    }
    std::vector<PauliTerm> out;
    for (const auto& [key, p] : acc) {
        if (p != 0.0) out.push_back({PauliString(n, key.first, key.second), p});
    }
    return out;
}

}  // namespace

std::string to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::depolarizing: return "depolarizing";
        case ChannelKind::pauli: return "pauli";
        case ChannelKind::nonunital_pauli: return "nonunital_pauli";
        case ChannelKind::unitary: return "unitary";
        case ChannelKind::thermal: return "thermal";
        case ChannelKind::general: return "general";
    }
    return "general";
}

double transfer_of_terms(const std::vector<PauliTerm>& terms, const PauliString& word) {
    double c = 0.0;
    for (const auto& t : terms) {
        c += is_anticommuting(word, t.word.x_bits(), t.word.z_bits()) ? -t.prob : t.prob;
    }
    return c;
}

Channel Channel::identity(int arity) { return depolarizing(1.0, arity); }

Channel Channel::from_unitary(const Matrix& u) {
    if (!is_unitary(u)) throw ValidationError("channel from a non-unitary matrix");
    return from_kraus({u}, ChannelKind::unitary);
}

Channel Channel::from_kraus(std::vector<Matrix> kraus, ChannelKind kind) {
    if (kraus.empty()) throw ValidationError("channel needs at least one Kraus operator");
    Channel ch;
    ch.arity_ = qubits_for_dim(kraus.front().rows());
    for (const Matrix& k : kraus) {
        if (k.rows() != kraus.front().rows() || k.cols() != k.rows()) throw DimensionError("Kraus operators differ in size");
    }
    ch.kind_ = kind;
    ch.kraus_ = std::move(kraus);
    ch.validate_cptp();
    ch.cache_transfer();
    if (kind == ChannelKind::pauli || kind == ChannelKind::nonunital_pauli) {
        if (ch.arity_ <= 3 && ch.pauli_structure_defect() > 1e-10) {
            throw ValidationError("Kraus set does not have the declared Pauli-diagonal structure");
        }
    }
    return ch;
}

void Channel::validate_cptp() const {
    if (kraus_.empty()) return;
    const Eigen::Index d = kraus_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& k : kraus_) sum += k.adjoint() * k;
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("Kraus operators are not trace preserving");
    }
    if (arity_ <= 3) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(choi(), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9) throw ValidationError("Choi matrix is not positive");
    }
}

void Channel::cache_transfer() {
    if (arity_ <= 2) ptm_ = std::make_shared<const RealMatrix>(transfer_matrix());
}

std::vector<Matrix> Channel::kraus() const {
    if (!kraus_.empty()) return kraus_;
    if (!locals_.empty()) {
        std::vector<Matrix> out{Matrix::Identity(1, 1)};
        for (const Channel& l : locals_) {
            std::vector<Matrix> next;
            for (const Matrix& a : out) {
                for (const Matrix& b : l.kraus()) next.push_back(kron(a, b));
            }
            out = std::move(next);
        }
        return out;
    }
    if (terms_.empty()) throw DimensionError("Kraus form not materialized for this arity");
    std::vector<Matrix> out;
    for (const auto& t : terms_) out.push_back(std::sqrt(t.prob) * t.word.dense());
    return out;
}

double Channel::transfer(const PauliString& word) const {
    if (word.num_qubits() != arity_) throw DimensionError("word length differs from channel arity");
    switch (kind_) {
        case ChannelKind::depolarizing: return word.is_identity_word() ? 1.0 : depol_p_;
        case ChannelKind::pauli: return transfer_of_terms(terms_, word);
        default: break;
    }
    if (!locals_.empty()) {
        double c = 1.0;
        for (int q = 0; q < arity_; ++q) {
            const std::uint64_t x = word.x_at(q), z = word.z_at(q);
            c *= locals_[static_cast<std::size_t>(q)].transfer(PauliString(1, x, z));
        }
        return c;
    }
    const std::uint64_t a = (word.x_bits() << arity_) | word.z_bits();
    if (ptm_) return (*ptm_)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
    return transfer_matrix()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
}

double Channel::affine(const PauliString& word) const {
    if (word.num_qubits() != arity_) throw DimensionError("word length differs from channel arity");
    if (kind_ == ChannelKind::depolarizing || kind_ == ChannelKind::pauli) return word.is_identity_word() ? 1.0 : 0.0;
    if (!locals_.empty()) {
        double d = 1.0;
        for (int q = 0; q < arity_; ++q) {
            const std::uint64_t x = word.x_at(q), z = word.z_at(q);
            d *= locals_[static_cast<std::size_t>(q)].affine(PauliString(1, x, z));
        }
        return d;
    }
    const std::uint64_t a = (word.x_bits() << arity_) | word.z_bits();
    if (ptm_) return (*ptm_)(static_cast<Eigen::Index>(a), 0);
    return transfer_matrix()(static_cast<Eigen::Index>(a), 0);
}

RealMatrix Channel::transfer_matrix() const {
    if (ptm_) return *ptm_;
    if (arity_ > 4) throw DimensionError("transfer matrix limited to arity 4");
    const std::uint64_t nb = std::uint64_t{1} << (2 * arity_);
    RealMatrix r(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
    const double norm = 1.0 / static_cast<double>(dim_for_qubits(arity_));
    std::vector<Matrix> basis;
    basis.reserve(nb);
    for (std::uint64_t a = 0; a < nb; ++a) {
        const auto [x, z] = split_index(a, arity_);
        basis.push_back(hermitian_pauli(arity_, x, z));
    }
    for (std::uint64_t b = 0; b < nb; ++b) {
        const Matrix img = apply_dense(basis[b]);
        for (std::uint64_t a = 0; a < nb; ++a) {
            r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                (basis[a].cwiseProduct(img.transpose())).sum().real() * norm;
        }
    }
    return r;
}

Matrix Channel::superoperator() const {
    if (arity_ > 4) throw DimensionError("superoperator limited to arity 4");
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(arity_));
    Matrix s(d * d, d * d);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            Matrix e = Matrix::Zero(d, d);
            e(r, c) = 1.0;
            const Matrix img = apply_dense(e);
            s.col(c * d + r) = Eigen::Map<const Vector>(img.data(), d * d);
        }
    }
    return s;
}

Matrix Channel::choi() const {
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(arity_));
    Matrix c = Matrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            Matrix e = Matrix::Zero(d, d);
            e(i, j) = 1.0;
            c.block(i * d, j * d, d, d) = apply_dense(e);
        }
    }
    return c;
}

bool Channel::is_unital(double tol) const {
    switch (kind_) {
        case ChannelKind::depolarizing:
        case ChannelKind::pauli:
        case ChannelKind::unitary: return true;
        default: break;
    }
    if (!locals_.empty()) {
        return std::all_of(locals_.begin(), locals_.end(), [tol](const Channel& l) { return l.is_unital(tol); });
    }
    const Eigen::Index d = kraus_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& k : kraus_) sum += k * k.adjoint();
    return (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

bool Channel::is_identity(double tol) const {
    if (kind_ == ChannelKind::depolarizing) return std::abs(depol_p_ - 1.0) <= tol;
    if (kind_ == ChannelKind::pauli) {
        return terms_.size() == 1 && terms_.front().word.is_identity_word();
    }
    if (!locals_.empty()) {
        return std::all_of(locals_.begin(), locals_.end(), [tol](const Channel& l) { return l.is_identity(tol); });
    }
    if (kraus_.size() == 1) {
        const Matrix& k = kraus_.front();
        const cplx ph = k(0, 0);
        return std::abs(std::abs(ph) - 1.0) <= tol &&
               (k - ph * Matrix::Identity(k.rows(), k.cols())).cwiseAbs().maxCoeff() <= tol;
    }
    return false;
}

double Channel::pauli_structure_defect() const {
    const RealMatrix r = transfer_matrix();
    const bool unital = is_unital(1e-12);
    double worst = 0.0;
    for (Eigen::Index b = 0; b < r.cols(); ++b) {
        for (Eigen::Index a = 0; a < r.rows(); ++a) {
            if (a == b) continue;
            if (b == 0 && !unital) continue;
            worst = std::max(worst, std::abs(r(a, b)));
        }
    }
    return worst;
}

void Channel::apply(Matrix& m, const Embedding& e) const {
    if (e.arity() != arity_) throw DimensionError("channel arity differs from targets");
    switch (kind_) {
        case ChannelKind::depolarizing: kernel::depolarize(m, depol_p_, e); return;
        case ChannelKind::pauli: {
            if (terms_.size() == 1 && terms_.front().word.is_identity_word()) return;
            Matrix out = Matrix::Zero(m.rows(), m.cols());
            for (const auto& t : terms_) {
                kernel::pauli_conjugate(m, out, e.spread(t.word.x_bits()), e.spread(t.word.z_bits()), t.prob);
            }
            m = std::move(out);
            return;
        }
        default: break;
    }
    if (!locals_.empty()) {
        for (int q = 0; q < arity_; ++q) {
            const int t = e.targets()[static_cast<std::size_t>(q)];
            const Channel& l = locals_[static_cast<std::size_t>(q)];
            if (l.is_identity()) continue;
            l.apply(m, Embedding(e.num_qubits(), std::span<const int>(&t, 1)));
        }
        return;
    }
    if (kraus_.size() == 1) {
        kernel::conjugate(m, kraus_.front(), e);
        return;
    }
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (const Matrix& k : kraus_) {
        Matrix tmp = m;
        kernel::conjugate(tmp, k, e);
        out += tmp;
    }
    m = std::move(out);
}

void Channel::apply_adjoint(Matrix& m, const Embedding& e) const {
    if (e.arity() != arity_) throw DimensionError("channel arity differs from targets");
    if (kind_ == ChannelKind::depolarizing || kind_ == ChannelKind::pauli) {
        apply(m, e);
        return;
    }
    if (!locals_.empty()) {
        for (int q = 0; q < arity_; ++q) {
            const int t = e.targets()[static_cast<std::size_t>(q)];
            const Channel& l = locals_[static_cast<std::size_t>(q)];
            if (l.is_identity()) continue;
            l.apply_adjoint(m, Embedding(e.num_qubits(), std::span<const int>(&t, 1)));
        }
        return;
    }
    if (kraus_.size() == 1) {
        kernel::adjoint_conjugate(m, kraus_.front(), e);
        return;
    }
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (const Matrix& k : kraus_) {
        Matrix tmp = m;
        kernel::adjoint_conjugate(tmp, k, e);
        out += tmp;
    }
    m = std::move(out);
}

Matrix Channel::apply_dense(const Matrix& rho) const {
    if (rho.rows() != static_cast<Eigen::Index>(dim_for_qubits(arity_))) throw DimensionError("operator size differs from arity");
    Matrix m = rho;
    const auto t = iota_targets(arity_);
    apply(m, Embedding(arity_, t));
    return m;
}

std::string Channel::describe() const {
    std::ostringstream os;
    os << to_string(kind_) << "(arity=" << arity_;
    if (kind_ == ChannelKind::depolarizing) os << ", p=" << depol_p_;
    if (kind_ == ChannelKind::pauli) {
        for (const auto& t : terms_) os << ", " << t.word.to_string().substr(1) << ':' << t.prob;
    }
    os << ')';
    return os.str();
}

Channel depolarizing(double p, int arity) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("depolarizing p must lie in [0, 1]");
    if (arity < 1) throw DimensionError("arity must be positive");
    Channel ch;
    ch.arity_ = arity;
    ch.kind_ = ChannelKind::depolarizing;
    ch.depol_p_ = p;
    if (arity <= 3) {
        const std::uint64_t nb = std::uint64_t{1} << (2 * arity);
        const double rest = (1.0 - p) / static_cast<double>(nb);
        const std::uint64_t d = dim_for_qubits(arity);
        for (std::uint64_t a = 0; a < nb; ++a) {
            const double w = (a == 0 ? p : 0.0) + rest;
            if (w > 0.0) ch.terms_.push_back({PauliString(arity, a / d, a % d), w});
        }
    }
    ch.cache_transfer();
    return ch;
}

Channel pauli_channel(std::vector<PauliTerm> probs, bool strict) {
    if (probs.empty()) throw ValidationError("Pauli channel needs probabilities");
    for (auto& t : probs) {
        if (!(t.prob >= 0.0)) throw ValidationError("negative Pauli probability");
        t.word = t.word.unsigned_word();
    }
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0,
                                         [](double s, const PauliTerm& t) { return s + t.prob; });
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("Pauli probabilities do not sum to 1");
    Channel ch;
    ch.arity_ = probs.front().word.num_qubits();
    ch.kind_ = ChannelKind::pauli;
    ch.terms_ = merge_terms(std::move(probs));
    if (strict) {
        const std::uint64_t d = dim_for_qubits(ch.arity_);
        for (std::uint64_t x = 0; x < d; ++x) {
            for (std::uint64_t z = 0; z < d; ++z) {
                const double c = transfer_of_terms(ch.terms_, PauliString(ch.arity_, x, z));
                if (c < -1e-15) {
                    throw ValidationError("Pauli channel has a negative transfer coefficient on " +
                                          PauliString(ch.arity_, x, z).to_string());
                }
            }
        }
    }
    ch.cache_transfer();
    return ch;
}

Channel amplitude_damping(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("damping gamma must lie in [0, 1]");
    Matrix k0 = Matrix::Zero(2, 2);
    Matrix k1 = Matrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    if (gamma == 0.0) return Channel::identity(1);
    return Channel::from_kraus({k0, k1}, ChannelKind::nonunital_pauli);
}

Channel dephasing(double c) {
    if (!(c >= -1.0 && c <= 1.0)) throw ValidationError("dephasing factor must lie in [-1, 1]");
    if (c == 1.0) return Channel::identity(1);
    return pauli_channel({{PauliString::parse("I"), 0.5 * (1.0 + c)}, {PauliString::parse("Z"), 0.5 * (1.0 - c)}});
}

Channel nonunital_pauli_from_locals(std::vector<Channel> locals) {
    if (locals.empty()) throw ValidationError("need at least one local channel");
    for (const Channel& l : locals) {
        if (l.arity() != 1) throw ValidationError("local factors must act on one qubit");
        const RealMatrix r = l.transfer_matrix();
        for (Eigen::Index b = 1; b < 4; ++b) {
            for (Eigen::Index a = 0; a < 4; ++a) {
                if (a != b && std::abs(r(a, b)) > 1e-10) {
                    throw ValidationError("local factor is not diagonal on X, Y, Z");
                }
            }
            if (r(b, b) < -1e-12) throw ValidationError("local factor has a negative transfer coefficient");
        }
    }
    Channel ch;
    ch.arity_ = static_cast<int>(locals.size());
    ch.kind_ = ChannelKind::nonunital_pauli;
    ch.locals_ = std::move(locals);
    ch.cache_transfer();
    return ch;
}

Channel thermal_relaxation(double t1, double t2, double gate_time) {
    if (!(t1 > 0.0) || !(t2 > 0.0) || !(gate_time >= 0.0)) throw ValidationError("relaxation times must be positive");
    if (t2 > 2.0 * t1) throw ValidationError("T2 must not exceed 2 T1");
    if (gate_time == 0.0) return Channel::identity(1);
    const double gamma = std::isinf(t1) ? 0.0 : 1.0 - std::exp(-gate_time / t1);
    const double extra = std::exp(-gate_time / t2) / std::sqrt(1.0 - gamma);
    const double lam = std::min(1.0, extra);
    std::vector<Matrix> ad{Matrix::Identity(2, 2)};
    if (gamma > 0.0) ad = amplitude_damping(gamma).kraus();
    std::vector<Matrix> out;
    for (const Matrix& a : ad) {
        for (const Matrix& dph : dephasing(lam).kraus()) out.push_back(dph * a);
    }
    Channel ch = Channel::from_kraus(std::move(out), ChannelKind::thermal);
    return ch;
}

Channel commute_through_clifford(const Channel& p, const Matrix& w) {
    if (p.kind() != ChannelKind::pauli && p.kind() != ChannelKind::depolarizing) {
        throw ValidationError("commute_through_clifford needs a Pauli channel");
    }
    if (p.kind() == ChannelKind::depolarizing) {
        if (!is_clifford(w)) throw NotCliffordError("matrix is not Clifford");
        return p;
    }
    std::vector<PauliTerm> q;
    for (const auto& t : p.pauli_terms()) q.push_back({clifford_conjugate(w, t.word).unsigned_word(), t.prob});
    return pauli_channel(std::move(q));
}

Channel compose_pauli(const Channel& a, const Channel& b) {
    if (a.arity() != b.arity()) throw DimensionError("arity mismatch");
    if (a.pauli_terms().empty() || b.pauli_terms().empty()) throw ValidationError("compose_pauli needs Pauli channels");
    std::vector<PauliTerm> out;
    for (const auto& ta : a.pauli_terms()) {
        for (const auto& tb : b.pauli_terms()) {
            out.push_back({pauli_mul(tb.word, ta.word).unsigned_word(), ta.prob * tb.prob});
        }
    }
    return pauli_channel(std::move(out));
}

Channel pauli_channel_from_transfer(int arity, std::span<const double> c_by_word) {
    const std::uint64_t d = dim_for_qubits(arity);
    if (c_by_word.size() != d * d) throw DimensionError("transfer vector size mismatch");
    std::vector<PauliTerm> terms;
    const double norm = 1.0 / static_cast<double>(d * d);
    for (std::uint64_t w = 0; w < d * d; ++w) {
        const PauliString word(arity, w >> arity, w & (d - 1));
        double p = 0.0;
        for (std::uint64_t a = 0; a < d * d; ++a) {
            const bool anti = is_anticommuting(word, a >> arity, a & (d - 1));
            p += anti ? -c_by_word[a] : c_by_word[a];
        }
        p *= norm;
        if (p < -1e-9) throw ValidationError("transfer coefficients do not define a Pauli channel");
        if (p > 1e-15) terms.push_back({word, p});
    }
    double total = 0.0;
    for (const auto& t : terms) total += t.prob;
    for (auto& t : terms) t.prob /= total;
    return pauli_channel(std::move(terms));
}

NoisyPovm::NoisyPovm(std::vector<ReadoutRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw ValidationError("readout needs at least one qubit");
    for (const auto& r : rows_) {
        if (!(r.p00 >= 0.0 && r.p00 <= 1.0 && r.p11 >= 0.0 && r.p11 <= 1.0)) {
            throw ValidationError("readout probabilities must lie in [0, 1]");
        }
        if (!(r.p00 > 1.0 - r.p11) || !(r.p11 > 1.0 - r.p00)) {
            throw ValidationError("readout rows violate diagonal dominance");
        }
    }
}

double NoisyPovm::p(int j, int k, int l) const {
    const auto& r = rows_.at(static_cast<std::size_t>(j));
    if (l == 0) return k == 0 ? r.p00 : 1.0 - r.p00;
    return k == 1 ? r.p11 : 1.0 - r.p11;
}

RealVector NoisyPovm::effect_diagonal(std::uint64_t outcome) const {
    const int n = num_qubits();
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    RealVector diag(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double v = 1.0;
        for (int j = 0; j < n; ++j) {
            const int shift = n - 1 - j;
            const int k = static_cast<int>((outcome >> shift) & 1U);
            const int l = static_cast<int>((static_cast<std::uint64_t>(i) >> shift) & 1U);
            v *= p(j, k, l);
        }
        diag(i) = v;
    }
    return diag;
}

Matrix NoisyPovm::effect(std::uint64_t outcome) const {
    return effect_diagonal(outcome).cast<cplx>().asDiagonal();
}

NoisyPovm NoisyPovm::subset(std::span<const int> qubits) const {
    std::vector<ReadoutRow> rows;
    for (int q : qubits) rows.push_back(rows_.at(static_cast<std::size_t>(q)));
    return NoisyPovm(std::move(rows));
}

bool NoisyPovm::is_ideal() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const ReadoutRow& r) { return r.p00 == 1.0 && r.p11 == 1.0; });
}

NoisyPovm measurement_noise(std::vector<ReadoutRow> rows) { return NoisyPovm(std::move(rows)); }

Matrix effective_z(const NoisyPovm& noisy, int qubit) {
    if (qubit < 0 || qubit >= noisy.num_qubits()) throw DimensionError("qubit not measured");
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = noisy.p(qubit, 0, 0) - noisy.p(qubit, 1, 0);
    z(1, 1) = -(noisy.p(qubit, 1, 1) - noisy.p(qubit, 0, 1));
    return z;
}

}  // namespace vqc
