#include "vqclab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "vqclab/pauli.hpp"
#include "vqclab/rng.hpp"

namespace vqc {

namespace {

std::vector<int> all_qubits(int n) {
    std::vector<int> q(static_cast<std::size_t>(n));
    std::iota(q.begin(), q.end(), 0);
    return q;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double fidelity_of(CostKind kind, const GateSequence& u, const GateSequence& v, const NoiseSchedule& noise) {
    return CostCircuit(kind, u, v, noise).fidelity();
}

Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    }
    Matrix h = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    return h / es.eigenvalues().cwiseAbs().maxCoeff();
}

// Argmin of f on [lo, hi]: grid, then golden section around the best node.
double minimize_on_interval(const std::function<double(double)>& f, double lo, double hi, int grid = 61) {
    double best_x = lo;
    double best_f = std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / (grid - 1);
    for (int i = 0; i < grid; ++i) {
        const double x = lo + i * step;
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-9) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

Channel as_pauli(const Channel& ch) {
    if (ch.kind() == ChannelKind::pauli) return ch;
    if (ch.kind() == ChannelKind::depolarizing) {
        const std::uint64_t d = dim_for_qubits(ch.arity());
        std::vector<double> c(d * d, ch.depolarizing_p());
        c[0] = 1.0;
        return pauli_channel_from_transfer(ch.arity(), c);
    }
    throw ValidationError("expected a Pauli channel, got " + to_string(ch.kind()));
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix unitary_superop(const Matrix& u) {
    return superoperator_of([&](Matrix& m) { m = u * m * u.adjoint(); }, u.rows());
}

Matrix channel_superop(const Channel& ch, int n) {
    const Embedding e(n, all_qubits(n));
    return superoperator_of([&](Matrix& m) { ch.apply(m, e); }, static_cast<Eigen::Index>(dim_for_qubits(n)));
}

}  // namespace

AffineReport check_depolarizing_affine(CostKind kind, const GateSequence& u, const GateSequence& v,
                                       const NoiseSchedule& noise, double tol) {
    if (noise.has_nonunital()) throw ValidationError("affine law needs unital noise only");
    const CostCircuit c(kind, u, v, noise);
    const auto noisy = c.branch_fidelities();
    const auto clean = c.branch_fidelities_without_global_depol();
    AffineReport r;
    r.p_total = c.global_depol_weight();
    double f_noisy = 0.0;
    double f_clean = 0.0;
    double f_pred = 0.0;
    for (std::size_t b = 0; b < noisy.size(); ++b) {
        const double w = c.branch_weight(b);
        const double t = c.effect_fraction(b);
        r.trace_fraction.push_back(t);
        f_noisy += w * noisy[b];
        f_clean += w * clean[b];
        f_pred += w * (r.p_total[b] * clean[b] + (1.0 - r.p_total[b]) * t);
    }
    r.noisy_cost = 1.0 - f_noisy;
    r.clean_cost = 1.0 - f_clean;
    r.predicted = 1.0 - f_pred;
    r.residual = std::abs(r.noisy_cost - r.predicted);
    r.pass = r.residual <= tol;
    return r;
}

OprReport check_strong_opr_fumc(int theorem, const Matrix& u, const NoiseSchedule& noise, const StrongOprOptions& opt) {
    if (theorem != 1 && theorem != 2) throw ValidationError("strong OPR is checked for theorems 1 and 2");
    const ModelTag want = theorem == 1 ? ModelTag::nm1 : ModelTag::nm2;
    if (noise.tag != want) throw ValidationError("noise instance is tagged " + to_string(noise.tag));
    const int n = qubits_for_dim(u.rows());
    validate_schedule(noise, n, true, true);

    OprReport r;
    r.mode = OprMode::strong;
    r.tolerance = opt.tol;
    r.worst_margin = std::numeric_limits<double>::infinity();
    auto rng = make_stream(opt.seed, {tag(StreamTag::verifier), static_cast<std::uint64_t>(theorem)});
    const GateSequence useq = as_sequence(u, "u");
    const NoiseSchedule none = NoiseSchedule::none();

    for (CostKind kind : opt.kinds) {
        if (!is_fumc(kind)) throw ValidationError("strong OPR concerns the full-unitary costs");
        const double at_u = fidelity_of(kind, useq, useq, noise);
        const double phi = uniform(rng, -kPi, kPi);
        const double at_phase = fidelity_of(kind, useq, as_sequence(std::exp(cplx(0.0, phi)) * u, "v"), noise);
        r.noisy_optimum_sample.push_back(1.0 - at_u);
        r.noisy_optimum_sample.push_back(1.0 - at_phase);
        const double top = std::min(at_u, at_phase);
        for (std::size_t t = 0; t < opt.trials; ++t) {
            const Matrix v = haar_unitary(u.rows(), rng);
            const GateSequence vseq = as_sequence(v, "v");
            const double at_v = fidelity_of(kind, useq, vseq, noise);
            const double margin = top - at_v;
            if (margin < r.worst_margin) r.worst_margin = margin;
            if (margin < -opt.tol && !r.counterexample) {
                r.verdict = "violated";
                r.counterexample = Counterexample{to_string(kind) + ": random V beats U",
                                                  1.0 - fidelity_of(kind, useq, vseq, none), 1.0 - at_v, {}};
            }
        }
        for (std::size_t s = 0; s < opt.slices; ++s) {
            const Matrix g = random_hermitian(u.rows(), rng);
            Eigen::SelfAdjointEigenSolver<Matrix> es(g);
            auto v_at = [&](double theta) {
                const Vector ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, -theta)).array().exp();
                return Matrix(u * es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
            };
            auto cost_at = [&](const NoiseSchedule& ns) {
                return [&, ns](double theta) { return 1.0 - fidelity_of(kind, useq, as_sequence(v_at(theta), "v"), ns); };
            };
            const double clean = minimize_on_interval(cost_at(none), -1.5, 1.5);
            const double noisy = minimize_on_interval(cost_at(noise), -1.5, 1.5);
            r.slices.push_back({clean, noisy});
            if (std::abs(noisy - clean) > opt.angle_tol && !r.counterexample) {
                r.verdict = "violated";
                r.counterexample = Counterexample{to_string(kind) + ": slice argmins differ", cost_at(none)(noisy),
                                                  cost_at(noise)(noisy), {clean, noisy}};
            }
        }
    }
    return r;
}

OprReport check_weak_opr_fisc(int n, const NoiseSchedule& noise, const WeakOprOptions& opt) {
    if (n < 1 || n > 2) throw DimensionError("exhaustive permutation check supports n in {1, 2}");
    if (noise.tag != ModelTag::nm3) throw ValidationError("weak OPR check needs a noise model 3 instance");
    validate_schedule(noise, n, false, true);
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    const auto du = static_cast<std::size_t>(d);

    // Diagonal state after the tau1 layer and the two readout effects.
    Matrix rho = Matrix::Zero(d, d);
    rho(0, 0) = 1.0;
    const Embedding whole(n, all_qubits(n));
    for (const auto& p : noise.tau1) p.channel.apply(rho, whole);
    std::vector<double> q(du);
    for (std::size_t k = 0; k < du; ++k) q[k] = rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
    const NoisyPovm povm = noise.readout ? *noise.readout : NoisyPovm::ideal(1);
    auto row = [&](int j) { return povm.num_qubits() == 1 ? 0 : j; };
    std::vector<double> p_let(du, 1.0);
    std::vector<double> p_llet(du, 0.0);
    for (std::size_t k = 0; k < du; ++k) {
        for (int j = 0; j < n; ++j) {
            const int bit = static_cast<int>((k >> (n - 1 - j)) & 1U);
            const double pj = povm.p(row(j), 0, bit);
            p_let[k] *= pj;
            p_llet[k] += pj / n;
        }
    }

    const GateSequence identity(n);
    const double p_tot = CostCircuit(CostKind::let, as_sequence(Matrix::Identity(d, d), "w"), identity, noise)
                             .global_depol_weight()
                             .front();
    auto sorted_dot = [&](std::vector<double> a, std::vector<double> b) {
        std::sort(a.rbegin(), a.rend());
        std::sort(b.rbegin(), b.rend());
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    const double bound = p_tot * sorted_dot(p_let, q) + (1.0 - p_tot) * mean(p_let);
    const double llet_bound = p_tot * sorted_dot(p_llet, q) + (1.0 - p_tot) * mean(p_llet);

    auto strict_top = [](const std::vector<double>& v) {
        for (std::size_t k = 1; k < v.size(); ++k) {
            if (v[k] >= v[0] - 1e-12) return false;
        }
        return true;
    };

    OprReport r;
    r.mode = OprMode::weak;
    r.tolerance = opt.tol;
    r.bound = bound;
    r.llet_bound = llet_bound;
    r.degenerate = !strict_top(q) || !strict_top(p_let) || !strict_top(p_llet);

    std::vector<int> perm(du);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<double, std::vector<int>>> let_values;
    std::vector<std::pair<double, std::vector<int>>> llet_values;
    do {
        Matrix w = Matrix::Zero(d, d);
        for (std::size_t i = 0; i < du; ++i) w(perm[i], static_cast<Eigen::Index>(i)) = 1.0;
        const GateSequence ws = as_sequence(w, "w");
        let_values.emplace_back(fidelity_of(CostKind::let, ws, identity, noise), perm);
        llet_values.emplace_back(fidelity_of(CostKind::llet, ws, identity, noise), perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    auto member = [&](const std::vector<int>& pm, const std::vector<double>& p) {
        if (pm[0] == 0) return true;
        if (!r.degenerate) return false;
        // Quotient by ties: the image of |0> shares the top readout weight, or
        // the state sent to |0> shares the top input weight.
        const auto pre = static_cast<std::size_t>(std::find(pm.begin(), pm.end(), 0) - pm.begin());
        return std::abs(p[static_cast<std::size_t>(pm[0])] - p[0]) <= 1e-12 || std::abs(q[pre] - q[0]) <= 1e-12;
    };
    auto judge = [&](const std::vector<std::pair<double, std::vector<int>>>& values, double b,
                     const std::vector<double>& p, const std::string& label) {
        double top = -1.0;
        for (const auto& [v, pm] : values) top = std::max(top, v);
        std::size_t count = 0;
        for (const auto& [v, pm] : values) {
            if (v < top - opt.tol) continue;
            ++count;
            if (!member(pm, p) && !r.counterexample) {
                r.verdict = "violated";
                std::vector<double> as_params(pm.begin(), pm.end());
                r.counterexample = Counterexample{label + ": maximizer moves |0>", 1.0, 1.0 - v, as_params};
            }
        }
        if (std::abs(top - b) > opt.tol && !r.counterexample) {
            r.verdict = "violated";
            r.counterexample = Counterexample{label + ": maximum differs from the rearrangement bound", 0.0, 1.0 - top, {}};
        }
        return std::pair{top, count};
    };
    const auto [let_top, let_count] = judge(let_values, bound, p_let, "let");
    const auto [llet_top, llet_count] = judge(llet_values, llet_bound, p_llet, "llet");
    r.max_value = let_top;
    r.llet_max = llet_top;
    r.maximizers = let_count;
    r.worst_margin = std::min(bound - let_top, llet_bound - llet_top);

    auto rng = make_stream(opt.seed, {tag(StreamTag::verifier), 3});
    for (std::size_t s = 0; s < opt.samples; ++s) {
        const GateSequence ws = as_sequence(haar_unitary(d, rng), "w");
        const double let_v = fidelity_of(CostKind::let, ws, identity, noise);
        const double llet_v = fidelity_of(CostKind::llet, ws, identity, noise);
        r.worst_margin = std::min({r.worst_margin, bound - let_v, llet_bound - llet_v});
        if ((let_v > bound + opt.tol || llet_v > llet_bound + opt.tol) && !r.counterexample) {
            r.verdict = "violated";
            r.counterexample = Counterexample{"random W exceeds the bound", 0.0, 1.0 - let_v, {}};
        }
    }
    return r;
}

std::string to_string(CorollaryMode m) {
    switch (m) {
        case CorollaryMode::pauli_conj: return "pauli_conj";
        case CorollaryMode::clifford: return "clifford";
        case CorollaryMode::tensor_depol: return "tensor_depol";
        case CorollaryMode::nonunital_conj: return "nonunital_conj";
        case CorollaryMode::ricochet: return "ricochet";
    }
    return "clifford";
}

CorollaryMode corollary_mode_from_string(const std::string& s) {
    for (auto m : {CorollaryMode::pauli_conj, CorollaryMode::clifford, CorollaryMode::tensor_depol,
                   CorollaryMode::nonunital_conj, CorollaryMode::ricochet}) {
        if (to_string(m) == s) return m;
    }
    throw ValidationError("unknown corollary mode '" + s + "'");
}

Matrix superoperator_of(const std::function<void(Matrix&)>& map, Eigen::Index d) {
    Matrix s(d * d, d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            Matrix e = Matrix::Zero(d, d);
            e(i, j) = 1.0;
            map(e);
            s.col(j * d + i) = Eigen::Map<const Vector>(e.data(), d * d);
        }
    }
    return s;
}

RealMatrix transfer_from_superoperator(const Matrix& s) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
    const int n = qubits_for_dim(d);
    const auto words = d * d;
    std::vector<Matrix> sigma;
    for (Eigen::Index w = 0; w < words; ++w) {
        sigma.push_back(PauliString::hermitian(n, static_cast<std::uint64_t>(w) >> n,
                                               static_cast<std::uint64_t>(w) & static_cast<std::uint64_t>(d - 1))
                            .dense());
    }
    RealMatrix r(words, words);
    for (Eigen::Index b = 0; b < words; ++b) {
        const Vector out = s * Eigen::Map<const Vector>(sigma[static_cast<std::size_t>(b)].data(), words);
        const Eigen::Map<const Matrix> m(out.data(), d, d);
        for (Eigen::Index a = 0; a < words; ++a) {
            r(a, b) = (sigma[static_cast<std::size_t>(a)] * m).trace().real() / static_cast<double>(d);
        }
    }
    return r;
}

CorollaryReport check_corollary_condition(const CorollaryCase& c, double tol) {
    CorollaryReport r;
    if (c.w_layers.empty()) throw ValidationError("corollary check needs at least one layer");
    const Eigen::Index d = c.w_layers.front().rows();
    const int n = qubits_for_dim(d);

    if (c.mode == CorollaryMode::ricochet) {
        const Matrix& m = c.w_layers.front();
        Vector phi = Vector::Zero(d * d);
        for (Eigen::Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
        const Matrix id = Matrix::Identity(d, d);
        r.residual = (kron(id, m.transpose()) * phi - kron(m, id) * phi).norm();
        r.pass = r.residual <= tol;
        return r;
    }

    const std::size_t per_layer = c.mode == CorollaryMode::tensor_depol ? 2 : 1;
    if (c.channels.size() != per_layer * c.w_layers.size()) throw ValidationError("channel count does not match layers");
    Matrix w_total = Matrix::Identity(d, d);
    for (const auto& w : c.w_layers) {
        if (w.rows() != d || !is_unitary(w)) throw ValidationError("layers must be unitaries of one size");
        w_total = w * w_total;
    }

    const Embedding whole(n, all_qubits(n));
    std::vector<int> first(static_cast<std::size_t>(c.split));
    std::iota(first.begin(), first.end(), 0);
    std::vector<int> second(static_cast<std::size_t>(n - c.split));
    std::iota(second.begin(), second.end(), c.split);
    if (c.mode == CorollaryMode::tensor_depol && (c.split < 1 || c.split >= n)) {
        throw ValidationError("tensor_depol needs 0 < split < n");
    }
    const Matrix s_total = superoperator_of(
        [&](Matrix& m) {
            for (std::size_t i = 0; i < c.w_layers.size(); ++i) {
                m = c.w_layers[i] * m * c.w_layers[i].adjoint();
                if (per_layer == 1) {
                    c.channels[i].apply(m, whole);
                } else {
                    c.channels[2 * i].apply(m, Embedding(n, first));
                    c.channels[2 * i + 1].apply(m, Embedding(n, second));
                }
            }
        },
        d);
    const Matrix s_w = unitary_superop(w_total);

    switch (c.mode) {
        case CorollaryMode::pauli_conj:
        case CorollaryMode::nonunital_conj: {
            const Matrix s_hat = unitary_superop(w_total.adjoint()) * s_total;
            RealMatrix t = transfer_from_superoperator(s_hat);
            RealMatrix off = t;
            off.diagonal().setZero();
            if (c.mode == CorollaryMode::nonunital_conj) off.col(0).setZero();
            r.residual = off.cwiseAbs().maxCoeff();
            r.pass = r.residual <= tol;
            if (r.pass && c.mode == CorollaryMode::pauli_conj) {
                const RealVector diag = t.diagonal();
                r.channel = pauli_channel_from_transfer(n, std::span<const double>(diag.data(), diag.size()));
            }
            r.transfer = std::move(t);
            return r;
        }
        case CorollaryMode::clifford: {
            Matrix g = Matrix::Identity(d, d);
            std::optional<Channel> hat;
            try {
                for (std::size_t i = 0; i < c.w_layers.size(); ++i) {
                    g = c.w_layers[i] * g;
                    const Channel moved = commute_through_clifford(as_pauli(c.channels[i]), g.adjoint());
                    hat = hat ? compose_pauli(*hat, moved) : moved;
                }
            } catch (const NotCliffordError&) {
                r.residual = std::numeric_limits<double>::infinity();
                r.pass = false;
                return r;
            }
            r.residual = max_abs(s_total - s_w * channel_superop(*hat, n));
            r.pass = r.residual <= tol;
            r.transfer = hat->transfer_matrix();
            r.channel = std::move(hat);
            return r;
        }
        case CorollaryMode::tensor_depol: {
            double p1 = 1.0;
            double p2 = 1.0;
            for (std::size_t i = 0; i < c.w_layers.size(); ++i) {
                const auto& a = c.channels[2 * i];
                const auto& b = c.channels[2 * i + 1];
                if (a.kind() != ChannelKind::depolarizing || b.kind() != ChannelKind::depolarizing) {
                    throw ValidationError("tensor_depol takes local depolarizing channels");
                }
                if (a.arity() != c.split || b.arity() != n - c.split) throw DimensionError("channel arity does not match split");
                p1 *= a.depolarizing_p();
                p2 *= b.depolarizing_p();
            }
            const auto words = static_cast<std::size_t>(d * d);
            const std::uint64_t low_second = (std::uint64_t{1} << (n - c.split)) - 1;
            std::vector<double> coeff(words);
            for (std::size_t w = 0; w < words; ++w) {
                const std::uint64_t x = w >> n;
                const std::uint64_t z = w & static_cast<std::uint64_t>(d - 1);
                const bool on_first = ((x | z) >> (n - c.split)) != 0;
                const bool on_second = ((x | z) & low_second) != 0;
                coeff[w] = (on_first ? p1 : 1.0) * (on_second ? p2 : 1.0);
            }
            Channel hat = pauli_channel_from_transfer(n, coeff);
            r.residual = max_abs(s_total - s_w * channel_superop(hat, n));
            r.pass = r.residual <= tol;
            r.transfer = hat.transfer_matrix();
            r.channel = std::move(hat);
            return r;
        }
        case CorollaryMode::ricochet: break;
    }
    return r;
}

WarmupReport vqe_warmup_check(const std::vector<LocalTerm>& terms, const std::vector<ReadoutRow>& rows, double tol) {
    const int n = static_cast<int>(terms.size());
    if (n < 1) throw ValidationError("warm-up Hamiltonian needs at least one term");
    if (rows.size() != 1 && rows.size() != terms.size()) throw DimensionError("one readout row per qubit expected");
    for (const auto& rw : rows) {
        if (!(rw.p00 + rw.p11 > 1.0)) throw ValidationError("readout row breaks p00 + p11 > p01 + p10");
    }
    const NoisyPovm povm(rows);
    const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
    Matrix h = Matrix::Zero(d, d);
    Matrix ht = Matrix::Zero(d, d);
    Vector product = Vector::Ones(1);
    for (int j = 0; j < n; ++j) {
        const auto& t = terms[static_cast<std::size_t>(j)];
        if (!(t.coeff > 0.0)) throw ValidationError("coefficients must be positive for a unique ground state");
        if (t.rotation.rows() != 2 || !is_unitary(t.rotation)) throw ValidationError("local rotations must be 2x2 unitaries");
        const std::vector<int> q{j};
        const Matrix zt = effective_z(povm, rows.size() == 1 ? 0 : j);
        h -= t.coeff * embed(t.rotation * gates::z() * t.rotation.adjoint(), q, n);
        ht -= t.coeff * embed(t.rotation * zt * t.rotation.adjoint(), q, n);
        product = kron(product, t.rotation.col(0));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Eigen::SelfAdjointEigenSolver<Matrix> est(ht);
    const Vector g = es.eigenvectors().col(0);
    const Vector gt = est.eigenvectors().col(0);
    WarmupReport r;
    r.fidelity_clean = std::norm(g.dot(product));
    r.fidelity_noisy = std::norm(gt.dot(product));
    r.fidelity_between = std::norm(g.dot(gt));
    r.pass = r.fidelity_clean >= 1.0 - tol && r.fidelity_noisy >= 1.0 - tol && r.fidelity_between >= 1.0 - tol;
    return r;
}

SandwichReport check_cost_sandwiches(std::size_t trials, std::uint64_t seed, double slack) {
    SandwichReport r;
    r.trials = trials;
    r.worst_fumc_slack = std::numeric_limits<double>::infinity();
    r.worst_fisc_slack = std::numeric_limits<double>::infinity();
    auto rng = make_stream(seed, {tag(StreamTag::verifier), 7});
    const NoiseSchedule none = NoiseSchedule::none();
    for (std::size_t t = 0; t < trials; ++t) {
        const int n = 2 + static_cast<int>(t % 2);
        const auto d = static_cast<Eigen::Index>(dim_for_qubits(n));
        const GateSequence u = as_sequence(haar_unitary(d, rng), "u");
        const GateSequence v = as_sequence(haar_unitary(d, rng), "v");
        const double hst = 1.0 - fidelity_of(CostKind::hst, u, v, none);
        const double lhst = 1.0 - fidelity_of(CostKind::lhst, u, v, none);
        const double let = 1.0 - fidelity_of(CostKind::let, u, v, none);
        const double llet = 1.0 - fidelity_of(CostKind::llet, u, v, none);
        r.worst_fumc_slack = std::min({r.worst_fumc_slack, hst - lhst, n * lhst - hst});
        r.worst_fisc_slack = std::min({r.worst_fisc_slack, let - llet, n * llet - let});
    }
    r.pass = r.worst_fumc_slack >= slack && r.worst_fisc_slack >= slack;
    return r;
}

Channel random_pauli_channel(int arity, std::uint64_t seed, std::size_t words) {
    auto rng = make_stream(seed, {tag(StreamTag::verifier), 11, static_cast<std::uint64_t>(arity)});
    const std::uint64_t d = dim_for_qubits(arity);
    const double p_id = uniform(rng, 0.5, 0.95);
    std::uniform_int_distribution<std::uint64_t> pick(1, d * d - 1);
    std::vector<PauliTerm> terms{{PauliString::identity(arity), p_id}};
    std::vector<double> share(words);
    for (auto& s : share) s = uniform(rng, 0.05, 1.0);
    const double total = std::accumulate(share.begin(), share.end(), 0.0);
    for (std::size_t k = 0; k < words; ++k) {
        const std::uint64_t w = pick(rng);
        terms.push_back({PauliString(arity, w >> arity, w & (d - 1)), (1.0 - p_id) * share[k] / total});
    }
    return pauli_channel(std::move(terms), true);
}

namespace {

NoisyPovm random_readout(int qubits, std::mt19937_64& rng) {
    std::vector<ReadoutRow> rows;
    for (int q = 0; q < qubits; ++q) rows.push_back({uniform(rng, 0.85, 0.99), uniform(rng, 0.85, 0.99)});
    return measurement_noise(std::move(rows));
}

Channel random_dampers(int n, std::mt19937_64& rng) {
    std::vector<Channel> locals;
    for (int q = 0; q < n; ++q) locals.push_back(amplitude_damping(uniform(rng, 0.0, 0.2)));
    return nonunital_pauli_from_locals(std::move(locals));
}

}  // namespace

NoiseSchedule random_nm1(int n, std::uint64_t seed) {
    auto rng = make_stream(seed, {tag(StreamTag::verifier), 21});
    Nm1Params p;
    p.global_depol = uniform(rng, 0.95, 0.999);
    p.tau1_pauli = random_pauli_channel(2 * n, rng());
    p.tau2_pauli = random_pauli_channel(2 * n, rng());
    p.a_depol = uniform(rng, 0.9, 0.99);
    p.b_nupn = random_dampers(n, rng);
    p.gate_pre = random_pauli_channel(2 * n, rng());
    p.gate_post = random_pauli_channel(2 * n, rng());
    p.readout = random_readout(2 * n, rng);
    return noise_model_1(n, p);
}

NoiseSchedule random_nm2(int n, std::uint64_t seed) {
    auto rng = make_stream(seed, {tag(StreamTag::verifier), 22});
    Nm2Params p;
    p.global_depol = uniform(rng, 0.95, 0.999);
    p.tau1_pauli = random_pauli_channel(2 * n, rng());
    p.tau2_pauli = random_pauli_channel(2 * n, rng());
    p.a_nupn_tau1 = random_dampers(n, rng);
    p.a_depol = uniform(rng, 0.9, 0.99);
    p.b_pauli = random_pauli_channel(n, rng());
    p.gate_pre = random_pauli_channel(2 * n, rng());
    p.gate_post = random_pauli_channel(2 * n, rng());
    p.readout = random_readout(2 * n, rng);
    return noise_model_2(n, p);
}

NoiseSchedule random_nm3(int n, std::uint64_t seed) {
    auto rng = make_stream(seed, {tag(StreamTag::verifier), 23});
    Nm3Params p;
    p.global_depol = uniform(rng, 0.95, 0.999);
    p.tau1_pauli = random_pauli_channel(n, rng());
    p.readout = random_readout(n, rng);
    return noise_model_3(n, p);
}

nlohmann::json to_json(const AffineReport& r) {
    return {{"pass", r.pass},           {"residual", r.residual},   {"noisy_cost", r.noisy_cost},
            {"clean_cost", r.clean_cost}, {"predicted", r.predicted}, {"p_total", r.p_total},
            {"trace_fraction", r.trace_fraction}};
}

nlohmann::json to_json(const OprReport& r) {
    nlohmann::json j{{"mode", r.mode == OprMode::strong ? "strong" : "weak"},
                     {"verdict", r.verdict},
                     {"worst_margin", r.worst_margin},
                     {"tolerance", r.tolerance},
                     {"noisy_optimum_sample", r.noisy_optimum_sample},
                     {"degenerate", r.degenerate}};
    nlohmann::json slices = nlohmann::json::array();
    for (const auto& s : r.slices) slices.push_back({{"noiseless_argmin", s.noiseless_argmin}, {"noisy_argmin", s.noisy_argmin}});
    j["slices"] = std::move(slices);
    if (r.bound) j["bound"] = *r.bound;
    if (r.max_value) j["max_value"] = *r.max_value;
    if (r.llet_bound) j["llet_bound"] = *r.llet_bound;
    if (r.llet_max) j["llet_max"] = *r.llet_max;
    if (r.mode == OprMode::weak) j["maximizers"] = r.maximizers;
    if (r.counterexample) {
        j["counterexample"] = {{"description", r.counterexample->description},
                               {"noiseless_cost", r.counterexample->noiseless_cost},
                               {"noisy_cost", r.counterexample->noisy_cost},
                               {"params", r.counterexample->params}};
    }
    return j;
}

nlohmann::json to_json(const CorollaryReport& r) {
    nlohmann::json j{{"pass", r.pass}, {"residual", r.residual}};
    if (r.channel) j["channel"] = r.channel->describe();
    return j;
}

nlohmann::json to_json(const WarmupReport& r) {
    return {{"pass", r.pass},
            {"fidelity_clean", r.fidelity_clean},
            {"fidelity_noisy", r.fidelity_noisy},
            {"fidelity_between", r.fidelity_between}};
}

nlohmann::json to_json(const SandwichReport& r) {
    return {{"pass", r.pass},
            {"trials", r.trials},
            {"worst_fumc_slack", r.worst_fumc_slack},
            {"worst_fisc_slack", r.worst_fisc_slack}};
}

}  // namespace vqc
