#include "ultradiff/oracle.hpp"

#include <cmath>
#include <cstdio>

#include "ultradiff/rng.hpp"
#include "ultradiff/spectral.hpp"

namespace ultradiff {

namespace {

constexpr std::int64_t kOracleLeafGuard = 10000;

/// integral_0^t e^{-rate (t-s)} e^{lam s} ds, stable for rate*t and |lam|*t
/// far beyond the overflow range (both exponentials are <= 1 here).
double duhamel_weight(double lam, double rate, double t) {
    const double z = (lam + rate) * t;
    if (std::abs(z) < 1e-8) return std::exp(-rate * t) * t * (1.0 + z / 2.0);
    return (std::exp(lam * t) - std::exp(-rate * t)) / (lam + rate);
}

}  // namespace

int lca_level(Base base, Window window, std::int64_t x, std::int64_t y) {
    int level = window.gamma_min;
    std::int64_t width = 1;
    while (x / width != y / width) {
        width *= base.value;
        ++level;
    }
    return level;
}

DenseGenerator build_generator(const MeasureTree& tree, const RateProfile& kernel) {
    const std::int64_t n = tree.leaf_count();
    if (n > kOracleLeafGuard) {
        throw ScaleGuardExceeded("window has " + std::to_string(n) +
                                 " leaves; the dense oracle stops at " +
                                 std::to_string(kOracleLeafGuard));
    }
    DenseGenerator gen{tree.base(), tree.window(), Eigen::MatrixXd::Zero(n, n), {}, {}};
    gen.mu.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        gen.mu[static_cast<std::size_t>(i)] = to_double(tree.leaf_measure(i));
        if (tree.density(i) > 0) gen.support.push_back(i);
    }
    for (std::int64_t x = 0; x < n; ++x) {
        double row = 0.0;
        for (std::int64_t y = 0; y < n; ++y) {
            if (y == x) continue;
            const double muy = gen.mu[static_cast<std::size_t>(y)];
            if (muy == 0.0) continue;
            const double w = kernel.value(lca_level(gen.base, gen.window, x, y));
            gen.matrix(x, y) = w * muy;
            row += w * muy;
        }
        gen.matrix(x, x) = -row;
    }
    return gen;
}

std::vector<PiecewiseFunction> expm_apply(const DenseGenerator& gen,
                                          const PiecewiseFunction& f0,
                                          const std::vector<double>& times) {
    const std::int64_t n = gen.matrix.rows();
    if (f0.leaf_count() != n) {
        throw std::invalid_argument("initial condition does not match the generator");
    }
    for (double v : f0.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite initial condition");
    }
    const auto& sup = gen.support;
    const auto s = static_cast<Eigen::Index>(sup.size());

    // Symmetrized support block: H = D^{1/2} G_SS D^{-1/2}.
    Eigen::MatrixXd h(s, s);
    Eigen::VectorXd sqrt_mu(s), f0s(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        sqrt_mu(i) = std::sqrt(gen.mu[static_cast<std::size_t>(sup[i])]);
        f0s(i) = f0[sup[i]];
    }
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
            if (i == j) {
                h(i, j) = gen.matrix(sup[i], sup[i]);
            } else {
                const double w = gen.matrix(sup[i], sup[j]) /
                                 gen.mu[static_cast<std::size_t>(sup[j])];
                h(i, j) = w * sqrt_mu(i) * sqrt_mu(j);
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Eigen::VectorXd lam(s), w_coeff(s);
    if (s > 0) {
        es.compute(h);
        lam = es.eigenvalues();
        w_coeff = es.eigenvectors().transpose() * (sqrt_mu.asDiagonal() * f0s);
    }

    // Complement rows: d phi/dt = sum_k a_k e^{lam_k t} - R phi, integrated
    // exactly. a(x,.) = (G_{x,S} D^{-1/2} Q) .* w.
    std::vector<std::int64_t> comp;
    for (std::int64_t x = 0; x < n; ++x) {
        if (gen.mu[static_cast<std::size_t>(x)] == 0.0) comp.push_back(x);
    }
    Eigen::MatrixXd amp(static_cast<Eigen::Index>(comp.size()), s);
    if (s > 0) {
        for (Eigen::Index ci = 0; ci < static_cast<Eigen::Index>(comp.size()); ++ci) {
            Eigen::RowVectorXd g_row(s);
            for (Eigen::Index j = 0; j < s; ++j) {
                g_row(j) = gen.matrix(comp[ci], sup[j]) / sqrt_mu(j);
            }
            amp.row(ci) = (g_row * es.eigenvectors()).cwiseProduct(w_coeff.transpose());
        }
    }

    std::vector<PiecewiseFunction> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0)) throw std::invalid_argument("times must be nonnegative");
        PiecewiseFunction f(gen.base, gen.window);
        if (s > 0) {
            Eigen::VectorXd evolved =
                es.eigenvectors() * (lam.array() * t).exp().matrix().asDiagonal() * w_coeff;
            for (Eigen::Index i = 0; i < s; ++i) f[sup[i]] = evolved(i) / sqrt_mu(i);
        }
        for (Eigen::Index ci = 0; ci < static_cast<Eigen::Index>(comp.size()); ++ci) {
            const std::int64_t x = comp[ci];
            const double rate = -gen.matrix(x, x);
            double v = std::exp(-rate * t) * f0[x];
            for (Eigen::Index k = 0; k < s; ++k) {
                v += amp(ci, k) * duhamel_weight(lam(k), rate, t);
            }
            f[x] = v;
        }
        out.push_back(std::move(f));
    }
    return out;
}

SimulationResult simulate(const JumpProcessConfig& cfg, const MeasureTree& tree,
                          const RateProfile& kernel) {
    const std::int64_t n = tree.leaf_count();
    if (n > kOracleLeafGuard) {
        throw ScaleGuardExceeded("window has " + std::to_string(n) +
                                 " leaves; the simulator stops at " +
                                 std::to_string(kOracleLeafGuard));
    }
    if (cfg.initial_leaf < 0 || cfg.initial_leaf >= n ||
        !(tree.density(cfg.initial_leaf) > 0)) {
        throw std::invalid_argument("initial leaf must have positive measure");
    }
    if (cfg.paths <= 0) throw std::invalid_argument("path count must be positive");
    if (!(cfg.horizon >= 0)) throw std::invalid_argument("horizon must be nonnegative");

    const Base base = tree.base();
    const Window w = tree.window();
    std::vector<std::int64_t> sup;
    std::vector<double> mu;
    for (std::int64_t i = 0; i < n; ++i) {
        if (tree.density(i) > 0) {
            sup.push_back(i);
            mu.push_back(to_double(tree.leaf_measure(i)));
        }
    }
    const std::size_t s = sup.size();
    std::vector<double> exit_rate(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        exit_rate[i] = total_jump_rate(tree, kernel, sup[i]);
    }
    std::vector<std::size_t> pos_of(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < s; ++i) pos_of[static_cast<std::size_t>(sup[i])] = i;

    SimulationResult result;
    result.counts.assign(static_cast<std::size_t>(n), 0);
    result.paths = cfg.paths;

    std::vector<double> row(s, 0.0);
    Xoshiro256StarStar master(cfg.seed);
    for (std::int64_t path = 0; path < cfg.paths; ++path) {
        Xoshiro256StarStar rng = master;
        master.jump();
        std::size_t cur = pos_of[static_cast<std::size_t>(cfg.initial_leaf)];
        double t = 0.0;
        while (true) {
            const double rate = exit_rate[cur];
            if (rate <= 0.0) {
                result.absorbing_state_hit = true;
                break;
            }
            t += -std::log1p(-rng.uniform01()) / rate;
            if (t > cfg.horizon) break;
            // Draw the target proportional to mu(y) W(p^{lca}).
            double total = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
                row[j] = (j == cur) ? 0.0
                                    : mu[j] * kernel.value(lca_level(base, w, sup[cur], sup[j]));
                total += row[j];
            }
            const double target = rng.uniform01() * total;
            double acc = 0.0;
            std::size_t next = cur;
            for (std::size_t j = 0; j < s; ++j) {
                if (row[j] == 0.0) continue;
                acc += row[j];
                if (target < acc) {
                    next = j;
                    break;
                }
                next = j;  // clamp to the last positive-rate leaf
            }
            cur = next;
        }
        ++result.counts[static_cast<std::size_t>(sup[cur])];
    }

    result.probability.assign(static_cast<std::size_t>(n), 0.0);
    result.std_error.assign(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        const double p =
            static_cast<double>(result.counts[static_cast<std::size_t>(i)]) /
            static_cast<double>(cfg.paths);
        result.probability[static_cast<std::size_t>(i)] = p;
        result.std_error[static_cast<std::size_t>(i)] =
            std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.paths));
    }
    return result;
}

std::string generator_csv(const DenseGenerator& gen) {
    const std::int64_t n = gen.matrix.rows();
    std::string csv = "path";
    for (std::int64_t i = 0; i < n; ++i) {
        csv += "," + leaf_address(gen.base, gen.window, i).path_string();
    }
    csv += "\n";
    char cell[64];
    for (std::int64_t x = 0; x < n; ++x) {
        csv += leaf_address(gen.base, gen.window, x).path_string();
        for (std::int64_t y = 0; y < n; ++y) {
            std::snprintf(cell, sizeof(cell), ",%.17g", gen.matrix(x, y));
            csv += cell;
        }
        csv += "\n";
    }
    return csv;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("distribution size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc / 2.0;
}

double tv_error_bound(const std::vector<double>& exact, std::int64_t paths) {
    if (paths <= 0) throw std::invalid_argument("path count must be positive");
    double acc = 0.0;
    for (double p : exact) {
        acc += std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(paths));
    }
    return acc / 2.0;
}

}  // namespace ultradiff
