#include "ultradiff/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace ultradiff {

namespace {

void check_gamma(const MeasureTree& tree, int gamma) {
    const Window w = tree.window();
    if (gamma <= w.gamma_min || gamma > w.gamma_max) {
        throw std::invalid_argument("gamma must lie in (gamma_min, gamma_max]");
    }
}

void check_parent(const MeasureTree& tree, int gamma, const BallAddress& parent) {
    check_gamma(tree, gamma);
    if (parent.level != gamma) {
        throw std::invalid_argument("parent ball level does not match gamma");
    }
    if (!(parent.window == tree.window()) || parent.base.value != tree.base().value) {
        throw std::invalid_argument("parent ball belongs to a different window");
    }
}

}  // namespace

Rational Eigenfunction::value_at(std::int64_t leaf) const {
    if (leaf < parent_range.first || leaf >= parent_range.second) return Rational(0);
    if (leaf >= sub_range.first && leaf < sub_range.second) return 1 - ratio;
    return -ratio;
}

PiecewiseFunction Eigenfunction::to_piecewise() const {
    PiecewiseFunction f(index.parent.base, index.parent.window);
    const double r = to_double(ratio);
    for (std::int64_t i = parent_range.first; i < parent_range.second; ++i) f[i] = -r;
    for (std::int64_t i = sub_range.first; i < sub_range.second; ++i) f[i] = 1.0 - r;
    return f;
}

Rational IntermediateG::value_at(std::int64_t leaf) const {
    Rational v(0);
    auto [ab, ae] = leaf_range(ball_a);
    auto [bb, be] = leaf_range(ball_b);
    if (leaf >= ab && leaf < ae) v += coeff_a;
    if (leaf >= bb && leaf < be) v -= coeff_b;
    return v;
}

PiecewiseFunction IntermediateG::to_piecewise() const {
    PiecewiseFunction f(ball_a.base, ball_a.window);
    auto [ab, ae] = leaf_range(ball_a);
    auto [bb, be] = leaf_range(ball_b);
    for (std::int64_t i = ab; i < ae; ++i) f[i] += to_double(coeff_a);
    for (std::int64_t i = bb; i < be; ++i) f[i] -= to_double(coeff_b);
    return f;
}

double eigenvalue(const MeasureTree& tree, const RateProfile& kernel, int gamma,
                  const BallAddress& parent) {
    check_parent(tree, gamma, parent);
    if (tree.node_measure(parent) == 0) {
        throw std::invalid_argument("eigenvalue of an empty parent ball");
    }
    const int gmax = tree.window().gamma_max;
    double acc = 0.0;
    for (int i = gamma; i < gmax; ++i) {
        acc += kernel.delta_w(i) * to_double(tree.v_ball(parent, i));
    }
    acc += kernel.value(gmax) * to_double(tree.total_measure());
    return -acc;
}

Eigenfunction eigenfunction_f(const MeasureTree& tree, const EigenfunctionIndex& index) {
    check_parent(tree, index.gamma(), index.parent);
    const BallAddress sub = index.sub_ball();
    const Rational va = tree.node_measure(sub);
    if (va == 0) {
        throw std::invalid_argument("hypothesis V_{gamma-1}(a) != 0 violated");
    }
    const Rational vp = tree.node_measure(index.parent);
    return Eigenfunction{index, va / vp, leaf_range(index.parent), leaf_range(sub)};
}

IntermediateG intermediate_g(const MeasureTree& tree, int gamma, const BallAddress& parent,
                             std::uint32_t a, std::uint32_t b) {
    check_parent(tree, gamma, parent);
    const BallAddress ball_a = child(parent, a);
    const BallAddress ball_b = child(parent, b);
    return IntermediateG{ball_a, ball_b, tree.node_measure(ball_b), tree.node_measure(ball_a)};
}

Rational inner_product_f_exact(const MeasureTree& tree, const EigenfunctionIndex& i1,
                               const EigenfunctionIndex& i2) {
    if (!(i1.parent == i2.parent)) return Rational(0);
    const Rational vp = tree.node_measure(i1.parent);
    if (vp == 0) return Rational(0);
    const Rational va = tree.node_measure(child(i1.parent, i1.a));
    const Rational vb = tree.node_measure(child(i2.parent, i2.a));
    Rational out = -va * vb / vp;
    if (i1.a == i2.a) out += va;
    return out;
}

double inner_product_f(const MeasureTree& tree, const EigenfunctionIndex& i1,
                       const EigenfunctionIndex& i2) {
    return to_double(inner_product_f_exact(tree, i1, i2));
}

std::uint32_t reference_digit(const MeasureTree& tree, const BallAddress& parent) {
    for (std::uint32_t d = 0; d < tree.base().value; ++d) {
        if (tree.node_measure(child(parent, d)) > 0) return d;
    }
    throw std::invalid_argument("reference digit of an empty ball");
}

BasisElement basis_element(const MeasureTree& tree, int gamma, const BallAddress& parent,
                           std::uint32_t b, KSign sign) {
    check_parent(tree, gamma, parent);
    const std::uint32_t ref = reference_digit(tree, parent);
    if (b == ref) {
        throw std::invalid_argument("b coincides with the reference digit");
    }
    const Rational v_ref = tree.node_measure(child(parent, ref));
    const Rational v_b = tree.node_measure(child(parent, b));
    if (v_b == 0) {
        throw std::invalid_argument("sub-ball b has zero measure");
    }
    const Rational v_g = tree.node_measure(parent);

    // (k+1)^2 = V_gamma/V_ref; the + root via its cancellation-free form.
    const double q = to_double(v_g / v_ref);
    double k;
    if (sign == KSign::Plus) {
        k = to_double((v_g - v_ref) / v_ref) / (1.0 + std::sqrt(q));
    } else {
        k = -1.0 - std::sqrt(q);
    }

    const Eigenfunction f_ref = eigenfunction_f(tree, EigenfunctionIndex{parent, ref});
    const Eigenfunction f_b = eigenfunction_f(tree, EigenfunctionIndex{parent, b});
    const double root_vb = std::sqrt(to_double(v_b));
    const double coeff_ref = root_vb / (k * to_double(v_ref));
    const double coeff_b = 1.0 / root_vb;

    PiecewiseFunction fn = coeff_ref * f_ref.to_piecewise();
    fn += coeff_b * f_b.to_piecewise();
    return BasisElement{false, EigenfunctionIndex{parent, b}, ref, k, std::move(fn)};
}

std::vector<BasisElement> enumerate_basis(const MeasureTree& tree, KSign sign,
                                          bool include_constant) {
    std::vector<BasisElement> out;
    const Base base = tree.base();
    const Window w = tree.window();
    for (int gamma = w.gamma_max; gamma > w.gamma_min; --gamma) {
        const std::int64_t nodes = ball_count_at_level(base, w, gamma);
        for (std::int64_t ord = 0; ord < nodes; ++ord) {
            const BallAddress parent = ball_at_ordinal(base, w, gamma, ord);
            if (tree.node_measure(parent) == 0) continue;
            int nonempty = 0;
            for (std::uint32_t d = 0; d < base.value; ++d) {
                if (tree.node_measure(child(parent, d)) > 0) ++nonempty;
            }
            if (nonempty < 2) continue;
            const std::uint32_t ref = reference_digit(tree, parent);
            for (std::uint32_t b = 0; b < base.value; ++b) {
                if (b == ref || tree.node_measure(child(parent, b)) == 0) continue;
                out.push_back(basis_element(tree, gamma, parent, b, sign));
            }
        }
    }
    if (include_constant) {
        if (tree.total_measure() == 0) {
            throw std::invalid_argument("constant mode of a zero-measure tree");
        }
        const double v0 = 1.0 / std::sqrt(to_double(tree.total_measure()));
        out.push_back(BasisElement{true,
                                   EigenfunctionIndex{root_ball(base, w), 0},
                                   0,
                                   0.0,
                                   PiecewiseFunction::constant(base, w, v0)});
    }
    return out;
}

std::vector<EigenfunctionIndex> enumerate_indexes(const MeasureTree& tree) {
    std::vector<EigenfunctionIndex> out;
    const Base base = tree.base();
    const Window w = tree.window();
    for (int gamma = w.gamma_max; gamma > w.gamma_min; --gamma) {
        const std::int64_t nodes = ball_count_at_level(base, w, gamma);
        for (std::int64_t ord = 0; ord < nodes; ++ord) {
            const BallAddress parent = ball_at_ordinal(base, w, gamma, ord);
            if (tree.node_measure(parent) == 0) continue;
            for (std::uint32_t a = 0; a < base.value; ++a) {
                if (tree.node_measure(child(parent, a)) == 0) continue;
                out.push_back(EigenfunctionIndex{parent, a});
            }
        }
    }
    return out;
}

Rational IndicatorExpansion::value_at(const MeasureTree& tree, std::int64_t leaf) const {
    Rational v = constant_coefficient;
    for (const auto& [index, coeff] : terms) {
        v += coeff * eigenfunction_f(tree, index).value_at(leaf);
    }
    return v;
}

PiecewiseFunction IndicatorExpansion::to_piecewise(const MeasureTree& tree) const {
    PiecewiseFunction f =
        PiecewiseFunction::constant(tree.base(), tree.window(), to_double(constant_coefficient));
    for (const auto& [index, coeff] : terms) {
        f += to_double(coeff) * eigenfunction_f(tree, index).to_piecewise();
    }
    return f;
}

IndicatorExpansion expand_indicator(const MeasureTree& tree, const BallAddress& ball) {
    const Rational vb = tree.node_measure(ball);
    if (vb == 0) throw std::invalid_argument("cannot expand a zero-measure ball");
    IndicatorExpansion out;
    BallAddress cur = ball;
    while (!cur.is_root()) {
        const std::uint32_t digit = cur.path.back();
        out.terms.emplace_back(EigenfunctionIndex{parent(cur), digit},
                               vb / tree.node_measure(cur));
        cur = parent(cur);
    }
    out.constant_coefficient = vb / tree.total_measure();
    return out;
}

PiecewiseFunction apply_operator(const MeasureTree& tree, const RateProfile& kernel,
                                 const PiecewiseFunction& f) {
    const Base base = tree.base();
    const Window w = tree.window();
    const std::int64_t n = tree.leaf_count();
    if (f.leaf_count() != n) {
        throw std::invalid_argument("function does not match the tree window");
    }
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) mu[static_cast<std::size_t>(i)] =
        to_double(tree.leaf_measure(i));

    PiecewiseFunction out(base, w);
    for (std::int64_t x = 0; x < n; ++x) {
        const double fx = f[x];
        double acc = 0.0;
        std::int64_t lo = x, hi = x + 1, width = 1;
        for (int level = w.gamma_min + 1; level <= w.gamma_max; ++level) {
            width *= base.value;
            const std::int64_t b = (x / width) * width;
            const std::int64_t e = b + width;
            double ring = 0.0;
            for (std::int64_t y = b; y < lo; ++y) {
                if (mu[static_cast<std::size_t>(y)] != 0) {
                    ring += mu[static_cast<std::size_t>(y)] * (f[y] - fx);
                }
            }
            for (std::int64_t y = hi; y < e; ++y) {
                if (mu[static_cast<std::size_t>(y)] != 0) {
                    ring += mu[static_cast<std::size_t>(y)] * (f[y] - fx);
                }
            }
            acc += kernel.value(level) * ring;
            lo = b;
            hi = e;
        }
        out[x] = acc;
    }
    return out;
}

double total_jump_rate(const MeasureTree& tree, const RateProfile& kernel, std::int64_t leaf) {
    const Window w = tree.window();
    double acc = 0.0;
    std::int64_t width = 1;
    Rational inner = tree.range_measure(leaf, leaf + 1);
    for (int level = w.gamma_min + 1; level <= w.gamma_max; ++level) {
        width *= tree.base().value;
        const std::int64_t b = (leaf / width) * width;
        const Rational outer = tree.range_measure(b, b + width);
        acc += kernel.value(level) * to_double(outer - inner);
        inner = outer;
    }
    return acc;
}

SpectralSolver::SpectralSolver(const MeasureTree& tree, const RateProfile& kernel, KSign sign)
    : tree_(tree), kernel_(kernel), basis_(enumerate_basis(tree, sign, true)) {
    lambdas_.reserve(basis_.size());
    for (const auto& el : basis_) {
        lambdas_.push_back(el.is_constant
                               ? 0.0
                               : eigenvalue(tree_, kernel_, el.index.gamma(), el.index.parent));
    }
    rates_.resize(static_cast<std::size_t>(tree.leaf_count()));
    for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
        rates_[static_cast<std::size_t>(i)] = total_jump_rate(tree_, kernel_, i);
    }
}

double SpectralSolver::rate_at(std::int64_t leaf) const {
    return rates_.at(static_cast<std::size_t>(leaf));
}

Projection SpectralSolver::project(const PiecewiseFunction& f0) const {
    Projection proj;
    proj.coefficients.reserve(basis_.size());
    for (const auto& el : basis_) {
        proj.coefficients.push_back(inner_product_m(tree_, f0, el.function));
    }
    PiecewiseFunction recon(tree_.base(), tree_.window());
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        recon += proj.coefficients[j] * basis_[j].function;
    }
    proj.residual.assign(static_cast<std::size_t>(tree_.leaf_count()), 0.0);
    for (std::int64_t i = 0; i < tree_.leaf_count(); ++i) {
        // The basis spans L2(m), so the remainder lives on zero-measure
        // leaves only; on support the basis reproduces f0 to rounding.
        if (tree_.density(i) == 0) {
            proj.residual[static_cast<std::size_t>(i)] = f0[i] - recon[i];
        }
    }
    return proj;
}

PiecewiseFunction SpectralSolver::evolve(const Projection& proj, double t) const {
    if (proj.coefficients.size() != basis_.size()) {
        throw std::invalid_argument("projection does not match this solver's basis");
    }
    PiecewiseFunction out(tree_.base(), tree_.window());
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        out += (proj.coefficients[j] * std::exp(lambdas_[j] * t)) * basis_[j].function;
    }
    for (std::int64_t i = 0; i < tree_.leaf_count(); ++i) {
        const double r = proj.residual[static_cast<std::size_t>(i)];
        if (r != 0.0) {
            out[i] += r * std::exp(-rates_[static_cast<std::size_t>(i)] * t);
        }
    }
    return out;
}

std::vector<PiecewiseFunction> SpectralSolver::solve_cauchy(
    const PiecewiseFunction& f0, const std::vector<double>& times) const {
    for (double t : times) {
        if (!(t >= 0)) throw std::invalid_argument("times must be nonnegative");
    }
    const Projection proj = project(f0);
    std::vector<PiecewiseFunction> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(evolve(proj, t));
    return out;
}

}  // namespace ultradiff
