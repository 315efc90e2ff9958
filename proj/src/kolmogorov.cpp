#include "ultradiff/kolmogorov.hpp"

#include <cmath>
#include <stdexcept>

#include "ultradiff/oracle.hpp"

namespace ultradiff {

PiecewiseFunction restrict_to_support(const MeasureTree& tree, const PiecewiseFunction& f) {
    if (f.leaf_count() != tree.leaf_count()) {
        throw std::invalid_argument("function does not match the tree window");
    }
    PiecewiseFunction out = f;
    for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
        if (tree.density(i) == 0) out[i] = 0.0;
    }
    return out;
}

SplitSolution split_solution(const MeasureTree& tree, const PiecewiseFunction& f) {
    PiecewiseFunction on = restrict_to_support(tree, f);
    PiecewiseFunction off = f;
    off -= on;
    return SplitSolution{std::move(on), std::move(off)};
}

std::vector<PiecewiseFunction> evolve_complement(const SpectralSolver& solver,
                                                 const PiecewiseFunction& phi0,
                                                 const Projection& varphi,
                                                 const std::vector<double>& times) {
    const MeasureTree& tree = solver.tree();
    if (phi0.leaf_count() != tree.leaf_count()) {
        throw std::invalid_argument("phi0 does not match the tree window");
    }
    if (varphi.coefficients.size() != solver.basis().size()) {
        throw std::invalid_argument("projection does not match the solver basis");
    }
    for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
        if (tree.density(i) > 0 && phi0[i] != 0.0) {
            throw std::invalid_argument("phi0 must vanish on the support");
        }
    }

    std::vector<PiecewiseFunction> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0)) throw std::invalid_argument("times must be nonnegative");
        PiecewiseFunction phi(tree.base(), tree.window());
        for (std::int64_t x = 0; x < tree.leaf_count(); ++x) {
            if (tree.density(x) > 0) continue;
            const double rate = solver.rate_at(x);
            const double decay = std::exp(-rate * t);
            double v = decay * phi0[x];
            for (std::size_t j = 0; j < solver.basis().size(); ++j) {
                const double val = solver.basis()[j].function[x];
                if (val == 0.0) continue;
                v += varphi.coefficients[j] * val *
                     (std::exp(solver.eigenvalues()[j] * t) - decay);
            }
            phi[x] = v;
        }
        out.push_back(std::move(phi));
    }
    return out;
}

PotentialReduction reduce_potential(const MeasureTree& tree, const RateProfile& kernel,
                                    const PiecewiseFunction& U) {
    const std::int64_t n = tree.leaf_count();
    if (U.leaf_count() != n) {
        throw std::invalid_argument("potential does not match the tree window");
    }
    std::vector<Rational> weighted(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        if (!(U[i] >= 0)) throw std::invalid_argument("potential must be nonnegative");
        weighted[static_cast<std::size_t>(i)] = Rational(U[i]) * tree.density(i);
    }
    MeasureTree wm(tree.base(), tree.window(), std::move(weighted));

    // Reaction V(x) with the plain Haar weight: one leaf volume per cell.
    const Base base = tree.base();
    const Window w = tree.window();
    const double vol = to_double(rational_pow(base.value, w.gamma_min));
    PiecewiseFunction reaction(base, w);
    for (std::int64_t x = 0; x < n; ++x) {
        double acc = 0.0;
        std::int64_t lo = x, hi = x + 1, width = 1;
        for (int level = w.gamma_min + 1; level <= w.gamma_max; ++level) {
            width *= base.value;
            const std::int64_t b = (x / width) * width;
            const std::int64_t e = b + width;
            double ring = 0.0;
            for (std::int64_t y = b; y < lo; ++y) ring += U[y] - U[x];
            for (std::int64_t y = hi; y < e; ++y) ring += U[y] - U[x];
            acc += kernel.value(level) * vol * ring;
            lo = b;
            hi = e;
        }
        reaction[x] = acc;
    }
    return PotentialReduction{std::move(wm), std::move(reaction)};
}

double potential_generator_residual(const MeasureTree& tree, const RateProfile& kernel,
                                    const PiecewiseFunction& U) {
    const Base base = tree.base();
    const Window w = tree.window();
    const std::int64_t n = tree.leaf_count();

    // Direct assembly of the potential-equation generator over plain Haar:
    // A[x][y] = W(p^lca) vol U(y), A[x][x] = -U(x) sum_{y != x} W vol.
    const double vol = to_double(rational_pow(base.value, w.gamma_min));
    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(n, n);
    for (std::int64_t x = 0; x < n; ++x) {
        double wsum = 0.0;
        for (std::int64_t y = 0; y < n; ++y) {
            if (y == x) continue;
            const double wv = kernel.value(lca_level(base, w, x, y)) * vol;
            direct(x, y) = wv * U[y];
            wsum += wv;
        }
        direct(x, x) = -U[x] * wsum;
    }

    // Composed form: generator of the U-weighted Haar measure plus diag(V).
    std::vector<Rational> haar_u(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        if (!(U[i] >= 0)) throw std::invalid_argument("potential must be nonnegative");
        haar_u[static_cast<std::size_t>(i)] = Rational(U[i]);
    }
    MeasureTree haar_tree(base, w, std::move(haar_u));
    DenseGenerator weighted = build_generator(haar_tree, kernel);
    MeasureTree plain = MeasureTree::uniform(base, w, Rational(1));
    PiecewiseFunction reaction = reduce_potential(plain, kernel, U).reaction;
    Eigen::MatrixXd composed = weighted.matrix;
    for (std::int64_t x = 0; x < n; ++x) composed(x, x) += reaction[x];

    return (direct - composed).cwiseAbs().maxCoeff();
}

}  // namespace ultradiff
