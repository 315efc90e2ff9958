#include "ultradiff/piecewise.hpp"

#include <cmath>
#include <stdexcept>

namespace ultradiff {

namespace {

void require_same_shape(const PiecewiseFunction& a, const PiecewiseFunction& b) {
    if (a.base.value != b.base.value || a.window.gamma_min != b.window.gamma_min ||
        a.window.gamma_max != b.window.gamma_max) {
        throw std::invalid_argument("piecewise functions live on different windows");
    }
}

}  // namespace

PiecewiseFunction::PiecewiseFunction(Base b, Window w)
    : base(b), window(w),
      values(static_cast<std::size_t>(ultradiff::leaf_count(b, w)), 0.0) {}

PiecewiseFunction::PiecewiseFunction(Base b, Window w, std::vector<double> v)
    : base(b), window(w), values(std::move(v)) {
    if (static_cast<std::int64_t>(values.size()) != ultradiff::leaf_count(b, w)) {
        throw std::invalid_argument("value vector size does not match window leaf count");
    }
}

PiecewiseFunction PiecewiseFunction::constant(Base b, Window w, double c) {
    PiecewiseFunction f(b, w);
    for (auto& v : f.values) v = c;
    return f;
}

PiecewiseFunction PiecewiseFunction::indicator(const BallAddress& ball) {
    PiecewiseFunction f(ball.base, ball.window);
    auto [begin, end] = leaf_range(ball);
    for (std::int64_t i = begin; i < end; ++i) f[i] = 1.0;
    return f;
}

PiecewiseFunction& PiecewiseFunction::operator+=(const PiecewiseFunction& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
}

PiecewiseFunction& PiecewiseFunction::operator-=(const PiecewiseFunction& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
    return *this;
}

PiecewiseFunction& PiecewiseFunction::operator*=(double s) {
    for (auto& v : values) v *= s;
    return *this;
}

PiecewiseFunction operator+(PiecewiseFunction a, const PiecewiseFunction& b) { return a += b; }
PiecewiseFunction operator-(PiecewiseFunction a, const PiecewiseFunction& b) { return a -= b; }
PiecewiseFunction operator*(double s, PiecewiseFunction f) { return f *= s; }

double inner_product_m(const MeasureTree& tree, const PiecewiseFunction& f,
                       const PiecewiseFunction& g) {
    require_same_shape(f, g);
    if (f.leaf_count() != tree.leaf_count()) {
        throw std::invalid_argument("function does not match the tree window");
    }
    double acc = 0.0;
    for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
        if (tree.density(i) == 0) continue;
        acc += f[i] * g[i] * to_double(tree.leaf_measure(i));
    }
    return acc;
}

double norm_m(const MeasureTree& tree, const PiecewiseFunction& f) {
    return std::sqrt(inner_product_m(tree, f, f));
}

double weighted_total(const MeasureTree& tree, const PiecewiseFunction& f) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
        if (tree.density(i) == 0) continue;
        acc += f[i] * to_double(tree.leaf_measure(i));
    }
    return acc;
}

double sup_norm(const PiecewiseFunction& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double sup_diff(const PiecewiseFunction& a, const PiecewiseFunction& b) {
    require_same_shape(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

}  // namespace ultradiff
