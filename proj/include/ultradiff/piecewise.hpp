#ifndef ULTRADIFF_PIECEWISE_HPP
#define ULTRADIFF_PIECEWISE_HPP

#include <cstdint>
#include <vector>

#include "ultradiff/measure_tree.hpp"
#include "ultradiff/padic.hpp"

namespace ultradiff {

/// Leaf-resolved real function on a window: one value per leaf in canonical
/// order, default 0. Houses f(x), solutions, and 0/1 ball indicators.
struct PiecewiseFunction {
    Base base;
    Window window;
    std::vector<double> values;

    PiecewiseFunction(Base b, Window w);
    PiecewiseFunction(Base b, Window w, std::vector<double> v);

    static PiecewiseFunction constant(Base b, Window w, double c);
    static PiecewiseFunction indicator(const BallAddress& ball);

    std::int64_t leaf_count() const { return static_cast<std::int64_t>(values.size()); }
    double operator[](std::int64_t leaf) const { return values[static_cast<std::size_t>(leaf)]; }
    double& operator[](std::int64_t leaf) { return values[static_cast<std::size_t>(leaf)]; }

    PiecewiseFunction& operator+=(const PiecewiseFunction& other);
    PiecewiseFunction& operator-=(const PiecewiseFunction& other);
    PiecewiseFunction& operator*=(double s);
};

PiecewiseFunction operator+(PiecewiseFunction a, const PiecewiseFunction& b);
PiecewiseFunction operator-(PiecewiseFunction a, const PiecewiseFunction& b);
PiecewiseFunction operator*(double s, PiecewiseFunction f);

/// L2(m d_p x) inner product: sum of f*g*density*p^{gamma_min} over leaves.
double inner_product_m(const MeasureTree& tree, const PiecewiseFunction& f,
                       const PiecewiseFunction& g);
double norm_m(const MeasureTree& tree, const PiecewiseFunction& f);

/// m-weighted total mass of f (the conserved quantity of the dynamics).
double weighted_total(const MeasureTree& tree, const PiecewiseFunction& f);

double sup_norm(const PiecewiseFunction& f);
double sup_diff(const PiecewiseFunction& a, const PiecewiseFunction& b);

}  // namespace ultradiff

#endif
