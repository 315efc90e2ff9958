#ifndef ULTRADIFF_KOLMOGOROV_HPP
#define ULTRADIFF_KOLMOGOROV_HPP

#include <vector>

#include "ultradiff/measure_tree.hpp"
#include "ultradiff/piecewise.hpp"
#include "ultradiff/rate_kernel.hpp"
#include "ultradiff/spectral.hpp"

namespace ultradiff {

/// A whole-window function split into its support part (the phi of the
/// measure-weighted equation) and the complement part.
struct SplitSolution {
    PiecewiseFunction on_support;
    PiecewiseFunction off_support;
};

/// Zeroes f on zero-density leaves (multiplication by the support indicator).
PiecewiseFunction restrict_to_support(const MeasureTree& tree, const PiecewiseFunction& f);

SplitSolution split_solution(const MeasureTree& tree, const PiecewiseFunction& f);

/// Solves d phi/dt = S(x,t) - R(x) phi(x,t) on every zero-measure leaf, where
/// the source S comes from the spectral expansion of the on-support solution
/// (coefficients in `varphi`). Exact per-leaf integration: each spectral mode
/// contributes c_j phi_j(x) (e^{lambda_j t} - e^{-R(x) t}).
std::vector<PiecewiseFunction> evolve_complement(const SpectralSolver& solver,
                                                 const PiecewiseFunction& phi0,
                                                 const Projection& varphi,
                                                 const std::vector<double>& times);

/// The potential equation rewritten in measure-weighted form: density U*m
/// plus a reaction term V(x) = integral W(|x-y|)(U(y)-U(x)) d_p y over the
/// window (plain Haar weight).
struct PotentialReduction {
    MeasureTree weighted_measure;
    PiecewiseFunction reaction;
};

PotentialReduction reduce_potential(const MeasureTree& tree, const RateProfile& kernel,
                                    const PiecewiseFunction& U);

/// Max entrywise difference between the directly assembled generator of the
/// potential equation (plain Haar) and the weighted-measure generator plus
/// diag(reaction). Zero up to rounding; the CLI reports it.
double potential_generator_residual(const MeasureTree& tree, const RateProfile& kernel,
                                    const PiecewiseFunction& U);

}  // namespace ultradiff

#endif
