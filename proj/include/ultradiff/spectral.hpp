#ifndef ULTRADIFF_SPECTRAL_HPP
#define ULTRADIFF_SPECTRAL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "ultradiff/measure_tree.hpp"
#include "ultradiff/padic.hpp"
#include "ultradiff/piecewise.hpp"
#include "ultradiff/rate_kernel.hpp"
#include "ultradiff/rational.hpp"

namespace ultradiff {

/// The triple (gamma, n, a): parent ball at level gamma (its path plays the
/// role of n), sub-ball selector digit a one level below.
struct EigenfunctionIndex {
    BallAddress parent;
    std::uint32_t a = 0;

    int gamma() const { return parent.level; }
    BallAddress sub_ball() const { return child(parent, a); }

    friend bool operator==(const EigenfunctionIndex&, const EigenfunctionIndex&) = default;
};

struct Eigenpair {
    EigenfunctionIndex index;
    double lambda = 0.0;
};

/// f_{gamma,n,a} = Omega_{sub-ball a} - ratio * Omega_parent where
/// ratio = V_{gamma-1}(a)/V_gamma(parent). Piecewise rational: 1 - ratio on
/// the a sub-ball, -ratio on the rest of the parent, 0 outside, so identities
/// like sum_a f_{gamma,n,a} = 0 can be checked exactly.
struct Eigenfunction {
    EigenfunctionIndex index;
    Rational ratio;
    std::pair<std::int64_t, std::int64_t> parent_range;
    std::pair<std::int64_t, std::int64_t> sub_range;

    Rational value_at(std::int64_t leaf) const;
    PiecewiseFunction to_piecewise() const;
};

/// g_{gamma,n,a,b} = V_{gamma-1}(b) * Omega_a - V_{gamma-1}(a) * Omega_b.
struct IntermediateG {
    BallAddress ball_a;
    BallAddress ball_b;
    Rational coeff_a;  // V_{gamma-1}(b)
    Rational coeff_b;  // V_{gamma-1}(a)

    Rational value_at(std::int64_t leaf) const;
    PiecewiseFunction to_piecewise() const;
};

/// Sign choice for k = -1 +/- sqrt(V_gamma/V_ref); both give orthonormal sets.
enum class KSign { Plus, Minus };

/// phi_{gamma,n,b} = (sqrt(V_b)/(k V_ref)) f_ref + (1/sqrt(V_b)) f_b with
/// (k+1)^2 = V_gamma/V_ref. The constant mode 1/sqrt(total) is modeled as an
/// element with is_constant set (index/k meaningless there).
struct BasisElement {
    bool is_constant = false;
    EigenfunctionIndex index;  // index.a is the digit b
    std::uint32_t reference_digit = 0;
    double k = 0.0;
    PiecewiseFunction function;
};

/// lambda_{gamma,n} for the parent ball at level gamma, evaluated in closed
/// form under the compact-support convention (V_i saturates at the total,
/// the kernel tail vanishes past the window).
double eigenvalue(const MeasureTree& tree, const RateProfile& kernel, int gamma,
                  const BallAddress& parent);

Eigenfunction eigenfunction_f(const MeasureTree& tree, const EigenfunctionIndex& index);

IntermediateG intermediate_g(const MeasureTree& tree, int gamma, const BallAddress& parent,
                             std::uint32_t a, std::uint32_t b);

/// (f_1, f_2) in L2(m d_p x), closed form: zero across distinct (gamma, n),
/// else delta_{aa'} V_{gamma-1}(a) - V_{gamma-1}(a) V_{gamma-1}(a')/V_gamma.
Rational inner_product_f_exact(const MeasureTree& tree, const EigenfunctionIndex& i1,
                               const EigenfunctionIndex& i2);
double inner_product_f(const MeasureTree& tree, const EigenfunctionIndex& i1,
                       const EigenfunctionIndex& i2);

/// Smallest digit whose sub-ball has nonzero measure; the canonical reference
/// child for the basis construction. Throws when the parent ball is empty.
std::uint32_t reference_digit(const MeasureTree& tree, const BallAddress& parent);

BasisElement basis_element(const MeasureTree& tree, int gamma, const BallAddress& parent,
                           std::uint32_t b, KSign sign = KSign::Plus);

/// All basis elements, coarse to fine, parents in path order, b ascending;
/// the constant mode is appended last when requested. Element count equals
/// the number of positive-measure leaves when the constant is included.
std::vector<BasisElement> enumerate_basis(const MeasureTree& tree, KSign sign = KSign::Plus,
                                          bool include_constant = true);

/// Every admissible (gamma, parent, a) with V_{gamma-1}(a) != 0, in the same
/// deterministic order. Single-child nodes are included: their f is null in
/// L2(m) but still satisfies the eigen-relation leaf-wise.
std::vector<EigenfunctionIndex> enumerate_indexes(const MeasureTree& tree);

/// Omega_ball = sum of rational-coefficient eigenfunction terms along the
/// ancestor chain plus a constant component (exact, finite).
struct IndicatorExpansion {
    std::vector<std::pair<EigenfunctionIndex, Rational>> terms;
    Rational constant_coefficient;

    Rational value_at(const MeasureTree& tree, std::int64_t leaf) const;
    PiecewiseFunction to_piecewise(const MeasureTree& tree) const;
};

IndicatorExpansion expand_indicator(const MeasureTree& tree, const BallAddress& ball);

/// Exact quadrature of (W_m f)(x) = integral m(y) W(|x-y|)(f(y)-f(x)) d_p y
/// per leaf, grouping y by the distance level (lowest common ancestor).
PiecewiseFunction apply_operator(const MeasureTree& tree, const RateProfile& kernel,
                                 const PiecewiseFunction& f);

/// R(x) = integral W(|x-y|) dmu(y): total jump rate out of leaf x.
double total_jump_rate(const MeasureTree& tree, const RateProfile& kernel, std::int64_t leaf);

/// Expansion of an initial condition over the orthonormal basis, plus the
/// leaf-wise remainder (nonzero only on zero-measure leaves, where the basis
/// carries no information).
struct Projection {
    std::vector<double> coefficients;  // aligned with SpectralSolver::basis()
    std::vector<double> residual;
};

class SpectralSolver {
  public:
    SpectralSolver(const MeasureTree& tree, const RateProfile& kernel,
                   KSign sign = KSign::Plus);

    const MeasureTree& tree() const { return tree_; }
    const RateProfile& kernel() const { return kernel_; }
    const std::vector<BasisElement>& basis() const { return basis_; }
    /// Eigenvalue of basis()[j] (0 for the constant mode).
    const std::vector<double>& eigenvalues() const { return lambdas_; }
    double rate_at(std::int64_t leaf) const;

    Projection project(const PiecewiseFunction& f0) const;

    /// Reassembles sum_j c_j e^{lambda_j t} phi_j; the off-support remainder
    /// decays at the leaf's own total jump rate, which makes this the exact
    /// whole-window solution, not just the L2(m) one.
    PiecewiseFunction evolve(const Projection& proj, double t) const;

    std::vector<PiecewiseFunction> solve_cauchy(const PiecewiseFunction& f0,
                                                const std::vector<double>& times) const;

  private:
    const MeasureTree& tree_;
    const RateProfile& kernel_;
    std::vector<BasisElement> basis_;
    std::vector<double> lambdas_;
    std::vector<double> rates_;
};

}  // namespace ultradiff

#endif
