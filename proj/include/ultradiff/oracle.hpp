#ifndef ULTRADIFF_ORACLE_HPP
#define ULTRADIFF_ORACLE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ultradiff/measure_tree.hpp"
#include "ultradiff/piecewise.hpp"
#include "ultradiff/rate_kernel.hpp"

namespace ultradiff {

class ScaleGuardExceeded : public std::runtime_error {
  public:
    explicit ScaleGuardExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Dense quadrature matrix of the operator over window leaves:
/// G[x][y] = W(p^{lca level}) * mu(y) off the diagonal, rows summing to zero,
/// so G*f matches the integral for every leaf-constant f.
struct DenseGenerator {
    Base base;
    Window window;
    Eigen::MatrixXd matrix;
    std::vector<double> mu;              // leaf m-measures (density * leaf volume)
    std::vector<std::int64_t> support;   // positive-measure leaf indices
};

/// Desk-scale guard: refuses windows beyond 10^4 leaves.
DenseGenerator build_generator(const MeasureTree& tree, const RateProfile& kernel);

/// Distance level (lowest-common-ancestor level) of two leaves by index.
int lca_level(Base base, Window window, std::int64_t x, std::int64_t y);

/// f(t) = exp(G t) f0. The support block is propagated through the symmetric
/// eigendecomposition of D^{1/2} G D^{-1/2} (D = diag(mu) on the support);
/// complement rows are integrated exactly against that expansion.
std::vector<PiecewiseFunction> expm_apply(const DenseGenerator& gen,
                                          const PiecewiseFunction& f0,
                                          const std::vector<double>& times);

struct JumpProcessConfig {
    std::int64_t initial_leaf = 0;
    double horizon = 1.0;
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
};

struct SimulationResult {
    std::vector<std::int64_t> counts;   // occupancy at the horizon, per leaf
    std::int64_t paths = 0;
    bool absorbing_state_hit = false;   // a zero-exit-rate leaf was reached
    std::vector<double> probability;
    std::vector<double> std_error;      // sqrt(p(1-p)/paths) per leaf
};

/// Gillespie-exact jump simulation on the positive-measure leaves:
/// exponential holding times at rate R(x), targets drawn proportional to
/// rate(x -> y) = mu(y) W(p^{lca}). Identical seeds give identical results.
SimulationResult simulate(const JumpProcessConfig& cfg, const MeasureTree& tree,
                          const RateProfile& kernel);

/// Dense matrix dump: header row of leaf paths, then one row per leaf.
std::string generator_csv(const DenseGenerator& gen);

/// Total-variation distance between two distributions on the same leaf set.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Analytic bound on the expected TV error of an n-path empirical histogram
/// of `exact`: half the sum of per-leaf standard errors.
double tv_error_bound(const std::vector<double>& exact, std::int64_t paths);

}  // namespace ultradiff

#endif
