#ifndef ULTRADIFF_MEASURE_TREE_HPP
#define ULTRADIFF_MEASURE_TREE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ultradiff/padic.hpp"
#include "ultradiff/rational.hpp"

namespace ultradiff {

/// Hierarchical measure m(x) d_p x over a window: a nonnegative rational
/// density per leaf cell, with exact prefix sums so any ball measure V_i(x)
/// is an O(1) range query. Immutable after construction.
class MeasureTree {
  public:
    /// densities are per-leaf m values in canonical leaf order; leaf measure
    /// is density * p^gamma_min (the Haar volume of a leaf).
    MeasureTree(Base base, Window window, std::vector<Rational> densities);

    static MeasureTree uniform(Base base, Window window, const Rational& density);
    static MeasureTree from_leaf_table(Base base, Window window,
                                       const std::map<std::string, Rational>& leaves);
    static MeasureTree from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    Base base() const { return base_; }
    Window window() const { return window_; }
    std::int64_t leaf_count() const { return static_cast<std::int64_t>(densities_.size()); }
    const Rational& leaf_volume() const { return leaf_volume_; }

    const Rational& density(std::int64_t leaf) const;
    Rational leaf_measure(std::int64_t leaf) const;
    Rational node_measure(const BallAddress& ball) const;
    const Rational& total_measure() const;

    /// V_i(x): measure of the ball of radius p^i containing x. Saturates at
    /// total_measure for i >= gamma_max (compact-support convention); levels
    /// below gamma_min are an error.
    Rational v_ball(const BallAddress& b, int level) const;
    Rational v_ball(std::int64_t leaf, int level) const;
    Rational v_ball(const PAdicApprox& x, int level) const;

    std::vector<std::int64_t> support_leaves() const;
    bool is_support_leaf(std::int64_t leaf) const { return density(leaf) > 0; }

    BallAddress leaf_address(std::int64_t index) const;
    std::int64_t leaf_index_of(const BallAddress& leaf) const;

    /// Measure of the half-open leaf range [begin, end).
    Rational range_measure(std::int64_t begin, std::int64_t end) const;

  private:
    Base base_;
    Window window_;
    Rational leaf_volume_;
    std::vector<Rational> densities_;
    std::vector<Rational> prefix_;  // prefix_[k] = measure of leaves [0, k)
};

/// Declared tail behaviour of V_i beyond the window, used only by the growth
/// diagnostic below.
struct TailModel {
    enum class Kind { Constant, Exponential, Polynomial };
    Kind kind = Kind::Constant;
    double scale = 1.0;   // c in c*p^i or c*i^degree; the constant value itself
    double degree = 0.0;  // polynomial only
    std::uint32_t p = 2;  // exponential only

    static TailModel constant(double total) { return {Kind::Constant, total, 0.0, 2}; }
    static TailModel exponential(double c, std::uint32_t p) { return {Kind::Exponential, c, 0.0, p}; }
    static TailModel polynomial(double c, double degree) { return {Kind::Polynomial, c, degree, 2}; }

    double value_at(int i) const;
};

struct GrowthReport {
    std::string verdict;  // "satisfied" | "violated" | "inconclusive"
    double beta = 0.0;
    std::vector<std::pair<int, double>> samples;  // (i, i^beta / V_i)
};

/// Checks lim_i i^beta / V_i = 0 for the declared tail model and reports the
/// sampled ratio sequence up to the horizon.
GrowthReport check_growth_condition(const TailModel& tail, double beta, int horizon);

}  // namespace ultradiff

#endif
