#include "ultradiff/measure_tree.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ultradiff {

MeasureTree::MeasureTree(Base base, Window window, std::vector<Rational> densities)
    : base_(base),
      window_(window),
      leaf_volume_(rational_pow(base.value, window.gamma_min)),
      densities_(std::move(densities)) {
    const std::int64_t n = ultradiff::leaf_count(base_, window_);
    if (static_cast<std::int64_t>(densities_.size()) != n) {
        throw std::invalid_argument("density vector size does not match window leaf count");
    }
    prefix_.resize(densities_.size() + 1);
    prefix_[0] = 0;
    for (std::size_t k = 0; k < densities_.size(); ++k) {
        if (densities_[k] < 0) {
            throw std::invalid_argument("negative density at leaf " + std::to_string(k));
        }
        prefix_[k + 1] = prefix_[k] + densities_[k] * leaf_volume_;
    }
}

MeasureTree MeasureTree::uniform(Base base, Window window, const Rational& density) {
    const std::int64_t n = ultradiff::leaf_count(base, window);
    return MeasureTree(base, window, std::vector<Rational>(static_cast<std::size_t>(n), density));
}

MeasureTree MeasureTree::from_leaf_table(Base base, Window window,
                                         const std::map<std::string, Rational>& leaves) {
    const std::int64_t n = ultradiff::leaf_count(base, window);
    std::vector<Rational> dens(static_cast<std::size_t>(n), Rational(0));
    for (const auto& [path, value] : leaves) {
        if (static_cast<int>(path.size()) != window.depth()) {
            throw std::invalid_argument("leaf path '" + path + "' has wrong length for window");
        }
        BallAddress addr = ball_from_path(base, window, path);
        dens[static_cast<std::size_t>(leaf_index(addr))] = value;
    }
    return MeasureTree(base, window, std::move(dens));
}

MeasureTree MeasureTree::from_json(const nlohmann::json& j) {
    Base base(j.at("p").get<std::uint32_t>());
    Window window{j.at("gamma_min").get<int>(), j.at("gamma_max").get<int>()};
    std::map<std::string, Rational> leaves;
    for (const auto& [path, value] : j.at("leaves").items()) {
        leaves[path] = parse_rational(value.get<std::string>());
    }
    return from_leaf_table(base, window, leaves);
}

nlohmann::json MeasureTree::to_json() const {
    nlohmann::json leaves = nlohmann::json::object();
    for (std::int64_t i = 0; i < leaf_count(); ++i) {
        if (densities_[static_cast<std::size_t>(i)] == 0) continue;
        leaves[leaf_address(i).path_string()] =
            rational_to_string(densities_[static_cast<std::size_t>(i)]);
    }
    return nlohmann::json{{"p", base_.value},
                          {"gamma_min", window_.gamma_min},
                          {"gamma_max", window_.gamma_max},
                          {"leaves", leaves}};
}

const Rational& MeasureTree::density(std::int64_t leaf) const {
    if (leaf < 0 || leaf >= leaf_count()) throw std::out_of_range("leaf index out of range");
    return densities_[static_cast<std::size_t>(leaf)];
}

Rational MeasureTree::leaf_measure(std::int64_t leaf) const {
    return density(leaf) * leaf_volume_;
}

Rational MeasureTree::node_measure(const BallAddress& ball) const {
    auto [begin, end] = leaf_range(ball);
    return range_measure(begin, end);
}

const Rational& MeasureTree::total_measure() const { return prefix_.back(); }

Rational MeasureTree::v_ball(const BallAddress& b, int level) const {
    if (level >= window_.gamma_max) return total_measure();
    if (level < window_.gamma_min) {
        throw std::out_of_range("ball level below window resolution");
    }
    return node_measure(ancestor_at(b, level));
}

Rational MeasureTree::v_ball(std::int64_t leaf, int level) const {
    return v_ball(leaf_address(leaf), level);
}

Rational MeasureTree::v_ball(const PAdicApprox& x, int level) const {
    return v_ball(ball_of(x, window_.gamma_min, window_), level);
}

std::vector<std::int64_t> MeasureTree::support_leaves() const {
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; i < leaf_count(); ++i) {
        if (densities_[static_cast<std::size_t>(i)] > 0) out.push_back(i);
    }
    return out;
}

BallAddress MeasureTree::leaf_address(std::int64_t index) const {
    return ultradiff::leaf_address(base_, window_, index);
}

std::int64_t MeasureTree::leaf_index_of(const BallAddress& leaf) const {
    if (!leaf.is_leaf()) throw std::invalid_argument("address is not a leaf of the window");
    return leaf_index(leaf);
}

Rational MeasureTree::range_measure(std::int64_t begin, std::int64_t end) const {
    if (begin < 0 || end > leaf_count() || begin > end) {
        throw std::out_of_range("leaf range out of bounds");
    }
    return prefix_[static_cast<std::size_t>(end)] - prefix_[static_cast<std::size_t>(begin)];
}

double TailModel::value_at(int i) const {
    switch (kind) {
        case Kind::Constant: return scale;
        case Kind::Exponential: return scale * std::pow(static_cast<double>(p), i);
        case Kind::Polynomial: return i > 0 ? scale * std::pow(static_cast<double>(i), degree) : scale;
    }
    return scale;
}

GrowthReport check_growth_condition(const TailModel& tail, double beta, int horizon) {
    GrowthReport report;
    report.beta = beta;
    if (horizon < 2) throw std::invalid_argument("horizon must be at least 2");
    for (int i = 1; i <= horizon; ++i) {
        double v = tail.value_at(i);
        if (v <= 0) {
            report.verdict = "violated";
            report.samples.emplace_back(i, std::numeric_limits<double>::infinity());
            return report;
        }
        report.samples.emplace_back(i, std::pow(static_cast<double>(i), beta) / v);
    }
    // i^beta / V_i -> 0 iff the tail grows faster than i^beta.
    switch (tail.kind) {
        case TailModel::Kind::Exponential:
            report.verdict = "satisfied";
            break;
        case TailModel::Kind::Constant:
            report.verdict = beta < 0 ? "satisfied" : "violated";
            break;
        case TailModel::Kind::Polynomial:
            report.verdict = tail.degree > beta ? "satisfied" : "violated";
            break;
    }
    // Sanity: the sampled ratios should already trend with the verdict.
    if (report.samples.size() >= 4) {
        double head = report.samples[report.samples.size() / 2].second;
        double last = report.samples.back().second;
        bool decreasing = last <= head * (1.0 + 1e-12) || last < 1e-300;
        if (report.verdict == "satisfied" && !decreasing) report.verdict = "inconclusive";
    }
    return report;
}

}  // namespace ultradiff
