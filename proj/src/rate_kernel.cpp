#include "ultradiff/rate_kernel.hpp"

#include <cmath>

namespace ultradiff {

RateProfile::RateProfile(Base base, Window window, std::string kind, double alpha,
                         std::vector<double> values)
    : base_(base), window_(window), kind_(std::move(kind)), alpha_(alpha),
      values_(std::move(values)) {
    const std::size_t expected = static_cast<std::size_t>(window.depth()) + 1;
    if (values_.size() != expected) {
        throw std::invalid_argument("rate table needs one value per window scale");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!(values_[k] > 0) || !std::isfinite(values_[k])) {
            throw std::invalid_argument("rate values must be finite and positive");
        }
        if (k > 0 && values_[k] > values_[k - 1] * (1.0 + 1e-15)) {
            throw MonotonicityViolation(
                "W(p^i) must be nonincreasing in i: violated at scale index " +
                std::to_string(k));
        }
    }
}

RateProfile RateProfile::vladimirov(Base base, Window window, double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("vladimirov kernel requires alpha > 0");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(window.depth()) + 1);
    for (int i = window.gamma_min; i <= window.gamma_max; ++i) {
        values.push_back(std::pow(static_cast<double>(base.value), -i * (alpha + 1.0)));
    }
    return RateProfile(base, window, "vladimirov", alpha, std::move(values));
}

RateProfile RateProfile::table(Base base, Window window, std::vector<double> values) {
    return RateProfile(base, window, "table", 0.0, std::move(values));
}

RateProfile RateProfile::from_json(Base base, Window window, const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "vladimirov") {
        return vladimirov(base, window, j.at("alpha").get<double>());
    }
    if (type == "table") {
        if (j.contains("tail") && j.at("tail").get<std::string>() != "vanishing") {
            throw std::invalid_argument("only the vanishing tail is supported");
        }
        const auto& entries = j.at("values");
        std::vector<double> values(static_cast<std::size_t>(window.depth()) + 1, 0.0);
        std::vector<bool> seen(values.size(), false);
        for (const auto& [key, v] : entries.items()) {
            const int i = std::stoi(key);
            if (i < window.gamma_min || i > window.gamma_max) {
                throw std::invalid_argument("rate table scale " + key + " outside the window");
            }
            const auto k = static_cast<std::size_t>(i - window.gamma_min);
            values[k] = v.get<double>();
            seen[k] = true;
        }
        for (std::size_t k = 0; k < seen.size(); ++k) {
            if (!seen[k]) {
                throw std::invalid_argument(
                    "rate table is missing scale " +
                    std::to_string(window.gamma_min + static_cast<int>(k)));
            }
        }
        return table(base, window, std::move(values));
    }
    throw std::invalid_argument("unknown kernel type '" + type + "'");
}

nlohmann::json RateProfile::to_json() const {
    if (kind_ == "vladimirov") {
        return nlohmann::json{{"type", "vladimirov"}, {"alpha", alpha_}};
    }
    nlohmann::json entries = nlohmann::json::object();
    for (std::size_t k = 0; k < values_.size(); ++k) {
        entries[std::to_string(window_.gamma_min + static_cast<int>(k))] = values_[k];
    }
    return nlohmann::json{{"type", "table"}, {"values", entries}, {"tail", "vanishing"}};
}

double RateProfile::value(int i) const {
    if (i > window_.gamma_max) return 0.0;  // vanishing tail
    if (i < window_.gamma_min) {
        throw std::out_of_range("no scale p^i with i < gamma_min in the window");
    }
    return values_[static_cast<std::size_t>(i - window_.gamma_min)];
}

double RateProfile::delta_w(int i) const {
    double d = value(i) - value(i + 1);
    return d < 0 ? 0.0 : d;
}

}  // namespace ultradiff
