#ifndef ULTRADIFF_RATE_KERNEL_HPP
#define ULTRADIFF_RATE_KERNEL_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ultradiff/padic.hpp"

namespace ultradiff {

class MonotonicityViolation : public std::runtime_error {
  public:
    explicit MonotonicityViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Radial jump-rate profile W(p^i), nonincreasing in i, with a vanishing tail
/// beyond the window (compact-support convention). Values are plain doubles;
/// exactness lives in the measures, not here.
class RateProfile {
  public:
    /// Vladimirov kernel: W(p^i) = p^{-i(alpha+1)} (the 1/Gamma_p normalisation
    /// is absorbed into time units). alpha > 0.
    static RateProfile vladimirov(Base base, Window window, double alpha);

    /// Tabulated kernel: values[k] = W(p^{gamma_min + k}), one entry per
    /// scale in the window (the gamma_min entry is bookkeeping only; distances
    /// between distinct leaves start at gamma_min+1). Must be nonincreasing
    /// and positive.
    static RateProfile table(Base base, Window window, std::vector<double> values);

    static RateProfile from_json(Base base, Window window, const nlohmann::json& j);
    nlohmann::json to_json() const;

    Base base() const { return base_; }
    Window window() const { return window_; }

    /// W at radius p^i for i in [gamma_min, gamma_max]; beyond the window
    /// (i > gamma_max) the tail vanishes. i < gamma_min is an error.
    double value(int i) const;

    /// delta_w(i) = W(p^i) - W(p^{i+1}) >= 0, the telescoping increment used
    /// by the spectral formulas. For i = gamma_max this is W(p^gamma_max)
    /// itself (vanishing tail).
    double delta_w(int i) const;

    const std::string& kind() const { return kind_; }
    double alpha() const { return alpha_; }

  private:
    RateProfile(Base base, Window window, std::string kind, double alpha,
                std::vector<double> values);

    Base base_;
    Window window_;
    std::string kind_;
    double alpha_;
    std::vector<double> values_;  // values_[k] = W(p^{gamma_min+k})
};

}  // namespace ultradiff

#endif
