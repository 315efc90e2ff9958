#ifndef ULTRADIFF_PADIC_HPP
#define ULTRADIFF_PADIC_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ultradiff/rational.hpp"

namespace ultradiff {

/// The expansion base p >= 2. Primality is not assumed; composite bases give
/// the m-adic pseudo-norm and everything downstream works unchanged.
struct Base {
    explicit Base(std::uint32_t p);
    std::uint32_t value;

    friend bool operator==(const Base&, const Base&) = default;
};

/// Finite resolution window: leaves are balls of radius p^gamma_min, the root
/// ball has radius p^gamma_max and is centered at 0.
struct Window {
    Window(int gamma_min, int gamma_max);
    int gamma_min;
    int gamma_max;

    int depth() const { return gamma_max - gamma_min; }

    friend bool operator==(const Window&, const Window&) = default;
};

/// Number of balls of level `level` inside the window root, i.e.
/// p^(gamma_max - level). Throws if the count does not fit desk scale.
std::int64_t ball_count_at_level(Base base, Window window, int level);

/// p^(window.depth()) with an overflow/scale guard.
std::int64_t leaf_count(Base base, Window window);

/// A p-adic number at finite precision: x = sum_k digits[k] * p^(e0+k).
/// Canonical form: digits[0] != 0 and digits.back() != 0; zero is the empty
/// digit sequence. Only nonnegative values with denominator a power of p are
/// representable, which is all the window machinery ever needs.
class PAdicApprox {
  public:
    PAdicApprox(Base base, int lowest_exponent, std::vector<std::uint32_t> digits);

    static PAdicApprox zero(Base base);
    /// Throws std::invalid_argument when r is negative or its denominator is
    /// not a power of the base (no finite expansion exists).
    static PAdicApprox from_rational(Base base, const Rational& r);

    Base base() const { return base_; }
    bool is_zero() const { return digits_.empty(); }
    /// Exponent of the lowest nonzero digit. Only valid for nonzero values.
    int valuation() const;
    int lowest_exponent() const { return e0_; }
    const std::vector<std::uint32_t>& digits() const { return digits_; }
    /// Digit at a given exponent, 0 outside the stored range.
    std::uint32_t digit_at(int exponent) const;

    /// x * p^k (digit shift).
    PAdicApprox shifted(int k) const;
    Rational to_rational() const;

    friend bool operator==(const PAdicApprox&, const PAdicApprox&) = default;

  private:
    Base base_;
    int e0_ = 0;
    std::vector<std::uint32_t> digits_;
};

/// |x|_p = p^(-v) with v the valuation; |0|_p = 0.
Rational norm(const PAdicApprox& x);

/// |x - y|_p, computed from the lowest exponent at which the digit streams
/// differ; requires matching bases.
Rational distance(const PAdicApprox& x, const PAdicApprox& y);

/// ({x}, [x]): digits at negative exponents and the rest. {x} + [x] = x.
std::pair<PAdicApprox, PAdicApprox> split_parts(const PAdicApprox& x);

/// A ball of radius p^level inside a window, identified by the digit path
/// from the root ball down. path.size() == gamma_max - level; path[k] is the
/// digit of the ball's members at exponent -(gamma_max) + k.
struct BallAddress {
    BallAddress(Base base, Window window, int level, std::vector<std::uint8_t> path);

    Base base;
    Window window;
    int level;
    std::vector<std::uint8_t> path;

    bool is_root() const { return path.empty(); }
    bool is_leaf() const { return level == window.gamma_min; }

    /// Canonical center: the digit truncation (smallest nonnegative
    /// representative of the coset).
    PAdicApprox center() const;
    Rational radius() const { return rational_pow(base.value, level); }

    /// Digit-path text form, coarsest digit first; alphanumeric digits, so
    /// bases up to 36 round-trip through files.
    std::string path_string() const;

    friend bool operator==(const BallAddress&, const BallAddress&) = default;
};

BallAddress root_ball(Base base, Window window);
BallAddress ball_from_path(Base base, Window window, const std::string& path);

/// The unique ball of radius p^level containing x. Throws when x lies outside
/// the window's root ball or the level is out of range.
BallAddress ball_of(const PAdicApprox& x, int level, Window window);

/// Drop the last path digit. Throws on the root.
BallAddress parent(const BallAddress& b);
/// Sub-ball with the given last digit. Throws below gamma_min.
BallAddress child(const BallAddress& b, std::uint32_t digit);
/// All p maximal sub-balls, digit order.
std::vector<BallAddress> children(const BallAddress& b);
/// Ancestor at the given level (identity when level == b.level).
BallAddress ancestor_at(const BallAddress& b, int level);

/// Canonical leaf order is lexicographic in the digit path, which equals the
/// numeric order of the path read as a base-p integer. These helpers map
/// between addresses and that order.
std::int64_t leaf_index(const BallAddress& leaf);
BallAddress leaf_address(Base base, Window window, std::int64_t index);
/// Ball at a level by path-lexicographic ordinal (generalizes leaf_address).
BallAddress ball_at_ordinal(Base base, Window window, int level, std::int64_t ordinal);
/// Half-open range [begin, end) of leaf indices covered by a ball.
std::pair<std::int64_t, std::int64_t> leaf_range(const BallAddress& b);

}  // namespace ultradiff

#endif
