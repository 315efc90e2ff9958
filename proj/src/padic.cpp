#include "ultradiff/padic.hpp"

#include <algorithm>
#include <stdexcept>

namespace ultradiff {

namespace {

constexpr std::int64_t kMaxLeaves = std::int64_t{1} << 24;

const char kDigitChars[] = "0123456789abcdefghijklmnopqrstuvwxyz";

int digit_char_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    return -1;
}

std::int64_t pow_checked(std::uint32_t base, int exponent) {
    std::int64_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (result > kMaxLeaves / base)
            throw std::invalid_argument("window too large: ball count exceeds desk scale");
        result *= base;
    }
    return result;
}

}  // namespace

Base::Base(std::uint32_t p) : value(p) {
    if (p < 2) throw std::invalid_argument("base must be >= 2");
}

Window::Window(int gmin, int gmax) : gamma_min(gmin), gamma_max(gmax) {
    if (gmin > gmax) throw std::invalid_argument("window requires gamma_min <= gamma_max");
}

std::int64_t ball_count_at_level(Base base, Window window, int level) {
    if (level < window.gamma_min || level > window.gamma_max)
        throw std::invalid_argument("level outside window");
    return pow_checked(base.value, window.gamma_max - level);
}

std::int64_t leaf_count(Base base, Window window) {
    return pow_checked(base.value, window.depth());
}

PAdicApprox::PAdicApprox(Base base, int lowest_exponent, std::vector<std::uint32_t> digits)
    : base_(base), e0_(lowest_exponent), digits_(std::move(digits)) {
    for (auto d : digits_)
        if (d >= base_.value) throw std::invalid_argument("digit out of range for base");
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
    std::size_t lead = 0;
    while (lead < digits_.size() && digits_[lead] == 0) ++lead;
    if (lead > 0) {
        digits_.erase(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(lead));
        e0_ += static_cast<int>(lead);
    }
    if (digits_.empty()) e0_ = 0;
}

PAdicApprox PAdicApprox::zero(Base base) { return PAdicApprox(base, 0, {}); }

PAdicApprox PAdicApprox::from_rational(Base base, const Rational& r) {
    if (r < 0) throw std::invalid_argument("negative values have no finite digit expansion");
    if (r == 0) return zero(base);
    mpz_class num = r.get_num();
    mpz_class den = r.get_den();
    int e0 = 0;
    while (den != 1) {
        mpz_class q, rem;
        mpz_fdiv_qr_ui(q.get_mpz_t(), rem.get_mpz_t(), den.get_mpz_t(), base.value);
        if (rem != 0)
            throw std::invalid_argument("denominator is not a power of the base");
        den = q;
        --e0;
    }
    std::vector<std::uint32_t> digits;
    while (num != 0) {
        digits.push_back(static_cast<std::uint32_t>(
            mpz_fdiv_ui(num.get_mpz_t(), base.value)));
        mpz_fdiv_q_ui(num.get_mpz_t(), num.get_mpz_t(), base.value);
    }
    return PAdicApprox(base, e0, std::move(digits));
}

int PAdicApprox::valuation() const {
    if (is_zero()) throw std::logic_error("valuation of zero is undefined");
    return e0_;
}

std::uint32_t PAdicApprox::digit_at(int exponent) const {
    if (exponent < e0_) return 0;
    std::size_t k = static_cast<std::size_t>(exponent - e0_);
    return k < digits_.size() ? digits_[k] : 0;
}

PAdicApprox PAdicApprox::shifted(int k) const {
    if (is_zero()) return *this;
    return PAdicApprox(base_, e0_ + k, digits_);
}

Rational PAdicApprox::to_rational() const {
    Rational sum = 0;
    for (std::size_t k = 0; k < digits_.size(); ++k)
        sum += Rational(digits_[k]) * rational_pow(base_.value, e0_ + static_cast<int>(k));
    return sum;
}

Rational norm(const PAdicApprox& x) {
    if (x.is_zero()) return Rational(0);
    return rational_pow(x.base().value, -x.valuation());
}

Rational distance(const PAdicApprox& x, const PAdicApprox& y) {
    if (x.base() != y.base()) throw std::invalid_argument("base mismatch in distance");
    if (x == y) return Rational(0);
    // The valuation of x - y is the lowest exponent where the digit streams
    // differ; borrows only propagate upward.
    int lo = std::min(x.is_zero() ? y.valuation() : x.lowest_exponent(),
                      y.is_zero() ? x.valuation() : y.lowest_exponent());
    int hi = std::max(
        x.lowest_exponent() + static_cast<int>(x.digits().size()),
        y.lowest_exponent() + static_cast<int>(y.digits().size()));
    for (int e = lo; e < hi; ++e)
        if (x.digit_at(e) != y.digit_at(e))
            return rational_pow(x.base().value, -e);
    throw std::logic_error("distinct values with identical digits");
}

std::pair<PAdicApprox, PAdicApprox> split_parts(const PAdicApprox& x) {
    std::vector<std::uint32_t> frac, integer;
    int e0 = x.is_zero() ? 0 : x.lowest_exponent();
    for (std::size_t k = 0; k < x.digits().size(); ++k) {
        int e = e0 + static_cast<int>(k);
        if (e < 0)
            frac.push_back(x.digits()[k]);
        else
            integer.push_back(x.digits()[k]);
    }
    PAdicApprox fractional = frac.empty()
        ? PAdicApprox::zero(x.base())
        : PAdicApprox(x.base(), e0, std::move(frac));
    PAdicApprox whole = integer.empty()
        ? PAdicApprox::zero(x.base())
        : PAdicApprox(x.base(), std::max(e0, 0), std::move(integer));
    return {fractional, whole};
}

BallAddress::BallAddress(Base b, Window w, int lvl, std::vector<std::uint8_t> p)
    : base(b), window(w), level(lvl), path(std::move(p)) {
    if (level < window.gamma_min || level > window.gamma_max)
        throw std::invalid_argument("ball level outside window");
    if (static_cast<int>(path.size()) != window.gamma_max - level)
        throw std::invalid_argument("path length does not match ball level");
    for (auto d : path)
        if (d >= base.value) throw std::invalid_argument("path digit out of range");
}

PAdicApprox BallAddress::center() const {
    // path[k] is the digit at exponent -(gamma_max) + k.
    std::vector<std::uint32_t> digits(path.begin(), path.end());
    return PAdicApprox(base, -window.gamma_max, std::move(digits));
}

std::string BallAddress::path_string() const {
    if (base.value > 36)
        throw std::invalid_argument("digit-path text form supports bases up to 36");
    std::string s;
    s.reserve(path.size());
    for (auto d : path) s.push_back(kDigitChars[d]);
    return s;
}

BallAddress root_ball(Base base, Window window) {
    return BallAddress(base, window, window.gamma_max, {});
}

BallAddress ball_from_path(Base base, Window window, const std::string& path) {
    std::vector<std::uint8_t> digits;
    digits.reserve(path.size());
    for (char c : path) {
        int v = digit_char_value(c);
        if (v < 0 || v >= static_cast<int>(base.value))
            throw std::invalid_argument("invalid digit '" + std::string(1, c) + "' in path");
        digits.push_back(static_cast<std::uint8_t>(v));
    }
    int level = window.gamma_max - static_cast<int>(digits.size());
    return BallAddress(base, window, level, std::move(digits));
}

BallAddress ball_of(const PAdicApprox& x, int level, Window window) {
    if (level < window.gamma_min || level > window.gamma_max)
        throw std::invalid_argument("ball level outside window");
    if (!x.is_zero() && x.valuation() < -window.gamma_max)
        throw std::invalid_argument("point lies outside the window root ball");
    std::vector<std::uint8_t> path;
    path.reserve(static_cast<std::size_t>(window.gamma_max - level));
    for (int e = -window.gamma_max; e < -level; ++e)
        path.push_back(static_cast<std::uint8_t>(x.digit_at(e)));
    return BallAddress(x.base(), window, level, std::move(path));
}

BallAddress parent(const BallAddress& b) {
    if (b.is_root()) throw std::invalid_argument("root ball has no parent");
    auto path = b.path;
    path.pop_back();
    return BallAddress(b.base, b.window, b.level + 1, std::move(path));
}

BallAddress child(const BallAddress& b, std::uint32_t digit) {
    if (b.level <= b.window.gamma_min)
        throw std::invalid_argument("leaf ball has no children at this resolution");
    if (digit >= b.base.value) throw std::invalid_argument("child digit out of range");
    auto path = b.path;
    path.push_back(static_cast<std::uint8_t>(digit));
    return BallAddress(b.base, b.window, b.level - 1, std::move(path));
}

std::vector<BallAddress> children(const BallAddress& b) {
    std::vector<BallAddress> out;
    out.reserve(b.base.value);
    for (std::uint32_t a = 0; a < b.base.value; ++a) out.push_back(child(b, a));
    return out;
}

BallAddress ancestor_at(const BallAddress& b, int level) {
    if (level < b.level || level > b.window.gamma_max)
        throw std::invalid_argument("ancestor level out of range");
    std::vector<std::uint8_t> path(b.path.begin(),
                                   b.path.begin() + (b.window.gamma_max - level));
    return BallAddress(b.base, b.window, level, std::move(path));
}

std::int64_t leaf_index(const BallAddress& leaf) {
    if (!leaf.is_leaf()) throw std::invalid_argument("leaf_index requires a leaf ball");
    std::int64_t idx = 0;
    for (auto d : leaf.path) idx = idx * leaf.base.value + d;
    return idx;
}

BallAddress leaf_address(Base base, Window window, std::int64_t index) {
    return ball_at_ordinal(base, window, window.gamma_min, index);
}

BallAddress ball_at_ordinal(Base base, Window window, int level, std::int64_t ordinal) {
    std::int64_t n = ball_count_at_level(base, window, level);
    if (ordinal < 0 || ordinal >= n) throw std::out_of_range("ball ordinal out of range");
    std::vector<std::uint8_t> path(static_cast<std::size_t>(window.gamma_max - level));
    for (auto k = path.size(); k-- > 0;) {
        path[k] = static_cast<std::uint8_t>(ordinal % base.value);
        ordinal /= base.value;
    }
    return BallAddress(base, window, level, std::move(path));
}

std::pair<std::int64_t, std::int64_t> leaf_range(const BallAddress& b) {
    std::int64_t width = 1;
    for (int i = 0; i < b.level - b.window.gamma_min; ++i) width *= b.base.value;
    std::int64_t prefix = 0;
    for (auto d : b.path) prefix = prefix * b.base.value + d;
    return {prefix * width, (prefix + 1) * width};
}

}  // namespace ultradiff
