#include "cxorder/scalar.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace cxorder {

std::string_view to_string(Regime regime) {
    return regime == Regime::exact ? "exact" : "float";
}

Scalar Scalar::fraction(long num, long den) {
    if (den == 0) {
        throw InvalidArgument("zero denominator");
    }
    Rational q(num, den);
    q.canonicalize();
    return Scalar(std::move(q));
}

namespace {

bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

mpz_class parse_integer(std::string_view s) {
    std::string digits(s.front() == '+' ? s.substr(1) : s);
    return mpz_class(digits, 10);
}

}  // namespace

Scalar Scalar::parse(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) {
        throw InvalidArgument("empty number");
    }
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = trim(s.substr(0, slash));
        auto den = trim(s.substr(slash + 1));
        if (!is_integer_literal(num) || !is_integer_literal(den)) {
            throw InvalidArgument("malformed rational '" + std::string(text) + "'");
        }
        mpz_class d = parse_integer(den);
        if (d == 0) {
            throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
        }
        Rational q(parse_integer(num), d);
        q.canonicalize();
        return Scalar(std::move(q));
    }
    if (is_integer_literal(s)) {
        return Scalar(Rational(parse_integer(s)));
    }
    double value = 0.0;
    auto first = s.data();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
        throw InvalidArgument("malformed number '" + std::string(text) + "'");
    }
    return Scalar(value);
}

const Rational& Scalar::exact() const {
    if (!is_exact()) {
        throw InvalidArgument("float scalar used where an exact value is required");
    }
    return std::get<Rational>(value_);
}

double Scalar::to_double() const {
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return q->get_d();
    }
    return std::get<double>(value_);
}

bool Scalar::is_zero() const { return sign() == 0; }

bool Scalar::is_integer() const {
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return q->get_den() == 1;
    }
    double d = std::get<double>(value_);
    return std::floor(d) == d;
}

int Scalar::sign() const {
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return sgn(*q);
    }
    double d = std::get<double>(value_);
    return (d > 0) - (d < 0);
}

std::string Scalar::to_string() const {
    if (const auto* q = std::get_if<Rational>(&value_)) {
        return q->get_str(10);
    }
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::get<double>(value_));
    return std::string(buf.data(), ptr);
}

namespace {

template <class ExactOp, class FloatOp>
Scalar binary(const Scalar& a, const Scalar& b, ExactOp exact_op, FloatOp float_op) {
    if (a.is_exact() && b.is_exact()) {
        return Scalar(Rational(exact_op(a.exact(), b.exact())));
    }
    return Scalar(float_op(a.to_double(), b.to_double()));
}

}  // namespace

Scalar operator+(const Scalar& a, const Scalar& b) {
    return binary(a, b, [](const Rational& x, const Rational& y) { return Rational(x + y); },
                  [](double x, double y) { return x + y; });
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    return binary(a, b, [](const Rational& x, const Rational& y) { return Rational(x - y); },
                  [](double x, double y) { return x - y; });
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    return binary(a, b, [](const Rational& x, const Rational& y) { return Rational(x * y); },
                  [](double x, double y) { return x * y; });
}

Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_exact() && b.is_zero()) {
        throw InvalidArgument("division by exact zero");
    }
    return binary(a, b, [](const Rational& x, const Rational& y) { return Rational(x / y); },
                  [](double x, double y) { return x / y; });
}

Scalar operator-(const Scalar& a) {
    if (a.is_exact()) {
        return Scalar(Rational(-a.exact()));
    }
    return Scalar(-a.to_double());
}

bool operator==(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) {
        return a.exact() == b.exact();
    }
    return a.to_double() == b.to_double();
}

std::partial_ordering operator<=>(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) {
        int c = cmp(a.exact(), b.exact());
        return c < 0 ? std::partial_ordering::less
                     : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
    }
    return a.to_double() <=> b.to_double();
}

Scalar abs(const Scalar& x) { return x.sign() < 0 ? -x : x; }
Scalar min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
Scalar max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }

}  // namespace cxorder
