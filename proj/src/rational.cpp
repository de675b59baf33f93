#include "loophole/rational.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>

namespace loophole {

Rational::Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    v_ /= o.v_;
    return *this;
}

void Rational::submul(const Rational& a, const Rational& b) {
    mpq_class t = a.v_ * b.v_;
    v_ -= t;
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

std::optional<Rational> Rational::try_parse(std::string_view s) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) return std::nullopt;

    // mpz_class's string constructor auto-detects the base, so leading zeros
    // would read as octal; force base 10.
    mpz_class num, den;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view ns = s.substr(0, slash), ds = s.substr(slash + 1);
        if (!all_digits(ns) || !all_digits(ds)) return std::nullopt;
        num = mpz_class(std::string(ns), 10);
        den = mpz_class(std::string(ds), 10);
        if (den == 0) return std::nullopt;
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        // Decimal converted exactly: digits over a power of ten.
        std::string_view whole = s.substr(0, dot), frac = s.substr(dot + 1);
        if (whole.empty() && frac.empty()) return std::nullopt;
        if (!whole.empty() && !all_digits(whole)) return std::nullopt;
        if (!frac.empty() && !all_digits(frac)) return std::nullopt;
        std::string digits = std::string(whole) + std::string(frac);
        num = mpz_class(digits.empty() ? "0" : digits, 10);
        den = 1;
        for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    } else {
        if (!all_digits(s)) return std::nullopt;
        num = mpz_class(std::string(s), 10);
        den = 1;
    }
    if (negative) num = -num;
    mpq_class q(num, den);
    q.canonicalize();
    return Rational(std::move(q));
}

Rational Rational::parse(std::string_view s) {
    auto r = try_parse(s);
    if (!r) throw std::invalid_argument("Rational: cannot parse '" + std::string(s) + "'");
    return *r;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

}  // namespace loophole
