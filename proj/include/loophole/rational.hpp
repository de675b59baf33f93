#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace loophole {

/// Exact arbitrary-precision rational scalar.
///
/// Values are always kept in canonical form: positive denominator,
/// gcd(|numerator|, denominator) = 1. All arithmetic and comparisons are
/// exact; equality is structural on the canonical form.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(int n) : v_(n) {}
    Rational(long num, long den);

    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Parses "num", "num/den", or a plain decimal such as "144.708"
    /// (converted exactly, e.g. 144708/1000 before reduction).
    static Rational parse(std::string_view s);
    static std::optional<Rational> try_parse(std::string_view s);

    /// "num/den", or just "num" when the denominator is 1.
    std::string str() const { return v_.get_str(); }
    double to_double() const { return v_.get_d(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    std::string numerator_str() const { return v_.get_num().get_str(); }
    std::string denominator_str() const { return v_.get_den().get_str(); }

    const mpq_class& raw() const { return v_; }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    /// In-place fused update *this -= a*b, the simplex inner-loop operation.
    void submul(const Rational& a, const Rational& b);

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.v_.get_mpq_t(), b.v_.get_mpq_t()) != 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = mpq_cmp(a.v_.get_mpq_t(), b.v_.get_mpq_t());
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace loophole
