#pragma once

#include <gmpxx.h>

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stresscert/errors.hpp"

namespace stresscert {

// Exact rational scalar. Thin eager wrapper over GMP's mpq_class so that
// templated linear algebra can treat it like a plain arithmetic type
// (mpq_class's expression templates make `auto` and mixed expressions
// hazardous in generic code).
class Rat {
public:
    Rat() : v_(0) {}
    Rat(int n) : v_(n) {}                 // NOLINT: implicit by design
    Rat(long n) : v_(static_cast<long int>(n)) {}
    Rat(long long n) { set_ll(n); }

    Rat(long long num, long long den) {
        if (den == 0) throw ParseError("rational with zero denominator");
        Rat n(num), d(den);
        v_ = n.v_ / d.v_;
        v_.canonicalize();
    }

    explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    // Accepts "p/q", optionally signed integers, and decimal literals with an
    // optional exponent ("-1.6", "2.5e3"). Decimals convert exactly.
    static Rat parse(std::string_view text);

    // Exact value of the shortest decimal string that round-trips x. This is
    // the reading a person gives a printed float, so it is the conversion the
    // rational backend applies to JSON float tokens.
    static Rat from_decimal_double(double x);

    double to_double() const { return v_.get_d(); }

    // "p/q" in lowest terms, or "p" when the denominator is 1.
    std::string to_string() const {
        if (v_.get_den() == 1) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    // Exact decimal rendering when the denominator is of the form 2^a*5^b,
    // std::nullopt otherwise.
    std::optional<std::string> to_exact_decimal() const;

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    const mpq_class& raw() const { return v_; }
    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }

    Rat operator-() const { Rat r; r.v_ = -v_; return r; }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw SingularMatrix("division by zero rational");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    friend Rat abs(const Rat& a) { Rat r; r.v_ = ::abs(a.v_); return r; }

private:
    void set_ll(long long n) {
        if (n >= 0) {
            v_ = mpq_class(mpz_class(static_cast<unsigned long>(n)));
        } else {
            // avoid overflow on LLONG_MIN
            mpz_class m(static_cast<unsigned long>(-(n + 1)));
            m += 1;
            v_ = mpq_class(-m);
        }
    }

    mpq_class v_;
};

inline Rat Rat::parse(std::string_view text) {
    auto fail = [&] { throw ParseError("invalid numeral: '" + std::string(text) + "'"); };
    if (text.empty()) fail();

    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::string num(text.substr(0, slash));
        std::string den(text.substr(slash + 1));
        mpz_class p, q;
        if (num.empty() || den.empty() || p.set_str(num, 10) != 0 || q.set_str(den, 10) != 0) fail();
        if (q == 0) throw ParseError("rational with zero denominator: '" + std::string(text) + "'");
        Rat r;
        r.v_ = mpq_class(p) / mpq_class(q);
        r.v_.canonicalize();
        return r;
    }

    // [sign] digits [. digits] [ (e|E) [sign] digits ]
    size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_len = 0;
    bool any = false;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
        digits += text[i];
        any = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
            digits += text[i];
            ++frac_len;
            any = true;
        }
    }
    if (!any) fail();
    long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            eneg = text[i] == '-';
            ++i;
        }
        if (i >= text.size()) fail();
        long e = 0;
        for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
            e = e * 10 + (text[i] - '0');
            if (e > 1000000) fail();
        }
        exp10 = eneg ? -e : e;
    }
    if (i != text.size()) fail();

    mpz_class mant;
    if (digits.empty() || mant.set_str(digits, 10) != 0) fail();
    if (neg) mant = -mant;

    long shift = exp10 - frac_len;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    Rat r;
    if (shift >= 0) {
        r.v_ = mpq_class(mant * pow10);
    } else {
        r.v_ = mpq_class(mant) / mpq_class(pow10);
        r.v_.canonicalize();
    }
    return r;
}

inline Rat Rat::from_decimal_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc()) throw ParseError("unrepresentable float value");
    std::string_view s(buf, static_cast<size_t>(res.ptr - buf));
    if (s == "inf" || s == "-inf" || s == "nan") {
        throw ParseError("non-finite float value");
    }
    return parse(s);
}

inline std::optional<std::string> Rat::to_exact_decimal() const {
    mpz_class den = v_.get_den();
    unsigned long twos = 0, fives = 0;
    while (mpz_even_p(den.get_mpz_t())) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) return std::nullopt;

    unsigned long k = twos > fives ? twos : fives;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, k);
    mpz_class scaled = v_.get_num() * (pow10 / v_.get_den());  // exact by construction

    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string s = scaled.get_str();
    if (k == 0) return (neg ? "-" : "") + s;
    if (s.size() <= k) s.insert(0, k + 1 - s.size(), '0');
    s.insert(s.size() - k, ".");
    return (neg ? "-" : "") + s;
}

inline double to_double(const Rat& x) { return x.to_double(); }
inline double to_double(double x) { return x; }

}  // namespace stresscert
