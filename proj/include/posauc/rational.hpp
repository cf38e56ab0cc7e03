#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace posauc {

// Exact rational in canonical form (gcd 1, positive denominator).
class Rational {
public:
    Rational() = default;
    Rational(int v) : q_(static_cast<long>(v)) {}
    Rational(long v) : q_(v) {}
    Rational(long long v) : q_(static_cast<long>(v)) {}
    Rational(unsigned long v) : q_(v) {}
    Rational(long num, long den) {
        if (den == 0) throw std::domain_error("rational: zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }
    explicit Rational(const mpz_class& z) : q_(z) {}

    // Integers, decimals ("0.25") and fractions ("2/5"), optionally signed.
    static Rational parse(std::string_view s) {
        auto r = try_parse(s);
        if (!r) throw std::invalid_argument("invalid rational '" + std::string(s) + "'");
        return *r;
    }

    static std::optional<Rational> try_parse(std::string_view s) {
        auto is_digits = [](std::string_view t) {
            if (t.empty()) return false;
            for (char c : t)
                if (c < '0' || c > '9') return false;
            return true;
        };
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        if (s.empty()) return std::nullopt;
        bool neg = false;
        if (s.front() == '-' || s.front() == '+') {
            neg = s.front() == '-';
            s.remove_prefix(1);
        }
        mpq_class q;
        if (auto slash = s.find('/'); slash != std::string_view::npos) {
            auto n = s.substr(0, slash), d = s.substr(slash + 1);
            if (!is_digits(n) || !is_digits(d)) return std::nullopt;
            mpz_class dz(std::string(d), 10);
            if (dz == 0) return std::nullopt;
            q = mpq_class(mpz_class(std::string(n), 10), dz);
        } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
            auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
            if (ip.empty() && fp.empty()) return std::nullopt;
            if (!ip.empty() && !is_digits(ip)) return std::nullopt;
            if (!fp.empty() && !is_digits(fp)) return std::nullopt;
            mpz_class den = 1;
            for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
            mpz_class num(std::string(ip.empty() ? "0" : ip) + std::string(fp), 10);
            q = mpq_class(num, den);
        } else {
            if (!is_digits(s)) return std::nullopt;
            q = mpq_class(mpz_class(std::string(s), 10));
        }
        q.canonicalize();
        if (neg) q = -q;
        return Rational(q);
    }

    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    bool is_zero() const { return sgn(q_) == 0; }
    int sign() const { return sgn(q_); }
    bool is_integer() const { return q_.get_den() == 1; }

    // Always "p/q", integers included, so output is uniform.
    std::string str() const { return q_.get_num().get_str() + "/" + q_.get_den().get_str(); }

    double to_double() const { return q_.get_d(); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("rational: division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class q_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline Rational operator""_q(const char* s, std::size_t n) { return Rational::parse({s, n}); }

}  // namespace posauc

template <>
struct std::hash<posauc::Rational> {
    std::size_t operator()(const posauc::Rational& r) const {
        return std::hash<std::string>{}(r.str());
    }
};
