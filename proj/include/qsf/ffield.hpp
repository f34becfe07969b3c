#pragma once

// Arithmetic in GF(q^n) for prime q, with nonzero elements stored as
// exponents of a fixed primitive element alpha.  Multiplication is exponent
// addition mod q^n-1; addition goes through a Zech-logarithm table.  Zero is
// a sentinel value, never an exponent.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qsf/error.hpp"

namespace qsf {

inline constexpr uint32_t kNoExponent = 0xFFFFFFFFu;
inline constexpr uint64_t kDefaultTableCap = uint64_t(1) << 26;

// A field element: either zero or alpha^raw with raw in [0, q^n-1).
struct FElem {
    uint32_t raw = kNoExponent;

    static constexpr FElem zero() { return FElem{kNoExponent}; }
    static constexpr FElem at(uint32_t e) { return FElem{e}; }

    bool is_zero() const { return raw == kNoExponent; }
    uint32_t exp() const { return raw; }

    friend bool operator==(FElem a, FElem b) { return a.raw == b.raw; }
    friend bool operator!=(FElem a, FElem b) { return a.raw != b.raw; }
};

// Monic polynomial of degree n over Z_q, constant term first.
struct PrimePolynomial {
    uint32_t q = 0;
    uint32_t n = 0;
    std::vector<uint32_t> coeffs;
};

namespace detail {

inline bool is_prime(uint64_t v) {
    if (v < 2) return false;
    for (uint64_t d = 2; d * d <= v; ++d)
        if (v % d == 0) return false;
    return true;
}

inline std::vector<uint64_t> prime_factors(uint64_t v) {
    std::vector<uint64_t> out;
    for (uint64_t d = 2; d * d <= v; ++d) {
        if (v % d == 0) {
            out.push_back(d);
            while (v % d == 0) v /= d;
        }
    }
    if (v > 1) out.push_back(v);
    return out;
}

// Dense polynomials over Z_q as coefficient vectors, constant term first,
// trailing zeros trimmed.
using Poly = std::vector<uint32_t>;

inline void ptrim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly pmulmod(const Poly& a, const Poly& b, const Poly& f, uint32_t q) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % q;
    }
    // reduce mod monic f
    size_t deg_f = f.size() - 1;
    for (size_t i = r.size(); i-- > deg_f;) {
        uint32_t c = r[i];
        if (c == 0) continue;
        r[i] = 0;
        for (size_t j = 0; j < deg_f; ++j)
            r[i - deg_f + j] = (r[i - deg_f + j] + c * (q - f[j])) % q;
    }
    r.resize(deg_f);
    ptrim(r);
    return r;
}

inline Poly ppowmod(Poly base, uint64_t e, const Poly& f, uint32_t q) {
    Poly r{1};
    while (e > 0) {
        if (e & 1) r = pmulmod(r, base, f, q);
        base = pmulmod(base, base, f, q);
        e >>= 1;
    }
    return r;
}

inline Poly pgcd(Poly a, Poly b, uint32_t q) {
    auto inv_mod_q = [&](uint32_t v) {
        // q prime, v != 0
        uint32_t r = 1;
        for (uint32_t e = q - 2; e > 0; e >>= 1) {
            if (e & 1) r = (r * v) % q;
            v = (v * v) % q;
        }
        return r;
    };
    ptrim(a);
    ptrim(b);
    while (!b.empty()) {
        // a mod b, b monicized on the fly
        uint32_t lead_inv = inv_mod_q(b.back());
        while (a.size() >= b.size()) {
            uint32_t c = (a.back() * lead_inv) % q;
            size_t shift = a.size() - b.size();
            for (size_t i = 0; i < b.size(); ++i)
                a[shift + i] = (a[shift + i] + c * (q - b[i]) % q * 1u) % q;
            ptrim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}

// Rabin's test: f of degree n is irreducible over F_q iff x^(q^n) == x
// (mod f) and gcd(x^(q^(n/p)) - x, f) = 1 for every prime p | n.
inline bool is_irreducible(const Poly& f, uint32_t q, uint32_t n) {
    Poly x{0, 1};
    auto qpow = [&](uint32_t e) {
        uint64_t r = 1;
        for (uint32_t i = 0; i < e; ++i) r *= q;
        return r;
    };
    Poly xqn = ppowmod(x, qpow(n), f, q);
    if (xqn != x) return false;
    for (uint64_t p : prime_factors(n)) {
        Poly h = ppowmod(x, qpow(uint32_t(n / p)), f, q);
        // h - x
        Poly d = h;
        if (d.size() < 2) d.resize(2, 0);
        d[1] = (d[1] + q - 1) % q;
        ptrim(d);
        Poly g = pgcd(d, f, q);
        if (g.size() != 1) return false;
    }
    return true;
}

} // namespace detail

// Lookup tables for GF(q^n).  antilog maps an exponent to the packed
// coordinate vector (base-q digits, constant term first); zech maps e to
// log(1 + alpha^e), with kNoExponent where 1 + alpha^e = 0.
class FieldTable {
public:
    FieldTable(PrimePolynomial poly, std::vector<uint32_t> antilog, std::vector<uint32_t> logtab,
               std::vector<uint32_t> zech)
        : poly_(std::move(poly)),
          q_(poly_.q),
          n_(poly_.n),
          card_(1),
          antilog_(std::move(antilog)),
          log_(std::move(logtab)),
          zech_(std::move(zech)) {
        for (uint32_t i = 0; i < n_; ++i) card_ *= q_;
        modulus_ = uint32_t(card_ - 1);
        frob_pow_.resize(n_);
        frob_pow_[0] = 1 % modulus_;
        for (uint32_t j = 1; j < n_; ++j)
            frob_pow_[j] = uint32_t((uint64_t(frob_pow_[j - 1]) * q_) % modulus_);
        scalar_stride_ = modulus_ / (q_ - 1);
    }

    uint32_t q() const { return q_; }
    uint32_t n() const { return n_; }
    uint64_t card() const { return card_; }
    uint32_t modulus() const { return modulus_; }
    const PrimePolynomial& poly() const { return poly_; }

    // q^j mod (q^n - 1), the exponent multiplier of frobenius^j
    uint32_t frob_multiplier(uint32_t j) const { return frob_pow_[j]; }

    // exponent stride between consecutive nonzero scalars of the prime field
    uint32_t scalar_stride() const { return scalar_stride_; }

    uint32_t packed(FElem a) const { return a.is_zero() ? 0 : antilog_[a.raw]; }

    FElem from_packed(uint32_t v) const { return v == 0 ? FElem::zero() : FElem::at(log_[v]); }

    FElem add(FElem a, FElem b) const {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        uint32_t d = b.raw >= a.raw ? b.raw - a.raw : b.raw + modulus_ - a.raw;
        uint32_t z = zech_[d];
        if (z == kNoExponent) return FElem::zero();
        uint32_t e = a.raw + z;
        if (e >= modulus_) e -= modulus_;
        return FElem::at(e);
    }

    // raw-exponent addition: both inputs nonzero exponents
    uint32_t add_exp(uint32_t a, uint32_t b) const {
        uint32_t d = b >= a ? b - a : b + modulus_ - a;
        uint32_t z = zech_[d];
        if (z == kNoExponent) return kNoExponent;
        uint32_t e = a + z;
        if (e >= modulus_) e -= modulus_;
        return e;
    }

    FElem mul(FElem a, FElem b) const {
        if (a.is_zero() || b.is_zero()) return FElem::zero();
        uint32_t e = a.raw + b.raw;
        if (e >= modulus_) e -= modulus_;
        return FElem::at(e);
    }

    FElem frobenius(FElem a, uint32_t i) const {
        if (a.is_zero()) return a;
        return FElem::at(uint32_t((uint64_t(a.raw) * frob_pow_[i % n_]) % modulus_));
    }

private:
    PrimePolynomial poly_;
    uint32_t q_, n_;
    uint64_t card_;
    uint32_t modulus_;
    uint32_t scalar_stride_;
    std::vector<uint32_t> antilog_;
    std::vector<uint32_t> log_;
    std::vector<uint32_t> zech_;
    std::vector<uint32_t> frob_pow_;
};

// Multiplicative order of the root of an irreducible poly; divides q^n - 1.
inline uint64_t root_order(const PrimePolynomial& poly) {
    uint64_t m = 1;
    for (uint32_t i = 0; i < poly.n; ++i) m *= poly.q;
    m -= 1;
    detail::Poly f(poly.coeffs.begin(), poly.coeffs.end());
    detail::Poly x{0, 1};
    uint64_t ord = m;
    for (uint64_t p : detail::prime_factors(m)) {
        while (ord % p == 0 && detail::ppowmod(x, ord / p, f, poly.q) == detail::Poly{1})
            ord /= p;
    }
    return ord;
}

inline FieldTable build_field(const PrimePolynomial& poly, uint64_t table_cap = kDefaultTableCap) {
    if (!detail::is_prime(poly.q))
        throw Error(Errc::bad_format, "q must be prime, got " + std::to_string(poly.q));
    if (poly.n < 1 || poly.coeffs.size() != poly.n + 1 || poly.coeffs.back() != 1)
        throw Error(Errc::bad_format, "polynomial must be monic of degree n");
    for (uint32_t c : poly.coeffs)
        if (c >= poly.q) throw Error(Errc::bad_format, "coefficient not reduced mod q");

    uint64_t card = 1;
    for (uint32_t i = 0; i < poly.n; ++i) {
        card *= poly.q;
        if (card > (uint64_t(1) << 31))
            throw Error(Errc::unsupported_size, "q^n exceeds hard packing limit 2^31");
    }
    if (card > table_cap)
        throw Error(Errc::unsupported_size,
                    "q^n = " + std::to_string(card) + " exceeds table cap " + std::to_string(table_cap));

    detail::Poly f(poly.coeffs.begin(), poly.coeffs.end());
    if (!detail::is_irreducible(f, poly.q, poly.n))
        throw Error(Errc::not_irreducible, "polynomial has a nontrivial factor over F_q");
    uint64_t ord = root_order(poly);
    if (ord != card - 1)
        throw Error(Errc::not_primitive,
                    "root has order " + std::to_string(ord) + " < " + std::to_string(card - 1));

    uint32_t q = poly.q, n = poly.n;
    uint32_t M = uint32_t(card - 1);

    std::vector<uint32_t> antilog(M), logtab(card, kNoExponent);
    std::vector<uint32_t> digits(n, 0);
    digits[0] = 1; // alpha^0
    for (uint32_t e = 0; e < M; ++e) {
        uint32_t packed = 0;
        for (uint32_t i = n; i-- > 0;) packed = packed * q + digits[i];
        antilog[e] = packed;
        logtab[packed] = e;
        // multiply by alpha = x, reduce mod f
        uint32_t carry = digits[n - 1];
        for (uint32_t i = n; i-- > 1;) digits[i] = digits[i - 1];
        digits[0] = 0;
        if (carry != 0)
            for (uint32_t i = 0; i < n; ++i)
                digits[i] = (digits[i] + carry * (q - poly.coeffs[i])) % q;
    }

    std::vector<uint32_t> zech(M);
    for (uint32_t e = 0; e < M; ++e) {
        uint32_t v = antilog[e];
        uint32_t d0 = v % q;
        uint32_t s = v - d0 + (d0 + 1) % q;
        zech[e] = (s == 0) ? kNoExponent : logtab[s];
    }

    return FieldTable(poly, std::move(antilog), std::move(logtab), std::move(zech));
}

// First primitive polynomial of degree n over F_q in lexicographic
// coefficient order (constant term varying fastest).
inline PrimePolynomial find_primitive_poly(uint32_t q, uint32_t n) {
    if (!detail::is_prime(q)) throw Error(Errc::bad_format, "q must be prime");
    uint64_t count = 1;
    for (uint32_t i = 0; i < n; ++i) count *= q;
    uint64_t m = count - 1;
    for (uint64_t code = 0; code < count; ++code) {
        PrimePolynomial p;
        p.q = q;
        p.n = n;
        p.coeffs.resize(n + 1);
        uint64_t c = code;
        for (uint32_t i = 0; i < n; ++i) {
            p.coeffs[i] = uint32_t(c % q);
            c /= q;
        }
        p.coeffs[n] = 1;
        if (p.coeffs[0] == 0) continue;
        detail::Poly f(p.coeffs.begin(), p.coeffs.end());
        if (!detail::is_irreducible(f, q, n)) continue;
        if (root_order(p) == m) return p;
    }
    throw Error(Errc::not_primitive, "no primitive polynomial found (should not happen)");
}

// Accepts either a coefficient list of length n+1 (constant term first, all
// values < q, monic) or an exponent list of the nonzero terms, e.g.
// "13,12,10,9,0" for x^13+x^12+x^10+x^9+1.
inline PrimePolynomial parse_polynomial(uint32_t q, uint32_t n, const std::string& text) {
    std::vector<uint64_t> vals;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string tok = text.substr(pos, comma - pos);
        size_t b = tok.find_first_not_of(" \t");
        size_t e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) throw Error(Errc::bad_format, "empty token in polynomial");
        tok = tok.substr(b, e - b + 1);
        try {
            vals.push_back(std::stoull(tok));
        } catch (...) {
            throw Error(Errc::bad_format, "bad polynomial token '" + tok + "'");
        }
        pos = comma + 1;
    }
    if (vals.empty()) throw Error(Errc::bad_format, "empty polynomial");

    PrimePolynomial p;
    p.q = q;
    p.n = n;
    bool all_below_q = std::all_of(vals.begin(), vals.end(), [&](uint64_t v) { return v < q; });
    if (vals.size() == size_t(n) + 1 && all_below_q && vals.back() == 1) {
        p.coeffs.assign(vals.begin(), vals.end());
        return p;
    }
    // exponent list
    p.coeffs.assign(n + 1, 0);
    for (uint64_t v : vals) {
        if (v > n) throw Error(Errc::bad_format, "exponent " + std::to_string(v) + " exceeds degree");
        if (p.coeffs[size_t(v)] != 0) throw Error(Errc::bad_format, "duplicate exponent in polynomial");
        p.coeffs[size_t(v)] = 1;
    }
    if (p.coeffs[n] != 1) throw Error(Errc::bad_format, "polynomial must contain the degree-n term");
    return p;
}

inline std::string polynomial_to_string(const PrimePolynomial& p) {
    std::string out;
    for (size_t i = 0; i < p.coeffs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(p.coeffs[i]);
    }
    return out;
}

} // namespace qsf
