#include "common/rational.hpp"

#include <cctype>
#include <limits>

#include "common/errors.hpp"

namespace rbsing {

namespace {

BigInt parse_integer(std::string_view digits) {
    if (digits.empty()) throw InvalidArgument("empty integer literal");
    std::string s(digits);
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw InvalidArgument("malformed integer literal: " + s);
    for (std::size_t i = start; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw InvalidArgument("malformed integer literal: " + s);
    }
    if (s[0] == '+') s.erase(0, 1);
    return BigInt(s, 10);
}

Rational parse_decimal(std::string_view text) {
    std::string s(text);
    long exponent = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        exponent = parse_integer(s.substr(epos + 1)).get_si();
        s.resize(epos);
    }
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    auto dot = s.find('.');
    std::string mantissa = s;
    if (dot != std::string::npos) {
        mantissa = s.substr(0, dot) + s.substr(dot + 1);
        exponent -= static_cast<long>(s.size() - dot - 1);
    }
    if (mantissa.empty()) throw InvalidArgument("malformed number: " + std::string(text));
    Rational q(parse_integer(mantissa));
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent >= 0)
        q *= scale;
    else
        q /= scale;
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw InvalidArgument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        BigInt num = parse_integer(text.substr(0, slash));
        BigInt den = parse_integer(text.substr(slash + 1));
        if (den == 0) throw InvalidArgument("zero denominator in " + std::string(text));
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    return parse_decimal(text);
}

std::string to_string(const Rational& q) { return q.get_str(10); }
std::string to_string(const BigInt& z) { return z.get_str(10); }

double to_double(const Rational& q) { return q.get_d(); }

std::uint64_t scaled_threshold_u64(const Rational& q) {
    if (q <= 0) return 0;
    if (q >= 1) return std::numeric_limits<std::uint64_t>::max();
    BigInt scaled = q.get_num();
    scaled <<= 64;
    scaled /= q.get_den();  // floor for positive values
    std::uint64_t hi = 0;
    mpz_export(&hi, nullptr, -1, sizeof(hi), 0, 0, scaled.get_mpz_t());
    return hi;
}

}  // namespace rbsing
