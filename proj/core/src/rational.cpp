#include "potus/rational.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace potus {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

std::int64_t parse_int(const std::string& s) {
    if (s.empty())
        throw Error("Rational: empty number in '" + s + "'");
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size())
        throw Error("Rational: cannot parse '" + s + "'");
    return v;
}

} // namespace

Rational Rational::parse(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty())
        throw Error("Rational: empty input");

    if (const auto slash = t.find('/'); slash != std::string::npos) {
        const std::int64_t num = parse_int(trim(t.substr(0, slash)));
        const std::int64_t den = parse_int(trim(t.substr(slash + 1)));
        return {num, den};
    }

    if (const auto dot = t.find('.'); dot != std::string::npos) {
        const std::string whole = t.substr(0, dot);
        const std::string frac = t.substr(dot + 1);
        if (frac.empty() || frac.size() > 9)
            throw Error("Rational: cannot parse '" + t + "'");
        for (const char c : frac)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw Error("Rational: cannot parse '" + t + "'");
        const bool negative = !whole.empty() && whole[0] == '-';
        const std::int64_t whole_v = whole.empty() || whole == "-" ? 0 : parse_int(whole);
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            scale *= 10;
        const std::int64_t frac_v = parse_int(frac);
        const std::int64_t abs_whole = whole_v < 0 ? -whole_v : whole_v;
        const std::int64_t num = abs_whole * scale + frac_v;
        return {negative ? -num : num, scale};
    }

    return {parse_int(t), 1};
}

std::string Rational::str() const {
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string format_cents(std::int64_t cents) {
    const bool negative = cents < 0;
    const std::int64_t abs = negative ? -cents : cents;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", negative ? "-" : "",
                  static_cast<long long>(abs / 100), static_cast<long long>(abs % 100));
    return buf;
}

} // namespace potus
