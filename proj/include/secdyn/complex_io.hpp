#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "secdyn/errors.hpp"
#include "secdyn/expr.hpp"
#include "secdyn/scalar.hpp"

namespace secdyn {

namespace detail {

inline double parse_real_part(std::string_view s, std::string_view whole) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t skip = s.front() == '+' ? 1 : 0;
    double v = 0.0;
    auto res = std::from_chars(s.data() + skip, s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ComplexSyntax("not a complex number: '" + std::string(whole) + "'");
    return v;
}

}  // namespace detail

// Accepts "a", "a+bi", "a-bi", "bi", "i", "-i" with decimal or exponent notation.
inline Complex parse_complex(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) throw ComplexSyntax("empty complex number");
    if (s.back() != 'i') {
        double re = detail::parse_real_part(s, text);
        if (s == "+" || s == "-") throw ComplexSyntax("not a complex number: '" + std::string(text) + "'");
        return {re, 0.0};
    }
    s.remove_suffix(1);
    std::size_t split = std::string_view::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string_view::npos) return {0.0, detail::parse_real_part(s, text)};
    std::string_view re = s.substr(0, split);
    if (re == "+" || re == "-") throw ComplexSyntax("not a complex number: '" + std::string(text) + "'");
    return {detail::parse_real_part(re, text), detail::parse_real_part(s.substr(split), text)};
}

}  // namespace secdyn
