#include "hyperprob/rational.hpp"

#include "hyperprob/error.hpp"

#include <cctype>

namespace hyperprob {

namespace {

bool all_digits(std::string_view text) {
    if (text.empty()) return false;
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

mpz_class parse_integer(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    if (!all_digits(text)) raise(ErrorKind::Parse, "malformed number '" + std::string(text) + "'");
    mpz_class value(std::string(text), 10);
    return negative ? mpz_class(-value) : value;
}

}  // namespace

Rational make_rational(long numerator, long denominator) {
    if (denominator == 0) raise(ErrorKind::Parse, "zero denominator");
    Rational value(numerator, denominator);
    value.canonicalize();
    return value;
}

Rational parse_rational(std::string_view text) {
    if (text.empty()) raise(ErrorKind::Parse, "empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(text.substr(0, slash));
        mpz_class den = parse_integer(text.substr(slash + 1));
        if (den == 0) raise(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
        Rational value(num, den);
        value.canonicalize();
        return value;
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole.front() == '-';
        if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || !all_digits(frac)) {
            raise(ErrorKind::Parse, "malformed number '" + std::string(text) + "'");
        }
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        mpz_class num = mpz_class(std::string(whole), 10) * scale + mpz_class(std::string(frac), 10);
        Rational value(negative ? mpz_class(-num) : num, scale);
        value.canonicalize();
        return value;
    }
    return Rational(parse_integer(text));
}

std::string format_rational(const Rational& value) {
    if (value.get_den() == 1) return value.get_num().get_str();
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace hyperprob
