#include "ethica/value.hpp"

#include <cctype>
#include <cstdlib>

#include "ethica/error.hpp"

namespace ethica {

namespace {

using Int128 = __int128;

Int128 pow10_128(int n) {
    Int128 r = 1;
    for (int i = 0; i < n; ++i) r *= 10;
    return r;
}

}  // namespace

Decimal::Decimal(std::int64_t units, int scale) : units_(units), scale_(scale) {
    if (scale < 0) fail(ErrorKind::Parse, "decimal scale must be non-negative");
    normalize();
}

void Decimal::normalize() {
    while (scale_ > 0 && units_ % 10 == 0) {
        units_ /= 10;
        --scale_;
    }
}

std::optional<Decimal> Decimal::try_parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    std::int64_t units = 0;
    int scale = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_point) return std::nullopt;
            seen_point = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        seen_digit = true;
        if (units > (INT64_MAX - 9) / 10) return std::nullopt;  // overflow
        units = units * 10 + (c - '0');
        if (seen_point) ++scale;
    }
    if (!seen_digit) return std::nullopt;
    return Decimal(negative ? -units : units, scale);
}

Decimal Decimal::parse(const std::string& text) {
    auto d = try_parse(text);
    if (!d) fail(ErrorKind::Parse, "not a decimal literal: '" + text + "'");
    return *d;
}

int Decimal::compare(const Decimal& other) const {
    int common = std::max(scale_, other.scale_);
    Int128 a = static_cast<Int128>(units_) * pow10_128(common - scale_);
    Int128 b = static_cast<Int128>(other.units_) * pow10_128(common - other.scale_);
    if (a < b) return -1;
    if (a > b) return 1;
    return 0;
}

Decimal Decimal::operator*(const Decimal& o) const {
    Int128 product = static_cast<Int128>(units_) * o.units_;
    int scale = scale_ + o.scale_;
    while (scale > 0 && product % 10 == 0) {
        product /= 10;
        --scale;
    }
    if (product > INT64_MAX || product < INT64_MIN)
        fail(ErrorKind::Transform, "decimal overflow in multiplication");
    return Decimal(static_cast<std::int64_t>(product), scale);
}

std::int64_t Decimal::round_half_up() const {
    if (scale_ == 0) return units_;
    Int128 denom = pow10_128(scale_);
    Int128 v = units_;
    Int128 q = v / denom;
    Int128 rem = v % denom;
    if (rem < 0) rem = -rem;
    if (rem * 2 >= denom) q += (v >= 0) ? 1 : -1;
    return static_cast<std::int64_t>(q);
}

double Decimal::to_double() const {
    double d = static_cast<double>(units_);
    for (int i = 0; i < scale_; ++i) d /= 10.0;
    return d;
}

std::string Decimal::to_string() const {
    std::string digits = std::to_string(units_ < 0 ? -units_ : units_);
    if (static_cast<int>(digits.size()) <= scale_)
        digits.insert(0, scale_ + 1 - digits.size(), '0');
    std::string out;
    if (units_ < 0) out.push_back('-');
    out.append(digits, 0, digits.size() - scale_);
    if (scale_ > 0) {
        out.push_back('.');
        out.append(digits, digits.size() - scale_, scale_);
    }
    return out;
}

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

std::string value_to_string(const Value& v) {
    switch (v.index()) {
        case 0: return "\\N";
        case 1: return std::get<std::string>(v);
        case 2: return std::to_string(std::get<std::int64_t>(v));
        case 3: return std::get<Decimal>(v).to_string();
        default: return std::get<bool>(v) ? "true" : "false";
    }
}

int compare_values(const Value& a, const Value& b) {
    // Integers and decimals compare numerically across the two types.
    auto numeric = [](const Value& v) -> std::optional<Decimal> {
        if (std::holds_alternative<std::int64_t>(v))
            return Decimal::from_int(std::get<std::int64_t>(v));
        if (std::holds_alternative<Decimal>(v)) return std::get<Decimal>(v);
        return std::nullopt;
    };
    auto na = numeric(a);
    auto nb = numeric(b);
    if (na && nb) return na->compare(*nb);
    if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
    switch (a.index()) {
        case 0: return 0;
        case 1: {
            const auto& sa = std::get<std::string>(a);
            const auto& sb = std::get<std::string>(b);
            return sa < sb ? -1 : (sa == sb ? 0 : 1);
        }
        default: {
            bool ba = std::get<bool>(a);
            bool bb = std::get<bool>(b);
            return ba == bb ? 0 : (ba < bb ? -1 : 1);
        }
    }
}

}  // namespace ethica
