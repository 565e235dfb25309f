#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace ethica {

/// Exact decimal number: unscaled integer value plus a base-10 scale.
/// `Decimal(350, 2)` is 3.50. Data values never touch binary floating
/// point, so predicate results are reproducible.
class Decimal {
public:
    Decimal() = default;
    Decimal(std::int64_t units, int scale);

    static Decimal parse(const std::string& text);
    static std::optional<Decimal> try_parse(const std::string& text);
    static Decimal from_int(std::int64_t v) { return Decimal(v, 0); }

    std::int64_t units() const noexcept { return units_; }
    int scale() const noexcept { return scale_; }

    int compare(const Decimal& other) const;
    bool operator==(const Decimal& o) const { return compare(o) == 0; }
    bool operator<(const Decimal& o) const { return compare(o) < 0; }
    bool operator<=(const Decimal& o) const { return compare(o) <= 0; }
    bool operator>(const Decimal& o) const { return compare(o) > 0; }
    bool operator>=(const Decimal& o) const { return compare(o) >= 0; }

    Decimal operator*(const Decimal& o) const;

    /// Rounds half away from zero to the nearest integer.
    std::int64_t round_half_up() const;

    double to_double() const;
    std::string to_string() const;

private:
    void normalize();

    std::int64_t units_ = 0;
    int scale_ = 0;
};

/// A cell value. Monostate is SQL-style null.
using Value = std::variant<std::monostate, std::string, std::int64_t, Decimal, bool>;

bool is_null(const Value& v);

/// Canonical text rendering (nulls render as the CSV escape `\N`).
std::string value_to_string(const Value& v);

/// Total order used for grouping keys and deterministic output.
/// Null sorts first; values of different runtime types order by type index.
int compare_values(const Value& a, const Value& b);

}  // namespace ethica
