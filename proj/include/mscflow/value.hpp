#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mscflow {

enum class ValueType { string, integer, boolean };

/// Surface spelling used by the DSL: `str`, `int`, `bool`.
std::string_view type_name(ValueType t) noexcept;
std::optional<ValueType> parse_type_name(std::string_view name) noexcept;

/// A concrete runtime value. Construction goes through the named factories so
/// that string literals never silently decay to booleans.
class Value {
public:
    Value() : data_(false) {}

    static Value string(std::string s) { return Value(Data(std::move(s))); }
    static Value integer(std::int64_t i) { return Value(Data(i)); }
    static Value boolean(bool b) { return Value(Data(b)); }

    ValueType type() const noexcept;

    const std::string& as_string() const;
    std::int64_t as_integer() const;
    bool as_boolean() const;

    /// DSL literal form: `"text"`, `42`, `true`.
    std::string to_source() const;
    /// Unquoted display form used for labels and rendered results.
    std::string to_display() const;

    nlohmann::json to_json() const;
    static Value from_json(const nlohmann::json& j);
    /// Converts a JSON scalar to `type`, accepting numeric strings and the
    /// literals "true"/"false" where the target is not a string.
    static std::optional<Value> coerce(const nlohmann::json& j, ValueType type);
    /// Parses a command-line style literal into `type`.
    static std::optional<Value> parse_as(std::string_view text, ValueType type);

    friend bool operator==(const Value&, const Value&) = default;
    friend bool operator<(const Value& a, const Value& b) { return a.data_ < b.data_; }

private:
    using Data = std::variant<std::string, std::int64_t, bool>;
    explicit Value(Data d) : data_(std::move(d)) {}
    Data data_;
};

/// A payload component: a variable of the enclosing lifeline or a constant.
/// The owning lifeline is always the lifeline of the statement side the atom
/// appears on, so it is not stored.
class Atom {
public:
    static Atom var(std::string name) { return Atom(VarRef{std::move(name)}); }
    static Atom constant(Value v) { return Atom(std::move(v)); }

    bool is_var() const noexcept { return std::holds_alternative<VarRef>(data_); }
    bool is_const() const noexcept { return !is_var(); }
    const std::string& var_name() const { return std::get<VarRef>(data_).name; }
    const Value& value() const { return std::get<Value>(data_); }

    std::string to_source() const;
    nlohmann::json to_json() const;
    static Atom from_json(const nlohmann::json& j);

    friend bool operator==(const Atom&, const Atom&) = default;

private:
    struct VarRef {
        std::string name;
        friend bool operator==(const VarRef&, const VarRef&) = default;
    };
    explicit Atom(VarRef v) : data_(std::move(v)) {}
    explicit Atom(Value v) : data_(std::move(v)) {}
    std::variant<VarRef, Value> data_;
};

using Payload = std::vector<Atom>;

/// Comma-separated atoms without surrounding parentheses.
std::string payload_to_source(const Payload& p);

} // namespace mscflow
