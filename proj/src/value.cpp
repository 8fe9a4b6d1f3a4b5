#include "mscflow/value.hpp"

#include <charconv>

#include "mscflow/error.hpp"

namespace mscflow {

std::string_view type_name(ValueType t) noexcept {
    switch (t) {
    case ValueType::string: return "str";
    case ValueType::integer: return "int";
    case ValueType::boolean: return "bool";
    }
    return "?";
}

std::optional<ValueType> parse_type_name(std::string_view name) noexcept {
    if (name == "str") return ValueType::string;
    if (name == "int") return ValueType::integer;
    if (name == "bool") return ValueType::boolean;
    return std::nullopt;
}

ValueType Value::type() const noexcept {
    switch (data_.index()) {
    case 0: return ValueType::string;
    case 1: return ValueType::integer;
    default: return ValueType::boolean;
    }
}

const std::string& Value::as_string() const {
    if (auto* s = std::get_if<std::string>(&data_)) return *s;
    throw Error(Errc::type, "value " + to_source() + " is not a string");
}

std::int64_t Value::as_integer() const {
    if (auto* i = std::get_if<std::int64_t>(&data_)) return *i;
    throw Error(Errc::type, "value " + to_source() + " is not an integer");
}

bool Value::as_boolean() const {
    if (auto* b = std::get_if<bool>(&data_)) return *b;
    throw Error(Errc::type, "value " + to_source() + " is not a boolean");
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

} // namespace

std::string Value::to_source() const {
    switch (type()) {
    case ValueType::string: return quote(std::get<std::string>(data_));
    case ValueType::integer: return std::to_string(std::get<std::int64_t>(data_));
    case ValueType::boolean: return std::get<bool>(data_) ? "true" : "false";
    }
    return {};
}

std::string Value::to_display() const {
    if (type() == ValueType::string) return std::get<std::string>(data_);
    return to_source();
}

nlohmann::json Value::to_json() const {
    switch (type()) {
    case ValueType::string: return std::get<std::string>(data_);
    case ValueType::integer: return std::get<std::int64_t>(data_);
    case ValueType::boolean: return std::get<bool>(data_);
    }
    return nullptr;
}

Value Value::from_json(const nlohmann::json& j) {
    if (j.is_string()) return string(j.get<std::string>());
    if (j.is_boolean()) return boolean(j.get<bool>());
    if (j.is_number_integer()) return integer(j.get<std::int64_t>());
    throw Error(Errc::json_parse, "unsupported JSON value: " + j.dump());
}

std::optional<Value> Value::coerce(const nlohmann::json& j, ValueType type) {
    switch (type) {
    case ValueType::string:
        if (j.is_string()) return string(j.get<std::string>());
        return std::nullopt;
    case ValueType::integer:
        if (j.is_number_integer()) return integer(j.get<std::int64_t>());
        if (j.is_string()) return parse_as(j.get<std::string>(), type);
        return std::nullopt;
    case ValueType::boolean:
        if (j.is_boolean()) return boolean(j.get<bool>());
        if (j.is_string()) return parse_as(j.get<std::string>(), type);
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Value> Value::parse_as(std::string_view text, ValueType type) {
    switch (type) {
    case ValueType::string: return string(std::string(text));
    case ValueType::integer: {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
        return integer(v);
    }
    case ValueType::boolean:
        if (text == "true") return boolean(true);
        if (text == "false") return boolean(false);
        return std::nullopt;
    }
    return std::nullopt;
}

std::string Atom::to_source() const {
    return is_var() ? var_name() : value().to_source();
}

nlohmann::json Atom::to_json() const {
    if (is_var()) return {{"var", var_name()}};
    return {{"const", value().to_json()}};
}

Atom Atom::from_json(const nlohmann::json& j) {
    if (j.contains("var")) return var(j.at("var").get<std::string>());
    if (j.contains("const")) return constant(Value::from_json(j.at("const")));
    throw Error(Errc::json_parse, "malformed atom: " + j.dump());
}

std::string payload_to_source(const Payload& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ", ";
        out += p[i].to_source();
    }
    return out;
}

} // namespace mscflow
