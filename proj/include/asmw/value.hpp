#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace asmw {

// A runtime value: the logic elements true/false/nil, a natural number, or an
// element of a declared finite enumeration.
class Value {
 public:
  enum class Kind { True, False, Nil, Natural, Enum };

  Value() : kind_(Kind::Nil) {}

  static Value boolean(bool b) { return Value(b ? Kind::True : Kind::False); }
  static Value true_value() { return Value(Kind::True); }
  static Value false_value() { return Value(Kind::False); }
  static Value nil() { return Value(Kind::Nil); }
  static Value natural(std::uint64_t n) {
    Value v(Kind::Natural);
    v.nat_ = n;
    return v;
  }
  static Value enum_element(std::string type, std::string element) {
    Value v(Kind::Enum);
    v.enum_type_ = std::move(type);
    v.enum_element_ = std::move(element);
    return v;
  }

  Kind kind() const { return kind_; }
  bool is_true() const { return kind_ == Kind::True; }
  bool is_false() const { return kind_ == Kind::False; }
  bool is_nil() const { return kind_ == Kind::Nil; }
  bool is_boolean() const { return is_true() || is_false(); }
  bool is_natural() const { return kind_ == Kind::Natural; }
  bool is_enum() const { return kind_ == Kind::Enum; }

  std::uint64_t natural_value() const { return nat_; }
  const std::string& enum_type() const { return enum_type_; }
  const std::string& enum_element() const { return enum_element_; }

  // Surface syntax spelling; enum elements print as their bare name.
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::Natural:
        return a.nat_ == b.nat_;
      case Kind::Enum:
        return a.enum_type_ == b.enum_type_ && a.enum_element_ == b.enum_element_;
      default:
        return true;
    }
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    switch (a.kind_) {
      case Kind::Natural:
        return a.nat_ < b.nat_;
      case Kind::Enum:
        if (a.enum_type_ != b.enum_type_) return a.enum_type_ < b.enum_type_;
        return a.enum_element_ < b.enum_element_;
      default:
        return false;
    }
  }

 private:
  explicit Value(Kind k) : kind_(k) {}

  Kind kind_;
  std::uint64_t nat_ = 0;
  std::string enum_type_;
  std::string enum_element_;
};

}  // namespace asmw
