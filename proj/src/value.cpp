#include "asmw/value.hpp"

namespace asmw {

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Nil:
      return "nil";
    case Kind::Natural:
      return std::to_string(nat_);
    case Kind::Enum:
      return enum_element_;
  }
  return "nil";
}

}  // namespace asmw
