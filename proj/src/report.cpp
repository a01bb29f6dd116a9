#include "fogalloc/report.hpp"

#include <stdexcept>
#include <string>

namespace fogalloc {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::local: return "local";
    case Method::dc: return "dc";
    case Method::two_step: return "two-step";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "local") return Method::local;
  if (name == "dc") return Method::dc;
  if (name == "two-step") return Method::two_step;
  if (name == "oracle") return Method::oracle;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

}  // namespace fogalloc
