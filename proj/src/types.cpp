#include "tcas/types.hpp"

#include "tcas/errors.hpp"

namespace tcas {

std::string_view to_string(Device d) {
  return d == Device::phone ? "phone" : "tablet";
}

Device parse_device(std::string_view s) {
  if (s == "phone") return Device::phone;
  if (s == "tablet") return Device::tablet;
  throw ConfigError("unknown device '" + std::string(s) +
                    "' (expected phone|tablet)");
}

}  // namespace tcas
