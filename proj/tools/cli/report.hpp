#pragma once

#include <ostream>

#include "json.hpp"

#include "fsnet/counter.hpp"
#include "fsnet/ratio.hpp"

namespace fsnet::cli {

using Json = nlohmann::ordered_json;

inline Json to_json(const MultCounter& c) {
  return Json{{"multiplies", c.multiplies}, {"additions", c.additions}};
}

inline void emit(std::ostream& out, const Json& report) { out << report.dump(2) << '\n'; }

}  // namespace fsnet::cli
