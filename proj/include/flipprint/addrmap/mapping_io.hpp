// Copyright 2026, The flipprint authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLIPPRINT_ADDRMAP_MAPPING_IO_HPP_
#define FLIPPRINT_ADDRMAP_MAPPING_IO_HPP_

#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "flipprint/addrmap/mapping.hpp"
#include "flipprint/addrmap/stock.hpp"

namespace flipprint::addrmap {

/// "0x24000" style, lower-case, no padding.
inline std::string to_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t parse_hex(const std::string& s) {
  if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
    throw ConfigError("expected hex mask like 0x2040, got '" + s + "'");
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s.substr(2), &pos, 16);
  } catch (const std::exception&) {
    throw ConfigError("bad hex mask '" + s + "'");
  }
  if (pos != s.size() - 2) throw ConfigError("bad hex mask '" + s + "'");
  return v;
}

inline nlohmann::json mapping_to_json(const AddressMapping& m) {
  const auto& d = m.definition();
  auto masks = [](const std::vector<std::uint64_t>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (std::uint64_t x : v) a.push_back(to_hex(x));
    return a;
  };
  return {{"name", d.name},
          {"address_width", d.address_width},
          {"bank_functions", masks(d.bank_fn_masks)},
          {"rank_functions", masks(d.rank_fn_masks)},
          {"channel_functions", masks(d.channel_fn_masks)},
          {"column_bits", d.column_bits},
          {"row_bit_lsb", d.row_bit_lsb}};
}

inline AddressMapping mapping_from_json(const nlohmann::json& j) {
  try {
    AddressMapping::Definition d;
    d.name = j.value("name", std::string("custom"));
    d.address_width = j.at("address_width").get<unsigned>();
    auto masks = [&](const char* key) {
      std::vector<std::uint64_t> out;
      if (j.contains(key))
        for (const auto& s : j.at(key)) out.push_back(parse_hex(s.get<std::string>()));
      return out;
    };
    d.bank_fn_masks = masks("bank_functions");
    d.rank_fn_masks = masks("rank_functions");
    d.channel_fn_masks = masks("channel_functions");
    d.column_bits = j.at("column_bits").get<std::vector<unsigned>>();
    d.row_bit_lsb = j.at("row_bit_lsb").get<unsigned>();
    return AddressMapping(std::move(d));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mapping definition: ") + e.what());
  }
}

inline nlohmann::json layout_to_json(const Layout& l) {
  return {{"name", l.name}, {"width_bits", l.width_bits}, {"mapping", mapping_to_json(l.mapping)}};
}

/// Either a stock layout name ("2Rx8") or an object with an explicit mapping.
inline Layout layout_from_json(const nlohmann::json& j) {
  if (j.is_string()) return stock_layout(j.get<std::string>());
  try {
    return {j.at("name").get<std::string>(), j.at("width_bits").get<std::uint32_t>(),
            mapping_from_json(j.at("mapping"))};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("layout: ") + e.what());
  }
}

}  // namespace flipprint::addrmap

#endif  // FLIPPRINT_ADDRMAP_MAPPING_IO_HPP_
