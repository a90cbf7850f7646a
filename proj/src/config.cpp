// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/config.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "itnorm/errors.hpp"
#include "json.hpp"

namespace itnorm {

namespace {

using nlohmann::json;

void read_int(const json& obj, const std::string& key, int& out) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw DataError("config: '" + key + "' must be an integer");
  out = v.get<int>();
}

std::uint32_t read_magic(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint32_t>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t pos = 0;
    unsigned long parsed = 0;
    try {
      parsed = std::stoul(s, &pos, 0);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == s.size() && pos > 0 && parsed <= 0xFFFFFFFFul) {
      return static_cast<std::uint32_t>(parsed);
    }
  }
  throw DataError("config: '" + key + "' must be an unsigned integer or hex string");
}

template <typename Fields>
void apply_section(const json& root, const char* section, const Fields& fields) {
  if (!root.contains(section)) return;
  const json& obj = root.at(section);
  if (!obj.is_object()) throw DataError(std::string("config: '") + section + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw DataError(std::string("config: unknown key '") + section + "." + key + "'");
    }
    read_int(obj, key, *it->second);
  }
}

}  // namespace

FisrSpec HarnessConfig::fisr_spec(Format fmt) const {
  FisrSpec spec = FisrSpec::defaults_for(fmt);
  spec.magic = fmt == Format::BF16 ? fisr_magic_bf16 : fisr_magic_fp32;
  spec.newton_iters = fisr_newton_iters;
  return spec;
}

HarnessConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw DataError("config: top level must be an object");

  HarnessConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key != "geometry" && key != "stage_costs" && key != "fisr") {
      throw DataError("config: unknown section '" + key + "'");
    }
  }

  MacroGeometry& g = cfg.geometry;
  apply_section(root, "geometry",
                std::map<std::string, int*>{{"n_banks", &g.n_banks},
                                            {"bank_width", &g.bank_width},
                                            {"bank_height", &g.bank_height},
                                            {"d_max", &g.d_max}});
  StageCosts& c = cfg.costs;
  apply_section(root, "stage_costs",
                std::map<std::string, int*>{
                    {"mul_latency", &c.mul_latency},
                    {"add_latency", &c.add_latency},
                    {"mean_sum_fixed", &c.mean_sum_fixed},
                    {"mean_sum_per_chunk", &c.mean_sum_per_chunk},
                    {"mean_sum_partial_pass", &c.mean_sum_partial_pass},
                    {"mean_multiply_fixed", &c.mean_multiply_fixed},
                    {"mean_shift_fixed", &c.mean_shift_fixed},
                    {"mean_shift_per_chunk", &c.mean_shift_per_chunk},
                    {"inner_product_fixed", &c.inner_product_fixed},
                    {"inner_product_per_chunk", &c.inner_product_per_chunk},
                    {"inner_product_partial_pass", &c.inner_product_partial_pass},
                    {"iteration_fixed", &c.iteration_fixed},
                    {"output_scale_fixed", &c.output_scale_fixed},
                    {"output_scale_per_chunk", &c.output_scale_per_chunk},
                    {"output_affine_fixed", &c.output_affine_fixed},
                    {"output_affine_per_chunk", &c.output_affine_per_chunk},
                });

  if (root.contains("fisr")) {
    const json& f = root.at("fisr");
    if (!f.is_object()) throw DataError("config: 'fisr' must be an object");
    for (const auto& [key, value] : f.items()) {
      if (key == "fp32_magic") {
        cfg.fisr_magic_fp32 = read_magic(value, key);
      } else if (key == "bf16_magic") {
        cfg.fisr_magic_bf16 = read_magic(value, key);
        if (cfg.fisr_magic_bf16 > 0xFFFFu) throw DataError("config: bf16_magic exceeds 16 bits");
      } else if (key == "newton_iters") {
        read_int(f, key, cfg.fisr_newton_iters);
      } else {
        throw DataError("config: unknown key 'fisr." + key + "'");
      }
    }
  }

  try {
    cfg.geometry.validate();
    cfg.costs.validate();
  } catch (const UsageError& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (cfg.fisr_newton_iters < 0) throw DataError("config: newton_iters must be >= 0");
  return cfg;
}

HarnessConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace itnorm
