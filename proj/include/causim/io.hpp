#pragma once

// File formats: population and DAG model JSON, trial/observational CSV, and
// JointDist JSON output.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "causim/dagmodel.hpp"
#include "causim/errors.hpp"
#include "causim/population.hpp"
#include "causim/tables.hpp"
#include "causim/trial.hpp"

namespace causim {

using Json = nlohmann::json;

namespace detail {

inline std::uint8_t bit_from_json(const Json& j, const std::string& where) {
  require(j.is_number_integer(), where + ": expected 0 or 1");
  const auto v = j.get<long long>();
  require(v == 0 || v == 1, where + ": expected 0 or 1");
  return static_cast<std::uint8_t>(v);
}

inline double prob_from_json(const Json& j, const std::string& where) {
  require(j.is_number(), where + ": expected a number");
  return j.get<double>();
}

inline std::size_t count_from_json(const Json& j, const std::string& where) {
  require(j.is_number_integer() && j.get<long long>() >= 0,
          where + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

}  // namespace detail

/// Accepts the explicit form {"n", "attributes", "tau", "nu"} or the
/// generator form {"blocks": [{"count", "attrs", "tau", "nu"}, ...]}.
/// Attribute columns are ordered by name.
inline Population population_from_json(const Json& j) {
  detail::require(j.is_object(), "population: expected a JSON object");
  if (j.contains("blocks")) {
    const auto& blocks = j.at("blocks");
    detail::require(blocks.is_array(), "population.blocks: expected an array");
    std::vector<PopulationBlock> parsed;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& blk = blocks[b];
      const std::string where = "population.blocks[" + std::to_string(b) + "]";
      detail::require(blk.is_object() && blk.contains("count") &&
                          blk.contains("tau") && blk.contains("nu"),
                      where + ": needs count, tau, nu");
      PopulationBlock pb;
      pb.count = detail::count_from_json(blk.at("count"), where + ".count");
      pb.tau = detail::prob_from_json(blk.at("tau"), where + ".tau");
      pb.nu = detail::prob_from_json(blk.at("nu"), where + ".nu");
      if (blk.contains("attrs")) {
        detail::require(blk.at("attrs").is_object(), where + ".attrs: expected an object");
        for (const auto& [name, value] : blk.at("attrs").items())
          pb.attrs.emplace_back(name, detail::bit_from_json(value, where + ".attrs." + name));
      }
      parsed.push_back(std::move(pb));
    }
    return expand_blocks(parsed);
  }

  detail::require(j.contains("n") && j.contains("tau") && j.contains("nu"),
                  "population: needs n, tau, nu (or blocks)");
  const std::size_t n = detail::count_from_json(j.at("n"), "population.n");
  auto prob_vector = [](const Json& arr, const std::string& where) {
    detail::require(arr.is_array(), where + ": expected an array");
    std::vector<double> out;
    for (const auto& x : arr) out.push_back(detail::prob_from_json(x, where));
    return out;
  };
  std::vector<Attribute> attributes;
  if (j.contains("attributes")) {
    detail::require(j.at("attributes").is_object(),
                    "population.attributes: expected an object");
    for (const auto& [name, values] : j.at("attributes").items()) {
      const std::string where = "population.attributes." + name;
      detail::require(values.is_array(), where + ": expected an array");
      Attribute a{name, {}};
      for (const auto& v : values) a.values.push_back(detail::bit_from_json(v, where));
      attributes.push_back(std::move(a));
    }
  }
  return Population::build(n, std::move(attributes),
                           prob_vector(j.at("tau"), "population.tau"),
                           prob_vector(j.at("nu"), "population.nu"));
}

inline Json population_to_json(const Population& pop) {
  Json attrs = Json::object();
  for (const auto& a : pop.attributes()) {
    Json col = Json::array();
    for (auto v : a.values) col.push_back(static_cast<int>(v));
    attrs[a.name] = std::move(col);
  }
  return {{"n", pop.size()}, {"attributes", attrs}, {"tau", pop.tau()}, {"nu", pop.nu()}};
}

/// Header `k,individual,treated,response,<attributes...>`; k and individual
/// are 1-based. LF line endings.
inline void write_trial_csv(std::ostream& os, const Population& pop,
                            const TrialOutcome& trial) {
  os << "k,individual,treated,response";
  for (const auto& a : pop.attributes()) os << ',' << a.name;
  os << '\n';
  for (std::size_t k = 0; k < trial.s(); ++k) {
    const std::size_t i = trial.sample[k];
    os << (k + 1) << ',' << (i + 1) << ',' << static_cast<int>(trial.treated[k])
       << ',' << static_cast<int>(trial.response[k]);
    for (const auto& a : pop.attributes()) os << ',' << static_cast<int>(a.values[i]);
    os << '\n';
  }
}

/// Header `k,individual,<attributes...>`; 1-based like the trial export.
inline void write_observational_csv(std::ostream& os, const Population& pop,
                                    const ObservationalSample& sample) {
  os << "k,individual";
  for (const auto& a : pop.attributes()) os << ',' << a.name;
  os << '\n';
  for (std::size_t k = 0; k < sample.size(); ++k) {
    os << (k + 1) << ',' << (sample.draws[k] + 1);
    for (auto v : sample.data[k]) os << ',' << static_cast<int>(v);
    os << '\n';
  }
}

/// A trial CSV read back: the outcome (0-based individuals) plus the
/// attribute columns in sample order.
struct TrialRecord {
  TrialOutcome trial;
  std::vector<Stratifier> attributes;
};

inline TrialRecord read_trial_csv(std::istream& is) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  auto strip_cr = [](std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  std::string line;
  detail::require(static_cast<bool>(std::getline(is, line)), "trial CSV: missing header");
  strip_cr(line);
  const auto header = split(line);
  detail::require(header.size() >= 4 && header[0] == "k" && header[1] == "individual" &&
                      header[2] == "treated" && header[3] == "response",
                  "trial CSV: header must start with k,individual,treated,response");
  TrialRecord rec;
  for (std::size_t c = 4; c < header.size(); ++c) rec.attributes.push_back({header[c], {}});

  auto parse_uint = [](const std::string& cell, std::size_t row) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    detail::require(used == cell.size() && !cell.empty() && cell[0] != '-',
                    "trial CSV row " + std::to_string(row) + ": bad value '" + cell + "'");
    return v;
  };
  auto parse_bit = [&](const std::string& cell, std::size_t row) {
    const auto v = parse_uint(cell, row);
    detail::require(v <= 1, "trial CSV row " + std::to_string(row) + ": expected 0/1");
    return static_cast<std::uint8_t>(v);
  };

  std::size_t row = 0;
  while (std::getline(is, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const auto cells = split(line);
    detail::require(cells.size() == header.size(),
                    "trial CSV row " + std::to_string(row) + ": wrong column count");
    detail::require(parse_uint(cells[0], row) == row,
                    "trial CSV row " + std::to_string(row) + ": k out of sequence");
    const auto individual = parse_uint(cells[1], row);
    detail::require(individual >= 1, "trial CSV: individuals are 1-based");
    rec.trial.sample.push_back(static_cast<std::size_t>(individual - 1));
    rec.trial.treated.push_back(parse_bit(cells[2], row));
    rec.trial.response.push_back(parse_bit(cells[3], row));
    for (std::size_t c = 4; c < cells.size(); ++c)
      rec.attributes[c - 4].values.push_back(parse_bit(cells[c], row));
  }
  return rec;
}

inline std::vector<TreatResponse> treat_response_pairs(const TrialOutcome& trial) {
  std::vector<TreatResponse> out;
  out.reserve(trial.s());
  for (std::size_t k = 0; k < trial.s(); ++k)
    out.push_back({trial.treated[k], trial.response[k]});
  return out;
}

/// {"vertices": [{"name", "parents": [names], "cpt": [...]}, ...]}
inline BinaryDag dag_from_json(const Json& j) {
  detail::require(j.is_object() && j.contains("vertices") && j.at("vertices").is_array(),
                  "model: expected {\"vertices\": [...]}");
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> parents;
  std::vector<std::vector<double>> cpt;
  for (const auto& v : j.at("vertices")) {
    detail::require(v.is_object() && v.contains("name") && v.at("name").is_string(),
                    "model vertex: needs a string name");
    const auto name = v.at("name").get<std::string>();
    names.push_back(name);
    std::vector<std::string> ps;
    if (v.contains("parents")) {
      detail::require(v.at("parents").is_array(), "vertex '" + name + "': parents must be an array");
      for (const auto& p : v.at("parents")) {
        detail::require(p.is_string(), "vertex '" + name + "': parent names must be strings");
        ps.push_back(p.get<std::string>());
      }
    }
    parents.push_back(std::move(ps));
    detail::require(v.contains("cpt") && v.at("cpt").is_array(),
                    "vertex '" + name + "': needs a cpt array");
    std::vector<double> table;
    for (const auto& p : v.at("cpt"))
      table.push_back(detail::prob_from_json(p, "vertex '" + name + "' cpt"));
    cpt.push_back(std::move(table));
  }
  return build_dag<double>(names, parents, std::move(cpt));
}

/// Key for assignment x: one character per vertex, vertex 0 first.
inline std::string assignment_key(std::uint64_t x, std::size_t q) {
  std::string key(q, '0');
  for (std::size_t v = 0; v < q; ++v)
    if ((x >> v) & 1U) key[v] = '1';
  return key;
}

inline Json joint_to_json(const std::vector<std::string>& names, const JointDist& dist) {
  Json probs = Json::object();
  for (std::uint64_t x = 0; x < dist.probs.size(); ++x)
    probs[assignment_key(x, dist.q)] = dist.probs[x];
  return {{"vertices", names}, {"probs", probs}};
}

}  // namespace causim
