#include "online_alloc/instance_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace online_alloc {

namespace {

using nlohmann::json;

json utility_to_json(const UtilityFunction& f) {
  const auto& payload = f.payload();
  if (const auto* u = std::get_if<LinearSimplex>(&payload)) {
    return {{"kind", "linear_simplex"}, {"c", u->c}};
  }
  if (const auto* u = std::get_if<LinearSimplexEq>(&payload)) {
    return {{"kind", "linear_simplex_eq"}, {"c", u->c}};
  }
  const auto& shape = std::get<ConcaveScalar>(payload).shape();
  if (const auto* u = std::get_if<PowerUtility>(&shape)) {
    return {{"kind", "concave_power"}, {"a", u->a}, {"p", u->p}};
  }
  if (const auto* u = std::get_if<LogUtility>(&shape)) {
    return {{"kind", "concave_log"}, {"a", u->a}, {"s", u->s}};
  }
  throw std::invalid_argument("custom scalar utilities cannot be serialized");
}

UtilityFunction utility_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear_simplex") return UtilityFunction::linear_simplex(j.at("c").get<std::vector<double>>());
  if (kind == "linear_simplex_eq") {
    return UtilityFunction::linear_simplex_eq(j.at("c").get<std::vector<double>>());
  }
  if (kind == "concave_power") return UtilityFunction::power(j.at("a").get<double>(), j.at("p").get<double>());
  if (kind == "concave_log") return UtilityFunction::log(j.at("a").get<double>(), j.at("s").get<double>());
  throw std::invalid_argument("unknown utility kind '" + kind + "'");
}

}  // namespace

std::string instance_to_json(const Instance& instance, int indent) {
  json items = json::array();
  for (const Item& item : instance.items) {
    json rows = json::array();
    for (std::size_t i = 0; i < item.A.rows(); ++i) {
      const auto row = item.A.row(i);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    items.push_back({{"utility", utility_to_json(item.f)}, {"A", std::move(rows)}});
  }
  json doc = {{"n", instance.n()}, {"m", instance.m}, {"k", instance.k},
              {"b", instance.b}, {"items", std::move(items)}};
  return doc.dump(indent);
}

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("instance JSON: ") + e.what());
  }
  try {
    Instance instance;
    instance.m = doc.at("m").get<std::size_t>();
    instance.k = doc.at("k").get<std::size_t>();
    instance.b = doc.at("b").get<std::vector<double>>();
    const std::size_t n = doc.at("n").get<std::size_t>();
    for (const json& entry : doc.at("items")) {
      std::vector<double> data;
      data.reserve(instance.m * instance.k);
      const auto& rows = entry.at("A");
      if (rows.size() != instance.m) throw std::invalid_argument("A must have m rows");
      for (const json& row : rows) {
        auto values = row.get<std::vector<double>>();
        if (values.size() != instance.k) throw std::invalid_argument("A rows must have k entries");
        data.insert(data.end(), values.begin(), values.end());
      }
      instance.items.push_back(
          {utility_from_json(entry.at("utility")), Matrix(instance.m, instance.k, std::move(data))});
    }
    if (instance.items.size() != n) throw std::invalid_argument("item count does not match n");
    instance.validate();
    return instance;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("instance JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("instance JSON: ") + e.what());
  }
}

void write_instance(const std::filesystem::path& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << instance_to_json(instance) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

}  // namespace online_alloc
