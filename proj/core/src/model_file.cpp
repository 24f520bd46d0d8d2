#include "bshq/model_file.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bshq/error.hpp"

namespace bshq {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string &path, const std::string &message) {
  throw ModelError(path + ": " + message);
}

const json &require(const json &obj, const std::string &key,
                    const std::string &path) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(path, "missing key '" + key + "'");
  return *it;
}

std::string as_string(const json &v, const std::string &path) {
  if (!v.is_string())
    fail(path, "expected a string");
  return v.get<std::string>();
}

double as_number(const json &v, const std::string &path) {
  if (!v.is_number())
    fail(path, "expected a number");
  return v.get<double>();
}

Expression as_expression(const json &v, const std::string &path) {
  std::string text = as_string(v, path);
  try {
    return parse_expression(text);
  } catch (const ParseError &e) {
    throw ParseError(e.position(), path + ": " + e.detail());
  }
}

Box as_box(const json &v, const std::string &path) {
  try {
    if (v.is_string())
      return parse_box(v.get<std::string>());
  } catch (const ModelError &e) {
    fail(path, e.what());
  }
  if (!v.is_array())
    fail(path, "expected \"a:b,...\" or [[a, b], ...]");
  Box box;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const json &iv = v[k];
    std::string p = path + "/" + std::to_string(k);
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_integer() ||
        !iv[1].is_number_integer())
      fail(p, "expected [lo, hi] with integer bounds");
    AxisInterval a{iv[0].get<std::int64_t>(), iv[1].get<std::int64_t>()};
    if (a.lo > a.hi)
      fail(p, "empty interval");
    box.push_back(a);
  }
  return box;
}

// Rethrow validation errors with the document path of the offending item.
template <class F> void at_path(const std::string &path, F &&f) {
  try {
    f();
  } catch (const ParseError &e) {
    throw ParseError(e.position(), path + ": " + e.detail());
  } catch (const InconsistentQuantization &) {
    throw;
  } catch (const ModelError &e) {
    fail(path, e.what());
  } catch (const EvaluationError &e) {
    fail(path, e.what());
  }
}

} // namespace

ModelDefinition parse_model_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ModelError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    fail("/", "expected a JSON object");

  ModelDefinition m;
  m.name = as_string(require(doc, "name", "/"), "/name");
  std::string kind = as_string(require(doc, "kind", "/"), "/kind");
  if (kind == "lattice")
    m.kind = ModelKind::Lattice;
  else if (kind == "potential")
    m.kind = ModelKind::Potential;
  else
    fail("/kind", "expected \"lattice\" or \"potential\", got \"" + kind + "\"");

  const json &dof = require(doc, "dof", "/");
  if (!dof.is_number_integer() || dof.get<long long>() < 1 ||
      dof.get<long long>() > 64)
    fail("/dof", "expected a positive integer");
  m.dof = static_cast<std::size_t>(dof.get<long long>());

  if (auto it = doc.find("constants"); it != doc.end()) {
    if (!it->is_object())
      fail("/constants", "expected an object");
    for (const auto &[name, value] : it->items()) {
      std::string p = "/constants/" + name;
      m.constants[name] = as_number(value, p);
    }
  }
  if (auto it = doc.find("hbar"); it != doc.end()) {
    m.default_hbar = as_number(*it, "/hbar");
    if (!(m.default_hbar > 0.0))
      fail("/hbar", "must be positive");
  }
  if (auto it = doc.find("box"); it != doc.end()) {
    m.default_box = as_box(*it, "/box");
    if (m.default_box.size() != m.dof)
      fail("/box", "expected one interval per degree of freedom");
  }

  // Constants are checked before anything refers to them.
  for (const auto &[name, value] : m.constants) {
    at_path("/constants/" + name, [&] {
      ModelDefinition probe;
      probe.name = "probe";
      probe.constants = {{name, value}};
      validate(probe);
    });
  }

  if (m.kind == ModelKind::Potential) {
    m.potential = as_expression(require(doc, "potential", "/"), "/potential");
    std::string domain = as_string(require(doc, "domain", "/"), "/domain");
    at_path("/domain", [&] { m.domain = parse_domain(domain); });
    if (auto it = doc.find("window"); it != doc.end()) {
      if (!it->is_array() || it->size() != 2)
        fail("/window", "expected [lo, hi]");
      m.window = {as_number((*it)[0], "/window/0"),
                  as_number((*it)[1], "/window/1")};
    }
    at_path("/potential", [&] { validate(m); });
    return m;
  }

  const json &lattice = require(doc, "lattice", "/");
  if (!lattice.is_object())
    fail("/lattice", "expected an object");
  if (auto it = lattice.find("offsets"); it != lattice.end()) {
    if (!it->is_array() || it->size() != m.dof)
      fail("/lattice/offsets", "expected one number per degree of freedom");
    for (std::size_t k = 0; k < it->size(); ++k)
      m.offsets.push_back(
          as_number((*it)[k], "/lattice/offsets/" + std::to_string(k)));
    for (std::size_t k = 0; k < m.offsets.size(); ++k)
      if (!(m.offsets[k] >= 0.0 && m.offsets[k] < 1.0))
        fail("/lattice/offsets/" + std::to_string(k), "must lie in [0, 1)");
  } else {
    m.offsets.assign(m.dof, 0.0);
  }
  const json &constraints =
      require(lattice, "constraints", "/lattice");
  if (!constraints.is_array())
    fail("/lattice/constraints", "expected an array of strings");
  RealBindings probe = m.constants;
  probe["hbar"] = 1.0;
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    std::string p = "/lattice/constraints/" + std::to_string(k);
    std::string c = as_string(constraints[k], p);
    at_path(p, [&] { parse_constraint(c, m.dof, probe); });
    m.constraints.push_back(std::move(c));
  }

  if (auto it = doc.find("profiles"); it != doc.end()) {
    if (!it->is_object())
      fail("/profiles", "expected an object keyed by axis number");
    for (const auto &[key, value] : it->items()) {
      std::string p = "/profiles/" + key;
      std::size_t axis = 0;
      try {
        std::size_t used = 0;
        long long v = std::stoll(key, &used);
        if (used != key.size() || v < 1 || static_cast<std::size_t>(v) > m.dof)
          throw std::invalid_argument(key);
        axis = static_cast<std::size_t>(v - 1);
      } catch (const std::exception &) {
        fail(p, "profile key must be an axis number between 1 and " +
                    std::to_string(m.dof));
      }
      Expression rho = as_expression(value, p);
      at_path(p, [&] {
        RadialProfile(axis, bind_constants(rho, m.constants), m.dof);
      });
      m.profiles.emplace(axis, rho);
    }
  }

  m.hamiltonian =
      as_expression(require(doc, "hamiltonian", "/"), "/hamiltonian");
  if (auto it = doc.find("observables"); it != doc.end()) {
    if (!it->is_object())
      fail("/observables", "expected an object");
    for (const auto &[name, value] : it->items()) {
      std::string p = "/observables/" + name;
      Expression e = as_expression(value, p);
      at_path(p, [&] { split_observable(e, m.dof); });
      m.observables.emplace(name, e);
    }
  }
  if (m.default_box.empty()) {
    for (std::size_t k = 0; k < m.dof; ++k)
      m.default_box.push_back({0, 10});
  }

  at_path("/", [&] { validate(m); });
  return m;
}

ModelDefinition load_model_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ModelError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_file(buf.str());
}

} // namespace bshq
