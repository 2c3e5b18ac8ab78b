#include "qstab/registry.hpp"

#include <set>

namespace qstab {

using nlohmann::json;

namespace {

GraphSpec triangle() { return {3, {{0, 1}, {1, 2}, {0, 2}}}; }
GraphSpec path2() { return {2, {{0, 1}}}; }
GraphSpec quad_missing_01() { return {4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}}; }

Index get_index(const json& p, const char* key, Index fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number_integer()) throw InvalidInput(std::string("parameter '") + key + "' must be an integer");
  return p[key].get<Index>();
}

void check_keys(const json& p, std::set<std::string> allowed) {
  if (!p.is_object()) throw InvalidInput("problem parameters must be a JSON object");
  for (auto it = p.begin(); it != p.end(); ++it)
    if (!allowed.count(it.key())) throw InvalidInput("unknown problem parameter '" + it.key() + "'");
}

}  // namespace

GraphSpec graph_from_json(const json& p, const GraphSpec& fallback) {
  if (!p.contains("edges")) {
    if (p.contains("vertices")) throw InvalidInput("graph: 'vertices' given without 'edges'");
    return fallback;
  }
  GraphSpec g;
  Index maxv = -1;
  for (const auto& e : p["edges"]) {
    if (!e.is_array() || e.size() != 2) throw InvalidInput("graph: each edge must be a pair");
    g.edges.push_back({e[0].get<Index>(), e[1].get<Index>()});
    maxv = std::max({maxv, g.edges.back().first, g.edges.back().second});
  }
  g.vertices = get_index(p, "vertices", maxv + 1);
  return g;
}

const std::vector<RegistryEntry>& registered_problems() {
  static const std::vector<RegistryEntry> entries = {
      {"twisted-cubic", "nearest point on the twisted cubic (t, t^2, t^3)", "none"},
      {"twisted-cubic-bad", "twisted cubic through a 2x3 kernel formulation with a non-informative dual", "none"},
      {"cuspidal-cubic", "nearest point on the cuspidal cubic (t^2, t^3)", "none"},
      {"rank-one", "nearest rank-one tensor, all flattening 2x2 minors", "shape=[2,2]"},
      {"rotation-sync", "O(d) synchronization over a graph", "vertices, edges=triangle, d=2"},
      {"se-sync", "SE(d) synchronization over a graph", "vertices, edges=[[0,1]], d=2"},
      {"procrustes", "min ||A X C - B||_F over X^T X = I_k", "m1=3, n=2, k=2, m2=3"},
      {"edm-1d", "1-D distance matrix completion with Cayley-Menger constraints",
       "vertices, edges=[[0,2],[0,3],[1,2],[1,3],[2,3]]"},
      {"sos-binary-sextic", "z1^4 z2^2 + z1^2 z2^4 + theta z1^2 z2^2", "none"},
      {"sos-univariate-quartic", "z^4 - theta z", "none"},
  };
  return entries;
}

namespace {

ParametricProblem build(const std::string& name, const json& params) {
  const json p = params.is_null() ? json::object() : params;
  if (name == "twisted-cubic" || name == "twisted-cubic-bad" || name == "cuspidal-cubic" ||
      name == "sos-binary-sextic" || name == "sos-univariate-quartic") {
    check_keys(p, {});
    if (name == "twisted-cubic") return twisted_cubic();
    if (name == "twisted-cubic-bad") return twisted_cubic_bad();
    if (name == "cuspidal-cubic") return cuspidal_cubic();
    if (name == "sos-binary-sextic") return sos_binary_sextic();
    return sos_univariate_quartic();
  }
  if (name == "rank-one") {
    check_keys(p, {"shape"});
    std::vector<Index> shape = {2, 2};
    if (p.contains("shape")) shape = p["shape"].get<std::vector<Index>>();
    return rank_one_approximation(shape);
  }
  if (name == "rotation-sync" || name == "se-sync") {
    check_keys(p, {"vertices", "edges", "d"});
    const Index d = get_index(p, "d", 2);
    if (name == "rotation-sync") return rotation_sync(graph_from_json(p, triangle()), d);
    return se_sync(graph_from_json(p, path2()), d);
  }
  if (name == "procrustes") {
    check_keys(p, {"m1", "n", "k", "m2"});
    return procrustes(get_index(p, "m1", 3), get_index(p, "n", 2), get_index(p, "k", 2), get_index(p, "m2", 3));
  }
  if (name == "edm-1d") {
    check_keys(p, {"vertices", "edges"});
    return edm_1d(graph_from_json(p, quad_missing_01()));
  }
  throw InvalidInput("unknown problem '" + name + "'");
}

}  // namespace

ParametricProblem make_problem(const std::string& name, const json& params) {
  try {
    return build(name, params);
  } catch (const json::exception& e) {
    throw InvalidInput("bad parameters for '" + name + "': " + e.what());
  }
}

}  // namespace qstab
