#include "qstab/qcqp_io.hpp"

namespace qstab {

using nlohmann::json;

namespace {

json dense(const SymMatrix& A) {
  json a = json::array();
  for (Index i = 0; i < A.n(); ++i)
    for (Index j = 0; j < A.n(); ++j) a.push_back(A(i, j));
  return a;
}

SymMatrix read_dense(const json& a, Index N, const char* what) {
  if (!a.is_array() || static_cast<Index>(a.size()) != N * N)
    throw InvalidInput(std::string("problem json: ") + what + " must have N*N entries");
  Matrix m(N, N);
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < N; ++j) {
      const json& v = a[i * N + j];
      if (!v.is_number()) throw InvalidInput(std::string("problem json: non-numeric entry in ") + what);
      m(i, j) = v.get<double>();
    }
  if (m != m.transpose()) throw InvalidInput(std::string("problem json: ") + what + " is not symmetric");
  return SymMatrix(m);
}

}  // namespace

json problem_to_json(const HomQCQP& p) {
  p.validate();
  json j;
  j["N"] = p.N;
  j["G"] = dense(p.G);
  j["constraints"] = json::array();
  for (const auto& c : p.constraints) j["constraints"].push_back({{"H", dense(c.H)}, {"b", c.b}});
  j["hom_index"] = p.hom_index ? json(*p.hom_index) : json(nullptr);
  return j;
}

HomQCQP problem_from_json(const json& j) {
  try {
    HomQCQP p;
    p.N = j.at("N").get<Index>();
    if (p.N < 1) throw InvalidInput("problem json: N must be positive");
    p.G = read_dense(j.at("G"), p.N, "G");
    for (const auto& c : j.at("constraints")) {
      p.constraints.push_back({read_dense(c.at("H"), p.N, "H"), c.at("b").get<double>()});
    }
    if (j.contains("hom_index") && !j["hom_index"].is_null()) p.hom_index = j["hom_index"].get<Index>();
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("problem json: ") + e.what());
  }
}

std::string problem_to_string(const HomQCQP& p) { return problem_to_json(p).dump(); }

HomQCQP problem_from_string(const std::string& s) {
  json j;
  try {
    j = json::parse(s);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("problem json: ") + e.what());
  }
  return problem_from_json(j);
}

}  // namespace qstab
