#include "qstab/report.hpp"

#include <cmath>
#include <cstdio>

namespace qstab {

using nlohmann::json;

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json json_vector(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(json_number(v(i)));
  return a;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

namespace {

json opt_number(const std::optional<double>& v) { return v ? json_number(*v) : json(nullptr); }

json radius_json(const std::optional<Radius>& r) {
  if (!r) return nullptr;
  return {{"value", json_number(r->value)}, {"degenerate", r->degenerate}};
}

}  // namespace

json certificate_to_json(const GapCertificate& c, bool include_timing) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["solver_status"] = to_string(c.solver_status);
  j["iterations"] = c.iterations;
  j["residuals"] = {{"primal_feas", json_number(c.residuals.primal_feas)},
                    {"dual_feas", json_number(c.residuals.dual_feas)},
                    {"rel_gap", json_number(c.residuals.rel_gap)}};
  j["dval"] = json_number(c.dval);
  j["pval_relaxation"] = json_number(c.pval_relaxation);
  j["pval_candidate"] = opt_number(c.pval_candidate);
  j["gap_abs"] = opt_number(c.gap_abs);
  j["gap_rel"] = opt_number(c.gap_rel);
  j["lambda"] = json_vector(c.lambda);
  j["rank_S"] = c.rank_S;
  j["corank_Q"] = c.corank_Q;
  j["nu1"] = json_number(c.nu1);
  j["nu2"] = json_number(c.nu2);
  j["x_hat"] = c.x_hat ? json_vector(*c.x_hat) : json(nullptr);
  j["checks"] = {{"primal_feasible", c.primal_feasible},
                 {"multiplier", c.multiplier},
                 {"dual_feasible", c.dual_feasible},
                 {"corank_one", c.corank_one}};
  j["kkt"] = {{"feas", json_number(c.kkt.feas)},
              {"stat", json_number(c.kkt.stat)},
              {"psd_slack", json_number(c.kkt.psd_slack)}};
  j["oracle_used"] = c.oracle_used;
  j["warnings"] = c.warnings;
  if (include_timing) j["solve_seconds"] = c.solve_seconds;
  return j;
}

json slater_to_json(const RestrictedSlater& rs) {
  return {{"holds", rs.holds},
          {"t_star", json_number(rs.t_star)},
          {"mu_star", json_vector(rs.mu_star)},
          {"V_dim", rs.V_dim},
          {"inconclusive", rs.inconclusive}};
}

json stability_to_json(const StabilityReport& r) {
  json j;
  if (r.acq)
    j["acq"] = {{"s", r.acq->s},
                {"sigma_s", json_number(r.acq->sigma_s)},
                {"sigma_next", json_number(r.acq->sigma_next)},
                {"holds", r.acq->holds}};
  else
    j["acq"] = nullptr;
  j["nu2"] = json_number(r.nu2);
  j["K"] = opt_number(r.K);
  j["L"] = opt_number(r.L);
  j["M"] = json_number(r.M);
  j["radius_thm"] = radius_json(r.radius_thm);
  j["radius_cor"] = radius_json(r.radius_cor);
  j["restricted_slater"] = slater_to_json(r.rs);
  j["branch_point"] = {{"is_branch_point", r.branch_point.is_branch_point},
                       {"min_projected_tangent_norm", json_number(r.branch_point.min_projected_tangent_norm)}};
  j["regularity_matrix_full_rank"] = r.regularity_matrix_full_rank;
  j["R2"] = to_string(r.r2);
  return j;
}

}  // namespace qstab
