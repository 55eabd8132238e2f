#include "bivadj/io_json.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bivadj {

namespace {

using nlohmann::json;

json encode_doubles(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) {
    if (std::isfinite(x))
      arr.push_back(x);
    else
      arr.push_back(nullptr);  // infinities (infeasible grid points) and NaN
  }
  return arr;
}

std::vector<double> decode_doubles(const json& arr) {
  std::vector<double> v;
  for (const auto& e : arr)
    v.push_back(e.is_null() ? std::numeric_limits<double>::infinity() : e.get<double>());
  return v;
}

}  // namespace

void to_json(json& j, const FitResult& r) {
  j = json{{"names", r.names},       {"estimates", r.estimates}, {"se", r.se},
           {"loglik_max", r.loglik_max}, {"info", r.info},       {"converged", r.converged},
           {"n_evals", r.n_evals}};
}

void from_json(const json& j, FitResult& r) {
  j.at("names").get_to(r.names);
  j.at("estimates").get_to(r.estimates);
  j.at("se").get_to(r.se);
  j.at("loglik_max").get_to(r.loglik_max);
  j.at("info").get_to(r.info);
  j.at("converged").get_to(r.converged);
  j.at("n_evals").get_to(r.n_evals);
}

bool operator==(const FitResult& a, const FitResult& b) {
  return a.names == b.names && a.estimates == b.estimates && a.se == b.se &&
         a.loglik_max == b.loglik_max && a.info == b.info && a.converged == b.converged &&
         a.n_evals == b.n_evals;
}

void to_json(json& j, const ConfidenceCurve& c) {
  std::vector<int> ok(c.ok.begin(), c.ok.end());
  j = json{{"param", c.param_name},
           {"grid", c.grid},
           {"deviance", encode_doubles(c.deviance)},
           {"cc", c.cc},
           {"ok", ok},
           {"point_estimate", c.point_estimate},
           {"loglik_max", c.loglik_max}};
}

void from_json(const json& j, ConfidenceCurve& c) {
  j.at("param").get_to(c.param_name);
  j.at("grid").get_to(c.grid);
  c.deviance = decode_doubles(j.at("deviance"));
  j.at("cc").get_to(c.cc);
  std::vector<int> ok;
  j.at("ok").get_to(ok);
  c.ok.assign(ok.begin(), ok.end());
  j.at("point_estimate").get_to(c.point_estimate);
  j.at("loglik_max").get_to(c.loglik_max);
}

bool operator==(const ConfidenceCurve& a, const ConfidenceCurve& b) {
  return a.param_name == b.param_name && a.grid == b.grid && a.deviance == b.deviance &&
         a.cc == b.cc && a.ok == b.ok && a.point_estimate == b.point_estimate &&
         a.loglik_max == b.loglik_max;
}

void to_json(json& j, const GofReport& g) {
  j = json{{"expected", g.expected},
           {"residuals", g.residuals},
           {"k_statistic", g.k_statistic},
           {"max_abs_residual", g.max_abs_residual}};
}

void from_json(const json& j, GofReport& g) {
  j.at("expected").get_to(g.expected);
  j.at("residuals").get_to(g.residuals);
  j.at("k_statistic").get_to(g.k_statistic);
  j.at("max_abs_residual").get_to(g.max_abs_residual);
}

bool operator==(const GofReport& a, const GofReport& b) {
  return a.expected == b.expected && a.residuals == b.residuals &&
         a.k_statistic == b.k_statistic && a.max_abs_residual == b.max_abs_residual;
}

std::string fit_result_csv(const FitResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "param,estimate,se\n";
  for (std::size_t k = 0; k < r.names.size(); ++k) {
    out << r.names[k] << "," << r.estimates[k] << ",";
    if (k < r.se.size()) out << r.se[k];
    out << "\n";
  }
  out << "loglik_max," << r.loglik_max << ",\n";
  return out.str();
}

std::string curve_csv(const ConfidenceCurve& c) {
  std::ostringstream out;
  out.precision(17);
  out << c.param_name << ",deviance,cc,ok\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i)
    out << c.grid[i] << "," << c.deviance[i] << "," << c.cc[i] << "," << (c.ok[i] ? 1 : 0) << "\n";
  return out.str();
}

std::string gof_csv(const GofReport& g) {
  std::ostringstream out;
  out.precision(17);
  out << "i,j,expected,residual\n";
  for (std::size_t i = 0; i < g.expected.size(); ++i)
    for (std::size_t j = 0; j < g.expected[i].size(); ++j)
      out << i << "," << j << "," << g.expected[i][j] << "," << g.residuals[i][j] << "\n";
  out << "K," << g.k_statistic << ",max_abs_residual," << g.max_abs_residual << "\n";
  return out.str();
}

}  // namespace bivadj
