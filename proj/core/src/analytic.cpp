#include "optstudy/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "optstudy/error.hpp"

namespace optstudy {

namespace {

double indexed(const std::map<std::string, double>& params, char prefix, std::size_t i,
               double fallback) {
  return analytic_param(params, std::string(1, prefix) + std::to_string(i), fallback);
}

double first_raw(const AnalyticInput& in) {
  if (in.raw.empty()) throw std::invalid_argument("model needs at least one input");
  return in.raw[0];
}

double linear_model(const AnalyticInput& in) {
  double f = analytic_param(in.params, "c", 0.0);
  for (std::size_t i = 0; i < in.normalized.size(); ++i) f += indexed(in.params, 'b', i, 1.0) * in.normalized[i];
  return f;
}

double explinear_model(const AnalyticInput& in) {
  double s = 0.0;
  for (std::size_t i = 0; i < in.normalized.size(); ++i) s += indexed(in.params, 'a', i, 1.0) * in.normalized[i];
  return std::exp(s);
}

double quadratic_model(const AnalyticInput& in) {
  double f = analytic_param(in.params, "c", 0.0);
  for (std::size_t i = 0; i < in.normalized.size(); ++i) {
    const double x = in.normalized[i];
    f += indexed(in.params, 'b', i, 0.0) * x + indexed(in.params, 'h', i, 1.0) * (x - 0.5) * (x - 0.5);
  }
  return f;
}

double decay_model(const AnalyticInput& in) {
  return analytic_param(in.params, "q0", 0.02) * std::exp(-analytic_param(in.params, "k", 34.657359027997266) * first_raw(in));
}

double quench_model(const AnalyticInput& in) {
  const double lo = analytic_param(in.params, "T_lo", 300.0);
  const double hi = analytic_param(in.params, "T_hi", 2000.0);
  const double s = analytic_param(in.params, "s", 0.5);
  const double vc = analytic_param(in.params, "v_c", 40.0);
  return lo + (hi - lo) / (1.0 + std::exp(s * (first_raw(in) - vc)));
}

double saturating_model(const AnalyticInput& in) {
  const double dmax = analytic_param(in.params, "d_max", 0.0707);
  const double phi0 = analytic_param(in.params, "phi0", 0.6);
  const double phi1 = analytic_param(in.params, "phi1", 1.1);
  if (!(phi1 > phi0)) throw std::invalid_argument("saturating model needs phi1 > phi0");
  return dmax * std::clamp((first_raw(in) - phi0) / (phi1 - phi0), 0.0, 1.0);
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, AnalyticModel> models{
      {"linear", linear_model},   {"explinear", explinear_model}, {"quadratic", quadratic_model},
      {"decay", decay_model},     {"quench", quench_model},       {"saturating", saturating_model},
  };
};

Registry& registry() {
  static Registry r;
  return r;
}

} // namespace

void register_analytic(const std::string& name, AnalyticModel model) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.models[name] = std::move(model);
}

bool is_analytic_registered(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.models.count(name) > 0;
}

std::vector<std::string> analytic_names() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> names;
  for (const auto& [k, v] : r.models) names.push_back(k);
  return names;
}

double evaluate_analytic(const std::string& name, const AnalyticInput& input) {
  AnalyticModel model;
  {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.models.find(name);
    if (it == r.models.end()) fail(ErrorCode::ValidationError, "analytic model '" + name + "' is not registered");
    model = it->second;
  }
  return model(input);
}

double analytic_param(const std::map<std::string, double>& params, const std::string& key,
                      double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

} // namespace optstudy
