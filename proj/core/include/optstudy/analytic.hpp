#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace optstudy {

struct AnalyticInput {
  std::span<const double> raw;
  std::span<const double> normalized;
  const std::map<std::string, double>& params;
  std::size_t sample_index = 0;
};

// A model may throw to signal a failed run.
using AnalyticModel = std::function<double(const AnalyticInput&)>;

// Built-ins (registered on first use):
//   linear      c + sum_i b<i> * x_i            normalized x, b<i> default 1
//   explinear   exp(sum_i a<i> * x_i)           normalized x, a<i> default 1
//   quadratic   c + sum_i b<i> x_i + sum_i h<i> (x_i - 0.5)^2   normalized x
//   decay       q0 * exp(-k * v)                raw v = first parameter
//   quench      T_lo + (T_hi - T_lo) / (1 + exp(s * (v - v_c)))   raw v
//   saturating  d_max * clamp((v - phi0) / (phi1 - phi0), 0, 1)    raw v
void register_analytic(const std::string& name, AnalyticModel model);
bool is_analytic_registered(const std::string& name);
std::vector<std::string> analytic_names();

double evaluate_analytic(const std::string& name, const AnalyticInput& input);

// Reads a named model parameter, falling back to `fallback`.
double analytic_param(const std::map<std::string, double>& params,
                      const std::string& key, double fallback);

} // namespace optstudy
