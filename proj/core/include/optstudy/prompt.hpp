#pragma once

#include <map>
#include <string>
#include <string_view>

#include "optstudy/study.hpp"

namespace optstudy {

struct PromptOptions {
  // Nominal values keyed by normalized parameter identifier. Used for
  // parameters whose prompt clause carries no "(from A to B)" range.
  std::map<std::string, double> nominals;
  std::uint64_t seed = 0;
  double theta = kDefaultTheta;
};

// Deterministic parser for the two study prompt templates:
//
//   analyze the effect of <P1> (from <A> to <B> [units]) [, <P2> ...] on <Q>
//   determine the [optimal|min] <P> at which <Q> is [near|below] <T>
//
// Either clause may appear alone or joined by "and", optionally wrapped in
// "Please help me ... in a simulation: <simulation task>". Parameters without
// an explicit range get +/-20% around their nominal; when no nominal is
// known a unit nominal is assumed and the range is flagged nominal_default.
StudySpec parse_prompt(std::string_view text, const PromptOptions& options = {});

// Renders the analysis (and, if present, optimization) clause of a spec in
// the grammar accepted by parse_prompt.
std::string render_prompt(const StudySpec& spec);

} // namespace optstudy
