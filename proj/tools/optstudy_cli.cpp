// optstudy: run / analyze / optimize / report parameter studies from the shell.

#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "optstudy/active_subspace.hpp"
#include "optstudy/error.hpp"
#include "optstudy/prompt.hpp"
#include "optstudy/study_file.hpp"
#include "optstudy/workflow.hpp"

namespace {

void print_bundle(const optstudy::ReportBundle& bundle) {
  for (const auto& f : bundle.files)
    std::cout << optstudy::to_string(f.role) << '\t' << f.path.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-study orchestrator: sampling, active-subspace analysis and surrogate optimization"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
  app.add_option("--seed", seed, "Override the study seed")->expected(1);
  app.add_option("--theta", theta, "Override the oversampling factor (2..10)")->expected(1);

  std::string spec_path;
  std::string study_dir;
  std::size_t workers = 1;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Sample the parameter box and evaluate every case");
  run->add_option("spec", spec_path, "Study file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--workers,-j", workers, "Concurrent cases")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out_dir, "Study directory (default: $OPTSTUDY_WORKSPACE/<spec stem>)");

  auto* analyze = app.add_subcommand("analyze", "Fit surrogates and compute the active direction");
  analyze->add_option("study_dir", study_dir, "Study directory")->required()->check(CLI::ExistingDirectory);
  std::size_t replicates = optstudy::kDefaultBootstrapReplicates;
  analyze->add_option("--bootstrap", replicates, "Bootstrap replicates");

  auto* optimize = app.add_subcommand("optimize", "Solve the study goal on the surrogate and validate");
  optimize->add_option("study_dir", study_dir, "Study directory")->required()->check(CLI::ExistingDirectory);

  auto* report = app.add_subcommand("report", "Re-render report.txt and the manifest");
  report->add_option("study_dir", study_dir, "Study directory")->required()->check(CLI::ExistingDirectory);

  std::string prompt;
  std::vector<std::string> nominals;
  auto* parse = app.add_subcommand("parse", "Parse a study prompt and print the derived study file");
  parse->add_option("prompt", prompt, "Prompt text")->required();
  parse->add_option("--nominal", nominals, "name=value nominal for parameters without a range");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      optstudy::RunOptions opts;
      opts.workers = workers;
      opts.seed = seed;
      opts.theta = theta;
      if (!out_dir.empty()) opts.study_dir = out_dir;
      const auto summary = optstudy::cmd_run(spec_path, opts);
      std::cout << "study: " << summary.study_dir.string() << '\n'
                << "evaluated " << summary.batch.evaluated << ", reused " << summary.batch.reused << ", ok "
                << summary.batch.dataset.ok_count() << " of " << summary.batch.dataset.records.size() << '\n';
    } else if (*analyze) {
      optstudy::AnalyzeOptions opts;
      opts.seed = seed;
      opts.bootstrap_replicates = replicates;
      print_bundle(optstudy::cmd_analyze(study_dir, opts));
    } else if (*optimize) {
      print_bundle(optstudy::cmd_optimize(study_dir));
    } else if (*report) {
      print_bundle(optstudy::cmd_report(study_dir));
    } else if (*parse) {
      optstudy::PromptOptions opts;
      for (const auto& kv : nominals) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--nominal", "expected name=value, got " + kv);
        opts.nominals[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      }
      if (seed) opts.seed = *seed;
      if (theta) opts.theta = *theta;
      std::cout << optstudy::render_spec(optstudy::parse_prompt(prompt, opts));
    }
  } catch (const optstudy::StudyError& e) {
    std::cerr << "error [" << optstudy::to_string(e.code()) << "]: " << e.what() << '\n';
    return optstudy::exit_status(e.code());
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
