#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "optstudy/study.hpp"

namespace optstudy {

// Study files are JSON documents with top-level sections `simulation`,
// `postprocess`, `parameters`, `goal` (optional) and `settings`.
//
// A relative `template_dir` is resolved against `base_dir`.
StudySpec parse_study_text(std::string_view text,
                           const std::filesystem::path& base_dir = {});

StudySpec load_spec(const std::filesystem::path& path);

// Canonical, byte-stable serialization (fixed key order, round-trip doubles).
std::string render_spec(const StudySpec& spec);

void save_spec(const StudySpec& spec, const std::filesystem::path& path);

} // namespace optstudy
