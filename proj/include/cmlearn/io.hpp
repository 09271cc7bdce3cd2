// Copyright 2026 The cmlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cmlearn/constraint.hpp"
#include "cmlearn/demos.hpp"
#include "cmlearn/learning.hpp"

namespace cmlearn {

// Environment variable that relocates relative output directories.
inline constexpr const char* kOutputRootEnv = "CMLEARN_OUTPUT_ROOT";

// dir itself when absolute or when the variable is unset.
std::filesystem::path ResolveOutputDir(const std::filesystem::path& dir);

// Writes through a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);
std::string ReadFile(const std::filesystem::path& path);

// "%.17g": parses back to the same double.
std::string FormatDouble(double x);

// Dataset CSV: traj_id,step,q_1..q_dof,u_1..u_dof,dt with one row per
// (state, action) pair. The sidecar "<path>.meta" holds key = value lines.
std::string DatasetCsv(const DemonstrationSet& data);
std::string DatasetMeta(const DemonstrationSet& data);
DemonstrationSet ParseDataset(std::string_view csv, std::string_view meta);
void WriteDataset(const std::filesystem::path& path, const DemonstrationSet& data);
DemonstrationSet ReadDataset(const std::filesystem::path& path);

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
  std::string chain;
  LambdaEstimate estimate;
  std::uint64_t config_hash = 0;
};

// FNV-1a over the textual learner settings.
std::uint64_t LearnerConfigHash(const SeparationOptions& sep, const LearnOptions& learn);

std::string ModelText(const ModelFile& model);
ModelFile ParseModel(std::string_view text);
void WriteModel(const std::filesystem::path& path, const ModelFile& model);
ModelFile ReadModel(const std::filesystem::path& path);

struct PlotTrace {
  std::string label;
  std::vector<Eigen::Vector2d> path;  // end-effector (x, y)
  std::vector<double> manip;          // v per step
};

// Two-panel static SVG: end-effector paths and v against step. Every trace
// needs at least two points in both series.
std::string RenderSvg(std::span<const PlotTrace> traces, std::string_view title);

}  // namespace cmlearn
