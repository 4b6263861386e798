// Copyright 2026 The topoloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "topoloss/diagram_distance.hpp"
#include "topoloss/groundtruth.hpp"
#include "topoloss/metrics.hpp"
#include "topoloss/patch_space.hpp"
#include "topoloss/persistence.hpp"
#include "topoloss/topo_loss.hpp"

namespace topoloss {

// %.17g, with "inf" / "-inf" / "nan" spelled out.
std::string format_real(double value);

// Header "v0,...,v8", one row per point.
std::string cloud_to_csv(const PatchCloud& cloud);
// Accepts any header "v0,...,v{d-1}" with d >= 1.
PointCloud cloud_from_csv(std::string_view text);
std::string cloud_sidecar_json(const PatchCloud& cloud);

// Header "dim,birth,death", rows sorted by (dim, birth, death).
std::string diagram_to_csv(const PersistenceDiagram& diagram);
PersistenceDiagram diagram_from_csv(std::string_view text);

std::string matching_to_json(const DiagramMatching& matching);
std::string loss_report_to_json(const LossReport& report, const LossConfig& cfg);
std::string quality_report_to_json(const QualityReport& report);

// Header fields plus "mask_rle": run lengths alternating unmasked / masked,
// starting with an unmasked run (possibly 0).
std::string profile_to_json(const CalibrationProfile& profile);
CalibrationProfile profile_from_json(std::string_view text);

std::string groundtruth_report_to_json(const GroundtruthReport& report);

}  // namespace topoloss
