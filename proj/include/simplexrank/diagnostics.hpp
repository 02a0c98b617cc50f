// Copyright 2026 The simplexrank Authors.
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

#include <vector>

#include "simplexrank/common.hpp"

namespace simplexrank {

// Split potential scale reduction over per-chain scalar series.  Each chain
// is halved; returns sqrt(var_plus / within).  Constant identical chains give
// 1, chains stuck at distinct constants diverge.
double split_rhat(const std::vector<Vec>& chains);

// Effective sample size of the pooled rank-normalized draws, with Geyer's
// initial-monotone-pair truncation of the autocorrelation sum and the usual
// S * log10(S) cap.
double rank_normalized_ess(const std::vector<Vec>& chains);

struct ScalarDiagnostics {
  double rhat = 0.0;
  double ess = 0.0;
};

ScalarDiagnostics diagnose_scalar(const std::vector<Vec>& chains);

}  // namespace simplexrank
