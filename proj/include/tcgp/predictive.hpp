// Copyright 2026 The tcgp Authors
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

#ifndef TCGP_PREDICTIVE_HPP
#define TCGP_PREDICTIVE_HPP

namespace tcgp {

/// Gaussian-process predictive mean and standard deviation at one input.
struct PredictiveMoments {
  double mean = 0.0;
  double sd = 0.0;  ///< always >= 0
};

}  // namespace tcgp

#endif  // TCGP_PREDICTIVE_HPP
