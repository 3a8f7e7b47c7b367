//
// Copyright 2026 The ISAAC Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ISAAC_RESPONSE_H_
#define ISAAC_RESPONSE_H_

#include <string>
#include <vector>

namespace isaac {

// Signed interventional response differences f(x^I) - f(x) for one audited
// input, split by scope class.
struct ResponseSet {
  std::string pair_id;
  std::vector<double> mech_deltas;
  std::vector<double> spur_deltas;

  friend bool operator==(const ResponseSet&, const ResponseSet&) = default;
};

}  // namespace isaac

#endif  // ISAAC_RESPONSE_H_
