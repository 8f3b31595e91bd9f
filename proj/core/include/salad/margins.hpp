/*
 Copyright 2026 The salad Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SALAD_MARGINS_HPP
#define SALAD_MARGINS_HPP

namespace salad {

// Certified quantities carried through training and verification.
//   psi >= lipschitz * eps_bar  (completeness margin)
//   eta >= lipschitz * delta    (latent-dynamics margin)
struct Margins {
  double lipschitz = 0.0;  // prescribed bound L_B of the barrier network
  double eps_bar = 0.0;    // latent covering radius
  double delta = 0.0;      // worst one-step latent prediction error
  double psi = 0.0;
  double eta = 0.0;
};

}  // namespace salad

#endif  // SALAD_MARGINS_HPP
