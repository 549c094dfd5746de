/* Copyright 2026 The Camoval Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "camoval/fusion.hpp"

namespace camoval {

std::string_view CanonicalTaskDescription() {
  // Byte-stable: exporters hash this string. Never edit in place.
  return "A realistic image of an object blending into its surroundings, where "
         "the background shares similar colors, textures, and patterns with the "
         "object, making it hard to distinguish. Natural lighting, "
         "photorealistic, seamless camouflage, high detail.";
}

}  // namespace camoval
