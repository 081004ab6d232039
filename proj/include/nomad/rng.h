// Copyright 2026 The NOMAD Authors. All Rights Reserved.
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

#ifndef NOMAD_RNG_H_
#define NOMAD_RNG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace nomad {

// Seeded random stream. Distributions are implemented here rather than taken
// from <random> so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be positive.
  size_t UniformIndex(size_t n);
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with any number of string and integer parts into a new
// stream seed (FNV-1a over the parts, finalised with splitmix64).
class SeedBuilder {
 public:
  explicit SeedBuilder(uint64_t seed);
  SeedBuilder& Add(std::string_view part);
  SeedBuilder& Add(int64_t part);
  uint64_t Build() const;

 private:
  uint64_t state_;
};

uint64_t Fnv1a64(const void* data, size_t size,
                 uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace nomad

#endif  // NOMAD_RNG_H_
