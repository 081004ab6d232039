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

#include "nomad/rng.h"

#include <cmath>
#include <numbers>

namespace nomad {

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

size_t Rng::UniformIndex(size_t n) {
  const unsigned __int128 product =
      static_cast<unsigned __int128>(engine_()) * n;
  return static_cast<size_t>(product >> 64);
}

double Rng::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

uint64_t Fnv1a64(const void* data, size_t size, uint64_t basis) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  uint64_t hash = basis;
  for (size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

SeedBuilder::SeedBuilder(uint64_t seed)
    : state_(Fnv1a64(&seed, sizeof(seed))) {}

SeedBuilder& SeedBuilder::Add(std::string_view part) {
  const uint64_t length = part.size();
  state_ = Fnv1a64(&length, sizeof(length), state_);
  state_ = Fnv1a64(part.data(), part.size(), state_);
  return *this;
}

SeedBuilder& SeedBuilder::Add(int64_t part) {
  state_ = Fnv1a64(&part, sizeof(part), state_);
  return *this;
}

uint64_t SeedBuilder::Build() const {
  uint64_t z = state_ + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace nomad
