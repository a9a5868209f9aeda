// Copyright 2026 The Fairloop Authors
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

#ifndef FAIRLOOP_COMMON_HASH_H_
#define FAIRLOOP_COMMON_HASH_H_

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace fairloop {

// 64-bit FNV-1a over an explicit byte stream. Doubles are hashed by bit
// pattern so that fingerprints are exact, not tolerance based.
class Fingerprinter {
 public:
  void Update(std::string_view bytes) {
    UpdateRaw(static_cast<std::uint64_t>(bytes.size()));
    for (unsigned char c : bytes) Mix(c);
  }
  void Update(double value) { UpdateRaw(std::bit_cast<std::uint64_t>(value)); }
  void Update(std::int64_t value) {
    UpdateRaw(static_cast<std::uint64_t>(value));
  }
  void Update(std::uint64_t value) { UpdateRaw(value); }
  void Update(int value) { UpdateRaw(static_cast<std::uint64_t>(value)); }

  std::uint64_t digest() const { return state_; }
  std::string Hex() const;

 private:
  void UpdateRaw(std::uint64_t value) {
    for (int i = 0; i < 8; ++i) Mix(static_cast<unsigned char>(value >> (8 * i)));
  }
  void Mix(unsigned char byte) {
    state_ ^= byte;
    state_ *= 0x100000001b3ULL;
  }

  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace fairloop

#endif  // FAIRLOOP_COMMON_HASH_H_
