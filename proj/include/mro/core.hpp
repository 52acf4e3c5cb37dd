// Copyright 2026 The MRO Authors
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

#ifndef MRO_CORE_HPP
#define MRO_CORE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace mro {

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kEvaluationTolerance = 1e-9;

enum class Player { kBlue = 0, kRed = 1 };

constexpr Player opponent(Player p) {
   return p == Player::kBlue ? Player::kRed : Player::kBlue;
}

constexpr std::string_view to_string(Player p) {
   return p == Player::kBlue ? "blue" : "red";
}

inline Player player_from_string(std::string_view s) {
   if(s == "blue") return Player::kBlue;
   if(s == "red") return Player::kRed;
   throw std::invalid_argument("unknown player tag '" + std::string(s) + "'");
}

// Blue's gain expressed from the given player's perspective.
constexpr double signed_gain(Player p, double blue_gain) {
   return p == Player::kBlue ? blue_gain : -blue_gain;
}

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
  public:
   using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
  public:
   using Error::Error;
};

class DimensionMismatch : public Error {
  public:
   DimensionMismatch(std::string what, std::size_t index, std::size_t expected, std::size_t actual)
       : Error(what + " (index " + std::to_string(index) + ": expected " + std::to_string(expected)
               + ", got " + std::to_string(actual) + ")"),
         index_(index),
         expected_(expected),
         actual_(actual)
   {
   }

   std::size_t index() const { return index_; }
   std::size_t expected() const { return expected_; }
   std::size_t actual() const { return actual_; }

  private:
   std::size_t index_;
   std::size_t expected_;
   std::size_t actual_;
};

class UnsupportedConfiguration : public Error {
  public:
   using Error::Error;
};

class InvalidState : public Error {
  public:
   using Error::Error;
};

class ConfigError : public Error {
  public:
   ConfigError(std::string field_path, const std::string& message)
       : Error(field_path + ": " + message), field_path_(std::move(field_path))
   {
   }
   const std::string& field_path() const { return field_path_; }

  private:
   std::string field_path_;
};

// ---------------------------------------------------------------------------
// Randomness
//
// All streams are std::mt19937_64 (fully specified by the standard) seeded via
// splitmix64 mixing, and uniform doubles are drawn from the top 53 bits, so
// results are bit-identical across standard libraries.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
   x += 0x9E3779B97F4A7C15ULL;
   x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
   x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
   return x ^ (x >> 31);
}

constexpr std::uint64_t hash_string(std::string_view s) {
   std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
   for(char c : s) {
      h ^= static_cast< unsigned char >(c);
      h *= 0x100000001B3ULL;
   }
   return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base) {
   return splitmix64(base);
}

template < typename... Rest >
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t first, Rest... rest) {
   return derive_seed(splitmix64(base ^ splitmix64(first + 0x632BE59BD9B4E019ULL)), rest...);
}

class Rng {
  public:
   explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

   double uniform() { return static_cast< double >(engine_() >> 11) * 0x1.0p-53; }

   std::size_t below(std::size_t n) { return static_cast< std::size_t >(uniform() * static_cast< double >(n)) % n; }

   // Samples an index from a (possibly unnormalized) nonnegative weight vector.
   std::size_t categorical(std::span< const double > weights) {
      double total = 0.0;
      for(double w : weights) total += w;
      double u = uniform() * total;
      std::size_t last_positive = 0;
      for(std::size_t i = 0; i < weights.size(); ++i) {
         if(weights[i] <= 0.0) continue;
         last_positive = i;
         if(u < weights[i]) return i;
         u -= weights[i];
      }
      return last_positive;
   }

  private:
   std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Probability helpers

inline bool is_distribution(std::span< const double > p, double tol = kProbabilityTolerance) {
   double sum = 0.0;
   for(double v : p) {
      if(!(v >= 0.0) || !std::isfinite(v)) return false;
      sum += v;
   }
   return std::abs(sum - 1.0) <= tol;
}

inline double dot(std::span< const double > a, std::span< const double > b) {
   double s = 0.0;
   for(std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
   return s;
}

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. fn must
// write results only to slot i; the first exception is rethrown.
template < typename Fn >
void parallel_for(std::size_t n, Fn&& fn) {
   std::size_t workers = std::max< std::size_t >(1, std::thread::hardware_concurrency());
   workers = std::min(workers, n);
   if(workers <= 1) {
      for(std::size_t i = 0; i < n; ++i) fn(i);
      return;
   }
   std::atomic< std::size_t > next{0};
   std::exception_ptr failure;
   std::mutex failure_mutex;
   {
      std::vector< std::jthread > pool;
      pool.reserve(workers);
      for(std::size_t w = 0; w < workers; ++w) {
         pool.emplace_back([&] {
            for(std::size_t i = next++; i < n; i = next++) {
               try {
                  fn(i);
               } catch(...) {
                  std::lock_guard lock(failure_mutex);
                  if(!failure) failure = std::current_exception();
               }
            }
         });
      }
   }
   if(failure) std::rethrow_exception(failure);
}

}  // namespace mro

#endif  // MRO_CORE_HPP
