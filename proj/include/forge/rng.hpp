#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace forge {

// Named-stream splitter: every consumer asks for its own stream by name, so
// adding a draw in one stage never shifts the numbers another stage sees.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, const std::string& stream = "") {
    std::vector<std::uint32_t> words = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    for (unsigned char ch : stream) words.push_back(ch);
    std::seed_seq seq(words.begin(), words.end());
    gen_.seed(seq);
  }

  Rng split(const std::string& name) { return Rng(next(), name); }

  std::uint64_t next() { return gen_(); }

  // uniform in [0, n)
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(gen_);
  }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
  return Rng(seed, name).next();
}

}  // namespace forge
