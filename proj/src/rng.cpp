#include "soprc/rng.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace soprc {

Rng RngHandle::stream() const { return Rng(*this); }

RngHandle RngHandle::substream(std::uint64_t id) const {
  // splitmix64 finalizer keeps nested stream ids apart from flat ones.
  std::uint64_t z = stream_id + 0x9e3779b97f4a7c15ULL * (id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return {master_seed, z ^ (z >> 31)};
}

namespace {

std::mt19937_64 seeded_engine(const RngHandle& h) {
  std::seed_seq seq{static_cast<std::uint32_t>(h.master_seed),
                    static_cast<std::uint32_t>(h.master_seed >> 32),
                    static_cast<std::uint32_t>(h.stream_id),
                    static_cast<std::uint32_t>(h.stream_id >> 32), 0x50505243u};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(const RngHandle& handle) : engine_(seeded_engine(handle)) {}

double Rng::uniform01() {
  // 53 random bits, shifted by half an ulp to exclude 0.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n) {
  // Reject the low 2^64 mod n values so the modulo is unbiased.
  const std::uint64_t threshold = (0 - n) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x < threshold);
  return x % n;
}

double Rng::normal(double mean, double sd) {
  const double u = uniform01();
  return mean - sd * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double Rng::beta(double a, double b) { return boost::math::ibeta_inv(a, b, uniform01()); }

}  // namespace soprc
