#include "exitwise/rng.hpp"

#include <cmath>
#include <string>

#include "exitwise/errors.hpp"
#include "exitwise/special_fn.hpp"
#include "exitwise/types.hpp"

namespace exitwise {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

void check_threshold(double t_e) {
  SeriesParams p;
  p.t_e = t_e;
  p.validate();
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept : seed_(seed), stream_id_(stream_id) {}

void RngStream::refill() noexcept {
  const std::array<std::uint32_t, 4> ctr{std::uint32_t(block_), std::uint32_t(block_ >> 32), std::uint32_t(stream_id_),
                                         std::uint32_t(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key{std::uint32_t(seed_), std::uint32_t(seed_ >> 32)};
  const auto out = philox4x32_10(ctr, key);
  buf_[0] = std::uint64_t(out[0]) | (std::uint64_t(out[1]) << 32);
  buf_[1] = std::uint64_t(out[2]) | (std::uint64_t(out[3]) << 32);
  have_ = 2;
  ++block_;
}

std::uint64_t RngStream::next_u64() noexcept {
  if (have_ == 0) refill();
  return buf_[2 - have_--];
}

double RngStream::uniform() noexcept { return double(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() noexcept { return (double(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

double RngStream::gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * kPi * uniform();
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidArgument("exponential rate must be positive, got " + std::to_string(rate));
  return -std::log(uniform_open()) / rate;
}

double exit_proposal_kappa(double t_e) {
  check_threshold(t_e);
  return 2.0 / (kPi * erf(std::sqrt(0.5 / t_e)) * std::exp(kPi * kPi * t_e / 8.0));
}

double hhat_pdf(double t, double t_e) {
  if (!(t > 0.0)) return 0.0;
  if (t <= t_e) return gauss_pdf(1.0 / std::sqrt(t)) / (t * std::sqrt(t));
  return kPi / (4.0 * exit_proposal_kappa(t_e)) * std::exp(-kPi * kPi * t / 8.0);
}

double hhat_cdf(double t, double t_e) {
  check_threshold(t_e);
  if (!(t > 0.0)) return 0.0;
  if (t <= t_e) return erfc(std::sqrt(0.5 / t));
  const double z = std::sqrt(0.5 / t_e);
  return erfc(z) + erf(z) * -std::expm1(-kPi * kPi * (t - t_e) / 8.0);
}

ProposalDraw sample_hhat(RngStream& rng, double t_e) {
  check_threshold(t_e);
  const double g = rng.gaussian();
  const double y = 1.0 / (g * g);
  if (y <= t_e) return {y, ProposalBranch::SmallTime};
  return {t_e - 8.0 / (kPi * kPi) * std::log(rng.uniform_open()), ProposalBranch::LargeTime};
}

}  // namespace exitwise
