#pragma once

#include <array>
#include <cstdint>

namespace exitwise {

/// One block of the Philox4x32 counter-based generator with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// Deterministic random stream keyed by (seed, stream_id).
///
/// The seed is the Philox key and the stream id occupies the upper half of the
/// 128-bit counter, so distinct ids never share a block. A stream is meant for a
/// single consumer; use split() to hand an independent stream to someone else.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Fresh stream with the same seed and a different id, starting at its beginning.
  RngStream split(std::uint64_t stream_id) const noexcept { return RngStream(seed_, stream_id); }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1); safe to take the log of.
  double uniform_open() noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double gaussian() noexcept;
  /// Exponential with the given rate. Throws InvalidArgument unless rate > 0.
  double exponential(double rate);

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int have_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class ProposalBranch { SmallTime, LargeTime };

struct ProposalDraw {
  double value;
  ProposalBranch branch;
};

/// Constant kappa_e of the exit-time proposal: the large-time branch has density
/// (pi / (4 kappa_e)) exp(-pi^2 t / 8) on t > t_e.
double exit_proposal_kappa(double t_e);
/// Density of the exit-time proposal.
double hhat_pdf(double t, double t_e);
/// Distribution function of the exit-time proposal.
double hhat_cdf(double t, double t_e);

/// Draw from the exit-time proposal. Consumes one Gaussian and, on the large-time
/// branch, one more uniform. Throws InvalidArgument when t_e is outside [4/(9 pi^2), 1].
ProposalDraw sample_hhat(RngStream& rng, double t_e);

}  // namespace exitwise
