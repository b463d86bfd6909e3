#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/analytic.hpp"
#include "hetcache/model.hpp"

namespace hetcache::sim {

using analytic::Tier;
using analytic::ThroughputReport;

enum class Fidelity { Matched, Full };

// Matched fidelity draws the request counts and grant outcomes from their
// approximating distributions (independent Poisson counts, independent
// grants), reproducing the analysis assumptions by construction. Full
// fidelity populates the network with users, associates and schedules them,
// and resolves nulling requests explicitly.
struct SimulationSpec {
  Fidelity fidelity = Fidelity::Full;
  std::uint32_t realizations = 10000;
  double window_radius = 0;  // 0 -> default_window_radius(config)
  std::uint64_t seed = 1;
  bool per_file_conditioning = true;
  int workers = 0;  // 0 -> hardware concurrency
  std::string raw_export_path;
};

// max(10 rc, 5/sqrt(lambda0)): keeps truncated far-field interference far
// below the quadrature tolerances and all but guarantees a macro cell.
double default_window_radius(const NetworkConfig& config);

// SplitMix64 finalizer; all randomness below derives from mixing
// (seed, realization, stream tag, entity index) so that execution order and
// thread count cannot change any draw.
std::uint64_t mix64(std::uint64_t x);

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t realization, std::uint64_t tag,
         std::uint64_t salt = 0);

  std::uint64_t bits();
  double uniform();             // (0,1)
  double exponential();         // Exp(1)
  double gamma_int(int shape);  // Gamma(shape,1), integer shape
  std::uint32_t poisson(double mean);

 private:
  std::uint64_t state_;
};

struct Point {
  double x = 0;
  double y = 0;
  double r2 = 0;  // squared distance to the origin
};

// Homogeneous PPP on the disc of the given radius around the origin.
std::vector<Point> sample_ppp(double density, double window_radius, Stream& rng);

struct Serving {
  Tier tier = Tier::MBS;
  std::int32_t index = -1;  // into sbs()/mbs()
  double distance = 0;
  // SBS interferer partition: closer than serving / serving..rc / beyond rc.
  std::int32_t phi1_inner = 0;
  std::int32_t phi1_annulus = 0;
  std::int64_t phi1_outer = 0;
};

struct Bookkeeping {
  int k_serving = 0;                 // nulling requests at the serving SBS
  int max_grant = 0;                 // N1 - 1
  std::vector<std::int32_t> in_rc;   // interferer SBS indices within rc
  std::vector<std::int32_t> nulled;  // subset of in_rc that granted u0
};

struct SirSample {
  Tier tier = Tier::MBS;
  double signal_gain = 0;
  double interference = 0;
  double sir = 0;
  int dof_used = 0;
};

// One sampled world, reusable across per-file cases: points, fading gains
// and (full fidelity) the scheduled-user request field are drawn once; only
// the typical user's association and grants depend on the requested file.
class NetworkRealization {
 public:
  NetworkRealization(const Scenario& scenario, const SimulationSpec& spec, Beamforming mode,
                     std::uint32_t index);

  const std::vector<Point>& mbs() const { return mbs_; }
  const std::vector<Point>& sbs() const { return sbs_; }

  // Bernoulli(T_file) mark, independent across (SBS, file) pairs.
  bool cache_mark(std::size_t sbs_index, int file) const;

  Serving associate(int file) const;
  Bookkeeping in_bookkeeping(const Serving& serving, int file) const;
  SirSample sample_sir(const Serving& serving, const Bookkeeping& books, int file) const;

  // ln(1 + SIR_0) against the nearest macro cell; shared by all files.
  double mbs_log_rate() const;
  double mbs_serving_distance() const;

  // Background request count at the SBS nearest the origin (full fidelity,
  // no typical user involved). The count excludes the cell's own scheduled
  // user, which never requests its server.
  std::optional<int> probe_background_requests() const;

  // Number of scheduled background users within `radius` of the origin: the
  // nulling-request field crossing a typical location. The analysis models
  // this field as a homogeneous PPP of the SBS density, making the count
  // Poisson(pi radius^2 lambda1).
  std::optional<int> scheduled_field_count(double radius) const;

 private:
  void build_users(const Scenario& scenario);

  const Scenario* scenario_;
  Beamforming mode_;
  Fidelity fidelity_;
  std::uint64_t seed_ = 0;
  std::uint32_t index_ = 0;
  double window_ = 0, rc_ = 0, rc2_ = 0;
  double alpha0_ = 4, alpha1_ = 4;
  int n1_ = 1;

  std::vector<Point> mbs_, sbs_;
  std::vector<double> mbs_gain_, sbs_gain_;
  std::int32_t mbs_nearest_ = -1;
  double mbs_interference_ = 0;

  std::vector<std::int32_t> in_rc_;  // SBS indices with r <= rc, nearest first
  double far_interference_ = 0;      // beyond-rc interference at the origin

  // Full fidelity request field.
  std::vector<Point> sched_users_;
  std::vector<std::int32_t> sched_owner_;        // owning SBS per scheduled user
  std::vector<int> kbg_;                          // background K per in_rc_ entry
  std::vector<std::int32_t> bg_user_of_in_rc_;    // scheduled-user index or -1
};

ThroughputReport estimate_throughput(const Scenario& scenario, const SimulationSpec& spec,
                                     Beamforming mode);

}  // namespace hetcache::sim
