#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/limit_lab.hpp"

// Fixed instances behind the acceptance suite and the tables written by
// `rwrp accept`. Reference values live with the tests, not here.
namespace rwrp::acceptance {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

EnvironmentSpec uniform_spec(std::uint64_t seed, double a = 0.0, double b = 1.0);
StepSet directed_pair();    // {e1, e2}, p = 1/2
StepSet directed_triple();  // {e1, e2, e1+e2}, p = 1/3

// Twenty small i.i.d. environments on [0,10]^2, alternating step sets.
inline constexpr int kBruteForceEnvs = 20;
inline constexpr int kBruteForceLength = 10;
Environment brute_force_env(std::uint64_t seed, int r);

// 30x30 directed box or 30-site d=1 simple random walk, uniform(0,1) potential.
Environment green_env(bool directed, std::uint64_t seed);

std::vector<IntVec> random_targets(const Box& box, int count, std::uint64_t seed);

// 64x64 uniform(0,1) directed replicas for the corrector bounds.
Environment variational_env(std::uint64_t seed, int replica);

struct CorrectorRow {
  int replica = 0;
  int j = 0;
  RealVec h;
  double slack = 0;         // max_c sum_z p e^{-V-B} - e^{1/j} over interior cells
  double closure = 0;
  double hB_dot_xi = 0;
  double alpha_hat = 0;
  double min_increment_margin = 0;  // min_c,z B - (log p - V - 1/j)
};
std::vector<CorrectorRow> corrector_rows(std::uint64_t seed, int replicas = 8);

struct PropertyMaxima {
  double subadditivity = 0;
  double superadditivity_finite = 0;
  double superadditivity_zero_max = 0;
  double superadditivity_zero_min = 0;
};
inline constexpr int kPropertyTrials = 1000;
PropertyMaxima property_maxima(std::uint64_t seed);

// Shape scans on directed {e1,e2}.
inline constexpr double kScanDelta = 0.2;
inline constexpr std::int64_t kScanBand = 8;
const std::vector<std::int64_t>& scan_radii();  // 64, 128, 256
Box scan_box(std::int64_t max_radius, std::int64_t band);
ScanGeometry scan_geometry();
std::vector<ShapeRow> constant_scan(const AlphaFunction& alpha);

inline constexpr int kScanSeeds = 20;
inline constexpr std::int64_t kFanScale = 1024;
inline constexpr int kFanDirections = 65;
inline constexpr int kFanReplicas = 8;
DirectionFan random_scan_fan(std::uint64_t seed);
// One profile per seed: max error over each radius band.
std::vector<std::vector<ShapeRow>> random_scans(std::uint64_t seed, const DirectionFan& fan);

// Writes every criterion table into dir; returns the artifact paths.
std::vector<std::string> write_tables(const std::string& dir, std::uint64_t seed);

}  // namespace rwrp::acceptance
