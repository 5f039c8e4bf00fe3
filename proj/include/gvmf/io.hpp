#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gvmf/gof.hpp"
#include "gvmf/rng.hpp"
#include "gvmf/types.hpp"

namespace gvmf {

struct DatasetManifest {
  std::string path;
  int d = 0;
  std::size_t n_rows = 0;
  bool normalized = false;
  bool has_lattice = false;
  std::uint64_t checksum = 0;
};

using LatticeIndex = std::array<long, 3>;

struct Dataset {
  DirectionSample sample;
  std::vector<LatticeIndex> lattice;  // empty unless the file has index columns
  DatasetManifest manifest;
};

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(const std::string& bytes);

/// Reads comma-separated rows of d direction cosines, optionally preceded by
/// three integer lattice indices, with an optional header line. Rows off the
/// unit sphere by more than 1e-6 are rejected with their line number unless
/// renormalize is set; a zero row is always rejected.
Dataset load_sample(const std::string& path, int d, bool renormalize = false);
Dataset read_sample(std::istream& in, int d, bool renormalize = false,
                    const std::string& name = "<stream>");

/// Writes a header and one row per point with 17 significant digits, so a
/// load of the output reproduces the vectors exactly.
void write_sample(std::ostream& out, const DirectionSample& sample,
                  const std::vector<LatticeIndex>& lattice = {});
void save_sample(const std::string& path, const DirectionSample& sample,
                 const std::vector<LatticeIndex>& lattice = {});

/// Multiplies every point by an independent random sign.
DirectionSample symmetrize(const DirectionSample& sample, const SeedSpec& seed);

struct BlockSpec {
  LatticeIndex origin{1, 1, 1};
  LatticeIndex extent{16, 15, 16};
  std::size_t min_block_size = 100;

  void validate() const;
};

struct BlockOptions {
  /// Share null distributions over a coarse (alpha, kappa/alpha) grid instead
  /// of bootstrapping at every block's own estimates.
  bool group_grid = false;
  std::vector<double> group_alphas{4, 6, 8, 10};
  std::vector<double> group_ratios{4, 6};
  Eigen::Index group_sample_size = 3500;
};

struct BlockRow {
  LatticeIndex start{};
  std::size_t n = 0;
  std::string status;  // "ok", "skipped" or "failed"
  std::string note;
  std::optional<GofResult> result;
};

/// Splits the lattice into disjoint boxes, symmetrizes each subsample and runs
/// the goodness-of-fit test for cfg.family on it. Every box between the
/// smallest and largest occupied index gets a row; small boxes are skipped and
/// failures are recorded without stopping the run.
std::vector<BlockRow> run_block_tests(const Dataset& data, const BlockSpec& blocks,
                                      const GofConfig& cfg, const BlockOptions& opts = {});

/// Sorted projections mu'x_i paired with the fitted marginal quantiles at
/// (i - 1/2) / n.
std::vector<std::pair<double, double>> qq_pairs(const DirectionSample& sample,
                                                const GvmfParams& fitted);

}  // namespace gvmf
