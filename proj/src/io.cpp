#include "gvmf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string_view>

#include "gvmf/error.hpp"
#include "gvmf/sampling.hpp"

namespace gvmf {
namespace {

constexpr double kUnitTolerance = 1e-6;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}

bool parse_long(std::string_view s, long& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string where(const std::string& name, std::size_t line, std::size_t column = 0) {
  std::string s = name + ":" + std::to_string(line);
  if (column > 0) s += ": column " + std::to_string(column);
  return s;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Dataset read_sample(std::istream& in, int d, bool renormalize, const std::string& name) {
  require(d >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<double> coords;
  Dataset out;
  std::size_t columns = 0;
  bool seen_content = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<double> row(d);
  while (pos <= content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const std::string_view raw(content.data() + pos,
                               (nl == std::string::npos ? content.size() : nl) - pos);
    pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line);

    if (!seen_content) {
      seen_content = true;
      double probe;
      const bool header = std::any_of(fields.begin(), fields.end(),
                                      [&](std::string_view f) { return !parse_double(f, probe); });
      if (header) continue;
    }
    if (columns == 0) {
      if (fields.size() != static_cast<std::size_t>(d) && fields.size() != static_cast<std::size_t>(d) + 3)
        fail(ErrorKind::ParseError, where(name, line_no) + ": expected " + std::to_string(d) +
                                        " or " + std::to_string(d + 3) + " columns, found " +
                                        std::to_string(fields.size()));
      columns = fields.size();
    } else if (fields.size() != columns) {
      fail(ErrorKind::ParseError, where(name, line_no) + ": expected " + std::to_string(columns) +
                                      " columns, found " + std::to_string(fields.size()));
    }
    const std::size_t offset = columns - static_cast<std::size_t>(d);
    if (offset == 3) {
      LatticeIndex idx;
      for (std::size_t c = 0; c < 3; ++c)
        if (!parse_long(fields[c], idx[c]))
          fail(ErrorKind::ParseError, where(name, line_no, c + 1) + ": lattice index '" +
                                          std::string(fields[c]) + "' is not an integer");
      out.lattice.push_back(idx);
    }
    double sq = 0.0;
    for (int j = 0; j < d; ++j) {
      if (!parse_double(fields[offset + j], row[j]))
        fail(ErrorKind::ParseError, where(name, line_no, offset + j + 1) + ": '" +
                                        std::string(fields[offset + j]) + "' is not a number");
      sq += row[j] * row[j];
    }
    const double norm = std::sqrt(sq);
    if (norm == 0.0) fail(ErrorKind::ParseError, where(name, line_no) + ": zero vector");
    if (renormalize) {
      for (double& v : row) v /= norm;
    } else if (std::abs(norm - 1.0) > kUnitTolerance) {
      fail(ErrorKind::ParseError, where(name, line_no) + ": row norm " + format_double(norm) +
                                      " is not within 1e-6 of 1");
    }
    coords.insert(coords.end(), row.begin(), row.end());
  }
  const std::size_t n = coords.size() / static_cast<std::size_t>(d);
  if (n == 0) fail(ErrorKind::EmptyDataset, name + ": no data rows");
  out.sample = DirectionSample(Eigen::Map<Eigen::MatrixXd>(coords.data(), d, static_cast<Eigen::Index>(n)),
                               name);
  out.manifest.path = name;
  out.manifest.d = d;
  out.manifest.n_rows = n;
  out.manifest.normalized = renormalize;
  out.manifest.has_lattice = !out.lattice.empty();
  out.manifest.checksum = fnv1a64(content);
  return out;
}

Dataset load_sample(const std::string& path, int d, bool renormalize) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::ParseError, "cannot open " + path);
  return read_sample(f, d, renormalize, path);
}

void write_sample(std::ostream& out, const DirectionSample& sample,
                  const std::vector<LatticeIndex>& lattice) {
  const bool with_lattice = !lattice.empty();
  require(!with_lattice || lattice.size() == static_cast<std::size_t>(sample.size()),
          ErrorKind::DimensionMismatch, "lattice and sample sizes differ");
  if (with_lattice) out << "i,j,k,";
  for (int j = 0; j < sample.dim(); ++j) out << (j ? "," : "") << "x" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    if (with_lattice) {
      const auto& l = lattice[static_cast<std::size_t>(i)];
      out << l[0] << ',' << l[1] << ',' << l[2] << ',';
    }
    for (int j = 0; j < sample.dim(); ++j) out << (j ? "," : "") << format_double(sample.points(j, i));
    out << '\n';
  }
}

void save_sample(const std::string& path, const DirectionSample& sample,
                 const std::vector<LatticeIndex>& lattice) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidArgs, "cannot write " + path);
  write_sample(f, sample, lattice);
}

DirectionSample symmetrize(const DirectionSample& sample, const SeedSpec& seed) {
  Rng rng(seed);
  DirectionSample out = sample;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (rng.sign() < 0) out.points.col(i) = -out.points.col(i);
  return out;
}

void BlockSpec::validate() const {
  for (long e : extent) require(e >= 1, ErrorKind::InvalidArgs, "block extents must be >= 1");
}

std::vector<BlockRow> run_block_tests(const Dataset& data, const BlockSpec& blocks,
                                      const GofConfig& cfg, const BlockOptions& opts) {
  blocks.validate();
  cfg.validate();
  require(!data.lattice.empty(), ErrorKind::InvalidArgs,
          "block tests need lattice index columns in the input");
  require(data.lattice.size() == static_cast<std::size_t>(data.sample.size()),
          ErrorKind::DimensionMismatch, "lattice and sample sizes differ");

  auto block_of = [&](const LatticeIndex& idx) {
    LatticeIndex b;
    for (int a = 0; a < 3; ++a) {
      const long off = idx[a] - blocks.origin[a];
      b[a] = (off >= 0 ? off : off - blocks.extent[a] + 1) / blocks.extent[a];
    }
    return b;
  };

  std::map<LatticeIndex, std::vector<Eigen::Index>> members;
  LatticeIndex lo = block_of(data.lattice.front()), hi = lo;
  for (std::size_t i = 0; i < data.lattice.size(); ++i) {
    const LatticeIndex b = block_of(data.lattice[i]);
    members[b].push_back(static_cast<Eigen::Index>(i));
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], b[a]);
      hi[a] = std::max(hi[a], b[a]);
    }
  }

  std::map<std::pair<double, double>, NullDistribution> grouped;
  std::vector<BlockRow> rows;
  std::uint64_t block_number = 0;
  for (long b0 = lo[0]; b0 <= hi[0]; ++b0)
    for (long b1 = lo[1]; b1 <= hi[1]; ++b1)
      for (long b2 = lo[2]; b2 <= hi[2]; ++b2, ++block_number) {
        const LatticeIndex b{b0, b1, b2};
        BlockRow row;
        for (int a = 0; a < 3; ++a) row.start[a] = blocks.origin[a] + b[a] * blocks.extent[a];
        const auto it = members.find(b);
        row.n = it == members.end() ? 0 : it->second.size();
        if (row.n < blocks.min_block_size || row.n <= static_cast<std::size_t>(cfg.k)) {
          row.status = "skipped";
          row.note = "block has " + std::to_string(row.n) + " points, below the minimum of " +
                     std::to_string(blocks.min_block_size);
          rows.push_back(std::move(row));
          continue;
        }
        Eigen::MatrixXd pts(data.sample.dim(), static_cast<Eigen::Index>(row.n));
        for (std::size_t c = 0; c < row.n; ++c)
          pts.col(static_cast<Eigen::Index>(c)) = data.sample.points.col(it->second[c]);
        const SeedSpec block_seed = cfg.seed.child(block_number);
        const DirectionSample sub = symmetrize(DirectionSample(std::move(pts)), block_seed.child(0));
        GofConfig bc = cfg;
        bc.seed = block_seed.child(1);
        try {
          if (opts.group_grid) {
            const StatisticEvaluation ev = evaluate_statistic(sub, bc.family, bc.k, bc.estimator);
            const double a = ev.fitted.params.alpha;
            const double r = ev.fitted.params.kappa / a;
            auto nearest = [](const std::vector<double>& grid, double v) {
              return *std::min_element(grid.begin(), grid.end(), [&](double x, double y) {
                return std::abs(std::log(x / v)) < std::abs(std::log(y / v));
              });
            };
            const std::pair<double, double> key{nearest(opts.group_alphas, a),
                                                nearest(opts.group_ratios, r)};
            auto g = grouped.find(key);
            if (g == grouped.end()) {
              GofConfig gc = cfg;
              gc.seed = cfg.seed.child(0x6E0ULL).child(grouped.size());
              const GvmfParams gp(bc.family, key.first, key.first * key.second,
                                  UnitVector::basis(sub.dim(), sub.dim() - 1));
              g = grouped.emplace(key, simulate_null(gp, opts.group_sample_size, gc)).first;
            }
            row.result = run_gof_test(sub, bc, g->second);
            row.note = "null grid alpha=" + format_double(key.first) +
                       " kappa/alpha=" + format_double(key.second);
          } else {
            row.result = run_gof_test(sub, bc);
          }
          row.status = "ok";
        } catch (const Error& e) {
          row.status = "failed";
          row.note = e.what();
        }
        rows.push_back(std::move(row));
      }
  return rows;
}

std::vector<std::pair<double, double>> qq_pairs(const DirectionSample& sample,
                                                const GvmfParams& fitted) {
  fitted.validate();
  require(sample.dim() == fitted.d, ErrorKind::DimensionMismatch, "sample and mu differ in dimension");
  require(!sample.empty(), ErrorKind::EmptyDataset, "sample is empty");
  const MarginalTable table = build_marginal_table(fitted);
  std::vector<double> y(static_cast<std::size_t>(sample.size()));
  for (Eigen::Index i = 0; i < sample.size(); ++i)
    y[static_cast<std::size_t>(i)] = fitted.mu.coords().dot(sample.col(i));
  std::sort(y.begin(), y.end());
  std::vector<std::pair<double, double>> out(y.size());
  const double n = static_cast<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = {y[i], table.quantile((i + 0.5) / n)};
  return out;
}

}  // namespace gvmf
