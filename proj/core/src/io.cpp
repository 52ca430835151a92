#include "pinchlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pinchlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), width_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::runtime_error(path_.string() + ": row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("close failed: " + path_.string());
}

void write_growth_samples(const std::filesystem::path& path, const std::vector<GrowthSample>& samples) {
  CsvWriter w(path, {"q_index", "t", "norm"});
  for (const auto& s : samples) {
    if (!s.ok()) continue;
    w.row({std::to_string(s.q_index), format_double(s.t), format_double(s.norm)});
  }
  w.close();
}

void write_growth_fit(const std::filesystem::path& path, const GrowthFit& fit) {
  CsvWriter w(path, {"beta_hat", "logC_hat", "residual_rms", "t_min", "t_max", "side"});
  for (const auto& s : fit.sides) {
    w.row({format_double(s.beta), format_double(s.logC), format_double(s.residual_rms), format_double(s.t_min),
           format_double(s.t_max), s.side});
  }
  w.close();
}

void write_distortion_pairs(const std::filesystem::path& path, const DistortionReport& report) {
  const int d = report.pairs.empty() ? 0 : report.pairs.front().p.dim();
  std::vector<std::string> header;
  for (int i = 0; i < d; ++i) header.push_back("p_" + std::to_string(i));
  for (int i = 0; i < d; ++i) header.push_back("pprime_" + std::to_string(i));
  for (const char* c : {"d_X", "d_H_beta", "d_H_1", "ratio41", "ratio42"}) header.emplace_back(c);
  CsvWriter w(path, header);
  for (const auto& pr : report.pairs) {
    if (!pr.ok) continue;
    std::vector<std::string> cells;
    for (int i = 0; i < d; ++i) cells.push_back(format_double(pr.p[i]));
    for (int i = 0; i < d; ++i) cells.push_back(format_double(pr.pp[i]));
    for (double v : {pr.d_X, pr.d_H_beta, pr.d_H_1, pr.ratio41, pr.ratio42}) cells.push_back(format_double(v));
    w.row(cells);
  }
  w.close();
}

void write_gt_pinching(const std::filesystem::path& path, const std::vector<GTReport>& reports) {
  CsvWriter w(path, {"k", "r0", "rho", "kappa_min", "kappa_max", "pinch_C", "status"});
  for (const auto& r : reports) {
    w.row({std::to_string(r.spec.k), format_double(r.spec.r0), format_double(r.spec.rho), format_double(r.kappa_min),
           format_double(r.kappa_max), format_double(r.pinch_C), r.status});
  }
  w.close();
}

void write_gt_profile(const std::filesystem::path& path,
                      const std::vector<std::pair<SmoothingSpec, std::vector<ProfileRow>>>& profiles) {
  CsvWriter w(path, {"k", "r0", "rho", "r", "K_rtheta", "K_rx", "K_thetax"});
  for (const auto& [spec, rows] : profiles) {
    for (const auto& row : rows) {
      w.row({std::to_string(spec.k), format_double(spec.r0), format_double(spec.rho), format_double(row.r),
             format_double(row.K.K_rtheta), format_double(row.K.K_rx), format_double(row.K.K_thetax)});
    }
  }
  w.close();
}

void write_curvature_planes(const std::filesystem::path& path, const CurvatureScan& scan) {
  CsvWriter w(path, {"i", "j", "kappa_min", "kappa_max"});
  const Eigen::Index n = scan.plane_min.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      w.row({std::to_string(i), std::to_string(j), format_double(scan.plane_min(i, j)),
             format_double(scan.plane_max(i, j))});
    }
  }
  w.close();
}

}  // namespace pinchlab
