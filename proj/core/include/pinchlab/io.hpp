#pragma once

#include "pinchlab/comparison.hpp"
#include "pinchlab/growth.hpp"
#include "pinchlab/gtmetric.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace pinchlab {

// Shortest round-trip decimal form ("%.17g"); nan/inf spelled out.
std::string format_double(double x);

// Header-first CSV writer. Throws std::runtime_error on I/O failure or when a
// row width does not match the header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::size_t width_;
  std::ofstream out_;
};

// growth_samples: q_index,t,norm (failed samples are omitted)
void write_growth_samples(const std::filesystem::path& path, const std::vector<GrowthSample>& samples);
// growth_fit: beta_hat,logC_hat,residual_rms,t_min,t_max,side; one row per fitted side
void write_growth_fit(const std::filesystem::path& path, const GrowthFit& fit);
// distortion_pairs: p_0..p_n,pprime_0..pprime_n,d_X,d_H_beta,d_H_1,ratio41,ratio42
void write_distortion_pairs(const std::filesystem::path& path, const DistortionReport& report);
// gt_pinching: k,r0,rho,kappa_min,kappa_max,pinch_C,status
void write_gt_pinching(const std::filesystem::path& path, const std::vector<GTReport>& reports);
// gt_curvature_profile: k,r0,rho,r,K_rtheta,K_rx,K_thetax
void write_gt_profile(const std::filesystem::path& path, const std::vector<std::pair<SmoothingSpec, std::vector<ProfileRow>>>& profiles);
// curvature_planes: i,j,kappa_min,kappa_max over the coordinate planes of a scan
void write_curvature_planes(const std::filesystem::path& path, const CurvatureScan& scan);

}  // namespace pinchlab
