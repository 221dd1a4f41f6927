#pragma once

#include "ems/sparsify.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string_view>
#include <vector>

namespace ems {

enum class SignalOrigin { synthetic, image_blocks, file };

/// Column-stacked real signals, N x L.
struct SignalMatrix {
  Eigen::MatrixXd data;
  SignalOrigin origin = SignalOrigin::file;

  Eigen::Index n() const noexcept { return data.rows(); }
  Eigen::Index l() const noexcept { return data.cols(); }
};

enum class AmplitudeDist {
  unit_normal,
  uniform_pm1,  // random signs, magnitude 1
};

AmplitudeDist parse_amplitude(std::string_view name);

/// Each column is Psi c with exactly k nonzero coefficients on a uniformly
/// random support. Column j draws from the stream (seed, j).
SignalMatrix gen_sparse_signals(Eigen::Index n, Eigen::Index k, Eigen::Index l, const SparsifyingBasis& basis,
                                std::uint64_t seed, AmplitudeDist dist = AmplitudeDist::unit_normal);

/// Horizontal concatenation (training sets built from several classes).
SignalMatrix concat(const std::vector<SignalMatrix>& parts);

/// Sentinel for a noise-free run.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// x + e where e is white Gaussian noise rescaled so that
/// 10 log10(||x||^2 / ||e||^2) == snr_db exactly. snr_db = +inf returns x.
Eigen::VectorXd add_awgn(const Eigen::Ref<const Eigen::VectorXd>& x, double snr_db, std::uint64_t seed);

/// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  bool operator==(const GrayImage&) const = default;
};

/// Reads binary (P5) or ASCII (P2) PGM with maxval 255.
GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& img, const std::filesystem::path& path, bool binary = true);

/// Non-overlapping b x b blocks in raster order, each vectorised column-major
/// (element (r, c) of a block goes to index r + c * b).
SignalMatrix image_to_blocks(const GrayImage& img, int b = 8);
/// Inverse of image_to_blocks; values are rounded and clamped to [0, 255].
GrayImage blocks_to_image(const Eigen::Ref<const Eigen::MatrixXd>& blocks, int width, int height, int b = 8);

}  // namespace ems
