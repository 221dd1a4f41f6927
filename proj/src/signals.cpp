#include "ems/signals.hpp"

#include "ems/error.hpp"
#include "ems/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace ems {

AmplitudeDist parse_amplitude(std::string_view name) {
  if (name == "unit_normal") return AmplitudeDist::unit_normal;
  if (name == "uniform_pm1") return AmplitudeDist::uniform_pm1;
  throw Error(Errc::InvalidArgument, "unknown amplitude distribution '" + std::string(name) + "'");
}

SignalMatrix gen_sparse_signals(Eigen::Index n, Eigen::Index k, Eigen::Index l, const SparsifyingBasis& basis,
                                std::uint64_t seed, AmplitudeDist dist) {
  if (basis.size() != n)
    throw Error(Errc::DimensionMismatch, "basis size " + std::to_string(basis.size()) + " vs n " + std::to_string(n));
  if (k < 1 || k > n)
    throw Error(Errc::InvalidSparsity, "need 1 <= k <= n, got k=" + std::to_string(k));
  if (l < 0) throw Error(Errc::InvalidSize, "negative signal count");

  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(n, l);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < l; ++j) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto pick = i + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n - i)));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick)]);
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      double amp = 0.0;
      if (dist == AmplitudeDist::unit_normal) {
        do {
          amp = rng.normal();
        } while (std::abs(amp) <= 1e-12);
      } else {
        amp = rng.sign();
      }
      coeffs(perm[static_cast<std::size_t>(i)], j) = amp;
    }
  }
  return {basis.synthesize_columns(coeffs), SignalOrigin::synthetic};
}

SignalMatrix concat(const std::vector<SignalMatrix>& parts) {
  if (parts.empty()) return {};
  const Eigen::Index n = parts.front().n();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.n() != n) throw Error(Errc::DimensionMismatch, "cannot concatenate signals of different length");
    total += p.l();
  }
  SignalMatrix out{Eigen::MatrixXd(n, total), parts.front().origin};
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.data.middleCols(at, p.l()) = p.data;
    at += p.l();
  }
  return out;
}

Eigen::VectorXd add_awgn(const Eigen::Ref<const Eigen::VectorXd>& x, double snr_db, std::uint64_t seed) {
  const double energy = x.squaredNorm();
  if (!(energy >= 1e-30)) throw Error(Errc::ZeroVector, "cannot set an SNR relative to a zero signal");
  if (std::isinf(snr_db) && snr_db > 0) return x;
  if (std::isnan(snr_db)) throw Error(Errc::InvalidArgument, "snr_db is NaN");
  Rng rng(seed);
  Eigen::VectorXd e(x.size());
  do {
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = rng.normal();
  } while (e.squaredNorm() == 0.0);
  const double target = energy / std::pow(10.0, snr_db / 10.0);
  e *= std::sqrt(target / e.squaredNorm());
  return x + e;
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) continue;
    break;
  }
  if (ch == EOF) return false;
  tok.push_back(static_cast<char>(ch));
  while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#') tok.push_back(static_cast<char>(in.get()));
  return true;
}

int header_int(std::istream& in, const std::string& what, const std::filesystem::path& path) {
  std::string tok;
  if (!next_token(in, tok)) throw Error(Errc::BadHeader, path.string() + ": missing " + what);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::BadHeader, path.string() + ": bad " + what + " '" + tok + "'");
  }
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string magic;
  if (!next_token(in, magic)) throw Error(Errc::BadHeader, path.string() + ": empty file");
  if (magic != "P2" && magic != "P5") throw Error(Errc::UnsupportedFormat, path.string() + ": magic '" + magic + "'");

  GrayImage img;
  img.width = header_int(in, "width", path);
  img.height = header_int(in, "height", path);
  const int maxval = header_int(in, "maxval", path);
  if (maxval != 255) throw Error(Errc::UnsupportedFormat, path.string() + ": maxval " + std::to_string(maxval));
  const auto count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(count);

  if (magic == "P5") {
    in.get();  // single whitespace byte after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
      throw Error(Errc::BadHeader, path.string() + ": truncated pixel data");
  } else {
    std::string tok;
    for (std::size_t i = 0; i < count; ++i) {
      if (!next_token(in, tok)) throw Error(Errc::BadHeader, path.string() + ": truncated pixel data");
      int v = -1;
      try {
        v = std::stoi(tok);
      } catch (const std::exception&) {
      }
      if (v < 0 || v > 255) throw Error(Errc::BadHeader, path.string() + ": bad pixel '" + tok + "'");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path, bool binary) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
    throw Error(Errc::InvalidSize, "image dimensions do not match pixel count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << (binary ? "P5" : "P2") << '\n' << img.width << ' ' << img.height << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  } else {
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) out << (c ? " " : "") << static_cast<int>(img.at(r, c));
      out << '\n';
    }
  }
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

SignalMatrix image_to_blocks(const GrayImage& img, int b) {
  if (b < 1) throw Error(Errc::InvalidArgument, "block size must be >= 1");
  if (img.width % b != 0 || img.height % b != 0)
    throw Error(Errc::NotDivisible, std::to_string(img.width) + "x" + std::to_string(img.height) +
                                        " is not divisible into " + std::to_string(b) + "x" + std::to_string(b) +
                                        " blocks");
  const int bw = img.width / b;
  const int bh = img.height / b;
  SignalMatrix out{Eigen::MatrixXd(b * b, bw * bh), SignalOrigin::image_blocks};
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      const int col = by * bw + bx;
      for (int c = 0; c < b; ++c)
        for (int r = 0; r < b; ++r) out.data(r + c * b, col) = img.at(by * b + r, bx * b + c);
    }
  return out;
}

GrayImage blocks_to_image(const Eigen::Ref<const Eigen::MatrixXd>& blocks, int width, int height, int b) {
  if (b < 1) throw Error(Errc::InvalidArgument, "block size must be >= 1");
  if (width <= 0 || height <= 0 || width % b != 0 || height % b != 0)
    throw Error(Errc::NotDivisible, "image size not divisible by block size");
  const int bw = width / b;
  const int bh = height / b;
  if (blocks.rows() != b * b || blocks.cols() != bw * bh)
    throw Error(Errc::DimensionMismatch, "block matrix shape does not match image size");
  GrayImage img{width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height)};
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      const int col = by * bw + bx;
      for (int c = 0; c < b; ++c)
        for (int r = 0; r < b; ++r) {
          const double v = std::clamp(std::round(blocks(r + c * b, col)), 0.0, 255.0);
          img.pixels[static_cast<std::size_t>(by * b + r) * width + bx * b + c] = static_cast<std::uint8_t>(v);
        }
    }
  return img;
}

}  // namespace ems
