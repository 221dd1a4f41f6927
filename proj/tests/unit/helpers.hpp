#pragma once

#include "ems/error.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>

// Asserts that expr throws ems::Error with the given code.
#define CHECK_ERRC(expr, errc)                                          \
  do {                                                                  \
    bool ems_thrown_ = false;                                           \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const ems::Error& e) {                                     \
      ems_thrown_ = true;                                               \
      CHECK_MESSAGE(e.code() == (errc), "got " << e.what());            \
    }                                                                   \
    CHECK_MESSAGE(ems_thrown_, "expected " << ems::to_string(errc));    \
  } while (0)

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("ems_test_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};
