/// @file io.hpp
/// CSV snapshots, time series, checkpoints and atomic output directories.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "stefan/energy.hpp"
#include "stefan/fields.hpp"
#include "stefan/solver.hpp"

namespace stefan::io {

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string config_hash(const std::string& text);

/// %.17g
std::string fmt(double v);

/// Key/value pairs of the '#' header line.
using Meta = std::map<std::string, std::string>;

/// One row per z node, n_x values each; header "# k=v ...".
void write_snapshot(std::ostream& os, const BulkField& u, const Meta& meta);
/// A single row of n_x values.
void write_snapshot(std::ostream& os, const InterfaceField& rho, const Meta& meta);
BulkField read_bulk(std::istream& is, Meta* meta = nullptr);
InterfaceField read_interface(std::istream& is, Meta* meta = nullptr);

void write_snapshot(const std::filesystem::path& p, const BulkField& u, const Meta& meta);
void write_snapshot(const std::filesystem::path& p, const InterfaceField& rho, const Meta& meta);
BulkField read_bulk(const std::filesystem::path& p, Meta* meta = nullptr);
InterfaceField read_interface(const std::filesystem::path& p, Meta* meta = nullptr);

extern const std::vector<std::string> time_series_columns;

void write_time_series_header(std::ostream& os, const std::string& hash);
void write_time_series_row(std::ostream& os, const EnergyReport& r);
void write_time_series(std::ostream& os, const std::vector<EnergyReport>& reports,
                       const std::string& hash);

/// u.csv, rho.csv, rho_prev.csv, rho_t.csv in `dir`; each header carries t,
/// epsilon, n_x, n_z and the config hash.
void write_checkpoint(const std::filesystem::path& dir, const State& s, double epsilon,
                      const std::string& hash);
State read_checkpoint(const std::filesystem::path& dir, Meta* meta = nullptr);

/// Output directory that only appears at `target` after commit(). Files are
/// written under a sibling temporary directory, which is removed if the
/// object is destroyed without commit.
class StagedDirectory {
 public:
  explicit StagedDirectory(std::filesystem::path target);
  ~StagedDirectory();
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;

  const std::filesystem::path& path() const { return tmp_; }
  const std::filesystem::path& target() const { return target_; }
  /// Replaces `target` with the staged contents.
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path tmp_;
  bool done_ = false;
};

}  // namespace stefan::io
