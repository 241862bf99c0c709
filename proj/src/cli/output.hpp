// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "vf/cli.hpp"

namespace vf::cli {

using json = nlohmann::ordered_json;

//! Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite)
std::string fmt_num(double x);
//! RFC-4180 field quoting
std::string csv_field(const std::string& s);

class CsvWriter
{
  public:
    explicit CsvWriter(const std::filesystem::path& path);
    CsvWriter& header(const std::vector<std::string>& cols);
    CsvWriter& cell(const std::string& s);
    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    void end_row();
    void close();

  private:
    std::ofstream out_;
    std::filesystem::path path_;
    bool first_ = true;
};

/*!
 * Files produced by one subcommand. Unless commit() is called, the
 * destructor removes every file registered so far.
 */
class OutputSet
{
  public:
    explicit OutputSet(std::filesystem::path dir);
    ~OutputSet();
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    std::filesystem::path file(const std::string& name);
    void write_json(const std::string& name, const json& j);
    void write_text(const std::string& name, const std::string& text);
    void commit() { committed_ = true; }
    const std::vector<std::filesystem::path>& files() const { return files_; }

  private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    bool created_dir_ = false;
    bool committed_ = false;
};

//! Common envelope: tool, subcommand, config hash, seed, calibration provenance
json envelope(const RunConfig& cfg, const std::string& subcommand,
              const std::vector<std::string>& defaulted = {});

json vec_json(const Vec& v, int dim);

}  // namespace vf::cli
