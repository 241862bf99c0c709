// SPDX-License-Identifier: Apache-2.0
#include "output.hpp"

#include <charconv>
#include <cmath>

#include "vf/error.hpp"

namespace vf::cli {

std::string fmt_num(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path)
{
    VF_REQUIRE(out_.good(), io_error, "cannot write '" + path.string() + "'");
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& cols)
{
    for (const auto& c : cols)
        cell(c);
    end_row();
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s)
{
    if (!first_)
        out_ << ',';
    out_ << csv_field(s);
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(fmt_num(x)); }
CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }

void CsvWriter::end_row()
{
    out_ << "\r\n";
    first_ = true;
}

void CsvWriter::close()
{
    out_.close();
    VF_REQUIRE(!out_.fail(), io_error, "failed writing '" + path_.string() + "'");
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::error_code ec;
    if (!std::filesystem::exists(dir_, ec))
    {
        std::filesystem::create_directories(dir_, ec);
        VF_REQUIRE(!ec, io_error, "cannot create output directory '" + dir_.string() + "'");
        created_dir_ = true;
    }
    VF_REQUIRE(std::filesystem::is_directory(dir_, ec), io_error,
               "output path '" + dir_.string() + "' is not a directory");
}

OutputSet::~OutputSet()
{
    if (committed_)
        return;
    std::error_code ec;
    for (const auto& f : files_)
        std::filesystem::remove(f, ec);
    if (created_dir_ && std::filesystem::is_empty(dir_, ec))
        std::filesystem::remove(dir_, ec);
}

std::filesystem::path OutputSet::file(const std::string& name)
{
    auto p = dir_ / name;
    files_.push_back(p);
    return p;
}

void OutputSet::write_text(const std::string& name, const std::string& text)
{
    auto p = file(name);
    std::ofstream out(p, std::ios::binary);
    out << text;
    out.close();
    VF_REQUIRE(!out.fail(), io_error, "failed writing '" + p.string() + "'");
}

void OutputSet::write_json(const std::string& name, const json& j)
{
    write_text(name, j.dump(2) + "\n");
}

json envelope(const RunConfig& cfg, const std::string& subcommand,
              const std::vector<std::string>& defaulted)
{
    json j;
    j["tool"] = "vf";
    j["subcommand"] = subcommand;
    j["config_sha256"] = cfg.hash;
    j["seed"] = cfg.seed;
    json cal;
    cal["source"] = cfg.calibration_path.empty() ? "defaults" : cfg.calibration_path;
    cal["calibrated"] = cfg.constants.calibrated;
    cal["defaulted"] = defaulted;
    j["calibration"] = cal;
    return j;
}

json vec_json(const Vec& v, int dim)
{
    json a = json::array();
    for (int i = 0; i < dim; ++i)
        a.push_back(v[i]);
    return a;
}

}  // namespace vf::cli
