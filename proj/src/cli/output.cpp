#include "cvsense/cli/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <memory>
#include <stdexcept>

#include "cvsense/cli/config.hpp"
#include "cvsense/execution.hpp"

#ifndef CVSENSE_VERSION
#define CVSENSE_VERSION "0.0.0"
#endif

namespace cvsense::cli {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.15g", v == 0.0 ? 0.0 : v);
    return buf.data();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    for (const auto& h : header) cell(h);
    end_row();
}

void CsvWriter::cell(const std::string& text) {
    if (filled_ == columns_) throw std::logic_error("CSV row has too many cells");
    if (filled_ > 0) out_ << ',';
    out_ << text;
    ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v) {
    cell(format_real(v));
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
    cell(std::to_string(v));
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view v) {
    cell(std::string(v));
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::vector<double>& v) {
    std::string text;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) text += ';';
        text += format_real(v[i]);
    }
    cell(text);
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw std::logic_error("CSV row has too few cells");
    out_ << '\n';
    filled_ = 0;
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xf];
    }
    return hex;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".manifest.json");
    return p;
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

}  // namespace

nlohmann::json make_manifest(const RunRecord& run) {
    nlohmann::json j;
    j["schema"] = "cvsense-run-manifest";
    j["schema_version"] = kManifestSchemaVersion;
    j["command"] = run.command;
    j["parameters"] = run.parameters;
    j["seed"] = run.parameters.contains("seed") ? run.parameters["seed"] : nlohmann::json();
    j["tool_version"] = CVSENSE_VERSION;
    j["timestamp"] = utc_timestamp();
    j["threads"] = max_threads();
    j["exit_code"] = run.exit_code;
    j["warnings"] = run.warnings;
    j["outputs"] = nlohmann::json::array();
    for (const auto& out : run.outputs) {
        j["outputs"].push_back({{"file", out.filename().string()}, {"sha256", sha256_file(out)}});
    }
    return j;
}

void write_manifest(const RunRecord& run) {
    const auto path = manifest_path_for(run.outputs.at(0));
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << make_manifest(run).dump(2) << '\n';
}

}  // namespace cvsense::cli
