#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkt/linalg.hpp"

namespace qkt {

using json = nlohmann::ordered_json;

/// configuration errors carry a field-level diagnostic; the CLI maps them to exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// strict mode: reject unknown fields so silent misconfiguration cannot pass
void check_fields(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& context);

/// require "version": 1 on a config document
void check_version(const json& obj, const std::string& context);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);
json rmatrix_to_json(const RMat& m);

/// plain CSV with a header row; doubles rendered round-trip exact
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& values);
    std::string str() const;
    void save(const std::filesystem::path& path) const;

private:
    std::string body_;
    std::size_t columns_ = 0;
};

std::string format_double(double v);

}  // namespace qkt
