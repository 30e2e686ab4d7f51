#ifndef JGCF_CHECKPOINT_HPP
#define JGCF_CHECKPOINT_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "jgcf/polybasis.hpp"

namespace jgcf {

/// Checkpoint layout (little-endian):
///   uint32 N, d, num_users, K; float64 a, b, alpha; then N*d float32 values
///   of E^(0), row-major.
struct Checkpoint {
    Eigen::MatrixXd e0;
    std::uint32_t num_users = 0;
    FilterParams filter;
};

inline void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
    std::uint32_t header[4] = {static_cast<std::uint32_t>(ck.e0.rows()),
                               static_cast<std::uint32_t>(ck.e0.cols()), ck.num_users,
                               static_cast<std::uint32_t>(ck.filter.order)};
    double scalars[3] = {ck.filter.a, ck.filter.b, ck.filter.alpha};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(scalars), sizeof(scalars));
    for (int r = 0; r < ck.e0.rows(); ++r)
        for (int c = 0; c < ck.e0.cols(); ++c) {
            float v = static_cast<float>(ck.e0(r, c));
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
    std::uint32_t header[4];
    double scalars[3];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    in.read(reinterpret_cast<char*>(scalars), sizeof(scalars));
    if (!in) throw std::runtime_error("truncated checkpoint header: " + path.string());
    Checkpoint ck;
    ck.num_users = header[2];
    ck.filter.order = static_cast<int>(header[3]);
    ck.filter.a = scalars[0];
    ck.filter.b = scalars[1];
    ck.filter.alpha = scalars[2];
    ck.e0.resize(header[0], header[1]);
    for (std::uint32_t r = 0; r < header[0]; ++r)
        for (std::uint32_t c = 0; c < header[1]; ++c) {
            float v;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            ck.e0(r, c) = v;
        }
    if (!in) throw std::runtime_error("truncated checkpoint data: " + path.string());
    return ck;
}

/// "key = value" config text, '#' comments, unknown keys rejected by callers.
inline std::map<std::string, std::string> parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
        s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
        return s;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline void write_config(const std::map<std::string, std::string>& kv,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

}  // namespace jgcf

#endif
