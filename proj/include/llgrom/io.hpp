#ifndef LLGROM_IO_HPP
#define LLGROM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "llgrom/pod.hpp"

namespace llgrom {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value configuration with dotted keys; '#' starts a comment.
class KeyValueConfig {
  public:
    static KeyValueConfig parse_string(const std::string& text);
    static KeyValueConfig parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    const std::string& get_string(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const {
        return values_;
    }
    std::string serialize() const;

  private:
    std::map<std::string, std::string> values_;
};

std::string format_double(double v);  // round-trip precision

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

// CSV with a mandatory header row; written atomically.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows);
Eigen::MatrixXd read_csv(const std::filesystem::path& path,
                         std::vector<std::string>* header = nullptr);

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t fnv1a_file(const std::filesystem::path& path);

// Trajectory directory: one CSV per field sequence (rows = time steps,
// columns = coefficients) plus meta.cfg.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      const KeyValueConfig& meta);
Trajectory read_trajectory(const std::filesystem::path& dir,
                           KeyValueConfig* meta = nullptr);

// Reduced basis directory: singular values + basis matrix + meta.cfg.
void write_basis(const std::filesystem::path& dir, const ReducedBasis& basis,
                 const KeyValueConfig& meta);
ReducedBasis read_basis(const std::filesystem::path& dir,
                        KeyValueConfig* meta = nullptr);

// Parameter vectors as CSV rows.
void write_params(const std::filesystem::path& path,
                  const std::vector<ParamVector>& params);
std::vector<ParamVector> read_params(const std::filesystem::path& path);

}  // namespace llgrom

#endif
