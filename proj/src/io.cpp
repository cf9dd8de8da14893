#include "llgrom/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace llgrom {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        }
        cfg.values_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
}

bool KeyValueConfig::has(const std::string& key) const {
    return values_.count(key) > 0;
}

const std::string& KeyValueConfig::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("missing config key: " + key);
    }
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    try {
        size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) {
            throw std::invalid_argument("");
        }
        return v;
    } catch (...) {
        throw ConfigError(key + ": expected a number, got '" + it->second + "'");
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    try {
        size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) {
            throw std::invalid_argument("");
        }
        return v;
    } catch (...) {
        throw ConfigError(key + ": expected an integer, got '" + it->second +
                          "'");
    }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    try {
        size_t pos = 0;
        const std::uint64_t v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) {
            throw std::invalid_argument("");
        }
        return v;
    } catch (...) {
        throw ConfigError(key + ": expected an unsigned integer, got '" +
                          it->second + "'");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError(key + ": expected true/false, got '" + it->second + "'");
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

std::string KeyValueConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k + " = " + v + "\n";
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows) {
    if (header.size() != static_cast<size_t>(rows.cols())) {
        throw IoError("write_csv: header width mismatch for " + path.string());
    }
    std::string out;
    for (size_t c = 0; c < header.size(); ++c) {
        out += header[c];
        out += (c + 1 < header.size()) ? ',' : '\n';
    }
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            out += format_double(rows(r, c));
            out += (c + 1 < rows.cols()) ? ',' : '\n';
        }
    }
    atomic_write_text(path, out);
}

Eigen::MatrixXd read_csv(const std::filesystem::path& path,
                         std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("empty csv file " + path.string());
    }
    std::vector<std::string> head;
    {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            head.push_back(trim(cell));
        }
    }
    if (header) {
        *header = head;
    }
    std::vector<std::vector<double>> data;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        if (row.size() != head.size()) {
            throw IoError("ragged csv row in " + path.string());
        }
        data.push_back(std::move(row));
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(data.size()),
                        static_cast<Eigen::Index>(head.size()));
    for (size_t r = 0; r < data.size(); ++r) {
        for (size_t c = 0; c < head.size(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                data[r][c];
        }
    }
    return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot hash " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return fnv1a(buffer.str());
}

namespace {

std::vector<std::string> coeff_header(Eigen::Index n) {
    std::vector<std::string> h(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        h[c] = "c" + std::to_string(c);
    }
    return h;
}

Eigen::MatrixXd stack_fields(const std::vector<FeVectorField>& fields) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(fields.size()),
                        fields.empty() ? 0 : fields.front().coeffs.size());
    for (size_t r = 0; r < fields.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = fields[r].coeffs.transpose();
    }
    return out;
}

}  // namespace

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      const KeyValueConfig& meta) {
    std::filesystem::create_directories(dir);
    write_csv(dir / "magnetizations.csv",
              coeff_header(traj.magnetizations.front().coeffs.size()),
              stack_fields(traj.magnetizations));
    write_csv(dir / "velocities.csv",
              coeff_header(traj.velocities.front().coeffs.size()),
              stack_fields(traj.velocities));
    Eigen::MatrixXd lambdas(static_cast<Eigen::Index>(traj.multipliers.size()),
                            traj.multipliers.front().coeffs.size());
    for (size_t r = 0; r < traj.multipliers.size(); ++r) {
        lambdas.row(static_cast<Eigen::Index>(r)) =
            traj.multipliers[r].coeffs.transpose();
    }
    write_csv(dir / "multipliers.csv", coeff_header(lambdas.cols()), lambdas);
    if (!traj.infsup.empty()) {
        Eigen::MatrixXd beta(static_cast<Eigen::Index>(traj.infsup.size()), 1);
        for (size_t r = 0; r < traj.infsup.size(); ++r) {
            beta(static_cast<Eigen::Index>(r), 0) = traj.infsup[r];
        }
        write_csv(dir / "infsup.csv", {"beta"}, beta);
    }
    atomic_write_text(dir / "meta.cfg", meta.serialize());
}

Trajectory read_trajectory(const std::filesystem::path& dir,
                           KeyValueConfig* meta) {
    Trajectory traj;
    const Eigen::MatrixXd mags = read_csv(dir / "magnetizations.csv");
    const Eigen::MatrixXd vels = read_csv(dir / "velocities.csv");
    const Eigen::MatrixXd lams = read_csv(dir / "multipliers.csv");
    for (Eigen::Index r = 0; r < mags.rows(); ++r) {
        traj.magnetizations.emplace_back(mags.row(r).transpose());
    }
    for (Eigen::Index r = 0; r < vels.rows(); ++r) {
        traj.velocities.emplace_back(vels.row(r).transpose());
        traj.multipliers.emplace_back(lams.row(r).transpose());
    }
    if (std::filesystem::exists(dir / "infsup.csv")) {
        const Eigen::MatrixXd beta = read_csv(dir / "infsup.csv");
        for (Eigen::Index r = 0; r < beta.rows(); ++r) {
            traj.infsup.push_back(beta(r, 0));
        }
    }
    if (meta) {
        *meta = KeyValueConfig::parse_file(dir / "meta.cfg");
    }
    return traj;
}

void write_basis(const std::filesystem::path& dir, const ReducedBasis& basis,
                 const KeyValueConfig& meta) {
    std::filesystem::create_directories(dir);
    Eigen::MatrixXd sv(basis.singular_values.size(), 1);
    sv.col(0) = basis.singular_values;
    write_csv(dir / "singular_values.csv", {"sigma"}, sv);
    write_csv(dir / "basis.csv", coeff_header(basis.phi.cols()), basis.phi);
    KeyValueConfig full = meta;
    full.set("gram",
             basis.gram == GramKind::H1Vec ? "h1_vec" : "l2_scalar");
    atomic_write_text(dir / "meta.cfg", full.serialize());
}

ReducedBasis read_basis(const std::filesystem::path& dir,
                        KeyValueConfig* meta) {
    ReducedBasis basis;
    const Eigen::MatrixXd sv = read_csv(dir / "singular_values.csv");
    basis.singular_values = sv.col(0);
    basis.phi = read_csv(dir / "basis.csv");
    KeyValueConfig m = KeyValueConfig::parse_file(dir / "meta.cfg");
    const std::string gram = m.get_string("gram");
    if (gram == "h1_vec") {
        basis.gram = GramKind::H1Vec;
    } else if (gram == "l2_scalar") {
        basis.gram = GramKind::L2Scalar;
    } else {
        throw IoError("read_basis: unknown gram kind '" + gram + "'");
    }
    if (meta) {
        *meta = m;
    }
    return basis;
}

void write_params(const std::filesystem::path& path,
                  const std::vector<ParamVector>& params) {
    if (params.empty()) {
        throw IoError("write_params: empty parameter list");
    }
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(params.size()),
                         params.front().dim());
    for (size_t r = 0; r < params.size(); ++r) {
        rows.row(static_cast<Eigen::Index>(r)) = params[r].y.transpose();
    }
    std::vector<std::string> header(params.front().dim());
    for (int c = 0; c < params.front().dim(); ++c) {
        header[c] = "y" + std::to_string(c + 1);
    }
    write_csv(path, header, rows);
}

std::vector<ParamVector> read_params(const std::filesystem::path& path) {
    const Eigen::MatrixXd rows = read_csv(path);
    std::vector<ParamVector> out;
    out.reserve(rows.rows());
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        out.emplace_back(rows.row(r).transpose());
    }
    return out;
}

}  // namespace llgrom
