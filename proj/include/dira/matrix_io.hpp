#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dira::io {

// Self-describing text container for experiment artifacts (plants,
// checkpoints, solver snapshots). Entries are written in insertion order:
//
//   # dira-archive 1
//   scalar gamma 0.95
//   ints state_dims 2  2 2
//   vector p 2
//   0.5 0.5
//   matrix A 2 2
//   1 0
//   0 1
//
// Values are emitted with enough digits to round-trip doubles exactly.
class Archive {
public:
    void put_scalar(const std::string& name, double value);
    void put_ints(const std::string& name, const std::vector<std::int64_t>& values);
    void put_vector(const std::string& name, const Eigen::VectorXd& v);
    void put_matrix(const std::string& name, const Eigen::MatrixXd& m);

    bool has(const std::string& name) const;
    double get_scalar(const std::string& name) const;
    std::vector<std::int64_t> get_ints(const std::string& name) const;
    Eigen::VectorXd get_vector(const std::string& name) const;
    Eigen::MatrixXd get_matrix(const std::string& name) const;

    void save(std::ostream& out) const;
    void save(const std::string& path) const;
    static Archive load(std::istream& in);
    static Archive load_file(const std::string& path);

private:
    enum class Kind { Scalar, Ints, Vector, Matrix };
    struct Entry {
        Kind kind;
        std::string name;
        Eigen::MatrixXd data;                // Scalar/Vector/Matrix payload
        std::vector<std::int64_t> ints;      // Ints payload
    };
    const Entry& find(const std::string& name, Kind kind) const;
    std::vector<Entry> entries_;
};

// Formats a double so that parsing it back recovers the same bits.
std::string format_double(double value);

}  // namespace dira::io
