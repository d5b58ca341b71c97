#include "dira/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dira::io {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void Archive::put_scalar(const std::string& name, double value) {
    Entry e;
    e.kind = Kind::Scalar;
    e.name = name;
    e.data = Eigen::MatrixXd::Constant(1, 1, value);
    entries_.push_back(std::move(e));
}

void Archive::put_ints(const std::string& name, const std::vector<std::int64_t>& values) {
    Entry e;
    e.kind = Kind::Ints;
    e.name = name;
    e.ints = values;
    entries_.push_back(std::move(e));
}

void Archive::put_vector(const std::string& name, const Eigen::VectorXd& v) {
    Entry e;
    e.kind = Kind::Vector;
    e.name = name;
    e.data = v;
    entries_.push_back(std::move(e));
}

void Archive::put_matrix(const std::string& name, const Eigen::MatrixXd& m) {
    Entry e;
    e.kind = Kind::Matrix;
    e.name = name;
    e.data = m;
    entries_.push_back(std::move(e));
}

bool Archive::has(const std::string& name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return true;
    }
    return false;
}

const Archive::Entry& Archive::find(const std::string& name, Kind kind) const {
    for (const auto& e : entries_) {
        if (e.name == name) {
            if (e.kind != kind) {
                throw std::runtime_error("archive entry '" + name + "' has a different kind");
            }
            return e;
        }
    }
    throw std::runtime_error("archive entry '" + name + "' not found");
}

double Archive::get_scalar(const std::string& name) const {
    return find(name, Kind::Scalar).data(0, 0);
}

std::vector<std::int64_t> Archive::get_ints(const std::string& name) const {
    return find(name, Kind::Ints).ints;
}

Eigen::VectorXd Archive::get_vector(const std::string& name) const {
    return find(name, Kind::Vector).data.col(0);
}

Eigen::MatrixXd Archive::get_matrix(const std::string& name) const {
    return find(name, Kind::Matrix).data;
}

void Archive::save(std::ostream& out) const {
    out << "# dira-archive 1\n";
    for (const auto& e : entries_) {
        switch (e.kind) {
            case Kind::Scalar:
                out << "scalar " << e.name << ' ' << format_double(e.data(0, 0)) << '\n';
                break;
            case Kind::Ints: {
                out << "ints " << e.name << ' ' << e.ints.size();
                for (auto v : e.ints) out << ' ' << v;
                out << '\n';
                break;
            }
            case Kind::Vector: {
                out << "vector " << e.name << ' ' << e.data.rows() << '\n';
                for (Eigen::Index i = 0; i < e.data.rows(); ++i) {
                    if (i) out << ' ';
                    out << format_double(e.data(i, 0));
                }
                out << '\n';
                break;
            }
            case Kind::Matrix: {
                out << "matrix " << e.name << ' ' << e.data.rows() << ' ' << e.data.cols() << '\n';
                for (Eigen::Index r = 0; r < e.data.rows(); ++r) {
                    for (Eigen::Index c = 0; c < e.data.cols(); ++c) {
                        if (c) out << ' ';
                        out << format_double(e.data(r, c));
                    }
                    out << '\n';
                }
                break;
            }
        }
    }
}

void Archive::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    save(out);
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

Archive Archive::load(std::istream& in) {
    Archive a;
    std::string tok;
    while (in >> tok) {
        if (tok == "#") {
            std::string line;
            std::getline(in, line);
            continue;
        }
        std::string name;
        if (tok == "scalar") {
            double v;
            if (!(in >> name >> v)) throw std::runtime_error("malformed scalar entry");
            a.put_scalar(name, v);
        } else if (tok == "ints") {
            std::size_t count;
            if (!(in >> name >> count)) throw std::runtime_error("malformed ints entry");
            std::vector<std::int64_t> vals(count);
            for (auto& v : vals) {
                if (!(in >> v)) throw std::runtime_error("truncated ints entry '" + name + "'");
            }
            a.put_ints(name, vals);
        } else if (tok == "vector") {
            Eigen::Index len;
            if (!(in >> name >> len)) throw std::runtime_error("malformed vector entry");
            Eigen::VectorXd v(len);
            for (Eigen::Index i = 0; i < len; ++i) {
                if (!(in >> v(i))) throw std::runtime_error("truncated vector entry '" + name + "'");
            }
            a.put_vector(name, v);
        } else if (tok == "matrix") {
            Eigen::Index rows, cols;
            if (!(in >> name >> rows >> cols)) throw std::runtime_error("malformed matrix entry");
            Eigen::MatrixXd m(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    if (!(in >> m(r, c))) {
                        throw std::runtime_error("truncated matrix entry '" + name + "'");
                    }
                }
            }
            a.put_matrix(name, m);
        } else {
            throw std::runtime_error("unknown archive token '" + tok + "'");
        }
    }
    return a;
}

Archive Archive::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return load(in);
}

}  // namespace dira::io
