// io.hpp — Plain-text matrix format (first line N, then N rows of N values)
// and atomic file writes (temp + rename).

#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace thermolin {

class MatrixParseError : public std::runtime_error {
public:
    MatrixParseError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline Eigen::MatrixXd load_matrix(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };

    if (!next_line()) {
        throw MatrixParseError(name, 1, "empty file, expected matrix dimension N");
    }
    int n = 0;
    {
        std::istringstream header(line);
        if (!(header >> n) || n < 1) {
            throw MatrixParseError(name, line_no, "expected positive integer dimension, got '" + line + "'");
        }
        std::string extra;
        if (header >> extra) {
            throw MatrixParseError(name, line_no, "unexpected token '" + extra + "' after dimension");
        }
    }

    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        if (!next_line()) {
            throw MatrixParseError(name, line_no + 1,
                                   "unexpected end of file, expected row " + std::to_string(i + 1));
        }
        std::istringstream row(line);
        for (int j = 0; j < n; ++j) {
            double value = 0.0;
            if (!(row >> value)) {
                throw MatrixParseError(name, line_no,
                                       "expected " + std::to_string(n) + " values in row " +
                                           std::to_string(i + 1) + ", got " + std::to_string(j));
            }
            m(i, j) = value;
        }
        std::string extra;
        if (row >> extra) {
            throw MatrixParseError(name, line_no,
                                   "row " + std::to_string(i + 1) + " has more than " +
                                       std::to_string(n) + " values");
        }
    }
    return m;
}

inline Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MatrixParseError(path.string(), 0, "cannot open file");
    }
    return load_matrix(in, path.string());
}

inline std::string format_matrix(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    out << m.rows() << "\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << " ";
            out << m(i, j);
        }
        out << "\n";
    }
    return out.str();
}

// Write to <path>.tmp then rename, so readers never observe partial files.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        }
        out << content;
        if (!out) {
            throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    write_file_atomic(path, format_matrix(m));
}

}  // namespace thermolin
