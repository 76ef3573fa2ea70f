#include "sigkit/signatures.hpp"

#include <fstream>
#include <sstream>

namespace sigkit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("csv: line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

DrivePath<double> path_from_csv(const std::string& text, int level) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
    ++line_no;
    auto header = split_csv_line(line);
    if (header.size() < 2 || trim(header[0]) != "t")
        fail(line_no, "expected header 't,x1,...,xd'");
    const int dim = int(header.size()) - 1;
    for (int i = 1; i <= dim; ++i)
        if (trim(header[std::size_t(i)]) != "x" + std::to_string(i))
            fail(line_no, "expected column 'x" + std::to_string(i) + "'");

    std::vector<double> times;
    std::vector<std::vector<double>> points;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (int(fields.size()) != dim + 1)
            fail(line_no, "expected " + std::to_string(dim + 1) + " fields, got " +
                              std::to_string(fields.size()));
        std::vector<double> row(std::size_t(dim) + 1);
        for (std::size_t i = 0; i < row.size(); ++i) {
            try {
                std::size_t pos = 0;
                row[i] = std::stod(trim(fields[i]), &pos);
                if (pos != trim(fields[i]).size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                fail(line_no, "bad number '" + fields[i] + "'");
            }
        }
        if (!times.empty() && !(times.back() < row[0]))
            fail(line_no, "time stamps must strictly increase");
        times.push_back(row[0]);
        points.emplace_back(row.begin() + 1, row.end());
    }
    if (points.empty()) throw std::runtime_error("csv: no data rows");

    DrivePath<double> path;
    path.dim = dim;
    path.level = level;
    path.times = times;
    for (std::size_t j = 1; j < points.size(); ++j) {
        TensorSeries<double> inc(dim, level);
        if (level >= 1)
            for (int i = 0; i < dim; ++i)
                inc.at(1, std::size_t(i)) = points[j][std::size_t(i)] - points[j - 1][std::size_t(i)];
        path.increments.push_back(std::move(inc));
    }
    path.validate();
    return path;
}

DrivePath<double> path_from_csv_file(const std::string& filename, int level) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("csv: cannot open '" + filename + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return path_from_csv(buf.str(), level);
}

}  // namespace sigkit
