#include "hyposde/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hyposde/errors.hpp"

namespace hyposde {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + file + "' for writing");
    out << content;
    if (!out) throw ParseError("write failed for '" + file + "'");
}

void write_path_csv(const PathSample& path, const std::string& file) {
    std::ostringstream os;
    os << "t";
    for (long j = 0; j < path.states.cols(); ++j) os << ",x" << (j + 1);
    os << "\n";
    for (long i = 0; i < path.times.size(); ++i) {
        os << format_double(path.times[i]);
        for (long j = 0; j < path.states.cols(); ++j) os << "," << format_double(path.states(i, j));
        os << "\n";
    }
    write_text_file(file, os.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

PathSample read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open '" + file + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file '" + file + "'", 0);
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "t") throw ParseError("malformed header: missing column 't'", 0);
    const int n_cols = static_cast<int>(header.size()) - 1;
    if (n_cols < 1) throw ParseError("malformed header: no state columns", 0);
    for (int j = 0; j < n_cols; ++j) {
        const std::string want = "x" + std::to_string(j + 1);
        if (header[j + 1] != want) throw ParseError("malformed header: missing column '" + want + "'", 0);
    }

    std::vector<std::vector<double>> rows;
    long row_idx = 0;
    while (std::getline(in, line)) {
        ++row_idx;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != n_cols + 1)
            throw ParseError("row " + std::to_string(row_idx) + ": expected " + std::to_string(n_cols + 1) +
                                 " cells, got " + std::to_string(cells.size()),
                             row_idx);
        std::vector<double> vals(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            try {
                std::size_t pos = 0;
                vals[c] = std::stod(cells[c], &pos);
                if (pos != cells[c].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError("row " + std::to_string(row_idx) + ": cell '" + cells[c] + "' is not a number",
                                 row_idx);
            }
        }
        rows.push_back(std::move(vals));
    }
    if (rows.size() < 1) throw ParseError("no data rows in '" + file + "'", 0);

    PathSample path;
    path.times.resize(static_cast<long>(rows.size()));
    path.states.resize(static_cast<long>(rows.size()), n_cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        path.times[static_cast<long>(i)] = rows[i][0];
        for (int j = 0; j < n_cols; ++j) path.states(static_cast<long>(i), j) = rows[i][j + 1];
    }
    path.validate_grid();
    return path;
}

void write_filter_trace_csv(const FilterTrace& trace, const std::string& file) {
    std::ostringstream os;
    if (trace.states.empty()) throw ConfigError("write_filter_trace_csv: empty trace");
    const long h = trace.states.front().m.size();
    os << "k";
    for (long i = 1; i <= h; ++i) os << ",m_" << i;
    for (long i = 1; i <= h; ++i)
        for (long j = 1; j <= h; ++j) os << ",q_" << i << j;
    os << "\n";
    for (const auto& st : trace.states) {
        os << st.k;
        for (long i = 0; i < h; ++i) os << "," << format_double(st.m[i]);
        for (long i = 0; i < h; ++i)
            for (long j = 0; j < h; ++j) os << "," << format_double(st.q(i, j));
        os << "\n";
    }
    write_text_file(file, os.str());
}

std::string fit_result_json(const ContrastResult& result, const VectorXd& standard_errors,
                            const std::string& config_description, std::uint64_t seed) {
    nlohmann::json j;
    j["theta_hat"] = nlohmann::json::object();
    for (int i = 0; i < result.theta_hat.size(); ++i)
        j["theta_hat"][result.theta_hat.names()[i]] = result.theta_hat[i];
    if (standard_errors.size() == result.theta_hat.size()) {
        j["se"] = nlohmann::json::object();
        for (int i = 0; i < result.theta_hat.size(); ++i)
            j["se"][result.theta_hat.names()[i]] = standard_errors[i];
    }
    j["contrast_value"] = result.contrast_value;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["optimizer"] = result.optimizer_tag;
    j["config"] = config_description;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

}  // namespace hyposde
