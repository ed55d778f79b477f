#include "gridident/measurement_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <vector>

#include "file_util.hpp"
#include "gridident/errors.hpp"

namespace gridident {

namespace {

void append_double(std::string& out, double x) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    out.append(buf, static_cast<std::size_t>(len));
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    return s;
}

// "key=value" tokens separated by spaces; unknown keys are ignored.
void parse_metadata(std::string_view line, MeasurementSet& ms, const std::string& where) {
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') {
            ++pos;
        }
        auto end = line.find(' ', pos);
        if (end == std::string_view::npos) {
            end = line.size();
        }
        const auto token = line.substr(pos, end - pos);
        pos = end;
        const auto eq = token.find('=');
        if (token.empty() || eq == std::string_view::npos) {
            continue;
        }
        const auto key = token.substr(0, eq);
        const std::string value(token.substr(eq + 1));
        char* stop = nullptr;
        if (key == "seed") {
            ms.seed = std::strtoull(value.c_str(), &stop, 10);
        } else if (key == "noisy" || key == "surrogate") {
            if (value != "0" && value != "1") {
                throw ParseError(where + ": metadata '" + std::string(key) + "' must be 0 or 1");
            }
            (key == "noisy" ? ms.noisy : ms.surrogate) = value == "1";
            continue;
        } else if (key == "sigma") {
            ms.noise = NoiseSpec{std::strtod(value.c_str(), &stop)};
        } else {
            continue;
        }
        if (value.empty() || stop != value.c_str() + value.size()) {
            throw ParseError(where + ": bad metadata value for '" + std::string(key) + "'");
        }
    }
}

}  // namespace

std::string measurements_to_csv(const MeasurementSet& ms) {
    std::string out = "# seed=" + std::to_string(ms.seed) + " noisy=" + (ms.noisy ? "1" : "0") +
                      " surrogate=" + (ms.surrogate ? "1" : "0");
    if (ms.noise) {
        out += " sigma=";
        append_double(out, ms.noise->sigma_scale);
    }
    out.push_back('\n');
    out += kMeasurementCsvHeader;
    out.push_back('\n');
    for (const auto& p : ms.points) {
        for (Eigen::Index j = 0; j < p.V.size(); ++j) {
            out += std::to_string(p.k);
            out.push_back(',');
            out += std::to_string(j + 1);
            for (double x : {p.V(j).real(), p.V(j).imag(), p.I(j).real(), p.I(j).imag()}) {
                out.push_back(',');
                append_double(out, x);
            }
            out.push_back('\n');
        }
    }
    return out;
}

MeasurementSet parse_measurements_csv(std::string_view text, const std::string& origin) {
    std::size_t pos = 0;
    int line_no = 0;
    bool saw_header = false;
    struct Row {
        cplx v;
        cplx i;
    };
    std::map<int, std::map<int, Row>> rows;
    MeasurementSet ms;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        std::string_view line = trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(line_no);
        if (!saw_header && line.front() == '#') {
            parse_metadata(line.substr(1), ms, where);
            continue;
        }
        if (!saw_header) {
            if (line != kMeasurementCsvHeader) {
                throw ParseError(where + ": expected header '" + std::string(kMeasurementCsvHeader) + "'");
            }
            saw_header = true;
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 6) {
            throw ParseError(where + ": expected 6 fields, found " + std::to_string(fields.size()));
        }
        static constexpr const char* kNames[] = {"k", "node", "V_re", "V_im", "I_re", "I_im"};
        int idx[2] = {0, 0};
        for (int f = 0; f < 2; ++f) {
            auto s = trim(fields[static_cast<std::size_t>(f)]);
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx[f]);
            if (ec != std::errc() || ptr != s.data() + s.size() || idx[f] < 1) {
                throw ParseError(where + ": field '" + kNames[f] + "' must be a positive integer");
            }
        }
        double vals[4];
        for (int f = 0; f < 4; ++f) {
            const std::string s(trim(fields[static_cast<std::size_t>(f) + 2]));
            char* end = nullptr;
            vals[f] = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size()) {
                throw ParseError(where + ": field '" + kNames[f + 2] + "' is not a number");
            }
        }
        auto& slot = rows[idx[0]];
        if (slot.count(idx[1])) {
            throw ParseError(where + ": duplicate row for k=" + std::to_string(idx[0]) +
                             ", node=" + std::to_string(idx[1]));
        }
        slot[idx[1]] = {{vals[0], vals[1]}, {vals[2], vals[3]}};
    }
    if (!saw_header) {
        throw ParseError(origin + ": empty measurement file");
    }
    if (rows.empty()) {
        return ms;
    }
    const int tau = static_cast<int>(rows.size());
    const int n = static_cast<int>(rows.begin()->second.size());
    int expected_k = 1;
    for (const auto& [k, nodes] : rows) {
        if (k != expected_k++) {
            throw ParseError(origin + ": operating point indices must run 1.." + std::to_string(tau));
        }
        if (static_cast<int>(nodes.size()) != n || nodes.rbegin()->first != n) {
            throw ParseError(origin + ": operating point " + std::to_string(k) + " does not cover nodes 1.." +
                             std::to_string(n));
        }
        OperatingPoint p{CVector(n), CVector(n), k};
        for (const auto& [node, r] : nodes) {
            p.V(node - 1) = r.v;
            p.I(node - 1) = r.i;
        }
        ms.points.push_back(std::move(p));
    }
    return ms;
}

void save_measurements(const std::string& path, const MeasurementSet& ms) {
    detail::write_file_locked(path, measurements_to_csv(ms));
}

MeasurementSet load_measurements(const std::string& path) {
    return parse_measurements_csv(detail::read_file_locked(path), path);
}

}  // namespace gridident
