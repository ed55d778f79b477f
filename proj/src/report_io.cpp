#include "gridident/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <utility>

#include <json.hpp>

#include "gridident/errors.hpp"

namespace gridident {

using nlohmann::json;

TopologyReport make_report(const TopologyEstimate& est, const std::optional<TopologyScore>& score) {
    TopologyReport r;
    for (int l = 0; l < est.hypothesis.edge_count(); ++l) {
        if (est.y_hat(l) != cplx(0.0, 0.0)) {
            r.edges.push_back({est.hypothesis.edge(l), est.y_hat(l)});
        }
    }
    r.score = score;
    r.alpha = est.alpha;
    r.tau = est.tau;
    r.prior = prior_kind_name(est.prior);
    r.method = method_name(est.method);
    return r;
}

std::string report_to_string(const TopologyReport& report) {
    json edges = json::array();
    for (const auto& e : report.edges) {
        edges.push_back({{"i", e.edge.i}, {"j", e.edge.j}, {"y", json::array({e.y.real(), e.y.imag()})}});
    }
    json score = nullptr;
    if (report.score) {
        score = {{"precision", report.score->precision},
                 {"recall", report.score->recall},
                 {"f1", report.score->f1},
                 {"total_abs_error", report.score->total_abs_error}};
    }
    json doc = {{"edges", std::move(edges)}, {"score", std::move(score)}, {"alpha", report.alpha},
                {"tau", report.tau},         {"prior", report.prior},     {"method", report.method}};
    return doc.dump(2) + "\n";
}

namespace {

double number_at(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw ParseError(where + "." + key + ": expected number");
    }
    return it->get<double>();
}

}  // namespace

TopologyReport parse_report(std::string_view text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError(origin + ": top level must be an object");
    }
    TopologyReport r;
    auto edges = doc.find("edges");
    if (edges == doc.end() || !edges->is_array()) {
        throw ParseError(origin + ".edges: expected array");
    }
    for (std::size_t k = 0; k < edges->size(); ++k) {
        const json& e = (*edges)[k];
        const std::string where = origin + ".edges[" + std::to_string(k) + "]";
        if (!e.is_object() || !e.contains("i") || !e.contains("j") || !e["i"].is_number_integer() ||
            !e["j"].is_number_integer()) {
            throw ParseError(where + ": expected {i, j, y}");
        }
        const json& y = e.contains("y") ? e["y"] : json();
        if (!y.is_array() || y.size() != 2 || !y[0].is_number() || !y[1].is_number()) {
            throw ParseError(where + ".y: expected [re, im] pair of numbers");
        }
        r.edges.push_back({{e["i"].get<int>(), e["j"].get<int>()}, {y[0].get<double>(), y[1].get<double>()}});
    }
    auto score = doc.find("score");
    if (score != doc.end() && !score->is_null()) {
        if (!score->is_object()) {
            throw ParseError(origin + ".score: expected object or null");
        }
        TopologyScore s;
        s.precision = number_at(*score, "precision", origin + ".score");
        s.recall = number_at(*score, "recall", origin + ".score");
        s.f1 = number_at(*score, "f1", origin + ".score");
        s.total_abs_error = number_at(*score, "total_abs_error", origin + ".score");
        r.score = s;
    }
    r.alpha = number_at(doc, "alpha", origin);
    auto tau = doc.find("tau");
    if (tau == doc.end() || !tau->is_number_integer()) {
        throw ParseError(origin + ".tau: expected integer");
    }
    r.tau = tau->get<int>();
    auto prior = doc.find("prior");
    if (prior == doc.end() || !prior->is_string()) {
        throw ParseError(origin + ".prior: expected string");
    }
    r.prior = prior->get<std::string>();
    auto method = doc.find("method");
    if (method != doc.end() && method->is_string()) {
        r.method = method->get<std::string>();
    }
    return r;
}

void sort_sweep_rows(std::vector<SweepRow>& rows) {
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return std::tie(a.seed, a.tau) < std::tie(b.seed, b.tau); });
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].seed == rows[k - 1].seed && rows[k].tau == rows[k - 1].tau) {
            throw ValidationError("duplicate sweep row for tau=" + std::to_string(rows[k].tau) +
                                  ", seed=" + std::to_string(rows[k].seed));
        }
    }
}

static constexpr std::string_view kSweepHeader =
    "tau,seed,total_abs_error_conductance,total_abs_error_susceptance,f1,runtime_s";

std::string sweep_to_csv(const SweepResult& result) {
    std::string out = "# min_measurements=" + std::to_string(result.min_measurements) + "\n";
    out += kSweepHeader;
    out.push_back('\n');
    char buf[256];
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof buf, "%d,%llu,%.17g,%.17g,%.17g,%.6f\n", r.tau,
                      static_cast<unsigned long long>(r.seed), r.total_abs_error_conductance,
                      r.total_abs_error_susceptance, r.f1, r.runtime_s);
        out += buf;
    }
    return out;
}

SweepResult parse_sweep_csv(std::string_view text, const std::string& origin) {
    SweepResult result;
    bool saw_header = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        std::string line(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        while (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '#') {
            const auto key = line.find("min_measurements=");
            if (key != std::string::npos) {
                result.min_measurements = std::atoi(line.c_str() + key + 17);
            }
            continue;
        }
        if (!saw_header) {
            if (line != kSweepHeader) {
                throw ParseError(where + ": expected header '" + std::string(kSweepHeader) + "'");
            }
            saw_header = true;
            continue;
        }
        SweepRow r;
        unsigned long long seed = 0;
        int consumed = 0;
        if (std::sscanf(line.c_str(), "%d,%llu,%lf,%lf,%lf,%lf%n", &r.tau, &seed, &r.total_abs_error_conductance,
                        &r.total_abs_error_susceptance, &r.f1, &r.runtime_s, &consumed) != 6 ||
            static_cast<std::size_t>(consumed) != line.size()) {
            throw ParseError(where + ": malformed sweep row");
        }
        r.seed = seed;
        result.rows.push_back(r);
    }
    if (!saw_header) {
        throw ParseError(origin + ": missing sweep header");
    }
    return result;
}

}  // namespace gridident
