#include "lbtail/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "lbtail/errors.hpp"

namespace lbtail {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

double parse_double(const std::string& token) {
    if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error("csv", "bad numeric field '" + token + "'");
    }
    return value;
}

namespace {

constexpr const char* kCurveHeader =
    "k,estimator,replicates,failures,mean,bias,variance,rmse";

std::size_t parse_count(const std::string& token) {
    std::size_t value = 0;
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error("csv", "bad integer field '" + token + "'");
    }
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) fields.push_back(token);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

void write_curve_csv(std::ostream& out, const CurveResult& result) {
    out << kCurveHeader << '\n';
    for (const CurveRow& row : result.rows) {
        out << row.k << ',' << row.estimator << ',' << row.replicates << ','
            << row.failures << ',' << format_double(row.mean) << ','
            << format_double(row.bias) << ',' << format_double(row.variance)
            << ',' << format_double(row.rmse) << '\n';
    }
}

std::string curve_csv_string(const CurveResult& result) {
    std::ostringstream out;
    write_curve_csv(out, result);
    return out.str();
}

CurveResult parse_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error("csv", "empty input, expected curve header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCurveHeader) {
        throw Error("csv", "unexpected curve header '" + line + "'");
    }
    CurveResult result;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 8) {
            throw Error("csv", "expected 8 fields, got " +
                                   std::to_string(fields.size()));
        }
        CurveRow row;
        row.k = parse_count(fields[0]);
        row.estimator = fields[1];
        row.replicates = parse_count(fields[2]);
        row.failures = parse_count(fields[3]);
        row.mean = parse_double(fields[4]);
        row.bias = parse_double(fields[5]);
        row.variance = parse_double(fields[6]);
        row.rmse = parse_double(fields[7]);
        result.rows.push_back(std::move(row));
    }
    return result;
}

void write_clt_csv(std::ostream& out, const CltReport& report) {
    out << "n,k,replicates,failures,gamma1,rate_factor,mean,variance,s2,"
           "variance_ratio,ks_statistic\n";
    out << report.n << ',' << report.k << ',' << report.replicates << ','
        << report.failures << ',' << format_double(report.gamma1) << ','
        << format_double(report.rate_factor) << ','
        << format_double(report.mean) << ','
        << format_double(report.variance) << ',' << format_double(report.s2)
        << ',' << format_double(report.variance_ratio) << ','
        << format_double(report.ks_statistic) << '\n';
}

}  // namespace lbtail
