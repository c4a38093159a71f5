#pragma once

#include <iosfwd>
#include <string>

#include "lbtail/experiments.hpp"

namespace lbtail {

// Shortest decimal form that parses back to the identical double; this is
// what makes the CSV round trip bit-exact and the output bytes stable.
std::string format_double(double value);
double parse_double(const std::string& token);

// Header: k,estimator,replicates,failures,mean,bias,variance,rmse
void write_curve_csv(std::ostream& out, const CurveResult& result);
std::string curve_csv_string(const CurveResult& result);
CurveResult parse_curve_csv(std::istream& in);

// Header: n,k,replicates,failures,gamma1,rate_factor,mean,variance,s2,
//         variance_ratio,ks_statistic
void write_clt_csv(std::ostream& out, const CltReport& report);

}  // namespace lbtail
