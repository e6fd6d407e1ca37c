#pragma once

#include "wachlab/classifier.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/res_series.hpp"
#include "wachlab/series.hpp"
#include "wachlab/wach.hpp"

#include <string>

namespace wachlab {

// {low, shift, Mx, coeffs}; coefficients are base-10 strings, or arrays of
// e strings (coefficients of 1, pi, ..., pi^{e-1}) when e > 1.
std::string series_to_json(const Series& s, int indent = -1);
Series series_from_json(const RingPtr& ring, const std::string& text);

// {low, Mx, coeffs}; F_{p^2} coefficients as "a+b*t" strings.
std::string res_series_to_json(const ResSeries& s, int indent = -1);
ResSeries res_series_from_json(long p, const std::string& text);

std::string wach_to_json(const WachData& d, int indent = -1);
WachData wach_from_json(const std::string& text);

std::string res_wach_to_json(const ResWach& w, int indent = -1);
std::string char_witness_to_json(const CharWitness& c, int indent = -1);

std::string reduction_to_json(const ReductionResult& r, int indent = -1);
std::string cross_report_to_json(const CrossReport& r, int indent = -1);
std::string wach_report_to_json(const WachReport& r, int indent = -1);

} // namespace wachlab
