#pragma once

#include "fracspec/grid.hpp"

#include <string>
#include <vector>

namespace fracspec {

struct ReportRow {
    std::string label;
    double value = 0.0;
    bool pass = true;
};

/// Result of a sweep-style verification: a named extremum, where it was
/// attained, per-item breakdown rows, and an overall verdict.
struct SymbolReport {
    std::string quantity;
    double value = 0.0;
    std::vector<double> arg_xi;
    cplx arg_lambda{0.0, 0.0};
    bool pass = false;
    std::string detail;
    std::vector<ReportRow> rows;
};

struct CoercivityRow {
    cplx lambda{0.0, 0.0};
    int alpha_index = 0; // term index; -1 marks the time-derivative row
    double scaled_term_norm = 0.0;
    double u_norm_scaled = 0.0;
    double total_ratio = 0.0;
    bool ok = true;
};

struct CoercivityReport {
    std::string norm_descriptor;
    std::vector<CoercivityRow> rows;
    bool uniform = false;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    std::string detail;
};

} // namespace fracspec
