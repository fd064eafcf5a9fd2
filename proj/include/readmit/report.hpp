#pragma once

#include <string>
#include <vector>

#include "readmit/eval.hpp"
#include "readmit/explain.hpp"
#include "readmit/synth.hpp"

namespace readmit {

// Method | Avg. c-stats | 95% CI | Delta, one row per method, baseline
// delta rendered as "-".
std::string render_method_table(const std::vector<MethodReport>& methods);

// Modality | Patients | Notes | Common Patients.
std::string render_describe_table(const std::vector<DescribeRow>& rows);

// Per-modality top-k feature table.
std::string render_di_table(const DiReport& report);

}  // namespace readmit
