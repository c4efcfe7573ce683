#pragma once
// Diagnostics series as CSV: fixed column order, '.' decimals, ',' separator,
// LF line endings, 17 significant digits. Byte-exact across runs.

#include <string>
#include <vector>

#include "chs/diagnostics.hpp"
#include "chs/text.hpp"
#include "chs/vtk.hpp"

namespace chs {

inline const char* kDiagnosticsCsvHeader =
    "time,total_mass,energy,c_min,c_max,c_variance,theta_min,theta_max,"
    "velocity_l2,divergence_norm,centroid_height,newton_iterations";

inline std::string diagnostics_csv_text(const std::vector<DiagnosticsRecord>& records) {
    using detail::format_double;
    std::string out = kDiagnosticsCsvHeader;
    out += "\n";
    for (const DiagnosticsRecord& r : records) {
        out += format_double(r.time);
        out += ',';
        out += format_double(r.total_mass);
        out += ',';
        out += format_double(r.energy);
        out += ',';
        out += format_double(r.c_min);
        out += ',';
        out += format_double(r.c_max);
        out += ',';
        out += format_double(r.c_variance);
        out += ',';
        out += format_double(r.theta_min);
        out += ',';
        out += format_double(r.theta_max);
        out += ',';
        out += format_double(r.velocity_l2);
        out += ',';
        out += format_double(r.divergence_norm);
        out += ',';
        out += r.centroid_height ? format_double(*r.centroid_height) : "nan";
        out += ',';
        out += std::to_string(r.newton_iterations);
        out += '\n';
    }
    return out;
}

inline void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                                  const std::string& path) {
    if (records.empty()) throw ValidationError("write_diagnostics_csv: empty series");
    detail::write_text_file(path, diagnostics_csv_text(records));
}

}  // namespace chs
