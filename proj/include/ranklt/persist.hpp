#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ranklt/grid_paths.hpp"
#include "ranklt/identities.hpp"

namespace ranklt {

// Shortest decimal string that parses back to exactly the same double, and the
// matching parser. All file formats below go through these two so that
// write-then-read is a bitwise identity.
std::string format_double(double x);
double parse_double(std::string_view s);  // throws std::runtime_error on bad input

// Ensemble persistence. A stem `foo` expands to three files:
//   foo.csv        header `time,<labels...>`, one row per grid node, values
//   foo.jumps.csv  same header and shape, jump sizes (zeros for continuous)
//   foo.meta.json  model, params, seed, T, n_steps, labels
// All three are written unconditionally and all three are required to load;
// loading rebuilds paths from values + jumps, so the reconstructed ensemble is
// bitwise equal to the saved one. Parse failures throw std::runtime_error with
// file/line/field diagnostics.
void save_ensemble(const Ensemble& e, const std::filesystem::path& stem);
Ensemble load_ensemble(const std::filesystem::path& stem);

/// ResidualReport as pretty-printed JSON.
void write_report_json(const ResidualReport& r, const std::filesystem::path& file);

/// Residual path as CSV: `time,residual[,residual_divided]`.
void write_residual_csv(const ResidualReport& r, const TimeGrid& grid,
                        const std::filesystem::path& file);

// One aggregate line of a Monte Carlo run: ensemble statistics of the
// sup-residual of one identity at one grid resolution.
struct SummaryRow {
    std::string identity;
    double dt = 0.0;
    double mean_sup_residual = 0.0;
    double std_err = 0.0;
    double mean_normalizer = 0.0;
    double rel_residual = 0.0;
};

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& file);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& file);

}  // namespace ranklt
