#pragma once

#include "sbridge/numgrid.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sbridge {

/// Locale-independent scientific notation with 17 significant digits.
std::string format_real(double value);

/// Parses a full token as a double; throws ValidationError otherwise.
double parse_real(std::string_view token);

/// Two-column CSV "x,value" with a header line.
void write_density_csv(std::ostream& out, const ScalarField& f, std::string_view value_name = "value");

struct NamedSeries {
    std::string name;
    const FieldSeries* series;
};

/// Long-format lattice CSV: header t,x,<names...>, one row per (slice, node).
void write_fields_csv(std::ostream& out, const std::vector<NamedSeries>& columns);

/// Two-column points (x, value) of a CSV file; a non-numeric first line is a header.
struct CsvPoints {
    std::vector<double> x;
    std::vector<double> value;
};

/// Throws MissingFileError if the file cannot be opened, ValidationError on malformed rows
/// or non-increasing x.
CsvPoints read_csv_points(const std::filesystem::path& path);

/// Reads a density, checks that its own trapezoid mass is 1 within `mass_tolerance`
/// (ValidationError otherwise), resamples it to `grid` by linear interpolation
/// (zero outside the data range) and renormalizes.
ScalarField read_density_csv(const std::filesystem::path& path, const Grid1D& grid, double mass_tolerance = 1e-6);

} // namespace sbridge
