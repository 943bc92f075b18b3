#include "sbridge/csv.hpp"

#include "sbridge/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sbridge {

std::string format_real(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

double parse_real(std::string_view token) {
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t'))
        token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r'))
        token.remove_suffix(1);
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw ValidationError("not a real number: '" + std::string(token) + "'");
    return value;
}

void write_density_csv(std::ostream& out, const ScalarField& f, std::string_view value_name) {
    out << "x," << value_name << '\n';
    for (std::size_t i = 0; i < f.size(); ++i)
        out << format_real(f.grid().node(i)) << ',' << format_real(f[i]) << '\n';
}

void write_fields_csv(std::ostream& out, const std::vector<NamedSeries>& columns) {
    if (columns.empty())
        throw NumericDomainError("write_fields_csv: no columns");
    const FieldSeries& first = *columns.front().series;
    for (const auto& c : columns)
        if (c.series->size() != first.size())
            throw NumericDomainError("write_fields_csv: column '" + c.name + "' has a different slice count");
    out << "t,x";
    for (const auto& c : columns)
        out << ',' << c.name;
    out << '\n';
    for (std::size_t k = 0; k < first.size(); ++k) {
        const Grid1D& grid = first[k].grid();
        const std::string t = format_real(first[k].time());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << t << ',' << format_real(grid.node(i));
            for (const auto& c : columns)
                out << ',' << format_real((*c.series)[k][i]);
            out << '\n';
        }
    }
}

CsvPoints read_csv_points(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingFileError("cannot open '" + path.string() + "'");
    CsvPoints pts;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line.front() == '#')
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
        const std::string_view view(line);
        double x = 0.0;
        double v = 0.0;
        try {
            x = parse_real(view.substr(0, comma));
            v = parse_real(view.substr(comma + 1));
        } catch (const ValidationError&) {
            if (pts.x.empty() && !header_seen) {
                header_seen = true;
                continue;
            }
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        if (!pts.x.empty() && !(x > pts.x.back()))
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": x values must increase");
        pts.x.push_back(x);
        pts.value.push_back(v);
    }
    if (pts.x.size() < 2)
        throw ValidationError(path.string() + ": need at least two data rows");
    return pts;
}

ScalarField read_density_csv(const std::filesystem::path& path, const Grid1D& grid, double mass_tolerance) {
    const CsvPoints pts = read_csv_points(path);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < pts.x.size(); ++i)
        mass += 0.5 * (pts.x[i + 1] - pts.x[i]) * (pts.value[i] + pts.value[i + 1]);
    for (double v : pts.value)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError(path.string() + ": density values must be finite and non-negative");
    if (std::abs(mass - 1.0) > mass_tolerance) {
        std::ostringstream os;
        os << path.string() << ": density has mass " << mass << ", expected 1 within " << mass_tolerance;
        throw ValidationError(os.str());
    }
    std::vector<double> values(grid.size(), 0.0);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        if (x < pts.x.front() || x > pts.x.back())
            continue;
        while (seg + 2 < pts.x.size() && x > pts.x[seg + 1])
            ++seg;
        const double a = (x - pts.x[seg]) / (pts.x[seg + 1] - pts.x[seg]);
        values[i] = (1.0 - a) * pts.value[seg] + a * pts.value[seg + 1];
    }
    return normalize(ScalarField(grid, std::move(values)));
}

} // namespace sbridge
