#include "sbridge/closed_forms.hpp"
#include "sbridge/csv.hpp"
#include "sbridge/errors.hpp"

#include <doctest.h>

#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace sbridge;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "sbridge_test_csv";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

} // namespace

TEST_CASE("real formatting round-trips bit for bit") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mant(rng), expo(rng));
        CHECK(parse_real(format_real(v)) == v);
    }
    CHECK(format_real(0.0) == "0.0000000000000000e+00");
    CHECK(format_real(-1.5) == "-1.5000000000000000e+00");
    CHECK_THROWS_AS(parse_real("1.0x"), ValidationError);
    CHECK_THROWS_AS(parse_real(""), ValidationError);
}

TEST_CASE("formatting ignores the C locale") {
    const char* previous = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = previous ? previous : "C";
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8"))
        CHECK(format_real(0.25) == "2.5000000000000000e-01");
    std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("density CSV round trip") {
    const Grid1D g(-8.0, 8.0, 161);
    const ScalarField rho = normalize(sample(g, [](double x) { return gallery::rho(x, 0.3); }));
    const auto path = scratch("rho.csv");
    {
        std::ofstream out(path);
        write_density_csv(out, rho);
    }
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,value");
    const ScalarField back = read_density_csv(path, g);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(back[i] - rho[i]) <= 1e-12 * rho[i] + 1e-300);
}

TEST_CASE("density CSV resampling and validation") {
    const Grid1D g(-4.0, 4.0, 81);
    SUBCASE("linear resampling onto a finer grid, zero outside the data") {
        // Tent density on [-1, 1] given at three points.
        write_text(scratch("tent.csv"), "# tent\n-1,0\n0,1\n1,0\n");
        const ScalarField f = read_density_csv(scratch("tent.csv"), g);
        CHECK(f[g.center_index()] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f[g.center_index() + 5] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(f[0] == 0.0);
        CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("mass off by more than the tolerance") {
        write_text(scratch("heavy.csv"), "x,value\n-1,0\n0,1.1\n1,0\n");
        CHECK_THROWS_AS(read_density_csv(scratch("heavy.csv"), g), ValidationError);
    }
    SUBCASE("malformed files") {
        write_text(scratch("cols.csv"), "x,value\n0,1,2\n");
        CHECK_THROWS_AS(read_csv_points(scratch("cols.csv")), ValidationError);
        write_text(scratch("order.csv"), "0,1\n-1,1\n");
        CHECK_THROWS_AS(read_csv_points(scratch("order.csv")), ValidationError);
        write_text(scratch("neg.csv"), "-1,0\n0,-1\n1,0\n");
        CHECK_THROWS_AS(read_density_csv(scratch("neg.csv"), g), ValidationError);
        CHECK_THROWS_AS(read_csv_points(scratch("does-not-exist.csv")), MissingFileError);
    }
}

TEST_CASE("lattice fields CSV") {
    const Grid1D g(0.0, 1.0, 3);
    const TimeGrid tg(0.0, 1.0, 1);
    const FieldSeries a = sample_series(g, tg, [](double x, double t) { return x + t; });
    const FieldSeries b = sample_series(g, tg, [](double x, double) { return 2.0 * x; });
    std::ostringstream out;
    write_fields_csv(out, {{"a", &a}, {"b", &b}});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,a,b");
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 6);
    const FieldSeries shorter(a.begin(), a.begin() + 1);
    CHECK_THROWS_AS(write_fields_csv(out, {{"a", &a}, {"s", &shorter}}), NumericDomainError);
}
