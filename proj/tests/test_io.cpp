#include "generators.hpp"

#include "glab/io.hpp"
#include "glab/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <sstream>

using namespace glab;

namespace {

DomainPtr small_box() { return std::make_shared<const Domain>(Domain::box({-0.5, 0, 0.25}, {0.5, 0.5, 0.75}, 0.125)); }

std::vector<std::string> lines_of(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) {
        out.push_back(line);
    }
    return out;
}

}  // namespace

TEST_CASE("format_double round-trips every double")
{
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(std::nan("")) == "nan");
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    gen::Rng rng(31);
    for (int k = 0; k < 2000; ++k) {
        const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.integer(-300, 300)));
        const double back = std::strtod(io::format_double(v).c_str(), nullptr);
        REQUIRE(std::memcmp(&v, &back, sizeof(double)) == 0);
    }
}

TEST_CASE("field CSV")
{
    const auto dom = small_box();
    const GridField f = sample([](const Point& p) { return p[0] - 2 * p[1] + p[2] / 3; }, dom);
    std::ostringstream os;
    io::write_field_csv(os, f);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == dom->node_count() + 1);
    CHECK(lines[0] == "x,y,z,value");
    for (std::size_t i = 0; i < dom->node_count(); ++i) {
        std::istringstream row(lines[i + 1]);
        double x[4];
        char c;
        row >> x[0] >> c >> x[1] >> c >> x[2] >> c >> x[3];
        const Point p = dom->node(i);
        REQUIRE(x[0] == p[0]);
        REQUIRE(x[1] == p[1]);
        REQUIRE(x[2] == p[2]);
        REQUIRE(x[3] == f[i]);
    }

    const GridVectorField v = sample([](const Point& p) { return Vec3{p[0], 1.0 / 3, -p[2]}; }, dom);
    std::ostringstream vs;
    io::write_field_csv(vs, v);
    CHECK(lines_of(vs.str())[0] == "x,y,z,v0,v1,v2");
    CHECK(lines_of(vs.str())[1].find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("binary snapshot round trip")
{
    const auto dom = small_box();
    gen::Rng rng(5);
    std::vector<double> vals(dom->node_count());
    for (double& x : vals) {
        x = rng.uniform(-1e3, 1e3);
    }
    const GridField f(dom, vals);
    std::stringstream ss;
    io::write_field_binary(ss, f);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 8) == "GLABFLD1");
    CHECK(bytes.size() == 8 + 4 + 4 + 8 + 24 + 24 + 8 * vals.size());
    const io::FieldSnapshot snap = io::read_field_binary(ss);
    CHECK(snap.dims == 3);
    CHECK(snap.components == 1);
    CHECK(snap.h == 0.125);
    CHECK(snap.origin == std::array<double, 3>{-0.5, 0, 0.25});
    CHECK(snap.nodes == std::array<std::uint64_t, 3>{9, 5, 5});
    REQUIRE(snap.values.size() == vals.size());
    CHECK(std::memcmp(snap.values.data(), vals.data(), vals.size() * sizeof(double)) == 0);

    const GridVectorField v = sample([](const Point& p) { return Vec3{p[0], p[1], p[2]}; }, dom);
    std::stringstream vs;
    io::write_field_binary(vs, v);
    const io::FieldSnapshot vsnap = io::read_field_binary(vs);
    CHECK(vsnap.components == 3);
    REQUIRE(vsnap.values.size() == 3 * dom->node_count());
    CHECK(vsnap.values[3 * 7 + 2] == v[7][2]);

    std::stringstream bad("GLABFLDX0000");
    CHECK_THROWS_AS((void)io::read_field_binary(bad), std::runtime_error);
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS((void)io::read_field_binary(truncated), std::runtime_error);
}

TEST_CASE("MatrixMarket round trip")
{
    const auto dom = std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, 0.25));
    const LinearSystem sys = assemble(presets::random_operator(dom, 9), RightSide{});
    std::stringstream ss;
    io::write_matrix_market(ss, sys.matrix);
    CHECK(lines_of(ss.str())[0].rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
    const CsrMatrix back = io::read_matrix_market(ss);
    CHECK(back.rows == sys.matrix.rows);
    CHECK(back.row_ptr == sys.matrix.row_ptr);
    CHECK(back.col_idx == sys.matrix.col_idx);
    CHECK(std::memcmp(back.values.data(), sys.matrix.values.data(), back.values.size() * sizeof(double)) == 0);

    std::stringstream wrong("%%MatrixMarket matrix array real general\n1 1\n1\n");
    CHECK_THROWS((void)io::read_matrix_market(wrong));
    std::stringstream range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    CHECK_THROWS((void)io::read_matrix_market(range));
}

TEST_CASE("samples CSV")
{
    std::istringstream is("value,weight\n1.5,0.25\n\n3,2\n");
    const WeightedSamples s = io::read_samples_csv(is);
    REQUIRE(s.size() == 2);
    CHECK(s.total_measure() == 2.25);
    std::istringstream bad("value,weight\n1.5;0.25\n");
    CHECK_THROWS((void)io::read_samples_csv(bad));
}

TEST_CASE("JSON reports use 17 significant digits")
{
    nlohmann::ordered_json j;
    j["a"] = 0.1;
    j["b"] = 2.0;
    j["c"] = io::number(std::nan(""));
    j["d"] = nlohmann::ordered_json::array({1, 1e-300});
    j["e"] = "quote \" here";
    const std::string text = io::dump_json(j);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("2.0") != std::string::npos);
    CHECK(text.find("null") != std::string::npos);
    CHECK(text.find(io::format_double(1e-300)) != std::string::npos);
    const auto parsed = nlohmann::json::parse(text);
    CHECK(parsed["a"].get<double>() == 0.1);
    CHECK(parsed["d"][0].get<int>() == 1);
    CHECK(parsed["e"].get<std::string>() == "quote \" here");
    CHECK(io::dump_json(nlohmann::ordered_json::object()) == "{}");

    ConstantTrace t = classify({0.5, 0.25}, {1.0, std::nan("")});
    const auto tj = io::to_json(t);
    CHECK(tj["verdict"] == "inconclusive");
    CHECK(tj["constant"][1].is_null());
    std::ostringstream csv;
    io::write_trace_csv(csv, t);
    CHECK(csv.str() == "rung,constant\n0.5,1\n0.25,nan\n");
}
