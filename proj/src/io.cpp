#include "glab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace glab::io {

namespace {

constexpr char kMagic[8] = {'G', 'L', 'A', 'B', 'F', 'L', 'D', '1'};

template <class T>
void put_le(std::ostream& os, T v)
{
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
    }
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw std::runtime_error("read_field_binary: truncated stream");
    }
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
    }
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

void write_header(std::ostream& os, const Domain& dom, std::uint32_t components)
{
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(os, kDim);
    put_le<std::uint32_t>(os, components);
    put_le<double>(os, dom.h());
    for (int d = 0; d < kDim; ++d) {
        put_le<double>(os, dom.lo()[d]);
    }
    const auto n = dom.nodes_per_axis();
    for (int d = 0; d < kDim; ++d) {
        put_le<std::uint64_t>(os, static_cast<std::uint64_t>(n[d]));
    }
}

void write_coords(std::ostream& os, const Point& x)
{
    os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(x[2]);
}

}  // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field_csv(std::ostream& os, const GridField& f)
{
    const Domain& dom = f.domain();
    os << "x,y,z,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        write_coords(os, dom.node(i));
        os << ',' << format_double(f[i]) << '\n';
    }
}

void write_field_csv(std::ostream& os, const GridVectorField& f)
{
    const Domain& dom = f.domain();
    os << "x,y,z,v0,v1,v2\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        write_coords(os, dom.node(i));
        for (double v : f[i]) {
            os << ',' << format_double(v);
        }
        os << '\n';
    }
}

void write_field_binary(std::ostream& os, const GridField& f)
{
    write_header(os, f.domain(), 1);
    for (double v : f.values()) {
        put_le<double>(os, v);
    }
}

void write_field_binary(std::ostream& os, const GridVectorField& f)
{
    write_header(os, f.domain(), 3);
    for (const Vec3& v : f.values()) {
        for (double x : v) {
            put_le<double>(os, x);
        }
    }
}

FieldSnapshot read_field_binary(std::istream& is)
{
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("read_field_binary: not a field snapshot");
    }
    FieldSnapshot s;
    s.dims = get_le<std::uint32_t>(is);
    s.components = get_le<std::uint32_t>(is);
    if (s.dims != 3 || (s.components != 1 && s.components != 3)) {
        throw std::runtime_error("read_field_binary: unsupported dims or components");
    }
    s.h = get_le<double>(is);
    for (auto& o : s.origin) {
        o = get_le<double>(is);
    }
    std::uint64_t total = s.components;
    for (auto& n : s.nodes) {
        n = get_le<std::uint64_t>(is);
        total *= n;
    }
    if (total > (std::uint64_t{1} << 34)) {
        throw std::runtime_error("read_field_binary: implausible node count");
    }
    s.values.resize(total);
    for (auto& v : s.values) {
        v = get_le<double>(is);
    }
    return s;
}

void write_matrix_market(std::ostream& os, const CsrMatrix& a)
{
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.rows << ' ' << a.cols << ' ' << a.nnz() << '\n';
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            os << r + 1 << ' ' << a.col_idx[k] + 1 << ' ' << format_double(a.values[k]) << '\n';
        }
    }
}

CsrMatrix read_matrix_market(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
        throw std::runtime_error("read_matrix_market: unsupported header");
    }
    while (std::getline(is, line) && !line.empty() && line[0] == '%') {
    }
    std::istringstream head(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(head >> rows >> cols >> nnz)) {
        throw std::runtime_error("read_matrix_market: bad size line");
    }
    struct Triplet {
        std::size_t r, c;
        double v;
    };
    std::vector<Triplet> t(nnz);
    for (auto& x : t) {
        if (!(is >> x.r >> x.c >> x.v) || x.r < 1 || x.c < 1 || x.r > rows || x.c > cols) {
            throw std::runtime_error("read_matrix_market: bad entry");
        }
        --x.r;
        --x.c;
    }
    std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    CsrMatrix a;
    a.rows = rows;
    a.cols = cols;
    a.row_ptr.assign(rows + 1, 0);
    for (const auto& x : t) {
        ++a.row_ptr[x.r + 1];
        a.col_idx.push_back(x.c);
        a.values.push_back(x.v);
    }
    for (std::size_t r = 0; r < rows; ++r) {
        a.row_ptr[r + 1] += a.row_ptr[r];
    }
    return a;
}

WeightedSamples read_samples_csv(std::istream& is)
{
    std::string line;
    std::getline(is, line);  // header
    std::vector<WeightedSamples::Entry> e;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        WeightedSamples::Entry x{};
        char comma = 0;
        if (!(row >> x.value >> comma >> x.weight) || comma != ',') {
            throw std::runtime_error("read_samples_csv: bad row " + std::to_string(lineno));
        }
        e.push_back(x);
    }
    return WeightedSamples(std::move(e));
}

nlohmann::ordered_json number(double v)
{
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

namespace {

nlohmann::ordered_json numbers(const std::vector<double>& v)
{
    auto a = nlohmann::ordered_json::array();
    for (double x : v) {
        a.push_back(number(x));
    }
    return a;
}

}  // namespace

nlohmann::ordered_json to_json(const SolveReport& r)
{
    nlohmann::ordered_json j;
    j["iterations"] = r.iterations;
    j["relative_residual"] = number(r.relative_residual);
    j["stagnated"] = r.stagnated;
    j["preconditioner"] = r.preconditioner;
    j["note"] = r.note;
    j["max_abs"] = number(r.solution.size() ? r.solution.max_abs() : 0.0);
    return j;
}

nlohmann::ordered_json to_json(const BoundReport& r)
{
    nlohmann::ordered_json j;
    j["weak_state"] = number(r.weak_state);
    j["grad_weak"] = number(r.grad_weak);
    j["pointwise_const"] = number(r.pointwise_const);
    j["annulus_radii"] = numbers(r.annulus_radii);
    j["annulus_consts"] = numbers(r.annulus_consts);
    j["symmetry_defect"] = number(r.symmetry_defect);
    return j;
}

nlohmann::ordered_json to_json(const ConstantTrace& t)
{
    nlohmann::ordered_json j;
    j["rung"] = numbers(t.rung);
    j["constant"] = numbers(t.constant);
    j["verdict"] = to_string(t.verdict);
    j["spread"] = number(t.spread);
    j["log_slope"] = number(t.log_slope);
    j["notes"] = t.notes;
    return j;
}

nlohmann::ordered_json to_json(const NormValue& v)
{
    nlohmann::ordered_json j;
    j["value"] = number(v.value);
    j["divergent"] = v.divergent;
    j["error_estimate"] = number(v.error_estimate);
    return j;
}

nlohmann::ordered_json to_json(const radial::BlowupFit& f)
{
    nlohmann::ordered_json j;
    j["eps"] = numbers(f.eps);
    j["ratio"] = numbers(f.ratio);
    j["slope"] = number(f.slope);
    j["intercept"] = number(f.intercept);
    j["r_squared"] = number(f.r_squared);
    j["accepted"] = f.accepted;
    return j;
}

void write_trace_csv(std::ostream& os, const ConstantTrace& t)
{
    os << "rung,constant\n";
    for (std::size_t i = 0; i < t.rung.size(); ++i) {
        os << format_double(t.rung[i]) << ',' << format_double(t.constant[i]) << '\n';
    }
}

namespace {

void dump_into(std::string& out, const nlohmann::ordered_json& j, int indent, int depth)
{
    const auto newline = [&](int level) {
        if (indent > 0) {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * level), ' ');
        }
    };
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) {
                out += ',';
            }
            first = false;
            newline(depth + 1);
            out += nlohmann::ordered_json(key).dump();
            out += indent > 0 ? ": " : ":";
            dump_into(out, value, indent, depth + 1);
        }
        newline(depth);
        out += '}';
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            newline(depth + 1);
            dump_into(out, j[i], indent, depth + 1);
        }
        newline(depth);
        out += ']';
    } else if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            return;
        }
        std::string text = format_double(v);
        if (text.find_first_of(".eE") == std::string::npos) {
            text += ".0";
        }
        out += text;
    } else {
        out += j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j, int indent)
{
    std::string out;
    dump_into(out, j, indent, 0);
    return out;
}

}  // namespace glab::io
