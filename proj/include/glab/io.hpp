#pragma once

// Serialization: CSV and binary field snapshots, coordinate-format matrices,
// JSON reports. Every number is written so that it reads back bit-exactly.

#include "glab/green.hpp"
#include "glab/principles.hpp"
#include "glab/radial.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace glab::io {

/// %.17g, with "nan", "inf" and "-inf" spelled out.
[[nodiscard]] std::string format_double(double v);

/// Header "x,y,z,value", one row per lattice node in node order.
void write_field_csv(std::ostream& os, const GridField& f);
/// Header "x,y,z,v0,v1,v2".
void write_field_csv(std::ostream& os, const GridVectorField& f);

/// Binary snapshot, all integers and doubles little-endian:
///   char[8]  magic "GLABFLD1"
///   u32      dims (3)
///   u32      components per node (1 or 3)
///   f64      h
///   f64[3]   lattice origin
///   u64[3]   nodes per axis
///   f64[]    values, node-major (x fastest), components interleaved
void write_field_binary(std::ostream& os, const GridField& f);
void write_field_binary(std::ostream& os, const GridVectorField& f);

struct FieldSnapshot {
    std::uint32_t dims = 0;
    std::uint32_t components = 0;
    double h = 0.0;
    std::array<double, 3> origin{};
    std::array<std::uint64_t, 3> nodes{};
    std::vector<double> values;
};

/// Throws std::runtime_error on a bad magic number or a truncated stream.
[[nodiscard]] FieldSnapshot read_field_binary(std::istream& is);

/// MatrixMarket "coordinate real general", 1-based indices.
void write_matrix_market(std::ostream& os, const CsrMatrix& a);
[[nodiscard]] CsrMatrix read_matrix_market(std::istream& is);

/// "value,weight" rows after a header line.
[[nodiscard]] WeightedSamples read_samples_csv(std::istream& is);

[[nodiscard]] nlohmann::ordered_json to_json(const SolveReport& r);
[[nodiscard]] nlohmann::ordered_json to_json(const BoundReport& r);
[[nodiscard]] nlohmann::ordered_json to_json(const ConstantTrace& t);
[[nodiscard]] nlohmann::ordered_json to_json(const NormValue& v);
[[nodiscard]] nlohmann::ordered_json to_json(const radial::BlowupFit& f);

/// Header "rung,constant".
void write_trace_csv(std::ostream& os, const ConstantTrace& t);

/// JSON numbers for non-finite doubles: null.
[[nodiscard]] nlohmann::ordered_json number(double v);

/// Pretty-printed JSON with every floating-point value written as %.17g.
[[nodiscard]] std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

}  // namespace glab::io
