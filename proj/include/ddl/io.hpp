// File formats, all bit-exact:
//   DDLY   binary matrix container: magic "DDLY", u32 version, u32 rows,
//          u32 cols, u32 k (dictionary size tag), little-endian, followed by
//          rows*cols f64 entries in column-major order.
//   PGM    P5 8-bit mosaic of dictionary atoms: ceil(sqrt(K)) cells per row,
//          each atom reshaped column-major to patch_side x patch_side,
//          min-max normalized per atom, 1-pixel black separators.
//   trace  CSV with header iter,node,objective,recon_mse,consensus,
//          dict_dist_true; doubles printed with 17 significant digits so a
//          byte comparison is a full-precision comparison.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "ddl/dict_update.hpp"
#include "ddl/diffusion.hpp"
#include "ddl/types.hpp"

namespace ddl {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DdlyFile {
    Matrix data;
    std::uint32_t k = 0;
};

void write_ddly(const std::string& path, const Eigen::Ref<const Matrix>& m, std::uint32_t k);
DdlyFile read_ddly(const std::string& path);

void write_pgm_mosaic(const std::string& path, const Dictionary& dict, int patch_side);

std::string trace_csv_header();
std::string format_trace_row(const TraceRow& row);

// Streams rows as they arrive; header is written on construction.
class TraceCsvWriter {
  public:
    explicit TraceCsvWriter(const std::string& path);
    void write(const TraceRow& row);
    void flush();

  private:
    std::ofstream out_;
};

void write_trace_csv(const std::string& path, const IterationTrace& trace);
IterationTrace read_trace_csv(const std::string& path);

}  // namespace ddl
