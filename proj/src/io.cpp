#include "ddl/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "DDLY serialization assumes a little-endian host");

namespace ddl {

namespace {

constexpr char kMagic[4] = {'D', 'D', 'L', 'Y'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

void write_ddly(const std::string& path, const Eigen::Ref<const Matrix>& m, std::uint32_t k) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    put_u32(out, k);
    // Eigen's default storage is column-major; dump the payload in one write.
    const Matrix dense = m;
    out.write(reinterpret_cast<const char*>(dense.data()),
              static_cast<std::streamsize>(sizeof(Scalar) * dense.size()));
    if (!out) throw IoError("short write: " + path);
}

DdlyFile read_ddly(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("not a DDLY file: " + path);
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) throw IoError("unsupported DDLY version in " + path);
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    DdlyFile file;
    file.k = get_u32(in);
    file.data.resize(rows, cols);
    in.read(reinterpret_cast<char*>(file.data.data()),
            static_cast<std::streamsize>(sizeof(Scalar) * file.data.size()));
    if (!in) throw IoError("truncated DDLY payload: " + path);
    if (!file.data.allFinite()) throw IoError("non-finite entries in " + path);
    return file;
}

void write_pgm_mosaic(const std::string& path, const Dictionary& dict, int patch_side) {
    const Index k = dict.num_atoms();
    require(patch_side >= 1 && static_cast<Index>(patch_side) * patch_side == dict.patch_dim(),
            "write_pgm_mosaic: patch_side^2 must equal the atom dimension");

    const int grid_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
    const int grid_rows = static_cast<int>((k + grid_cols - 1) / grid_cols);
    const int cell = patch_side + 1;
    const int width = grid_cols * cell + 1;
    const int height = grid_rows * cell + 1;

    std::vector<std::uint8_t> img(static_cast<std::size_t>(width) * height, 0);
    for (Index a = 0; a < k; ++a) {
        const int gr = static_cast<int>(a) / grid_cols;
        const int gc = static_cast<int>(a) % grid_cols;
        const Scalar lo = dict.atoms.col(a).minCoeff();
        const Scalar hi = dict.atoms.col(a).maxCoeff();
        const Scalar span = hi - lo;
        for (int j = 0; j < patch_side; ++j) {
            for (int i = 0; i < patch_side; ++i) {
                const Scalar v = dict.atoms(i + j * patch_side, a);
                const int shade =
                    span > 0.0 ? static_cast<int>(std::lround((v - lo) / span * 255.0)) : 128;
                const int y = gr * cell + 1 + i;
                const int x = gc * cell + 1 + j;
                img[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>(shade);
            }
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
    if (!out) throw IoError("short write: " + path);
}

std::string trace_csv_header() { return "iter,node,objective,recon_mse,consensus,dict_dist_true"; }

std::string format_trace_row(const TraceRow& row) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g", row.iter, row.node,
                  row.objective, row.recon_mse, row.consensus, row.dict_dist_true);
    return buf;
}

TraceCsvWriter::TraceCsvWriter(const std::string& path) : out_(path, std::ios::trunc) {
    if (!out_) throw IoError("cannot open for writing: " + path);
    out_ << trace_csv_header() << "\n";
}

void TraceCsvWriter::write(const TraceRow& row) { out_ << format_trace_row(row) << "\n"; }

void TraceCsvWriter::flush() {
    out_.flush();
    if (!out_) throw IoError("trace write failed");
}

void write_trace_csv(const std::string& path, const IterationTrace& trace) {
    TraceCsvWriter writer(path);
    for (const TraceRow& row : trace.rows) writer.write(row);
    writer.flush();
}

IterationTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line != trace_csv_header()) {
        throw IoError("bad trace header in " + path);
    }
    IterationTrace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TraceRow row;
        std::istringstream ss(line);
        char comma;
        ss >> row.iter >> comma >> row.node >> comma >> row.objective >> comma >> row.recon_mse >>
            comma >> row.consensus >> comma >> row.dict_dist_true;
        if (ss.fail()) throw IoError("bad trace row in " + path + ": " + line);
        trace.rows.push_back(row);
    }
    return trace;
}

}  // namespace ddl
