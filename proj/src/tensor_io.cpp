#include "leading/tensor_io.hpp"

#include "leading/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace leading {

static_assert(std::endian::native == std::endian::little,
              "tensor archive writer assumes little-endian doubles");

const DenseMatrix& TensorArchive::get(const std::string& name) const {
    for (const auto& [n, m] : tensors)
        if (n == name) return m;
    throw DataError("tensor archive: no tensor named '" + name + "'");
}

bool TensorArchive::has(const std::string& name) const {
    for (const auto& [n, m] : tensors)
        if (n == name) return true;
    return false;
}

void save_archive(const TensorArchive& ar, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << "TENSORS 1\n" << ar.tensors.size() << "\n";
    for (const auto& [name, m] : ar.tensors)
        f << name << " " << m.rows() << " " << m.cols() << " f64\n";
    f << "DATA\n";
    for (const auto& [name, m] : ar.tensors)
        f.write(reinterpret_cast<const char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!f) throw DataError("write failed: " + path);
}

TensorArchive load_archive(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open: " + path);
    std::string magic;
    int version = 0;
    f >> magic >> version;
    if (magic != "TENSORS" || version != 1) throw DataError("bad tensor archive header: " + path);
    std::size_t count = 0;
    f >> count;
    TensorArchive ar;
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::size_t i = 0; i < count; ++i) {
        std::string name, dtype;
        std::size_t rows = 0, cols = 0;
        f >> name >> rows >> cols >> dtype;
        if (!f || dtype != "f64") throw DataError("bad tensor entry in " + path);
        ar.tensors.emplace_back(name, DenseMatrix(rows, cols));
        shapes.emplace_back(rows, cols);
    }
    std::string marker;
    f >> marker;
    if (marker != "DATA") throw DataError("missing DATA marker in " + path);
    f.get(); // newline after marker
    for (auto& [name, m] : ar.tensors) {
        f.read(reinterpret_cast<char*>(m.data()),
               static_cast<std::streamsize>(m.size() * sizeof(double)));
        if (!f) throw DataError("truncated tensor payload in " + path);
    }
    return ar;
}

} // namespace leading
