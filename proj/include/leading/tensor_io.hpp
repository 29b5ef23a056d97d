#pragma once

#include "leading/dense.hpp"

#include <string>
#include <utility>
#include <vector>

namespace leading {

// Named tensor collection used for checkpoints and snapshots.
// File layout: a text header listing name/shape/dtype per tensor, a DATA
// marker, then the raw little-endian f64 payloads in header order.
// Round-trips are bit-exact.
struct TensorArchive {
    std::vector<std::pair<std::string, DenseMatrix>> tensors;

    void add(const std::string& name, DenseMatrix m) { tensors.emplace_back(name, std::move(m)); }
    const DenseMatrix& get(const std::string& name) const;
    bool has(const std::string& name) const;
};

void save_archive(const TensorArchive& ar, const std::string& path);
TensorArchive load_archive(const std::string& path);

} // namespace leading
