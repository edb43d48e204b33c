#pragma once

#include "binrec/ensembles.hpp"
#include "binrec/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace binrec::io {

// Matrix text format: "m N" header, then m rows of N values (17 significant digits).
void write_matrix(std::ostream& out, const Matrix& a);
Matrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const Matrix& a);
Matrix load_matrix(const std::filesystem::path& path);

// Signal text format: "N k" header, then the k 0-based support indices.
void write_signal(std::ostream& out, const BinarySignal& x);
BinarySignal read_signal(std::istream& in);
void save_signal(const std::filesystem::path& path, const BinarySignal& x);
BinarySignal load_signal(const std::filesystem::path& path);

// Plain vectors: "n" header, then n values.
void write_vector(std::ostream& out, const Vector& v);
Vector read_vector(std::istream& in);
void save_vector(const std::filesystem::path& path, const Vector& v);
Vector load_vector(const std::filesystem::path& path);

}  // namespace binrec::io
