#pragma once

#include <string>

#include "wedgeframe/wedge.hpp"

namespace wedgeframe {

/// Binary dump: "WFDB", u32 version, i32 d, i32 Ntilde, i32 N, u8 byte order
/// (0 little, 1 big), then row-major (re, im) doubles.
void write_block_binary(const DenseBlock& block, const std::string& path);
DenseBlock read_block_binary(const std::string& path);

/// CSV with columns jp_0..jp_{d-1}, j_0..j_{d-1}, re, im; one line per entry.
void write_block_csv(const DenseBlock& block, const std::string& path);

/// Writes via a temporary file in the same directory followed by rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace wedgeframe
