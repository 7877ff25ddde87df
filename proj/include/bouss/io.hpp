#pragma once

#include <stdexcept>
#include <string>

#include "bouss/dynamics.hpp"
#include "bouss/functionals.hpp"

namespace bouss {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header row of column names, then one row per record with %.17g values.
void write_series_csv(const std::string& path, const Series& s);
std::string series_csv(const Series& s);
// Throws FormatError when the header differs from kRecordColumns.
Series read_series_csv(const std::string& path);

// Text field: "kmax n2" header, then n1 rows of n2 values (row i is x1[i]).
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);
void write_profile(const std::string& path, const ChannelGrid& g, const Profile& p);
Profile read_profile(const std::string& path);

struct Checkpoint {
  SimState state;
  Profile rho0_star;
};

// Little-endian binary with a CRC32 trailer. Restores bit-identical state.
void save_checkpoint(const std::string& path, const SimState& s, const Profile& rho0_star);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace bouss
